"""Frames and the polynomial system of rank-deficient Hermitian matrices they annihilate.

A d x d Hermitian matrix is written with real variables ``xjk`` (j <= k) and
``yjk`` (j < k): entry (j, k) is ``xjk + i*yjk`` above the diagonal and its
conjugate below.  A frame vector ``phi`` gives the real linear form
``phi^* Q phi``; the (d-1) x (d-1) minors of ``Q`` cut out rank <= d - 2.
"""
from __future__ import annotations

import hashlib
import json
import logging
import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Sequence

from .exact_arith import ZERO, GaussRational, as_gauss
from .multipoly import Polynomial, VariableTable

log = logging.getLogger(__name__)

__all__ = [
    "Frame",
    "FrameError",
    "HermitianSystem",
    "Presolve",
    "hermitian_symbol_matrix",
    "hermitian_system",
    "hermitian_table",
    "linear_presolve",
    "measurement_form",
    "minors",
    "ELEVEN_VECTOR_ROWS",
    "eleven_vector_frame",
]


class FrameError(ValueError):
    pass


# rows of the 11-vector frame in C^4 (coordinate vectors first)
ELEVEN_VECTOR_ROWS = [
    ["1", "0", "0", "0"],
    ["0", "1", "0", "0"],
    ["0", "0", "1", "0"],
    ["0", "0", "0", "1"],
    ["1", "9i", "-5-7i", "-6-7i"],
    ["1", "1-i", "-5-2i", "-1-8i"],
    ["1", "-2+4i", "-4-2i", "3+8i"],
    ["1", "-3+i", "1-8i", "7-6i"],
    ["1", "3-3i", "-8+7i", "-6-2i"],
    ["1", "-3+5i", "5+6i", "2i"],
    ["1", "-3+8i", "5-5i", "-6-4i"],
]


@dataclass(frozen=True)
class Frame:
    """``n`` vectors in C^d with Gaussian-rational entries."""

    vectors: tuple

    def __post_init__(self):
        vecs = tuple(tuple(as_gauss(c) for c in v) for v in self.vectors)
        object.__setattr__(self, "vectors", vecs)
        if not vecs:
            raise FrameError("a frame needs at least one vector")
        d = len(vecs[0])
        if any(len(v) != d for v in vecs):
            raise FrameError("frame vectors have different lengths")
        if d < 2:
            raise FrameError("frames need dimension d >= 2")
        if len(vecs) < d:
            raise FrameError(f"{len(vecs)} vectors cannot span C^{d}")
        if _complex_rank(vecs) < d:
            raise FrameError("frame vectors do not span C^d")

    @property
    def d(self) -> int:
        return len(self.vectors[0])

    @property
    def n(self) -> int:
        return len(self.vectors)

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def replace_vector(self, k: int, vector) -> "Frame":
        vecs = list(self.vectors)
        vecs[k] = tuple(as_gauss(c) for c in vector)
        return Frame(tuple(vecs))

    # -- serialization ---------------------------------------------------
    def to_json(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "vectors": [[c.to_pair() for c in v] for v in self.vectors],
        }

    @classmethod
    def from_json(cls, data) -> "Frame":
        if not isinstance(data, dict) or "vectors" not in data:
            raise FrameError("frame JSON needs a 'vectors' field")
        vecs = []
        for k, v in enumerate(data["vectors"]):
            try:
                vecs.append(tuple(GaussRational.from_pair(c) if isinstance(c, list) else as_gauss(str(c)) for c in v))
            except (TypeError, ValueError) as exc:
                raise FrameError(f"vectors[{k}]: {exc}") from exc
        frame = cls(tuple(vecs))
        if "d" in data and data["d"] != frame.d:
            raise FrameError(f"field 'd' says {data['d']} but vectors have length {frame.d}")
        if "n" in data and data["n"] != frame.n:
            raise FrameError(f"field 'n' says {data['n']} but there are {frame.n} vectors")
        return frame

    def to_text(self) -> str:
        return "\n".join(" ".join(_gauss_text(c) for c in v) for v in self.vectors) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Frame":
        """One vector per line, entries like ``-5-7i`` separated by whitespace or ``&``."""
        vecs = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].replace("&", " ").replace("\\\\", " ").strip()
            if not line:
                continue
            try:
                vecs.append(tuple(GaussRational.parse(tok) for tok in line.split()))
            except ValueError as exc:
                raise FrameError(f"line {lineno}: {exc}") from exc
        return cls(tuple(vecs))

    @classmethod
    def load(cls, path) -> "Frame":
        with open(path) as fh:
            text = fh.read()
        if text.lstrip().startswith("{"):
            try:
                data = json.loads(text)
            except json.JSONDecodeError as exc:
                raise FrameError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
            return cls.from_json(data)
        return cls.from_text(text)


def _gauss_text(c: GaussRational) -> str:
    return str(c).replace("*i", "i")


def eleven_vector_frame() -> Frame:
    return Frame(tuple(tuple(GaussRational.parse(c) for c in row) for row in ELEVEN_VECTOR_ROWS))


def _complex_rank(vecs) -> int:
    rows = [list(v) for v in vecs]
    rank, ncols = 0, len(rows[0])
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = 1 / rows[rank][col]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col] * inv
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# symbolic Hermitian matrix


def hermitian_table(d: int) -> VariableTable:
    """x11, x12, ..., xdd then y12, ..., y(d-1)d."""
    if d < 2:
        raise FrameError("need d >= 2")
    xs = [f"x{j}{k}" for j in range(1, d + 1) for k in range(j, d + 1)]
    ys = [f"y{j}{k}" for j in range(1, d + 1) for k in range(j + 1, d + 1)]
    return VariableTable(xs + ys)


def hermitian_symbol_matrix(d: int, table: VariableTable | None = None) -> list[list[Polynomial]]:
    table = table or hermitian_table(d)
    i = table.const(GaussRational(0, 1))
    Q = [[None] * d for _ in range(d)]
    for j in range(d):
        Q[j][j] = table.var(f"x{j + 1}{j + 1}")
        for k in range(j + 1, d):
            x, y = table.var(f"x{j + 1}{k + 1}"), table.var(f"y{j + 1}{k + 1}")
            Q[j][k] = x + i * y
            Q[k][j] = x - i * y
    return Q


def _det(M: list[list[Polynomial]]) -> Polynomial:
    n = len(M)
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    acc = None
    for c in range(n):
        sub = [row[:c] + row[c + 1:] for row in M[1:]]
        term = M[0][c] * _det(sub)
        if c % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def minors(d: int, table: VariableTable | None = None) -> list[Polynomial]:
    """The d^2 minors ``m_jk`` of size d-1 (row j, column k removed), row-major."""
    table = table or hermitian_table(d)
    Q = hermitian_symbol_matrix(d, table)
    out = []
    for j in range(d):
        for k in range(d):
            sub = [[Q[r][c] for c in range(d) if c != k] for r in range(d) if r != j]
            out.append(_det(sub))
    return out


def measurement_form(phi: Sequence, table: VariableTable | None = None) -> Polynomial:
    """``phi^* Q phi`` as a real linear form in the Hermitian variables."""
    phi = [as_gauss(c) for c in phi]
    d = len(phi)
    table = table or hermitian_table(d)
    terms = {}
    n = len(table)

    def put(name, coeff):
        if coeff:
            exp = [0] * n
            exp[table.index(name)] = 1
            terms[tuple(exp)] = coeff

    for j in range(d):
        put(f"x{j + 1}{j + 1}", phi[j].conj() * phi[j])
        for k in range(j + 1, d):
            # conj(phi_j) phi_k (x + iy) + conj(phi_k) phi_j (x - iy)
            w = phi[j].conj() * phi[k]
            cx = w + w.conj()
            cy = GaussRational(0, 1) * (w - w.conj())
            put(f"x{j + 1}{k + 1}", cx)
            put(f"y{j + 1}{k + 1}", cy)
    form = Polynomial(table, terms)
    if not form.is_real():
        raise AssertionError("measurement form picked up an imaginary coefficient")
    return form


# ---------------------------------------------------------------------------
# systems


@dataclass
class HermitianSystem:
    """Nonlinear generators (``minors``) plus linear ``forms`` over one table."""

    table: VariableTable
    minors: list
    forms: list
    label: str = ""
    frame: Frame | None = field(default=None, repr=False)

    def generators(self) -> list[Polynomial]:
        return list(self.minors) + list(self.forms)

    def digest(self) -> str:
        if self.frame is not None:
            return self.frame.digest()
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def to_json(self) -> dict:
        return {
            "variables": list(self.table.names),
            "nonlinear": [p.to_str() for p in self.minors],
            "forms": [p.to_str() for p in self.forms],
        }

    @classmethod
    def from_json(cls, data, label: str = "") -> "HermitianSystem":
        """``{"variables": [...], "nonlinear": [...], "forms": [...]}`` with polynomials as text."""
        if not isinstance(data, dict):
            raise FrameError("system JSON must be an object")
        for key in ("variables", "nonlinear", "forms"):
            if key not in data:
                raise FrameError(f"system JSON needs a {key!r} field")
        try:
            table = VariableTable(data["variables"])
        except ValueError as exc:
            raise FrameError(f"variables: {exc}") from exc
        polys = {}
        for key in ("nonlinear", "forms"):
            out = []
            for k, text in enumerate(data[key]):
                try:
                    out.append(Polynomial.parse(text, table))
                except ValueError as exc:
                    raise FrameError(f"{key}[{k}]: {exc}") from exc
            polys[key] = out
        for k, form in enumerate(polys["forms"]):
            if not form.is_real() or not _is_linear_homogeneous(form):
                raise FrameError(f"forms[{k}]: not a real homogeneous linear form")
        return cls(table, polys["nonlinear"], polys["forms"], label=label or data.get("label", ""))

    @classmethod
    def load(cls, path) -> "HermitianSystem":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FrameError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
        return cls.from_json(data)

    def real_minors(self) -> tuple[list[Polynomial], list[tuple]]:
        """Real generators spanning the same ideal as the minors, with the map back.

        Returns ``(polys, recipe)`` where ``recipe[k]`` lists ``(minor index,
        GaussRational weight)`` pairs such that ``polys[k] = sum(w * minor)``.
        Conjugate pairs ``m, conj(m)`` are replaced by their real and imaginary
        parts; minors that are already real pass through.
        """
        polys, recipe = [], []
        used = set()
        half = Fraction(1, 2)
        for a, m in enumerate(self.minors):
            if a in used:
                continue
            if m.is_real():
                polys.append(m)
                recipe.append([(a, GaussRational(1))])
                used.add(a)
                continue
            mc = m.conj_coeffs()
            b = next((b for b in range(len(self.minors)) if b not in used and b != a and self.minors[b] == mc), None)
            if b is None:
                # no conjugate partner among the generators: keep it complex
                polys.append(m)
                recipe.append([(a, GaussRational(1))])
                used.add(a)
                continue
            used.update((a, b))
            re, im = m.real_part(), m.imag_part()
            if re:
                polys.append(re)
                recipe.append([(a, GaussRational(half)), (b, GaussRational(half))])
            if im:
                polys.append(im)
                # (m - conj m) / (2i) = -i/2 m + i/2 conj m
                recipe.append([(a, GaussRational(0, -half)), (b, GaussRational(0, half))])
        return polys, recipe


def hermitian_system(frame: Frame) -> HermitianSystem:
    table = hermitian_table(frame.d)
    return HermitianSystem(
        table,
        minors(frame.d, table),
        [measurement_form(v, table) for v in frame.vectors],
        label=f"frame d={frame.d} n={frame.n}",
        frame=frame,
    )


@dataclass
class Presolve:
    """Exact solution of the linear forms.

    ``bindings[v]`` is a linear polynomial in ``kept`` variables;
    ``combination[v]`` expresses ``v - bindings[v]`` as a rational
    combination of the input forms (list of Fractions aligned with them).
    ``residual_forms`` are forms left over in protected variables only.
    """

    bindings: dict
    kept: list
    combination: dict
    rank: int
    residual_forms: list = field(default_factory=list)

    def apply(self, p: Polynomial) -> Polynomial:
        return p.substitute(self.bindings) if self.bindings else p

    def to_json(self) -> dict:
        return {
            "kept": list(self.kept),
            "rank": self.rank,
            "bindings": {v: b.to_json() for v, b in self.bindings.items()},
        }


def linear_presolve(system: HermitianSystem, protect: Iterable[str] = ()) -> tuple[Presolve, list[Polynomial]]:
    """Gaussian elimination on the forms, then substitution into the minors.

    Each form (in input order, after earlier substitutions) eliminates the
    variable with the largest absolute coefficient, ties going to the first
    in table order; ``protect`` variables are never eliminated.
    """
    table = system.table
    protect = set(protect)
    n_forms = len(system.forms)
    bindings: dict[str, Polynomial] = {}
    combination: dict[str, list] = {}
    residual = []
    zero = table.const(0)
    for k, form in enumerate(system.forms):
        if not form.is_real():
            raise ValueError(f"form {k} has non-real coefficients")
        reduced = form.substitute(bindings) if bindings else form
        if reduced.is_constant():
            if reduced:
                raise ValueError(f"form {k} reduces to a nonzero constant")
            log.warning("form %d is linearly dependent on earlier forms", k)
            continue
        if reduced.total_degree() != 1 or not _is_linear_homogeneous(reduced):
            raise ValueError(f"form {k} is not a homogeneous linear form")
        # coefficient vector of reduced = form - sum_v c_v (v - L_v)
        comb = [Fraction(0)] * n_forms
        comb[k] = Fraction(1)
        for v in bindings:
            cv = form.coefficient(_unit(table, v)).re
            if cv:
                for t, val in enumerate(combination[v]):
                    comb[t] -= cv * val
        cands = []
        for exp, c in reduced.terms.items():
            name = table.names[exp.index(1)]
            if name not in protect:
                cands.append((-abs(c.re), table.index(name), name, c.re))
        if not cands:
            log.warning("form %d only involves protected variables; kept as a residual form", k)
            residual.append((k, reduced, comb))
            continue
        cands.sort()
        _, _, pivot, pc = cands[0]
        # reduced = pc * (pivot - L)
        L = table.var(pivot) - reduced / pc
        new_comb = [c / pc for c in comb]
        pexp = _unit(table, pivot)
        for v in list(bindings):
            beta = bindings[v].coefficient(pexp).re
            if beta:
                bindings[v] = bindings[v].substitute({pivot: L})
                combination[v] = [a + beta * b for a, b in zip(combination[v], new_comb)]
        bindings[pivot] = L
        combination[pivot] = new_comb
    kept = [v for v in table.names if v not in bindings]
    residual_forms = [r for _, r, _ in residual]
    pre = Presolve(bindings, kept, combination, len(bindings), residual_forms)
    if zero in residual_forms:
        raise AssertionError("zero residual form")
    reduced_minors = [pre.apply(m) for m in system.minors]
    return pre, reduced_minors


def _unit(table: VariableTable, name: str) -> tuple:
    exp = [0] * len(table)
    exp[table.index(name)] = 1
    return tuple(exp)


def _is_linear_homogeneous(p: Polynomial) -> bool:
    return all(sum(e) == 1 for e in p.terms)
