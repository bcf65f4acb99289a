"""Numerical recovery of the rank-deficient matrices annihilated by a frame.

On the chart ``y = 1`` of the elimination pair the system has finitely many
solutions.  A Groebner basis of that zero-dimensional slice gives a finite
basis of the quotient ring; linear algebra on normal forms then yields the
minimal polynomial of ``x`` and, when the quotient is in shape position,
every other coordinate as a polynomial in ``x``.  Each complex root of the
minimal polynomial therefore determines one matrix.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import log2

import mpmath

from .certifier import NonInjectivityWitness, ReducedSystem, reduce_system
from .frame_model import Frame, HermitianSystem, hermitian_system, linear_presolve
from .groebner import buchberger, normal_form
from .multipoly import Polynomial, TermOrder, VariableTable, leading_term
from .unipoly import UnivariatePoly, complex_roots, descartes_isolate

log = logging.getLogger(__name__)

__all__ = [
    "RankTwoMatrix",
    "ShapeError",
    "ShapeRepresentation",
    "real_witness",
    "recover_matrices",
    "shape_lemma_solve",
]


class ShapeError(ValueError):
    pass


@dataclass
class ShapeRepresentation:
    """Coordinates of the slice ``pair[1] = 1`` as functions of ``pair[0]``.

    ``rules[v]`` is a polynomial with ``v = rules[v](x) / denominator(x)`` at
    every solution; here the denominator is always 1.
    """

    reduced: ReducedSystem
    pair: tuple
    minimal_polynomial: UnivariatePoly
    rules: dict
    denominator: UnivariatePoly
    standard_monomials: list

    @property
    def degree(self) -> int:
        return self.minimal_polynomial.degree

    def coefficient_bits(self) -> int:
        """Bits of cancellation to expect when evaluating the rules."""
        bits = 0
        for g in list(self.rules.values()) + [self.minimal_polynomial]:
            for c in g.coeffs:
                if c:
                    bits = max(bits, abs(int(log2(abs(c)))) + 1)
        return bits

    def kept_values(self, x) -> dict:
        """Kept coordinates at a root ``x`` (any number type supporting ``+ *``)."""
        vals = {self.pair[0]: x, self.pair[1]: _number(Fraction(1), x)}
        h = _evaluate(self.denominator, x)
        for v, g in self.rules.items():
            vals[v] = _evaluate(g, x) / h
        return vals

    def point(self, x) -> dict:
        """All coordinates (kept and eliminated) at a root ``x``."""
        vals = self.kept_values(x)
        full = dict(vals)
        for v, L in self.reduced.presolve.bindings.items():
            acc = 0
            for exp, c in L.terms.items():
                name = L.table.names[exp.index(1)]
                acc = acc + _number(c.re, x) * vals[name]
            full[v] = acc if acc != 0 else _number(Fraction(0), x)
        return {n: full[n] for n in self.reduced.system.table.names}

    def check_rules(self) -> bool:
        """Exact test: every reduced generator vanishes modulo the minimal polynomial.

        Arithmetic happens in Q[x]/(m); products of rules are cached per
        monomial so shared factors are reduced once.
        """
        x, y = self.pair
        table = self.reduced.table
        lc = self.minimal_polynomial.coeffs[-1]
        monic = [c / lc for c in self.minimal_polynomial.coeffs]
        D = len(monic) - 1
        images = {v: list(g.coeffs) for v, g in self.rules.items()}
        images[x] = [Fraction(0), Fraction(1)]
        images[y] = [Fraction(1)]
        cache = {(0,) * len(table.names): [Fraction(1)]}

        def image(exp):
            if exp in cache:
                return cache[exp]
            k = next(i for i, e in enumerate(exp) if e)
            rest = exp[:k] + (exp[k] - 1,) + exp[k + 1:]
            out = _mulmod(image(rest), images[table.names[k]], monic, D)
            cache[exp] = out
            return out

        for gen in self.reduced.generators:
            if not gen.is_real():
                return False
            acc = [Fraction(0)] * D
            for exp, c in gen.terms.items():
                for i, v in enumerate(image(exp)):
                    acc[i] += c.re * v
            if any(acc):
                return False
        return True


def _mulmod(a: list, b: list, monic: list, D: int) -> list:
    out = [Fraction(0)] * max(len(a) + len(b) - 1, D)
    for i, u in enumerate(a):
        if u:
            for j, v in enumerate(b):
                out[i + j] += u * v
    for k in range(len(out) - 1, D - 1, -1):
        c = out[k]
        if c:
            for i in range(D):
                out[k - D + i] -= c * monic[i]
    return out[:D]


def _number(q: Fraction, sample):
    if isinstance(sample, (mpmath.mpf, mpmath.mpc)):
        return mpmath.mpf(q.numerator) / q.denominator
    if isinstance(sample, (float, complex)):
        return float(q)
    return q


def _evaluate(u: UnivariatePoly, x):
    acc = _number(Fraction(0), x)
    for c in reversed(u.coeffs):
        acc = acc * x + _number(c, x)
    return acc


def _univariate_to_poly(u: UnivariatePoly, table: VariableTable, name: str) -> Polynomial:
    k = table.index(name)
    n = len(table)
    terms = {}
    for e, c in enumerate(u.coeffs):
        if c:
            exp = [0] * n
            exp[k] = e
            terms[tuple(exp)] = c
    return Polynomial(table, terms)


def _standard_monomials(leads: list, n: int) -> list:
    """Monomials outside the monomial ideal of ``leads``; raises if infinite."""
    bounds = [None] * n
    for e in leads:
        nz = [k for k, x in enumerate(e) if x]
        if len(nz) == 1:
            k = nz[0]
            bounds[k] = e[k] if bounds[k] is None else min(bounds[k], e[k])
    if any(b is None for b in bounds):
        raise ShapeError("the slice is not zero-dimensional")
    return [m for m in product(*(range(b) for b in bounds))
            if not any(all(a >= b for a, b in zip(m, e)) for e in leads)]


def _coords(p: Polynomial, index: dict) -> list:
    vec = [Fraction(0)] * len(index)
    for exp, c in p.terms.items():
        if not c.is_real():
            raise ShapeError("normal form with non-real coefficient")
        vec[index[exp]] = c.re
    return vec


def _solve_in_span(columns: list, target: list):
    """Exact ``c`` with ``sum(c[k] * columns[k]) == target``, or ``None``."""
    m = len(columns)
    rows = [[col[i] for col in columns] + [target[i]] for i in range(len(target))]
    piv_cols = []
    r = 0
    for c in range(m):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(row[-1] for row in rows[r:]):
        return None
    sol = [Fraction(0)] * m
    for i, c in enumerate(piv_cols):
        sol[c] = rows[i][-1]
    return sol


def shape_lemma_solve(system: HermitianSystem | ReducedSystem, pair: tuple[str, str] = ("x34", "y34")
                      ) -> ShapeRepresentation:
    """Shape-position description of the slice ``pair[1] = 1``."""
    if isinstance(system, ReducedSystem):
        rs = system
    else:
        presolve, _ = linear_presolve(system, protect=pair)
        rs = reduce_system(system, presolve)
    x, y = pair
    names = [n for n in rs.table.names if n != y]
    slice_table = VariableTable(names)
    one = rs.table.const(1)
    gens = [g.substitute({y: one}).change_table(slice_table) for g in rs.generators]
    gens = [g for g in gens if g]
    order = TermOrder.grevlex()
    gb = buchberger(gens, order)
    if gb.is_unit():
        raise ShapeError("the slice has no solutions")
    leads = [leading_term(g, order)[0] for g in gb.generators]
    basis = _standard_monomials(leads, len(slice_table))
    index = {m: k for k, m in enumerate(basis)}
    D = len(basis)
    X = slice_table.var(x)
    powers = []
    cur = slice_table.const(1)
    minimal = None
    for k in range(D + 1):
        vec = _coords(cur, index)
        sol = _solve_in_span(powers, vec) if powers else (None if any(vec) else [])
        if sol is not None:
            minimal = UnivariatePoly([-c for c in sol] + [1])
            break
        powers.append(vec)
        cur = normal_form(cur * X, gb.generators, order)[0]
    if minimal is None or minimal.degree < D:
        raise ShapeError(
            f"{x} has a minimal polynomial of degree {minimal.degree if minimal else '?'} on a quotient of "
            f"dimension {D}; the slice is not in shape position, try a different elimination pair"
        )
    rules = {}
    for v in names:
        if v == x:
            continue
        nf = normal_form(slice_table.var(v), gb.generators, order)[0]
        sol = _solve_in_span(powers, _coords(nf, index))
        if sol is None:
            raise ShapeError(f"{v} is not a polynomial in {x} on the slice")
        rules[v] = UnivariatePoly(sol)
    return ShapeRepresentation(rs, tuple(pair), minimal, rules, UnivariatePoly([1]), basis)


# ---------------------------------------------------------------------------
# matrices


@dataclass
class RankTwoMatrix:
    entries: list
    root: mpmath.mpc
    singular_values: list
    rank: int
    hermitian_deviation: mpmath.mpf
    relative_deviation: mpmath.mpf
    residual: mpmath.mpf

    def entry(self, j: int, k: int) -> complex:
        """1-based entry as a Python complex."""
        return complex(self.entries[j - 1][k - 1])

    def to_json(self, digits: int = 20) -> dict:
        return {
            "root": [mpmath.nstr(self.root.real, digits), mpmath.nstr(self.root.imag, digits)],
            "entries": [[[mpmath.nstr(z.real, digits), mpmath.nstr(z.imag, digits)] for z in row]
                        for row in self.entries],
            "singular_values": [mpmath.nstr(s, 8) for s in self.singular_values],
            "rank": self.rank,
            "hermitian_deviation": mpmath.nstr(self.hermitian_deviation, 8),
            "relative_hermitian_deviation": mpmath.nstr(self.relative_deviation, 8),
            "residual": mpmath.nstr(self.residual, 8),
        }


def matrix_from_point(point: dict, d: int) -> list:
    """The matrix with entries ``x_jk + i*y_jk`` above and ``x_jk - i*y_jk`` below the diagonal."""
    j_unit = mpmath.mpc(0, 1)
    M = [[mpmath.mpc(0)] * d for _ in range(d)]
    for j in range(1, d + 1):
        M[j - 1][j - 1] = mpmath.mpc(point[f"x{j}{j}"])
        for k in range(j + 1, d + 1):
            x, y = point[f"x{j}{k}"], point[f"y{j}{k}"]
            M[j - 1][k - 1] = x + j_unit * y
            M[k - 1][j - 1] = x - j_unit * y
    return M


def _relative_residual(system: HermitianSystem, point: dict) -> mpmath.mpf:
    scale = max(abs(v) for v in point.values()) or mpmath.mpf(1)
    worst = mpmath.mpf(0)
    for g in system.generators():
        deg = g.total_degree()
        val = abs(g.evaluate(point)) / scale ** max(deg, 1)
        worst = max(worst, val)
    return worst


def _analyse(args):
    shape, croot, d, prec, wp = args
    with mpmath.workprec(wp):
        root = croot.value
        point = shape.point(root)
        M = matrix_from_point(point, d)
        sv = mpmath.svd_c(mpmath.matrix(M), compute_uv=False)
        svals = sorted((mpmath.mpf(s) for s in sv), reverse=True)
        tol = mpmath.ldexp(1, -prec // 2) * svals[0]
        rank = sum(1 for s in svals if s > tol)
        big = max(abs(z) for row in M for z in row)
        dev = max(abs(M[j][k] - mpmath.conj(M[k][j])) for j in range(d) for k in range(d))
        residual = _relative_residual(shape.reduced.system, point)
        return RankTwoMatrix(M, root, svals, rank, dev, dev / big, residual)


def recover_matrices(frame: Frame | HermitianSystem, cert=None, precision_bits: int = 256,
                     pair: tuple[str, str] | None = None, threads: int = 1) -> list[RankTwoMatrix]:
    """One matrix per root of the minimal polynomial on the chart ``pair[1] = 1``."""
    system = hermitian_system(frame) if isinstance(frame, Frame) else frame
    if cert is not None and cert.source.get("digest") != system.digest():
        raise ShapeError("the certificate was issued for a different system")
    if pair is None:
        pair = tuple(cert.pair) if cert is not None else ("x34", "y34")
    shape = shape_lemma_solve(system, pair)
    poly = shape.minimal_polynomial
    if cert is not None:
        f1 = UnivariatePoly.from_polynomial(cert.f, pair[0], {pair[1]: 1})
        if f1.degree != poly.degree or f1.monic() != poly:
            raise ShapeError("the certificate's eliminant does not match the slice's minimal polynomial")
    d = system.frame.d if system.frame is not None else _guess_dimension(system)
    # the rules have large coefficients: carry enough guard bits through the evaluation
    wp = precision_bits + shape.coefficient_bits() + 64
    roots = complex_roots(poly, wp)
    tasks = [(shape, r, d, precision_bits, wp) for r in roots]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_analyse, tasks))
    return [_analyse(t) for t in tasks]


def _guess_dimension(system: HermitianSystem) -> int:
    d = 1
    while f"x{d + 1}{d + 1}" in system.table:
        d += 1
    return d


def real_witness(rs: ReducedSystem, pair: tuple[str, str], f: Polynomial, precision_bits: int = 256
                 ) -> NonInjectivityWitness | None:
    """Lift a real root of ``f(x, 1)`` to a real solution, if the slice is in shape position."""
    try:
        shape = shape_lemma_solve(rs, pair)
    except ShapeError as exc:
        log.info("no real witness: %s", exc)
        return None
    poly = shape.minimal_polynomial
    intervals = descartes_isolate(poly)
    if not intervals:
        return None
    a, b = intervals[0]
    if a == b:
        lo = hi = a
    else:
        lo, hi = a, b
        positive_at_lo = poly(lo) > 0
        for _ in range(precision_bits + 8):
            mid = (lo + hi) / 2
            val = poly(mid)
            if val == 0:
                lo = hi = mid
                break
            if (val > 0) == positive_at_lo:
                lo = mid
            else:
                hi = mid
    if lo == hi:
        point = shape.point(lo)
        if all(not g.evaluate(point) for g in rs.system.generators()):
            return NonInjectivityWitness(point, True, 0.0, f"rational root {lo} of the eliminant")
    with mpmath.workprec(precision_bits + 32):
        root = mpmath.mpf(lo.numerator) / lo.denominator
        point = shape.point(root)
        residual = _relative_residual(rs.system, point)
    if residual > mpmath.ldexp(1, -precision_bits // 2):
        return None
    return NonInjectivityWitness(point, False, float(residual), "lifted from a real root of the eliminant")
