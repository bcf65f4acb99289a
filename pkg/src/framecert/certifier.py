"""Decide whether a frame is injective and emit a re-checkable certificate.

A frame is injective exactly when the only real point at which every minor
and every measurement form vanishes is the origin.  Since the system is
homogeneous, it suffices to show

* an eliminant ``f(x, y)`` of the system (a polynomial in two kept variables
  lying in the ideal) has no real zero with ``y = 1``, by a Sturm count, and
* no nonzero solution has ``y = 0``: for every other coordinate ``v`` there
  is an identity ``1 = r*(v - 1) + s*y + sum c_i g_i``.

The linear forms are solved first (:func:`linear_presolve`).  Identities are
stored in the remaining "kept" coordinates, together with the exact
combinations of forms that justify each substitution, so the verifier can
re-derive everything from the frame with plain polynomial arithmetic.
"""
from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact_arith import GaussRational, as_gauss, format_rational, parse_rational
from .frame_model import Frame, HermitianSystem, Presolve, hermitian_system, linear_presolve
from .groebner import (
    DEFAULT_MAX_TERMS,
    CofactorRepresentation,
    GroebnerBasis,
    ResourceLimitExceeded,
    buchberger,
    elimination_ideal,
    ideal_contains_one,
    normal_form,
)
from .multipoly import Polynomial, TermOrder, VariableTable, integer_primitive_part, is_homogeneous, leading_term
from .unipoly import UnivariatePoly, sturm_count_real_roots

log = logging.getLogger(__name__)

SCHEMA = "framecert-certificate/1"

EXIT_INJECTIVE = 0
EXIT_NON_INJECTIVE = 1
EXIT_INDETERMINATE = 2
EXIT_ERROR = 3

__all__ = [
    "CertificationAborted",
    "Indeterminate",
    "InjectivityCertificate",
    "NonInjectivityWitness",
    "ReducedSystem",
    "SliceCertificate",
    "Verification",
    "certify_injective",
    "certify_system",
    "default_pair",
    "find_rational_witness",
    "lift_identity",
    "reduce_system",
    "slice_check",
    "verify_certificate",
]


class CertificationAborted(RuntimeError):
    """A resource ceiling was hit; ``transcript`` holds what was done so far."""

    def __init__(self, message: str, stage: str, transcript: dict):
        super().__init__(message)
        self.stage = stage
        self.transcript = transcript


# ---------------------------------------------------------------------------
# the system after solving the linear forms


@dataclass
class ReducedSystem:
    """Generators of the system in kept coordinates.

    ``sources[i]`` maps indices of ``system.generators()`` to weights with
    ``generators[i] == presolve.apply(sum(w * g))``.
    """

    system: HermitianSystem
    presolve: Presolve
    table: VariableTable
    generators: list
    sources: list

    def binding(self, name: str) -> Polynomial:
        """The variable ``name`` written in kept coordinates."""
        full = self.system.table
        return self.presolve.apply(full.var(name)).change_table(self.table)


def reduce_system(system: HermitianSystem, presolve: Presolve) -> ReducedSystem:
    """Substitute the bindings and replace conjugate minor pairs by real and imaginary parts."""
    full = system.table
    kept = VariableTable(presolve.kept)
    reduced = [presolve.apply(m) for m in system.minors]
    polys, recipe = HermitianSystem(full, reduced, []).real_minors()
    gens, sources = [], []
    for p, rec in zip(polys, recipe):
        if p:
            gens.append(p.change_table(kept))
            sources.append(dict(rec))
    nm = len(system.minors)
    for t, form in enumerate(system.forms):
        r = presolve.apply(form)
        if r:
            gens.append(r.change_table(kept))
            sources.append({nm + t: GaussRational(1)})
    return ReducedSystem(system, presolve, kept, gens, sources)


def check_presolve(system: HermitianSystem, presolve: Presolve) -> str | None:
    """Why ``presolve`` is not justified by the forms, or ``None`` when it is."""
    full = system.table
    names = set(full.names)
    bound = set(presolve.bindings)
    kept = set(presolve.kept)
    if bound & kept or (bound | kept) != names or len(presolve.kept) != len(kept):
        return "bound and kept variables must partition the variable table"
    if presolve.rank != len(bound):
        return "rank does not match the number of eliminated variables"
    zero = full.const(0)
    for v, L in presolve.bindings.items():
        if L.table != full:
            return f"binding for {v} uses another variable table"
        if not L.is_real() or any(sum(e) != 1 for e in L.terms) or not L.variables() <= kept:
            return f"binding for {v} is not a real linear form in kept variables"
        comb = presolve.combination.get(v)
        if comb is None or len(comb) != len(system.forms):
            return f"missing combination for {v}"
        acc = zero
        for c, form in zip(comb, system.forms):
            if c:
                acc = acc + form * c
        if acc != full.var(v) - L:
            return f"{v} - binding is not the recorded combination of forms"
    return None


def default_pair(system: HermitianSystem) -> tuple[str, str]:
    if system.frame is not None:
        d = system.frame.d
        return f"x{d - 1}{d}", f"y{d - 1}{d}"
    names = system.table.names
    if len(names) < 2:
        raise ValueError("an elimination pair needs a system in at least two variables")
    return names[0], names[1]


def _candidate_pairs(system: HermitianSystem, pair: tuple[str, str], fallback: bool) -> list:
    out = [tuple(pair)]
    if fallback and system.frame is not None:
        d = system.frame.d
        for j in range(d, 0, -1):
            for k in range(d, j, -1):
                p = (f"x{j}{k}", f"y{j}{k}")
                if p not in out:
                    out.append(p)
    return out


# ---------------------------------------------------------------------------
# verdict types


@dataclass
class SliceCertificate:
    """``1 == sum(multipliers * (generators + [pin - 1, zero]))`` in kept coordinates."""

    pin: str
    zero: str
    power: int
    multipliers: list

    def representation(self, rs: ReducedSystem) -> CofactorRepresentation:
        gens = rs.generators + [rs.binding(self.pin) - 1, rs.table.var(self.zero)]
        return CofactorRepresentation(rs.table.const(1), list(self.multipliers), gens)

    def to_json(self) -> dict:
        return {
            "pin": self.pin,
            "zero": self.zero,
            "power": self.power,
            "multipliers": [m.to_json() for m in self.multipliers],
        }

    @classmethod
    def from_json(cls, data, table: VariableTable) -> "SliceCertificate":
        return cls(data["pin"], data["zero"], int(data["power"]),
                   [Polynomial.from_json(m, table) for m in data["multipliers"]])


@dataclass
class InjectivityCertificate:
    source: dict
    variables: tuple
    pair: tuple
    presolve: Presolve
    f: Polynomial
    f_multipliers: list
    sturm: dict
    slices: list
    lifted: dict | None = None
    verdict: str = field(default="injective", init=False)

    @property
    def frame_digest(self) -> str:
        return self.source["digest"]

    @property
    def exit_code(self) -> int:
        return EXIT_INJECTIVE

    @property
    def kept_table(self) -> VariableTable:
        return VariableTable(self.presolve.kept)

    def f_representation(self, rs: ReducedSystem) -> CofactorRepresentation:
        return CofactorRepresentation(self.f, list(self.f_multipliers), rs.generators)

    def to_json(self) -> dict:
        pre = self.presolve
        out = {
            "schema": SCHEMA,
            "verdict": self.verdict,
            "source": dict(self.source),
            "variables": list(self.variables),
            "pair": list(self.pair),
            "presolve": {
                "kept": list(pre.kept),
                "rank": pre.rank,
                "bindings": {v: b.to_json() for v, b in pre.bindings.items()},
                "combination": {v: [format_rational(c) for c in pre.combination[v]] for v in pre.bindings},
            },
            "f": self.f.to_json(),
            "f_text": self.f.to_str(),
            "f_multipliers": [m.to_json() for m in self.f_multipliers],
            "sturm": dict(self.sturm),
            "slices": [s.to_json() for s in self.slices],
        }
        if self.lifted is not None:
            out["lifted"] = {
                "f": [m.to_json() for m in self.lifted["f"]],
                "slices": {pin: [m.to_json() for m in ms] for pin, ms in self.lifted["slices"].items()},
            }
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, data) -> "InjectivityCertificate":
        if not isinstance(data, dict) or data.get("schema") != SCHEMA:
            raise ValueError(f"not a certificate with schema {SCHEMA!r}")
        try:
            full = VariableTable(data["variables"])
            p = data["presolve"]
            kept = VariableTable(p["kept"])
            bindings = {v: Polynomial.from_json(b, full) for v, b in p["bindings"].items()}
            combination = {v: [parse_rational(c) for c in cs] for v, cs in p["combination"].items()}
            presolve = Presolve(bindings, list(p["kept"]), combination, int(p["rank"]))
            lifted = None
            if "lifted" in data:
                lifted = {
                    "f": [Polynomial.from_json(m, full) for m in data["lifted"]["f"]],
                    "slices": {pin: [Polynomial.from_json(m, full) for m in ms]
                               for pin, ms in data["lifted"]["slices"].items()},
                }
            return cls(
                dict(data["source"]),
                tuple(data["variables"]),
                tuple(data["pair"]),
                presolve,
                Polynomial.from_json(data["f"], kept),
                [Polynomial.from_json(m, kept) for m in data["f_multipliers"]],
                dict(data["sturm"]),
                [SliceCertificate.from_json(s, kept) for s in data["slices"]],
                lifted,
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed certificate: missing or bad field {exc}") from exc

    @classmethod
    def load(cls, path) -> "InjectivityCertificate":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass
class NonInjectivityWitness:
    """A nonzero real point where all minors and forms vanish.

    ``exact`` witnesses have rational coordinates and vanish identically;
    otherwise the coordinates are high-precision floats and ``residual`` is
    the largest relative residual.
    """

    point: dict
    exact: bool
    residual: float = 0.0
    note: str = ""
    verdict: str = field(default="non-injective", init=False)

    @property
    def exit_code(self) -> int:
        return EXIT_NON_INJECTIVE

    def matrix(self, d: int) -> list:
        """The Hermitian matrix of the point (entries as ``(re, im)`` pairs)."""
        rows = []
        for j in range(1, d + 1):
            row = []
            for k in range(1, d + 1):
                if j == k:
                    row.append((self.point[f"x{j}{j}"], 0))
                else:
                    a, b = min(j, k), max(j, k)
                    x, y = self.point[f"x{a}{b}"], self.point[f"y{a}{b}"]
                    row.append((x, y if j < k else -y))
            rows.append(row)
        return rows

    def to_json(self) -> dict:
        fmt = format_rational if self.exact else str
        return {
            "schema": SCHEMA,
            "verdict": self.verdict,
            "exact": self.exact,
            "point": {k: fmt(v) for k, v in self.point.items()},
            "residual": self.residual,
            "note": self.note,
        }


@dataclass
class Indeterminate:
    reason: str
    details: dict = field(default_factory=dict)
    verdict: str = field(default="indeterminate", init=False)

    @property
    def exit_code(self) -> int:
        return EXIT_INDETERMINATE

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "verdict": self.verdict, "reason": self.reason, "details": self.details}


# ---------------------------------------------------------------------------
# witnesses


def _full_point(system: HermitianSystem, presolve: Presolve, kept_values: dict) -> dict:
    point = {v: Fraction(kept_values.get(v, 0)) for v in presolve.kept}
    for v, L in presolve.bindings.items():
        val = L.evaluate(point | {u: Fraction(0) for u in presolve.bindings})
        point[v] = as_gauss(val).re
    return {n: point[n] for n in system.table.names}


def is_exact_solution(system: HermitianSystem, point: dict) -> bool:
    return all(not g.evaluate(point) for g in system.generators())


def find_rational_witness(system: HermitianSystem, presolve: Presolve) -> NonInjectivityWitness | None:
    """Try the kept coordinate directions; cheap and exact."""
    for v in presolve.kept:
        point = _full_point(system, presolve, {v: 1})
        if is_exact_solution(system, point):
            return NonInjectivityWitness(point, True, 0.0, f"unit point in kept coordinate {v}")
    return None


# ---------------------------------------------------------------------------
# slices


def _zero_basis(rs: ReducedSystem, zero: str, max_terms: int) -> GroebnerBasis:
    return buchberger(rs.generators + [rs.table.var(zero)], TermOrder.grevlex(), True, max_terms)


def _power_bound(basis: GroebnerBasis) -> int | None:
    """Degree beyond which every monomial is a leading monomial, if the ideal is primary to the origin."""
    table = basis.generators[0].table
    leads = [leading_term(g, basis.order)[0] for g in basis.generators]
    if any(sum(e) == 0 for e in leads):
        return 1
    pure = {}
    for e in leads:
        nz = [k for k, x in enumerate(e) if x]
        if len(nz) == 1:
            k = nz[0]
            pure[k] = min(pure.get(k, e[k]), e[k])
    if len(pure) < len(table):
        return None
    # a monomial outside the leading ideal has every exponent below its pure power
    return sum(p - 1 for p in pure.values()) + 1


def _slice_identity(rs: ReducedSystem, basis: GroebnerBasis, pin: str, zero: str,
                    max_terms: int = DEFAULT_MAX_TERMS) -> SliceCertificate | None:
    """Identity for the slice ``pin = 1, zero = 0`` via a power of ``pin`` in the ideal."""
    table = rs.table
    L = rs.binding(pin)
    n = len(rs.generators)
    zero_mults = [table.const(0)] * (n + 2)
    if not L:
        mults = list(zero_mults)
        mults[n] = table.const(-1)
        return SliceCertificate(pin, zero, 1, mults)
    bound = _power_bound(basis)
    limit = bound if bound is not None else 32
    P = L
    N = 1
    while normal_form(P, basis.generators, basis.order)[0]:
        N += 1
        if N > limit:
            break
        P = P * L
    if N <= limit:
        _, rep = normal_form(P, basis.generators, basis.order, track=True)
        mults = [table.const(0)] * (n + 1)
        for q, cof in zip(rep.multipliers, basis.cofactors):
            if q:
                for i, c in enumerate(cof.multipliers):
                    if c:
                        mults[i] = mults[i] + q * c
        # 1 = L^N - (L - 1)(1 + L + ... + L^(N-1))
        geometric = table.const(0)
        term = table.const(1)
        for _ in range(N):
            geometric = geometric + term
            term = term * L
        out = mults[:n] + [-geometric, mults[n]]
        return SliceCertificate(pin, zero, N, out)
    # not primary to the origin along this coordinate: fall back to a direct test
    ok, rep = ideal_contains_one(rs.generators + [L - 1, table.var(zero)], True, max_terms)
    if not ok:
        return None
    return SliceCertificate(pin, zero, 0, list(rep.multipliers))


def _slice_task(args):
    rs, basis, pin, zero, max_terms = args
    return _slice_identity(rs, basis, pin, zero, max_terms)


def slice_check(system: HermitianSystem, pin: str, zero: str, lift: bool = False,
                max_terms: int = DEFAULT_MAX_TERMS):
    """``(True, identity)`` when no solution has ``pin = 1`` and ``zero = 0``.

    The identity is over the reduced generators plus ``[pin - 1, zero]``, or
    with ``lift`` over ``system.generators() + [pin - 1, zero]``.
    """
    if pin == zero:
        raise ValueError("pin and zero variables must differ")
    presolve, _ = linear_presolve(system, protect=(zero,))
    rs = reduce_system(system, presolve)
    basis = _zero_basis(rs, zero, max_terms)
    sc = _slice_identity(rs, basis, pin, zero, max_terms)
    if sc is None:
        return False, None
    rep = sc.representation(rs)
    if lift:
        full = system.table
        rep = lift_identity(rs, rep, [full.var(pin) - 1, full.var(zero)])
    return True, rep


# ---------------------------------------------------------------------------
# lifting identities back to all variables


def _split_variable(p: Polynomial, v: str, L: Polynomial) -> tuple[Polynomial, Polynomial]:
    """``(delta, p(v=L))`` with ``p - p(v=L) == (v - L) * delta``."""
    table = p.table
    k = table.index(v)
    by_power: dict = {}
    for exp, c in p.terms.items():
        rest = exp[:k] + (0,) + exp[k + 1:]
        by_power.setdefault(exp[k], {})[rest] = c
    if set(by_power) <= {0}:
        return table.const(0), p
    V = table.var(v)
    top = max(by_power)
    delta = table.const(0)
    subst = table.const(0)
    h = table.const(0)  # (v^e - L^e) / (v - L)
    Lpow = table.const(1)
    for e in range(top + 1):
        if e:
            h = V * h + Lpow
            Lpow = Lpow * L
        if e in by_power:
            a = Polynomial(table, by_power[e], _trusted=True)
            subst = subst + a * Lpow
            if e:
                delta = delta + a * h
    return delta, subst


def _form_weights(p: Polynomial, presolve: Presolve, n_forms: int) -> list:
    """Polynomials ``w_t`` with ``p - presolve.apply(p) == sum(w_t * form_t)``."""
    zero = p.table.const(0)
    weights = [zero] * n_forms
    cur = p
    for v, L in presolve.bindings.items():
        delta, cur = _split_variable(cur, v, L)
        if delta:
            for t, c in enumerate(presolve.combination[v]):
                if c:
                    weights[t] = weights[t] + delta * c
    return weights


def lift_identity(rs: ReducedSystem, rep: CofactorRepresentation, extras: Sequence[Polynomial] = ()
                  ) -> CofactorRepresentation:
    """Rewrite an identity in kept coordinates as one over all variables.

    ``rep.generators`` must be ``rs.generators`` followed by the images of
    ``extras`` (full-table polynomials) under the presolve.
    """
    system, presolve = rs.system, rs.presolve
    full = system.table
    gens = system.generators()
    n_full = len(gens)
    nm = len(system.minors)
    n_forms = len(system.forms)
    sources = list(rs.sources) + [{n_full + e: GaussRational(1)} for e in range(len(extras))]
    all_gens = gens + list(extras)
    if len(rep.multipliers) != len(sources):
        raise ValueError("identity does not match the reduced generators")
    direct = [full.const(0)] * len(all_gens)
    for c, src in zip(rep.multipliers, sources):
        if not c:
            continue
        c_full = c.change_table(full)
        for k, w in src.items():
            direct[k] = direct[k] + c_full * w
    lifted = list(direct)
    for k, M in enumerate(direct):
        if not M:
            continue
        for t, w in enumerate(_form_weights(all_gens[k], presolve, n_forms)):
            if w:
                lifted[nm + t] = lifted[nm + t] - M * w
    for e, extra in enumerate(extras):
        k = n_full + e
        for v, L in presolve.bindings.items():
            if extra != full.var(v) - 1:
                continue
            M = _in_variable(lifted[k], v, L)
            if M is None:
                continue
            # M - lifted[k] = (v - L) * delta, and v - L is a combination of the forms
            delta, _ = _split_variable(M, v, L)
            for t, c in enumerate(presolve.combination[v]):
                if c:
                    lifted[nm + t] = lifted[nm + t] - delta * all_gens[k] * c
            lifted[k] = M
    return CofactorRepresentation(rep.target.change_table(full), lifted, all_gens)


def _in_variable(p: Polynomial, v: str, L: Polynomial) -> Polynomial | None:
    """``B(v)`` when ``p == B(L)`` for a univariate ``B``, else None.

    Used to write a pin multiplier in the pinned variable instead of its binding.
    """
    if not p or p.is_constant() or not L or L.is_constant():
        return None
    table = p.table
    u = next(n for n in table.names if n in L.variables())
    c = L.terms[tuple(1 if n == u else 0 for n in table.names)]
    others = {n: table.const(0) for n in p.variables() | L.variables() if n != u}
    B = p.substitute({**others, u: table.var(v) * (GaussRational(1) / c)})
    if B.substitute({v: L}) != p:
        return None
    return B


# ---------------------------------------------------------------------------
# the pipeline


def _sturm_data(f: Polynomial, pair: tuple[str, str]) -> dict:
    u = UnivariatePoly.from_polynomial(f, pair[0], {pair[1]: 1})
    if u.is_zero():
        return {"count": None, "degree": -1}
    count, tr = sturm_count_real_roots(u, with_transcript=True)
    return {
        "count": count,
        "degree": u.degree,
        "length": tr["length"],
        "variations_at_minus_infinity": tr["variations_at_minus_infinity"],
        "variations_at_plus_infinity": tr["variations_at_plus_infinity"],
    }


def _normalized_eliminant(g: Polynomial, rep: CofactorRepresentation | None):
    if not g.is_real():
        raise ValueError("the eliminant has non-real coefficients")
    f = integer_primitive_part(g)
    exp = next(iter(f.terms))
    scale = f.terms[exp] / g.terms[exp]
    mults = [m * scale for m in rep.multipliers] if rep is not None else None
    return f, mults


def certify_system(system: HermitianSystem, pair: tuple[str, str] | None = None, *, fallback: bool = True,
                   threads: int = 1, lift: bool = False, max_terms: int = DEFAULT_MAX_TERMS,
                   precision_bits: int = 256):
    """Run the full pipeline; returns a certificate, a witness or :class:`Indeterminate`."""
    pair = tuple(pair or default_pair(system))
    for name in pair:
        system.table.index(name)
    transcript: dict = {"pair_attempts": []}
    t0 = time.perf_counter()
    presolve, _ = linear_presolve(system, protect=pair)
    witness = find_rational_witness(system, presolve)
    if witness is not None:
        return witness

    chosen = None
    for cand in _candidate_pairs(system, pair, fallback):
        if any(n not in system.table for n in cand):
            continue
        presolve, _ = linear_presolve(system, protect=cand)
        rs = reduce_system(system, presolve)
        if not rs.generators:
            transcript["pair_attempts"].append({"pair": list(cand), "generators": 0})
            continue
        t = time.perf_counter()
        try:
            elim = elimination_ideal(rs.generators, cand, track=True, max_terms=max_terms)
        except ResourceLimitExceeded as exc:
            transcript["pair_attempts"].append({"pair": list(cand), "aborted": str(exc), "stats": exc.stats})
            raise CertificationAborted(str(exc), "elimination", transcript) from exc
        attempt = {
            "pair": list(cand),
            "kept": list(presolve.kept),
            "eliminant_count": len(elim.generators),
            "seconds": round(time.perf_counter() - t, 3),
            "stats": elim.basis.stats,
        }
        transcript["pair_attempts"].append(attempt)
        log.info("elimination keeping %s: %d generators in %.1fs", cand, len(elim.generators), attempt["seconds"])
        if elim.is_principal:
            chosen = (cand, presolve, rs, elim)
            break
        attempt["generators"] = [g.to_str() for g in elim.generators]
    if chosen is None:
        return Indeterminate("elimination ideal is not principal for any tried pair", transcript)
    pair, presolve, rs, elim = chosen

    f, f_mults = _normalized_eliminant(elim.generators[0], elim.cofactors[0])
    homogeneous, _ = is_homogeneous(f)
    if not homogeneous:
        return Indeterminate("eliminant is not homogeneous", transcript | {"f": f.to_str()})
    sturm = _sturm_data(f, pair)
    transcript["sturm"] = sturm
    if sturm["count"] is None:
        return Indeterminate("eliminant vanishes identically on the chart", transcript)
    if sturm["count"] > 0:
        from .rank2_recovery import real_witness

        w = real_witness(rs, pair, f, precision_bits)
        if w is not None:
            return w
        return Indeterminate("eliminant has real roots that did not lift to real solutions", transcript)

    zero = pair[1]
    try:
        basis = _zero_basis(rs, zero, max_terms)
    except ResourceLimitExceeded as exc:
        raise CertificationAborted(str(exc), "slices", transcript) from exc
    pins = [v for v in system.table.names if v != zero]
    tasks = [(rs, basis, pin, zero, max_terms) for pin in pins]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_slice_task, tasks))
    else:
        results = [_slice_task(t) for t in tasks]
    failed = [pin for pin, r in zip(pins, results) if r is None]
    if failed:
        return Indeterminate("slice checks did not certify", transcript | {"failed_slices": failed})

    lifted = None
    if lift:
        full = system.table
        lifted_f = lift_identity(rs, CofactorRepresentation(f, f_mults, rs.generators)).multipliers
        lifted_slices = {}
        for sc in results:
            rep = lift_identity(rs, sc.representation(rs), [full.var(sc.pin) - 1, full.var(zero)])
            lifted_slices[sc.pin] = rep.multipliers
        lifted = {"f": lifted_f, "slices": lifted_slices}

    log.info("certified in %.1fs", time.perf_counter() - t0)
    source = {"kind": "frame" if system.frame is not None else "system", "digest": system.digest()}
    return InjectivityCertificate(
        source, tuple(system.table.names), tuple(pair), presolve,
        f.change_table(rs.table), f_mults, sturm, results, lifted,
    )


def certify_injective(frame: Frame, elim_pair: tuple[str, str] | None = None, **kwargs):
    """Certificate, witness or :class:`Indeterminate` for ``frame``."""
    return certify_system(hermitian_system(frame), elim_pair, **kwargs)


# ---------------------------------------------------------------------------
# verification


@dataclass
class Verification:
    ok: bool
    failures: list
    checks: list

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return f"certificate verified ({len(self.checks)} checks)"
        return "certificate rejected: " + "; ".join(self.failures)


def _as_system(source) -> HermitianSystem:
    if isinstance(source, Frame):
        return hermitian_system(source)
    return source


def verify_certificate(source, cert: InjectivityCertificate) -> Verification:
    """Re-check every identity of ``cert`` against the regenerated system.

    Uses polynomial expansion and the Sturm count only; nothing from the
    certificate is trusted except as data to be checked.
    """
    system = _as_system(source)
    failures, checks = [], []

    def check(name, ok, detail=""):
        checks.append(name)
        if not ok:
            failures.append(f"{name}: {detail}" if detail else name)
        return ok

    if not check("source", cert.source.get("digest") == system.digest(), "digest does not match the input"):
        return Verification(False, failures, checks)
    if not check("variables", tuple(cert.variables) == tuple(system.table.names), "variable table differs"):
        return Verification(False, failures, checks)
    why = check_presolve(system, cert.presolve)
    if not check("presolve", why is None, why or ""):
        return Verification(False, failures, checks)
    rs = reduce_system(system, cert.presolve)
    kept = rs.table
    for i, (g, src) in enumerate(zip(rs.generators, rs.sources)):
        acc = system.table.const(0)
        gens = system.generators()
        for k, w in src.items():
            acc = acc + gens[k] * w
        if cert.presolve.apply(acc).change_table(kept) != g:
            check("generators", False, f"reduced generator {i} is not the stated combination")
            return Verification(False, failures, checks)
    checks.append("generators")

    pair = tuple(cert.pair)
    f = cert.f
    check("pair", len(pair) == 2 and all(n in kept for n in pair), "pair variables must be kept")
    if failures:
        return Verification(False, failures, checks)
    homogeneous, _ = is_homogeneous(f)
    check("f", bool(f) and f.is_real() and homogeneous and f.variables() <= set(pair),
          "f must be a nonzero real homogeneous polynomial in the pair")
    rep = CofactorRepresentation(f, list(cert.f_multipliers), rs.generators)
    check("f-identity", len(rep.multipliers) == len(rep.generators) and rep.verify(),
          "cofactors do not re-expand to f")
    sturm = _sturm_data(f, pair)
    check("sturm", sturm["count"] == 0, f"recount gives {sturm['count']} real roots")
    check("sturm-record", cert.sturm.get("count") == sturm["count"], "recorded count differs from recount")

    zero = pair[1]
    seen = {}
    for sc in cert.slices:
        if sc.zero != zero or sc.pin not in system.table or sc.pin == zero:
            check(f"slice:{sc.pin}", False, "wrong pin or zero variable")
            continue
        srep = sc.representation(rs)
        ok = len(srep.multipliers) == len(srep.generators) and srep.verify()
        check(f"slice:{sc.pin}", ok, "identity does not re-expand to 1")
        seen[sc.pin] = ok
    missing = [v for v in system.table.names if v != zero and v not in seen]
    check("slice-coverage", not missing, f"no slice for {', '.join(missing)}")

    if cert.lifted is not None:
        full = system.table
        gens = system.generators()
        lrep = CofactorRepresentation(f.change_table(full), list(cert.lifted["f"]), gens)
        check("lifted:f", len(lrep.multipliers) == len(gens) and lrep.verify(), "lifted identity fails")
        for pin, mults in cert.lifted["slices"].items():
            ext = gens + [full.var(pin) - 1, full.var(zero)]
            lrep = CofactorRepresentation(full.const(1), list(mults), ext)
            check(f"lifted:slice:{pin}", len(mults) == len(ext) and lrep.verify(), "lifted identity fails")
    return Verification(not failures, failures, checks)
