"""Buchberger's algorithm with optional cofactor tracking.

Polynomials are converted to an internal form for the computation: monomials
become packed integers (weight fields of the term order followed by the raw
exponents, 16 bits per field) so that integer comparison is the term order
and monomial multiplication is integer addition.  Coefficients are
fraction-free integers, or Gaussian integers when some input coefficient is
not real.

Pair handling follows the normal selection strategy by sugar degree with the
Gebauer--Moeller installation of Buchberger's criteria.
"""
from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

from . import kernels
from .exact_arith import GaussRational
from .multipoly import Polynomial, PolynomialError, TermOrder, VariableTable

log = logging.getLogger(__name__)

__all__ = [
    "CofactorRepresentation",
    "Elimination",
    "GroebnerBasis",
    "ResourceLimitExceeded",
    "buchberger",
    "elimination_ideal",
    "ideal_contains_one",
    "is_groebner_basis",
    "normal_form",
]

FIELD_BITS = 16
DEFAULT_MAX_TERMS = 10**7


class ResourceLimitExceeded(RuntimeError):
    """Raised when a computation passes its term ceiling; carries partial stats."""

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats or {}


# ---------------------------------------------------------------------------
# coefficient domains


class GaussInt:
    """Gaussian integer used as a fraction-free coefficient."""

    __slots__ = ("re", "im")

    def __init__(self, re: int, im: int = 0):
        self.re = re
        self.im = im

    def __add__(self, o):
        return GaussInt(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        return GaussInt(self.re - o.re, self.im - o.im)

    def __neg__(self):
        return GaussInt(-self.re, -self.im)

    def __mul__(self, o):
        if type(o) is int:
            return GaussInt(self.re * o, self.im * o)
        a, b, c, d = self.re, self.im, o.re, o.im
        return GaussInt(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __floordiv__(self, o):
        # exact division only
        if type(o) is int:
            q = GaussInt(self.re // o, self.im // o)
        else:
            n = o.re * o.re + o.im * o.im
            q = GaussInt((self.re * o.re + self.im * o.im) // n, (self.im * o.re - self.re * o.im) // n)
        return q

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, o):
        if type(o) is int:
            return self.re == o and not self.im
        return self.re == o.re and self.im == o.im

    def __ne__(self, o):
        return not self == o

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussInt({self.re}, {self.im})"


class _IntDomain:
    name = "QQ"
    one = 1
    field_one = Fraction(1)

    @staticmethod
    def gcd(a, b):
        return math.gcd(a, b)

    @staticmethod
    def from_poly(p: Polynomial):
        """Integer coefficients ``c`` and rational ``s`` with ``p = s * c``."""
        dens = [c.re.denominator for c in p.terms.values()]
        lcm = reduce(lambda a, b: a * b // math.gcd(a, b), dens, 1)
        ints = {e: (c.re * lcm).numerator for e, c in p.terms.items()}
        return ints, Fraction(1, lcm)

    @staticmethod
    def content(values):
        return reduce(math.gcd, values, 0) or 1

    @staticmethod
    def unit_normal(lc):
        return -1 if lc < 0 else 1

    @staticmethod
    def to_field(c):
        return Fraction(c)

    @staticmethod
    def field_to_gauss(c):
        return GaussRational(c)


class _GaussDomain:
    name = "QQ(i)"
    one = GaussInt(1, 0)
    field_one = GaussRational(1)

    @staticmethod
    def gcd(a, b):
        return _GaussDomain.one

    @staticmethod
    def from_poly(p: Polynomial):
        dens = []
        for c in p.terms.values():
            dens += [c.re.denominator, c.im.denominator]
        lcm = reduce(lambda a, b: a * b // math.gcd(a, b), dens, 1)
        out = {e: GaussInt((c.re * lcm).numerator, (c.im * lcm).numerator) for e, c in p.terms.items()}
        return out, Fraction(1, lcm)

    @staticmethod
    def content(values):
        g = 0
        for v in values:
            g = math.gcd(g, math.gcd(v.re, v.im))
        return g or 1

    @staticmethod
    def unit_normal(lc):
        if lc.re < 0 or (lc.re == 0 and lc.im < 0):
            return -1
        return 1

    @staticmethod
    def to_field(c):
        if type(c) is int:
            return GaussRational(c)
        return GaussRational(c.re, c.im)

    @staticmethod
    def field_to_gauss(c):
        return c


def _pick_domain(polys: Iterable[Polynomial]):
    return _IntDomain if all(p.is_real() for p in polys) else _GaussDomain


# ---------------------------------------------------------------------------
# packed monomials


class _Ring:
    """Packing of exponent vectors for one variable table and term order."""

    def __init__(self, table: VariableTable, order: TermOrder, domain):
        self.table = table
        self.order = order
        self.domain = domain
        rows = order.weight_matrix(table)
        n, r = len(table), len(rows)
        self.n = n
        B = FIELD_BITS
        self.fmask = (1 << B) - 1
        self.eshifts = [B * (n - 1 - i) for i in range(n)]
        self.var_packed = []
        for i in range(n):
            v = 1 << self.eshifts[i]
            for k, row in enumerate(rows):
                if row[i]:
                    v += row[i] << (B * (r + n - 1 - k))
            self.var_packed.append(v)
        self.emask = (1 << (B * n)) - 1
        self.guard = sum(1 << (B * k + B - 1) for k in range(n))
        self.allguard = sum(1 << (B * k + B - 1) for k in range(n + r))
        self.one = domain.one

    def pack(self, exp) -> int:
        P = 0
        for e, v in zip(exp, self.var_packed):
            if e:
                P += e * v
        if P & self.allguard:
            raise OverflowError("exponent too large to pack")
        return P

    def unpack(self, P: int) -> tuple:
        return tuple((P >> s) & self.fmask for s in self.eshifts)

    def degree(self, P: int) -> int:
        return sum(self.unpack(P))

    def lcm(self, a: int, b: int) -> int:
        return self.pack(tuple(max(x, y) for x, y in zip(self.unpack(a), self.unpack(b))))

    def divides(self, a: int, b: int) -> bool:
        g = self.guard
        return (((b & self.emask) | g) - (a & self.emask)) & g == g

    def to_terms(self, p: Polynomial):
        ints, scale = self.domain.from_poly(p)
        return {self.pack(e): c for e, c in ints.items()}, scale

    def to_poly(self, terms: dict, scale) -> Polynomial:
        """``scale * terms`` as a Polynomial; ``scale`` is a field element."""
        to_field = self.domain.to_field
        gauss = self.domain.field_to_gauss
        out = {}
        for m, c in terms.items():
            out[self.unpack(m)] = gauss(to_field(c) * scale)
        return Polynomial(self.table, out, _trusted=True)


class _Elem:
    __slots__ = ("terms", "lm", "lm_exp", "lc", "tail", "sugar", "cof")

    def __init__(self, ring: _Ring, terms: dict, sugar: int, cof=None):
        self.terms = terms
        ordered = sorted(terms, reverse=True)
        self.lm = ordered[0]
        self.lm_exp = self.lm & ring.emask
        self.lc = terms[self.lm]
        self.tail = [(m, terms[m]) for m in ordered[1:]]
        self.sugar = sugar
        self.cof = cof  # dict input index -> field-coefficient term dict

    def reducer(self):
        return (self.lm, self.lm_exp, self.lc, self.tail)


def _normalize(ring: _Ring, terms: dict):
    """Divide by content with a unit-normal leading coefficient; returns the divisor."""
    dom = ring.domain
    c = dom.content(terms.values())
    lc = terms[max(terms)]
    c = c * dom.unit_normal(lc)
    if c != 1:
        terms = {m: v // c for m, v in terms.items()}
    return terms, c


# ---------------------------------------------------------------------------
# public result types


@dataclass
class CofactorRepresentation:
    """``target == sum(multipliers[i] * generators[i])`` exactly."""

    target: Polynomial
    multipliers: list
    generators: list = field(repr=False)

    def expand(self) -> Polynomial:
        acc = self.target.table.const(0)
        for m, g in zip(self.multipliers, self.generators):
            if m:
                acc = acc + m * g
        return acc

    def verify(self) -> bool:
        if len(self.multipliers) != len(self.generators):
            return False
        return self.expand() == self.target

    def to_json(self) -> dict:
        return {
            "target": self.target.to_json(),
            "multipliers": [m.to_json() for m in self.multipliers],
        }

    @classmethod
    def from_json(cls, data, generators, table) -> "CofactorRepresentation":
        return cls(
            Polynomial.from_json(data["target"], table),
            [Polynomial.from_json(m, table) for m in data["multipliers"]],
            list(generators),
        )


@dataclass
class GroebnerBasis:
    generators: list
    order: TermOrder
    reduced: bool = True
    cofactors: list | None = None
    inputs: list = field(default_factory=list, repr=False)
    stats: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def is_unit(self) -> bool:
        return len(self.generators) == 1 and self.generators[0].is_constant() and bool(self.generators[0])

    def reduce(self, p: Polynomial) -> Polynomial:
        return normal_form(p, self.generators, self.order)[0]

    def to_json(self) -> dict:
        out = {
            "variables": list(self.generators[0].table.names) if self.generators else [],
            "order": str(self.order),
            "generators": [g.to_json(self.order) for g in self.generators],
        }
        if self.cofactors is not None:
            out["cofactors"] = [c.to_json() for c in self.cofactors]
        return out


@dataclass
class Elimination:
    generators: list
    kept: tuple
    basis: GroebnerBasis
    cofactors: list | None = None

    @property
    def is_principal(self) -> bool:
        return len(self.generators) == 1


# ---------------------------------------------------------------------------
# core routines


def _check_inputs(polys: Sequence[Polynomial]) -> VariableTable:
    if not polys:
        raise PolynomialError("need at least one polynomial")
    table = polys[0].table
    for p in polys:
        if p.table != table:
            raise PolynomialError("polynomials live over different variable tables")
    return table


def _group_quotients(quot):
    grouped: dict = {}
    for j, shift, e in quot:
        d = grouped.setdefault(j, {})
        v = d.get(shift)
        v = e if v is None else v + e
        if v:
            d[shift] = v
        else:
            d.pop(shift, None)
    return grouped


def _combine_cofactors(ring, base_cof, base_scale, grouped, elems, divisor):
    """``(base_scale * base_cof - sum_j q_j * cof_j) / divisor`` in the field."""
    dom = ring.domain
    to_field = dom.to_field
    out: dict = {}
    bs = to_field(base_scale)
    for i, terms in base_cof.items():
        out[i] = {m: c * bs for m, c in terms.items()}
    for j, q in grouped.items():
        cj = elems[j].cof
        for shift, e in q.items():
            fe = -to_field(e)
            for i, terms in cj.items():
                acc = out.setdefault(i, {})
                kernels.add_scaled_shifted(acc, fe, shift, terms, ring.allguard)
    inv = dom.field_one / to_field(divisor)
    return {i: {m: c * inv for m, c in t.items()} for i, t in out.items() if t}


def _spoly(ring, f: _Elem, g: _Elem, L: int, track: bool):
    dom = ring.domain
    gc = dom.gcd(f.lc, g.lc)
    a = g.lc // gc if gc != ring.one else g.lc
    b = f.lc // gc if gc != ring.one else f.lc
    u, v = L - f.lm, L - g.lm
    terms: dict = {}
    kernels.add_scaled_shifted(terms, a, u, dict(f.tail), ring.allguard)
    kernels.add_scaled_shifted(terms, -b, v, dict(g.tail), ring.allguard)
    cof = None
    if track:
        cof = {}
        fa, fb = dom.to_field(a), -dom.to_field(b)
        for src, coeff, sh in ((f.cof, fa, u), (g.cof, fb, v)):
            for i, t in src.items():
                kernels.add_scaled_shifted(cof.setdefault(i, {}), coeff, sh, t, ring.allguard)
        cof = {i: t for i, t in cof.items() if t}
    return terms, cof


def _gm_update(ring, elems, G, pairs, h):
    """Gebauer--Moeller update; returns new (G, pairs)."""
    eh = elems[h]
    lh = eh.lm
    C = [(g, ring.lcm(lh, elems[g].lm)) for g in G]
    D = []
    for idx, (g, L) in enumerate(C):
        coprime = L == lh + elems[g].lm
        if coprime:
            D.append((g, L))
            continue
        if any(ring.divides(L2, L) for _, L2 in C[idx + 1:]):
            continue
        if any(ring.divides(L2, L) for _, L2 in D):
            continue
        D.append((g, L))
    new_pairs = []
    for p in pairs:
        _, L, i, j = p
        if ring.divides(lh, L) and ring.lcm(elems[i].lm, lh) != L and ring.lcm(elems[j].lm, lh) != L:
            continue
        new_pairs.append(p)
    for g, L in D:
        if L == lh + elems[g].lm:
            continue
        eg = elems[g]
        sugar = max(eg.sugar + ring.degree(L - eg.lm), eh.sugar + ring.degree(L - lh))
        i, j = (g, h) if g < h else (h, g)
        new_pairs.append((sugar, L, i, j))
    heapq.heapify(new_pairs)
    newG = [g for g in G if not ring.divides(lh, elems[g].lm)] + [h]
    return newG, new_pairs


def _run_buchberger(ring, inputs: list[dict], track: bool, max_terms: int):
    elems: list[_Elem] = []
    G: list[int] = []
    pairs: list = []
    stats = {"pairs_reduced": 0, "zero_reductions": 0, "max_degree": 0}
    # insert inputs in order of increasing leading monomial
    order = sorted(range(len(inputs)), key=lambda k: (max(inputs[k]), k))
    for k in order:
        terms = inputs[k]
        cof = {k: {0: ring.domain.field_one}} if track else None
        sugar = max(ring.degree(m) for m in terms)
        e = _Elem(ring, terms, sugar, cof)
        elems.append(e)
        G, pairs = _gm_update(ring, elems, G, pairs, len(elems) - 1)
        if e.lm == 0:
            return elems, [len(elems) - 1], stats
    total_terms = sum(len(e.terms) for e in elems)
    while pairs:
        sugar, L, i, j = heapq.heappop(pairs)
        S, cof = _spoly(ring, elems[i], elems[j], L, track)
        stats["pairs_reduced"] += 1
        if not S:
            stats["zero_reductions"] += 1
            continue
        reducers = [elems[g].reducer() for g in G]
        rem, scale, quot = kernels.reduce_poly(
            S, reducers, True, track, ring.domain.gcd, ring.emask, ring.guard, ring.allguard, ring.one
        )
        if not rem:
            stats["zero_reductions"] += 1
            continue
        rem, divisor = _normalize(ring, rem)
        hcof = None
        if track:
            hcof = _combine_cofactors(ring, cof, scale, _group_quotients_map(quot, G), elems, divisor)
        e = _Elem(ring, rem, sugar, hcof)
        elems.append(e)
        total_terms += len(rem)
        stats["max_degree"] = max(stats["max_degree"], ring.degree(e.lm))
        if total_terms > max_terms:
            stats["basis_size"] = len(G)
            raise ResourceLimitExceeded(f"term ceiling {max_terms} exceeded", stats)
        log.debug("new basis element: sugar %d, lm degree %d, %d terms, %d pairs left",
                  sugar, ring.degree(e.lm), len(rem), len(pairs))
        G, pairs = _gm_update(ring, elems, G, pairs, len(elems) - 1)
        if e.lm == 0:
            return elems, [len(elems) - 1], stats
    return elems, G, stats


def _group_quotients_map(quot, G):
    return {G[j]: q for j, q in _group_quotients(quot).items()}


def _minimalize(ring, elems, G):
    """Drop elements whose leading monomial is divisible by another's."""
    keep = []
    guard = ring.guard
    for g in sorted(G, key=lambda g: (elems[g].lm, g)):
        m = (elems[g].lm & ring.emask) | guard
        if not any((m - (elems[h].lm & ring.emask)) & guard == guard for h in keep):
            keep.append(g)
    return keep


def _interreduce(ring, elems, G, track):
    """Tail-reduce a minimal basis; returns new element list sorted by leading monomial."""
    G = _minimalize(ring, elems, G)
    out = []
    for g in G:
        others = [h for h in G if h != g]
        e = elems[g]
        if not others or not e.tail:
            out.append(e)
            continue
        reducers = [elems[h].reducer() for h in others]
        tail = dict(e.tail)
        rem, scale, quot = kernels.reduce_poly(
            tail, reducers, True, track, ring.domain.gcd, ring.emask, ring.guard, ring.allguard, ring.one
        )
        rem[e.lm] = e.lc * scale
        rem, divisor = _normalize(ring, rem)
        cof = None
        if track:
            grouped = {others[j]: q for j, q in _group_quotients(quot).items()}
            cof = _combine_cofactors(ring, e.cof, scale, grouped, elems, divisor)
        out.append(_Elem(ring, rem, e.sugar, cof))
    return out


def _prepare(polys: Sequence[Polynomial], order: TermOrder, domain=None):
    table = _check_inputs(polys)
    ring = _Ring(table, order, domain or _pick_domain(polys))
    inputs, scales = [], []
    for p in polys:
        if p.is_zero():
            inputs.append({})
            scales.append(Fraction(1))
            continue
        terms, s = ring.to_terms(p)
        terms, c = _normalize(ring, terms)
        inputs.append(terms)
        scales.append(ring.domain.to_field(c) * s)
    return ring, inputs, scales


def _cof_to_polys(ring, cof: dict, scale_field, input_scales, n_inputs, table):
    """Convert internal cofactors (relative to normalized inputs) to Polynomials."""
    gauss = ring.domain.field_to_gauss
    mults = []
    for i in range(n_inputs):
        t = cof.get(i)
        if not t:
            mults.append(table.const(0))
            continue
        factor = scale_field / input_scales[i]
        mults.append(Polynomial(table, {ring.unpack(m): gauss(c * factor) for m, c in t.items()}, _trusted=True))
    return mults


def buchberger(gens: Sequence[Polynomial], order: TermOrder | None = None, track: bool = False,
               max_terms: int = DEFAULT_MAX_TERMS) -> GroebnerBasis:
    """Reduced Groebner basis of ``gens``; with ``track`` each element carries its cofactors."""
    order = order or TermOrder.grevlex()
    gens = list(gens)
    ring, inputs, scales = _prepare(gens, order)
    table = ring.table
    live = [k for k, t in enumerate(inputs) if t]
    if not live:
        return GroebnerBasis([], order, True, [] if track else None, gens, {})
    elems, G, stats = _run_buchberger(ring, [inputs[k] for k in live], track, max_terms)
    if track:
        # cofactor indices refer to live inputs; remap to positions in gens
        for e in elems:
            if e.cof is not None:
                e.cof = {live[i]: t for i, t in e.cof.items()}
    final = _interreduce(ring, elems, G, track)
    gens_out, cofs = [], [] if track else None
    to_field = ring.domain.to_field
    for e in final:
        inv = ring.domain.field_one / to_field(e.lc)
        poly = ring.to_poly(e.terms, inv)
        gens_out.append(poly)
        if track:
            mults = _cof_to_polys(ring, e.cof, inv, scales, len(gens), table)
            cofs.append(CofactorRepresentation(poly, mults, gens))
    stats["basis_size"] = len(gens_out)
    stats["domain"] = ring.domain.name
    return GroebnerBasis(gens_out, order, True, cofs, gens, stats)


def normal_form(p: Polynomial, basis: Sequence[Polynomial], order: TermOrder | None = None,
                track: bool = False):
    """Full multivariate division of ``p`` by ``basis``.

    Returns ``(remainder, rep)`` where ``rep`` (when ``track``) is a
    :class:`CofactorRepresentation` of ``p - remainder`` in ``basis``.
    """
    order = order or TermOrder.grevlex()
    basis = list(basis)
    if not basis:
        raise PolynomialError("normal_form needs a nonempty basis")
    ring, inputs, scales = _prepare(basis + [p], order)
    table = ring.table
    pterms, pscale = inputs[-1], scales[-1]
    live = [k for k in range(len(basis)) if inputs[k]]
    if not pterms:
        rep = CofactorRepresentation(p - p, [table.const(0) for _ in basis], basis) if track else None
        return p, rep
    elems = [_Elem(ring, inputs[k], 0) for k in live]
    rem, scale, quot = kernels.reduce_poly(
        dict(pterms), [e.reducer() for e in elems], True, track,
        ring.domain.gcd, ring.emask, ring.guard, ring.allguard, ring.one,
    )
    to_field = ring.domain.to_field
    factor = pscale / to_field(scale)
    remainder = ring.to_poly(rem, factor)
    rep = None
    if track:
        gauss = ring.domain.field_to_gauss
        mults = [table.const(0) for _ in basis]
        for j, q in _group_quotients(quot).items():
            k = live[j]
            f = factor / scales[k]
            mults[k] = Polynomial(table, {ring.unpack(m): gauss(to_field(c) * f) for m, c in q.items()}, _trusted=True)
        rep = CofactorRepresentation(p - remainder, mults, basis)
    return remainder, rep


def elimination_ideal(gens: Sequence[Polynomial], keep: Iterable[str], track: bool = False,
                      inner: str = "grevlex", outer: str = "grevlex",
                      max_terms: int = DEFAULT_MAX_TERMS) -> Elimination:
    """Generators of the ideal intersected with the subring in ``keep``."""
    gens = list(gens)
    table = _check_inputs(gens)
    keep = tuple(keep)
    for name in keep:
        table.index(name)
    elim = [n for n in table.names if n not in keep]
    order = TermOrder.block(elim, inner, outer) if elim else TermOrder(outer)
    gb = buchberger(gens, order, track, max_terms)
    picked = [k for k, g in enumerate(gb.generators) if not (g.variables() & set(elim))]
    out = [gb.generators[k] for k in picked]
    cofs = [gb.cofactors[k] for k in picked] if track else None
    return Elimination(out, keep, gb, cofs)


def ideal_contains_one(gens: Sequence[Polynomial], track: bool = True,
                       max_terms: int = DEFAULT_MAX_TERMS):
    """``(True, certificate)`` when 1 lies in the ideal, else ``(False, None)``."""
    gens = list(gens)
    gb = buchberger(gens, TermOrder.grevlex(), track, max_terms)
    if not gb.is_unit():
        return False, None
    rep = gb.cofactors[0] if track else None
    return True, rep


def is_groebner_basis(basis: Sequence[Polynomial], order: TermOrder) -> bool:
    """Re-check Buchberger's criterion directly: every S-polynomial reduces to zero.

    S-polynomials are formed with plain polynomial arithmetic; only the
    division step is shared with the engine.
    """
    from .multipoly import leading_term

    basis = [b for b in basis if b]
    if not basis:
        return True
    leads = [leading_term(b, order) for b in basis]
    for a in range(len(basis)):
        for b in range(a + 1, len(basis)):
            (ea, ca), (eb, cb) = leads[a], leads[b]
            L = tuple(max(x, y) for x, y in zip(ea, eb))
            ua = tuple(x - y for x, y in zip(L, ea))
            ub = tuple(x - y for x, y in zip(L, eb))
            S = basis[a].mul_term(ua, 1 / ca) - basis[b].mul_term(ub, 1 / cb)
            if S and normal_form(S, basis, order)[0]:
                return False
    return True
