"""Univariate polynomials over Q: exact real-root counting and complex roots.

Real roots are counted with a Sturm sequence obtained from the subresultant
pseudo-remainder sequence over the integers; the subresultants differ from
the Euclidean Sturm chain only by nonzero scalars whose signs are tracked.
Complex roots come from Aberth iteration in mpmath after an exact
square-free decomposition.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

import mpmath

from .multipoly import Polynomial

__all__ = [
    "ComplexRoot",
    "RootFindingError",
    "UnivariatePoly",
    "complex_roots",
    "conjugate_pairing",
    "descartes_isolate",
    "sturm_count_real_roots",
    "sturm_sequence",
]


class RootFindingError(ArithmeticError):
    pass


class UnivariatePoly:
    """Dense polynomial with rational coefficients, low degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        cs = [Fraction(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def from_polynomial(cls, p: Polynomial, var: str, at: dict | None = None) -> "UnivariatePoly":
        """Specialize ``p`` at the rational values in ``at``; ``var`` stays free."""
        at = at or {}
        k = p.table.index(var)
        coeffs: dict[int, Fraction] = {}
        for exp, c in p.terms.items():
            if not c.is_real():
                raise ValueError("univariate specialization needs real coefficients")
            v = c.re
            for name, e in zip(p.table.names, exp):
                if e and name != var:
                    if name not in at:
                        raise ValueError(f"no value given for variable {name!r}")
                    v *= Fraction(at[name]) ** e
            coeffs[exp[k]] = coeffs.get(exp[k], Fraction(0)) + v
        deg = max(coeffs, default=0)
        return cls([coeffs.get(i, 0) for i in range(deg + 1)])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self) -> Fraction:
        return self.coeffs[-1]

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        return isinstance(other, UnivariatePoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"UnivariatePoly({[str(c) for c in self.coeffs]})"

    def derivative(self) -> "UnivariatePoly":
        return UnivariatePoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def __mul__(self, other: "UnivariatePoly") -> "UnivariatePoly":
        if not self.coeffs or not other.coeffs:
            return UnivariatePoly([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UnivariatePoly(out)

    def divmod(self, other: "UnivariatePoly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(0, len(rem) - len(other.coeffs) + 1)
        lc = other.lc()
        dq = other.degree
        while len(rem) - 1 >= dq and rem:
            shift = len(rem) - 1 - dq
            f = rem[-1] / lc
            q[shift] = f
            for i, c in enumerate(other.coeffs):
                rem[i + shift] -= f * c
            rem.pop()
            while rem and not rem[-1]:
                rem.pop()
        return UnivariatePoly(q), UnivariatePoly(rem)

    def monic(self) -> "UnivariatePoly":
        lc = self.lc()
        return UnivariatePoly([c / lc for c in self.coeffs])

    def integer_coeffs(self) -> list[int]:
        """Primitive integer multiple with positive scaling (signs preserved)."""
        if not self.coeffs:
            return []
        lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in self.coeffs), 1)
        ints = [int(c * lcm) for c in self.coeffs]
        g = reduce(math.gcd, ints, 0)
        return [v // g for v in ints]

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data) -> "UnivariatePoly":
        return cls([Fraction(str(c)) for c in data])


def _gcd(a: UnivariatePoly, b: UnivariatePoly) -> UnivariatePoly:
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic() if not a.is_zero() else a


def squarefree_decomposition(p: UnivariatePoly) -> list[tuple[UnivariatePoly, int]]:
    """Yun's algorithm: ``p = lc * prod(f_k ** k)`` with squarefree, coprime monic ``f_k``."""
    if p.degree < 1:
        return []
    out = []
    dp = p.derivative()
    a = _gcd(p, dp)
    b = p.divmod(a)[0]
    c = dp.divmod(a)[0]
    d = UnivariatePoly([x - y for x, y in _zip_pad(c.coeffs, b.derivative().coeffs)])
    k = 1
    while b.degree >= 1:
        a = _gcd(b, d)
        if a.degree >= 1:
            out.append((a.monic(), k))
        b = b.divmod(a)[0]
        c = d.divmod(a)[0]
        d = UnivariatePoly([x - y for x, y in _zip_pad(c.coeffs, b.derivative().coeffs)])
        k += 1
    return out


def _zip_pad(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return zip(a, b)


# ---------------------------------------------------------------------------
# Sturm sequences


def _prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder of integer coefficient lists (low degree first)."""
    rem = list(a)
    db = len(b) - 1
    lcb = b[-1]
    delta = len(a) - len(b)
    e = delta + 1
    while len(rem) - 1 >= db and rem:
        shift = len(rem) - 1 - db
        lr = rem[-1]
        rem = [c * lcb for c in rem]
        for i, c in enumerate(b):
            rem[i + shift] -= lr * c
        rem.pop()
        e -= 1
        while rem and not rem[-1]:
            rem.pop()
    if e > 0:
        f = lcb**e
        rem = [c * f for c in rem]
    return rem


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def sturm_sequence(p: UnivariatePoly) -> tuple[list[list[int]], list[int]]:
    """Subresultant PRS of ``p, p'`` plus the sign relating each member to the Sturm chain.

    Element ``k`` of the Euclidean Sturm chain ``T0 = p``, ``T1 = p'``,
    ``T_{k+1} = -rem(T_{k-1}, T_k)`` equals ``signs[k] * S_k`` up to a
    positive factor.
    """
    if p.is_zero():
        raise ValueError("Sturm sequence of the zero polynomial")
    A = p.integer_coeffs()
    B = p.derivative().integer_coeffs()
    seq = [A]
    signs = [1]
    if not B:
        return seq, signs
    seq.append(B)
    signs.append(1)
    # Brown--Collins subresultant PRS
    d_prev = len(A) - len(B)
    beta = Fraction((-1) ** (d_prev + 1))
    psi = Fraction(-1)
    while True:
        S_prev, S = seq[-2], seq[-1]
        if len(S) <= 1:
            break
        delta = len(S_prev) - len(S)
        R = _prem(S_prev, S)
        if not R:
            break
        nxt = [Fraction(c) / beta for c in R]
        if any(c.denominator != 1 for c in nxt):
            raise AssertionError("subresultant division was not exact")
        nxt = [int(c) for c in nxt]
        # prem(S_prev, S) = lc(S)^(delta+1) * rem = -lc(S)^(delta+1) * c_prev * T_next
        c_sign = -_sign(S[-1]) ** (delta + 1) * signs[-2] * _sign(beta)
        seq.append(nxt)
        signs.append(c_sign)
        # update psi, beta for the next step
        lc = Fraction(S[-1])
        d_i = len(S) - len(nxt)
        psi = (-lc) ** delta / psi ** (delta - 1) if delta != 1 else -lc
        beta = -lc * psi**d_i
    return seq, signs


def _variations(signs: list[int]) -> int:
    s = [x for x in signs if x]
    return sum(1 for a, b in zip(s, s[1:]) if a != b)


def sturm_count_real_roots(p: UnivariatePoly, with_transcript: bool = False):
    """Exact number of distinct real roots of ``p``."""
    seq, signs = sturm_sequence(p)
    at_pos = [sg * _sign(S[-1]) for S, sg in zip(seq, signs)]
    at_neg = [sg * _sign(S[-1]) * (-1) ** (len(S) - 1) for S, sg in zip(seq, signs)]
    count = _variations(at_neg) - _variations(at_pos)
    if with_transcript:
        return count, {
            "length": len(seq),
            "variations_at_minus_infinity": _variations(at_neg),
            "variations_at_plus_infinity": _variations(at_pos),
            "degrees": [len(S) - 1 for S in seq],
        }
    return count


def sturm_count_in_interval(p: UnivariatePoly, a, b) -> int:
    """Distinct real roots in the half-open interval (a, b]."""
    seq, signs = sturm_sequence(p)

    def var_at(x):
        vals = []
        for S, sg in zip(seq, signs):
            acc = Fraction(0)
            for c in reversed(S):
                acc = acc * x + c
            vals.append(sg * _sign(acc))
        return _variations(vals)

    return var_at(Fraction(a)) - var_at(Fraction(b))


# ---------------------------------------------------------------------------
# Descartes bisection (independent of the Sturm code path)


def _taylor_shift_scale(coeffs: list[Fraction], a: Fraction, b: Fraction) -> list[Fraction]:
    """Coefficients of (1+t)^n p((a + b t)/(1 + t))."""
    n = len(coeffs) - 1
    out = [Fraction(0)] * (n + 1)
    # expand sum c_k (a + b t)^k (1 + t)^(n-k)
    for k, c in enumerate(coeffs):
        if not c:
            continue
        poly = [Fraction(1)]
        for _ in range(k):
            poly = _mul_lin(poly, a, b)
        for _ in range(n - k):
            poly = _mul_lin(poly, Fraction(1), Fraction(1))
        for i, v in enumerate(poly):
            out[i] += c * v
    return out


def _mul_lin(poly, c0, c1):
    out = [Fraction(0)] * (len(poly) + 1)
    for i, v in enumerate(poly):
        out[i] += v * c0
        out[i + 1] += v * c1
    return out


def descartes_isolate(p: UnivariatePoly) -> list[tuple[Fraction, Fraction]]:
    """Isolating intervals for the distinct real roots of ``p``.

    Degenerate intervals ``(r, r)`` mark exact rational roots.
    """
    if p.degree < 1:
        return []
    sf = p.divmod(_gcd(p, p.derivative()))[0]
    coeffs = list(sf.coeffs)
    bound = 1 + max(abs(c / coeffs[-1]) for c in coeffs[:-1]) if len(coeffs) > 1 else Fraction(1)
    M = Fraction(2) ** math.ceil(math.log2(bound) + 1)
    out = []
    stack = [(-M, M)]
    while stack:
        a, b = stack.pop()
        v = _variations([_sign(c) for c in _taylor_shift_scale(coeffs, a, b)])
        if v == 0:
            continue
        if v == 1:
            out.append((a, b))
            continue
        mid = (a + b) / 2
        if sf(mid) == 0:
            out.append((mid, mid))
        stack.append((a, mid))
        stack.append((mid, b))
    out.sort()
    return out


# ---------------------------------------------------------------------------
# complex roots


@dataclass
class ComplexRoot:
    re: mpmath.mpf
    im: mpmath.mpf
    residual: mpmath.mpf
    multiplicity: int = 1

    @property
    def value(self) -> mpmath.mpc:
        return mpmath.mpc(self.re, self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def to_json(self, digits: int = 30) -> dict:
        return {
            "re": mpmath.nstr(self.re, digits),
            "im": mpmath.nstr(self.im, digits),
            "residual": mpmath.nstr(self.residual, 6),
            "multiplicity": self.multiplicity,
        }


def _eval_with_abs(coeffs, z):
    acc = mpmath.mpc(0)
    mag = mpmath.mpf(0)
    az = abs(z)
    for c in reversed(coeffs):
        acc = acc * z + c
        mag = mag * az + abs(c)
    return acc, mag


def _aberth(coeffs: list[Fraction], prec: int, max_iter: int) -> list[mpmath.mpc]:
    n = len(coeffs) - 1
    if n == 1:
        return [mpmath.mpc(-mpmath.mpf(coeffs[0].numerator) / coeffs[0].denominator
                           / (mpmath.mpf(coeffs[1].numerator) / coeffs[1].denominator))]
    # power-of-two rescaling x = 2^s y balances the extreme coefficients
    lo = next(k for k, c in enumerate(coeffs) if c)
    if lo:
        raise AssertionError("zero roots are split off by the caller")
    s = round((math.log2(abs(coeffs[0])) - math.log2(abs(coeffs[-1]))) / n)
    scaled = [mpmath.mpf(c.numerator) / c.denominator * mpmath.ldexp(1, s * k) for k, c in enumerate(coeffs)]
    top = scaled[-1]
    scaled = [c / top for c in scaled]
    dcoeffs = [k * c for k, c in enumerate(scaled)][1:]
    radius = max(abs(scaled[0]) ** (mpmath.mpf(1) / n), mpmath.mpf("0.5"))
    z = [radius * mpmath.expj(2 * mpmath.pi * k / n + mpmath.mpf("0.4")) for k in range(n)]
    tol = mpmath.ldexp(1, -prec + 8)
    for it in range(max_iter):
        biggest = mpmath.mpf(0)
        for k in range(n):
            zk = z[k]
            pv = mpmath.polyval(scaled[::-1], zk)
            dv = mpmath.polyval(dcoeffs[::-1], zk)
            if pv == 0:
                continue
            ratio = pv / dv if dv != 0 else mpmath.mpc(tol)
            sigma = mpmath.fsum(1 / (zk - z[j]) for j in range(n) if j != k)
            step = ratio / (1 - ratio * sigma)
            z[k] = zk - step
            rel = abs(step) / max(abs(z[k]), mpmath.mpf(1))
            if rel > biggest:
                biggest = rel
        if biggest < tol:
            break
    else:
        raise RootFindingError(
            f"Aberth iteration did not converge in {max_iter} steps at {prec} bits "
            f"(last relative correction {mpmath.nstr(biggest, 5)})"
        )
    return [zk * mpmath.ldexp(1, s) for zk in z]


def complex_roots(p: UnivariatePoly, precision_bits: int = 256, max_iter: int = 1000) -> list[ComplexRoot]:
    """All ``deg p`` complex roots (with multiplicity) and residual bounds."""
    if p.degree < 1:
        raise ValueError("complex_roots needs degree >= 1")
    out = []
    with mpmath.workprec(precision_bits + 32):
        for factor, mult in squarefree_decomposition(p):
            coeffs = list(factor.coeffs)
            zeros = 0
            while not coeffs[0]:
                coeffs.pop(0)
                zeros += 1
            found = [mpmath.mpc(0)] * zeros
            if len(coeffs) > 1:
                found += _aberth(coeffs, precision_bits, max_iter)
            # polish against the original polynomial is unnecessary: factor roots are simple
            for z in found:
                out.extend([(z, mult)] * mult)
    eps = mpmath.ldexp(1, -precision_bits)
    roots = []
    with mpmath.workprec(2 * precision_bits + 32):
        pc = [mpmath.mpf(c.numerator) / c.denominator for c in p.coeffs]
        for z, mult in out:
            val, mag = _eval_with_abs(pc, z)
            residual = 2 * abs(val) + eps * mag * (p.degree + 1)
            roots.append(ComplexRoot(mpmath.mpf(z.real), mpmath.mpf(z.imag), residual, mult))
    roots.sort(key=lambda r: (float(r.re), float(r.im)))
    return roots


def conjugate_pairing(roots: list[ComplexRoot], tol=None, precision_bits: int = 256):
    """Match non-real roots with their conjugates.

    Returns ``(pairs, reals)``; ``pairs`` holds ``(root with im > 0, partner)``.
    Raises :class:`RootFindingError` when a non-real root has no partner.
    """
    if tol is None:
        tol = mpmath.ldexp(1, -precision_bits // 4)
    reals = [r for r in roots if abs(r.im) < tol]
    upper = [r for r in roots if r.im >= tol]
    lower = [r for r in roots if r.im <= -tol]
    pairs = []
    free = list(lower)
    for r in upper:
        best = None
        for k, s in enumerate(free):
            dist = abs(r.value - mpmath.conj(s.value))
            if dist < tol * max(1, abs(r.value)) and (best is None or dist < best[0]):
                best = (dist, k)
        if best is None:
            raise RootFindingError(f"root {mpmath.nstr(r.value, 10)} has no conjugate partner within {mpmath.nstr(tol, 3)}")
        pairs.append((r, free.pop(best[1])))
    if free:
        raise RootFindingError(f"{len(free)} roots in the lower half plane are unmatched")
    return pairs, reals
