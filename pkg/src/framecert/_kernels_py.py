"""Pure-Python reduction kernels (fallback for ``_kernels_cy``).

Monomials are packed integers whose native integer order is the term order
(see :mod:`framecert.groebner`), so products are sums and quotients are
differences.  Coefficients are arbitrary Python objects supporting ``+ - *``
and exact ``//``; for rational work they are plain ``int``.

``reduce_poly`` is fraction free: each reduction step multiplies the
remainder by ``lc(g)/gcd(lc(g), c)``.  Rather than rescaling every stored
term at each step, terms remember the epoch at which they were last written
and are brought up to the current scale lazily.
"""
from heapq import heappop, heappush, heapify

BACKEND = "python"


def divides(a_exp, b_exp, guard):
    """True when the exponent part ``a_exp`` divides ``b_exp``."""
    return ((b_exp | guard) - a_exp) & guard == guard


def find_reducer(m_exp, lm_exps, guard):
    for j, le in enumerate(lm_exps):
        if ((m_exp | guard) - le) & guard == guard:
            return j
    return -1


def reduce_poly(terms, reducers, full, track, cgcd, emask, guard, allguard, one):
    """Reduce ``terms`` (dict monomial -> coeff, consumed) by ``reducers``.

    ``reducers`` is a list of ``(lm, lm_exp, lc, tail)`` with ``tail`` a list
    of ``(monomial, coeff)`` pairs.  Returns ``(rem, scale, quotients)`` with
    ``scale * p == sum(q_j * g_j) + rem``; ``quotients`` is a list of
    ``(j, shift, coeff)`` or ``None`` when ``track`` is false.
    """
    lm_exps = [r[1] for r in reducers]
    entries = {m: (c, 0) for m, c in terms.items()}
    heap = [-m for m in entries]
    heapify(heap)
    cum = [one]
    K = 0
    rem = {}
    quot = [] if track else None
    while heap:
        M = -heappop(heap)
        ent = entries.pop(M, None)
        if ent is None:
            continue
        c, ep = ent
        if not c:
            continue
        Me = M & emask
        j = -1
        for jj, le in enumerate(lm_exps):
            if ((Me | guard) - le) & guard == guard:
                j = jj
                break
        if j < 0:
            rem[M] = (c, ep)
            if not full:
                for m2, v in entries.items():
                    rem[m2] = v
                entries.clear()
                break
            continue
        if ep != K:
            c = c * (cum[K] // cum[ep])
        lm, _, lc, tail = reducers[j]
        g = cgcd(lc, c)
        if g == one:
            a, e = lc, c
        else:
            a, e = lc // g, c // g
        if a != one:
            cum.append(cum[K] * a)
            K += 1
        shift = M - lm
        if quot is not None:
            quot.append((j, shift, e, K))
        for tm, tc in tail:
            N = tm + shift
            if N & allguard:
                raise OverflowError("exponent overflow during reduction")
            old = entries.get(N)
            if old is None:
                entries[N] = (-(e * tc), K)
                heappush(heap, -N)
            else:
                oc, oep = old
                if oep != K:
                    oc = oc * (cum[K] // cum[oep])
                v = oc - e * tc
                if v:
                    entries[N] = (v, K)
                else:
                    del entries[N]
    scale = cum[K]
    out = {}
    for m, (c, ep) in rem.items():
        if not c:
            continue
        out[m] = c if ep == K else c * (scale // cum[ep])
    quotients = None
    if quot is not None:
        quotients = [(j, shift, e if ep == K else e * (scale // cum[ep])) for j, shift, e, ep in quot]
    return out, scale, quotients


def add_scaled_shifted(acc, coeff, shift, src, allguard):
    """``acc += coeff * x^shift * src`` in place (dicts monomial -> coeff)."""
    for m, c in src.items():
        N = m + shift
        if N & allguard:
            raise OverflowError("exponent overflow")
        v = acc.get(N)
        if v is None:
            acc[N] = coeff * c
        else:
            v = v + coeff * c
            if v:
                acc[N] = v
            else:
                del acc[N]
    return acc


def scale_terms(src, factor):
    return {m: c * factor for m, c in src.items()}


def mul_terms(a, b, allguard):
    """Product of two term dicts."""
    if len(a) > len(b):
        a, b = b, a
    out = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            N = ma + mb
            v = out.get(N)
            if v is None:
                out[N] = ca * cb
            else:
                out[N] = v + ca * cb
    if any(N & allguard for N in out):
        raise OverflowError("exponent overflow")
    return {m: c for m, c in out.items() if c}
