# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled reduction kernels; same contract as ``_kernels_py``.

Monomials stay Python integers (packed exponents can exceed 64 bits), so the
gain comes from typed containers, C-level loop indices and avoiding attribute
lookups in the inner loops.
"""
from heapq import heappop, heappush, heapify

BACKEND = "cython"


def divides(a_exp, b_exp, guard):
    return ((b_exp | guard) - a_exp) & guard == guard


def find_reducer(m_exp, list lm_exps, guard):
    cdef Py_ssize_t j, n = len(lm_exps)
    cdef object probe = m_exp | guard
    for j in range(n):
        if (probe - <object>lm_exps[j]) & guard == guard:
            return j
    return -1


def reduce_poly(dict terms, list reducers, bint full, bint track, cgcd, emask, guard, allguard, one):
    cdef list lm_exps = [r[1] for r in reducers]
    cdef Py_ssize_t nred = len(lm_exps)
    cdef dict entries = {m: (c, 0) for m, c in terms.items()}
    cdef list heap = [-m for m in entries]
    heapify(heap)
    cdef list cum = [one]
    cdef Py_ssize_t K = 0, j, jj, ep, oep
    cdef dict rem = {}
    cdef list quot = [] if track else None
    cdef list tail
    cdef tuple ent, old
    cdef object M, Me, c, lm, lc, g, a, e, shift, N, tc, tm, oc, v, probe
    while heap:
        M = -heappop(heap)
        ent = entries.pop(M, None)
        if ent is None:
            continue
        c = ent[0]
        ep = ent[1]
        if not c:
            continue
        Me = M & emask
        probe = Me | guard
        j = -1
        for jj in range(nred):
            if (probe - <object>lm_exps[jj]) & guard == guard:
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
                oc = old[0]
                oep = old[1]
                if oep != K:
                    oc = oc * (cum[K] // cum[oep])
                v = oc - e * tc
                if v:
                    entries[N] = (v, K)
                else:
                    del entries[N]
    scale = cum[K]
    cdef dict out = {}
    for m, val in rem.items():
        c = val[0]
        ep = val[1]
        if not c:
            continue
        out[m] = c if ep == K else c * (scale // cum[ep])
    quotients = None
    if quot is not None:
        quotients = [(q[0], q[1], q[2] if q[3] == K else q[2] * (scale // cum[q[3]])) for q in quot]
    return out, scale, quotients


def add_scaled_shifted(dict acc, coeff, shift, dict src, allguard):
    cdef object m, c, N, v
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


def scale_terms(dict src, factor):
    return {m: c * factor for m, c in src.items()}


def mul_terms(dict a, dict b, allguard):
    if len(a) > len(b):
        a, b = b, a
    cdef dict out = {}
    cdef object ma, ca, mb, cb, N, v
    for ma, ca in a.items():
        for mb, cb in b.items():
            N = ma + mb
            v = out.get(N)
            if v is None:
                out[N] = ca * cb
            else:
                out[N] = v + ca * cb
    for N in out:
        if N & allguard:
            raise OverflowError("exponent overflow")
    return {m: c for m, c in out.items() if c}
