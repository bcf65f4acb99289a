"""Sweep the last frame vector over a grid and classify each frame.

The frame varies only in its last vector ``(1, -3+8i, 5-5i, a+bi)``.  Two
classifiers are available:

* ``exact`` runs the certifier on each frame;
* ``continuation`` follows the finitely many complex solutions on the chart
  ``y34 = 1`` from the base point along the segment to ``(a, b)`` and reads
  off how far the endpoint matrices are from being Hermitian.
"""
from __future__ import annotations

import csv
import io
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .certifier import certify_injective
from .exact_arith import GaussRational, format_rational
from .frame_model import ELEVEN_VECTOR_ROWS, Frame, eleven_vector_frame, hermitian_system, hermitian_table

log = logging.getLogger(__name__)

BASE_POINT = (Fraction(-6), Fraction(-4))
NON_INJECTIVE_BELOW = 1e-6
INDETERMINATE_BELOW = 1e-3
MIN_STEP = 2.0**-40

__all__ = [
    "BASE_POINT",
    "GridSpec",
    "SampleResult",
    "classify_point",
    "perturbed_frame",
    "render_svg",
    "sweep",
    "track_solutions",
    "write_csv",
]


def perturbed_frame(a, b) -> Frame:
    """The base frame with its last vector ending in ``a + b*i``."""
    a, b = Fraction(a), Fraction(b)
    last = [GaussRational.parse(c) for c in ELEVEN_VECTOR_ROWS[-1][:-1]] + [GaussRational(a, b)]
    return eleven_vector_frame().replace_vector(len(ELEVEN_VECTOR_ROWS) - 1, last)


@dataclass(frozen=True)
class GridSpec:
    center: tuple = BASE_POINT
    step: Fraction = Fraction(1, 10)
    half_width: int = 2
    mode: str = "continuation"

    def __post_init__(self):
        object.__setattr__(self, "center", (Fraction(self.center[0]), Fraction(self.center[1])))
        object.__setattr__(self, "step", Fraction(self.step))
        if self.half_width < 0:
            raise ValueError("half_width must be non-negative")
        if self.mode not in ("exact", "continuation"):
            raise ValueError(f"unknown mode {self.mode!r}")

    def points(self) -> list[tuple[Fraction, Fraction]]:
        """Row-major: ``b`` from high to low, ``a`` from low to high within a row."""
        a0, b0 = self.center
        h = self.half_width
        return [(a0 + i * self.step, b0 + j * self.step) for j in range(h, -h - 1, -1) for i in range(-h, h + 1)]

    @classmethod
    def parse(cls, text: str, mode: str = "continuation") -> "GridSpec":
        """``a0,b0,step,halfwidth`` with rational entries."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError("grid must be a0,b0,step,halfwidth")
        return cls((Fraction(parts[0]), Fraction(parts[1])), Fraction(parts[2]), int(parts[3]), mode)


@dataclass
class SampleResult:
    a: Fraction
    b: Fraction
    verdict: str
    margin: float
    seconds: float
    detail: str = ""

    def row(self) -> list:
        return [format_rational(self.a), format_rational(self.b), self.verdict, f"{self.margin:.6e}",
                f"{self.seconds:.3f}"]


# ---------------------------------------------------------------------------
# numerical system on the chart y34 = 1


class _Polys:
    """Vectorized evaluation of a list of polynomials and their Jacobian."""

    def __init__(self, polys, n):
        exps, coeffs, owner = [], [], []
        for k, p in enumerate(polys):
            for e, c in p.terms.items():
                exps.append(e)
                coeffs.append(complex(c))
                owner.append(k)
        self.E = np.array(exps, dtype=np.int64).reshape(-1, n)
        self.C = np.array(coeffs, dtype=complex)
        self.owner = np.array(owner)
        self.m = len(polys)
        self.n = n
        self.deg = np.array([p.total_degree() for p in polys])

    def __call__(self, z):
        P = z[None, :] ** self.E
        mono = self.C * np.prod(P, axis=1)
        F = np.zeros(self.m, dtype=complex)
        np.add.at(F, self.owner, mono)
        J = np.zeros((self.m, self.n), dtype=complex)
        for j in range(self.n):
            ej = self.E[:, j]
            mask = ej > 0
            if not mask.any():
                continue
            Ed = self.E[mask].copy()
            Ed[:, j] -= 1
            vals = self.C[mask] * ej[mask] * np.prod(z[None, :] ** Ed, axis=1)
            np.add.at(J[:, j], self.owner[mask], vals)
        return F, J


def _form_row(phi) -> np.ndarray:
    """Coefficients of ``phi^* Q phi`` in the 16 Hermitian coordinates (complex input allowed)."""
    d = len(phi)
    names = hermitian_table(d).names
    row = np.zeros(len(names))
    pos = {n: k for k, n in enumerate(names)}
    for j in range(d):
        row[pos[f"x{j + 1}{j + 1}"]] = abs(phi[j]) ** 2
        for k in range(j + 1, d):
            w = np.conj(phi[j]) * phi[k]
            row[pos[f"x{j + 1}{k + 1}"]] = 2 * w.real
            row[pos[f"y{j + 1}{k + 1}"]] = -2 * w.imag
    return row


def _last_row_parts(head):
    """Constant, ``a`` and ``b`` parts plus the ``a^2 + b^2`` slot of the last form.

    The row is polynomial in ``(a, b)`` so it extends to complex parameters.
    """
    names = hermitian_table(4).names
    pos = {n: k for k, n in enumerate(names)}
    const = _form_row(list(head) + [0j])
    lin_a = np.zeros(len(names))
    lin_b = np.zeros(len(names))
    for j, c in enumerate(head):
        lin_a[pos[f"x{j + 1}4"]] = 2 * c.real
        lin_b[pos[f"x{j + 1}4"]] = 2 * c.imag
        lin_a[pos[f"y{j + 1}4"]] = 2 * c.imag
        lin_b[pos[f"y{j + 1}4"]] = -2 * c.real
    return const, lin_a, lin_b, pos["x44"]


class _Homotopy:
    """Forms and minors of the frame whose last vector ends in ``a(t) + b(t) i``.

    ``(a(t), b(t))`` runs from ``start`` to ``end`` with a complex bend
    ``gamma * t * (1 - t)`` so the path misses the parameters where
    solutions collide.
    """

    GAMMA = complex(0.6, 0.8)

    def __init__(self, start, end):
        table = hermitian_table(4)
        self.names = table.names
        self.fixed = table.index("y34")
        self.free = [k for k in range(len(self.names)) if k != self.fixed]
        base = eleven_vector_frame()
        self.rows = np.array([_form_row([complex(c) for c in v]) for v in base.vectors[:-1]])
        head = [complex(GaussRational.parse(c)) for c in ELEVEN_VECTOR_ROWS[-1][:-1]]
        self.const, self.lin_a, self.lin_b, self.sq = _last_row_parts(head)
        self.start = np.array([float(start[0]), float(start[1])], dtype=complex)
        self.end = np.array([float(end[0]), float(end[1])], dtype=complex)
        span = float(np.linalg.norm(self.end - self.start))
        self.bend = self.GAMMA * max(span, 1.0) * 0.5 if span else 0.0
        self.minors = _Polys(hermitian_system(base).minors, len(self.names))

    def params(self, t):
        ab = self.start + t * (self.end - self.start) + self.bend * t * (1 - t)
        dab = (self.end - self.start) + self.bend * (1 - 2 * t)
        return ab, dab

    def last_row(self, t):
        (a, b), _ = self.params(t)
        row = self.const + a * self.lin_a + b * self.lin_b
        row = row.astype(complex)
        row[self.sq] = a * a + b * b
        return row

    def full(self, z):
        out = np.empty(len(self.names), dtype=complex)
        out[self.free] = z
        out[self.fixed] = 1.0
        return out

    def matrix(self, t):
        return np.vstack([self.rows.astype(complex), self.last_row(t)])

    def F(self, z, t):
        x = self.full(z)
        A = self.matrix(t)
        fm, jm = self.minors(x)
        Fv = np.concatenate([A @ x, fm])
        Jv = np.vstack([A[:, self.free], jm[:, self.free]])
        return Fv, Jv

    def dF_dt(self, z, t):
        x = self.full(z)
        (a, b), (da, db) = self.params(t)
        d = (da * self.lin_a + db * self.lin_b).astype(complex)
        d[self.sq] = 2 * a * da + 2 * b * db
        out = np.zeros(len(self.rows) + 1 + self.minors.m, dtype=complex)
        out[len(self.rows)] = d @ x
        return out

    def residual(self, z, t) -> float:
        x = self.full(z)
        scale = max(np.max(np.abs(x)), 1.0)
        A = self.matrix(t)
        fm, _ = self.minors(x)
        lin = np.abs(A @ x) / (np.abs(A).sum(axis=1) * scale)
        cub = np.abs(fm) / scale**3
        return float(max(lin.max(), cub.max()))


def _newton(H: _Homotopy, z, t, iters=8, tol=1e-11):
    for _ in range(iters):
        Fv, Jv = H.F(z, t)
        dz = np.linalg.lstsq(Jv, -Fv, rcond=None)[0]
        z = z + dz
        if np.linalg.norm(dz) <= tol * (1 + np.linalg.norm(z)):
            return z, True
    return z, False


def _track_one(H: _Homotopy, z0, max_steps=20000):
    t, dt = 0.0, 0.05
    z = z0.copy()
    steps = 0
    while t < 1.0:
        if steps > max_steps:
            return z, "step budget exhausted"
        steps += 1
        dt = min(dt, 1.0 - t)
        Fv, Jv = H.F(z, t)
        tangent = np.linalg.lstsq(Jv, -H.dF_dt(z, t), rcond=None)[0]
        guess = z + dt * tangent
        znew, ok = _newton(H, guess, t + dt, iters=6)
        if ok and np.linalg.norm(znew - guess) < 0.1 * (1 + np.linalg.norm(z)):
            z, t = znew, t + dt
            dt = min(dt * 1.5, 0.25)
        else:
            dt /= 2
            if dt < MIN_STEP:
                return z, f"step size underflow at t={t:.6g}"
        if not np.all(np.isfinite(z)) or np.linalg.norm(z) > 1e8:
            return z, "solution diverged (moving off the chart)"
    z, ok = _newton(H, z, 1.0, iters=10, tol=1e-13)
    return z, None if ok else "final correction did not converge"


def _hermitian_deviation(H: _Homotopy, z) -> float:
    x = H.full(z)
    vals = dict(zip(H.names, x))
    M = np.zeros((4, 4), dtype=complex)
    for j in range(1, 5):
        M[j - 1, j - 1] = vals[f"x{j}{j}"]
        for k in range(j + 1, 5):
            M[j - 1, k - 1] = vals[f"x{j}{k}"] + 1j * vals[f"y{j}{k}"]
            M[k - 1, j - 1] = vals[f"x{j}{k}"] - 1j * vals[f"y{j}{k}"]
    return float(np.max(np.abs(M - M.conj().T)) / np.max(np.abs(M)))


@lru_cache(maxsize=4)
def _base_solutions(a0: Fraction, b0: Fraction, precision_bits: int = 128) -> tuple:
    from .rank2_recovery import shape_lemma_solve
    from .unipoly import complex_roots

    import mpmath

    shape = shape_lemma_solve(hermitian_system(perturbed_frame(a0, b0)), ("x34", "y34"))
    wp = precision_bits + shape.coefficient_bits() + 64
    names = hermitian_table(4).names
    out = []
    with mpmath.workprec(wp):
        for r in complex_roots(shape.minimal_polynomial, wp):
            pt = shape.point(r.value)
            out.append(tuple(complex(pt[n]) for n in names if n != "y34"))
    return tuple(out)


def track_solutions(a, b, base=BASE_POINT):
    """Endpoints of all chart solutions tracked from ``base`` to ``(a, b)``.

    Returns ``(endpoints, homotopy, failures)``.
    """
    starts = _base_solutions(Fraction(base[0]), Fraction(base[1]))
    H = _Homotopy(base, (a, b))
    ends, failures = [], []
    for k, s in enumerate(starts):
        z, err = _track_one(H, np.array(s, dtype=complex))
        ends.append(z)
        if err:
            failures.append(f"path {k}: {err}")
    return ends, H, failures


def _distinct(ends, tol=1e-6) -> bool:
    for i in range(len(ends)):
        for j in range(i + 1, len(ends)):
            scale = 1 + max(np.linalg.norm(ends[i]), np.linalg.norm(ends[j]))
            if np.linalg.norm(ends[i] - ends[j]) < tol * scale:
                return False
    return True


def classify_point(a, b, mode: str = "continuation", base=BASE_POINT, **certify_kwargs) -> SampleResult:
    a, b = Fraction(a), Fraction(b)
    t0 = time.perf_counter()
    if mode == "exact":
        try:
            res = certify_injective(perturbed_frame(a, b), **certify_kwargs)
        except Exception as exc:  # resource limits and other certifier aborts become indeterminate points
            return SampleResult(a, b, "indeterminate", float("nan"), time.perf_counter() - t0, f"aborted: {exc}")
        detail = getattr(res, "reason", "") or getattr(res, "note", "")
        return SampleResult(a, b, res.verdict, float("nan"), time.perf_counter() - t0, detail)
    if mode != "continuation":
        raise ValueError(f"unknown mode {mode!r}")
    ends, H, failures = track_solutions(a, b, base)
    devs = [_hermitian_deviation(H, z) for z in ends]
    margin = min(devs)
    elapsed = time.perf_counter() - t0
    if failures:
        return SampleResult(a, b, "indeterminate", margin, elapsed, "; ".join(failures))
    worst = max(H.residual(z, 1.0) for z in ends)
    if worst > 1e-8:
        return SampleResult(a, b, "indeterminate", margin, elapsed, f"endpoint residual {worst:.2e}")
    if not _distinct(ends):
        return SampleResult(a, b, "indeterminate", margin, elapsed, "two paths reached the same endpoint")
    if margin < NON_INJECTIVE_BELOW:
        verdict = "non-injective"
    elif margin < INDETERMINATE_BELOW:
        verdict = "indeterminate"
    else:
        verdict = "injective"
    return SampleResult(a, b, verdict, margin, elapsed)


def _classify_task(args):
    a, b, mode, base = args
    return classify_point(a, b, mode, base)


def sweep(grid: GridSpec, threads: int = 1, base=BASE_POINT) -> tuple[list[SampleResult], dict]:
    """Classify every grid point; results are row-major regardless of ``threads``."""
    tasks = [(a, b, grid.mode, base) for a, b in grid.points()]
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_classify_task, tasks))
    else:
        results = [_classify_task(t) for t in tasks]
    summary = {"injective": 0, "non-injective": 0, "indeterminate": 0}
    for r in results:
        summary[r.verdict] += 1
    return results, summary


def write_csv(results: list[SampleResult], fh=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["a", "b", "verdict", "margin", "seconds"])
    for r in results:
        w.writerow(r.row())
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text


_COLORS = {"injective": "#3b6fd6", "non-injective": "#f2f2f2", "indeterminate": "#f0a030"}


def render_svg(results: list[SampleResult], grid: GridSpec, cell: int = 14) -> str:
    """Heatmap of verdicts; the base point is outlined in red."""
    h = grid.half_width
    side = 2 * h + 1
    pad = 40
    size = side * cell
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size + 2 * pad}" height="{size + 2 * pad}">',
        f'<rect x="0" y="0" width="{size + 2 * pad}" height="{size + 2 * pad}" fill="white"/>',
    ]
    for k, r in enumerate(results):
        row, col = divmod(k, side)
        x, y = pad + col * cell, pad + row * cell
        parts.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{_COLORS[r.verdict]}">'
                     f'<title>a={format_rational(r.a)} b={format_rational(r.b)} {r.verdict}</title></rect>')
        if (r.a, r.b) == BASE_POINT:
            parts.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="none" '
                         f'stroke="red" stroke-width="2"/>')
    a0, b0 = grid.center
    lo_a = format_rational(a0 - h * grid.step)
    hi_a = format_rational(a0 + h * grid.step)
    lo_b = format_rational(b0 - h * grid.step)
    hi_b = format_rational(b0 + h * grid.step)
    parts.append(f'<text x="{pad}" y="{pad + size + 16}" font-size="11">a: {lo_a} .. {hi_a}</text>')
    parts.append(f'<text x="4" y="{pad - 8}" font-size="11">b: {hi_b} (top) .. {lo_b} (bottom)</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
