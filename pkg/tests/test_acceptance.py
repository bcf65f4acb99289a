"""End-to-end acceptance checks, one group per criterion.

Each test is named ``test_criterion_<n>_...``; conftest prints one PASS/FAIL
line per criterion in the terminal summary.
"""
import json
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from framecert.certifier import (
    InjectivityCertificate,
    certify_system,
    reduce_system,
    slice_check,
    verify_certificate,
)
from framecert.exact_arith import GaussRational
from framecert.frame_model import linear_presolve, measurement_form, minors
from framecert.groebner import buchberger, ideal_contains_one, is_groebner_basis
from framecert.multipoly import Polynomial, TermOrder, VariableTable, is_homogeneous
from framecert.sampler import BASE_POINT, GridSpec, classify_point, render_svg, sweep, write_csv
from framecert.unipoly import UnivariatePoly, complex_roots, descartes_isolate, sturm_count_real_roots

from conftest import TIMINGS, coefficient_paths, cone_system, load_minpoly_table, perturbed

# the two rank-2 matrices displayed for the roots near 1.95 +- 2.08i, rounded to two decimals
MATRIX_PLUS = [
    [0, -12.84 - 22.02j, -27.63 - 6.1j, 26.67 - 31.13j],
    [30.12 - 34.42j, 0, -3.48 + 4.16j, 1.24 - 1.93j],
    [17.86 - 16.81j, 2.62 + 0.13j, 0, 1.95 + 3.08j],
    [-15.06 - 15.68j, 0.57 - 0.37j, 1.95 + 1.08j, 0],
]
MATRIX_MINUS = [
    [0, 30.12 + 34.42j, 17.86 + 16.81j, -15.06 + 15.68j],
    [-12.84 + 22.02j, 0, 2.62 - 0.13j, 0.57 + 0.37j],
    [-27.63 + 6.1j, -3.48 - 4.16j, 0, 1.95 - 1.08j],
    [26.67 + 31.13j, 1.24 + 1.93j, 1.95 - 3.08j, 0],
]
X20 = 47599685697454466246329412358483179722150043354437125082025800902606928597206272254845887202098485215232
Y20 = 17892217832720483440399845902831090202434763229104212220658085110841220106091148070445766234106381722000


# --- 1: the 2x2 cone end to end --------------------------------------------

def test_criterion_1_cone_pipeline():
    t0 = time.perf_counter()
    system = cone_system()
    cert = certify_system(system, ("x", "y"), lift=True)
    elapsed = time.perf_counter() - t0
    assert isinstance(cert, InjectivityCertificate)
    assert elapsed < 1.0, elapsed
    T = system.table
    P = lambda s: Polynomial.parse(s, T)  # noqa: E731
    assert cert.f.change_table(T) == P("3*x^2 - 2*x*y + 3*y^2")
    # f = -4 m - (x + y + 2z) l, in the original coordinates
    m, ell = system.generators()
    assert cert.lifted["f"] == [P("-4"), P("-x - y - 2*z")]
    assert P("-4") * m + P("-x - y - 2*z") * ell == P("3*x^2 - 2*x*y + 3*y^2")
    assert cert.sturm["count"] == 0
    assert sturm_count_real_roots(UnivariatePoly([3, -2, 3])) == 0
    assert verify_certificate(system, cert).ok


def test_criterion_1_cone_slice_identities():
    system = cone_system()
    T = system.table
    P = lambda s: Polynomial.parse(s, T)  # noqa: E731
    expected = {
        "x": ["-4/3", "-(x + y + 2*z)/3", "-(x + 1)", "(2*x - 3*y)/3"],
        "z": ["-1/3", "-(x + y + 2*z)/3", "-(z + 1)", "2*x/3"],
    }
    for pin, texts in expected.items():
        ok, rep = slice_check(system, pin, "y", lift=True)
        assert ok
        assert rep.generators == system.generators() + [T.var(pin) - 1, T.var("y")]
        assert rep.multipliers == [P(t) for t in texts], pin
        assert rep.verify() and rep.target == T.const(1)


# --- 2: the degree-20 eliminant of the eleven-vector frame ------------------

def test_criterion_2_eliminant_matches_transcription(frame_cert):
    table = load_minpoly_table()
    f = frame_cert.f
    names = f.table.names
    ix, iy = names.index("x34"), names.index("y34")
    got = {(e[ix], e[iy]): c for e, c in f.terms.items()}
    assert all(c.is_real() and c.re.denominator == 1 for c in got.values())
    got = {k: int(c.re) for k, c in got.items()}
    if got[(20, 0)] < 0:
        got = {k: -v for k, v in got.items()}
    assert got == table
    assert got[(20, 0)] == X20
    assert got[(0, 20)] == Y20
    assert TIMINGS.get("frame_cert", 0) < 30 * 60


# --- 3: Sturm count ---------------------------------------------------------

def test_criterion_3_no_real_roots(frame_cert):
    table = load_minpoly_table()
    coeffs = [0] * 21
    for (ex, _), c in table.items():
        coeffs[ex] += c
    t0 = time.perf_counter()
    assert sturm_count_real_roots(UnivariatePoly(coeffs)) == 0
    assert time.perf_counter() - t0 < 10
    assert sturm_count_real_roots(UnivariatePoly.from_polynomial(frame_cert.f, "x34", {"y34": 1})) == 0
    assert frame_cert.sturm["count"] == 0


# --- 4: slice certificates --------------------------------------------------

def test_criterion_4_fifteen_slice_identities(frame_system, frame_cert):
    pins = sorted(s.pin for s in frame_cert.slices)
    assert pins == sorted(n for n in frame_system.table.names if n != "y34")
    assert all(s.zero == "y34" for s in frame_cert.slices)
    rs = reduce_system(frame_system, frame_cert.presolve)
    one = rs.table.const(1)
    for s in frame_cert.slices:
        rep = s.representation(rs)
        assert rep.target == one and rep.verify(), s.pin


def test_criterion_4_x12_identity_in_all_coordinates(frame_system):
    ok, rep = slice_check(frame_system, "x12", "y34", lift=True)
    T = frame_system.table
    assert ok
    assert rep.generators == frame_system.generators() + [T.var("x12") - 1, T.var("y34")]
    assert rep.target == T.const(1) and rep.verify()


def test_criterion_4_x12_direct_groebner(frame_system):
    # independent route: plain Buchberger on the slice reaches the unit ideal
    presolve, _ = linear_presolve(frame_system, protect=("y34",))
    rs = reduce_system(frame_system, presolve)
    ok, _ = ideal_contains_one(rs.generators + [rs.binding("x12") - 1, rs.table.var("y34")], track=False)
    assert ok


# --- 5: roots of f(x, 1) ----------------------------------------------------

def test_criterion_5_root_structure(frame_cert):
    f1 = UnivariatePoly.from_polynomial(frame_cert.f, "x34", {"y34": 1})
    roots = [complex(r.value) for r in complex_roots(f1, 256)]
    assert len(roots) == 20
    assert min(abs(z.imag) for z in roots) > 1e-3
    upper = [z for z in roots if z.imag > 0]
    lower = [z for z in roots if z.imag < 0]
    assert len(upper) == 10 and len(lower) == 10
    for z in upper:
        assert min(abs(w - z.conjugate()) for w in lower) < 1e-30 + 1e-12 * abs(z)
    assert min(abs(z - (1.95 + 2.08j)) for z in roots) < 0.01


# --- 6: rank-2 matrices -----------------------------------------------------

def _closest(matrices, target):
    return min(matrices, key=lambda M: abs(complex(M.root) - target))


def test_criterion_6_displayed_matrices(frame_matrices):
    for target, shown in ((1.95 + 2.08j, MATRIX_PLUS), (1.95 - 2.08j, MATRIX_MINUS)):
        M = _closest(frame_matrices, target)
        assert abs(complex(M.root) - target) < 0.01
        for j in range(4):
            assert abs(M.entry(j + 1, j + 1)) < 1e-30
            for k in range(4):
                assert abs(M.entry(j + 1, k + 1) - shown[j][k]) < 0.01, (target, j, k)


def test_criterion_6_all_rank_two_and_not_hermitian(frame_matrices):
    assert len(frame_matrices) == 20
    for M in frame_matrices:
        assert M.rank == 2
        assert M.relative_deviation > 1e-3 and M.hermitian_deviation > 1e-3


# --- 7: certificate round trip ---------------------------------------------

def test_criterion_7_round_trip(frame, frame_cert):
    back = InjectivityCertificate.from_json(json.loads(frame_cert.dumps()))
    assert back == frame_cert and back.dumps() == frame_cert.dumps()
    res = verify_certificate(frame, back)
    assert res.ok, res.failures


def test_criterion_7_perturbations_rejected(frame, frame_cert):
    doc = frame_cert.to_json()
    paths = coefficient_paths(doc)
    rng = random.Random(7)
    # the leading coefficient of f, one multiplier of f, one slice multiplier, and a random sample
    chosen = [paths[0]]
    chosen.append(next(p for p in paths if p[0] == "f_multipliers"))
    chosen.append(next(p for p in paths if p[0] == "slices"))
    chosen += rng.sample(paths, 9)
    for path in chosen:
        try:
            bad = InjectivityCertificate.from_json(perturbed(doc, path))
        except ValueError:
            continue
        assert not verify_certificate(frame, bad).ok, path


# --- 8: sampler -------------------------------------------------------------

@pytest.fixture(scope="module")
def criterion_grid():
    grid = GridSpec(BASE_POINT, Fraction(1, 10), 2)
    results, summary = sweep(grid, threads=1)
    return grid, results, summary


def test_criterion_8_base_point_continuation():
    assert classify_point(*BASE_POINT, mode="continuation").verdict == "injective"


def test_criterion_8_base_point_exact():
    assert classify_point(*BASE_POINT, mode="exact").verdict == "injective"


@pytest.mark.xfail(strict=True, reason="points 1/5 from the base point are non-injective; exact mode confirms")
def test_criterion_8_five_by_five_grid_injective(criterion_grid):
    grid, results, summary = criterion_grid
    assert len(results) == 25
    assert summary["injective"] == 25, summary


def test_criterion_8_grid_artifacts(criterion_grid, tmp_path):
    grid, results, _ = criterion_grid
    text = write_csv(results)
    assert len(text.splitlines()) == 26
    svg = render_svg(results, grid)
    assert svg.count("<title>") == 25


def test_criterion_8_exact_never_contradicts_continuation(criterion_grid):
    _, results, _ = criterion_grid
    flagged = [r for r in results if r.verdict == "non-injective"]
    assert flagged, "the sweep should contain at least one non-injective point"
    for r in flagged:
        exact = classify_point(r.a, r.b, mode="exact")
        assert exact.verdict != "injective", (r.a, r.b)


# --- 9: property suites -----------------------------------------------------

def test_criterion_9_eliminant_homogeneous_degree_20(frame_cert):
    assert is_homogeneous(frame_cert.f) == (True, 20)


def _random_system(rng, table):
    gens = []
    for _ in range(rng.randint(1, 3)):
        terms = {}
        for _ in range(rng.randint(1, 4)):
            e = tuple(rng.randint(0, 2) for _ in table.names)
            if sum(e) <= 2:
                terms[e] = GaussRational(rng.choice([-3, -2, -1, 1, 2, 3]))
        if terms:
            gens.append(Polynomial(table, terms))
    return gens or [table.var(table.names[0])]


def test_criterion_9_groebner_properties():
    rng = random.Random(9)
    T = VariableTable(["x", "y", "z"])
    for _ in range(60):
        gens = _random_system(rng, T)
        order = rng.choice([TermOrder.grevlex(), TermOrder.lex(), TermOrder.block(["x"])])
        gb = buchberger(gens, order)
        assert is_groebner_basis(gb.generators, order)
        shuffled = [g * GaussRational(rng.choice([1, -2, 3])) for g in gens]
        rng.shuffle(shuffled)
        assert buchberger(shuffled, order).generators == gb.generators


def _hermitian(rng, rank=None):
    if rank is None:
        A = rng.integers(-9, 10, (4, 4)) + 1j * rng.integers(-9, 10, (4, 4))
        return A + A.conj().T
    V = rng.integers(-5, 6, (4, rank)) + 1j * rng.integers(-5, 6, (4, rank))
    D = np.diag(rng.choice([-1, 1], rank) * rng.integers(1, 4, rank))
    return V @ D @ V.conj().T


def _coords(Q):
    pt = {}
    for j in range(4):
        pt[f"x{j + 1}{j + 1}"] = Fraction(int(round(Q[j, j].real)))
        for k in range(j + 1, 4):
            pt[f"x{j + 1}{k + 1}"] = Fraction(int(round(Q[j, k].real)))
            pt[f"y{j + 1}{k + 1}"] = Fraction(int(round(Q[j, k].imag)))
    return pt


def test_criterion_9_measurement_forms():
    rng = np.random.default_rng(91)
    for _ in range(100):
        Q = _hermitian(rng)
        phi = rng.integers(-9, 10, 4) + 1j * rng.integers(-9, 10, 4)
        form = measurement_form([GaussRational(int(c.real), int(c.imag)) for c in phi])
        direct = phi.conj() @ Q @ phi
        assert form.evaluate(_coords(Q)) == Fraction(int(round(direct.real)))


def test_criterion_9_minors_vanish_on_rank_two():
    rng = np.random.default_rng(92)
    ms = minors(4)
    for _ in range(100):
        pt = _coords(_hermitian(rng, rank=2))
        assert all(m.evaluate(pt) == 0 for m in ms)


def test_criterion_9_sturm_matches_isolation():
    rng = random.Random(93)
    done = 0
    while done < 100:
        p = UnivariatePoly([rng.randint(-20, 20) for _ in range(rng.randint(2, 13))])
        if p.degree < 1:
            continue
        assert sturm_count_real_roots(p) == len(descartes_isolate(p))
        done += 1
