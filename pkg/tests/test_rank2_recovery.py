from fractions import Fraction

import mpmath
import pytest

from framecert.exact_arith import as_gauss
from framecert.frame_model import measurement_form
from framecert.rank2_recovery import ShapeError, matrix_from_point, recover_matrices, shape_lemma_solve
from framecert.unipoly import UnivariatePoly, complex_roots

from conftest import cone_system


def _mp(z):
    return mpmath.mpc(mpmath.mpf(z.re.numerator) / z.re.denominator, mpmath.mpf(z.im.numerator) / z.im.denominator)


def test_cone_shape():
    shape = shape_lemma_solve(cone_system(), ("x", "y"))
    assert shape.minimal_polynomial == UnivariatePoly([1, Fraction(-2, 3), 1])
    assert shape.check_rules()
    with mpmath.workprec(200):
        for r in complex_roots(shape.minimal_polynomial, 200):
            point = shape.point(r.value)
            assert point["y"] == 1
            assert abs(point["z"] - (r.value + 1) / 2) < mpmath.mpf(2) ** -150
            for g in shape.reduced.system.generators():
                assert abs(g.evaluate(point)) < mpmath.mpf(2) ** -150


def test_empty_slice_is_reported():
    from framecert.frame_model import HermitianSystem

    system = HermitianSystem.from_json({"variables": ["x", "y"], "nonlinear": ["x^2 + y^2"], "forms": ["x"]})
    with pytest.raises(ShapeError):
        shape_lemma_solve(system, ("x", "y"))


def test_frame_shape_degree(frame_shape):
    assert frame_shape.degree == 20
    assert len(frame_shape.standard_monomials) == 20
    assert frame_shape.denominator == UnivariatePoly([1])


def test_frame_rules_exact(frame_shape):
    assert frame_shape.check_rules()


def test_tampered_rule_is_rejected(frame_shape):
    from dataclasses import replace

    name = next(iter(frame_shape.rules))
    coeffs = list(frame_shape.rules[name].coeffs)
    coeffs[0] += Fraction(1, 10**12)
    rules = dict(frame_shape.rules)
    rules[name] = UnivariatePoly(coeffs)
    assert not replace(frame_shape, rules=rules).check_rules()


def test_minimal_polynomial_matches_certificate(frame_shape, frame_cert):
    f1 = UnivariatePoly.from_polynomial(frame_cert.f, "x34", {"y34": 1})
    assert f1.monic() == frame_shape.minimal_polynomial


def test_twenty_rank_two_matrices(frame_matrices):
    assert len(frame_matrices) == 20
    for M in frame_matrices:
        assert M.rank == 2
        assert M.relative_deviation > 1e-3
        s = M.singular_values
        assert s[2] < mpmath.mpf(2) ** -100 * s[0]
        assert M.residual < mpmath.mpf(2) ** -100


def test_matrix_diagonal_and_chart(frame_matrices):
    for M in frame_matrices:
        for j in range(1, 5):
            assert abs(M.entry(j, j)) < 1e-30
        # the chart fixes y34 = 1
        assert abs(M.entry(3, 4) - M.entry(4, 3) - 2j) < 1e-30
        assert abs(M.entry(3, 4).real - complex(M.root).real) < 1e-30


def test_measurements_vanish(frame, frame_matrices):
    with mpmath.workprec(256):
        for M in frame_matrices:
            A = mpmath.matrix(M.entries)
            for phi in frame.vectors:
                v = mpmath.matrix([_mp(z) for z in phi])
                val = (v.H * A * v)[0]
                assert abs(val) < mpmath.mpf(2) ** -150 * mpmath.mnorm(A, 1) * mpmath.norm(v) ** 2


def test_conjugate_roots_give_conjugate_transposes(frame_matrices):
    by_root = {}
    for M in frame_matrices:
        by_root[complex(M.root)] = M
    for r, M in by_root.items():
        partner = min(by_root, key=lambda s: abs(s - r.conjugate()))
        assert abs(partner - r.conjugate()) < 1e-20
        N = by_root[partner]
        for j in range(1, 5):
            for k in range(1, 5):
                assert abs(N.entry(j, k) - M.entry(k, j).conjugate()) < 1e-20


def test_matrix_from_point_pattern():
    point = {"x11": 1, "x22": 2, "x12": 3, "y12": 4}
    M = matrix_from_point(point, 2)
    assert M[0][1] == mpmath.mpc(3, 4) and M[1][0] == mpmath.mpc(3, -4)
    assert M[0][0] == 1 and M[1][1] == 2


def test_mismatched_certificate_rejected(frame, cone_cert):
    from framecert.frame_model import hermitian_system

    with pytest.raises(ShapeError):
        recover_matrices(hermitian_system(frame), cone_cert, pair=("x34", "y34"))


def test_form_pattern_matches_matrix(frame):
    # phi* M phi computed from the matrix equals the linear measurement form
    point = {n: Fraction(k + 1, 7) for k, n in enumerate(
        ["x11", "x22", "x33", "x44", "x12", "y12", "x13", "y13", "x14", "y14",
         "x23", "y23", "x24", "y24", "x34", "y34"])}
    with mpmath.workprec(128):
        A = mpmath.matrix(matrix_from_point({k: mpmath.mpf(v.numerator) / v.denominator for k, v in point.items()}, 4))
        for phi in frame.vectors[:3]:
            v = mpmath.matrix([_mp(z) for z in phi])
            lhs = (v.H * A * v)[0]
            rhs = _mp(as_gauss(measurement_form(phi).evaluate(point)))
            assert abs(lhs - rhs) < mpmath.mpf(2) ** -100
