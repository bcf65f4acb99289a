import random

import pytest
from hypothesis import given, settings, strategies as st

from framecert.exact_arith import GaussRational
from framecert.groebner import (
    CofactorRepresentation,
    ResourceLimitExceeded,
    buchberger,
    elimination_ideal,
    ideal_contains_one,
    is_groebner_basis,
    normal_form,
)
from framecert.multipoly import Polynomial, TermOrder, VariableTable, integer_primitive_part, leading_term

T = VariableTable(["x", "y", "z"])


def P(text):
    return Polynomial.parse(text, T)


M = P("z^2 - x^2 - y^2")
L = P("x + y - 2*z")


def test_normal_form_examples():
    rem, rep = normal_form(P("x^2"), [P("x")], TermOrder.lex(), track=True)
    assert not rem and rep.multipliers == [P("x")]
    rem, _ = normal_form(P("x^2 + y"), [P("x")], TermOrder.lex())
    assert rem == P("y")


def test_cone_identity_recovered_from_tracked_division():
    # {m, l} is not a Groebner basis, so divide by the tracked basis and map back
    f = P("-4") * M - P("x + y + 2*z") * L
    assert f == P("3*x^2 - 2*x*y + 3*y^2")
    for order in (TermOrder.lex(), TermOrder.grevlex(), TermOrder.block(["z"])):
        gb = buchberger([M, L], order, track=True)
        rem, rep = normal_form(f, gb.generators, order, track=True)
        assert not rem
        mults = [T.const(0), T.const(0)]
        for q, cof in zip(rep.multipliers, gb.cofactors):
            for k in range(2):
                mults[k] = mults[k] + q * cof.multipliers[k]
        assert mults == [P("-4"), P("-x - y - 2*z")]


def test_block_basis_contains_planar_eliminant():
    gb = buchberger([M, L], TermOrder.block(["z"]))
    free = [g for g in gb if g.degree_in("z") == 0]
    assert any(integer_primitive_part(g) == P("3*x^2 - 2*x*y + 3*y^2") for g in free)


def test_trivial_bases():
    assert set(buchberger([P("x"), P("y")]).generators) == {P("x"), P("y")}
    gb = buchberger([P("x - 1"), P("x")])
    assert gb.is_unit()


def test_tracked_cofactors_reexpand():
    gb = buchberger([M, L, P("y")], TermOrder.grevlex(), track=True)
    for g, rep in zip(gb.generators, gb.cofactors):
        assert rep.target == g and rep.verify()


def test_elimination_examples():
    elim = elimination_ideal([M, L], ["x", "y"], track=True)
    assert elim.is_principal
    assert integer_primitive_part(elim.generators[0]) == P("3*x^2 - 2*x*y + 3*y^2")
    assert elim.cofactors[0].verify()
    assert elimination_ideal([P("x - y")], ["x"]).generators == []


def test_ideal_contains_one_examples():
    ok, rep = ideal_contains_one([P("y"), P("x - 1"), L, M])
    assert ok and rep.target == T.const(1) and rep.verify()
    ok, _ = ideal_contains_one([P("y"), P("z - 1"), L, M])
    assert ok
    ok, rep = ideal_contains_one([P("x")])
    assert not ok and rep is None


def test_term_ceiling_aborts():
    gens = [P("x^3 - y*z + 1"), P("y^3 - x*z + 2"), P("z^3 - x*y + 3")]
    with pytest.raises(ResourceLimitExceeded):
        buchberger(gens, TermOrder.lex(), max_terms=20)


def test_gaussian_coefficients():
    gb = buchberger([P("x^2 + 1"), P("x - i")], TermOrder.lex())
    assert gb.generators == [P("x - i")]


def test_basis_json():
    gb = buchberger([M, L], TermOrder.grevlex(), track=True)
    data = gb.to_json()
    assert data["order"] == "grevlex" and len(data["generators"]) == len(gb)
    rep = CofactorRepresentation.from_json(data["cofactors"][0], [M, L], T)
    assert rep.verify()


# --- properties -----------------------------------------------------------

coef = st.integers(-3, 3)
# total degree <= 2 keeps every random example to a few milliseconds
mono = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)).filter(lambda e: sum(e) <= 2)
poly = st.dictionaries(mono, coef.filter(bool), min_size=1, max_size=4).map(
    lambda d: Polynomial(T, {e: GaussRational(c) for e, c in d.items()}))
systems = st.lists(poly, min_size=1, max_size=3)
orders = st.sampled_from([TermOrder.grevlex(), TermOrder.lex(), TermOrder.block(["x"])])


@settings(max_examples=40, deadline=None)
@given(systems, orders)
def test_bases_pass_the_s_polynomial_recheck(gens, order):
    gb = buchberger(gens, order)
    assert is_groebner_basis(gb.generators, order)
    for g in gb:
        _, lc = leading_term(g, order)
        assert lc == GaussRational(1)
    for g in gens:
        assert not gb.reduce(g)


@settings(max_examples=40, deadline=None)
@given(systems, orders, st.randoms(use_true_random=False))
def test_reduced_basis_is_unique_under_shuffling(gens, order, rnd):
    a = buchberger(gens, order).generators
    shuffled = list(gens)
    rnd.shuffle(shuffled)
    shuffled = [g * GaussRational(rnd.choice([1, -2, 3])) for g in shuffled]
    assert buchberger(shuffled, order).generators == a


@settings(max_examples=30, deadline=None)
@given(systems)
def test_tracked_identities(gens):
    gb = buchberger(gens, TermOrder.grevlex(), track=True)
    for g, rep in zip(gb.generators, gb.cofactors):
        assert rep.generators == list(gens) or len(rep.generators) == len(gens)
        assert rep.expand() == g


@settings(max_examples=30, deadline=None)
@given(systems)
def test_elimination_output_is_free_of_eliminated_variables(gens):
    elim = elimination_ideal(gens, ["y", "z"])
    for g in elim.generators:
        assert g.degree_in("x") == 0


def test_is_groebner_basis_detects_non_bases():
    assert not is_groebner_basis([P("x^2 - y"), P("x*y - 1")], TermOrder.lex())
