from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aalkit.finalg import (
    Congruence,
    FiniteAlgebra,
    GuardExceeded,
    LogicalMatrix,
    all_congruences,
    enumerate_filters,
    evaluate,
    format_algebra,
    generate_filter,
    in_alg_l,
    is_model,
    largest_compatible_congruence_bruteforce,
    leibniz_congruence,
    parse_algebra,
    parse_matrix,
    suszko_congruence,
    unary_polynomials,
    validates_equation,
)
from aalkit.gallery import cm_rules, magma_algebra, semilattice_calculus, z3_algebra
from aalkit.hilbert import HilbertCalculus, Rule
from aalkit.reductions import boolean_expansion
from aalkit.terms import App, Equation, Signature, Var, parse_term

x, y = Var("x"), Var("y")
Z3 = z3_algebra()
S = semilattice_calculus()
M5 = magma_algebra(5)


def test_evaluate_examples():
    assert evaluate(Z3, App("and", (x, y)), {"x": 1, "y": 2}) == 0
    assert evaluate(M5, App("*", (x, y)), {"x": 1, "y": 2}) == 2
    assert evaluate(M5, App("*", (x, y)), {"x": 5, "y": 0}) == 0


def test_validates_equation_examples():
    b = boolean_expansion()
    assert validates_equation(b, Equation(App("and", (x, x)), x))
    assert not validates_equation(M5, Equation(App("*", (x, y)), App("*", (y, x))))
    assert validates_equation(M5, Equation(x, x))


def test_unary_polynomials_of_z3():
    # identity, the two shifts and the three constants
    assert unary_polynomials(Z3) == {(0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 0, 0), (1, 1, 1), (2, 2, 2)}


def test_unary_polynomials_small_cases():
    one = FiniteAlgebra(Signature("s", {"f": 1}), 1, {"f": np.array([0])})
    assert unary_polynomials(one) == {(0,)}
    bare = FiniteAlgebra(Signature("none", {}), 3, {})
    assert unary_polynomials(bare) == {(0, 1, 2), (0, 0, 0), (1, 1, 1), (2, 2, 2)}


def test_leibniz_examples():
    assert leibniz_congruence(LogicalMatrix(Z3, frozenset({1, 2}))).is_identity()
    assert leibniz_congruence(LogicalMatrix(Z3, frozenset({0, 1, 2}))).is_total()
    assert leibniz_congruence(LogicalMatrix(M5, frozenset({0}))).is_identity()


def test_congruences_of_z3():
    cons = all_congruences(Z3)
    assert sorted(c.rep for c in cons) == [(0, 0, 0), (0, 1, 2)]
    assert largest_compatible_congruence_bruteforce(LogicalMatrix(Z3, frozenset({1, 2}))).is_identity()
    assert largest_compatible_congruence_bruteforce(LogicalMatrix(Z3, frozenset({0, 1, 2}))).is_total()


def test_model_checks():
    assert is_model(S, LogicalMatrix(Z3, frozenset({1, 2})))
    assert is_model(cm_rules(5), LogicalMatrix(M5, frozenset({0})))
    chk = is_model(HilbertCalculus(boolean_expansion().signature, (Rule("ax", (), x),)), LogicalMatrix(boolean_expansion(), frozenset({1})))
    assert not chk
    assert chk.assignment == {"x": 0}


def test_generate_filter():
    assert generate_filter(S, Z3, {1}) == {1, 2}
    assert generate_filter(S, Z3, {0}) == {0}
    assert generate_filter(S, Z3, {0, 1, 2}) == {0, 1, 2}


def test_enumerate_filters():
    assert enumerate_filters(S, Z3) == [frozenset(), frozenset({0}), frozenset({1, 2}), frozenset({0, 1, 2})]
    ax = HilbertCalculus(Z3.signature, (Rule("ax", (), x),))
    assert enumerate_filters(ax, Z3) == [frozenset({0, 1, 2})]
    empty = HilbertCalculus(Z3.signature, ())
    assert len(enumerate_filters(empty, Z3)) == 8


def test_suszko():
    assert suszko_congruence(S, Z3, {1, 2}).is_identity()
    assert suszko_congruence(S, Z3, {0, 1, 2}).is_total()


def test_alg_l():
    assert in_alg_l(S, Z3)
    one = FiniteAlgebra(Signature("s", {"and": 2}), 1, {"and": np.zeros((1, 1), dtype=int)})
    assert in_alg_l(S, one)
    sig = Signature("c", {"f": 2})
    two = FiniteAlgebra(sig, 2, {"f": np.zeros((2, 2), dtype=int)})
    assert not in_alg_l(HilbertCalculus(sig, (Rule("ax", (), x),)), two)


def test_guard():
    big = FiniteAlgebra(Signature("s", {}), 9, {})
    with pytest.raises(GuardExceeded):
        enumerate_filters(HilbertCalculus(big.signature, ()), big)


def test_congruence_must_be_compatible():
    with pytest.raises(ValueError):
        Congruence(Z3, [0, 0, 1])


def test_algebra_file_round_trip(tmp_path):
    text = format_algebra(M5)
    again = parse_algebra(text)
    assert all(np.array_equal(again.tables[s], M5.tables[s]) for s in M5.tables)
    (tmp_path / "z3.alg").write_text(format_algebra(Z3))
    m = parse_matrix("algebra z3.alg\nfilter 1 2\n", tmp_path)
    assert m.filter == {1, 2} and m.algebra.size == 3


def test_parse_algebra_errors():
    with pytest.raises(ValueError):
        parse_algebra("op f 1 0")
    with pytest.raises(ValueError):
        parse_algebra("carrier 2\nop f 2 0 1 1")


# -- properties -----------------------------------------------------------------------


@st.composite
def small_matrices(draw):
    n = draw(st.integers(1, 4))
    ar = draw(st.sampled_from([1, 2]))
    sig = Signature("r", {"*": 2, "f": ar})
    cells = lambda k: st.lists(st.integers(0, n - 1), min_size=n**k, max_size=n**k)
    mul = np.array(draw(cells(2))).reshape(n, n)
    f = np.array(draw(cells(ar))).reshape((n,) * ar)
    filt = draw(st.sets(st.integers(0, n - 1)))
    return LogicalMatrix(FiniteAlgebra(sig, n, {"*": mul, "f": f}), frozenset(filt))


@given(small_matrices())
def test_leibniz_matches_bruteforce(m):
    lc = leibniz_congruence(m)
    assert lc == largest_compatible_congruence_bruteforce(m)
    assert lc.compatible_with(m.filter)
    # constructing it again with the compatibility check must succeed
    Congruence(m.algebra, lc.rep)


@given(small_matrices(), st.sets(st.integers(0, 3)))
def test_generated_filter_is_least(m, seed):
    a = m.algebra
    seed = {s for s in seed if s < a.size}
    f = generate_filter(S_STAR, a, seed)
    assert f >= seed
    assert generate_filter(S_STAR, a, f) == f
    assert f == min((g for g in enumerate_filters(S_STAR, a) if g >= seed), key=len)


# a small calculus over the random signature
S_STAR = HilbertCalculus(
    Signature("r", {"*": 2, "f": 1}),
    (Rule("mp", (x, App("*", (x, y))), y), Rule("sym", (App("*", (x, y)),), App("*", (y, x)))),
)


@given(small_matrices())
def test_reduced_model_algebra_is_in_alg_l(m):
    if m.algebra.signature.arity("f") != 1:
        return
    if is_model(S_STAR, m) and leibniz_congruence(m).is_identity():
        assert in_alg_l(S_STAR, m.algebra)


def test_exhaustive_two_element_suite():
    sig = Signature("b", {"*": 2})
    for vals in itertools.product(range(2), repeat=4):
        a = FiniteAlgebra(sig, 2, {"*": np.array(vals).reshape(2, 2)})
        for r in range(3):
            for f in itertools.combinations(range(2), r):
                m = LogicalMatrix(a, frozenset(f))
                assert leibniz_congruence(m) == largest_compatible_congruence_bruteforce(m)


def test_parse_term_over_algebra_signature():
    t = parse_term("(* (* x z) y)", M5.signature)
    assert evaluate(M5, t, {"x": 3, "y": 4, "z": 0}) == M5.op("*", M5.op("*", 3, 0), 4)
