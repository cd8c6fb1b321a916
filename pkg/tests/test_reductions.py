from __future__ import annotations

import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aalkit.cring import RING, encode_int
from aalkit.finalg import evaluate
from aalkit.hilbert import Rule, check_derivation
from aalkit.reductions import (
    LP_SIG,
    RA_SIG,
    BasisFailure,
    InsufficientEvidence,
    NotASolution,
    OneStepEvidence,
    RootFound,
    boolean_expansion,
    box,
    build_countermodel,
    build_frege_consistency_model,
    build_lab,
    build_lp,
    check_algebraizability_witness,
    derive_phi_theorems,
    iff,
    imp,
    lab_witness,
    lp_consistency_model,
    make_algebraizability_witness,
    parse_basis,
    phi_formulas,
    relation_algebra_basis,
    zmod_algebra,
)
from aalkit.terms import App, Equation, TermError, Var, apply_substitution, parse_term, variables

x, y, z = Var("x"), Var("y"), Var("z")
P2 = "(+ z (- (+ 1 1)))"
BASIS = relation_algebra_basis()


def ra(text):
    return parse_term(text, RA_SIG)


# -- L(p) -----------------------------------------------------------------------------


def test_lp_contains_modus_ponens_variant():
    c = build_lp(P2)
    p0 = iff(parse_term(P2, RING), App("0"))
    assert c["MP'"].premises == (p0, x, iff(x, y))
    assert c["MP'"].conclusion == y


def test_lp_contains_guarded_associativity_axiom():
    c = build_lp(P2)
    lhs = parse_term("(+ w (* u (* (* x y) z)))", RING)
    rhs = parse_term("(+ w (* u (* x (* y z))))", RING)
    assert Rule("CR.A/lr", (), iff(lhs, rhs)) == dataclasses.replace(c["CR.A/lr"], scheme=None, direction=None)


def test_lp_rejects_reserved_variables():
    with pytest.raises(TermError):
        build_lp("(+ x 1)")


def test_lp_rule_count_and_symbols():
    c = build_lp(P2)
    assert len(c) == 39
    assert sum(r.name.startswith("CR.") for r in c.rules) == 26
    assert c.signature == LP_SIG


def test_witness_for_solution():
    w = make_algebraizability_witness(P2, (2,))
    assert w.theorem.conclusion == iff(parse_term("(+ (+ 1 1) (- (+ 1 1)))", RING), App("0"))
    assert not w.theorem.premises
    assert check_algebraizability_witness(build_lp(P2), w)


def test_witness_for_trivial_polynomial():
    w = make_algebraizability_witness("z", (0,))
    assert w.theorem.conclusion == iff(App("0"), App("0"))
    assert [s.justification.rule for s in w.theorem.steps] == ["R"]


def test_non_solution_rejected():
    with pytest.raises(NotASolution):
        make_algebraizability_witness("1", (0,))
    with pytest.raises(NotASolution):
        make_algebraizability_witness(P2, (3,))


def test_witness_without_g_fails():
    c = build_lp(P2)
    w = make_algebraizability_witness(P2, (2,))
    ders = {k: v for k, v in w.derivations.items() if k != "G"}
    rep = check_algebraizability_witness(c, dataclasses.replace(w, derivations=ders))
    assert not rep
    assert rep.failed() == ["G"]


def test_witness_two_variables():
    p = "(+ (* z w) (- (+ 1 1)))"
    w = make_algebraizability_witness(p, (1, 2))
    assert check_algebraizability_witness(build_lp(p), w)


def test_countermodel_mod_4():
    rep = build_countermodel("(+ (* (+ 1 1) z) 1)", 4, 1, 0, 2)
    assert rep.ok
    assert [m.filter for m in rep.matrices] == [{1}, {1, 2}]
    assert all(c.is_identity() for c in rep.leibniz)
    assert rep.leibniz_bruteforce is not None
    assert "no claim" in rep.scope


def test_countermodel_needs_root_free_modulus():
    with pytest.raises(RootFound):
        build_countermodel("(+ (* (+ 1 1) z) 1)", 3, 1, 0, 2)
    with pytest.raises(ValueError):
        build_countermodel("(+ (* (+ 1 1) z) 1)", 4, 1, 1, 2)


def test_iff_separates_elements():
    # q(z) = a <-> z is s at a and m_val elsewhere
    a = zmod_algebra(5, 1, 0)
    for u in range(5):
        for v in range(5):
            assert a.op("<->", u, v) == (1 if u == v else 0)


def test_consistency_model_of_lp():
    for p in (P2, "(+ (* z z) 1)", "z"):
        mt, chk = lp_consistency_model(p)
        assert chk
        assert len(mt.filter) < mt.algebra.size


# -- L(alpha, beta) ----------------------------------------------------------------------


def test_lab_contains_box_rules_and_w():
    c = build_lab(x, x, BASIS, RA_SIG)
    assert c["A3/lr1"].premises == (x,) and c["A3/lr1"].conclusion == imp(box(x), x)
    assert c["A3/lr2"].conclusion == imp(x, box(x))
    phi1 = imp(x, imp(y, x))
    assert c["W.phi1"].premises == (imp(phi1, phi1),)
    assert c["W.phi1"].conclusion == phi1


def test_lab_has_two_axioms_per_basis_equation():
    c = build_lab(x, x, BASIS, RA_SIG)
    assert sum(r.name.startswith("V.") for r in c.rules) == 2 * len(BASIS)


def test_lab_rejects_two_variable_equation():
    with pytest.raises(ValueError):
        build_lab(ra("(and x y)"), x, BASIS, RA_SIG)


@pytest.mark.parametrize("alpha,beta", [("x", "x"), ("(conv (conv x))", "x"), ("(conv x)", "x"), ("(and x (not x))", "(not 1)")])
def test_lab_witness(alpha, beta):
    c = build_lab(ra(alpha), ra(beta), BASIS, RA_SIG)
    w = lab_witness(c)
    assert w.tau == (Equation(x, box(x)),)
    rep = check_algebraizability_witness(c, w)
    assert rep, rep.format()


def test_frege_model():
    fm = build_frege_consistency_model(BASIS)
    assert fm.ok, fm.format()
    assert sorted(fm.checklist) == ["MP", "V", "phi1", "phi2", "phi3", "phi4", "phi5", "phi6"]
    assert fm.matrix.filter == {1}


def test_phi2_truth_table():
    b = boolean_expansion()
    phi2 = phi_formulas(b.signature)["phi2"]
    assert all(evaluate(b, phi2, {"x": i, "y": j, "z": k}) == 1 for i in (0, 1) for j in (0, 1) for k in (0, 1))


def test_box_implication_is_identity():
    b = boolean_expansion()
    assert [evaluate(b, imp(box(x), x), {"x": v}) for v in (0, 1)] == [0, 1]


def test_frege_model_rejects_bad_basis():
    bad = parse_basis("oops : (conv x) = (not x)\n", RA_SIG)
    with pytest.raises(BasisFailure):
        build_frege_consistency_model(bad)


def test_parse_basis_errors():
    with pytest.raises(ValueError):
        parse_basis("no separator here\n", RA_SIG)
    with pytest.raises(ValueError):
        parse_basis("a : x = x\na : x = x\n", RA_SIG)


def test_phi_theorems_identity():
    c = build_lab(x, x, BASIS, RA_SIG)
    ders = derive_phi_theorems(c, x, x)
    assert len(ders) == sum(r.name.startswith("W.") for r in c.rules)
    assert all(check_derivation(c, d) and not d.premises for d in ders)


def test_phi_theorems_one_step():
    basis = {"idem": Equation(ra("(and x x)"), x)}
    c = build_lab(ra("(and x x)"), x, basis, RA_SIG)
    ders = derive_phi_theorems(c, ra("(and x x)"), x, OneStepEvidence(basis["idem"], {}))
    assert all(check_derivation(c, d) for d in ders)
    assert {d.conclusion for d in ders} == {r.conclusion for r in c.rules if r.name.startswith("W.")}


def test_phi_theorems_nested_and_reversed():
    alpha, beta = ra("(not (conv (conv x)))"), ra("(not x)")
    c = build_lab(alpha, beta, BASIS, RA_SIG)
    assert all(check_derivation(c, d) for d in derive_phi_theorems(c, alpha, beta, OneStepEvidence(BASIS["conv-conv"], {}, (0,))))
    c = build_lab(beta, alpha, BASIS, RA_SIG)
    ev = OneStepEvidence(BASIS["conv-conv"], {}, (0,), reverse=True)
    assert all(check_derivation(c, d) for d in derive_phi_theorems(c, beta, alpha, ev))


def test_phi_theorems_need_evidence():
    alpha, beta = ra("(conv (conv (conv (conv x))))"), x
    c = build_lab(alpha, beta, BASIS, RA_SIG)
    with pytest.raises(InsufficientEvidence):
        derive_phi_theorems(c, alpha, beta)
    steps = [OneStepEvidence(BASIS["conv-conv"], {}, ()), OneStepEvidence(BASIS["conv-conv"], {}, ())]
    with pytest.raises(InsufficientEvidence):
        derive_phi_theorems(c, alpha, beta, steps)
    with pytest.raises(InsufficientEvidence):
        derive_phi_theorems(c, alpha, beta, OneStepEvidence(BASIS["unit-mul"], {}, ()))


# -- properties -------------------------------------------------------------------------


@st.composite
def polynomials(draw):
    k = draw(st.integers(-4, 4))
    a = draw(st.integers(1, 3))
    # a*z + k, with a root exactly when a divides -k
    return App("+", (App("*", (encode_int(a), z)), encode_int(k))), a, k


@settings(max_examples=12, deadline=None)
@given(polynomials())
def test_dichotomy(pak):
    p, a, k = pak
    c = build_lp(p)
    for r in c.rules:
        for t in (*r.premises, r.conclusion):
            c.signature.check(t)
    if k % a == 0:
        w = make_algebraizability_witness(p, (-k // a,))
        assert check_algebraizability_witness(c, w)
    else:
        # 2z + odd has no root mod 4, 3z + k has none mod 3
        m = 4 if a == 2 else 3
        assert build_countermodel(p, m, 1, 0, 2).ok
    mt, chk = lp_consistency_model(p)
    assert chk and len(mt.filter) < mt.algebra.size


@settings(max_examples=8, deadline=None)
@given(st.sampled_from(sorted(BASIS)), st.booleans())
def test_lab_witness_for_basis_equations(name, flip):
    e = BASIS[name]
    # make it one-variable by identifying all variables with x
    one = {v: x for v in variables(e.lhs, e.rhs)}
    alpha, beta = apply_substitution(e.lhs, one), apply_substitution(e.rhs, one)
    if flip:
        alpha, beta = beta, alpha
    c = build_lab(alpha, beta, BASIS, RA_SIG)
    assert check_algebraizability_witness(c, lab_witness(c))
