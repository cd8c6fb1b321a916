from __future__ import annotations

import random

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from aalkit.cring import RING, ChainBuilder, cr_calculus, eval_int, lift_at, macro_library, normalize
from aalkit.gallery import appendix_chains
from aalkit.hilbert import (
    ChainProof,
    ChainStep,
    Derivation,
    HilbertCalculus,
    Premise,
    Rule,
    RuleApp,
    SearchLimitExceeded,
    Step,
    bounded_prove,
    chain_to_derivation,
    check_chain,
    check_derivation,
    expand_macro,
    format_calculus,
    format_chain,
    format_derivation,
    parse_calculus,
    parse_chain,
    parse_derivation,
)
from aalkit.reductions import LP_SIG, RA_SIG, build_lab, build_lp, iff, imp, relation_algebra_basis
from aalkit.terms import App, Signature, Var, match_term, positions, subterm_at, variables
from conftest import ring_terms, terms_over

x, y = Var("x"), Var("y")
CR = cr_calculus()
LP = build_lp("(+ z (- (+ 1 1)))")


def ring(text):
    from aalkit.terms import parse_term

    return parse_term(text, RING)


def test_axiom_step_is_valid():
    d = Derivation((), (Step(iff(x, x), RuleApp("R", {"x": x}, ())),))
    assert check_derivation(LP, d)


def test_mp_without_its_premise_is_rejected():
    lab = build_lab(x, x, relation_algebra_basis(), RA_SIG)
    d = Derivation((x,), (Step(x, Premise()), Step(y, RuleApp("MP", {"x": x, "y": y}, (0,)))))
    rep = check_derivation(lab, d)
    assert not rep
    assert rep.index == 1


def test_wrong_conclusion_is_reported():
    d = Derivation((), (Step(iff(x, y), RuleApp("R", {"x": x}, ())),))
    rep = check_derivation(LP, d)
    assert not rep
    assert rep.index == 0


def test_appendix_negation_chain_as_derivation():
    (neg_n,) = [c for c in appendix_chains() if c.name == "neg-N"]
    assert neg_n.formulas[0] == ring("(- (+ 0 x))")
    assert neg_n.formulas[-1] == ring("(- x)")
    assert len(neg_n.labels) == 10
    d = chain_to_derivation(CR, neg_n.chain)
    assert check_derivation(CR, d)
    assert d.premises == (neg_n.chain.start,)


def _chain_from(formulas, steps):
    """Fill in substitutions by matching each directed rule against the formulas."""
    out = []
    for (name, direction), a, b in zip(steps, formulas, formulas[1:]):
        r = CR.directed(name, direction)
        s = match_term(r.premises[0], a)
        s = match_term(r.conclusion, b, s)
        assert s is not None, (name, a, b)
        out.append(ChainStep(name, s, direction))
    return ChainProof(tuple(formulas), tuple(out))


def test_commutation_chain_through_guarded_rule():
    fs = [ring(t) for t in ("(* x y)", "(+ 0 (* x y))", "(+ 0 (* 1 (* x y)))", "(+ 0 (* 1 (* y x)))", "(+ 0 (* y x))", "(* y x)")]
    ch = _chain_from(fs, [("N", "rl"), ("O", "rl"), ("B", "lr"), ("O", "lr"), ("N", "lr")])
    assert check_chain(CR, ch)


def test_singleton_chain():
    assert check_chain(CR, ChainProof((ring("(+ x 1)"),)))


def test_bad_chain_step():
    ch = ChainProof((ring("(+ x 0)"), x), (ChainStep("A", {}, "lr"),))
    assert not check_chain(CR, ch)


def test_macro_expansions():
    lib = macro_library()
    a, b = Var("a"), Var("b")
    ch = expand_macro(lib["B'"], {"x": a, "y": b})
    assert (ch.start, ch.end) == (App("*", (a, b)), App("*", (b, a)))
    assert len(ch) == 5 and check_chain(CR, ch)
    ch = expand_macro(lib["E'"], {"x": x, "y": y})
    assert [s.rule for s in ch.steps] == ["N", "O", "E", "O", "N"]
    assert check_chain(CR, ch)


def test_macro_unbound_parameter():
    with pytest.raises(KeyError):
        expand_macro(macro_library()["B'"], {"x": x})


def test_prove_modus_ponens():
    lab = build_lab(x, x, relation_algebra_basis(), RA_SIG)
    d = bounded_prove(lab, [x, imp(x, y)], y, depth=1, size_cap=5)
    assert d is not None and check_derivation(lab, d)
    assert d.steps[-1].justification.rule == "MP"


def test_prove_axiom():
    d = bounded_prove(LP, [], iff(x, x), depth=1, size_cap=5)
    assert d is not None and check_derivation(LP, d)
    assert d.conclusion == iff(x, x)


def test_variable_is_not_a_theorem():
    assert bounded_prove(LP, [], x, depth=3, size_cap=9) is None


def test_bounded_prove_rejects_bad_bounds():
    with pytest.raises(ValueError):
        bounded_prove(LP, [], x, depth=0, size_cap=5)


def test_calculus_file_round_trip():
    for c in (CR, LP):
        again = parse_calculus(format_calculus(c), c.signature)
        assert [str(r) for r in again.rules] == [str(r) for r in c.rules]


def test_calculus_file_syntax():
    c = parse_calculus("mp : x ; (<-> x y) |- y\nsym : (<-> x y) <-> (<-> y x)\n", LP_SIG)
    assert [r.name for r in c.rules] == ["mp", "sym/lr", "sym/rl"]
    assert c.is_single_premise_bidirectional() is False


def test_derivation_and_chain_round_trip():
    (neg_n,) = [c for c in appendix_chains() if c.name == "neg-N"]
    assert parse_chain(format_chain(neg_n.chain), RING) == neg_n.chain
    d = chain_to_derivation(CR, neg_n.chain)
    assert parse_derivation(format_derivation(d), RING) == d


def test_duplicate_rule_names_rejected():
    r = Rule("a", (), x)
    with pytest.raises(ValueError):
        HilbertCalculus(RING, (r, r))


# -- properties -----------------------------------------------------------------------


def _random_walk(t, rng: random.Random, steps: int) -> ChainProof:
    """Apply random CR rules at random positions, each step lifted to the whole term."""
    ch = ChainProof((t,))
    for _ in range(steps):
        cur = ch.end
        path, sub = rng.choice(list(positions(cur)))
        options = []
        for r in CR.rules:
            s = match_term(r.premises[0], sub)
            if s is not None:
                options.append((r, s))
        r, s = rng.choice(options)
        extra = {v: rng.choice([x, App("1"), y]) for v in variables(r.conclusion) if v not in s}
        b = ChainBuilder(sub).rule(r.scheme, r.direction, **s, **extra)
        ch = ch.then(lift_at(b.result(), cur, path))
    return ch


@settings(max_examples=25, suppress_health_check=[HealthCheck.too_slow])
@given(ring_terms(6), st.integers(0, 2**32), st.integers(1, 3))
def test_chains_are_sound_mod_m(t, seed, steps):
    rng = random.Random(seed)
    ch = _random_walk(t, rng, steps)
    assert check_chain(CR, ch)
    for m in (2, 3, 4, 5):
        env = {v: rng.randrange(m) for v in "xyz"}
        assert eval_int(ch.start, env) % m == eval_int(ch.end, env) % m
    assert normalize(ch.start) == normalize(ch.end)


@pytest.mark.parametrize("name", sorted(macro_library()))
def test_macros_expand_to_valid_chains(name):
    m = macro_library()[name]
    rng = random.Random(name)
    pool = [ring(t) for t in ("x", "0", "(+ x 1)", "(* y (- z))", "(- (+ 1 1))", "(* (+ x y) z)")]
    for _ in range(20):
        s = {p: rng.choice(pool) for p in m.params}
        for direction in ("lr", "rl"):
            assert check_chain(CR, expand_macro(m, s, direction))


FUZZ_SIG = Signature("fuzz", {"f": 1, "g": 2, "c": 0})


@st.composite
def small_calculi(draw):
    rules = []
    for k in range(draw(st.integers(1, 3))):
        prem = draw(st.lists(terms_over(FUZZ_SIG, ("x", "y"), 3), max_size=2))
        concl = draw(terms_over(FUZZ_SIG, ("x", "y"), 4))
        rules.append(Rule(f"r{k}", tuple(prem), concl))
    return HilbertCalculus(FUZZ_SIG, tuple(rules))


@settings(max_examples=40, suppress_health_check=[HealthCheck.too_slow])
@given(small_calculi(), st.lists(terms_over(FUZZ_SIG, ("a", "b"), 3), max_size=2), terms_over(FUZZ_SIG, ("a", "b"), 4))
def test_found_derivations_check(c, premises, goal):
    try:
        d = bounded_prove(c, premises, goal, depth=2, size_cap=7, max_formulas=400)
    except SearchLimitExceeded:
        return
    if d is not None:
        assert check_derivation(c, d)
        assert d.conclusion == goal


def test_subterm_positions_cover_term():
    t = ring("(* (+ x 1) (- y))")
    assert {subterm_at(t, p) for p, _ in positions(t)} == {s for _, s in positions(t)}
