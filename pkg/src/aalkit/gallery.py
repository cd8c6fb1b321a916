"""Worked examples packaged with their expected results.

Each suite returns an :class:`ExampleBundle`: a set of text files in the
standard formats plus a manifest whose entries are recomputed every time the
suite is built.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .cring import (
    GUARDED,
    ONE,
    RING,
    ZERO,
    ChainBuilder,
    add,
    cm_equal,
    cr_calculus,
    cr_valid,
    grid_equal,
    lift_at,
    lv_entails,
    macro_library,
    mul,
    neg,
    normalize,
)
from .finalg import (
    FiniteAlgebra,
    LogicalMatrix,
    all_congruences,
    format_algebra,
    format_matrix,
    in_alg_l,
    is_model,
    largest_compatible_congruence_bruteforce,
    leibniz_congruence,
    unary_polynomials,
    validates_equation,
)
from .hilbert import (
    ChainProof,
    HilbertCalculus,
    bounded_prove,
    check_chain,
    check_derivation,
    expand_macro,
    format_calculus,
    format_chain,
    format_derivation,
)
from .reductions import (
    RA_SIG,
    OneStepEvidence,
    build_countermodel,
    build_frege_consistency_model,
    build_lab,
    build_lp,
    check_algebraizability_witness,
    derive_phi_theorems,
    lab_witness,
    lp_consistency_model,
    make_algebraizability_witness,
    relation_algebra_basis,
)
from .terms import (
    App,
    Equation,
    Signature,
    Term,
    Var,
    depth,
    format_term,
    parse_term,
    positions,
    replace_at,
    subterm_at,
    subterms,
    variables,
)

__all__ = [
    "ManifestEntry",
    "ExampleBundle",
    "SEMILATTICE",
    "MAGMA",
    "semilattice_calculus",
    "z3_algebra",
    "semilattice_suite",
    "magma_algebra",
    "MagmaSeparation",
    "magma_separating_polynomial",
    "cm_rules",
    "cm_rule_suite",
    "AppendixChain",
    "appendix_chains",
    "APPENDIX_DISPLAYS",
    "appendix_scripts",
    "relation_algebra_suite",
    "random_ring_term",
    "random_ring_pair",
    "ring_oracle_suite",
    "random_algebra",
    "leibniz_oracle_suite",
    "CuratedPolynomial",
    "CURATED_POLYNOMIALS",
    "CURATED_EQUATIONS",
    "lp_suite",
    "lab_suite",
    "consistency_suite",
    "SUITES",
]

# where an expected value comes from: the source text, a computation, or plain inspection
REFERENCE, COMPUTED, DIRECT = "reference", "computed", "direct"


@dataclass(frozen=True)
class ManifestEntry:
    check: str
    expected: str
    observed: str
    tag: str

    @property
    def ok(self) -> bool:
        return self.expected == self.observed

    def line(self) -> str:
        return f"{self.check} {self.expected} {self.tag}"


@dataclass
class ExampleBundle:
    name: str
    files: dict[str, str] = field(default_factory=dict)
    manifest: list[ManifestEntry] = field(default_factory=list)

    def expect(self, check: str, expected, observed, tag: str) -> None:
        self.manifest.append(ManifestEntry(check, _show(expected), _show(observed), tag))

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.manifest)

    def failures(self) -> list[ManifestEntry]:
        return [e for e in self.manifest if not e.ok]

    def write(self, directory) -> Path:
        out = Path(directory) / self.name
        out.mkdir(parents=True, exist_ok=True)
        for fname, text in self.files.items():
            (out / fname).write_text(text)
        (out / "manifest").write_text("".join(e.line() + "\n" for e in self.manifest))
        return out

    def report(self) -> str:
        return "".join(
            f"{'PASS' if e.ok else 'FAIL'} {e.check}: expected {e.expected}, observed {e.observed} ({e.tag})\n"
            for e in self.manifest
        )


def _show(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v).replace(" ", "")


# -- the semilattice digression -------------------------------------------------------

SEMILATTICE = Signature("semilattice", {"and": 2})
x, y, z, u, w = (Var(v) for v in "xyzuw")


def _meet(a: Term, b: Term) -> App:
    return App("and", (a, b))


def semilattice_calculus(extended: bool = False) -> HilbertCalculus:
    items = [
        ("idem", [x], [_meet(x, x)]),
        ("comm", [_meet(x, y)], [_meet(y, x)]),
        ("assoc", [_meet(x, _meet(y, z))], [_meet(_meet(x, y), z)]),
    ]
    if extended:
        items += [
            ("idem-u", [_meet(u, x)], [_meet(u, _meet(x, x))]),
            ("comm-u", [_meet(u, _meet(x, y))], [_meet(u, _meet(y, x))]),
            ("assoc-u", [_meet(u, _meet(x, _meet(y, z)))], [_meet(u, _meet(_meet(x, y), z))]),
        ]
    return HilbertCalculus.build(SEMILATTICE, items)


def z3_algebra() -> FiniteAlgebra:
    """Integers mod 3 under addition, read as a meet-semilattice signature."""
    return FiniteAlgebra.from_functions(SEMILATTICE, 3, {"and": lambda a, b: (a + b) % 3})


def semilattice_suite() -> ExampleBundle:
    b = ExampleBundle("semilattice")
    s, ext, a = semilattice_calculus(), semilattice_calculus(True), z3_algebra()
    m = LogicalMatrix(a, frozenset({1, 2}))
    b.files["S.calc"] = format_calculus(s)
    b.files["S-extended.calc"] = format_calculus(ext)
    b.files["z3.alg"] = format_algebra(a)
    b.files["z3.matrix"] = format_matrix(m, "z3.alg")
    b.expect("S.model", True, bool(is_model(s, m)), REFERENCE)
    b.expect("S.leibniz-identity", True, leibniz_congruence(m).is_identity(), REFERENCE)
    b.expect("z3.idempotent", False, validates_equation(a, Equation(_meet(x, x), x)), COMPUTED)
    b.expect("S.alg-contains-z3", True, in_alg_l(s, a), REFERENCE)
    b.expect("S-extended.model", False, bool(is_model(ext, m)), COMPUTED)
    return b


# -- commutative magmas ------------------------------------------------------------------

MAGMA = Signature("magma", {"*": 2})


def magma_algebra(n: int) -> FiniteAlgebra:
    """Carrier 0..n; commutative except that 1*2 = 2 and 2*1 = 1."""
    if n < 2:
        raise ValueError("n must be at least 2")

    def case(a, b):
        if b == 0:
            return a if a != n else 0
        if a >= 3 and b == a - 1:
            return a
        if a >= 3 and b == a - 2:
            return a - 1
        return None

    def op(a, b):
        if (a, b) == (1, 2):
            return 2
        if (a, b) == (2, 1):
            return 1
        v = case(a, b)
        if v is None:
            v = case(b, a)
        return 1 if v is None else v

    return FiniteAlgebra.from_functions(MAGMA, n + 1, {"*": op})


@dataclass(frozen=True)
class MagmaSeparation:
    n: int
    a: int
    b: int
    factors: tuple  # carrier elements, with "x" marking the argument
    p_a: int
    p_b: int
    predicted: int | None  # value of p(a) by the case analysis of the example

    def describe(self) -> str:
        body = str(self.factors[0])
        for f in self.factors[1:]:
            body = f"({body} * {f})"
        return f"p(x) = {body}"


def _predicted(n: int, a: int, b: int) -> int:
    if b - 1 < 3:
        return n - 1 if (a, b) == (1, 2) else 1
    return n - 1 if a == b - 2 else 1


def magma_separating_polynomial(n: int, a: int, b: int) -> MagmaSeparation:
    """Left-nested product of 1..n and 0 with ``x`` in place of ``b``."""
    if not 0 < a < b <= n:
        raise ValueError(f"need 0 < a < b <= n, got a={a}, b={b}, n={n}")
    alg = magma_algebra(n)
    factors = (*range(1, b), "x", *range(b + 1, n + 1), 0)

    def p(v):
        vals = [v if f == "x" else f for f in factors]
        acc = vals[0]
        for f in vals[1:]:
            acc = alg.op("*", acc, f)
        return acc

    sep = MagmaSeparation(n, a, b, factors, p(a), p(b), _predicted(n, a, b))
    if sep.p_b != 0 or sep.p_a == 0:
        raise AssertionError(f"{sep.describe()} does not separate {a} from {b}")
    return sep


def _trees(leaves: list[Term]):
    if len(leaves) == 1:
        yield leaves[0]
        return
    for k in range(1, len(leaves)):
        for left in _trees(leaves[:k]):
            for right in _trees(leaves[k:]):
                yield App("*", (left, right))


def _swaps(t: Term):
    if isinstance(t, Var):
        return
    l, r = t.args
    yield App("*", (r, l))
    for s in _swaps(l):
        yield App("*", (s, r))
    for s in _swaps(r):
        yield App("*", (l, s))


def cm_rules(n: int) -> HilbertCalculus:
    """Commutativity instances ``t -||- t'`` for every bracketing of up to ``n`` variables."""
    items = []
    for k in range(2, n + 1):
        leaves = [Var(f"x{i}") for i in range(1, k + 1)]
        for t in _trees(leaves):
            for s in _swaps(t):
                items.append((f"cm{len(items) + 1}", [t], [s]))
    return HilbertCalculus.build(MAGMA, items)


def cm_rule_suite(n: int = 5) -> ExampleBundle:
    if n < 2:
        raise ValueError("n must be at least 2")
    b = ExampleBundle(f"magma{n}")
    a = magma_algebra(n)
    m = LogicalMatrix(a, frozenset({0}))
    rules = cm_rules(n)
    b.files["magma.alg"] = format_algebra(a)
    b.files["magma.matrix"] = format_matrix(m, "magma.alg")
    b.files["cm.calc"] = format_calculus(rules)
    comm = Equation(App("*", (x, y)), App("*", (y, x)))
    b.expect("magma.1*2", 2, a.op("*", 1, 2), REFERENCE)
    b.expect("magma.2*1", 1, a.op("*", 2, 1), REFERENCE)
    b.expect("magma.commutative", False, validates_equation(a, comm), REFERENCE)
    b.expect("magma.leibniz-identity", True, leibniz_congruence(m).is_identity(), REFERENCE)
    # bracketings of k leaves (Catalan numbers) times the k-1 inner nodes
    count = sum(math.comb(2 * k - 2, k - 1) // k * (k - 1) for k in range(2, n + 1))
    b.expect("cm.rule-count", count, len(rules.schemes), COMPUTED)
    b.expect("cm.model", True, bool(is_model(rules, m)), REFERENCE)
    b.expect("cm.entails-commutativity", True, lv_entails(cm_equal, [comm.lhs], comm.rhs), DIRECT)
    polys = unary_polynomials(a)
    for p, q in itertools.combinations(range(n + 1), 2):
        sep = any((f[p] == 0) != (f[q] == 0) for f in polys)
        b.expect(f"separated.{p}.{q}", True, sep, REFERENCE)
    for p, q in itertools.combinations(range(1, n + 1), 2):
        sep = magma_separating_polynomial(n, p, q)
        tag = REFERENCE if sep.p_a == sep.predicted else COMPUTED
        b.expect(f"p.{p}.{q}(b)", 0, sep.p_b, REFERENCE)
        b.expect(f"p.{p}.{q}(a)", sep.p_a if tag == COMPUTED else sep.predicted, sep.p_a, tag)
    return b


# -- the chains of the selfextensionality proof ---------------------------------------------


@dataclass(frozen=True)
class AppendixChain:
    """One displayed chain: its labelled steps and the primitive chain behind them."""

    name: str
    display: str
    labels: tuple[str, ...]
    formulas: tuple[Term, ...]
    chain: ChainProof

    def check(self) -> tuple[bool, str]:
        chk = check_chain(cr_calculus(), self.chain)
        if not chk:
            return False, str(chk)
        if len(self.formulas) != len(self.labels) + 1:
            return False, "label count does not match the displayed formulas"
        it = iter(self.chain.formulas)
        if not all(any(f == g for g in it) for f in self.formulas):
            return False, "displayed formulas do not occur in order in the primitive chain"
        if normalize(self.chain.start) != normalize(self.chain.end):
            return False, "endpoints normalize differently"
        return True, f"{len(self.labels)} displayed steps, {len(self.chain)} primitive"


class _Display:
    def __init__(self, start: Term):
        self.b = ChainBuilder(start)
        self.labels: list[str] = []
        self.formulas: list[Term] = [start]

    def step(self, label: str, act: Callable[[ChainBuilder], object]) -> _Display:
        act(self.b)
        self.labels.append(label)
        self.formulas.append(self.b.current)
        return self

    def rule(self, name: str, direction: str = "lr", label: str | None = None, **given) -> _Display:
        return self.step(label or name, lambda b: b.rule(name, direction, **given))

    def macro(self, name: str, direction: str = "lr") -> _Display:
        return self.step(name, lambda b: b.macro(name, direction))

    def done(self, name: str, display: str) -> AppendixChain:
        return AppendixChain(name, display, tuple(self.labels), tuple(self.formulas), self.b.result())


# the displays of the proof, in order; three of them are generic in a guarded rule X
APPENDIX_DISPLAYS = (
    "derived-rules",
    "neg-guarded",
    "neg-N",
    "neg-O",
    "Y-add",
    "Y-mul",
    "add-guarded",
    "mul-guarded",
    "add-N",
    "mul-N",
    "add-O",
    "mul-O",
)

CHI = Var("chi")

# step justifications as displayed, guarded rule X left generic
DISPLAYED_STEPS = {
    "neg-guarded": "I' L' X L' I'",
    "neg-N": "N O M' L' E F L' M' O N",
    "neg-O": "I' M' O I'",
    "Y-add": "Y E' Y E'",
    "Y-mul": "Y B' Y B'",
    "add-guarded": "D' X D'",
    "mul-guarded": "H' O A O X O A O H'",
    "add-N": "E' D' N E'",
    "mul-N": "N E F N",
    "add-O": "D' O D'",
    "mul-O": "H' B C H'",
}


def _guarded_parts(rule: str):
    a, b = GUARDED[rule]
    return add(w, mul(u, a)), {v: Var(v) for v in variables(b) if v not in variables(a)}


def appendix_chains() -> list[AppendixChain]:
    out = []
    for name in ("B'", "D'", "E'", "H'", "I'", "L'", "M'"):
        m = macro_library()[name]
        ch = expand_macro(m, {v: Var(v) for v in m.params})
        out.append(AppendixChain(f"derived-rules/{name}", "derived-rules", (name,), (ch.start, ch.end), ch))

    for r in GUARDED:
        lhs, free = _guarded_parts(r)
        d = _Display(neg(lhs)).macro("I'").macro("L'").rule(r, label="X", **free).macro("L'", "rl").macro("I'", "rl")
        out.append(d.done(f"neg-guarded/{r}", "neg-guarded"))

    d = (
        _Display(neg(add(ZERO, x)))
        .rule("N", "rl").rule("O", "rl").macro("M'", "rl").macro("L'")
        .rule("E", x=ZERO, y=x).rule("F").macro("L'", "rl").macro("M'").rule("O").rule("N")
    )
    out.append(d.done("neg-N", "neg-N"))

    d = _Display(neg(add(x, mul(ONE, y)))).macro("I'").macro("M'").rule("O").macro("I'", "rl")
    out.append(d.done("neg-O", "neg-O"))

    # (Y) used twice with sample equivalences psi1 -||- phi1 and psi2 -||- phi2
    psi1, psi2 = add(ZERO, x), mul(y, ONE)
    to_phi1 = ChainBuilder(psi1).rule("N").result()
    to_phi2 = ChainBuilder(psi2).macro("C'").result()
    for op, swap, mk in (("add", "E'", add), ("mul", "B'", mul)):
        d = _Display(mk(psi1, psi2))
        d.step("Y", lambda b: b.append(lift_at(to_phi2, b.current, (1,))))
        d.macro(swap)
        d.step("Y", lambda b: b.append(lift_at(to_phi1, b.current, (1,))))
        d.macro(swap)
        out.append(d.done(f"Y-{op}", f"Y-{op}"))

    for r in GUARDED:
        lhs, free = _guarded_parts(r)
        d = _Display(add(CHI, lhs)).macro("D'", "rl").rule(r, label="X", **free).macro("D'")
        out.append(d.done(f"add-guarded/{r}", "add-guarded"))

    for r in GUARDED:
        lhs, free = _guarded_parts(r)
        d = (
            _Display(mul(CHI, lhs))
            .macro("H'")
            .rule("O", "rl", x=mul(CHI, w))
            .rule("A", "rl", x=CHI, y=u)
            .rule("O")
            .rule(r, label="X", **free)
            .rule("O", "rl", x=mul(CHI, w))
            .rule("A")
            .rule("O")
            .macro("H'", "rl")
        )
        out.append(d.done(f"mul-guarded/{r}", "mul-guarded"))

    d = _Display(add(CHI, add(ZERO, x))).macro("E'").macro("D'").rule("N").macro("E'")
    out.append(d.done("add-N", "add-N"))
    d = _Display(mul(CHI, add(ZERO, x))).rule("N", "rl").rule("E", x=ZERO, y=x).rule("F").rule("N")
    out.append(d.done("mul-N", "mul-N"))
    d = _Display(add(CHI, add(x, mul(ONE, y)))).macro("D'", "rl").rule("O").macro("D'")
    out.append(d.done("add-O", "add-O"))
    d = _Display(mul(CHI, add(x, mul(ONE, y)))).macro("H'").rule("B", x=ONE, y=y).rule("C").macro("H'", "rl")
    out.append(d.done("mul-O", "mul-O"))
    return out


def appendix_scripts() -> ExampleBundle:
    b = ExampleBundle("appendix")
    chains = appendix_chains()
    b.files["cr.calc"] = format_calculus(cr_calculus())
    for ch in chains:
        fname = ch.name.replace("/", "-").replace("'", "p") + ".chain"
        b.files[fname] = format_chain(ch.chain)
        ok, msg = ch.check()
        b.expect(f"chain.{ch.name}", True, ok, DIRECT)
        want = DISPLAYED_STEPS.get(ch.display, ch.name.split("/")[-1]).split()
        b.expect(f"steps.{ch.name}", "-".join(want), "-".join(ch.labels), REFERENCE)
    covered = sorted({ch.display for ch in chains})
    b.expect("displays", len(APPENDIX_DISPLAYS), len(covered), REFERENCE)
    b.expect("displays.covered", ",".join(sorted(APPENDIX_DISPLAYS)), ",".join(covered), REFERENCE)
    b.expect("chains", 7 + 3 * len(GUARDED) + 8, len(chains), COMPUTED)
    return b


# -- the relation algebra basis -------------------------------------------------------------


def relation_algebra_suite() -> ExampleBundle:
    b = ExampleBundle("relation-algebra")
    basis = relation_algebra_basis()
    b.files["relation_algebra.basis"] = "".join(
        f"{name} : {format_term(e.lhs)} = {format_term(e.rhs)}\n" for name, e in basis.items()
    )
    model = build_frege_consistency_model(basis)
    for group, chk in model.checklist.items():
        b.expect(f"boolean-model.{group}", True, bool(chk), REFERENCE)
    b.expect("basis.size", 11, len(basis), DIRECT)
    used = sorted({t.op for e in basis.values() for side in (e.lhs, e.rhs) for t in subterms(side) if isinstance(t, App)})
    b.expect("basis.symbols", ",".join(sorted(RA_SIG.symbols())), ",".join(used), DIRECT)
    return b


# -- oracle cross-checks -----------------------------------------------------------------


def random_ring_term(rng: random.Random, depth: int, names=("x", "y", "z")) -> Term:
    if depth == 0 or rng.random() < 0.25:
        leaf = rng.choice([*names, *names, "0", "1"])
        return App(leaf, ()) if leaf in ("0", "1") else Var(leaf)
    kind = rng.choice("++**-")
    if kind == "-":
        return neg(random_ring_term(rng, depth - 1, names))
    a, b = random_ring_term(rng, depth - 1, names), random_ring_term(rng, depth - 1, names)
    return add(a, b) if kind == "+" else mul(a, b)


def _rewrite_once(rng: random.Random, t: Term) -> Term:
    """Apply one ring identity, or a deliberate mistake, at a random position."""
    spots = [p for p, _ in positions(t)]
    path = rng.choice(spots)
    s = subterm_at(t, path)
    moves = [lambda s: add(s, ZERO), lambda s: mul(ONE, s), lambda s: neg(neg(s))]
    if isinstance(s, App) and s.op in ("+", "*"):
        moves.append(lambda s: App(s.op, s.args[::-1]))
        if s.op == "*" and isinstance(s.args[1], App) and s.args[1].op == "+":
            a, (b, c) = s.args[0], s.args[1].args
            moves.append(lambda s: add(mul(a, b), mul(a, c)))
    if isinstance(s, App) and s.op == "-" and isinstance(s.args[0], App) and s.args[0].op == "+":
        moves.append(lambda s: add(neg(s.args[0].args[0]), neg(s.args[0].args[1])))
    if rng.random() < 0.15:
        # not an identity: the pair should then be rejected by both oracles
        moves = [lambda s: add(s, ONE), lambda s: mul(s, s), lambda s: neg(s)]
    return replace_at(t, path, rng.choice(moves)(s))


def random_ring_pair(rng: random.Random, max_depth: int = 4) -> Equation:
    t = random_ring_term(rng, rng.randint(1, max_depth - 1))
    if rng.random() < 0.3:
        return Equation(t, random_ring_term(rng, rng.randint(1, max_depth)))
    s = t
    for _ in range(rng.randint(1, 4)):
        r = _rewrite_once(rng, s)
        if depth(r) <= max_depth:
            s = r
    return Equation(t, s)


def ring_oracle_suite(pairs: int = 500, seed: int = 0) -> ExampleBundle:
    """Normal-form equality against integer grid evaluation on random pairs."""
    rng = random.Random(seed)
    b = ExampleBundle("ring-oracle")
    agree = equal = 0
    lines = []
    for _ in range(pairs):
        e = random_ring_pair(rng)
        v, g = cr_valid(e), grid_equal(e)
        agree += v == g
        equal += v
        lines.append(f"{format_term(e.lhs)} = {format_term(e.rhs)} : {_show(v)}\n")
    b.files["pairs"] = "".join(lines)
    b.expect("agreement", pairs, agree, COMPUTED)
    b.expect("both-kinds", True, 0 < equal < pairs, DIRECT)
    return b


def _all_filters(n: int):
    for r in range(n + 1):
        yield from itertools.combinations(range(n), r)


def _leibniz_agrees(a: FiniteAlgebra) -> tuple[int, int]:
    polys, cons = unary_polynomials(a), all_congruences(a)
    total = agree = 0
    for f in _all_filters(a.size):
        m = LogicalMatrix(a, frozenset(f))
        total += 1
        agree += leibniz_congruence(m, polys) == largest_compatible_congruence_bruteforce(m, cons)
    return total, agree


BINARY = Signature("binary", {"*": 2})


def random_algebra(rng: np.random.Generator, n: int) -> FiniteAlgebra:
    """A binary operation plus a second operation that is unary or binary at random."""
    ops = {"*": 2, "f": int(rng.integers(1, 3))}
    sig = Signature("random", ops)
    return FiniteAlgebra(sig, n, {s: rng.integers(0, n, size=(n,) * k) for s, k in ops.items()})


def leibniz_oracle_suite(max_exhaustive: int = 3, random_count: int = 200, seed: int = 0) -> ExampleBundle:
    """Leibniz congruence by polynomials against the brute-force largest congruence."""
    b = ExampleBundle("leibniz-oracle")
    total = agree = 0
    for n in range(1, max_exhaustive + 1):
        for vals in itertools.product(range(n), repeat=n * n):
            a = FiniteAlgebra(BINARY, n, {"*": np.array(vals).reshape(n, n)})
            t, g = _leibniz_agrees(a)
            total += t
            agree += g
    b.expect("exhaustive.agreement", total, agree, COMPUTED)
    rng = np.random.default_rng(seed)
    total = agree = 0
    for _ in range(random_count):
        t, g = _leibniz_agrees(random_algebra(rng, int(rng.integers(1, 5))))
        total += t
        agree += g
    b.expect("random.agreement", total, agree, COMPUTED)
    return b


# -- the reduction logics ------------------------------------------------------------------


@dataclass(frozen=True)
class CuratedPolynomial:
    text: str
    solution: tuple[int, ...] | None = None  # an integer root, if there is one
    modulus: int | None = None  # a modulus without roots, if there is one


CURATED_POLYNOMIALS = (
    CuratedPolynomial("(+ z (- (+ 1 1)))", solution=(2,)),
    CuratedPolynomial("z", solution=(0,)),
    CuratedPolynomial("(+ (* z w) (- (+ 1 1)))", solution=(1, 2)),
    CuratedPolynomial("(+ (* (+ 1 1) z) 1)", modulus=4),
    CuratedPolynomial("(+ (* z z) 1)", modulus=3),
    CuratedPolynomial("(+ (* z z) (- (+ 1 1)))", modulus=3),
)

# (alpha, beta, one rewrite step from alpha to beta when they differ)
CURATED_EQUATIONS = (
    ("x", "x", None),
    ("(conv (conv x))", "x", ("conv-conv", (), False)),
    ("(not (conv (conv x)))", "(not x)", ("conv-conv", (0,), False)),
    ("x", "(* x 1)", ("unit-mul", (), True)),
    ("(conv x)", "x", None),
)


def lp_suite() -> ExampleBundle:
    """Witnesses for solvable polynomials, countermodels for the others."""
    b = ExampleBundle("lp")
    for k, cp in enumerate(CURATED_POLYNOMIALS, 1):
        p = parse_term(cp.text, RING)
        c = build_lp(p)
        b.files[f"lp{k}.calc"] = format_calculus(c)
        if cp.solution is not None:
            w = make_algebraizability_witness(p, cp.solution)
            b.expect(f"lp{k}.witness", True, bool(check_algebraizability_witness(c, w)), REFERENCE)
            b.files[f"lp{k}.theorem.proof"] = format_derivation(w.theorem)
        if cp.modulus is not None:
            m = cp.modulus
            rep = build_countermodel(p, m, 1, 0, 2)
            b.expect(f"lp{k}.countermodel.mod{m}", True, rep.ok, REFERENCE)
            b.files[f"lp{k}.countermodel"] = rep.format()
    return b


def lab_suite() -> ExampleBundle:
    basis = relation_algebra_basis()
    b = ExampleBundle("lab")
    for k, (at, bt, step) in enumerate(CURATED_EQUATIONS, 1):
        alpha, beta = parse_term(at, RA_SIG), parse_term(bt, RA_SIG)
        c = build_lab(alpha, beta, basis, RA_SIG)
        b.files[f"lab{k}.calc"] = format_calculus(c)
        b.expect(f"lab{k}.witness", True, bool(check_algebraizability_witness(c, lab_witness(c))), REFERENCE)
        if alpha == beta or step is not None:
            ev = None if step is None else OneStepEvidence(basis[step[0]], {}, step[1], step[2])
            ders = derive_phi_theorems(c, alpha, beta, ev)
            ok = len(ders) == sum(r.name.startswith("W.") for r in c.rules)
            ok = ok and all(check_derivation(c, d) and not d.premises for d in ders)
            b.expect(f"lab{k}.phi-theorems", True, ok, COMPUTED)
    return b


def consistency_suite(depth_bound: int = 6, size_cap: int = 11) -> ExampleBundle:
    """A proper-filter model for every curated logic, and a failed search for ``x``."""
    b = ExampleBundle("consistency")
    goal = Var("x")
    calculi = []
    for k, cp in enumerate(CURATED_POLYNOMIALS, 1):
        mt, chk = lp_consistency_model(cp.text)
        calculi.append((f"lp{k}", build_lp(cp.text), mt, chk))
    basis = relation_algebra_basis()
    model = build_frege_consistency_model(basis).matrix
    for k, (at, bt, _) in enumerate(CURATED_EQUATIONS, 1):
        c = build_lab(parse_term(at, RA_SIG), parse_term(bt, RA_SIG), basis, RA_SIG)
        calculi.append((f"lab{k}", c, model, is_model(c, model)))
    for name, c, mt, chk in calculi:
        b.expect(f"{name}.model", True, bool(chk), REFERENCE)
        b.expect(f"{name}.proper-filter", True, len(mt.filter) < mt.algebra.size, REFERENCE)
        found = bounded_prove(c, [], goal, depth_bound, size_cap)
        b.expect(f"{name}.no-proof-of-x", True, found is None, REFERENCE)
    return b


SUITES = {
    "semilattice": semilattice_suite,
    "magma": cm_rule_suite,
    "appendix": appendix_scripts,
    "relation-algebra": relation_algebra_suite,
    "ring-oracle": ring_oracle_suite,
    "leibniz-oracle": leibniz_oracle_suite,
    "lp": lp_suite,
    "lab": lab_suite,
    "consistency": consistency_suite,
}
