"""The logics L(p) and L(alpha, beta), with checkable evidence about them.

L(p) is built from a ring polynomial ``p`` in variables other than ``x`` and
``y``.  When ``p`` has an integer root it is regularly algebraizable and
:func:`make_algebraizability_witness` produces the derivations that say so.
When ``p`` has no root modulo ``m``, :func:`build_countermodel` exhibits two
reduced models on one finite algebra.

L(alpha, beta) is built from a one-variable equation over a base signature
together with an equational basis of the base variety.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping, Sequence

import numpy as np

from .cring import RING, ZERO, cr_schemes, encode_int, normalize, synth_ground_chain
from .finalg import (
    MAX_ENUM,
    Congruence,
    FiniteAlgebra,
    LogicalMatrix,
    ModelCheck,
    _assignments,
    _batch_shape,
    evaluate_batch,
    find_counterexample,
    is_model,
    largest_compatible_congruence_bruteforce,
    leibniz_congruence,
)
from .hilbert import (
    CheckReport,
    Derivation,
    HilbertCalculus,
    Premise,
    Rule,
    RuleApp,
    Step,
    check_derivation,
)
from .terms import (
    App,
    Equation,
    Signature,
    Term,
    TermError,
    Var,
    apply_substitution,
    match_term,
    parse_term,
    replace_at,
    subterm_at,
    variables,
)

__all__ = [
    "LP_SIG",
    "RA_SIG",
    "iff",
    "imp",
    "box",
    "boolean_expansion",
    "build_lp",
    "AlgebraizabilityWitness",
    "WitnessReport",
    "NotASolution",
    "make_algebraizability_witness",
    "lab_witness",
    "check_algebraizability_witness",
    "required_conditions",
    "one_step_derivation",
    "CountermodelReport",
    "RootFound",
    "zmod_algebra",
    "build_countermodel",
    "lp_consistency_model",
    "build_lab",
    "phi_formulas",
    "parse_basis",
    "relation_algebra_basis",
    "FregeConsistencyModel",
    "BasisFailure",
    "build_frege_consistency_model",
    "OneStepEvidence",
    "InsufficientEvidence",
    "derive_phi_theorems",
]

IFF = "<->"
IMP = "->"
BOX = "box"

LP_SIG = RING.extend("lp", {IFF: 2})
RA_SIG = Signature("ra", {"and": 2, "or": 2, "not": 1, "*": 2, "conv": 1, "1": 0})

X, Y, Z, U = Var("x"), Var("y"), Var("z"), Var("u")


def iff(a: Term, b: Term) -> App:
    return App(IFF, (a, b))


def imp(a: Term, b: Term) -> App:
    return App(IMP, (a, b))


def box(a: Term) -> App:
    return App(BOX, (a,))


# -- derivation assembly -------------------------------------------------------------


class _Proof:
    """Append-only derivation builder that reuses steps with equal formulas."""

    def __init__(self, c: HilbertCalculus, premises: Sequence[Term] = ()):
        self.c = c
        self.premises = tuple(dict.fromkeys(premises))
        self.steps: list[Step] = []
        self.index: dict[Term, int] = {}

    def premise(self, f: Term) -> int:
        if f not in self.premises:
            raise ValueError(f"{f} is not a premise")
        if f not in self.index:
            self._push(Step(f, Premise()))
        return self.index[f]

    def rule(self, name: str, subst: Mapping[str, Term], refs: Sequence[int]) -> int:
        f = apply_substitution(self.c[name].conclusion, subst)
        if f not in self.index:
            self._push(Step(f, RuleApp(name, subst, tuple(refs))))
        return self.index[f]

    def extend(self, d: Derivation) -> int:
        """Replay ``d`` (whose premises must be ours) and return its last index."""
        local = []
        for st in d.steps:
            if isinstance(st.justification, Premise):
                local.append(self.premise(st.formula))
            else:
                j = st.justification
                local.append(self.rule(j.rule, j.substitution, [local[r] for r in j.refs]))
        return local[-1]

    def _push(self, st: Step) -> None:
        self.steps.append(st)
        self.index[st.formula] = len(self.steps) - 1

    def result(self, last: int | None = None) -> Derivation:
        steps = list(self.steps)
        if last is not None and last != len(steps) - 1:
            # make the wanted formula the conclusion without breaking references
            st = steps[last]
            if isinstance(st.justification, Premise):
                steps.append(st)
            else:
                steps.append(Step(st.formula, st.justification))
        return Derivation(self.premises, tuple(steps))


def one_step_derivation(c: HilbertCalculus, premises: Sequence[Term], goal: Term) -> Derivation | None:
    """A derivation of ``goal`` by a single rule whose premises are among ``premises``."""
    premises = tuple(dict.fromkeys(premises))
    if goal in premises:
        return Derivation(premises, (Step(goal, Premise()),))
    for rule in c.rules:
        s = match_term(rule.conclusion, goal)
        if s is None:
            continue
        for full, used in _cover(rule.premises, premises, s):
            steps = [Step(p, Premise()) for p in dict.fromkeys(used)]
            where = {st.formula: i for i, st in enumerate(steps)}
            refs = tuple(where[p] for p in used)
            steps.append(Step(goal, RuleApp(rule.name, full, refs)))
            return Derivation(premises, tuple(steps))
    return None


def _cover(patterns, pool, s, used=()):
    if not patterns:
        yield s, used
        return
    for f in pool:
        m = match_term(patterns[0], f, s)
        if m is not None:
            yield from _cover(patterns[1:], pool, m, used + (f,))


# -- L(p) ----------------------------------------------------------------------------


def _as_poly(p) -> Term:
    if isinstance(p, str):
        p = parse_term(p, RING)
    RING.check(p)
    clash = {"x", "y"} & set(variables(p))
    if clash:
        raise TermError(f"p must not use the variables x and y (found {sorted(clash)})")
    return p


def build_lp(p) -> HilbertCalculus:
    """The calculus L(p) over the ring signature extended by ``<->``."""
    p = _as_poly(p)
    pz = iff(p, ZERO)
    items: list = [
        Rule("R", (), iff(X, X)),
        Rule("S", (iff(X, Y),), iff(Y, X)),
        Rule("T", (iff(X, Y), iff(Y, Z)), iff(X, Z)),
        Rule("Rep1", (iff(X, Y),), iff(App("-", (X,)), App("-", (Y,)))),
    ]
    for k, sym in ((2, "+"), (3, "*"), (4, IFF)):
        items.append(Rule(f"Rep{k}", (iff(X, Y), iff(Z, U)), iff(App(sym, (X, Z)), App(sym, (Y, U)))))
    items.append(Rule("MP'", (pz, X, iff(X, Y)), Y))
    items.append(("A3'", (pz, X), (iff(X, iff(X, X)), pz)))
    items.append(Rule("G'", (pz, X, Y), iff(X, Y)))
    for name, a, b in cr_schemes():
        items.append(Rule(f"CR.{name}/lr", (), iff(a, b)))
        items.append(Rule(f"CR.{name}/rl", (), iff(b, a)))
    return HilbertCalculus.build(LP_SIG, items)


class NotASolution(ValueError):
    pass


@dataclass(frozen=True)
class AlgebraizabilityWitness:
    rho: tuple[Term, ...]
    tau: tuple[Equation, ...]
    derivations: dict[str, tuple[Derivation, ...]]
    regular: bool = True
    theorem: Derivation | None = None


@dataclass
class WitnessReport:
    entries: list[tuple[str, bool, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return bool(self.entries) and all(e[1] for e in self.entries)

    def __bool__(self):
        return self.ok

    def failed(self) -> list[str]:
        return [name for name, ok, _ in self.entries if not ok]

    def format(self) -> str:
        return "".join(f"{'PASS' if ok else 'FAIL'} {name}: {msg}\n" for name, ok, msg in self.entries)


def _lp_theorem(c: HilbertCalculus, ground: Term) -> Derivation:
    """Derive ``ground <-> 0`` from the (CR) axioms with (S) and (T)."""
    chain = synth_ground_chain(ground, ZERO)
    pf = _Proof(c)
    if not chain.steps:
        pf.rule("R", {"x": ground}, ())
        return pf.result()
    acc = None
    for k, st in enumerate(chain.steps):
        a, b = chain.formulas[k], chain.formulas[k + 1]
        scheme = st.rule
        ax = pf.rule(f"CR.{scheme}/lr", st.substitution, ())
        if st.direction == "rl":
            ax = pf.rule("S", {"x": b, "y": a}, (ax,))
        if acc is None:
            acc = ax
        else:
            acc = pf.rule("T", {"x": chain.formulas[0], "y": a, "z": b}, (acc, ax))
    return pf.result(acc)


def make_algebraizability_witness(p, solution: Sequence[int]) -> AlgebraizabilityWitness:
    """Derivations showing L(p) regularly algebraizable, given an integer root of ``p``.

    The root is listed in the order in which the variables first occur in ``p``.
    """
    p = _as_poly(p)
    zs = variables(p)
    solution = [int(v) for v in solution]
    if len(solution) != len(zs):
        raise NotASolution(f"p has {len(zs)} variables {zs}, got {len(solution)} values")
    sigma = {z: encode_int(v) for z, v in zip(zs, solution)}
    ground = apply_substitution(p, sigma)
    value = normalize(ground)
    if not value.is_zero():
        raise NotASolution(f"p at {solution} is {value}, not 0")
    c = build_lp(p)
    thm = _lp_theorem(c, ground)
    rho = (iff(X, Y),)
    tau = (Equation(X, iff(X, X)),)
    ders: dict[str, tuple[Derivation, ...]] = {}

    def with_theorem(premises, build):
        pf = _Proof(c, premises)
        t = pf.extend(thm)
        last = build(pf, t)
        return pf.result(last)

    ders["R"] = (Derivation((), (Step(iff(X, X), RuleApp("R", {"x": X}, ())),)),)
    ders["MP"] = (
        with_theorem(
            (X, iff(X, Y)),
            lambda pf, t: pf.rule("MP'", {**sigma, "x": X, "y": Y}, (t, pf.premise(X), pf.premise(iff(X, Y)))),
        ),
    )
    for sym in LP_SIG.symbols():
        xs, ys, _ = _rep_vars(LP_SIG.arity(sym))
        goal = iff(App(sym, xs), App(sym, ys))
        d = one_step_derivation(c, [iff(a, b) for a, b in zip(xs, ys)], goal)
        ders[f"Rep({sym})"] = (d,) if d is not None else ()
    a3 = iff(X, iff(X, X))
    ders["A3-fwd"] = (
        with_theorem((X,), lambda pf, t: pf.rule("A3'/lr1", {**sigma, "x": X}, (t, pf.premise(X)))),
    )
    ders["A3-bwd"] = (
        with_theorem((a3,), lambda pf, t: pf.rule("A3'/rl2", {**sigma, "x": X}, (pf.premise(a3), t))),
    )
    ders["G"] = (
        with_theorem(
            (X, Y),
            lambda pf, t: pf.rule("G'", {**sigma, "x": X, "y": Y}, (t, pf.premise(X), pf.premise(Y))),
        ),
    )
    return AlgebraizabilityWitness(rho, tau, ders, regular=True, theorem=thm)


def _rep_vars(n: int):
    xs = tuple(Var(f"x{i}") for i in range(1, n + 1))
    ys = tuple(Var(f"y{i}") for i in range(1, n + 1))
    return xs, ys, n


def required_conditions(sig: Signature, rho, tau, regular: bool = True) -> dict[str, tuple[tuple[Term, ...], tuple[Term, ...]]]:
    """Condition name -> (premises, conclusions) for the syntactic algebraizability test."""
    rho, tau = tuple(rho), tuple(tau)

    def r(a, b):
        return [apply_substitution(f, {"x": a, "y": b}) for f in rho]

    def dedup(fs):
        return tuple(dict.fromkeys(fs))

    req = {"R": ((), dedup(r(X, X))), "MP": (dedup([X, *r(X, Y)]), (Y,))}
    for sym in sig.symbols():
        xs, ys, n = _rep_vars(sig.arity(sym))
        prem = [f for a, b in zip(xs, ys) for f in r(a, b)]
        req[f"Rep({sym})"] = (dedup(prem), dedup(r(App(sym, xs), App(sym, ys))))
    phis = dedup(f for e in tau for f in r(e.lhs, e.rhs))
    req["A3-fwd"] = ((X,), phis)
    req["A3-bwd"] = (phis, (X,))
    if regular:
        req["G"] = ((X, Y), dedup(r(X, Y)))
    return req


def check_algebraizability_witness(c: HilbertCalculus, w: AlgebraizabilityWitness) -> WitnessReport:
    report = WitnessReport()
    if w.theorem is not None:
        chk = check_derivation(c, w.theorem)
        report.entries.append(("theorem", bool(chk) and not w.theorem.premises, f"{w.theorem.conclusion} ({len(w.theorem)} steps) {chk}"))
    for name, (prem, concl) in required_conditions(c.signature, w.rho, w.tau, w.regular).items():
        ders = w.derivations.get(name)
        if not ders:
            report.entries.append((name, False, "missing derivation"))
            continue
        problems = []
        for d in ders:
            chk: CheckReport = check_derivation(c, d)
            if not chk:
                problems.append(f"derivation of {d.conclusion if d.steps else '?'} fails: {chk}")
            extra = set(d.premises) - set(prem)
            if extra:
                problems.append(f"uses extra premises {sorted(map(str, extra))}")
        done = {d.conclusion for d in ders if d.steps}
        for goal in concl:
            if goal not in done:
                problems.append(f"no derivation of {goal}")
        steps = sum(len(d) for d in ders)
        msg = "; ".join(problems) if problems else f"{len(ders)} derivation(s), {steps} steps"
        report.entries.append((name, not problems, msg))
    return report


# -- countermodels for L(p) ------------------------------------------------------------


class RootFound(ValueError):
    pass


def zmod_algebra(m: int, s: int, mval: int) -> FiniteAlgebra:
    """The ring of integers mod ``m`` with ``a <-> b`` = ``s`` if a = b, else ``mval``."""
    if m < 2:
        raise ValueError("modulus must be at least 2")
    return FiniteAlgebra.from_functions(
        LP_SIG,
        m,
        {
            "+": lambda a, b: (a + b) % m,
            "*": lambda a, b: (a * b) % m,
            "-": lambda a: (-a) % m,
            "0": 0,
            "1": 1 % m,
            IFF: lambda a, b: s if a == b else mval,
        },
    )


def _roots(a: FiniteAlgebra, p: Term) -> tuple[int, dict[str, int] | None]:
    names = variables(p)
    env = _assignments(a.size, names)
    shape = _batch_shape(a.size, names)
    vals = np.broadcast_to(evaluate_batch(a, p, env, shape), shape).ravel()
    hits = np.nonzero(vals == 0)[0]
    if len(hits):
        i = hits[0]
        return len(vals), {v: int(np.broadcast_to(env[v], shape).ravel()[i]) for v in names}
    return len(vals), None


@dataclass
class CountermodelReport:
    p: Term
    modulus: int
    s: int
    mval: int
    k: int
    assignments_checked: int
    matrices: tuple[LogicalMatrix, LogicalMatrix]
    model_checks: tuple[ModelCheck, ModelCheck]
    leibniz: tuple[Congruence, Congruence]
    leibniz_bruteforce: tuple[Congruence, Congruence] | None
    separations: int
    separation_ok: bool
    scope: str = (
        "truth is not implicitly definable over the reduced models of L(p) "
        "on this finite algebra; no claim is made about models over the integers"
    )

    @property
    def ok(self) -> bool:
        same = self.matrices[0].algebra == self.matrices[1].algebra
        distinct = self.matrices[0].filter != self.matrices[1].filter
        reduced = all(c.is_identity() for c in self.leibniz)
        agree = self.leibniz_bruteforce is None or all(
            a == b for a, b in zip(self.leibniz, self.leibniz_bruteforce)
        )
        return same and distinct and reduced and agree and all(self.model_checks) and self.separation_ok

    def __bool__(self):
        return self.ok

    def format(self) -> str:
        lines = [
            f"p = {self.p}",
            f"algebra: integers mod {self.modulus}, a <-> b = {self.s} if a = b else {self.mval}",
            f"no root of p mod {self.modulus} ({self.assignments_checked} assignments)",
        ]
        for mat, chk, lc in zip(self.matrices, self.model_checks, self.leibniz):
            f = ",".join(map(str, sorted(mat.filter)))
            lines.append(f"filter {{{f}}}: {'model' if chk else 'NOT a model'} ({chk}); leibniz {lc}")
        if self.leibniz_bruteforce is not None:
            same = all(a == b for a, b in zip(self.leibniz, self.leibniz_bruteforce))
            lines.append(f"leibniz agrees with brute force: {same}")
        lines.append(f"separating polynomials a <-> z checked on {self.separations} pairs: {self.separation_ok}")
        lines.append(f"scope: {self.scope}")
        return "\n".join(lines) + "\n"


def build_countermodel(p, m: int, s: int, mval: int, k: int) -> CountermodelReport:
    """Two reduced models of L(p) on the same algebra, for ``p`` without roots mod ``m``."""
    p = _as_poly(p)
    if m < 3:
        raise ValueError("modulus must be at least 3")
    if len({s % m, mval % m, k % m}) != 3 or not all(0 <= v < m for v in (s, mval, k)):
        raise ValueError("s, mval and k must be pairwise distinct elements of 0..m-1")
    a = zmod_algebra(m, s, mval)
    count, root = _roots(a, p)
    if root is not None:
        raise RootFound(f"p has the root {root} mod {m}")
    c = build_lp(p)
    mats = (LogicalMatrix(a, frozenset({s})), LogicalMatrix(a, frozenset({s, k})))
    checks = tuple(is_model(c, mt) for mt in mats)
    leib = tuple(leibniz_congruence(mt) for mt in mats)
    brute = None
    if m <= MAX_ENUM:
        brute = tuple(largest_compatible_congruence_bruteforce(mt) for mt in mats)
    pairs = 0
    sep_ok = True
    for x in range(m):
        for y in range(m):
            if x == y:
                continue
            pairs += 1
            qa, qb = a.op(IFF, x, x), a.op(IFF, x, y)
            sep_ok &= all(qa in mt.filter and qb not in mt.filter for mt in mats)
    return CountermodelReport(p, m, s, mval, k, count, mats, checks, leib, brute, pairs, sep_ok)


def lp_consistency_model(p, max_modulus: int = 12) -> tuple[LogicalMatrix, ModelCheck]:
    """A model of L(p) with a proper filter.

    Uses the first modulus without a root of ``p`` when there is one, and the
    filter ``{1}`` on the integers mod 3 otherwise; the latter is a model
    whether or not ``p`` has roots.
    """
    p = _as_poly(p)
    c = build_lp(p)
    for m in range(3, max_modulus + 1):
        a = zmod_algebra(m, 1, 0)
        if _roots(a, p)[1] is None:
            mt = LogicalMatrix(a, frozenset({1}))
            return mt, is_model(c, mt)
    mt = LogicalMatrix(zmod_algebra(3, 1, 0), frozenset({1}))
    return mt, is_model(c, mt)


# -- L(alpha, beta) ---------------------------------------------------------------------


def _rep_formula(sym: str, n: int) -> Term:
    xs, ys, _ = _rep_vars(n)
    return imp(App(sym, xs), App(sym, ys))


def phi_formulas(sig: Signature) -> dict[str, Term]:
    """The six formula families, the third one instantiated per symbol of ``sig``."""
    out = {
        "phi1": imp(X, imp(Y, X)),
        "phi2": imp(imp(X, imp(Y, Z)), imp(imp(X, Y), imp(X, Z))),
    }
    for sym in sig.symbols():
        n = sig.arity(sym)
        xs, ys, _ = _rep_vars(n)
        body = _rep_formula(sym, n)
        for a, b in reversed(list(zip(xs, ys))):
            body = imp(imp(a, b), imp(imp(b, a), body))
        out[f"phi3.{sym}"] = body
    out["phi4"] = imp(X, imp(X, box(X)))
    out["phi5"] = imp(X, imp(box(X), X))
    out["phi6"] = imp(imp(box(X), X), imp(imp(X, box(X)), X))
    return out


def _basis_items(basis) -> list[tuple[str, Equation]]:
    if isinstance(basis, Mapping):
        return list(basis.items())
    return [(str(i), e) for i, e in enumerate(basis, 1)]


def _lab_signature(sig: Signature) -> Signature:
    return sig.extend(f"{sig.name}+lab", {BOX: 1, IMP: 2})


def _one_variable(t: Term, sig: Signature, what: str) -> Term:
    sig.check(t)
    if set(variables(t)) - {"x"}:
        raise TermError(f"{what} must be a term in the single variable x, got {t}")
    return t


def build_lab(alpha: Term, beta: Term, basis, sig: Signature) -> HilbertCalculus:
    """The calculus L(alpha, beta); ``basis`` is a list or a name -> equation map."""
    alpha = _one_variable(alpha, sig, "alpha")
    beta = _one_variable(beta, sig, "beta")
    full = _lab_signature(sig)
    items: list = [Rule("R", (), imp(X, X)), Rule("MP", (X, imp(X, Y)), Y)]
    for sym in full.symbols():
        xs, ys, n = _rep_vars(full.arity(sym))
        prem = [f for a, b in zip(xs, ys) for f in (imp(a, b), imp(b, a))]
        items.append(Rule(f"Rep.{sym}", prem, _rep_formula(sym, n)))
    items.append(("A3", (X,), (imp(box(X), X), imp(X, box(X)))))
    for name, e in _basis_items(basis):
        sig.check(e.lhs)
        sig.check(e.rhs)
        items.append(Rule(f"V.{name}/1", (), imp(e.lhs, e.rhs)))
        items.append(Rule(f"V.{name}/2", (), imp(e.rhs, e.lhs)))
    for name, phi in phi_formulas(full).items():
        prem = imp(apply_substitution(alpha, {"x": phi}), apply_substitution(beta, {"x": phi}))
        items.append(Rule(f"W.{name}", (prem,), phi))
    return HilbertCalculus.build(full, items)


def lab_witness(c: HilbertCalculus) -> AlgebraizabilityWitness:
    """Witness for L(alpha, beta) with rho = {x->y, y->x} and tau = {x = box x}.

    Every condition is a single rule application of the calculus.
    """
    rho = (imp(X, Y), imp(Y, X))
    tau = (Equation(X, box(X)),)
    ders = {}
    for name, (prem, concl) in required_conditions(c.signature, rho, tau, regular=False).items():
        found = tuple(d for d in (one_step_derivation(c, prem, g) for g in concl) if d is not None)
        if len(found) == len(concl):
            ders[name] = found
    return AlgebraizabilityWitness(rho, tau, ders, regular=False)


def parse_basis(text: str, sig: Signature) -> dict[str, Equation]:
    """Lines ``name : lhs = rhs``; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, body = line.partition(":")
        lhs, eq, rhs = body.partition("=")
        if not sep or not eq or not name.strip():
            raise ValueError(f"line {lineno}: expected 'name : lhs = rhs'")
        name = name.strip()
        if name in out:
            raise ValueError(f"line {lineno}: duplicate name {name!r}")
        out[name] = Equation(parse_term(lhs, sig), parse_term(rhs, sig))
    return out


def relation_algebra_basis() -> dict[str, Equation]:
    text = resources.files("aalkit").joinpath("data/relation_algebra.basis").read_text()
    return parse_basis(text, RA_SIG)


class BasisFailure(ValueError):
    def __init__(self, name: str, equation: Equation, assignment: Mapping[str, int]):
        env = ", ".join(f"{v}={a}" for v, a in assignment.items())
        super().__init__(f"basis equation {name} ({equation}) fails under {env}")
        self.name = name
        self.equation = equation
        self.assignment = dict(assignment)


def boolean_expansion() -> FiniteAlgebra:
    """Two-element Boolean algebra with product as meet, identity converse, constant box."""
    return FiniteAlgebra.from_functions(
        _lab_signature(RA_SIG),
        2,
        {
            "and": min,
            "or": max,
            "not": lambda a: 1 - a,
            "*": min,
            "conv": lambda a: a,
            "1": 1,
            BOX: lambda a: 1,
            IMP: lambda a, b: max(1 - a, b),
        },
    )


@dataclass
class FregeConsistencyModel:
    matrix: LogicalMatrix
    checklist: dict[str, ModelCheck]

    @property
    def ok(self) -> bool:
        return all(self.checklist.values())

    def __bool__(self):
        return self.ok

    def format(self) -> str:
        return "".join(f"{'PASS' if chk else 'FAIL'} {name}: {chk}\n" for name, chk in self.checklist.items())


def build_frege_consistency_model(basis) -> FregeConsistencyModel:
    a = boolean_expansion()
    items = _basis_items(basis)
    for name, e in items:
        bad = find_counterexample(a, e)
        if bad is not None:
            raise BasisFailure(name, e, bad)
    sig = a.signature
    mt = LogicalMatrix(a, frozenset({1}))
    groups: dict[str, list[Rule]] = {}
    for name, phi in phi_formulas(sig).items():
        groups.setdefault(name.split(".")[0], []).append(Rule(name, (), phi))
    groups["V"] = [
        Rule(f"V.{name}/{i}", (), imp(*sides))
        for name, e in items
        for i, sides in ((1, (e.lhs, e.rhs)), (2, (e.rhs, e.lhs)))
    ]
    groups["MP"] = [Rule("MP", (X, imp(X, Y)), Y)]
    checklist = {g: is_model(HilbertCalculus(sig, tuple(rules)), mt) for g, rules in groups.items()}
    return FregeConsistencyModel(mt, checklist)


# -- theorems of L(alpha, beta) -----------------------------------------------------------


class InsufficientEvidence(ValueError):
    pass


@dataclass(frozen=True)
class OneStepEvidence:
    """``alpha`` rewrites to ``beta`` by one basis equation at ``path``.

    The equation is used left to right, or right to left when ``reverse`` is set.
    """

    equation: Equation
    substitution: Mapping[str, Term]
    path: tuple[int, ...] = ()
    reverse: bool = False


def _v_axiom(c: HilbertCalculus, lhs: Term, rhs: Term) -> str:
    goal = imp(lhs, rhs)
    for r in c.rules:
        if r.name.startswith("V.") and not r.premises and r.conclusion == goal:
            return r.name
    raise InsufficientEvidence(f"no (V) axiom {goal}; the equation is not in the basis")


def derive_phi_theorems(c: HilbertCalculus, alpha: Term, beta: Term, evidence=None) -> list[Derivation]:
    """Derive each formula of the (W) rules from no premises."""
    if isinstance(evidence, OneStepEvidence):
        evidence = [evidence]
    evidence = list(evidence or [])
    if len(evidence) > 1:
        raise InsufficientEvidence(
            "only a single rewrite step is supported; longer equational proofs would need "
            "transitivity of -> before the (W) formulas are available"
        )
    if alpha != beta and not evidence:
        raise InsufficientEvidence("alpha and beta differ and no rewrite step was given")
    ev = evidence[0] if evidence else None
    if ev is not None:
        eps, dlt = (ev.equation.rhs, ev.equation.lhs) if ev.reverse else (ev.equation.lhs, ev.equation.rhs)
        try:
            here = subterm_at(alpha, ev.path)
        except IndexError as exc:
            raise InsufficientEvidence(str(exc)) from None
        if here != apply_substitution(eps, ev.substitution):
            raise InsufficientEvidence(f"the subterm of alpha at {ev.path} is not an instance of {eps}")
        if replace_at(alpha, ev.path, apply_substitution(dlt, ev.substitution)) != beta:
            raise InsufficientEvidence("the rewrite step does not produce beta")
        fwd, bwd = _v_axiom(c, eps, dlt), _v_axiom(c, dlt, eps)

    out = []
    for rule in c.rules:
        if not rule.name.startswith("W."):
            continue
        phi = rule.conclusion
        theta = {"x": phi}
        pf = _Proof(c)
        if ev is None:
            top = pf.rule("R", {"x": apply_substitution(alpha, theta)}, ())
        else:
            evars = variables(eps, dlt)
            full = {v: apply_substitution(apply_substitution(Var(v), ev.substitution), theta) for v in evars}
            a0 = apply_substitution(eps, full)
            b0 = apply_substitution(dlt, full)
            pf.rule(fwd, full, ())
            pf.rule(bwd, full, ())
            top = _lift(pf, apply_substitution(alpha, theta), ev.path, a0, b0)
        if pf.steps[top].formula != rule.premises[0]:
            raise InsufficientEvidence(f"derived {pf.steps[top].formula}, expected {rule.premises[0]}")
        last = pf.rule(rule.name, {v: Var(v) for v in rule.variables()}, (top,))
        out.append(pf.result(last))
    return out


def _lift(pf: _Proof, host: Term, path: tuple[int, ...], a: Term, b: Term) -> int:
    """From ``a->b`` and ``b->a`` derive ``host->host'`` where ``host'`` has ``b`` at ``path``."""
    if not path:
        return pf.index[imp(a, b)]
    i, rest = path[0], path[1:]
    child = host.args[i]
    _lift(pf, child, rest, a, b)
    new_child = replace_at(child, rest, b)
    n = len(host.args)
    xs, ys, _ = _rep_vars(n)
    refs_fwd, refs_bwd = [], []
    for j, arg in enumerate(host.args):
        if j == i:
            f, g = pf.index[imp(child, new_child)], pf.index[imp(new_child, child)]
        else:
            f = g = pf.rule("R", {"x": arg}, ())
        refs_fwd += [f, g]
        refs_bwd += [g, f]
    old, new = host.args, replace_at(host, (i,), new_child).args
    s_fwd = {**_bind(xs, old), **_bind(ys, new)}
    s_bwd = {**_bind(xs, new), **_bind(ys, old)}
    pf.rule(f"Rep.{host.op}", s_bwd, refs_bwd)
    return pf.rule(f"Rep.{host.op}", s_fwd, refs_fwd)



def _bind(vs, ts) -> dict[str, Term]:
    return {v.name: t for v, t in zip(vs, ts)}
