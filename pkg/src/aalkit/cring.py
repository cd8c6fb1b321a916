"""Commutative rings: polynomial normal forms, the calculus CR and chain synthesis.

The calculus has thirteen bidirectional single-premise rules.  Eleven of them
(A to M) are "guarded": both sides have the shape ``w + (u * e)``.  The other
two (N, O) are unguarded.  Chains over these rules are lifted into contexts
``-( )``, ``c + ( )`` and ``c * ( )`` using per-rule recipes, and closed terms
are driven to a canonical integer literal by a fixed rewriting strategy.
"""

from __future__ import annotations

from collections import Counter
from functools import cache
from typing import Callable, Iterable, Mapping

import numpy as np

from .hilbert import (
    ChainProof,
    ChainStep,
    DerivedRuleMacro,
    HilbertCalculus,
    expand_macro,
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
    subterm_at,
    variables,
)

__all__ = [
    "RING",
    "ZERO",
    "ONE",
    "add",
    "mul",
    "neg",
    "RingPolynomial",
    "normalize",
    "cr_valid",
    "eval_int",
    "grid_equal",
    "lv_entails",
    "cm_equal",
    "encode_int",
    "decode_int",
    "cr_calculus",
    "macro_library",
    "lemma_library",
    "context_lift",
    "lift_at",
    "ChainBuilder",
    "literal_chain",
    "synth_ground_chain",
    "NotCREqual",
]

RING = Signature("ring", {"+": 2, "*": 2, "-": 1, "0": 0, "1": 0})

ZERO = App("0")
ONE = App("1")


def add(a: Term, b: Term) -> App:
    return App("+", (a, b))


def mul(a: Term, b: Term) -> App:
    return App("*", (a, b))


def neg(a: Term) -> App:
    return App("-", (a,))


w, u, x, y, z = (Var(v) for v in "wuxyz")


# -- polynomials ------------------------------------------------------------------

Monomial = tuple  # ((var, exp), ...) strictly sorted by var, exp >= 1


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    c = Counter(dict(m1))
    c.update(dict(m2))
    return tuple(sorted(c.items()))


class RingPolynomial:
    """Element of Z[vars] stored as monomial -> nonzero int coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, int] = ()):
        self.terms = {m: c for m, c in dict(terms).items() if c}

    @classmethod
    def constant(cls, k: int) -> RingPolynomial:
        return cls({(): k})

    @classmethod
    def var(cls, name: str) -> RingPolynomial:
        return cls({((name, 1),): 1})

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return RingPolynomial(out)

    def __neg__(self):
        return RingPolynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return RingPolynomial(out)

    def __eq__(self, other):
        return isinstance(other, RingPolynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def constant_value(self) -> int | None:
        if not self.terms:
            return 0
        if list(self.terms) == [()]:
            return self.terms[()]
        return None

    def variables(self) -> list[str]:
        return sorted({v for m in self.terms for v, _ in m})

    def degree_in(self, var: str) -> int:
        return max((dict(m).get(var, 0) for m in self.terms), default=0)

    def monomials(self) -> list[Monomial]:
        """Graded-lex order: higher total degree first, then lexicographic on exponents."""
        vs = self.variables()

        def key(m):
            d = dict(m)
            return (-sum(d.values()), tuple(-d.get(v, 0) for v in vs))

        return sorted(self.terms, key=key)

    def evaluate(self, env: Mapping[str, int]) -> int:
        total = 0
        for m, c in self.terms.items():
            p = c
            for v, e in m:
                p *= env[v] ** e
            total += p
        return total

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in self.monomials():
            c = self.terms[m]
            factors = [v if e == 1 else f"{v}^{e}" for v, e in m]
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append("*".join([str(c)] + factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"RingPolynomial({self})"


def normalize(t: Term) -> RingPolynomial:
    if isinstance(t, Var):
        return RingPolynomial.var(t.name)
    if t.op not in RING or RING.arity(t.op) != len(t.args):
        raise TermError(f"{t.op!r} is not a ring operation")
    if t.op == "0":
        return RingPolynomial()
    if t.op == "1":
        return RingPolynomial.constant(1)
    if t.op == "-":
        return -normalize(t.args[0])
    a, b = (normalize(s) for s in t.args)
    return a + b if t.op == "+" else a * b


def cr_valid(e: Equation) -> bool:
    return normalize(e.lhs) == normalize(e.rhs)


def eval_int(t: Term, env: Mapping[str, object]):
    """Evaluate a ring term over the integers; values may be numpy object arrays."""
    if isinstance(t, Var):
        return env[t.name]
    if t.op == "0":
        return 0
    if t.op == "1":
        return 1
    if t.op == "-":
        return -eval_int(t.args[0], env)
    a, b = (eval_int(s, env) for s in t.args)
    return a + b if t.op == "+" else a * b


def grid_equal(e: Equation) -> bool:
    """Compare both sides at every point of a grid ``0..d`` per variable.

    ``d`` is the larger degree of the variable in either side, which is enough
    points to tell two polynomials apart.
    """
    names = variables(e.lhs, e.rhs)
    nl, nr = normalize(e.lhs), normalize(e.rhs)
    axes = [np.arange(max(nl.degree_in(v), nr.degree_in(v)) + 1, dtype=object) for v in names]
    grids = np.meshgrid(*axes, indexing="ij") if axes else []
    env = dict(zip(names, grids))
    diff = np.asarray(eval_int(e.lhs, env) - eval_int(e.rhs, env), dtype=object)
    return not diff.any()


def lv_entails(oracle: Callable[[Equation], bool], premises: Iterable[Term], goal: Term) -> bool:
    """``premises |- goal`` in the logic of a variety whose equations ``oracle`` decides."""
    return any(oracle(Equation(p, goal)) for p in premises)


def _cm_canonical(t: Term):
    if isinstance(t, Var):
        return ("v", t.name)
    args = [_cm_canonical(a) for a in t.args]
    if len(args) == 2:
        args.sort()
    return (t.op, tuple(args))


def cm_equal(e: Equation) -> bool:
    """Validity in commutative magmas: equality up to swapping arguments of binary operations."""
    return _cm_canonical(e.lhs) == _cm_canonical(e.rhs)


def encode_int(k: int) -> Term:
    if k < 0:
        return neg(encode_int(-k))
    if k == 0:
        return ZERO
    t: Term = ONE
    for _ in range(k - 1):
        t = add(ONE, t)
    return t


def decode_int(t: Term) -> int | None:
    """Inverse of :func:`encode_int` on its image, ``None`` elsewhere."""
    if t == ZERO:
        return 0
    if isinstance(t, App) and t.op == "-":
        k = decode_int(t.args[0])
        return -k if k is not None and k > 0 else None
    k = 0
    while t != ONE:
        if not (isinstance(t, App) and t.op == "+" and t.args[0] == ONE):
            return None
        k += 1
        t = t.args[1]
    return k + 1


# -- the calculus ------------------------------------------------------------------

# guarded rules: w + (u * inner_left)  -||-  w + (u * inner_right)
GUARDED: dict[str, tuple[Term, Term]] = {
    "A": (mul(mul(x, y), z), mul(x, mul(y, z))),
    "B": (mul(x, y), mul(y, x)),
    "C": (mul(x, ONE), x),
    "D": (add(add(x, y), z), add(x, add(y, z))),
    "E": (add(x, y), add(y, x)),
    "F": (add(x, ZERO), x),
    "G": (add(x, neg(x)), ZERO),
    "H": (mul(x, add(y, z)), add(mul(x, y), mul(x, z))),
    "I": (neg(add(x, y)), add(neg(x), neg(y))),
    "L": (neg(mul(x, y)), mul(neg(x), y)),
    "M": (neg(mul(x, y)), mul(x, neg(y))),
}


def _guard(inner: Term) -> Term:
    return add(w, mul(u, inner))


def cr_schemes() -> list[tuple[str, Term, Term]]:
    out = [(name, _guard(a), _guard(b)) for name, (a, b) in GUARDED.items()]
    out.append(("N", add(ZERO, x), x))
    out.append(("O", add(x, mul(ONE, y)), add(x, y)))
    return out


@cache
def cr_calculus() -> HilbertCalculus:
    return HilbertCalculus.build(RING, [(n, [a], [b]) for n, a, b in cr_schemes()])


# -- chain construction -----------------------------------------------------------------


class ChainBuilder:
    """Grow a chain from ``start`` one rule, macro or positioned sub-chain at a time.

    Rule and macro variables not given explicitly are found by matching the
    current formula.
    """

    def __init__(self, start: Term, calculus: HilbertCalculus | None = None):
        self.calculus = calculus or cr_calculus()
        self.chain = ChainProof((start,))

    @property
    def current(self) -> Term:
        return self.chain.end

    def rule(self, name: str, direction: str = "lr", **given: Term) -> ChainBuilder:
        r = self.calculus.directed(name, direction)
        s = match_term(r.premises[0], self.current, given)
        if s is None:
            raise ValueError(f"{name}/{direction} does not apply to {self.current}")
        missing = [v for v in variables(r.conclusion) if v not in s]
        if missing:
            raise ValueError(f"{name}/{direction}: unbound variables {missing}")
        s = {v: s[v] for v in r.variables()}
        nxt = apply_substitution(r.conclusion, s)
        self.chain = self.chain.then(ChainProof((self.current, nxt), (ChainStep(name, s, direction),)))
        return self

    def macro(self, m: DerivedRuleMacro | str, direction: str = "lr", **given: Term) -> ChainBuilder:
        m = macro_library()[m] if isinstance(m, str) else m
        side = m.lhs if direction == "lr" else m.rhs
        s = match_term(side, self.current, given)
        if s is None:
            raise ValueError(f"macro {m.name}/{direction} does not apply to {self.current}")
        return self.append(expand_macro(m, s, direction))

    def append(self, ch: ChainProof) -> ChainBuilder:
        self.chain = self.chain.then(ch)
        return self

    def at(self, path, build: Callable[[ChainBuilder], object]) -> ChainBuilder:
        """Run ``build`` on the subterm at ``path`` and lift the result back."""
        sub = ChainBuilder(subterm_at(self.current, path), self.calculus)
        build(sub)
        return self.append(lift_at(sub.chain, self.current, tuple(path)))

    def result(self) -> ChainProof:
        return self.chain


def _macro(name: str, start: Term, build: Callable[[ChainBuilder], object]) -> DerivedRuleMacro:
    b = ChainBuilder(start)
    build(b)
    ch = b.result()
    return DerivedRuleMacro(name, ch, tuple(variables(ch.start, ch.end)))


def _via_unit(name: str, rule: str) -> DerivedRuleMacro:
    """Unguarded form of a guarded rule: (N), (O), rule with w=0, u=1, (O), (N)."""
    a, b = GUARDED[rule]
    return _macro(
        name,
        a,
        lambda c: c.rule("N", "rl").rule("O", "rl").rule(rule, "lr", **_free(b, a)).rule("O").rule("N"),
    )


def _free(target: Term, source: Term) -> dict[str, Term]:
    # variables that only the conclusion mentions keep their own name
    return {v: Var(v) for v in variables(target) if v not in variables(source)}


@cache
def macro_library() -> dict[str, DerivedRuleMacro]:
    lib: dict[str, DerivedRuleMacro] = {}
    for r in "ABCDEFGHI":
        lib[f"{r}'"] = _via_unit(f"{r}'", r)
    # w + -(x*y) -||- w + (-x * y) and its twin, through (O) only
    for r in "LM":
        a, _ = GUARDED[r]
        lib[f"{r}'"] = _macro(f"{r}'", add(w, a), lambda c, r=r: c.rule("O", "rl").rule(r).rule("O"))
    return lib


@cache
def lemma_library() -> dict[str, DerivedRuleMacro]:
    """Further open equivalences used by the ground-term strategy."""
    lib = {}

    def mk(name, start, build):
        m = _macro(name, start, build)
        lib[name] = m
        return m

    # 1 * x -||- x
    mk("1*x", mul(ONE, x), lambda c: c.macro("B'").macro("C'"))
    # x * 0 -||- 0
    mk(
        "x*0",
        mul(x, ZERO),
        lambda c: (
            c.macro("F'", "rl")
            .at((1,), lambda d: d.macro("G'", "rl", x=mul(x, ZERO)))
            .macro("D'", "rl")
            .at((0,), lambda d: d.macro("H'", "rl"))
            .at((0, 1), lambda d: d.rule("N"))
            .macro("G'")
        ),
    )
    mk("0*x", mul(ZERO, x), lambda c: c.macro("B'").macro(lib["x*0"]))
    # -0 -||- 0
    mk("-0", neg(ZERO), lambda c: c.rule("N", "rl").macro("G'"))
    # --x -||- x
    mk(
        "--x",
        neg(neg(x)),
        lambda c: (
            c.rule("N", "rl")
            .at((0,), lambda d: d.macro("G'", "rl", x=x))
            .macro("D'")
            .at((1,), lambda d: d.macro("G'"))
            .macro("F'")
        ),
    )
    # (-x) * y -||- -(x*y)
    mk("-x*y", mul(neg(x), y), lambda c: c.rule("N", "rl").macro("L'", "rl").rule("N"))
    # (x + y) + -(x + z) -||- y + -z
    mk(
        "cancel",
        add(add(x, y), neg(add(x, z))),
        lambda c: (
            c.at((1,), lambda d: d.macro("I'"))
            .macro("D'")
            .at((1,), lambda d: d.macro("D'", "rl").at((0,), lambda e: e.macro("E'")).macro("D'"))
            .macro("D'", "rl")
            .at((0,), lambda d: d.macro("G'"))
            .rule("N")
        ),
    )
    # x + -(x + z) -||- -z
    mk(
        "cancel-r",
        add(x, neg(add(x, z))),
        lambda c: c.at((1,), lambda d: d.macro("I'")).macro("D'", "rl").at((0,), lambda d: d.macro("G'")).rule("N"),
    )
    # (x + y) + -x -||- y
    mk(
        "cancel-l",
        add(add(x, y), neg(x)),
        lambda c: (
            c.macro("D'")
            .at((1,), lambda d: d.macro("E'"))
            .macro("D'", "rl")
            .at((0,), lambda d: d.macro("G'"))
            .rule("N")
        ),
    )
    return lib


# -- lifting into contexts -----------------------------------------------------------------


def _lift_step_lr(rule: str, s: Mapping[str, Term], ctx: tuple) -> ChainProof:
    """Lifted chain for one rule instance read left to right."""
    kind = ctx[0]
    if rule in GUARDED:
        a, _ = GUARDED[rule]
        lhs = apply_substitution(_guard(a), s)
        inner = {k: v for k, v in s.items() if k not in ("w", "u")}
        W, U = s["w"], s["u"]
        if kind == "neg":
            b = ChainBuilder(neg(lhs))
            b.macro("I'").macro("L'").rule(rule, **inner).macro("L'", "rl").macro("I'", "rl")
        elif kind == "add":
            b = ChainBuilder(add(ctx[1], lhs))
            b.macro("D'", "rl").rule(rule, **inner).macro("D'")
        else:
            chi = ctx[1]
            b = ChainBuilder(mul(chi, lhs))
            (
                b.macro("H'").rule("O", "rl", x=mul(chi, W)).rule("A", "rl", x=chi, y=U)
                .rule("O").rule(rule, **inner)
                .rule("O", "rl", x=mul(chi, W)).rule("A").rule("O").macro("H'", "rl")
            )
        return b.result()
    if rule == "N":
        X = s["x"]
        if kind == "neg":
            b = ChainBuilder(neg(add(ZERO, X)))
            (
                b.rule("N", "rl").rule("O", "rl").macro("M'", "rl").macro("L'")
                .rule("E", x=ZERO, y=X).rule("F").macro("L'", "rl").macro("M'").rule("O").rule("N")
            )
        elif kind == "add":
            b = ChainBuilder(add(ctx[1], add(ZERO, X)))
            b.macro("E'").macro("D'").rule("N").macro("E'")
        else:
            b = ChainBuilder(mul(ctx[1], add(ZERO, X)))
            b.rule("N", "rl").rule("E", x=ZERO, y=X).rule("F").rule("N")
        return b.result()
    if rule == "O":
        P, Q = s["x"], s["y"]
        start = add(P, mul(ONE, Q))
        if kind == "neg":
            b = ChainBuilder(neg(start))
            b.macro("I'").macro("M'").rule("O").macro("I'", "rl")
        elif kind == "add":
            b = ChainBuilder(add(ctx[1], start))
            b.macro("D'", "rl").rule("O").macro("D'")
        else:
            b = ChainBuilder(mul(ctx[1], start))
            b.macro("H'").rule("B", x=ONE, y=Q).rule("C").macro("H'", "rl")
        return b.result()
    raise ValueError(f"no lifting recipe for rule {rule!r}")


def _wrap(ctx: tuple, t: Term) -> Term:
    if ctx[0] == "neg":
        return neg(t)
    return add(ctx[1], t) if ctx[0] == "add" else mul(ctx[1], t)


def context_lift(ch: ChainProof, context: tuple) -> ChainProof:
    """Lift a CR chain into ``('neg',)``, ``('add', chi)`` or ``('mul', chi)``."""
    if context[0] not in ("neg", "add", "mul") or (context[0] != "neg" and len(context) != 2):
        raise ValueError(f"bad context {context!r}")
    out = ChainProof((_wrap(context, ch.start),))
    for st in ch.steps:
        piece = _lift_step_lr(st.rule, st.substitution, context)
        out = out.then(piece if st.direction == "lr" else piece.reversed())
    return out


def lift_at(ch: ChainProof, host: Term, path: tuple[int, ...]) -> ChainProof:
    """Chain from ``host`` to ``host`` with the subterm at ``path`` rewritten by ``ch``.

    Every level of ``path`` multiplies the chain length by a bounded factor,
    so deep positions give long chains.
    """
    if subterm_at(host, path) != ch.start:
        raise ValueError("chain does not start at the given position")
    inner = ch
    for depth in range(len(path), 0, -1):
        parent = subterm_at(host, path[: depth - 1])
        i = path[depth - 1]
        if parent.op == "-":
            inner = context_lift(inner, ("neg",))
        elif parent.op in ("+", "*") and i == 1:
            inner = context_lift(inner, ("add" if parent.op == "+" else "mul", parent.args[0]))
        elif parent.op in ("+", "*"):
            chi = parent.args[1]
            swap = "E'" if parent.op == "+" else "B'"
            kind = "add" if parent.op == "+" else "mul"
            mid = context_lift(inner, (kind, chi))
            before = ChainBuilder(App(parent.op, (inner.start, chi))).macro(swap).result()
            after = ChainBuilder(mid.end).macro(swap).result()
            inner = ChainProof.concat([before, mid, after])
        else:
            raise ValueError(f"cannot lift under {parent.op!r}")
        # wrappers of neighbouring steps often undo each other
        inner = remove_cycles(inner)
    return inner


# -- ground synthesis ---------------------------------------------------------------------


class NotCREqual(ValueError):
    pass


def _is_closed(t: Term) -> bool:
    return not variables(t)


def _sign(lit: Term) -> int:
    k = decode_int(lit)
    return (k > 0) - (k < 0)


def _neg_literal(b: ChainBuilder) -> None:
    # current is -(L) with L a literal
    inner = b.current.args[0]
    k = decode_int(inner)
    if k == 0:
        b.macro(lemma_library()["-0"])
    elif k < 0:
        b.macro(lemma_library()["--x"])


def _add_literals(b: ChainBuilder) -> None:
    """current is P + Q with P, Q literals; rewrite to the literal of the sum."""
    lem = lemma_library()
    P, Q = b.current.args
    p, q = decode_int(P), decode_int(Q)
    if p == 0:
        b.rule("N")
    elif q == 0:
        b.macro("F'")
    elif p > 0 and q > 0:
        # move one unit of Q to the left at a time: P + (1 + Q') to (1 + P) + Q'
        while decode_int(b.current.args[1]) > 1:
            b.macro("D'", "rl").at((0,), lambda d: d.macro("E'"))
        b.macro("E'")
    elif p < 0 and q < 0:
        b.macro("I'", "rl").at((0,), _add_literals)
    elif p < 0:
        b.macro("E'")
        _add_literals(b)
    else:
        if p == 1 and q == -1:
            b.macro("G'")
        elif p == 1:
            b.macro(lem["cancel-r"])
        elif q == -1:
            b.macro(lem["cancel-l"])
        else:
            b.macro(lem["cancel"], x=ONE)
            _add_literals(b)


def _mul_literals(b: ChainBuilder) -> None:
    lem = lemma_library()
    P, Q = b.current.args
    p, q = decode_int(P), decode_int(Q)
    if p == 0:
        b.macro(lem["0*x"])
    elif q == 0:
        b.macro(lem["x*0"])
    elif p == 1:
        b.macro(lem["1*x"])
    elif p < 0:
        b.macro(lem["-x*y"]).at((0,), _mul_literals)
        _neg_literal(b)
    else:
        # (1 + P') * Q to Q + P' * Q, then accumulate on the left so that no
        # sub-chain is lifted more than one level
        _peel(b)
        while decode_int(b.current.args[1].args[0]) > 1:
            b.at((1,), _peel).macro("D'", "rl").at((0,), _add_literals)
        b.at((1,), lambda d: d.macro(lem["1*x"]))
        _add_literals(b)


def _peel(b: ChainBuilder) -> None:
    # (1 + P) * Q  to  Q + P * Q
    (
        b.macro("B'").macro("H'")
        .at((0,), lambda d: d.macro("C'"))
        .at((1,), lambda d: d.macro("B'"))
    )


def literal_chain(t: Term) -> ChainProof:
    """Chain from a closed ring term to ``encode_int`` of its value."""
    if not _is_closed(t):
        raise ValueError("open terms are not supported")
    b = ChainBuilder(t)
    _to_literal(b)
    ch = b.result()
    assert decode_int(ch.end) is not None
    return ch


def _to_literal(b: ChainBuilder) -> None:
    t = b.current
    if decode_int(t) is not None:
        return
    if not isinstance(t, App) or t.op not in RING:
        raise TermError(f"not a closed ring term: {t}")
    for i in range(len(t.args)):
        if decode_int(t.args[i]) is None:
            b.at((i,), _to_literal)
    if t.op == "-":
        _neg_literal(b)
    elif t.op == "+":
        _add_literals(b)
    else:
        _mul_literals(b)


def synth_ground_chain(s: Term, t: Term) -> ChainProof:
    """A primitive CR chain between two closed CR-equal terms."""
    if not (_is_closed(s) and _is_closed(t)):
        raise ValueError("open terms are not supported")
    if normalize(s) != normalize(t):
        raise NotCREqual(f"{s} and {t} have different normal forms")
    if s == t:
        return ChainProof((s,))
    return remove_cycles(literal_chain(s).then(literal_chain(t).reversed()))


def remove_cycles(ch: ChainProof) -> ChainProof:
    """Drop the detour between two occurrences of the same formula."""
    formulas, steps = [ch.formulas[0]], []
    where = {ch.formulas[0]: 0}
    for st, f in zip(ch.steps, ch.formulas[1:]):
        if f in where:
            k = where[f]
            for g in formulas[k + 1:]:
                del where[g]
            formulas, steps = formulas[: k + 1], steps[:k]
            continue
        formulas.append(f)
        steps.append(st)
        where[f] = len(formulas) - 1
    return ChainProof(tuple(formulas), tuple(steps))
