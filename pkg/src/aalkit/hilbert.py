"""Hilbert calculi, derivations, chain proofs and a bounded prover."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .terms import (
    Signature,
    Term,
    Var,
    apply_substitution,
    format_term,
    match_term,
    parse_term,
    size,
    variables,
)

__all__ = [
    "Rule",
    "HilbertCalculus",
    "Premise",
    "RuleApp",
    "Step",
    "Derivation",
    "ChainStep",
    "ChainProof",
    "DerivedRuleMacro",
    "CheckReport",
    "SearchLimitExceeded",
    "bidirectional",
    "check_derivation",
    "check_chain",
    "expand_macro",
    "chain_to_derivation",
    "bounded_prove",
    "parse_calculus",
    "format_calculus",
    "parse_derivation",
    "format_derivation",
    "parse_chain",
    "format_chain",
]


@dataclass(frozen=True)
class Rule:
    name: str
    premises: tuple[Term, ...]
    conclusion: Term
    scheme: str | None = None
    direction: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))

    def variables(self) -> list[str]:
        return variables(*self.premises, self.conclusion)

    def __str__(self):
        prem = " ; ".join(format_term(p) for p in self.premises)
        return f"{self.name} : {prem} |- {format_term(self.conclusion)}".replace(":  |-", ": |-")


def _suffixes(base: str, n: int) -> list[str]:
    return [base] if n == 1 else [f"{base}{i}" for i in range(1, n + 1)]


def bidirectional(name: str, left: Sequence[Term], right: Sequence[Term]) -> list[Rule]:
    """Expand ``left -||- right`` into directed rules, one per conclusion per direction."""
    left, right = tuple(left), tuple(right)
    rules = [
        Rule(f"{name}/{suf}", left, phi, scheme=name, direction="lr")
        for suf, phi in zip(_suffixes("lr", len(right)), right)
    ]
    rules += [
        Rule(f"{name}/{suf}", right, psi, scheme=name, direction="rl")
        for suf, psi in zip(_suffixes("rl", len(left)), left)
    ]
    return rules


@dataclass(frozen=True)
class HilbertCalculus:
    signature: Signature
    rules: tuple[Rule, ...]
    schemes: Mapping[str, tuple[tuple[Term, ...], tuple[Term, ...]]] = field(default_factory=dict)

    def __post_init__(self):
        rules = tuple(self.rules)
        object.__setattr__(self, "rules", rules)
        object.__setattr__(self, "schemes", dict(self.schemes))
        names = [r.name for r in rules]
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise ValueError(f"duplicate rule names: {sorted(dup)}")
        for r in rules:
            for t in (*r.premises, r.conclusion):
                self.signature.check(t)
        object.__setattr__(self, "_by_name", {r.name: r for r in rules})

    @classmethod
    def build(cls, signature: Signature, items: Iterable) -> HilbertCalculus:
        """Assemble from directed rules and ``(name, left, right)`` schemes."""
        rules, schemes = [], {}
        for it in items:
            if isinstance(it, Rule):
                rules.append(it)
            else:
                name, left, right = it
                schemes[name] = (tuple(left), tuple(right))
                rules.extend(bidirectional(name, left, right))
        return cls(signature, tuple(rules), schemes)

    def __getitem__(self, name: str) -> Rule:
        return self._by_name[name]

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __len__(self):
        return len(self.rules)

    def directed(self, scheme: str, direction: str) -> Rule:
        rule = self._by_name.get(f"{scheme}/{direction}")
        if rule is None:
            raise KeyError(f"no rule {scheme}/{direction}")
        return rule

    def is_single_premise_bidirectional(self) -> bool:
        return all(
            len(left) == 1 and len(right) == 1 for left, right in self.schemes.values()
        ) and all(r.scheme is not None for r in self.rules)

    def restrict(self, names: Iterable[str]) -> HilbertCalculus:
        keep = set(names)
        rules = tuple(r for r in self.rules if r.name in keep)
        schemes = {s: v for s, v in self.schemes.items() if any(r.scheme == s for r in rules)}
        return HilbertCalculus(self.signature, rules, schemes)


# -- derivations ----------------------------------------------------------------


@dataclass(frozen=True)
class Premise:
    pass


@dataclass(frozen=True)
class RuleApp:
    rule: str
    substitution: Mapping[str, Term]
    refs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "substitution", dict(self.substitution))
        object.__setattr__(self, "refs", tuple(self.refs))

    def __hash__(self):
        return hash((self.rule, tuple(sorted(self.substitution.items())), self.refs))


@dataclass(frozen=True)
class Step:
    formula: Term
    justification: Premise | RuleApp


@dataclass(frozen=True)
class Derivation:
    premises: tuple[Term, ...]
    steps: tuple[Step, ...]

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))
        object.__setattr__(self, "steps", tuple(self.steps))

    @property
    def conclusion(self) -> Term:
        return self.steps[-1].formula

    def __len__(self):
        return len(self.steps)


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    index: int | None = None
    message: str = ""
    expected: Term | None = None
    found: Term | None = None

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "ok"
        s = f"step {self.index}: {self.message}"
        if self.expected is not None:
            s += f" (expected {self.expected}, found {self.found})"
        return s


def _fail(index, message, expected=None, found=None) -> CheckReport:
    return CheckReport(False, index, message, expected, found)


def check_derivation(c: HilbertCalculus, d: Derivation) -> CheckReport:
    """Replay ``d`` step by step; never searches."""
    if not d.steps:
        return _fail(None, "empty derivation")
    premises = set(d.premises)
    for k, step in enumerate(d.steps):
        just = step.justification
        if isinstance(just, Premise):
            if step.formula not in premises:
                return _fail(k, "formula is not a premise", None, step.formula)
            continue
        if just.rule not in c:
            return _fail(k, f"unknown rule {just.rule!r}")
        rule = c[just.rule]
        if len(just.refs) != len(rule.premises):
            return _fail(k, f"rule {rule.name} has {len(rule.premises)} premises, {len(just.refs)} references given")
        for j, (ref, pat) in enumerate(zip(just.refs, rule.premises)):
            if not 0 <= ref < k:
                return _fail(k, f"reference {ref} does not point to an earlier step")
            want = apply_substitution(pat, just.substitution)
            got = d.steps[ref].formula
            if want != got:
                return _fail(k, f"premise {j} of {rule.name} not matched by step {ref}", want, got)
        want = apply_substitution(rule.conclusion, just.substitution)
        if want != step.formula:
            return _fail(k, f"conclusion of {rule.name} does not match", want, step.formula)
    return CheckReport(True)


# -- chain proofs ------------------------------------------------------------------


@dataclass(frozen=True)
class ChainStep:
    rule: str
    substitution: Mapping[str, Term]
    direction: str

    def __post_init__(self):
        if self.direction not in ("lr", "rl"):
            raise ValueError(f"direction must be 'lr' or 'rl', not {self.direction!r}")
        object.__setattr__(self, "substitution", dict(self.substitution))

    def __hash__(self):
        return hash((self.rule, tuple(sorted(self.substitution.items())), self.direction))

    def flipped(self) -> ChainStep:
        return ChainStep(self.rule, self.substitution, "rl" if self.direction == "lr" else "lr")


@dataclass(frozen=True)
class ChainProof:
    """Formulas ``a1..an`` and, between neighbours, the bidirectional rule instance used."""

    formulas: tuple[Term, ...]
    steps: tuple[ChainStep, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "formulas", tuple(self.formulas))
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.formulas:
            raise ValueError("a chain needs at least one formula")
        if len(self.steps) != len(self.formulas) - 1:
            raise ValueError("a chain of n formulas needs n-1 steps")

    @property
    def start(self) -> Term:
        return self.formulas[0]

    @property
    def end(self) -> Term:
        return self.formulas[-1]

    def __len__(self):
        return len(self.steps)

    def reversed(self) -> ChainProof:
        return ChainProof(self.formulas[::-1], tuple(s.flipped() for s in reversed(self.steps)))

    def then(self, other: ChainProof) -> ChainProof:
        if other.start != self.end:
            raise ValueError(f"cannot join chains: {self.end} != {other.start}")
        return ChainProof(self.formulas + other.formulas[1:], self.steps + other.steps)

    @staticmethod
    def concat(chains: Iterable[ChainProof]) -> ChainProof:
        chains = list(chains)
        out = chains[0]
        for ch in chains[1:]:
            out = out.then(ch)
        return out

    def substitute(self, s: Mapping[str, Term]) -> ChainProof:
        """Instance of the whole chain under ``s`` (rule variables are composed, not renamed)."""
        steps = tuple(
            ChainStep(st.rule, {v: apply_substitution(t, s) for v, t in st.substitution.items()}, st.direction)
            for st in self.steps
        )
        return ChainProof(tuple(apply_substitution(f, s) for f in self.formulas), steps)


def check_chain(c: HilbertCalculus, ch: ChainProof) -> CheckReport:
    if not c.is_single_premise_bidirectional():
        return _fail(None, "calculus is not made of single-premise bidirectional rules")
    for k, st in enumerate(ch.steps):
        try:
            rule = c.directed(st.rule, st.direction)
        except KeyError:
            return _fail(k, f"unknown rule {st.rule}/{st.direction}")
        a, b = ch.formulas[k], ch.formulas[k + 1]
        want = apply_substitution(rule.premises[0], st.substitution)
        if want != a:
            return _fail(k, f"{st.rule}/{st.direction} does not apply", want, a)
        want = apply_substitution(rule.conclusion, st.substitution)
        if want != b:
            return _fail(k, f"{st.rule}/{st.direction} gives a different result", want, b)
    return CheckReport(True)


def chain_to_derivation(c: HilbertCalculus, ch: ChainProof) -> Derivation:
    steps = [Step(ch.start, Premise())]
    for k, st in enumerate(ch.steps):
        rule = c.directed(st.rule, st.direction)
        steps.append(Step(ch.formulas[k + 1], RuleApp(rule.name, st.substitution, (k,))))
    return Derivation((ch.start,), tuple(steps))


@dataclass(frozen=True)
class DerivedRuleMacro:
    """A parametric chain; ``params`` are the variables a caller must bind."""

    name: str
    template: ChainProof
    params: tuple[str, ...]

    @property
    def lhs(self) -> Term:
        return self.template.start

    @property
    def rhs(self) -> Term:
        return self.template.end


def expand_macro(m: DerivedRuleMacro, s: Mapping[str, Term], direction: str = "lr") -> ChainProof:
    missing = [p for p in m.params if p not in s]
    if missing:
        raise KeyError(f"macro {m.name}: parameters not bound: {missing}")
    return _expand(m, tuple(s[p] for p in m.params), direction)


@lru_cache(maxsize=4096)
def _expand(m: DerivedRuleMacro, args: tuple[Term, ...], direction: str) -> ChainProof:
    ch = m.template.substitute(dict(zip(m.params, args)))
    return ch if direction == "lr" else ch.reversed()


# -- bounded forward search -----------------------------------------------------------


class SearchLimitExceeded(RuntimeError):
    """The prover's formula budget ran out before the depth bound was reached."""


def bounded_prove(
    c: HilbertCalculus,
    premises: Iterable[Term],
    goal: Term,
    depth: int,
    size_cap: int,
    max_formulas: int = 20000,
) -> Derivation | None:
    """Forward chaining for at most ``depth`` rounds.

    Rule premises are matched against already derived formulas; variables
    occurring only in a rule's conclusion get fresh names.  A new formula is
    discarded when a known one subsumes it by a substitution fixing the
    premise variables.  ``None`` means "not found within the bounds" and is
    not evidence of non-derivability.
    """
    if depth <= 0 or size_cap <= 0:
        raise ValueError("depth and size_cap must be positive")
    premises = tuple(dict.fromkeys(premises))
    rigid = set(variables(*premises))
    avoid = rigid | set(variables(goal)) | {v for r in c.rules for v in r.variables()}
    fresh = _FreshNames(avoid)

    # formula -> (rule name, substitution, parent formulas) or None for premises
    origin: dict[Term, tuple | None] = {}
    known: list[Term] = []
    by_head: dict[str | None, list[Term]] = {}

    def add(f, how):
        origin[f] = how
        known.append(f)
        by_head.setdefault(_head(f), []).append(f)

    def subsumer(f):
        for g in by_head.get(_head(f), []) + by_head.get(None, []):
            s = match_term(g, f)
            if s is not None and all(s.get(v, Var(v)) == Var(v) for v in rigid):
                return g, s
        return None

    for p in premises:
        add(p, None)

    found = subsumer(goal)
    for _ in range(depth):
        if found:
            break
        new: list[tuple[Term, tuple]] = []
        snapshot = list(known)
        snap_heads = {h: list(fs) for h, fs in by_head.items()}
        for rule in c.rules:
            for s, parents in _premise_matches(rule.premises, snapshot, snap_heads):
                extra = {v: Var(fresh()) for v in variables(rule.conclusion) if v not in s}
                full = {**s, **extra}
                concl = apply_substitution(rule.conclusion, full)
                if size(concl) > size_cap or concl in origin:
                    continue
                new.append((concl, (rule.name, full, parents)))
        added = False
        for f, how in new:
            if f in origin or subsumer(f):
                continue
            add(f, how)
            added = True
            if len(known) > max_formulas:
                raise SearchLimitExceeded(f"more than {max_formulas} formulas after {_ + 1} rounds")
        found = subsumer(goal)
        if not added:
            break
    if not found:
        return None
    general, s = found
    return _extract(premises, origin, general, s)


class _FreshNames:
    def __init__(self, avoid):
        self.avoid = set(avoid)
        self.k = 0

    def __call__(self):
        while f"_{self.k}" in self.avoid:
            self.k += 1
        self.k += 1
        return f"_{self.k - 1}"


def _head(t: Term):
    return None if isinstance(t, Var) else t.op


def _premise_matches(patterns, pool_all, pool_by_head, s=None, parents=()):
    s = s or {}
    if not patterns:
        yield s, parents
        return
    first, rest = patterns[0], patterns[1:]
    inst = apply_substitution(first, s)
    if isinstance(inst, Var):
        pool = pool_all
    else:
        pool = pool_by_head.get(inst.op, ())
    for f in pool:
        m = match_term(first, f, s)
        if m is not None:
            yield from _premise_matches(rest, pool_all, pool_by_head, m, parents + (f,))


def _extract(premises, origin, target, subst) -> Derivation:
    """Linearise the proof DAG of ``target`` and instantiate it by ``subst``."""
    order: list[Term] = []
    seen = set()

    def visit(f):
        if f in seen:
            return
        seen.add(f)
        how = origin[f]
        if how is not None:
            for p in how[2]:
                visit(p)
        order.append(f)

    visit(target)
    step_of: dict[Term, int] = {}  # original formula -> step index
    emitted: dict[Term, int] = {}  # instantiated formula -> step index
    steps = []
    for f in order:
        how = origin[f]
        g = apply_substitution(f, subst)
        if g not in emitted:
            if how is None:
                steps.append(Step(g, Premise()))
            else:
                name, full, parents = how
                sub = {v: apply_substitution(t, subst) for v, t in full.items()}
                steps.append(Step(g, RuleApp(name, sub, tuple(step_of[p] for p in parents))))
            emitted[g] = len(steps) - 1
        step_of[f] = emitted[g]
    return Derivation(premises, tuple(steps))


# -- file formats -----------------------------------------------------------------------


def _split_top(text: str, seps: Sequence[str]) -> list[tuple[str | None, str]]:
    """Split on separator tokens that occur at parenthesis depth 0."""
    out: list[tuple[str | None, str]] = []
    cur: list[str] = []
    sep = None
    d = 0
    for tok in text.replace("(", " ( ").replace(")", " ) ").split():
        if tok == "(":
            d += 1
        elif tok == ")":
            d -= 1
        if d == 0 and tok in seps:
            out.append((sep, " ".join(cur)))
            cur, sep = [], tok
            continue
        cur.append(tok)
    out.append((sep, " ".join(cur)))
    return out


def _term_list(text: str, sig: Signature) -> list[Term]:
    parts = [p for _, p in _split_top(text, [";"])]
    return [parse_term(p, sig) for p in parts if p.strip()]


def parse_calculus(text: str, sig: Signature) -> HilbertCalculus:
    """Lines ``name : p1 ; p2 |- conclusion`` or ``name : left <-> right``."""
    items = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ValueError(f"line {lineno}: missing 'name :'")
        name, body = (x.strip() for x in line.split(":", 1))
        parts = _split_top(body, ["|-", "<->"])
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected exactly one '|-' or '<->'")
        (_, left), (sep, right) = parts
        if sep == "|-":
            concl = _term_list(right, sig)
            if len(concl) != 1:
                raise ValueError(f"line {lineno}: a rule has exactly one conclusion")
            items.append(Rule(name, tuple(_term_list(left, sig)), concl[0]))
        else:
            items.append((name, _term_list(left, sig), _term_list(right, sig)))
    return HilbertCalculus.build(sig, items)


def format_calculus(c: HilbertCalculus) -> str:
    lines = []
    done = set()
    for r in c.rules:
        if r.scheme is None:
            lines.append(str(r))
        elif r.scheme not in done:
            done.add(r.scheme)
            left, right = c.schemes[r.scheme]
            lines.append(
                f"{r.scheme} : {' ; '.join(map(format_term, left))} <-> {' ; '.join(map(format_term, right))}"
            )
    return "\n".join(lines) + "\n"


def _format_subst(s: Mapping[str, Term]) -> str:
    return "{" + ", ".join(f"{v}:={format_term(t)}" for v, t in s.items()) + "}"


def _parse_subst(text: str, sig: Signature) -> dict[str, Term]:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ValueError(f"bad substitution {text!r}")
    out = {}
    for item in text[1:-1].split(","):
        if not item.strip():
            continue
        v, t = item.split(":=", 1)
        out[v.strip()] = parse_term(t, sig)
    return out


def format_derivation(d: Derivation) -> str:
    lines = ["premises: " + " ; ".join(map(format_term, d.premises))]
    for k, st in enumerate(d.steps, 1):
        j = st.justification
        if isinstance(j, Premise):
            why = "premise"
        else:
            refs = ", ".join(str(r + 1) for r in j.refs)
            why = f"rule({j.rule}, {_format_subst(j.substitution)}, [{refs}])"
        lines.append(f"{k}. {format_term(st.formula)} BY {why}")
    return "\n".join(lines) + "\n"


def parse_derivation(text: str, sig: Signature) -> Derivation:
    premises = None
    steps = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("premises:"):
            premises = _term_list(line[len("premises:"):], sig)
            continue
        num, rest = line.split(".", 1)
        if int(num) != len(steps) + 1:
            raise ValueError(f"line {lineno}: expected step {len(steps) + 1}")
        formula, why = rest.rsplit(" BY ", 1)
        f = parse_term(formula, sig)
        why = why.strip()
        if why == "premise":
            steps.append(Step(f, Premise()))
            continue
        if not (why.startswith("rule(") and why.endswith(")")):
            raise ValueError(f"line {lineno}: bad justification {why!r}")
        inner = why[5:-1]
        name, rest2 = inner.split(",", 1)
        lb, rb = rest2.index("{"), rest2.rindex("}")
        subst = _parse_subst(rest2[lb:rb + 1], sig)
        refs_txt = rest2[rb + 1:].strip().lstrip(",").strip()
        refs = tuple(int(x) - 1 for x in refs_txt.strip("[]").split(",") if x.strip())
        steps.append(Step(f, RuleApp(name.strip(), subst, refs)))
    if premises is None:
        premises = [s.formula for s in steps if isinstance(s.justification, Premise)]
    return Derivation(tuple(premises), tuple(steps))


def format_chain(ch: ChainProof) -> str:
    lines = [format_term(ch.start)]
    for st, f in zip(ch.steps, ch.formulas[1:]):
        lines.append(f"  BY {st.rule}/{st.direction} {_format_subst(st.substitution)}")
        lines.append(format_term(f))
    return "\n".join(lines) + "\n"


def parse_chain(text: str, sig: Signature) -> ChainProof:
    formulas, steps = [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("BY "):
            ref, subst = line[3:].split(" ", 1) if " " in line[3:] else (line[3:], "{}")
            rule, direction = ref.rsplit("/", 1)
            steps.append(ChainStep(rule, _parse_subst(subst, sig), direction))
        else:
            formulas.append(parse_term(line, sig))
    return ChainProof(tuple(formulas), tuple(steps))
