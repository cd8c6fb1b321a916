"""Finite algebras and logical matrices.

Elements of an algebra of size ``n`` are ``0..n-1`` and each operation is a
numpy array with one axis per argument.  Terms are evaluated over whole
batches of assignments at once, which keeps the exhaustive model checks fast.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .hilbert import HilbertCalculus, Rule
from .terms import Equation, Signature, Term, Var, variables

__all__ = [
    "GuardExceeded",
    "FiniteAlgebra",
    "LogicalMatrix",
    "Congruence",
    "ModelCheck",
    "evaluate",
    "evaluate_batch",
    "validates_equation",
    "find_counterexample",
    "unary_polynomials",
    "leibniz_congruence",
    "largest_compatible_congruence_bruteforce",
    "all_congruences",
    "MAX_ENUM",
    "parse_algebra",
    "format_algebra",
    "parse_matrix",
    "format_matrix",
    "parse_filter",
    "is_model",
    "generate_filter",
    "enumerate_filters",
    "suszko_congruence",
    "in_alg_l",
]

MAX_ENUM = 6


class GuardExceeded(ValueError):
    """An exhaustive enumeration was asked for on a carrier that is too large."""


def _guard(n: int, what: str):
    if n > MAX_ENUM:
        raise GuardExceeded(f"{what}: carrier size {n} exceeds the enumeration guard {MAX_ENUM}")


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    signature: Signature
    size: int
    tables: Mapping[str, np.ndarray]

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("carrier must be non-empty")
        tables = {}
        for sym, ar in self.signature.operations.items():
            if sym not in self.tables:
                raise ValueError(f"missing table for {sym!r}")
            t = np.asarray(self.tables[sym], dtype=np.int64)
            if t.shape != (self.size,) * ar:
                raise ValueError(f"table for {sym!r} has shape {t.shape}, expected {(self.size,) * ar}")
            if t.size and (t.min() < 0 or t.max() >= self.size):
                raise ValueError(f"table for {sym!r} has entries outside 0..{self.size - 1}")
            t.setflags(write=False)
            tables[sym] = t
        extra = set(self.tables) - set(tables)
        if extra:
            raise ValueError(f"tables for undeclared symbols: {sorted(extra)}")
        object.__setattr__(self, "tables", tables)

    @classmethod
    def from_functions(cls, signature: Signature, size: int, funcs: Mapping) -> FiniteAlgebra:
        """Tabulate Python callables (constants may be given as ints)."""
        tables = {}
        for sym, ar in signature.operations.items():
            f = funcs[sym]
            if ar == 0:
                tables[sym] = np.array(f() if callable(f) else f)
            else:
                t = np.empty((size,) * ar, dtype=np.int64)
                for args in itertools.product(range(size), repeat=ar):
                    t[args] = f(*args)
                tables[sym] = t
        return cls(signature, size, tables)

    @property
    def carrier(self) -> range:
        return range(self.size)

    def op(self, sym: str, *args: int) -> int:
        return int(self.tables[sym][tuple(args)])

    def __eq__(self, other):
        return (
            isinstance(other, FiniteAlgebra)
            and self.signature == other.signature
            and self.size == other.size
            and all(np.array_equal(self.tables[s], other.tables[s]) for s in self.tables)
        )

    def __hash__(self):
        return hash((self.signature, self.size, tuple(t.tobytes() for t in self.tables.values())))


@dataclass(frozen=True)
class LogicalMatrix:
    algebra: FiniteAlgebra
    filter: frozenset[int]

    def __post_init__(self):
        f = frozenset(int(a) for a in self.filter)
        if any(not 0 <= a < self.algebra.size for a in f):
            raise ValueError("filter is not a subset of the carrier")
        object.__setattr__(self, "filter", f)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.algebra.size, dtype=bool)
        m[list(self.filter)] = True
        return m


class Congruence:
    """A congruence of ``algebra`` given by a representative map (smallest element of each class)."""

    __slots__ = ("algebra", "rep")

    def __init__(self, algebra: FiniteAlgebra, labels: Iterable[int], check: bool = True):
        labels = list(labels)
        if len(labels) != algebra.size:
            raise ValueError("one label per element required")
        first: dict[int, int] = {}
        rep = tuple(first.setdefault(l, a) for a, l in enumerate(labels))
        self.algebra = algebra
        self.rep = rep
        if check and not self._compatible_with_ops():
            raise ValueError("partition is not compatible with the operations")

    @classmethod
    def identity(cls, algebra: FiniteAlgebra) -> Congruence:
        return cls(algebra, range(algebra.size), check=False)

    @classmethod
    def total(cls, algebra: FiniteAlgebra) -> Congruence:
        return cls(algebra, [0] * algebra.size, check=False)

    def _compatible_with_ops(self) -> bool:
        rep = np.array(self.rep)
        for t in self.algebra.tables.values():
            if t.ndim == 0:
                continue
            # changing one argument within its class must not change the class of the result
            for axis in range(t.ndim):
                moved = np.take(t, rep, axis=axis)
                if not np.array_equal(rep[moved], rep[t]):
                    return False
        return True

    def related(self, a: int, b: int) -> bool:
        return self.rep[a] == self.rep[b]

    def classes(self) -> list[tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for a, r in enumerate(self.rep):
            out.setdefault(r, []).append(a)
        return [tuple(c) for c in out.values()]

    def is_identity(self) -> bool:
        return all(r == a for a, r in enumerate(self.rep))

    def is_total(self) -> bool:
        return all(r == 0 for r in self.rep)

    def compatible_with(self, subset) -> bool:
        subset = set(subset)
        return all((a in subset) == (self.rep[a] in subset) for a in range(len(self.rep)))

    def __le__(self, other: Congruence) -> bool:
        return all(other.rep[a] == other.rep[r] for a, r in enumerate(self.rep))

    def meet(self, other: Congruence) -> Congruence:
        return Congruence(self.algebra, [(r, s) for r, s in zip(self.rep, other.rep)], check=False)

    def __eq__(self, other):
        return isinstance(other, Congruence) and self.rep == other.rep

    def __hash__(self):
        return hash(self.rep)

    def __repr__(self):
        return "Congruence(" + " | ".join(" ".join(map(str, c)) for c in self.classes()) + ")"

    def __str__(self):
        return " | ".join(" ".join(map(str, c)) for c in self.classes())


# -- evaluation -----------------------------------------------------------------


def evaluate_batch(a: FiniteAlgebra, t: Term, env: Mapping[str, np.ndarray], shape=None):
    """Evaluate ``t`` on arrays of variable values (all of one shape)."""
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise KeyError(f"unbound variable {t.name!r}") from None
    table = a.tables[t.op]
    if not t.args:
        if shape is None:
            shape = next(iter(env.values())).shape if env else ()
        return np.broadcast_to(table, shape)
    args = tuple(evaluate_batch(a, s, env, shape) for s in t.args)
    return table[args]


def evaluate(a: FiniteAlgebra, t: Term, env: Mapping[str, int]) -> int:
    arrays = {v: np.asarray(x) for v, x in env.items()}
    return int(evaluate_batch(a, t, arrays, ()))


def _assignments(n: int, names: list[str]) -> dict[str, np.ndarray]:
    if not names:
        return {}
    grids = np.indices((n,) * len(names)).reshape(len(names), -1)
    return {v: grids[i] for i, v in enumerate(names)}


def _batch_shape(n: int, names: list[str]) -> tuple[int, ...]:
    return (n ** len(names),) if names else (1,)


def find_counterexample(a: FiniteAlgebra, e: Equation) -> dict[str, int] | None:
    names = variables(e.lhs, e.rhs)
    env = _assignments(a.size, names)
    shape = _batch_shape(a.size, names)
    bad = np.nonzero(evaluate_batch(a, e.lhs, env, shape) != evaluate_batch(a, e.rhs, env, shape))[0]
    if not len(bad):
        return None
    i = bad[0]
    return {v: int(env[v][i]) for v in names}


def validates_equation(a: FiniteAlgebra, e: Equation) -> bool:
    return find_counterexample(a, e) is None


# -- Leibniz congruence ---------------------------------------------------------------


def unary_polynomials(a: FiniteAlgebra) -> frozenset[tuple[int, ...]]:
    """Least set of value vectors containing the identity and the constants,
    closed under ``p -> f(b1, .., p, .., bk)`` for every operation ``f``,
    argument position and parameter tuple ``b``.
    """
    n = a.size
    # every translation a -> f(b1,..,a,..,bk) as an n-tuple
    translations = set()
    for t in a.tables.values():
        for axis in range(t.ndim):
            moved = np.moveaxis(t, axis, -1).reshape(-1, n)
            translations.update(tuple(int(v) for v in row) for row in moved)
    start = [tuple(range(n))] + [(c,) * n for c in range(n)]
    seen = set(start)
    frontier = start
    # plain tuples beat numpy here: carriers are tiny and the sets are sparse
    while frontier:
        nxt = []
        for p in frontier:
            for tr in translations:
                q = tuple([tr[i] for i in p])
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return frozenset(seen)


def leibniz_congruence(m: LogicalMatrix, polys=None) -> Congruence:
    """Largest congruence compatible with the filter, via indiscernibility under unary polynomials."""
    a = m.algebra
    polys = unary_polynomials(a) if polys is None else polys
    values = np.array(sorted(polys), dtype=np.int64).reshape(-1, a.size)
    inside = m.mask()[values]  # poly x element
    labels = [inside[:, e].tobytes() for e in range(a.size)]
    theta = Congruence(a, labels, check=False)
    if not theta._compatible_with_ops() or not theta.compatible_with(m.filter):
        raise AssertionError("indiscernibility relation is not a compatible congruence")
    return theta


def _set_partitions(n: int):
    """Restricted growth strings of length n."""
    def rec(prefix, k):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for b in range(k + 1):
            yield from rec(prefix + [b], max(k, b + 1))
    yield from rec([], 0)


def all_congruences(a: FiniteAlgebra) -> list[Congruence]:
    _guard(a.size, "congruence enumeration")
    out = []
    for labels in _set_partitions(a.size):
        c = Congruence(a, labels, check=False)
        if c._compatible_with_ops():
            out.append(c)
    return out


def largest_compatible_congruence_bruteforce(m: LogicalMatrix, congruences=None) -> Congruence:
    """Search every congruence; ``congruences`` may be passed to reuse an enumeration."""
    congruences = all_congruences(m.algebra) if congruences is None else congruences
    cands = [c for c in congruences if c.compatible_with(m.filter)]
    best = min(cands, key=lambda c: len(c.classes()))
    if not all(c <= best for c in cands):
        raise AssertionError("compatible congruences have no largest element")
    return best


# -- models and filters -------------------------------------------------------------------


@dataclass(frozen=True)
class ModelCheck:
    ok: bool
    rule: Rule | None = None
    assignment: Mapping[str, int] | None = None
    rules_checked: int = 0
    assignments_checked: int = 0

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return f"model ({self.rules_checked} rules, {self.assignments_checked} assignments)"
        env = ", ".join(f"{v}={x}" for v, x in self.assignment.items())
        return f"rule {self.rule.name} fails under {env}"


def _rule_violations(a: FiniteAlgebra, rule: Rule, mask: np.ndarray):
    names = rule.variables()
    env = _assignments(a.size, names)
    shape = _batch_shape(a.size, names)
    ok_prem = np.ones(shape, dtype=bool)
    for p in rule.premises:
        ok_prem &= mask[evaluate_batch(a, p, env, shape)]
    concl = evaluate_batch(a, rule.conclusion, env, shape)
    return names, env, ok_prem, concl, int(np.prod(shape))


def is_model(c: HilbertCalculus, m: LogicalMatrix) -> ModelCheck:
    mask = m.mask()
    total = 0
    for k, rule in enumerate(c.rules):
        names, env, ok_prem, concl, count = _rule_violations(m.algebra, rule, mask)
        total += count
        bad = np.nonzero(ok_prem & ~mask[concl])[0]
        if len(bad):
            i = bad[0]
            return ModelCheck(False, rule, {v: int(env[v][i]) for v in names}, k + 1, total)
    return ModelCheck(True, None, None, len(c.rules), total)


def generate_filter(c: HilbertCalculus, a: FiniteAlgebra, seed) -> frozenset[int]:
    mask = np.zeros(a.size, dtype=bool)
    mask[list(seed)] = True
    changed = True
    while changed:
        changed = False
        for rule in c.rules:
            _, _, ok_prem, concl, _ = _rule_violations(a, rule, mask)
            new = np.unique(concl[ok_prem])
            if not mask[new].all():
                mask[new] = True
                changed = True
    return frozenset(int(x) for x in np.nonzero(mask)[0])


def enumerate_filters(c: HilbertCalculus, a: FiniteAlgebra) -> list[frozenset[int]]:
    """All deductive filters, smallest first."""
    _guard(a.size, "filter enumeration")
    out = []
    for r in range(a.size + 1):
        for sub in itertools.combinations(range(a.size), r):
            if is_model(c, LogicalMatrix(a, frozenset(sub))):
                out.append(frozenset(sub))
    return out


def suszko_congruence(c: HilbertCalculus, a: FiniteAlgebra, f, filters=None, polys=None) -> Congruence:
    f = frozenset(f)
    filters = enumerate_filters(c, a) if filters is None else filters
    polys = unary_polynomials(a) if polys is None else polys
    out = Congruence.total(a)
    for g in filters:
        if f <= g:
            out = out.meet(leibniz_congruence(LogicalMatrix(a, g), polys))
    return out


def in_alg_l(c: HilbertCalculus, a: FiniteAlgebra) -> bool:
    filters = enumerate_filters(c, a)
    polys = unary_polynomials(a)
    return any(suszko_congruence(c, a, g, filters, polys).is_identity() for g in filters)


# -- file formats ---------------------------------------------------------------------


def parse_algebra(text: str, name: str = "algebra") -> FiniteAlgebra:
    """``carrier n`` then, per symbol, ``op name arity`` followed by the table (row-major)."""
    toks = " ".join(line.split("#", 1)[0] for line in text.splitlines()).split()
    if len(toks) < 2 or toks[0] != "carrier":
        raise ValueError("algebra file must start with 'carrier n'")
    n = int(toks[1])
    i = 2
    ops, tables = {}, {}
    while i < len(toks):
        if toks[i] != "op":
            raise ValueError(f"expected 'op', got {toks[i]!r}")
        sym, ar = toks[i + 1], int(toks[i + 2])
        cnt = n ** ar
        vals = [int(x) for x in toks[i + 3:i + 3 + cnt]]
        if len(vals) != cnt:
            raise ValueError(f"table for {sym!r} needs {cnt} entries")
        ops[sym] = ar
        tables[sym] = np.array(vals, dtype=np.int64).reshape((n,) * ar)
        i += 3 + cnt
    return FiniteAlgebra(Signature(name, ops), n, tables)


def format_algebra(a: FiniteAlgebra) -> str:
    lines = [f"carrier {a.size}"]
    for sym, ar in a.signature.operations.items():
        lines.append(f"op {sym} {ar}")
        t = a.tables[sym]
        if ar == 0:
            lines.append(str(int(t)))
        else:
            rows = t.reshape(-1, a.size)
            lines.extend(" ".join(str(int(x)) for x in row) for row in rows)
    return "\n".join(lines) + "\n"


def parse_filter(text: str) -> frozenset[int]:
    return frozenset(int(x) for x in text.replace(",", " ").split())


def parse_matrix(text: str, base_dir=".") -> LogicalMatrix:
    """``algebra PATH`` (relative to ``base_dir``) and ``filter e1 e2 ...``."""
    from pathlib import Path

    path = filt = None
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line.startswith("algebra "):
            path = Path(base_dir) / line.split(None, 1)[1]
        elif line.startswith("filter"):
            filt = parse_filter(line[len("filter"):])
    if path is None or filt is None:
        raise ValueError("matrix file needs an 'algebra' and a 'filter' line")
    return LogicalMatrix(parse_algebra(path.read_text(), path.stem), filt)


def format_matrix(m: LogicalMatrix, algebra_path: str) -> str:
    return f"algebra {algebra_path}\nfilter {' '.join(map(str, sorted(m.filter)))}\n"
