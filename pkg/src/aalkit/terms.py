"""Signatures, terms, substitutions and one-sided matching.

Terms are written as prefix S-expressions::

    term := variable | "(" symbol term* ")"

Constants may be written ``(0)`` or bare ``0``.  Variables are any token that
is not an operation symbol of the signature.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping

__all__ = [
    "Signature",
    "Term",
    "Var",
    "App",
    "Equation",
    "TermError",
    "TermSyntaxError",
    "UnknownSymbolError",
    "ArityError",
    "parse_term",
    "parse_signature",
    "format_signature",
    "apply_substitution",
    "match_term",
    "variables",
    "subterms",
    "replace_at",
    "subterm_at",
    "const",
    "op",
    "size",
    "depth",
    "positions",
    "rename_apart",
    "parse_terms",
    "format_term",
]


class TermError(ValueError):
    """Base class for malformed terms."""


class TermSyntaxError(TermError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownSymbolError(TermError):
    pass


class ArityError(TermError):
    pass


@dataclass(frozen=True)
class Signature:
    name: str
    operations: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        ops = dict(self.operations)
        for sym, ar in ops.items():
            if not isinstance(ar, int) or ar < 0:
                raise ValueError(f"bad arity {ar!r} for {sym!r}")
            if not sym or re.search(r"[\s()]", sym):
                raise ValueError(f"bad operation symbol {sym!r}")
        object.__setattr__(self, "operations", ops)

    def __hash__(self):
        return hash((self.name, tuple(sorted(self.operations.items()))))

    def __contains__(self, symbol: str) -> bool:
        return symbol in self.operations

    def arity(self, symbol: str) -> int:
        try:
            return self.operations[symbol]
        except KeyError:
            raise UnknownSymbolError(f"unknown symbol {symbol!r} in signature {self.name}") from None

    def symbols(self) -> list[str]:
        return list(self.operations)

    def extend(self, name: str, extra: Mapping[str, int]) -> Signature:
        clash = set(extra) & set(self.operations)
        if clash:
            raise ValueError(f"symbols already declared: {sorted(clash)}")
        return Signature(name, {**self.operations, **extra})

    def check(self, t: Term) -> None:
        """Raise if ``t`` is not well formed over this signature."""
        for s in subterms(t):
            if isinstance(s, App):
                if self.arity(s.op) != len(s.args):
                    raise ArityError(
                        f"{s.op!r} expects {self.arity(s.op)} arguments, got {len(s.args)}"
                    )
            elif s.name in self.operations:
                raise TermError(f"variable {s.name!r} collides with an operation symbol")


class Term:
    """Common base of :class:`Var` and :class:`App`.  Immutable."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_term(self)


class Var(Term):
    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_hash", hash(("var", name)))

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        return isinstance(other, Var) and other.name == self.name

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.name!r})"

    def __reduce__(self):
        return (Var, (self.name,))


class App(Term):
    __slots__ = ("op", "args", "_hash", "_size")

    def __init__(self, op: str, args=()):
        args = tuple(args)
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "_hash", hash((op, args)))
        object.__setattr__(self, "_size", 1 + sum(size(a) for a in args))

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, App)
            and other._hash == self._hash
            and other.op == self.op
            and other.args == self.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({self.op!r}, {self.args!r})"

    def __reduce__(self):
        return (App, (self.op, self.args))


def const(symbol: str) -> App:
    return App(symbol, ())


def op(symbol: str, *args: Term) -> App:
    return App(symbol, args)


def size(t: Term) -> int:
    return t._size if isinstance(t, App) else 1


def depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(depth(a) for a in t.args)


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"

    def swap(self) -> Equation:
        return Equation(self.rhs, self.lhs)


# -- traversal ---------------------------------------------------------------


def subterms(t: Term) -> Iterator[Term]:
    """Pre-order traversal, including ``t`` itself."""
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        if isinstance(s, App):
            stack.extend(reversed(s.args))


def positions(t: Term, prefix: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Term]]:
    yield prefix, t
    if isinstance(t, App):
        for i, a in enumerate(t.args):
            yield from positions(a, prefix + (i,))


def variables(*terms: Term) -> list[str]:
    """Variable names in order of first occurrence."""
    seen: dict[str, None] = {}
    for t in terms:
        for s in subterms(t):
            if isinstance(s, Var):
                seen.setdefault(s.name)
    return list(seen)


def subterm_at(t: Term, path) -> Term:
    for i in path:
        if not isinstance(t, App) or i >= len(t.args):
            raise IndexError(f"no subterm at {tuple(path)}")
        t = t.args[i]
    return t


def replace_at(t: Term, path, new: Term) -> Term:
    path = tuple(path)
    if not path:
        return new
    if not isinstance(t, App) or path[0] >= len(t.args):
        raise IndexError(f"no subterm at {path}")
    i = path[0]
    args = list(t.args)
    args[i] = replace_at(args[i], path[1:], new)
    return App(t.op, args)


# -- substitution and matching ------------------------------------------------


def apply_substitution(t: Term, s: Mapping[str, Term]) -> Term:
    """Simultaneous replacement of the variables in ``s``."""
    if not s:
        return t
    if isinstance(t, Var):
        return s.get(t.name, t)
    if not t.args:
        return t
    args = tuple(apply_substitution(a, s) for a in t.args)
    if all(x is y for x, y in zip(args, t.args)):
        return t
    return App(t.op, args)


def match_term(pattern: Term, target: Term, subst: Mapping[str, Term] | None = None) -> dict[str, Term] | None:
    """Find the unique ``s`` extending ``subst`` with ``apply(pattern, s) == target``."""
    out = dict(subst) if subst else {}
    stack = [(pattern, target)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, Var):
            bound = out.get(p.name)
            if bound is None:
                out[p.name] = t
            elif bound != t:
                return None
        elif isinstance(t, App) and t.op == p.op and len(t.args) == len(p.args):
            stack.extend(zip(p.args, t.args))
        else:
            return None
    return out


def rename_apart(t: Term, avoid, prefix: str = "v") -> tuple[Term, dict[str, Term]]:
    """Rename every variable of ``t`` to a fresh name not in ``avoid``."""
    avoid = set(avoid)
    ren = {}
    k = 0
    for v in variables(t):
        while f"{prefix}{k}" in avoid:
            k += 1
        ren[v] = Var(f"{prefix}{k}")
        avoid.add(f"{prefix}{k}")
    return apply_substitution(t, ren), ren


# -- concrete syntax ----------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise TermSyntaxError("unexpected input", pos)
        tok = m.group(1) or m.group(2) or m.group(3)
        tokens.append((tok, m.start(m.lastindex)))
        pos = m.end()
    return tokens


def parse_term(text: str, sig: Signature) -> Term:
    tokens = _tokenize(text)
    if not tokens:
        raise TermSyntaxError("empty term", 0)
    t, i = _parse(tokens, 0, sig)
    if i != len(tokens):
        raise TermSyntaxError(f"trailing input {tokens[i][0]!r}", tokens[i][1])
    return t


def parse_terms(text: str, sig: Signature) -> list[Term]:
    """Parse a whitespace-separated sequence of terms."""
    tokens = _tokenize(text)
    out = []
    i = 0
    while i < len(tokens):
        t, i = _parse(tokens, i, sig)
        out.append(t)
    return out


def _parse(tokens, i, sig):
    if i >= len(tokens):
        pos = tokens[-1][1] + len(tokens[-1][0]) if tokens else 0
        raise TermSyntaxError("unexpected end of input", pos)
    tok, pos = tokens[i]
    if tok == ")":
        raise TermSyntaxError("unexpected ')'", pos)
    if tok != "(":
        if tok in sig:
            if sig.arity(tok) != 0:
                raise ArityError(f"{tok!r} expects {sig.arity(tok)} arguments, got 0 (position {pos})")
            return App(tok, ()), i + 1
        return Var(tok), i + 1
    if i + 1 >= len(tokens):
        raise TermSyntaxError("unexpected end of input", pos + 1)
    sym, spos = tokens[i + 1]
    if sym in "()":
        raise TermSyntaxError("expected operation symbol", spos)
    if sym not in sig:
        raise UnknownSymbolError(f"unknown symbol {sym!r} at position {spos}")
    j = i + 2
    args = []
    while True:
        if j >= len(tokens):
            raise TermSyntaxError("missing ')'", len(" ".join(t for t, _ in tokens)))
        if tokens[j][0] == ")":
            break
        a, j = _parse(tokens, j, sig)
        args.append(a)
    if len(args) != sig.arity(sym):
        raise ArityError(f"{sym!r} expects {sig.arity(sym)} arguments, got {len(args)} (position {spos})")
    return App(sym, args), j + 1


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.op
    return "(" + " ".join([t.op] + [format_term(a) for a in t.args]) + ")"


def parse_signature(text: str, name: str = "sig") -> Signature:
    ops = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not parts[1].isdigit():
            raise ValueError(f"line {lineno}: expected 'symbol arity', got {line!r}")
        if parts[0] in ops:
            raise ValueError(f"line {lineno}: duplicate symbol {parts[0]!r}")
        ops[parts[0]] = int(parts[1])
    return Signature(name, ops)


def format_signature(sig: Signature) -> str:
    return "".join(f"{s} {a}\n" for s, a in sig.operations.items())
