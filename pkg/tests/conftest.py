from __future__ import annotations

import hypothesis.strategies as st
from hypothesis import settings

from aalkit.cring import RING
from aalkit.terms import App, Var

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

VARS = ("x", "y", "z")


def ring_terms(max_leaves: int = 12, names=VARS):
    leaves = st.one_of(st.sampled_from(names).map(Var), st.sampled_from(["0", "1"]).map(App))

    def extend(children):
        return st.one_of(
            st.tuples(st.sampled_from(["+", "*"]), children, children).map(lambda t: App(t[0], (t[1], t[2]))),
            children.map(lambda c: App("-", (c,))),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def terms_over(sig, names=VARS, max_leaves: int = 10):
    """Random well-formed terms over ``sig``."""
    consts = [s for s, a in sig.operations.items() if a == 0]
    ops = [(s, a) for s, a in sig.operations.items() if a > 0]
    leaves = st.sampled_from(names).map(Var)
    if consts:
        leaves = st.one_of(leaves, st.sampled_from(consts).map(App))

    def extend(children):
        return st.sampled_from(ops).flatmap(
            lambda sa: st.lists(children, min_size=sa[1], max_size=sa[1]).map(lambda cs, s=sa[0]: App(s, tuple(cs)))
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


__all__ = ["ring_terms", "terms_over", "RING"]
