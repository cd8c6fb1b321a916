"""Command-line front end.

Every command prints ``RESULT: PASS``, ``RESULT: FAIL`` or ``RESULT: ERROR``
on its first line, followed by a plain text report.  The exit status is 0,
1 or 2 respectively; usage errors and resource guards count as errors.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from . import gallery
from .cring import RING, NotCREqual, cr_calculus, normalize, synth_ground_chain
from .finalg import (
    FiniteAlgebra,
    GuardExceeded,
    LogicalMatrix,
    enumerate_filters,
    evaluate,
    is_model,
    largest_compatible_congruence_bruteforce,
    leibniz_congruence,
    parse_algebra,
    parse_filter,
    parse_matrix,
    suszko_congruence,
)
from .hilbert import (
    HilbertCalculus,
    SearchLimitExceeded,
    bounded_prove,
    check_chain,
    check_derivation,
    format_calculus,
    format_chain,
    format_derivation,
    parse_calculus,
    parse_chain,
    parse_derivation,
)
from .reductions import (
    BOX,
    IMP,
    LP_SIG,
    RA_SIG,
    BasisFailure,
    NotASolution,
    RootFound,
    build_countermodel,
    build_frege_consistency_model,
    build_lab,
    build_lp,
    check_algebraizability_witness,
    lab_witness,
    make_algebraizability_witness,
    parse_basis,
    relation_algebra_basis,
)
from .terms import Signature, TermError, depth, format_term, parse_signature, parse_term, size, variables

__all__ = ["main", "run", "SIGNATURES"]

SIGNATURES = {
    "ring": RING,
    "lp": LP_SIG,
    "magma": gallery.MAGMA,
    "semilattice": gallery.SEMILATTICE,
    "ra": RA_SIG,
    "lab": RA_SIG.extend("lab", {BOX: 1, IMP: 2}),
}

CALCULI = {
    "cr": cr_calculus,
    "semilattice": lambda: gallery.semilattice_calculus(False),
    "semilattice-ext": lambda: gallery.semilattice_calculus(True),
    "cm5": lambda: gallery.cm_rules(5),
}

ALGEBRAS = {
    "z3": gallery.z3_algebra,
    "magma5": lambda: gallery.magma_algebra(5),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class Outcome:
    """Collects report lines and the verdict of one command."""

    def __init__(self):
        self.lines: list[str] = []
        self.passed = True

    def say(self, *parts) -> None:
        for p in parts:
            self.lines.extend(str(p).rstrip("\n").split("\n"))

    def verdict(self, ok) -> None:
        self.passed = self.passed and bool(ok)


# -- input helpers -------------------------------------------------------------------


def _signature(ref: str | None, default: Signature = RING) -> Signature:
    if ref is None:
        return default
    if ref in SIGNATURES:
        return SIGNATURES[ref]
    path = Path(ref)
    if path.exists():
        return parse_signature(path.read_text(), path.stem)
    raise UsageError(f"unknown signature {ref!r} (built in: {', '.join(SIGNATURES)})")


def _algebra(ref: str | None) -> FiniteAlgebra:
    if ref is None:
        raise UsageError("--algebra is required")
    path = Path(ref)
    if path.exists():
        return parse_algebra(path.read_text(), path.stem)
    if ref in ALGEBRAS:
        return ALGEBRAS[ref]()
    raise UsageError(f"no algebra file {ref!r}")


def _calculus(ref: str | None, sig: Signature) -> HilbertCalculus:
    if ref is None:
        raise UsageError("--calculus is required")
    path = Path(ref)
    if path.exists():
        return parse_calculus(path.read_text(), sig)
    if ref in CALCULI:
        return CALCULI[ref]()
    raise UsageError(f"no calculus file {ref!r}")


def _matrix(args) -> LogicalMatrix:
    if args.matrix:
        path = Path(args.matrix)
        return parse_matrix(path.read_text(), path.parent)
    if args.filter is None:
        raise UsageError("--filter (or --matrix) is required")
    return LogicalMatrix(_algebra(args.algebra), parse_filter(args.filter))


def _calc_sig(args, a: FiniteAlgebra | None = None) -> Signature:
    if args.sig is None and a is not None:
        return a.signature
    return _signature(args.sig)


def _basis(args):
    if args.basis:
        return parse_basis(Path(args.basis).read_text(), RA_SIG)
    return relation_algebra_basis()


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.replace(",", " ").split())


_SYMBOL_NAMES = {"<->": "iff", "->": "imp", "+": "plus", "*": "times", "-": "minus"}


def _safe_name(name: str) -> str:
    """File name for a condition such as ``Rep(+)``."""
    for sym, word in _SYMBOL_NAMES.items():
        name = name.replace(f"({sym})", f"({word})")
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name).strip("_")


def _write(out: Outcome, path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    out.say(f"wrote {path}")


# -- commands -------------------------------------------------------------------------


def cmd_parse(args, out: Outcome):
    t = parse_term(args.term, _signature(args.sig))
    out.say(format_term(t), f"size {size(t)}", f"depth {depth(t)}", f"variables {' '.join(variables(t)) or '-'}")


def cmd_eval(args, out: Outcome):
    a = _algebra(args.algebra)
    t = parse_term(args.term, a.signature)
    env = {}
    for item in (args.env or "").replace(",", " ").split():
        v, _, val = item.partition("=")
        env[v] = int(val)
    missing = [v for v in variables(t) if v not in env]
    if missing:
        raise UsageError(f"no value for {', '.join(missing)}")
    out.say(evaluate(a, t, env))


def cmd_model_check(args, out: Outcome):
    m = _matrix(args)
    c = _calculus(args.calculus, _calc_sig(args, m.algebra))
    chk = is_model(c, m)
    out.say(f"filter {{{','.join(map(str, sorted(m.filter)))}}}", str(chk))
    out.verdict(chk)


def cmd_leibniz(args, out: Outcome):
    m = _matrix(args)
    lc = leibniz_congruence(m)
    out.say(f"classes {lc}", f"reduced {'yes' if lc.is_identity() else 'no'}")
    if args.brute:
        bf = largest_compatible_congruence_bruteforce(m)
        out.say(f"brute force {bf}")
        out.verdict(bf == lc)
    out.verdict(lc.is_identity())


def cmd_suszko(args, out: Outcome):
    m = _matrix(args)
    c = _calculus(args.calculus, _calc_sig(args, m.algebra))
    sc = suszko_congruence(c, m.algebra, m.filter)
    out.say(f"classes {sc}", f"suszko-reduced {'yes' if sc.is_identity() else 'no'}")
    out.verdict(sc.is_identity())


def cmd_filters(args, out: Outcome):
    a = _algebra(args.algebra)
    c = _calculus(args.calculus, _calc_sig(args, a))
    fs = enumerate_filters(c, a)
    out.say(f"{len(fs)} filters")
    for f in fs:
        out.say("{" + ",".join(map(str, sorted(f))) + "}")


def cmd_prove(args, out: Outcome):
    sig = _signature(args.sig)
    c = _calculus(args.calculus, sig)
    premises = [parse_term(p, sig) for p in args.premise or ()]
    goal = parse_term(args.goal, sig)
    d = bounded_prove(c, premises, goal, args.depth, args.size_cap)
    if d is None:
        out.say(f"no derivation found (depth {args.depth}, size cap {args.size_cap})")
        out.verdict(False)
        return
    out.say(format_derivation(d))
    if args.out:
        _write(out, Path(args.out), format_derivation(d))


def cmd_check_proof(args, out: Outcome):
    sig = _signature(args.sig)
    c = _calculus(args.calculus, sig)
    d = parse_derivation(Path(args.proof).read_text(), sig)
    rep = check_derivation(c, d)
    out.say(f"{len(d)} steps: {rep}")
    out.verdict(rep)


def cmd_check_chain(args, out: Outcome):
    sig = _signature(args.sig)
    c = _calculus(args.calculus or "cr", sig)
    ch = parse_chain(Path(args.chain).read_text(), sig)
    rep = check_chain(c, ch)
    out.say(f"{len(ch)} steps: {rep}")
    out.verdict(rep)
    if set(sig.operations) <= set(RING.operations):
        same = normalize(ch.start) == normalize(ch.end)
        out.say(f"endpoints normalize to {normalize(ch.start)} and {normalize(ch.end)}")
        out.verdict(same)


def cmd_normalize(args, out: Outcome):
    ts = [parse_term(t, RING) for t in args.terms]
    nfs = [normalize(t) for t in ts]
    out.say(*nfs)
    if len(nfs) == 2:
        out.verdict(nfs[0] == nfs[1])


def cmd_cr_chain(args, out: Outcome):
    s, t = parse_term(args.lhs, RING), parse_term(args.rhs, RING)
    try:
        ch = synth_ground_chain(s, t)
    except NotCREqual as e:
        out.say(str(e))
        out.verdict(False)
        return
    rep = check_chain(cr_calculus(), ch)
    out.say(format_chain(ch), f"{len(ch)} steps: {rep}")
    out.verdict(rep)
    if args.out:
        _write(out, Path(args.out), format_chain(ch))


def _emit_calculus(args, out: Outcome, c: HilbertCalculus):
    text = format_calculus(c)
    if args.out:
        _write(out, Path(args.out), text)
        out.say(f"{len(c)} rules")
    else:
        out.say(text)


def cmd_build_lp(args, out: Outcome):
    _emit_calculus(args, out, build_lp(parse_term(args.p, RING)))


def _lab_calculus(args) -> HilbertCalculus:
    basis = _basis(args)
    return build_lab(parse_term(args.alpha, RA_SIG), parse_term(args.beta, RA_SIG), basis, RA_SIG)


def cmd_build_lab(args, out: Outcome):
    _emit_calculus(args, out, _lab_calculus(args))


def cmd_witness(args, out: Outcome):
    if args.p is not None:
        if args.solution is None:
            raise UsageError("--solution is required with --p")
        p = parse_term(args.p, RING)
        c = build_lp(p)
        try:
            w = make_algebraizability_witness(p, _ints(args.solution))
        except NotASolution as e:
            out.say(str(e))
            out.verdict(False)
            return
    elif args.alpha is not None and args.beta is not None:
        c = _lab_calculus(args)
        w = lab_witness(c)
    else:
        raise UsageError("give --p and --solution, or --alpha and --beta")
    rep = check_algebraizability_witness(c, w)
    out.say(
        "rho " + " ; ".join(map(format_term, w.rho)),
        "tau " + " ; ".join(str(e) for e in w.tau),
        f"{len(c)} rules",
        rep.format(),
    )
    out.verdict(rep)
    if args.out:
        d = Path(args.out)
        _write(out, d / "calculus", format_calculus(c))
        for name, ders in w.derivations.items():
            for i, der in enumerate(ders, 1):
                _write(out, d / f"{_safe_name(name)}.{i}.proof", format_derivation(der))
        if w.theorem is not None:
            _write(out, d / "theorem.proof", format_derivation(w.theorem))


def cmd_countermodel(args, out: Outcome):
    p = parse_term(args.p, RING)
    try:
        rep = build_countermodel(p, args.modulus, args.s, args.mval, args.k)
    except RootFound as e:
        out.say(str(e))
        out.verdict(False)
        return
    out.say(rep.format())
    out.verdict(rep)


def cmd_frege_model(args, out: Outcome):
    try:
        fm = build_frege_consistency_model(_basis(args))
    except BasisFailure as e:
        out.say(str(e))
        out.verdict(False)
        return
    out.say(fm.format())
    out.verdict(fm)


def cmd_gallery(args, out: Outcome):
    names = list(gallery.SUITES) if args.name == "all" else [args.name]
    for name in names:
        fn = gallery.SUITES[name]
        b = fn(seed=args.seed) if name in ("ring-oracle", "leibniz-oracle") else fn()
        out.say(f"== {name}", b.report())
        out.verdict(b.ok)
        if args.out:
            out.say(f"wrote {b.write(args.out)}")


# -- argument parsing ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1, help="accepted for compatibility; work is single-threaded")

    ap = _Parser(prog="aalkit", description="Finite algebraic logic toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    def cmd(name, fn, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=fn)
        return p

    def matrix_args(p):
        p.add_argument("--algebra", help="algebra file (or z3, magma5)")
        p.add_argument("--filter", help="filter elements, e.g. 1,2")
        p.add_argument("--matrix", help="matrix file instead of --algebra/--filter")

    def calc_args(p, required=True):
        p.add_argument("--calculus", required=required, help="calculus file (or cr, semilattice, semilattice-ext, cm5)")
        p.add_argument("--sig", help="signature file or one of " + ", ".join(SIGNATURES))

    p = cmd("parse", cmd_parse, "parse and print a term")
    p.add_argument("term")
    p.add_argument("--sig")

    p = cmd("eval", cmd_eval, "evaluate a term in a finite algebra")
    p.add_argument("term")
    p.add_argument("--algebra", required=True)
    p.add_argument("--env", help="assignment, e.g. x=1,y=0")

    p = cmd("model-check", cmd_model_check, "check that a matrix is a model of a calculus")
    matrix_args(p)
    calc_args(p)

    p = cmd("leibniz", cmd_leibniz, "Leibniz congruence of a matrix; passes when reduced")
    matrix_args(p)
    p.add_argument("--brute", action="store_true", help="also compare with brute-force enumeration")

    p = cmd("suszko", cmd_suszko, "Suszko congruence of a matrix; passes when it is the identity")
    matrix_args(p)
    calc_args(p)

    p = cmd("filters", cmd_filters, "list the deductive filters of an algebra")
    p.add_argument("--algebra", required=True)
    calc_args(p)

    p = cmd("prove", cmd_prove, "bounded forward proof search")
    p.add_argument("goal")
    calc_args(p)
    p.add_argument("--premise", action="append")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--size-cap", type=int, default=11)
    p.add_argument("--out")

    p = cmd("check-proof", cmd_check_proof, "check a derivation file")
    p.add_argument("proof")
    calc_args(p)

    p = cmd("check-chain", cmd_check_chain, "check a chain file (default calculus: cr)")
    p.add_argument("chain")
    calc_args(p, required=False)

    p = cmd("normalize", cmd_normalize, "ring normal form; with two terms, passes when they agree")
    p.add_argument("terms", nargs="+")

    p = cmd("cr-chain", cmd_cr_chain, "chain proof between two ground ring terms")
    p.add_argument("lhs")
    p.add_argument("rhs")
    p.add_argument("--out")

    p = cmd("build-lp", cmd_build_lp, "calculus for a polynomial")
    p.add_argument("--p", required=True)
    p.add_argument("--out")

    lab_help = "one-variable relation-algebra term"
    p = cmd("build-lab", cmd_build_lab, "calculus for an equation")
    p.add_argument("--alpha", required=True, help=lab_help)
    p.add_argument("--beta", required=True, help=lab_help)
    p.add_argument("--basis")
    p.add_argument("--out")

    p = cmd("witness", cmd_witness, "build and check an algebraizability witness")
    p.add_argument("--p")
    p.add_argument("--solution", help="integer values for the variables in order of first occurrence")
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--basis")
    p.add_argument("--out", help="directory for the calculus and derivation files")

    p = cmd("countermodel", cmd_countermodel, "two reduced models on the integers mod m")
    p.add_argument("--p", required=True)
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--mval", type=int, default=0)
    p.add_argument("--k", type=int, default=2)

    p = cmd("frege-model", cmd_frege_model, "check the two-element consistency model")
    p.add_argument("--basis")

    p = cmd("gallery", cmd_gallery, "rebuild and check an example bundle")
    p.add_argument("name", choices=[*gallery.SUITES, "all"])
    p.add_argument("--out")
    return ap


def run(argv=None) -> tuple[int, str]:
    """Run one command; return the exit status and the full report."""
    out = Outcome()
    try:
        args = build_parser().parse_args(argv)
        args.func(args, out)
        status = 0 if out.passed else 1
    except (UsageError, GuardExceeded, SearchLimitExceeded, TermError, ValueError, OSError) as e:
        out.say(f"error: {e}")
        status = 2
    except SystemExit as e:  # --help
        return (0 if not e.code else 2), ""
    head = {0: "RESULT: PASS", 1: "RESULT: FAIL", 2: "RESULT: ERROR"}[status]
    return status, "\n".join([head, *out.lines]) + "\n"


def main(argv=None) -> int:
    status, text = run(argv)
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
