"""Command-line front end: word-problem checks, filling profiles with
inequality columns, relator fusion, coset enumeration snapshots, and the
grammar-based bound experiment.

Exit codes: 0 success, 1 negative verdict, 2 usage or configuration error,
3 budget or ceiling failure.  All output is deterministic for a fixed
configuration.
"""

from __future__ import annotations

import argparse
import sys

from .automata import (
    LabeledGraph,
    MemoryCeilingError,
    accepts_reduced,
    build_loop_complex,
    canonical_form,
    fold,
    to_dot,
)
from .compression import CombinatorialBlowupError, compress, verify_compression
from .core import (
    ParseError,
    Presentation,
    parse_presentation,
    parse_word,
    render_presentation,
    render_word,
)
from .fillings import (
    ReferenceOracle,
    check_inequalities,
    measure_profile,
    profile_to_csv,
)
from .grammar import double_exp_experiment
from .rewrite import SearchBudget
from .toddcoxeter import TcNonTermination, TcState, partial_cayley, tc_round


class UsageError(ValueError):
    """Bad flags, bad files, or an oracle that does not fit the presentation."""


def _load_presentation(path: str) -> Presentation:
    try:
        with open(path, encoding="utf-8") as handle:
            return parse_presentation(handle.read())
    except OSError as exc:
        raise UsageError(f"cannot read presentation: {exc}") from exc


def _budget(args) -> SearchBudget:
    if args.budget_len <= 0 or args.budget_states <= 0:
        raise UsageError("budget caps must be positive")
    return SearchBudget(max_word_length=args.budget_len, max_states=args.budget_states)


def _parse_oracle(text: str, p: Presentation, budget: SearchBudget) -> ReferenceOracle:
    name, sep, arg = text.partition(":")
    if not sep or not arg:
        raise UsageError(f"oracle {text!r} is not of the form name:parameter")
    try:
        value = int(arg)
    except ValueError as exc:
        raise UsageError(f"oracle parameter {arg!r} is not an integer") from exc
    if name == "cyclic":
        oracle = ReferenceOracle.cyclic(value)
    elif name == "free-abelian":
        oracle = ReferenceOracle.free_abelian(value)
    elif name == "free":
        oracle = ReferenceOracle.free(value)
    elif name == "rewrite":
        oracle = ReferenceOracle.rewrite_search(
            p, SearchBudget(max_word_length=value, max_states=budget.max_states)
        )
    else:
        raise UsageError(f"unknown oracle {name!r}")
    if oracle.num_generators != p.num_generators:
        raise UsageError(
            f"oracle {text!r} speaks {oracle.num_generators} generator(s), "
            f"the presentation has {p.num_generators}"
        )
    return oracle


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def _canonical_copy(graph: LabeledGraph) -> LabeledGraph:
    """Renumber a folded graph so DOT output is stable across runs."""
    count, edges = canonical_form(graph)
    out = LabeledGraph(graph.num_generators, num_vertices=count, origin=0)
    for src, gen, dst in edges:
        out.add_edge(src, gen, dst)
    return out


def cmd_wp(args) -> int:
    p = _load_presentation(args.presentation)
    word = parse_word(args.word, p.num_generators)
    if args.radius < 0:
        raise UsageError("--radius must be nonnegative")
    dfa, _ = fold(build_loop_complex(p, args.radius))
    if accepts_reduced(dfa, word):
        print("trivial")
        return 0
    print(f"not-accepted-at-radius-{args.radius}")
    return 1


def cmd_profile(args) -> int:
    p = _load_presentation(args.presentation)
    budget = _budget(args)
    oracle = _parse_oracle(args.oracle, p, budget)
    if args.n < 0:
        raise UsageError("--n must be nonnegative")
    profile = measure_profile(p, args.n, oracle, budget, max_rounds=args.rounds)
    report = check_inequalities(profile)
    _write(profile_to_csv(profile, report), args.csv)
    ok = report.asserted_hold and report.equality_holds
    if args.verify:
        ok = ok and verify_compression(p, args.n, budget).all_hold
    return 0 if ok else 1


def cmd_compress(args) -> int:
    p = _load_presentation(args.presentation)
    compressed = compress(p)
    sys.stdout.write(render_presentation(compressed.combined))
    if args.verify:
        budget = _budget(args)
        if not verify_compression(p, args.n, budget).all_hold:
            return 1
    return 0


def cmd_tc(args) -> int:
    p = _load_presentation(args.presentation)
    if args.rounds < 1:
        raise UsageError("--rounds must be at least 1")
    state = TcState.initial(p)
    for _ in range(args.rounds):
        state = tc_round(state)
    pcg = partial_cayley(state)
    print(f"rounds={args.rounds} vertices={pcg.graph.num_vertices} radius={pcg.radius}")
    if args.dot is not None:
        _write(to_dot(_canonical_copy(pcg.graph)), args.dot)
    return 0


def cmd_grammar_bound(args) -> int:
    p = _load_presentation(args.presentation)
    budget = _budget(args)
    oracle = _parse_oracle(args.oracle, p, budget)
    if args.n < 0:
        raise UsageError("--n must be nonnegative")
    reports = double_exp_experiment(p, args.n, oracle, budget)
    lines = ["word,n,d,ell,witness,area,bound,holds"]
    for r in reports:
        lines.append(
            ",".join(
                (
                    render_word(r.word),
                    str(r.n),
                    str(r.diameter),
                    str(r.shortest_length),
                    render_word(r.witness),
                    str(r.area),
                    str(r.bound),
                    "true" if r.holds else "false",
                )
            )
        )
    _write("\n".join(lines) + "\n", args.csv)
    return 0 if all(r.holds for r in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loopfold",
        description="Filling-function measurements over finite presentations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_budget(cmd):
        cmd.add_argument("--budget-len", type=int, default=8,
                         help="search cap on rewrite word length (default 8)")
        cmd.add_argument("--budget-states", type=int, default=2_000_000,
                         help="search cap on visited states (default 2000000)")

    wp = sub.add_parser("wp", help="decide triviality against a folded loop complex")
    wp.add_argument("presentation")
    wp.add_argument("word")
    wp.add_argument("--radius", type=int, default=0, help="complex radius j (default 0)")
    wp.set_defaults(func=cmd_wp)

    profile = sub.add_parser("profile", help="measure filling profiles and inequality columns")
    profile.add_argument("presentation")
    profile.add_argument("--n", type=int, required=True, help="maximum word length")
    profile.add_argument("--oracle", required=True,
                         help="cyclic:k | free-abelian:r | free:r | rewrite:L")
    profile.add_argument("--csv", help="output path (default stdout)")
    profile.add_argument("--rounds", type=int, default=24,
                         help="coset-enumeration round cap (default 24)")
    profile.add_argument("--verify", action="store_true",
                         help="also require the relator-fusion halving check")
    add_budget(profile)
    profile.set_defaults(func=cmd_profile)

    compress_cmd = sub.add_parser("compress", help="emit the fused presentation")
    compress_cmd.add_argument("presentation")
    compress_cmd.add_argument("--verify", action="store_true",
                              help="check the halving bound up to --n and exit 1 on failure")
    compress_cmd.add_argument("--n", type=int, default=4,
                              help="verification depth for --verify (default 4)")
    add_budget(compress_cmd)
    compress_cmd.set_defaults(func=cmd_compress)

    tc = sub.add_parser("tc", help="run coset-enumeration rounds and report the snapshot")
    tc.add_argument("presentation")
    tc.add_argument("--rounds", type=int, required=True, help="number of rounds to run")
    tc.add_argument("--dot", help="write the snapshot graph in DOT form")
    tc.set_defaults(func=cmd_tc)

    bound = sub.add_parser("grammar-bound",
                           help="per-word shortest-witness lengths against the explicit bound")
    bound.add_argument("presentation")
    bound.add_argument("--n", type=int, required=True, help="maximum word length")
    bound.add_argument("--oracle", default="rewrite:8",
                       help="cyclic:k | free-abelian:r | free:r | rewrite:L (default rewrite:8)")
    bound.add_argument("--csv", help="output path (default stdout)")
    add_budget(bound)
    bound.set_defaults(func=cmd_grammar_bound)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParseError) as exc:
        print(f"loopfold: {exc}", file=sys.stderr)
        return 2
    except (MemoryCeilingError, TcNonTermination, CombinatorialBlowupError) as exc:
        print(f"loopfold: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
