"""Command-line interface: ``influx analyze | verify | compare | okada | numcheck``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .augment import DimensionMismatch, NotOutputComplete, check_augmenticity, okada_check
from .checks import compare_with_oracle, single_child_violations, transitivity_violations
from .graphkit import InconsistentAnnotation
from .influence import InfluenceConfig, StructurallySingular, influence_matrix
from .network import NetworkError, RankDeficient, fixture_path, load_network
from .numcheck import run_numcheck, validate_tolerances, write_csv
from .oracle import DEFAULT_BUDGET, EnumerationBudgetExceeded
from .report import analyze, build_report, graph_dot, heatmap_csv

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_RANK = 3
EXIT_DEGENERATE = 4
EXIT_BUDGET = 5
EXIT_AUGMENT = 6
EXIT_NUMCHECK = 7

log = logging.getLogger("influx")


def resolve_network_path(text: str) -> Path:
    """A path on disk, or the name of a bundled fixture such as ``fig31.net``."""
    path = Path(text)
    if path.exists():
        return path
    stem = path.name[:-4] if path.name.endswith(".net") else path.name
    try:
        bundled = fixture_path(stem)
    except (FileNotFoundError, ValueError):
        return path
    return bundled if bundled.exists() else path


def _seed(value: str | None) -> int:
    if value is None:
        value = os.environ.get("INFLUX_SEED", "0")
    return int(value, 0)


def config_from_args(args) -> InfluenceConfig:
    return InfluenceConfig(
        seed=_seed(args.seed), prime_bits=args.prime_bits, repeats=args.repeats, extended=args.extended
    )


def _load(text: str):
    return load_network(resolve_network_path(text))


def cmd_analyze(args) -> int:
    config = config_from_args(args)
    out = Path(args.out_dir)
    wanted = {"dot", "json", "csv"} if args.format == "all" else {args.format}
    for path in args.paths:
        net = _load(path)
        a = analyze(net, config)
        report = build_report(a)
        target = out if len(args.paths) == 1 else out / Path(path).stem
        target.mkdir(parents=True, exist_ok=True)
        if "json" in wanted:
            (target / "report.json").write_text(report.to_json(), encoding="utf-8")
        if "dot" in wanted:
            (target / "graph.dot").write_text(graph_dot(a), encoding="utf-8")
        if "csv" in wanted:
            (target / "heatmap.csv").write_text(heatmap_csv(report), encoding="utf-8")
        print(f"{path}: {len(a.full.classes)} classes, {len(a.full.edges)} edges -> {target}")
    return EXIT_OK


def cmd_verify(args) -> int:
    net = _load(args.path)
    config = config_from_args(args)
    infl = influence_matrix(net, InfluenceConfig(**{**config.__dict__, "extended": True}))
    for beta, alpha in args.flip or []:
        b = infl.row_names.index(beta)
        a = infl.col_names.index(alpha)
        infl.matrix[b, a] = not infl.matrix[b, a]
    failures = 0
    oracle = compare_with_oracle(net, infl, args.budget)
    print(f"oracle agreement: {'ok' if oracle.agree else f'{len(oracle.mismatches)} mismatches'}")
    for row, col, got, exact in oracle.mismatches[:20]:
        print(f"  {col} -> {row}: randomized {int(got)}, oracle {int(exact)}")
    failures += len(oracle.mismatches)
    trans = transitivity_violations(net, infl)
    print(f"transitivity: {'ok' if not trans else f'{len(trans)} violations'}")
    failures += len(trans)
    sc = single_child_violations(net, infl)
    print(f"single children: {'ok' if not sc else f'{len(sc)} violations'}")
    for line in sc:
        print("  " + line)
    failures += len(sc)
    return EXIT_OK if not failures else EXIT_FAIL


def cmd_compare(args) -> int:
    net0, net1 = _load(args.path0), _load(args.path1)
    config = config_from_args(args)
    rep = check_augmenticity(net0, net1, config=config, budget=args.budget)
    w = rep.witness
    print(f"new metabolites: {', '.join(w.new_metabolites) or '-'}")
    print(f"new reactions: {', '.join(w.new_reactions) or '-'}")
    if w.partial_selection:
        pairs = ", ".join(f"{m}->{j}" for m, j in w.partial_selection.items())
        print(f"partial child selection: {pairs} (det {w.partial_det})")
    print(f"status: {rep.status}")
    print(f"lost influences: {len(rep.lost)}; gained: {len(rep.gained)}")
    for j, alpha in rep.lost[:20]:
        print(f"  lost {j} ~> {alpha}")
    for members, parts in rep.lumpings:
        print(f"  lumped <{','.join(members)}> from {len(parts)} classes")
    return EXIT_AUGMENT if rep.violations else EXIT_OK


def cmd_okada(args) -> int:
    net = _load(args.path)
    infl = influence_matrix(net, config_from_args(args))
    reactions = [s for s in args.reactions.split(",") if s]
    metabolites = [s for s in args.metabolites.split(",") if s]
    try:
        rep = okada_check(net, reactions, metabolites, infl)
    except (NotOutputComplete, DimensionMismatch) as exc:
        print(f"hypothesis fails: {exc}")
        return EXIT_FAIL
    print(f"flux influence union: {{{','.join(rep.flux_union)}}}")
    print(f"metabolite influence union: {{{','.join(rep.metabolite_union)}}}")
    print(f"contained: {rep.contained}; strict: {rep.strict}")
    return EXIT_OK if rep.contained else EXIT_FAIL


def cmd_numcheck(args) -> int:
    try:
        validate_tolerances(args.tol_zero, args.tol_nonzero)
    except ValueError as exc:
        print(f"influx numcheck: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    net = _load(args.path)
    config = config_from_args(args)
    infl = influence_matrix(net, config)
    summary = run_numcheck(
        net, infl, models=args.models, seed=config.seed, step=args.step,
        tol_zero=args.tol_zero, tol_nonzero=args.tol_nonzero,
    )
    rep = summary.report
    print(f"models: {summary.models} (skipped {summary.skipped_models}); perturbations: {summary.records}")
    print(f"hard violations: {len(rep.hard)}")
    print(f"soft misses: {len(rep.soft_misses)} of {rep.structural_nonzeros} ({100 * summary.soft_rate:.2f}%)")
    print(f"worst flux balance: {summary.max_balance:.3g}")
    if args.csv:
        write_csv(rep, args.csv)
    return EXIT_NUMCHECK if rep.hard else EXIT_OK


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", default=None, help="random seed (default: $INFLUX_SEED or 0)")
    p.add_argument("--prime-bits", type=int, default=127, help="primes are drawn from [2^b, 2^(b+1))")
    p.add_argument("--repeats", type=int, default=1, help="independent evaluations to OR together")
    p.add_argument("--extended", action="store_true", help="also perturb metabolites (columns E+M)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="influx", description="Structural sensitivity of reaction networks.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="influence matrix and flux influence graph")
    p.add_argument("paths", nargs="+")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--format", choices=("dot", "json", "csv", "all"), default="all")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="cross-check against the exact child-selection oracle")
    p.add_argument("path")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--flip", nargs=2, action="append", metavar=("ROW", "COL"),
                   help=argparse.SUPPRESS)  # test hook: corrupt one entry before checking
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare", help="persistence of influences under network augmentation")
    p.add_argument("path0")
    p.add_argument("path1")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    _add_common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("okada", help="check Okada's containment for a subnetwork")
    p.add_argument("path")
    p.add_argument("--reactions", required=True, help="comma-separated reaction names")
    p.add_argument("--metabolites", default="", help="comma-separated metabolite names")
    _add_common(p)
    p.set_defaults(func=cmd_okada)

    p = sub.add_parser("numcheck", help="finite perturbations of random affine models")
    p.add_argument("path")
    p.add_argument("--models", type=int, default=20)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--tol-zero", type=float, default=1e-8)
    p.add_argument("--tol-nonzero", type=float, default=1e-4)
    p.add_argument("--csv", default=None, help="write per-entry classifications here")
    _add_common(p)
    p.set_defaults(func=cmd_numcheck)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.seed = str(_seed(args.seed))
        return args.func(args)
    except (NetworkError, FileNotFoundError) as exc:
        print(f"influx: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        if isinstance(exc, RankDeficient):
            print(f"influx: {exc}", file=sys.stderr)
            return EXIT_RANK
        if isinstance(exc, InconsistentAnnotation):
            print(f"influx: {exc}; retry with --repeats 2 or another --seed", file=sys.stderr)
            return EXIT_DEGENERATE
        print(f"influx: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except StructurallySingular as exc:
        print(f"influx: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except EnumerationBudgetExceeded as exc:
        print(f"influx: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
