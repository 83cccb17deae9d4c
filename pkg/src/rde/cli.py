"""Command-line pipeline: synth -> partition -> fit -> project/eval -> plot.

Stages communicate through files only, so any stage can be re-run from its
on-disk inputs; with equal seeds the whole pipeline is byte-reproducible,
SVG output included.  Exit codes: 0 success, 1 usage error, 2 data or math
error.
"""

from __future__ import annotations

import argparse
import sys

from . import evaluation, io, solver, svg, synthesis
from .data import BetaWeights, ValidationError
from .pairing import PartitionConfig, enumerate_pairs, partition_pairs
from .solver import SolverConfig


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; usage errors are 1 here
        raise _UsageError(message)


def _parse_spread(text: str):
    parts = [p for p in text.split(",") if p.strip() != ""]
    vals = [float(p) for p in parts]
    return vals[0] if len(vals) == 1 else tuple(vals)


def _parse_betas(text: str) -> BetaWeights:
    parts = text.split(",")
    if len(parts) != 4:
        raise _UsageError("--betas expects four comma-separated values: rn,rf,in,if")
    rn, rf, bi, bf = (float(p) for p in parts)
    return BetaWeights(rn, rf, bi, bf)


def build_parser() -> _Parser:
    parser = _Parser(prog="rde", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic descriptor set")
    p.add_argument("--scenario", required=True, choices=synthesis.SCENARIOS)
    p.add_argument("--n-per-group", type=int, default=None)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--noise-scale", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-groups", type=int, default=8)
    p.add_argument("--between-spread", type=_parse_spread, default=4.0)
    p.add_argument("--within-spread", type=_parse_spread, default=1.0)
    p.add_argument("--min-center-separation", type=float, default=0.0)
    p.add_argument("--format", choices=("csv", "binary"), default="csv")
    p.add_argument("--out", required=True)

    p = sub.add_parser("partition", help="mine pairs and split them near/far")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--max-irr-per-point", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("fit", help="learn an embedding from a partition")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--out", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--preset", choices=("lde", "lfda", "rde"),
                       help="beta regime (default when neither flag is given: rde)")
    group.add_argument("--betas", type=_parse_betas,
                       help="explicit weights rn,rf,in,if (mutually exclusive with --preset)")
    p.add_argument("--ratio", type=float, default=solver.DEFAULT_PRESET_RATIO,
                   help="beta ratio r for the lfda/rde presets")
    p.add_argument("--dim", type=int, default=None, help="output dimension (default: input dimension)")
    p.add_argument("--mode", choices=("ratio-trace", "trace-ratio"), default="ratio-trace")
    p.add_argument("--epsilon-scale", type=float, default=1e-6)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--k", type=int, default=5, help="partition k recorded in the model config")
    p.add_argument("--seed", type=int, default=0, help="partition seed recorded in the model config")

    p = sub.add_parser("project", help="map a descriptor set through a model")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "binary"), default="csv")

    p = sub.add_parser("eval", help="distance-distribution report with overlap errors")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--model", default=None, help="omit to evaluate the original space")
    p.add_argument("--out", required=True)
    p.add_argument("--bins", type=int, default=evaluation.DEFAULT_BINS)
    p.add_argument("--balance", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--match", default=None, help="second descriptor set for closest-pair matching")
    p.add_argument("--m", type=int, default=15, help="number of closest cross pairs")

    p = sub.add_parser("plot", help="render a report as an SVG figure")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--title", default="Distance distributions")
    return parser


def _resolve_betas(args) -> BetaWeights:
    if args.betas is not None:
        return args.betas
    if args.preset == "lde":
        return solver.preset_lde()
    if args.preset == "lfda":
        return solver.preset_lfda_like(args.ratio)
    if args.preset == "rde":
        return solver.preset_rde(args.ratio)
    return solver.preset_rde(args.ratio)  # default regime


def _run(args) -> None:
    if args.command == "synth":
        spec = synthesis.ScenarioSpec(
            scenario=args.scenario,
            n_per_group=args.n_per_group,
            dim=args.dim,
            noise_scale=args.noise_scale,
            seed=args.seed,
            n_groups=args.n_groups,
            between_spread=args.between_spread,
            within_spread=args.within_spread,
            min_center_separation=args.min_center_separation,
        )
        io.save_descriptors(synthesis.generate(spec), args.out, format=args.format)
    elif args.command == "partition":
        dset = io.load_descriptors(args.in_path, format="auto")
        config = PartitionConfig(k=args.k, max_irrelevant_per_point=args.max_irr_per_point,
                                 seed=args.seed)
        rel, irr = enumerate_pairs(dset, config)
        io.save_partition(partition_pairs(dset, rel, irr, config), args.out)
    elif args.command == "fit":
        dset = io.load_descriptors(args.in_path, format="auto")
        partition = io.load_partition(args.partition)
        betas = _resolve_betas(args)
        config = SolverConfig(mode=args.mode, output_dim=args.dim,
                              epsilon_scale=args.epsilon_scale,
                              max_iters=args.max_iters, tol=args.tol)
        pc = PartitionConfig(k=args.k, seed=args.seed)
        model = solver.fit(dset, partition, betas, config, partition_config=pc)
        io.save_model(model, args.out)
    elif args.command == "project":
        dset = io.load_descriptors(args.in_path, format="auto")
        model = io.load_model(args.model)
        io.save_descriptors(solver.project(model, dset), args.out, format=args.format)
    elif args.command == "eval":
        dset = io.load_descriptors(args.in_path, format="auto")
        partition = io.load_partition(args.partition)
        model = io.load_model(args.model) if args.model else None
        match_set = io.load_descriptors(args.match, format="auto") if args.match else None
        report = evaluation.eval_report(
            dset, partition, model, bins=args.bins, balance=args.balance,
            seed=args.seed, match_set=match_set, match_m=args.m,
        )
        evaluation.save_report(report, args.out)
    elif args.command == "plot":
        report = evaluation.load_report(args.in_path)
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(svg.render_report(report, title=args.title))
    else:  # pragma: no cover - argparse enforces the choices
        raise _UsageError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        _run(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
