"""Command-line entry point: ``pacrank <subcommand> [flags]``."""
from __future__ import annotations

import argparse
import logging
import sys

from .bench import ExperimentSpec, emit_csv, run_experiment, summarize
from .oracle import make_model, verify_properties

log = logging.getLogger("pacrank")

_FIXED = {"max": "knockout", "rank-merge": "merge-rank", "rank-bsr": "bsr"}


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t]


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t]


def _common(p: argparse.ArgumentParser, sweep: bool = False) -> None:
    p.add_argument("--model", default="adjacent-gap:0.6",
                   help="adjacent-gap[:p], single-gap[:ptilde], mallows:phi, btl:FILE or matrix:FILE")
    p.add_argument("--n", type=_ints if sweep else int, default=None,
                   help="element count" + (" (comma list sweeps)" if sweep else ""))
    p.add_argument("--eps", type=_floats if sweep else float, default=[0.05] if sweep else 0.05)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--x", type=float, default=3.0, help="anchor exponent x for rank-bsr")
    p.add_argument("--anchors", type=int, default=None, help="override the anchor count of rank-bsr")
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="CSV destination")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="record wall-clock ms (breaks byte-identical reruns)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pacrank", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("max", "knockout maximum selection"),
        ("rank-merge", "merge-rank ranking (rank3)"),
        ("rank-bsr", "binary-search ranking"),
    ):
        _common(sub.add_parser(name, help=help_))
    exp = sub.add_parser("experiment", help="sweep n and eps for one algorithm")
    exp.add_argument("--algorithm", choices=["knockout", "merge-rank", "bsr"], default="knockout")
    _common(exp, sweep=True)
    vm = sub.add_parser("verify-model", help="check transitivity and triangle inequality")
    vm.add_argument("--model", required=True)
    vm.add_argument("--n", type=int, default=None)
    vm.add_argument("--tol", type=float, default=1e-12)
    return parser


def _run(args, algorithm, ns, epss) -> int:
    records = []
    for n in ns:
        for eps in epss:
            spec = ExperimentSpec(
                algorithm=algorithm, model=args.model, n=n, eps=eps, delta=args.delta,
                gamma=args.gamma, x=args.x, anchors=args.anchors, runs=args.runs,
                seed=args.seed, timing=args.timing,
            )
            recs = run_experiment(spec, n_jobs=args.threads, first_run_id=len(records))
            records.extend(recs)
            s = summarize(recs)
            print(f"{algorithm} model={args.model} n={recs[0].n} eps={eps} delta={args.delta} "
                  f"runs={s['runs']} mean_comparisons={s['mean_comparisons']:.6g} "
                  f"std={s['std_comparisons']:.6g} success_rate={s['success_rate']:.4f}")
            if args.runs == 1:
                print("output:", " ".join(map(str, recs[0].output)) if isinstance(recs[0].output, list)
                      else recs[0].output)
    if args.out:
        emit_csv(records, args.out)
        log.info("wrote %d records to %s", len(records), args.out)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "verify-model":
            rep = verify_properties(make_model(args.model, args.n), tol=args.tol)
            print(f"sst_holds={rep.sst_holds} sti_holds={rep.sti_holds} gamma={rep.gamma:.6g} "
                  f"triples={rep.n_triples} worst_violation={rep.worst_violation}")
            return 0
        if args.command == "experiment":
            return _run(args, args.algorithm, args.n or [None], args.eps)
        return _run(args, _FIXED[args.command], [args.n], [args.eps])
    except ValueError as exc:
        print(f"pacrank: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"pacrank: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
