"""Command-line entry point.

Exit codes: 0 success, 1 assertion failure (a bound or pathwise inequality
was violated), 2 configuration or usage error.  Results go to stdout as JSON
or CSV; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import bounds as B
from ._accel import set_threads
from .combinatorial import DagError, dag_oracle, load_dag
from .core import ContractError
from .harness import TRACE_COLUMNS, ConfigError, ExperimentConfig, parse_vary, replay, run_experiment, sweep, trace_rows

EXIT_OK, EXIT_ASSERT, EXIT_CONFIG = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lazyleader", description="Random-walk perturbation forecasters: experiments and bounds.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run one experiment from a JSON config")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=int, help="override master_seed")
    run.add_argument("--out", help="override the output directory")
    run.add_argument("--svg", action="store_true", help="also write curve.svg")
    run.add_argument("--threads", type=int, help="worker threads (default: LAZYLEADER_THREADS or all cores)")

    bd = sub.add_parser("bounds", help="evaluate a closed-form bound and print it as JSON")
    bd.add_argument("--which", required=True, choices=B.BOUND_NAMES)
    bd.add_argument("--n", type=int, required=True)
    bd.add_argument("--N", type=int)
    bd.add_argument("--d", type=int)
    bd.add_argument("--m", type=int)
    bd.add_argument("--eta", type=float)
    bd.add_argument("--t", type=int, help="round for lemma2 (defaults to n)")

    oc = sub.add_parser("oracle-check", help="compare the DAG oracle with brute-force path enumeration")
    oc.add_argument("--dag", required=True)
    oc.add_argument("--trials", type=int, default=1000)
    oc.add_argument("--seed", type=int, default=0)
    oc.add_argument("--tol", type=float, default=1e-12)

    rp = sub.add_parser("replay", help="rerun one replication and print its per-round trace as CSV")
    rp.add_argument("--config", required=True)
    rp.add_argument("--replication", type=int, required=True)
    rp.add_argument("--seed", type=int, help="override master_seed")

    sw = sub.add_parser("sweep", help="run a config over a list of parameter values")
    sw.add_argument("--config", required=True)
    sw.add_argument("--vary", required=True, help="KEY=V1,V2,... with KEY in n, N, d, m, replications, master_seed")
    sw.add_argument("--out", help="override the output directory")
    sw.add_argument("--threads", type=int)
    return p


def _load(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config)
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["master_seed"] = args.seed
    if getattr(args, "out", None):
        changes["outputs"] = {**cfg.outputs, "dir": args.out}
    if getattr(args, "svg", False):
        changes["outputs"] = {**changes.get("outputs", cfg.outputs), "svg": True}
    return cfg.replace(**changes) if changes else cfg


def _report_failures(result, config_path) -> None:
    for a in result.assertions:
        if a.passed:
            continue
        print(f"assertion {a.name} FAILED: {a.detail}", file=sys.stderr)
        for f in a.failing[:10]:
            print(f"  replication {f['replication']} (master_seed {f['master_seed']}); replay with: "
                  f"lazyleader replay --config {config_path} --seed {f['master_seed']} "
                  f"--replication {f['replication']}", file=sys.stderr)
        if len(a.failing) > 10:
            print(f"  ... {len(a.failing) - 10} more", file=sys.stderr)


def _cmd_run(args) -> int:
    set_threads(args.threads)
    cfg = _load(args)
    result = run_experiment(cfg)
    print(json.dumps(result.summary_dict(), indent=2, sort_keys=True))
    _report_failures(result, args.config)
    return EXIT_OK if result.passed else EXIT_ASSERT


def _cmd_bounds(args) -> int:
    rep = B.report(args.which, args.n, N=args.N, d=args.d, m=args.m, eta=args.eta, t=args.t)
    print(json.dumps(rep.to_dict(), sort_keys=True))
    return EXIT_OK


def _cmd_oracle_check(args) -> int:
    dag = load_dag(args.dag)
    paths = dag.enumerate()
    if paths is None:
        raise ConfigError(f"{args.dag}: too many paths to enumerate")
    gen = np.random.default_rng(args.seed)
    P = paths.astype(np.float64)
    worst = 0.0
    for _ in range(args.trials):
        z = gen.standard_normal(dag.d)
        worst = max(worst, abs(float(dag_oracle(dag, z) @ z) - float((P @ z).min())))
    ok = worst <= args.tol
    print(json.dumps({"dag": args.dag, "paths": int(paths.shape[0]), "trials": args.trials,
                      "max_abs_gap": worst, "passed": ok}, sort_keys=True))
    return EXIT_OK if ok else EXIT_ASSERT


def _cmd_replay(args) -> int:
    cfg = _load(args)
    record, losses = replay(cfg, args.replication)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    w.writerows(trace_rows(record, losses))
    print(f"replication {args.replication} (master_seed {cfg.master_seed}): "
          f"regret {record.regret:.6g}, switches {record.switches}", file=sys.stderr)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    set_threads(args.threads)
    cfg = _load(args)
    key, values = parse_vary(args.vary)
    results = sweep(cfg, key, values)
    out, ok = [], True
    for v, res in results:
        ok &= res.passed
        final = {name: series[-1] for name, series in res.metrics.items() if isinstance(series, list)}
        out.append({key: v, "final": final, "assertions": [a.to_dict() for a in res.assertions],
                    "bounds": res.bounds})
        _report_failures(res, args.config)
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK if ok else EXIT_ASSERT


COMMANDS = {
    "run": _cmd_run,
    "bounds": _cmd_bounds,
    "oracle-check": _cmd_oracle_check,
    "replay": _cmd_replay,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DagError, ContractError, ValueError) as exc:
        print(f"lazyleader {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head); not an error
        sys.stdout = None
        return EXIT_OK
    except OSError as exc:
        print(f"lazyleader {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
