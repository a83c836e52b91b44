"""Command line entry point.

Exit codes: 0 converged (gap <= epsilon), 1 ran to the iteration limit,
2 configuration or input error, 3 numerical abort.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..exceptions import NumericalError
from .data import DataFormatError, SynthLassoParams, synth_lasso, write_libsvm
from .experiment import ConfigError, ExperimentConfig, run_experiment

EXIT_OK, EXIT_NOT_CONVERGED, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3

SUBCOMMAND_MODE = {"solve": "centralized", "dfw": "dfw", "approx": "approx"}


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat JSON key/value file; flags override it")
    p.add_argument("--objective", choices=["lasso", "svm", "adaboost", "quadratic"])
    p.add_argument("--data", help="LIBSVM file (synthetic Lasso when omitted)")
    p.add_argument("--transpose", action="store_true", default=None,
                   help="treat features as atoms")
    p.add_argument("--d", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--density-atoms", type=float)
    p.add_argument("--density-alpha", type=float)
    p.add_argument("--topology", help="star:N, tree:b:N, general:N:seed or full:N")
    p.add_argument("--partition", help="uniform, contiguous or unbalanced:fraction")
    p.add_argument("--hub-holds-atoms", action="store_true", default=None,
                   help="let the star coordinator own atoms")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--max-iter", type=int)
    dom = p.add_mutually_exclusive_group()
    dom.add_argument("--beta", type=float, help="l1-ball radius")
    dom.add_argument("--simplex", action="store_true", default=None)
    p.add_argument("--step", choices=["harmonic", "linesearch"])
    p.add_argument("--drop", type=float, help="message drop probability")
    p.add_argument("--seed", type=int)
    p.add_argument("--C", type=float, dest="C")
    p.add_argument("--bandwidth", type=float)
    p.add_argument("--temperature", type=float)
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dfwlearn",
                                     description="Distributed Frank-Wolfe experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("solve", "centralized Frank-Wolfe"),
                        ("dfw", "exact distributed Frank-Wolfe"),
                        ("approx", "approximate dFW with greedy m-center selection")):
        p = sub.add_parser(name, help=help_)
        _common(p)
        if name == "approx":
            p.add_argument("--centers", help="fixed:m, fixed:auto-balance or linear:rate")
    p = sub.add_parser("baseline", help="random or local-FW atom selection")
    _common(p)
    p.add_argument("--kind", choices=["random", "localfw"], default="random")
    p.add_argument("--m", help="atoms per node, comma separated for a curve")
    p = sub.add_parser("synth", help="write a synthetic Lasso instance in LIBSVM format")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--density-atoms", type=float, default=0.1)
    p.add_argument("--density-alpha", type=float, default=0.01)
    p.add_argument("--noise-var", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lambda-convention", choices=["AT_y", "A_y"], default="AT_y")
    p.add_argument("--out", required=True, help="output directory")
    return parser


def config_from_args(args) -> ExperimentConfig:
    doc = {}
    if args.config:
        doc.update(ExperimentConfig.from_file(args.config).to_dict())
    skip = {"command", "config", "kind"}
    for key, value in vars(args).items():
        if key not in skip and value is not None:
            doc[key] = value
    if args.command == "baseline":
        doc["mode"] = f"baseline-{args.kind}"
    else:
        doc["mode"] = SUBCOMMAND_MODE[args.command]
    if args.beta is not None:
        doc["simplex"] = False
    if args.simplex:
        doc["beta"] = None
    return ExperimentConfig.from_mapping(doc)


def _synth(args) -> int:
    inst = synth_lasso(SynthLassoParams(args.d, args.n, args.density_atoms, args.density_alpha,
                                        args.noise_var, args.seed, args.lambda_convention))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_libsvm(out / "data.libsvm", inst.atoms, inst.y, transpose=True)
    info = {"d": args.d, "n": args.n, "lambda_max": inst.lambda_max,
            "suggested_beta": inst.beta, "seed": args.seed,
            "true_support": [int(i) for i in inst.alpha_true.nonzero()[0]]}
    (out / "summary.json").write_text(json.dumps(info, indent=2))
    print(f"wrote {out / 'data.libsvm'} (suggested beta {inst.beta:.6g})")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "synth":
            return _synth(args)
        cfg = config_from_args(args)
        res = run_experiment(cfg)
    except (ConfigError, DataFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    s = res.summary
    print(f"{s['mode']}: rounds={s['rounds']} objective={s['final_objective']:.10g} "
          f"gap={s['final_gap']:.3g} communication={s['total_communication']}")
    if cfg.mode.startswith("baseline"):
        return EXIT_OK
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


if __name__ == "__main__":
    sys.exit(main())
