"""Command-line interface.

Subcommands: transform, train, predict, evaluate, experiment,
synth-traveller, version.  Data goes to files or stdout; diagnostics go to
stderr; any rejection exits nonzero with a one-line message.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .core import DataFormatError, validate_dataset
from .dataio import (dataset_to_csv, load_dataset, load_model, load_sequences,
                     predictions_from_csv, predictions_to_csv, save_model,
                     sequences_to_csv)
from .harness import load_experiment_spec, run_experiment
from .metrics import evaluate_pairs
from .methods import DEFAULT_PARAMS, METHOD_NAMES, predict_method, train_method
from .synth import TRAVELLER_FEATURES, SynthTravellerConfig, synth_traveller
from .transform import window_transform


def _write_out(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _cmd_transform(args) -> int:
    seqs, features, n_states = load_sequences(args.input)
    d = window_transform(seqs, args.tau, pad=args.pad, n_states=n_states,
                         features=features, name=args.name)
    problems = validate_dataset(d)
    if problems:
        raise DataFormatError(f"transformed dataset invalid: {problems[0]}")
    _write_out(dataset_to_csv(d), args.output)
    return 0


def _method_params(args) -> dict:
    params = dict(DEFAULT_PARAMS)
    params.update({
        "k": args.k, "alpha": args.alpha, "ell": args.ell, "samples": args.samples,
        "order": args.order,
    })
    if args.prune is not None:
        params["prune"] = args.prune
    if args.sequential:
        params["sequential"] = True
    return params


def _cmd_train(args) -> int:
    d = load_dataset(args.data)
    problems = validate_dataset(d)
    if problems:
        raise DataFormatError(f"training data invalid: {problems[0]}")
    params = _method_params(args)
    model = train_method(args.method, d, args.base, args.seed, params)
    save_model(model, args.save, args.method, params, args.seed)
    return 0


def _cmd_predict(args) -> int:
    model, method, params, seed = load_model(args.model)
    d = load_dataset(args.data)
    preds = [predict_method(method, model, np.asarray(x, dtype=np.float64), seed, params)
             for x, _ in d.instances]
    _write_out(predictions_to_csv(preds), args.output)
    return 0


def _cmd_evaluate(args) -> int:
    d = load_dataset(args.data)
    with open(args.pred) as fh:
        preds = predictions_from_csv(fh.read())
    if len(preds) != d.n:
        raise DataFormatError(f"{len(preds)} predictions for {d.n} instances")
    report = evaluate_pairs([(y, p) for (_, y), p in zip(d.instances, preds)])
    if args.json:
        _write_out(report.to_json() + "\n", args.output)
    else:
        _write_out(report.to_kv_text(), args.output)
    return 0


def _cmd_experiment(args) -> int:
    spec = load_experiment_spec(args.spec)
    run_experiment(spec, outdir=args.outdir)
    print(f"wrote results for {len(spec.datasets)}x{len(spec.methods)} grid to {args.outdir}",
          file=sys.stderr)
    return 0


def _cmd_synth_traveller(args) -> int:
    kwargs = {}
    if args.config:
        import configparser

        cp = configparser.ConfigParser(delimiters=("=",), interpolation=None)
        cp.read(args.config)
        sect = cp["traveller"] if cp.has_section("traveller") else cp["DEFAULT"]
        for key in ("n_nodes", "n_steps", "seed", "degree", "start_day"):
            if key in sect:
                kwargs[key] = sect.getint(key)
        for key in ("stay_prob", "commute_strength", "gps_noise", "start_hour"):
            if key in sect:
                kwargs[key] = sect.getfloat(key)
    for key in ("n_nodes", "n_steps", "seed", "degree"):
        v = getattr(args, key)
        if v is not None:
            kwargs[key] = v
    if args.stay_prob is not None:
        kwargs["stay_prob"] = args.stay_prob
    cfg = SynthTravellerConfig(**kwargs)
    seq = synth_traveller(cfg)
    _write_out(sequences_to_csv([seq], TRAVELLER_FEATURES, cfg.n_nodes), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="seqlabel",
                                description="Multi-label methods for sequence prediction")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transform", help="sequence CSV -> block dataset CSV")
    t.add_argument("input")
    t.add_argument("--tau", type=int, required=True)
    t.add_argument("--pad", action="store_true")
    t.add_argument("--name", default="")
    t.add_argument("-o", "--output", default=None)
    t.set_defaults(func=_cmd_transform)

    tr = sub.add_parser("train", help="train a model on a block dataset")
    tr.add_argument("--data", required=True)
    tr.add_argument("--method", required=True, choices=METHOD_NAMES)
    tr.add_argument("--base", default="nb", choices=("nb", "dt"))
    tr.add_argument("--k", type=int, default=DEFAULT_PARAMS["k"])
    tr.add_argument("--alpha", type=int, default=DEFAULT_PARAMS["alpha"])
    tr.add_argument("--ell", type=int, default=DEFAULT_PARAMS["ell"])
    tr.add_argument("--samples", type=int, default=DEFAULT_PARAMS["samples"])
    tr.add_argument("--prune", type=int, default=None)
    tr.add_argument("--order", choices=("time", "random"), default="time")
    tr.add_argument("--sequential", action="store_true",
                    help="rakeld: consecutive time chunks instead of random")
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--save", required=True)
    tr.set_defaults(func=_cmd_train)

    pr = sub.add_parser("predict", help="predict label vectors for a dataset")
    pr.add_argument("--model", required=True)
    pr.add_argument("data")
    pr.add_argument("-o", "--output", default=None)
    pr.set_defaults(func=_cmd_predict)

    ev = sub.add_parser("evaluate", help="score predictions against a dataset")
    ev.add_argument("--data", required=True)
    ev.add_argument("--pred", required=True)
    ev.add_argument("--metrics", default=None,
                    help="ignored filter; the report always carries all metrics")
    ev.add_argument("--json", action="store_true")
    ev.add_argument("-o", "--output", default=None)
    ev.set_defaults(func=_cmd_evaluate)

    ex = sub.add_parser("experiment", help="run a spec file over a method grid")
    ex.add_argument("--spec", required=True)
    ex.add_argument("--outdir", required=True)
    ex.set_defaults(func=_cmd_experiment)

    sy = sub.add_parser("synth-traveller", help="generate a synthetic traveller stream")
    sy.add_argument("--config", default=None)
    sy.add_argument("--n-nodes", dest="n_nodes", type=int, default=None)
    sy.add_argument("--n-steps", dest="n_steps", type=int, default=None)
    sy.add_argument("--seed", type=int, default=None)
    sy.add_argument("--degree", type=int, default=None)
    sy.add_argument("--stay-prob", dest="stay_prob", type=float, default=None)
    sy.add_argument("-o", "--output", default=None)
    sy.set_defaults(func=_cmd_synth_traveller)

    ve = sub.add_parser("version", help="print the package version")
    ve.set_defaults(func=lambda args: print(__version__) or 0)

    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
