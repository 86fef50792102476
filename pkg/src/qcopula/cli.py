"""Command-line entry point: ``qcopula <command> [options]``.

Hyperparameters resolve as flag, then ``--config`` JSON value, then the
published default for the chosen model.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import pipeline
from .copula import pit_transform_columns
from .datasets import read_points_csv, synthetic_prices_path, write_points_csv
from .hardness import IqpInstance, verify_iqp_reduction

_TUNABLES = {f.name for f in fields(pipeline.RunConfig)} - {"extra"}


def _common(parser: argparse.ArgumentParser, seed_required: bool = True) -> None:
    g = parser.add_argument_group("hyperparameters")
    g.add_argument("--config", type=Path, help="JSON file of hyperparameters (flags override it)")
    g.add_argument("--seed", type=int, required=False, default=None, help="random seed" + (" (required)" if seed_required else ""))
    g.add_argument("--qubits", type=int, help="total qubits over both registers (default 6)")
    g.add_argument("--layers", type=int, help="ansatz layers per register (default 1)")
    g.add_argument("--pad-bits", type=int, help="random low-order bits appended to samples (default 20)")
    g.add_argument("--shots", type=int, help="QCBM shots per cost evaluation (default 500)")
    g.add_argument("--iterations", type=int, help="training iterations")
    g.add_argument("--a", type=float, help="SPSA learning-rate scale")
    g.add_argument("--c", type=float, help="SPSA perturbation scale")
    g.add_argument("--gamma", type=float, help="SPSA perturbation decay exponent (default 0.101)")
    g.add_argument("--n-inner", type=int, help="SPSA steps per QGAN iteration (default 5)")
    g.add_argument("--lr-disc", type=float, help="QGAN discriminator learning rate (default 0.0015)")
    g.add_argument("--lr", type=float, help="classical GAN learning rate (default 0.0001)")
    g.add_argument("--batch", type=int, help="adversarial batch size (default 2048)")
    g.add_argument("--noise-p", type=float, help="two-qubit depolarizing probability (default 0)")
    g.add_argument("--permutations", type=int, help="KS permutation count (default 1000)")
    g.add_argument("--samples", type=int, help="number of generated samples to evaluate")
    g.add_argument("--out-dir", type=Path, default=Path("."), help="output directory (default .)")


def run_config(args: argparse.Namespace, seed_required: bool = True) -> pipeline.RunConfig:
    values = {}
    if args.config is not None:
        raw = json.loads(Path(args.config).read_text())
        for key, value in raw.items():
            name = key.replace("-", "_")
            if name not in _TUNABLES:
                raise ValueError(f"unknown config key {key!r}")
            values[name] = value
    for name in _TUNABLES:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    if values.get("seed") is None:
        if seed_required:
            raise ValueError("--seed is required (on the command line or in --config)")
        values["seed"] = 0
    return pipeline.RunConfig(**values)


def _copula_points(path) -> np.ndarray:
    """Training points for a fit: returns are mapped through the PIT."""
    return pit_transform_columns(pipeline.load_returns(path))


def cmd_ingest(args) -> int:
    prices = args.prices or synthetic_prices_path()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out = args.out_dir / "returns.csv"
    returns = pipeline.ingest(prices, out)
    print(f"wrote {len(returns)} return pairs to {out}")
    return 0


def _cmd_train(model: str):
    def run(args) -> int:
        config = run_config(args)
        if getattr(args, "init_from", None) is not None:
            config.extra["init_from"] = args.init_from
        paths = pipeline.train(model, _copula_points(args.returns), config, args.out_dir)
        for role, path in paths.items():
            print(f"{role}: {path}")
        return 0

    return run


def cmd_sample(args) -> int:
    config = run_config(args)
    count = config.samples or pipeline.SAMPLE_COUNT[args.model]
    u = pipeline.sample(args.model, args.checkpoint, count, config.seed, config.noise_p)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out = args.out_dir / f"{args.model}_samples.csv"
    if args.returns is not None:
        x = pipeline.Marginals.fit(pipeline.load_returns(args.returns)).to_data(u)
        write_points_csv(out, x, ("x1", "x2"))
    else:
        write_points_csv(out, u, ("u1", "u2"))
    print(f"wrote {count} samples to {out}")
    return 0


def cmd_evaluate(args) -> int:
    config = run_config(args, seed_required=False)
    header, samples = read_points_csv(args.samples_csv)
    training = pipeline.load_returns(args.returns)
    if header == ("u1", "u2"):
        training = pit_transform_columns(training)
    elif header != ("x1", "x2"):
        raise ValueError(f"samples CSV must have header u1,u2 or x1,x2, got {','.join(header)}")
    report = pipeline.evaluate(args.model, samples, training, config.permutations, config.seed)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out = args.out_dir / f"{args.model}_report.json"
    report.save(out)
    print(out.read_text(), end="")
    return 0


def cmd_reduce_check(args) -> int:
    args.out_dir.mkdir(parents=True, exist_ok=True)
    lines = []
    rng = np.random.default_rng(args.seed)
    for n in args.n:
        worst = max(verify_iqp_reduction(IqpInstance.random(n, rng)) for _ in range(args.instances))
        lines.append(json.dumps({"n": n, "max_diff": worst}))
        print(lines[-1])
    (args.out_dir / "reduce_check.jsonl").write_text("".join(line + "\n" for line in lines))
    return 0


def cmd_pipeline(args) -> int:
    config = run_config(args)
    returns = pipeline.load_returns(args.returns)
    report = pipeline.run_pipeline(returns, args.model, config, args.out_dir)
    print(json.dumps({"model": report.model, "d_ks": report.d_ks, "p_value": report.p_value}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcopula", description="Quantum copula generative models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="prices CSV to paired daily returns")
    p.add_argument("prices", nargs="?", type=Path, help="date,<a>,<b> CSV (default: bundled synthetic data)")
    p.add_argument("--out-dir", type=Path, default=Path("."))
    p.set_defaults(func=cmd_ingest)

    for model, label in (("qcbm", "Born machine"), ("qgan", "quantum GAN"), ("cgan", "classical GAN")):
        p = sub.add_parser(f"train-{model}", help=f"train the {label} on a returns CSV")
        p.add_argument("returns", type=Path)
        _common(p)
        if model == "qcbm":
            p.add_argument("--init-from", type=Path, help="smaller-ansatz params JSON to transfer from")
        p.set_defaults(func=_cmd_train(model))

    p = sub.add_parser("fit-gaussian", help="fit the Gaussian copula baseline")
    p.add_argument("returns", type=Path)
    _common(p)
    p.set_defaults(func=_cmd_train("gaussian"))

    p = sub.add_parser("sample", help="draw samples from a checkpoint")
    p.add_argument("--model", choices=pipeline.MODELS, required=True)
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--returns", type=Path, help="training returns; if given, samples are mapped back to data space")
    _common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("evaluate", help="2-d KS permutation test against bootstrapped training data")
    p.add_argument("samples_csv", type=Path)
    p.add_argument("returns", type=Path)
    p.add_argument("--model", default="model", help="label recorded in the report")
    _common(p, seed_required=False)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("reduce-check", help="verify the IQP embedding on random instances")
    p.add_argument("--n", type=int, nargs="+", default=[2, 3, 4])
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", type=Path, default=Path("."))
    p.set_defaults(func=cmd_reduce_check)

    p = sub.add_parser("pipeline", help="transform, fit, sample, back-transform and evaluate")
    p.add_argument("returns", type=Path)
    p.add_argument("--model", choices=pipeline.MODELS, required=True)
    _common(p)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
