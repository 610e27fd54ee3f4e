"""Command-line entry point.

    bklab all --seed 7 --out results/
    bklab adaptive-attack --subject full
    bklab --dump-config > lab.ini

Writes ``results.jsonl`` (one record per scenario), ``summary.txt`` and
``timings.jsonl`` into the output directory.  The first two are a pure
function of the configuration; wall-clock times go only to the third.
``BKLAB_OUT`` overrides the configured output directory; ``--out`` wins
over both.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from .config import SCENARIOS, ConfigError, ExperimentConfig
from .experiments import RUNNERS, ResultRecord

OUT_ENV = "BKLAB_OUT"

_OVERRIDES = [
    ("--n", int, "n"),
    ("--ell", int, "ell"),
    ("--lam", int, "lam"),
    ("--t-class", int, "t_class"),
    ("--delta", float, "delta"),
    ("--lambda-est", float, "lam_est"),
    ("--subject", str, "subject"),
    ("--target-class", int, "target_class"),
    ("--epsilon-threshold", float, "epsilon_threshold"),
    ("--perturbation-trials", int, "perturbation_trials"),
    ("--incompress-trials", int, "incompress_trials"),
    ("--pac-runs", int, "pac_runs"),
]


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="INI config file")
    common.add_argument("--seed", type=int, help="master seed (u64)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--trials", type=int, help="fooling / evaluation trial count")
    for flag, typ, dest in _OVERRIDES:
        common.add_argument(flag, type=typ, dest=dest)

    p = argparse.ArgumentParser(prog="bklab", description="big-key robustness experiments")
    p.add_argument("--dump-config", action="store_true", help="print the default config and exit")
    sub = p.add_subparsers(dest="command")
    for name in (*SCENARIOS, "all"):
        sub.add_parser(name, parents=[common])
    return p


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {dest: getattr(args, dest) for _, _, dest in _OVERRIDES if getattr(args, dest) is not None}
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        overrides["master_seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc.strerror}") from None
        cfg = ExperimentConfig.from_ini(text)
    else:
        cfg = ExperimentConfig()
    if os.environ.get(OUT_ENV):
        overrides["out_dir"] = os.environ[OUT_ENV]
    if args.out is not None:
        overrides["out_dir"] = args.out
    return cfg.replace(**overrides)


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def summary_table(records: list[ResultRecord]) -> str:
    lines = [f"{'scenario':<20} {'result':<6} key measurements"]
    for r in records:
        m = r.measurements
        if r.scenario == "adaptive-attack":
            f = m["fooling"]
            key = (f"outcome={m['outcome']['status']} detected={m['detected_sensitive']} "
                   f"gap={f['gap']:.4f} model_bits={m['model_bits']}")
        elif r.scenario == "majority":
            key = (f"misclass={m['misclassifications']}/{m['trials']} model_bits={m['model_bits']} "
                   f"attack={m['attack']['status']}")
        elif r.scenario == "known-metric":
            key = f"misclass_rate={m['misclassification_rate']} model_bits={m['model_bits']}"
        elif r.scenario == "pac-learn":
            key = f"recovered={m['recovered']}/{m['runs']} t={m['share_count']} acc={m['clean_accuracy']}"
        else:
            key = " ".join(f"rho={c['rho']}/{c['fill']}:{c['success_rate']:.4f}" for c in m["cells"])
        lines.append(f"{r.scenario:<20} {'PASS' if r.passed else 'FAIL':<6} {key}")
    return "\n".join(lines) + "\n"


def run(cfg: ExperimentConfig, scenarios) -> list[ResultRecord]:
    records = [RUNNERS[s](cfg) for s in scenarios]
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _atomic_write(out / "results.jsonl",
                  "".join(json.dumps(r.to_dict(), sort_keys=True) + "\n" for r in records))
    _atomic_write(out / "summary.txt", summary_table(records))
    _atomic_write(out / "timings.jsonl",
                  "".join(json.dumps({"scenario": r.scenario, "wall_clock": r.wall_clock}) + "\n"
                          for r in records))
    return records


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.dump_config:
        sys.stdout.write(ExperimentConfig().to_ini())
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = load_config(args)
        scenarios = SCENARIOS if args.command == "all" else (args.command,)
        records = run(cfg, scenarios)
    except ConfigError as exc:
        print(f"bklab: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(summary_table(records))
    return 0 if all(r.passed for r in records) else 1


if __name__ == "__main__":
    sys.exit(main())
