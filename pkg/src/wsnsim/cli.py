"""Command-line front end.

Subcommands::

    wsnsim run     --config FILE [--protocol P] [--seed S] [--max-rounds R] --out DIR
    wsnsim compare --config FILE --protocols LEACH,SEP,... [--seeds N | --seed-list 1,2] --out DIR
    wsnsim preset  paper-case-1|paper-case-2 [--seeds N] --out DIR

Exit codes: 0 success, 1 usage or config error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .config import PRESETS, load_config
from .engine import HISTORY_DTYPE, RunSummary, run_ensemble, run_scenario, summarize_comparison
from .netmodel import ConfigError, Protocol, ScenarioConfig

COLUMNS = list(HISTORY_DTYPE.names)
PLOTS = {
    "alive.svg": ("alive", "nodes alive"),
    "dead.svg": ("dead", "dead nodes"),
    "packets.svg": ("packets_cum", "packets to base station"),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.9g}"


def write_history_csv(path: Path, history: np.ndarray):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for rec in history:
            w.writerow([_fmt(v) for v in rec.tolist()])


def mean_history(runs: list[RunSummary]) -> np.ndarray:
    """Per-round mean over runs; finished runs are held at their final state."""
    length = max(len(s.history) for s in runs)
    out = np.zeros((length, len(COLUMNS)))
    for s in runs:
        h = s.history
        block = np.column_stack([h[c].astype(float) for c in COLUMNS])
        if len(h) < length:
            pad = np.repeat(block[-1:], length - len(h), axis=0)
            pad[:, COLUMNS.index("ch_count")] = 0
            pad[:, COLUMNS.index("packets_round")] = 0
            block = np.vstack([block, pad])
        out += block
    out /= len(runs)
    out[:, 0] = np.arange(length)
    return out


def write_mean_csv(path: Path, table: np.ndarray):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in table:
            w.writerow([str(int(row[0]))] + [f"{v:.9g}" for v in row[1:]])


def read_csv(path: Path) -> dict[str, np.ndarray]:
    data = np.genfromtxt(path, delimiter=",", names=True, dtype=float)
    return {name: np.atleast_1d(data[name]) for name in data.dtype.names}


def plot_from_csvs(csvs: dict[str, Path], out_dir: Path) -> list[Path]:
    """Draw the alive, dead and cumulative-packet curves from mean CSVs."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    tables = {name: read_csv(p) for name, p in csvs.items()}
    written = []
    for fname, (column, label) in PLOTS.items():
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for name, t in tables.items():
            ax.plot(t["round"], t[column], label=name, linewidth=1.2)
        ax.set_xlabel("round")
        ax.set_ylabel(label)
        ax.set_xscale("symlog", linthresh=1000)
        ax.grid(alpha=0.3)
        ax.legend()
        fig.tight_layout()
        path = out_dir / fname
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        written.append(path)
    return written


def _summary_json(summary: RunSummary) -> dict:
    data = summary.scalars()
    data["final_residual"] = summary.final_residual
    return data


def cmd_run(args) -> int:
    config = load_config(args.config, protocol=args.protocol)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    if args.max_rounds is not None:
        config = _with_max_rounds(config, args.max_rounds)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary = run_scenario(config)
    write_history_csv(out / "rounds.csv", summary.history)
    (out / "summary.json").write_text(json.dumps(_summary_json(summary), indent=2) + "\n")
    print(f"{config.protocol.value} seed {config.rng_seed}: first death "
          f"{summary.stability_period}, lifetime {summary.network_lifetime}, "
          f"packets {summary.total_packets}")
    return 0


def _with_max_rounds(config: ScenarioConfig, rounds: int) -> ScenarioConfig:
    import dataclasses
    if rounds < 1:
        raise ConfigError("--max-rounds must be at least 1")
    return dataclasses.replace(config, max_rounds=rounds)


def _compare(configs: dict[Protocol, ScenarioConfig], seeds, out: Path, workers: int):
    out.mkdir(parents=True, exist_ok=True)
    results, means = {}, {}
    for proto, config in configs.items():
        runs = run_ensemble(config, seeds, workers=workers)
        results[proto] = runs
        pdir = out / proto.value
        pdir.mkdir(exist_ok=True)
        for s in runs:
            write_history_csv(pdir / f"seed_{s.seed}.csv", s.history)
        means[proto.value] = out / f"{proto.value}_mean.csv"
        write_mean_csv(means[proto.value], mean_history(runs))
        print(f"{proto.value}: {len(runs)} runs done", flush=True)
    cmp = summarize_comparison(results)
    (out / "comparison.txt").write_text(cmp.to_text() + "\n")
    records = cmp.to_records()
    with open(out / "comparison.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(records[0]), lineterminator="\n")
        w.writeheader()
        for rec in records:
            w.writerow({k: (v if isinstance(v, (str, int)) else f"{v:.9g}") for k, v in rec.items()})
    print(cmp.to_text())
    return cmp, means


def _seed_list(args) -> list[int]:
    if args.seed_list:
        try:
            seeds = [int(s) for s in args.seed_list.split(",") if s.strip()]
        except ValueError:
            raise UsageError(f"bad --seed-list {args.seed_list!r}") from None
    else:
        seeds = list(range(args.seeds))
    if not seeds:
        raise UsageError("at least one seed is required")
    return seeds


def cmd_compare(args) -> int:
    names = [p.strip() for p in args.protocols.split(",") if p.strip()]
    if not names:
        raise UsageError("compare needs at least one protocol")
    protos = list(dict.fromkeys(Protocol.parse(p) for p in names))
    configs = {p: load_config(args.config, protocol=p) for p in protos}
    if args.max_rounds is not None:
        configs = {p: _with_max_rounds(c, args.max_rounds) for p, c in configs.items()}
    _compare(configs, _seed_list(args), Path(args.out), args.workers)
    return 0


def cmd_preset(args) -> int:
    preset = PRESETS[args.name]
    if args.seeds is not None:
        if args.seeds < 1:
            raise UsageError("--seeds must be at least 1")
        preset = preset.with_seed_count(args.seeds)
    out = Path(args.out)
    _, means = _compare(preset.configs(), preset.seeds, out, args.workers)
    for path in plot_from_csvs(means, out):
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wsnsim", description="Round-based clustering protocol simulator.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    run = sub.add_parser("run", help="simulate one scenario")
    run.add_argument("--config", required=True)
    run.add_argument("--protocol")
    run.add_argument("--seed", type=int)
    run.add_argument("--max-rounds", type=int)
    run.add_argument("--out", default="out")
    run.set_defaults(func=cmd_run)

    cmp = sub.add_parser("compare", help="run a protocol set over a seed list")
    cmp.add_argument("--config", required=True)
    cmp.add_argument("--protocols", required=True, help="comma separated")
    cmp.add_argument("--seeds", type=int, default=10, help="use seeds 0..N-1")
    cmp.add_argument("--seed-list", help="explicit comma separated seeds")
    cmp.add_argument("--max-rounds", type=int)
    cmp.add_argument("--workers", type=int, default=1)
    cmp.add_argument("--out", default="out")
    cmp.set_defaults(func=cmd_compare)

    pre = sub.add_parser("preset", help="run a built-in experiment and plot it")
    pre.add_argument("name", choices=sorted(PRESETS))
    pre.add_argument("--seeds", type=int)
    pre.add_argument("--workers", type=int, default=1)
    pre.add_argument("--out", default="out")
    pre.set_defaults(func=cmd_preset)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand (run, compare or preset)")
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"wsnsim: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"wsnsim: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"wsnsim: runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
