"""Command-line entry point: graph, augment, train, eval, table, fixtures and convert."""
import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from .graphs.graph import save_edge_list
from .graphs.montage import build_graph, load_montage, parse_edge_policy
from .pipeline.augment import DEFAULT_SNR_DB, augment_awgn
from .pipeline.fixtures import make_fixture
from .pipeline.trialset import load_trialset, save_trialset
from .schemas.experiment import load_experiment_config
from .tools.convert import convert, load_export
from .tools.table import TABLE_FORMATS, build_table
from .training.report import format_confusion
from .training.runs import describe_dry_run, load_run, prepare_experiment, run_experiment
from .training.trainer import evaluate
from .utils.error_handler import UsageError, handle_command_errors
from .utils.logger import get_logger
from .utils.settings import get_settings

EPILOG = """
Examples:
  # Inspect the graph a policy builds on a montage
  eegraph graph rsvp16 --edge-policy knng:k=1 --out rsvp16.edges

  # Synthetic dataset plus a ready-to-run config, then train and evaluate it
  eegraph fixtures --out fixture/
  eegraph train --config fixture/experiment.toml --out runs/gin --runs 1
  eegraph eval --run runs/gin --data fixture/fixture.json --channels

  # Augment a training set at 10, 5 and 2 dB SNR
  eegraph augment --snr 10,5,2 --seed 7 train.json train_aug.json

  # Mean ± std accuracy over seeded runs
  eegraph table runs/gin runs/sage

  # Convert an .npz or long-format .csv export into a native dataset
  eegraph convert errp.npz data/errp.json --montage errp56 --rate 250
"""


def _logger():
    return get_logger("cli")


class _Parser(argparse.ArgumentParser):
    """Argument errors become ``UsageError`` so they share the exit-code mapping."""

    def error(self, message: str):
        raise UsageError(message)


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    default = argparse.SUPPRESS if suppress else None
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, default=default, help="Seed for every random choice (default: EEGRAPH_DEFAULT_SEED or 0)")
    parent.add_argument("--out", type=str, default=default, help="Output file or directory")
    parent.add_argument("--dry-run", action="store_true", default=argparse.SUPPRESS if suppress else False,
                        help="Print what would happen without writing files")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="eegraph",
        description="Graph neural networks for EEG trial classification",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG,
        parents=[_global_flags(suppress=False)],
    )
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    common = [_global_flags(suppress=True)]

    p = sub.add_parser("graph", parents=common, help="Build an electrode graph and write its edge list")
    p.add_argument("montage", help="Montage file or built-in name (errp56, rsvp16)")
    p.add_argument("--edge-policy", default="complete", help="complete | knng:k=K | dist:d=D, optional ,self-loops")

    p = sub.add_parser("augment", parents=common, help="Append AWGN copies of every trial")
    p.add_argument("input", help="Input manifest")
    p.add_argument("output", nargs="?", help="Output manifest (or --out)")
    p.add_argument("--snr", default=",".join(f"{s:g}" for s in DEFAULT_SNR_DB), help="Comma-separated SNR levels in dB (default: 10,5,2)")

    p = sub.add_parser("train", parents=common, help="Train from an experiment config")
    p.add_argument("--config", required=True, help="Experiment TOML")
    p.add_argument("--data", default=None, help="Dataset manifest (overrides data.manifest)")
    p.add_argument("--runs", type=int, default=None, help="Seeded runs (default: train.runs or EEGRAPH_RUNS)")

    p = sub.add_parser("eval", parents=common, help="Evaluate a trained run on a dataset")
    p.add_argument("--run", required=True, help="Run directory")
    p.add_argument("--data", required=True, help="Dataset manifest")
    p.add_argument("--channels", action="store_true", help="Also rank electrodes by embedding norm")

    p = sub.add_parser("table", parents=common, help="Aggregate run directories into a results table")
    p.add_argument("runs", nargs="*", help="Run directories (multi-run outputs expand to seed-*)")
    p.add_argument("--format", choices=TABLE_FORMATS, default="text")

    p = sub.add_parser("fixtures", parents=common, help="Write the synthetic fixture dataset and config")
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--snr-db", type=float, default=0.0)

    p = sub.add_parser("convert", parents=common, help="Convert an .npz or long-format .csv export to a native dataset")
    p.add_argument("source", help="Export file (.npz with X and y, or long-format .csv)")
    p.add_argument("manifest", nargs="?", help="Output manifest (or --out)")
    p.add_argument("--montage", required=True, help="Montage file or built-in name, in channel order")
    p.add_argument("--rate", type=float, required=True, help="Sample rate in Hz")
    p.add_argument("--classes", type=int, default=None, help="Number of classes (default: largest label + 1)")
    p.add_argument("--name", default=None, help="Dataset name (default: source file stem)")
    return parser


def _seed(args: argparse.Namespace) -> int:
    return args.seed if args.seed is not None else get_settings().default_seed


def _parse_snr(text: str) -> List[float]:
    if not text.strip():
        return []
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise UsageError(f"bad --snr list '{text}'") from None


# ---- commands ----


def cmd_graph(args: argparse.Namespace) -> int:
    montage = load_montage(args.montage)
    policy = parse_edge_policy(args.edge_policy)
    graph = build_graph(montage, policy)

    print(f"Montage: {args.montage} ({len(montage)} electrodes)")
    print(f"Edge policy: {policy.describe()}")
    print(f"Nodes: {graph.n}")
    print(f"Directed edges: {graph.num_edges}")
    histogram = ", ".join(f"{d}: {c}" for d, c in graph.degree_histogram().items())
    print(f"Degree histogram: {{{histogram}}}")

    if args.dry_run:
        return 0
    out = args.out or f"{Path(str(args.montage)).stem}.edges"
    path = save_edge_list(graph, out)
    _logger().info(f"Wrote edge list {path}")
    print(f"✅ Edge list saved to: {path}")
    return 0


def cmd_augment(args: argparse.Namespace) -> int:
    output = args.output or args.out
    if not output:
        raise UsageError("augment needs an output manifest")
    levels = _parse_snr(args.snr)
    ts = load_trialset(args.input)
    augmented = augment_awgn(ts, levels, _seed(args))
    print(f"{ts.n_trials} trials -> {augmented.n_trials} trials (SNR dB: {', '.join(f'{s:g}' for s in levels) or 'none'})")
    if args.dry_run:
        return 0
    manifest, _, _ = save_trialset(augmented, output)
    print(f"✅ Augmented dataset saved to: {manifest}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    config = load_experiment_config(args.config)
    seed = args.seed if args.seed is not None else config.train.seed
    if args.runs is not None:
        runs = args.runs
    else:
        runs = config.train.runs or get_settings().default_runs
    if runs < 1:
        raise UsageError("--runs must be at least 1")
    experiment = prepare_experiment(config, args.data)

    if args.dry_run:
        summary = describe_dry_run(experiment, seed)
        print("\n" + "=" * 60)
        print("DRY RUN")
        print("=" * 60)
        for key, value in summary.items():
            print(f"  {key}: {value}")
        return 0

    if not args.out:
        raise UsageError("train needs --out")
    results = run_experiment(experiment, args.out, seed, runs)
    for run_dir, report in results:
        print(f"✅ seed {report.seed}: best val acc {100 * report.best_val_acc:.2f}% "
              f"(epoch {report.best_epoch}, {report.n_params:,} params) -> {run_dir}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    loaded = load_run(args.run)
    data = load_trialset(args.data)
    result = evaluate(loaded.model, data)
    print(f"Accuracy: {100 * result.accuracy:.2f}% ({result.n} trials)")
    print(format_confusion(result))

    if args.channels:
        names = load_montage(loaded.config.graph.montage).names
        print("\nChannel importance (mean embedding norm):")
        for rank, (v, score) in enumerate(loaded.model.channel_importance(data.trials), start=1):
            print(f"  {rank:>3}. {names[v]:<6} {score:.6f}")
    return 0


def cmd_table(args: argparse.Namespace) -> int:
    text = build_table(args.runs, args.format)
    sys.stdout.write(text)
    if args.out and not args.dry_run:
        Path(args.out).write_text(text, encoding="utf-8")
    return 0


def cmd_fixtures(args: argparse.Namespace) -> int:
    if not args.out:
        raise UsageError("fixtures needs --out")
    if args.dry_run:
        print(f"Would write a {args.trials}-trial fixture (SNR {args.snr_db:g} dB) to {args.out}")
        return 0
    files = make_fixture(args.out, n_trials=args.trials, snr_db=args.snr_db, seed=_seed(args))
    print(f"✅ Fixture manifest: {files.manifest}")
    print(f"✅ Experiment config: {files.config}")
    return 0


def cmd_convert(args: argparse.Namespace) -> int:
    output = args.manifest or args.out
    if not output:
        raise UsageError("convert needs an output manifest")
    if args.dry_run:
        ts = load_export(args.source, args.montage, args.rate, args.classes, args.name)
        print(f"Would write {ts.n_trials} trials x {ts.n_channels} channels x {ts.n_samples} samples "
              f"({ts.n_classes} classes) to {output}")
        return 0
    manifest = convert(args.source, output, args.montage, args.rate, args.classes, args.name)
    print(f"✅ Converted dataset saved to: {manifest}")
    return 0


COMMANDS = {
    "graph": cmd_graph,
    "augment": cmd_augment,
    "train": cmd_train,
    "eval": cmd_eval,
    "table": cmd_table,
    "fixtures": cmd_fixtures,
    "convert": cmd_convert,
}


@handle_command_errors(_logger)
def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv`` and dispatch; returns the process exit code."""
    args = build_parser().parse_args(argv)
    if args.command is None:
        raise UsageError("missing command (graph, augment, train, eval, table, fixtures, convert)")
    _logger().debug(f"command {args.command} with {vars(args)}")
    return COMMANDS[args.command](args)


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
