"""Experiment orchestration: config -> data, graph and network -> one or more seeded runs."""
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .trainer import RunReport, count_params, train
from ..core.checkpoint import load_checkpoint
from ..graphs.graph import Graph
from ..graphs.montage import BUILTIN_MONTAGES, Montage, build_graph, load_montage, resolve_montage_path
from ..models.network import EEGGraphNet
from ..pipeline.augment import augment_awgn
from ..pipeline.trialset import TrialSet, load_trialset, split
from ..schemas.experiment import ExperimentConfig, check_references, config_hash, parse_experiment_config
from ..utils.error_handler import CheckpointError, MontageError, UsageError
from ..utils.logger import get_logger
from ..utils.state_manager import get_state_path, load_state

logger = get_logger("runs")


@dataclass
class Experiment:
    config: ExperimentConfig
    dataset: TrialSet
    montage: Montage
    graph: Graph


def prepare_experiment(config: ExperimentConfig, manifest: Optional[Union[str, Path]] = None) -> Experiment:
    """
    Check references, load the dataset and montage and build the electrode graph.

    ``manifest`` overrides ``data.manifest``; the montage defaults to the manifest's.
    """
    if manifest is not None:
        config = config.model_copy(update={"data": config.data.model_copy(update={"manifest": str(Path(manifest).resolve())})})
    check_references(config)

    dataset = load_trialset(config.data.manifest)
    if config.graph.montage is not None:
        montage = load_montage(config.graph.montage)
        if len(montage) != dataset.n_channels:
            raise MontageError(
                f"montage has {len(montage)} electrodes, dataset has {dataset.n_channels} channels"
            )
    else:
        montage = dataset.load_montage()
        ref = dataset.montage
        if ref not in BUILTIN_MONTAGES:
            ref = str(resolve_montage_path(ref, dataset.base_dir).resolve())
        config = config.model_copy(update={"graph": config.graph.model_copy(update={"montage": ref})})
    graph = build_graph(montage, config.graph.policy)
    logger.info(f"Graph {config.graph.edge_policy}: {graph.n} nodes, {graph.num_edges} directed edges")
    return Experiment(config, dataset, montage, graph)


def build_model(config: ExperimentConfig, graph: Graph, n_samples: int, n_classes: int, seed: int) -> EEGGraphNet:
    """Network with parameters drawn from a stream derived from ``seed``."""
    return EEGGraphNet(config.model_spec(n_classes), graph, n_samples, np.random.default_rng([seed, 1]))


def run_labels(experiment: Experiment) -> Dict[str, str]:
    cfg = experiment.config
    return {
        "dataset": experiment.dataset.name,
        "conv": cfg.model.conv,
        "pool": cfg.model.pool,
        "edge_policy": cfg.graph.edge_policy,
    }


def seeds_for(seed: int, runs: int) -> List[int]:
    return list(range(seed, seed + runs))


def run_dir_for(out: Union[str, Path], seed: int, runs: int) -> Path:
    out = Path(out)
    return out if runs == 1 else out / f"seed-{seed}"


def train_once(experiment: Experiment, seed: int, run_dir: Optional[Path]) -> RunReport:
    """Split, augment the training part, build a fresh network and train it."""
    config = experiment.config.with_seed(seed)
    train_set, val_set = split(experiment.dataset, seed)
    if config.augment.snr_db:
        train_set = augment_awgn(train_set, config.augment.snr_db, seed)
    model = build_model(config, experiment.graph, experiment.dataset.n_samples, experiment.dataset.n_classes, seed)

    resolved = config.resolved()
    resolved["out"] = str(run_dir) if run_dir is not None else None
    resolved["shape"] = {
        "n_channels": experiment.dataset.n_channels,
        "n_samples": experiment.dataset.n_samples,
        "n_classes": experiment.dataset.n_classes,
    }
    return train(
        model,
        train_set,
        val_set,
        config.train_config(seed),
        run_dir=run_dir,
        config=resolved,
        config_hash=config_hash(config),
        labels=run_labels(experiment),
    )


def run_experiment(experiment: Experiment, out: Union[str, Path], seed: int, runs: int = 1) -> List[Tuple[Path, RunReport]]:
    if runs < 1:
        raise UsageError("--runs must be at least 1")
    results = []
    for s in seeds_for(seed, runs):
        run_dir = run_dir_for(out, s, runs)
        logger.info(f"Run seed={s} -> {run_dir}")
        results.append((run_dir, train_once(experiment, s, run_dir)))
    return results


def describe_dry_run(experiment: Experiment, seed: int) -> Dict[str, object]:
    """Parameter count and graph statistics without training or writing anything."""
    ds = experiment.dataset
    model = build_model(experiment.config, experiment.graph, ds.n_samples, ds.n_classes, seed)
    return {
        "dataset": ds.name,
        "trials": ds.n_trials,
        "channels": ds.n_channels,
        "samples": ds.n_samples,
        "classes": ds.n_classes,
        "edge_policy": experiment.config.graph.edge_policy,
        "nodes": experiment.graph.n,
        "edges": experiment.graph.num_edges,
        "degree_histogram": experiment.graph.degree_histogram(),
        "compressor_lengths": model.compressor.lengths,
        "params": count_params(model),
    }


@dataclass
class LoadedRun:
    model: EEGGraphNet
    config: ExperimentConfig
    report: Optional[RunReport]
    graph: Graph


def load_run(run_dir: Union[str, Path]) -> LoadedRun:
    """
    Rebuild a trained network from a run directory's config.json and best.ckpt.

    Raises:
        CheckpointError: missing config or checkpoint, or parameter mismatch
    """
    run_dir = Path(run_dir)
    resolved = load_state(run_dir, "config")
    if resolved is None:
        raise CheckpointError(f"{run_dir}: no config.json")
    resolved = dict(resolved)
    resolved.pop("out", None)
    shape = resolved.pop("shape", None)
    if not shape:
        raise CheckpointError(f"{run_dir}: config.json does not record the data shape")
    config = parse_experiment_config(resolved)
    if config.graph.montage is None:
        raise CheckpointError(f"{run_dir}: config.json does not record the montage")

    montage = load_montage(config.graph.montage)
    if len(montage) != shape["n_channels"]:
        raise MontageError(f"montage has {len(montage)} electrodes, run was trained on {shape['n_channels']} channels")
    graph = build_graph(montage, config.graph.policy)
    model = build_model(config, graph, shape["n_samples"], shape["n_classes"], config.train.seed)

    checkpoint = get_state_path(run_dir, "checkpoint")
    if not checkpoint.exists():
        raise CheckpointError(f"{run_dir}: no best.ckpt")
    model.load_state_dict(load_checkpoint(checkpoint))
    model.eval()

    report_data = load_state(run_dir, "report")
    report = RunReport.from_dict(report_data) if report_data else None
    return LoadedRun(model, config, report, graph)
