"""Full training runs on the synthetic fixture; select with ``-m slow``."""
import pytest

from eegraph.pipeline.fixtures import make_fixture
from eegraph.pipeline.trialset import split
from eegraph.schemas.experiment import load_experiment_config
from eegraph.training.runs import load_run, prepare_experiment, run_experiment
from eegraph.training.trainer import evaluate
from eegraph.utils.state_manager import get_state_path

pytestmark = pytest.mark.slow


def test_gin_separates_the_fixture(tmp_path):
    files = make_fixture(tmp_path / "data", n_trials=2000, snr_db=0.0, seed=0)
    experiment = prepare_experiment(load_experiment_config(files.config))
    [(run_dir, report)] = run_experiment(experiment, tmp_path / "run", seed=0, runs=1)
    assert report.best_val_acc >= 0.95

    loaded = load_run(run_dir)
    _, val_set = split(experiment.dataset, 0)
    assert evaluate(loaded.model, val_set).accuracy == report.best_val_acc
    assert loaded.report.best_val_acc == report.best_val_acc


def test_short_runs_are_reproducible(tmp_path):
    files = make_fixture(tmp_path / "data", n_trials=200, snr_db=0.0, seed=1)
    config = load_experiment_config(files.config)
    config = config.model_copy(update={"train": config.train.model_copy(update={"epochs": 5})})
    experiment = prepare_experiment(config)

    run_experiment(experiment, tmp_path / "a", seed=4, runs=1)
    run_experiment(experiment, tmp_path / "b", seed=4, runs=1)
    a = get_state_path(tmp_path / "a", "epochs").read_text(encoding="utf-8")
    b = get_state_path(tmp_path / "b", "epochs").read_text(encoding="utf-8")
    assert a == b
