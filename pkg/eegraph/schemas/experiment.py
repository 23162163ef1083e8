"""Experiment configuration: one TOML section per concern, validated with pydantic."""
import hashlib
import json
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..graphs.graph import ShiftOperatorKind
from ..graphs.montage import BUILTIN_MONTAGES, EdgePolicy, parse_edge_policy, resolve_montage_path
from ..models.network import ModelSpec
from ..pipeline.compressor import CompressorSpec
from ..training.loss import RegSpec
from ..training.trainer import TrainConfig
from ..utils.error_handler import UsageError


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class DataSection(_Section):
    manifest: Optional[str] = None


class GraphSection(_Section):
    montage: Optional[str] = None
    edge_policy: str = "complete"
    shift: Literal["adjacency", "laplacian", "normalized_adjacency", "normalized_laplacian"] = "adjacency"

    @field_validator("edge_policy")
    @classmethod
    def check_edge_policy(cls, value: str) -> str:
        try:
            return parse_edge_policy(value).describe()
        except UsageError as e:
            raise ValueError(str(e)) from None

    @property
    def policy(self) -> EdgePolicy:
        return parse_edge_policy(self.edge_policy)


class ModelSection(_Section):
    conv: Literal["sage", "gin", "poly"] = "gin"
    pool: Literal["sum", "mean", "max", "sortpool", "edgepool", "sagpool", "set2set"] = "sum"
    depth: int = Field(2, ge=1)
    hidden: int = Field(32, ge=1)
    gin_hidden: int = Field(32, ge=1)
    poly_taps: int = Field(2, ge=1)
    rho: Optional[float] = Field(None, gt=0)
    steps: int = Field(3, ge=1)
    sortpool_order: Literal["features", "wl"] = "features"
    sortpool_channels: int = Field(16, ge=1)
    mlp_hidden: int = Field(32, ge=1)
    neighbor_sample_size: Optional[int] = Field(None, ge=1)
    n_classes: Optional[int] = Field(None, ge=2)

    @model_validator(mode="after")
    def check_rho(self) -> "ModelSection":
        if self.rho is None:
            return self
        if self.pool == "sagpool" and self.rho > 1:
            raise ValueError("sagpool rho is a ratio in (0, 1]")
        if self.pool == "sortpool" and self.rho != int(self.rho):
            raise ValueError("sortpool rho is a whole number of nodes")
        return self


class CompressorSection(_Section):
    out_features: int = Field(32, ge=1)
    batch_norm: bool = True
    bn_eps: float = Field(1e-5, gt=0)


class AugmentSection(_Section):
    snr_db: List[float] = Field(default_factory=list)

    @field_validator("snr_db")
    @classmethod
    def check_finite(cls, value: List[float]) -> List[float]:
        if any(v != v or v in (float("inf"), float("-inf")) for v in value):
            raise ValueError("SNR levels must be finite")
        return value


class TrainSection(_Section):
    batch_size: int = Field(256, ge=1)
    epochs: int = Field(400, ge=1)
    lr: float = Field(0.001, gt=0)
    lr_halving_period: int = Field(50, ge=1)
    seed: int = 0
    alpha: float = Field(0.0, ge=0)
    beta: float = Field(0.0, ge=0)
    runs: Optional[int] = Field(None, ge=1)


class ExperimentConfig(_Section):
    data: DataSection = Field(default_factory=DataSection)
    graph: GraphSection = Field(default_factory=GraphSection)
    model: ModelSection = Field(default_factory=ModelSection)
    compressor: CompressorSection = Field(default_factory=CompressorSection)
    augment: AugmentSection = Field(default_factory=AugmentSection)
    train: TrainSection = Field(default_factory=TrainSection)

    # ---- conversion into library objects ----

    def model_spec(self, n_classes: int) -> ModelSpec:
        m = self.model
        return ModelSpec(
            conv=m.conv,
            pool=m.pool,
            n_classes=m.n_classes or n_classes,
            depth=m.depth,
            hidden=m.hidden,
            gin_hidden=m.gin_hidden,
            poly_taps=m.poly_taps,
            shift=ShiftOperatorKind(self.graph.shift),
            rho=m.rho,
            steps=m.steps,
            sortpool_order=m.sortpool_order,
            sortpool_channels=m.sortpool_channels,
            mlp_hidden=m.mlp_hidden,
            neighbor_sample_size=m.neighbor_sample_size,
            compressor=CompressorSpec(
                out_features=self.compressor.out_features,
                batch_norm=self.compressor.batch_norm,
                bn_eps=self.compressor.bn_eps,
            ),
        )

    def train_config(self, seed: Optional[int] = None) -> TrainConfig:
        t = self.train
        return TrainConfig(
            batch_size=t.batch_size,
            epochs=t.epochs,
            lr=t.lr,
            lr_halving_period=t.lr_halving_period,
            seed=t.seed if seed is None else seed,
            reg=RegSpec(alpha=t.alpha, beta=t.beta),
        )

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return self.model_copy(update={"train": self.train.model_copy(update={"seed": seed})})

    def resolved(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def config_hash(config: Union[ExperimentConfig, Dict[str, Any]]) -> str:
    """SHA-256 of the resolved config without the seed, run count or output paths."""
    data = config.resolved() if isinstance(config, ExperimentConfig) else json.loads(json.dumps(config))
    train = data.get("train", {})
    train.pop("seed", None)
    train.pop("runs", None)
    data.pop("out", None)
    return hashlib.sha256(json.dumps(data, sort_keys=True).encode("utf-8")).hexdigest()


def _format_validation_error(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        where = ".".join(str(p) for p in item["loc"])
        parts.append(f"{where}: {item['msg']}")
    return "; ".join(parts)


def parse_experiment_config(data: Dict[str, Any], base_dir: Optional[Path] = None) -> ExperimentConfig:
    """
    Validate a config mapping and resolve relative paths against ``base_dir``.

    Raises:
        UsageError: unknown keys, out-of-range values, missing referenced files
    """
    try:
        config = ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise UsageError(f"invalid experiment config: {_format_validation_error(e)}") from None

    base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
    if config.data.manifest is not None:
        manifest = Path(config.data.manifest)
        if not manifest.is_absolute():
            manifest = (base_dir / manifest).resolve()
        config.data.manifest = str(manifest)
    if config.graph.montage is not None and config.graph.montage not in BUILTIN_MONTAGES:
        config.graph.montage = str(resolve_montage_path(config.graph.montage, base_dir).resolve())
    return config


def check_references(config: ExperimentConfig) -> None:
    """Fail before any training when a referenced file is missing."""
    if config.data.manifest is None:
        raise UsageError("no dataset manifest given (set data.manifest or pass --data)")
    if not Path(config.data.manifest).exists():
        raise UsageError(f"dataset manifest not found: {config.data.manifest}")
    montage = config.graph.montage
    if montage is not None and montage not in BUILTIN_MONTAGES and not Path(montage).exists():
        raise UsageError(f"montage file not found: {montage}")


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read a TOML experiment config; relative paths resolve against its directory."""
    path = Path(path)
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as e:
        raise UsageError(f"{path}: invalid TOML ({e})") from None
    return parse_experiment_config(data, path.parent)


def render_experiment_toml(config: ExperimentConfig) -> str:
    """Render a config back to TOML (flat sections of scalars and lists)."""
    lines: List[str] = []
    for section, values in config.model_dump(mode="json", exclude_none=True).items():
        lines.append(f"[{section}]")
        for key, value in values.items():
            lines.append(f"{key} = {json.dumps(value)}")
        lines.append("")
    return "\n".join(lines)
