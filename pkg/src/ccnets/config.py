"""The JSON run configuration: hyperparameter names mirror the published
table (snake_case) plus a dataset section with a synthetic fallback."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import ConfigError
from .networks import NetworkConfig
from .trainer import TrainConfig

# probability equivalent of a raw reasoner score of 0.5: the producer path
# anchors labels at {0, 1}, so the midpoint raw score is the natural decision
# boundary and sigmoid maps it to this probability
MIDPOINT_THRESHOLD = 1.0 / (1.0 + math.exp(-0.5))


@dataclass
class SynthConfig:
    """Fallback generator used when no CSV path is configured."""

    n: int = 60_000
    fraud_rate: float = 0.005
    separation: float = 4.0
    seed: int = 0


@dataclass
class DatasetConfig:
    path: str | None = None
    rows: int | None = None  # keep only the first N rows (subsample mode)
    train_fraction: float = 0.3
    fallback_synth: SynthConfig = field(default_factory=SynthConfig)


@dataclass
class RunConfig:
    """Everything an experiment run needs; defaults reproduce the published
    fraud setup."""

    seed: int = 0
    epochs: int = 30
    batch_size: int = 512
    learning_rate: float = 2e-4
    gamma: float = 0.99954
    beta1: float = 0.9
    beta2: float = 0.999
    step_size: int = 10
    optimizer: str = "adam"
    prediction_loss_type: str = "l1"
    model_loss_type: str = "l1"
    prediction_loss_reduction: str = "all"
    model_loss_reduction: str = "none"
    model_loss_form: str = "signed"
    inner_network: dict = field(default_factory=lambda: {
        "explainer": "mlp", "reasoner": "deepfm", "producer": "resmlp"})
    reasoner_joint_type: str = "add"
    producer_joint_type: str = "add"
    inner_network_num_layers: int = 3
    observe_size: int = 30
    label_size: int = 1
    explain_size: int = 26
    final_activation: dict = field(default_factory=lambda: {
        "explainer": "sigmoid", "reasoner": "none", "producer": "none"})
    hidden_size: int = 256
    decision_threshold: float = MIDPOINT_THRESHOLD
    amplify_factor: int = 10
    amplify_noise_sigma: float = 0.05
    shuffle: bool = False
    track_test: bool = False
    dataset: DatasetConfig = field(default_factory=DatasetConfig)

    def __post_init__(self):
        if self.optimizer.lower() != "adam":
            raise ConfigError(f"only the adam optimizer is supported, got {self.optimizer!r}")
        if isinstance(self.dataset, dict):
            ds = dict(self.dataset)
            if isinstance(ds.get("fallback_synth"), dict):
                ds["fallback_synth"] = SynthConfig(**ds["fallback_synth"])
            self.dataset = DatasetConfig(**ds)

    def network_config(self) -> NetworkConfig:
        return NetworkConfig(
            observe_size=self.observe_size,
            label_size=self.label_size,
            explain_size=self.explain_size,
            hidden_size=self.hidden_size,
            inner_num_layers=self.inner_network_num_layers,
            explainer_inner=self.inner_network["explainer"],
            reasoner_inner=self.inner_network["reasoner"],
            producer_inner=self.inner_network["producer"],
            reasoner_joint_type=self.reasoner_joint_type,
            producer_joint_type=self.producer_joint_type,
            explainer_final_activation=self.final_activation["explainer"],
            reasoner_final_activation=self.final_activation["reasoner"],
            producer_final_activation=self.final_activation["producer"],
        )

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            gamma=self.gamma,
            step_size=self.step_size,
            beta1=self.beta1,
            beta2=self.beta2,
            prediction_loss_type=self.prediction_loss_type,
            prediction_loss_reduction=self.prediction_loss_reduction,
            model_loss_reduction=self.model_loss_reduction,
            model_loss_form=self.model_loss_form,
            shuffle=self.shuffle,
            seed=self.seed,
            track_test=self.track_test,
        )

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)

    @classmethod
    def from_json(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(raw)

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n")
