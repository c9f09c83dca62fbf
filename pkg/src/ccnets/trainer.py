"""The cooperative training loop and its reasoner-focused evaluation.

One forward pass per batch feeds all three objectives; each network then gets
its own backward pass with the other two networks' parameters held constant,
and all three Adam steps are applied from gradients taken against the
pre-step parameters, so the update order carries no information.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import TabularDataset
from .errors import DomainError, NumericError
from .losses import ModelLossTriple, PredictionLossTriple, model_losses, prediction_losses, reduce
from .metrics import Metrics, compute_metrics
from .networks import NET_NAMES, CooperativeTriple, NetworkConfig
from .optim import StepDecaySchedule, lr_at
from .tensor import Tensor, mean_all, no_grad, sigmoid


@dataclass
class TrainConfig:
    """Loop hyperparameters; defaults reproduce the fraud-experiment setup."""

    epochs: int = 30
    batch_size: int = 512
    learning_rate: float = 2e-4
    gamma: float = 0.99954
    step_size: int = 10
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    prediction_loss_type: str = "l1"
    prediction_loss_reduction: str = "all"
    model_loss_reduction: str = "none"
    model_loss_form: str = "signed"
    shuffle: bool = False
    seed: int = 0
    track_test: bool = False
    eval_batch_size: int = 8192

    def __post_init__(self):
        if self.epochs < 0:
            raise DomainError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 1:
            raise DomainError(f"batch_size must be >= 1, got {self.batch_size}")

    def schedule(self) -> StepDecaySchedule:
        return StepDecaySchedule(base_lr=self.learning_rate, gamma=self.gamma,
                                 step_size=self.step_size)


def build_triple(net_cfg: NetworkConfig, cfg: TrainConfig) -> CooperativeTriple:
    """A fresh triple whose optimizers and schedules follow ``cfg``."""
    schedules = {name: cfg.schedule() for name in NET_NAMES}
    return CooperativeTriple.build(net_cfg, seed=cfg.seed, schedules=schedules,
                                   beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.adam_eps)


@dataclass
class LossSummary:
    """The six per-batch (or per-epoch mean) loss scalars."""

    explainer: float
    reasoner: float
    producer: float
    inference: float
    generation: float
    reconstruction: float

    def as_tuple(self) -> tuple[float, ...]:
        return (self.explainer, self.reasoner, self.producer,
                self.inference, self.generation, self.reconstruction)

    SERIES = ("explainer", "reasoner", "producer", "inference", "generation", "reconstruction")


@dataclass
class EpochRecord:
    epoch: int
    train: LossSummary
    test: LossSummary | None = None


def _forward_losses(triple: CooperativeTriple, x: Tensor, y: Tensor, cfg: TrainConfig):
    e = triple.explainer.forward(x)
    y_hat = triple.reasoner.forward(x, e)
    x_gen = triple.producer.forward(e, y)
    x_rec = triple.producer.forward(e, y_hat)
    pred = prediction_losses(cfg.prediction_loss_type, x, x_gen, x_rec)
    reduced = pred.map(lambda t: reduce(t, cfg.prediction_loss_reduction))
    model = model_losses(reduced, form=cfg.model_loss_form)
    if cfg.model_loss_reduction != "none":
        model = ModelLossTriple(*(reduce(t, cfg.model_loss_reduction)
                                  for t in (model.explainer, model.reasoner, model.producer)))
    return reduced, model


def _scalar(t: Tensor) -> Tensor:
    return t if t.data.size == 1 else mean_all(t)


def train_step(triple: CooperativeTriple, x: Tensor, y: Tensor, cfg: TrainConfig,
               lrs: dict[str, float] | None = None,
               context: str = "") -> tuple[PredictionLossTriple, ModelLossTriple]:
    """One cooperative update; returns the batch losses as floats."""
    if lrs is None:
        lrs = {name: cfg.learning_rate for name in NET_NAMES}
    reduced, model = _forward_losses(triple, x, y, cfg)
    scalars = {"explainer": _scalar(model.explainer),
               "reasoner": _scalar(model.reasoner),
               "producer": _scalar(model.producer)}
    for name, t in scalars.items():
        if not np.all(np.isfinite(t.data)):
            raise NumericError(f"non-finite {name} loss{f' at {context}' if context else ''}")

    # Gradients of each network's own objective, the other two networks'
    # parameters treated as constants; all three computed before any update.
    grads: dict[str, list[np.ndarray]] = {}
    for name, net in triple.nets.items():
        params = net.params()
        for p in params:
            p.zero_grad()
        scalars[name].backward(only=params)
        grads[name] = [p.grad.copy() for p in params]
    for name, net in triple.nets.items():
        for p, g in zip(net.params(), grads[name]):
            p.grad[...] = g
        triple.optimizers[name].step(lrs[name])

    pred_out = PredictionLossTriple(
        inference=_scalar(reduced.inference).item(),
        generation=_scalar(reduced.generation).item(),
        reconstruction=_scalar(reduced.reconstruction).item(),
    )
    model_out = ModelLossTriple(*(scalars[n].item() for n in NET_NAMES))
    return pred_out, model_out


def _epoch_mean(sums: np.ndarray, total: int) -> LossSummary:
    means = sums / total
    return LossSummary(*means.tolist())


def dataset_losses(triple: CooperativeTriple, dataset: TabularDataset, cfg: TrainConfig) -> LossSummary:
    """Prediction/model losses over a dataset with gradients disabled."""
    sums = np.zeros(3)
    total = 0
    with no_grad():
        for start in range(0, dataset.n_rows, cfg.eval_batch_size):
            stop = min(start + cfg.eval_batch_size, dataset.n_rows)
            x = Tensor(dataset.features[start:stop])
            y = Tensor(dataset.labels[start:stop])
            reduced, _ = _forward_losses(triple, x, y, cfg)
            k = stop - start
            sums += k * np.array([_scalar(reduced.inference).item(),
                                  _scalar(reduced.generation).item(),
                                  _scalar(reduced.reconstruction).item()])
            total += k
    inf, gen, rec = (sums / total).tolist()
    model = model_losses(PredictionLossTriple(inf, gen, rec), form=cfg.model_loss_form)
    return LossSummary(explainer=model.explainer, reasoner=model.reasoner,
                       producer=model.producer, inference=inf, generation=gen,
                       reconstruction=rec)


def train(triple: CooperativeTriple, dataset: TabularDataset, cfg: TrainConfig,
          testset: TabularDataset | None = None) -> tuple[CooperativeTriple, list[EpochRecord]]:
    """Run the full loop; one EpochRecord per epoch, batches in data order
    unless cfg.shuffle."""
    if dataset.n_rows == 0:
        raise DomainError("cannot train on an empty dataset")
    records: list[EpochRecord] = []
    rng = np.random.default_rng(cfg.seed)
    n = dataset.n_rows
    for epoch in range(cfg.epochs):
        lrs = {name: lr_at(triple.schedules[name], epoch) for name in NET_NAMES}
        order = rng.permutation(n) if cfg.shuffle else np.arange(n)
        sums = np.zeros(6)
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            x = Tensor(dataset.features[idx])
            y = Tensor(dataset.labels[idx])
            pred, model = train_step(triple, x, y, cfg, lrs,
                                     context=f"epoch {epoch}, batch {start // cfg.batch_size}")
            k = len(idx)
            sums += k * np.array([model.explainer, model.reasoner, model.producer,
                                  pred.inference, pred.generation, pred.reconstruction])
        record = EpochRecord(epoch=epoch, train=_epoch_mean(sums, n))
        if cfg.track_test and testset is not None:
            record.test = dataset_losses(triple, testset, cfg)
        records.append(record)
    return triple, records


def scores(triple: CooperativeTriple, features: np.ndarray, batch_size: int = 8192) -> np.ndarray:
    """Fraud probabilities: sigmoid of the reasoner's raw score."""
    out = np.empty((len(features), 1))
    with no_grad():
        for start in range(0, len(features), batch_size):
            stop = min(start + batch_size, len(features))
            x = Tensor(features[start:stop])
            e = triple.explainer.forward(x)
            out[start:stop] = sigmoid(triple.reasoner.forward(x, e)).data
    return out


def evaluate(triple: CooperativeTriple, testset: TabularDataset,
             threshold: float = 0.5) -> Metrics:
    """Reasoner-only test procedure: score, threshold, fraud-class metrics."""
    if testset.n_rows == 0:
        raise DomainError("cannot evaluate on an empty dataset")
    probs = scores(triple, testset.features)
    preds = (probs >= threshold).astype(np.float64)
    return compute_metrics(testset.labels, preds)


def write_records_csv(records: list[EpochRecord], path: str | Path) -> None:
    """Wide per-epoch CSV, one row per phase."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "phase", "explainer", "reasoner", "producer",
                         "inference", "generation", "reconstruction"])
        for rec in records:
            writer.writerow([rec.epoch, "train", *[repr(v) for v in rec.train.as_tuple()]])
            if rec.test is not None:
                writer.writerow([rec.epoch, "test", *[repr(v) for v in rec.test.as_tuple()]])
