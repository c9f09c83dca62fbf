"""Prediction losses, reduction modes, and the per-network loss composition.

Three distances are measured per batch: between the generated and the
reconstructed observation (inference), between the input and the generated
observation (generation), and between the input and the reconstructed
observation (reconstruction). Each network's own objective is the sum of the
two distances it should explain minus the one it should not absorb; the three
objectives always sum to the three distances exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import ConfigError, DimensionError, DomainError
from .tensor import Tensor, absolute, affine_map, clip, log, mean_all, mean_cols, mean_rows, mul, sub

LOG_LOSS_CLAMP = 1e-7

LossLike = Union[Tensor, float, np.ndarray]


def l1_loss(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise |a - b|, no reduction."""
    return absolute(sub(a, b))


def log_loss(p: Tensor, y: Tensor) -> Tensor:
    """Elementwise -[y*ln(p) + (1-y)*ln(1-p)] with p clamped away from {0, 1}."""
    pc = clip(p, LOG_LOSS_CLAMP, 1.0 - LOG_LOSS_CLAMP)
    pos = mul(y, log(pc))
    neg = mul(affine_map(y, -1.0, 1.0), log(affine_map(pc, -1.0, 1.0)))
    return affine_map(pos + neg, -1.0, 0.0)


_LOSS_KINDS: dict[str, Callable[[Tensor, Tensor], Tensor]] = {
    "l1": l1_loss,
    "log_loss": log_loss,
}


def register_loss_kind(name: str, fn: Callable[[Tensor, Tensor], Tensor]) -> None:
    """Register a custom elementwise distance under ``name``."""
    _LOSS_KINDS[name] = fn


def get_loss_kind(name: str) -> Callable[[Tensor, Tensor], Tensor]:
    try:
        return _LOSS_KINDS[name]
    except KeyError:
        raise ConfigError(
            f"unknown loss kind {name!r}; registered: {sorted(_LOSS_KINDS)}"
        ) from None


REDUCTIONS = ("all", "layer", "batch", "none")


def reduce(loss: Tensor, mode: str) -> Tensor:
    """Collapse an elementwise loss: all -> 1x1, layer -> per-column means
    (mean across the batch dimension), batch -> per-row means, none -> as is."""
    if mode == "none":
        return loss
    if mode not in REDUCTIONS:
        raise ConfigError(f"unknown reduction {mode!r}; expected one of {REDUCTIONS}")
    if loss.data.size == 0:
        raise DomainError("cannot reduce an empty loss tensor")
    if mode == "all":
        return mean_all(loss)
    if mode == "layer":
        return mean_rows(loss)
    return mean_cols(loss)


@dataclass
class PredictionLossTriple:
    """Inference / generation / reconstruction losses for one batch."""

    inference: LossLike
    generation: LossLike
    reconstruction: LossLike

    def map(self, fn) -> "PredictionLossTriple":
        return PredictionLossTriple(fn(self.inference), fn(self.generation),
                                    fn(self.reconstruction))


@dataclass
class ModelLossTriple:
    """Per-network objectives composed from the prediction losses."""

    explainer: LossLike
    reasoner: LossLike
    producer: LossLike


def prediction_losses(kind: str, x: Tensor, x_gen: Tensor, x_rec: Tensor) -> PredictionLossTriple:
    """Elementwise (pre-reduction) prediction losses for one batch."""
    if not (x.shape == x_gen.shape == x_rec.shape):
        raise DimensionError(
            f"prediction losses need equal shapes, got {x.shape}, {x_gen.shape}, {x_rec.shape}"
        )
    d = get_loss_kind(kind)
    return PredictionLossTriple(
        inference=d(x_gen, x_rec),
        generation=d(x, x_gen),
        reconstruction=d(x, x_rec),
    )


MODEL_LOSS_FORMS = ("signed", "abs")


def _abs(value: LossLike) -> LossLike:
    if isinstance(value, Tensor):
        return absolute(value)
    return np.abs(value)


def model_losses(p: PredictionLossTriple, form: str = "signed") -> ModelLossTriple:
    """Compose the three network objectives.

    signed: each network keeps the two losses it is responsible for and is
    credited back the third, so explainer + reasoner + producer equals
    inference + generation + reconstruction identically. abs: absolute value
    of the same combinations.
    """
    if form not in MODEL_LOSS_FORMS:
        raise ConfigError(f"unknown model loss form {form!r}; expected {MODEL_LOSS_FORMS}")
    inf, gen, rec = p.inference, p.generation, p.reconstruction
    explainer = inf + gen - rec
    reasoner = rec + inf - gen
    producer = rec + gen - inf
    if form == "abs":
        explainer, reasoner, producer = _abs(explainer), _abs(reasoner), _abs(producer)
    return ModelLossTriple(explainer=explainer, reasoner=reasoner, producer=producer)
