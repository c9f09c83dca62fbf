"""Adam optimizer and step-decay learning-rate schedule."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, NumericError
from .tensor import Parameter


@dataclass
class AdamState:
    """First/second moment buffers for one parameter."""

    m: np.ndarray
    v: np.ndarray
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_param(cls, param: Parameter, beta1: float = 0.9, beta2: float = 0.999,
                  eps: float = 1e-8) -> "AdamState":
        return cls(m=np.zeros_like(param.data), v=np.zeros_like(param.data),
                   beta1=beta1, beta2=beta2, eps=eps)


def adam_step(param: Parameter, state: AdamState, lr: float) -> tuple[Parameter, AdamState]:
    """One bias-corrected Adam update, in place."""
    if lr <= 0:
        raise DomainError(f"learning rate must be positive, got {lr}")
    if state.m.shape != param.data.shape:
        raise DimensionError(
            f"optimizer state shape {state.m.shape} does not match parameter "
            f"{param.name!r} shape {param.data.shape}"
        )
    g = param.grad
    if g is None or not np.all(np.isfinite(g)):
        raise NumericError(f"non-finite gradient for parameter {param.name!r}")
    state.t += 1
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * g
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * (g * g)
    m_hat = state.m / (1.0 - state.beta1 ** state.t)
    v_hat = state.v / (1.0 - state.beta2 ** state.t)
    param.data = param.data - lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return param, state


@dataclass
class StepDecaySchedule:
    """lr(epoch) = base_lr * gamma ** floor(epoch / step_size)."""

    base_lr: float = 2e-4
    gamma: float = 0.99954
    step_size: int = 10

    def __post_init__(self):
        if not (0.0 < self.gamma <= 1.0):
            raise DomainError(f"gamma must be in (0, 1], got {self.gamma}")
        if self.step_size < 1:
            raise DomainError(f"step_size must be >= 1, got {self.step_size}")


def lr_at(schedule: StepDecaySchedule, epoch: int) -> float:
    if epoch < 0:
        raise DomainError(f"epoch must be >= 0, got {epoch}")
    return schedule.base_lr * schedule.gamma ** math.floor(epoch / schedule.step_size)


class Adam:
    """Adam over a list of parameters, one state per parameter."""

    def __init__(self, params: list[Parameter], beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.params = list(params)
        self.states = [AdamState.for_param(p, beta1, beta2, eps) for p in self.params]

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def step(self, lr: float) -> None:
        for p, s in zip(self.params, self.states):
            adam_step(p, s, lr)
