"""Fraud-class classification metrics and log-scale curve fitting."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError


@dataclass
class Metrics:
    """Confusion counts and derived scores for the positive (fraud) class."""

    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float

    def as_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn,
                "precision": self.precision, "recall": self.recall, "f1": self.f1}


def compute_metrics(y_true, y_pred) -> Metrics:
    """Precision/recall/F1 with the 0-when-undefined convention."""
    t = np.asarray(y_true, dtype=np.float64).reshape(-1)
    p = np.asarray(y_pred, dtype=np.float64).reshape(-1)
    if t.shape != p.shape:
        raise DimensionError(f"label vectors differ in length: {t.shape} vs {p.shape}")
    for name, v in (("y_true", t), ("y_pred", p)):
        if not np.all(np.isin(v, (0.0, 1.0))):
            raise DomainError(f"{name} must be binary 0/1")
    tp = int(np.sum((t == 1) & (p == 1)))
    fp = int(np.sum((t == 0) & (p == 1)))
    fn = int(np.sum((t == 1) & (p == 0)))
    tn = int(np.sum((t == 0) & (p == 0)))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return Metrics(tp=tp, fp=fp, fn=fn, tn=tn, precision=precision, recall=recall, f1=f1)


def f1_from_pr(precision: float, recall: float) -> float:
    return 2 * precision * recall / (precision + recall) if precision + recall else 0.0


@dataclass
class CurveFit:
    """Least-squares line through ln(loss) against epoch index."""

    slope: float
    intercept: float
    r2: float


def fit_log_curve(losses) -> CurveFit:
    """OLS of ln(loss_i) on i. A constant series gets r2 = 0 by convention."""
    y = np.asarray(losses, dtype=np.float64).reshape(-1)
    if len(y) < 3:
        raise DomainError(f"need at least 3 loss values, got {len(y)}")
    if np.any(y <= 0):
        raise DomainError("losses must be strictly positive for a log fit")
    ln_y = np.log(y)
    x = np.arange(len(y), dtype=np.float64)
    x_mean = x.mean()
    y_mean = ln_y.mean()
    sxx = np.sum((x - x_mean) ** 2)
    slope = float(np.sum((x - x_mean) * (ln_y - y_mean)) / sxx)
    intercept = float(y_mean - slope * x_mean)
    ss_tot = float(np.sum((ln_y - y_mean) ** 2))
    if ss_tot == 0.0:
        return CurveFit(slope=slope, intercept=intercept, r2=0.0)
    residuals = ln_y - (intercept + slope * x)
    r2 = 1.0 - float(np.sum(residuals ** 2)) / ss_tot
    return CurveFit(slope=slope, intercept=intercept, r2=r2)
