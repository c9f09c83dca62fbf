"""Finite-difference gradient oracle.

Central differences over a scalar function of one array. This module is the
independent check against the analytic tape gradients and deliberately never
touches the tape machinery.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import DomainError


def finite_diff_grad(fn: Callable[[np.ndarray], float], point: np.ndarray,
                     eps: float = 1e-5) -> np.ndarray:
    """(f(x + eps*e_i) - f(x - eps*e_i)) / (2*eps) for every coordinate."""
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    x = np.array(point, dtype=np.float64)
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        hi = fn(x)
        flat[i] = orig - eps
        lo = fn(x)
        flat[i] = orig
        gflat[i] = (hi - lo) / (2.0 * eps)
    return grad


def finite_diff_grad_at(fn: Callable[[np.ndarray], float], point: np.ndarray,
                        indices: np.ndarray, eps: float = 1e-5) -> np.ndarray:
    """Central differences at selected flat indices only (cheap spot checks)."""
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    x = np.array(point, dtype=np.float64)
    flat = x.reshape(-1)
    out = np.zeros(len(indices))
    for k, i in enumerate(indices):
        orig = flat[i]
        flat[i] = orig + eps
        hi = fn(x)
        flat[i] = orig - eps
        lo = fn(x)
        flat[i] = orig
        out[k] = (hi - lo) / (2.0 * eps)
    return out


def max_rel_error(analytic: np.ndarray, numeric: np.ndarray,
                  atol: float = 1e-7) -> float:
    """Worst-case |a - n| / max(|a|, |n|) after discounting a tiny absolute floor."""
    a = np.asarray(analytic, dtype=np.float64).reshape(-1)
    n = np.asarray(numeric, dtype=np.float64).reshape(-1)
    diff = np.abs(a - n)
    denom = np.maximum(np.abs(a), np.abs(n))
    ok = diff <= atol
    rel = np.where(ok, 0.0, diff / np.where(denom == 0.0, 1.0, denom))
    return float(rel.max()) if rel.size else 0.0
