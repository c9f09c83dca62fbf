"""Tabular dataset ingestion, sequential splitting, normalization, and the
synthetic imbalanced stand-in used when the public fraud CSV is absent."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, ParseError, SchemaError

FRAUD_FEATURE_COLUMNS = ["Time"] + [f"V{i}" for i in range(1, 29)] + ["Amount"]
FRAUD_LABEL_COLUMN = "Class"
FRAUD_SCHEMA = FRAUD_FEATURE_COLUMNS + [FRAUD_LABEL_COLUMN]


@dataclass
class TabularDataset:
    """Feature matrix plus binary labels; row order is meaningful and kept."""

    features: np.ndarray  # N x observe_size float64
    labels: np.ndarray    # N x 1, values in {0, 1}
    columns: list[str]    # feature column names

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.float64).reshape(-1, 1)
        if self.features.ndim != 2:
            raise DomainError(f"features must be 2-D, got shape {self.features.shape}")
        if len(self.labels) != len(self.features):
            raise DomainError(
                f"{len(self.features)} feature rows vs {len(self.labels)} labels"
            )
        if len(self.columns) != self.features.shape[1]:
            raise SchemaError(
                f"{len(self.columns)} column names for {self.features.shape[1]} columns"
            )
        if not np.all(np.isin(self.labels, (0.0, 1.0))):
            bad = self.labels[~np.isin(self.labels, (0.0, 1.0))][0]
            raise DomainError(f"labels must be binary 0/1, found {bad}")

    @property
    def n_rows(self) -> int:
        return len(self.features)

    @property
    def observe_size(self) -> int:
        return self.features.shape[1]

    @property
    def positive_count(self) -> int:
        return int(self.labels.sum())

    @property
    def positive_fraction(self) -> float:
        return self.positive_count / self.n_rows

    def take(self, n: int) -> "TabularDataset":
        """First n rows, order preserved."""
        return TabularDataset(self.features[:n].copy(), self.labels[:n].copy(),
                              list(self.columns))


def load_csv(path: str | Path, schema: list[str] | None = None) -> TabularDataset:
    """Read an RFC-4180 CSV whose header is the feature columns plus a final
    binary label column. Row order is preserved exactly."""
    path = Path(path)
    if schema is None:
        schema = FRAUD_SCHEMA
    if not path.exists():
        raise SchemaError(f"dataset file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        header = [h.strip().strip('"') for h in header]
        missing = [c for c in schema if c not in header]
        extra = [c for c in header if c not in schema]
        if missing or extra:
            parts = []
            if missing:
                parts.append(f"missing columns: {missing}")
            if extra:
                parts.append(f"unexpected columns: {extra}")
            raise SchemaError(f"{path}: " + "; ".join(parts))
        order = [header.index(c) for c in schema]
        feature_rows: list[list[float]] = []
        label_rows: list[float] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                values = [float(row[i].strip().strip('"')) for i in order]
            except (ValueError, IndexError) as exc:
                raise ParseError(f"{path}: row {lineno}: {exc}") from None
            label = values[-1]
            if label not in (0.0, 1.0):
                raise DomainError(f"{path}: row {lineno}: label must be 0 or 1, got {label}")
            feature_rows.append(values[:-1])
            label_rows.append(label)
    features = np.array(feature_rows, dtype=np.float64).reshape(len(feature_rows), len(schema) - 1)
    labels = np.array(label_rows, dtype=np.float64).reshape(-1, 1)
    return TabularDataset(features=features, labels=labels, columns=list(schema[:-1]))


def save_csv(dataset: TabularDataset, path: str | Path, label_column: str = FRAUD_LABEL_COLUMN) -> None:
    """Re-export in the ingestion schema (feature columns plus label)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(dataset.columns + [label_column])
        for x, y in zip(dataset.features, dataset.labels):
            writer.writerow([repr(float(v)) for v in x] + [str(int(y[0]))])


def split_sequential(dataset: TabularDataset,
                     train_fraction: float = 0.3) -> tuple[TabularDataset, TabularDataset]:
    """First floor(N * train_fraction) rows train, remainder test; no shuffle."""
    if not (0.0 < train_fraction < 1.0):
        raise DomainError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n_train = int(np.floor(dataset.n_rows * train_fraction))
    if n_train == 0 or n_train == dataset.n_rows:
        raise DomainError(
            f"split of {dataset.n_rows} rows at fraction {train_fraction} leaves a side empty"
        )
    train = TabularDataset(dataset.features[:n_train].copy(), dataset.labels[:n_train].copy(),
                           list(dataset.columns))
    test = TabularDataset(dataset.features[n_train:].copy(), dataset.labels[n_train:].copy(),
                          list(dataset.columns))
    return train, test


@dataclass
class NormalizationStats:
    """Per-column mean/std computed on the train split only; constant columns
    get std 1 so they map to zero instead of blowing up."""

    mean: np.ndarray  # 1 x f
    std: np.ndarray   # 1 x f

    @classmethod
    def fit(cls, features: np.ndarray) -> "NormalizationStats":
        mean = features.mean(axis=0, keepdims=True)
        std = features.std(axis=0, keepdims=True)
        std = np.where(std == 0.0, 1.0, std)
        return cls(mean=mean, std=std)

    def apply(self, features: np.ndarray) -> np.ndarray:
        return (features - self.mean) / self.std

    def invert(self, features: np.ndarray) -> np.ndarray:
        return features * self.std + self.mean


def normalize(train: TabularDataset,
              test: TabularDataset) -> tuple[TabularDataset, TabularDataset, NormalizationStats]:
    """Z-score both splits using train statistics only; labels untouched."""
    stats = NormalizationStats.fit(train.features)
    train_n = TabularDataset(stats.apply(train.features), train.labels.copy(), list(train.columns))
    test_n = TabularDataset(stats.apply(test.features), test.labels.copy(), list(test.columns))
    return train_n, test_n, stats


def synth_imbalanced(seed: int, n: int, fraud_rate: float, observe_size: int = 30,
                     separation: float = 4.0) -> TabularDataset:
    """Two-Gaussian stand-in for the fraud table: unit-covariance classes with
    means ``separation`` apart along a random direction, an exact positive
    count of round(n * fraud_rate), and positives scattered over the rows.
    Deterministic per seed."""
    if not (0.0 < fraud_rate < 0.5):
        raise DomainError(f"fraud_rate must be in (0, 0.5), got {fraud_rate}")
    n_fraud = int(round(n * fraud_rate))
    if n_fraud == 0:
        raise DomainError(f"n={n} at fraud_rate={fraud_rate} rounds to zero fraud rows")
    rng = np.random.default_rng(seed)
    direction = rng.normal(size=observe_size)
    direction /= np.linalg.norm(direction)
    offset = (separation / 2.0) * direction
    labels = np.zeros((n, 1))
    fraud_positions = rng.permutation(n)[:n_fraud]
    labels[fraud_positions] = 1.0
    features = rng.normal(size=(n, observe_size))
    features -= offset  # normal class centred at -offset
    features[fraud_positions] += 2.0 * offset
    if observe_size == 30:
        columns = list(FRAUD_FEATURE_COLUMNS)
    else:
        columns = [f"f{i}" for i in range(observe_size)]
    return TabularDataset(features=features, labels=labels, columns=columns)
