"""Comparison models: an anomaly-style autoencoder and a small MLP classifier.

The autoencoder is trained on normal rows only and its latent codes feed an
MLP; the plain MLP is trained directly on original or generated features.
Both reuse the same optimizer and schedule defaults as the cooperative triple
for comparability.
"""
from __future__ import annotations

import numpy as np

from .errors import DimensionError, DomainError
from .data import TabularDataset
from .losses import l1_loss, log_loss
from .networks import AffineLayer
from .optim import Adam, lr_at
from .tensor import Parameter, Tensor, mean_all, no_grad, relu, sigmoid
from .trainer import TrainConfig


class AutoencoderNet:
    """Six dense layers tapering to a 50-wide latent and back, relu between
    layers, identity output."""

    def __init__(self, observe_size: int, latent_size: int = 50,
                 hidden_sizes: tuple[int, int] = (128, 64), seed: int = 0):
        rng = np.random.default_rng(seed)
        h1, h2 = hidden_sizes
        self.observe_size = observe_size
        self.latent_size = latent_size
        self.encoder = [
            AffineLayer(observe_size, h1, rng, "autoencoder.enc0"),
            AffineLayer(h1, h2, rng, "autoencoder.enc1"),
            AffineLayer(h2, latent_size, rng, "autoencoder.enc2"),
        ]
        self.decoder = [
            AffineLayer(latent_size, h2, rng, "autoencoder.dec0"),
            AffineLayer(h2, h1, rng, "autoencoder.dec1"),
            AffineLayer(h1, observe_size, rng, "autoencoder.dec2"),
        ]
        self.history: list[float] = []

    def encode(self, x: Tensor) -> Tensor:
        if x.cols != self.observe_size:
            raise DimensionError(f"autoencoder expects width {self.observe_size}, got {x.cols}")
        for layer in self.encoder:
            x = relu(layer(x))
        return x

    def decode(self, z: Tensor) -> Tensor:
        for i, layer in enumerate(self.decoder):
            z = layer(z)
            if i < len(self.decoder) - 1:
                z = relu(z)
        return z

    def forward(self, x: Tensor) -> Tensor:
        return self.decode(self.encode(x))

    def params(self) -> list[Parameter]:
        return [p for layer in self.encoder + self.decoder for p in layer.params]


def train_autoencoder(normal_train: TabularDataset, cfg: TrainConfig,
                      latent_size: int = 50) -> AutoencoderNet:
    """Fit the autoencoder on normal rows only, mean L1 reconstruction loss."""
    if normal_train.positive_count > 0:
        raise DomainError(
            f"autoencoder training data must be normal-only, found "
            f"{normal_train.positive_count} fraud rows"
        )
    net = AutoencoderNet(normal_train.observe_size, latent_size=latent_size, seed=cfg.seed)
    opt = Adam(net.params(), cfg.beta1, cfg.beta2, cfg.adam_eps)
    schedule = cfg.schedule()
    feats = normal_train.features
    n = len(feats)
    rng = np.random.default_rng(cfg.seed)
    for epoch in range(cfg.epochs):
        lr = lr_at(schedule, epoch)
        order = rng.permutation(n) if cfg.shuffle else np.arange(n)
        total = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            x = Tensor(feats[idx])
            loss = mean_all(l1_loss(net.forward(x), x))
            opt.zero_grad()
            loss.backward()
            opt.step(lr)
            total += loss.item() * len(idx)
        net.history.append(total / n)
    return net


def encode(ae: AutoencoderNet, x: Tensor) -> Tensor:
    return ae.encode(x)


def encode_features(ae: AutoencoderNet, features: np.ndarray,
                    batch_size: int = 8192) -> np.ndarray:
    """Latent codes for a whole feature matrix, gradient-free."""
    out = np.empty((len(features), ae.latent_size))
    with no_grad():
        for start in range(0, len(features), batch_size):
            stop = min(start + batch_size, len(features))
            out[start:stop] = ae.encode(Tensor(features[start:stop])).data
    return out


class MlpClassifier:
    """Hidden layers of 256 then 3 units with relu, sigmoid output unit."""

    def __init__(self, input_size: int, hidden_sizes: tuple[int, int] = (256, 3), seed: int = 0):
        rng = np.random.default_rng(seed)
        h1, h2 = hidden_sizes
        self.input_size = input_size
        self.layers = [
            AffineLayer(input_size, h1, rng, "mlp.fc0"),
            AffineLayer(h1, h2, rng, "mlp.fc1"),
            AffineLayer(h2, 1, rng, "mlp.out"),
        ]
        self.history: list[float] = []

    def forward(self, x: Tensor) -> Tensor:
        if x.cols != self.input_size:
            raise DimensionError(f"classifier expects width {self.input_size}, got {x.cols}")
        h = relu(self.layers[0](x))
        h = relu(self.layers[1](h))
        return sigmoid(self.layers[2](h))

    def params(self) -> list[Parameter]:
        return [p for layer in self.layers for p in layer.params]


def train_mlp(features: np.ndarray, labels: np.ndarray, cfg: TrainConfig) -> MlpClassifier:
    """Fit the classifier with mean log loss over probabilities."""
    feats = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64).reshape(-1, 1)
    if len(feats) != len(y):
        raise DimensionError(f"{len(feats)} feature rows vs {len(y)} labels")
    classes = np.unique(y)
    if len(classes) < 2:
        raise DomainError(f"training labels contain a single class: {classes}")
    net = MlpClassifier(feats.shape[1], seed=cfg.seed)
    opt = Adam(net.params(), cfg.beta1, cfg.beta2, cfg.adam_eps)
    schedule = cfg.schedule()
    n = len(feats)
    rng = np.random.default_rng(cfg.seed)
    for epoch in range(cfg.epochs):
        lr = lr_at(schedule, epoch)
        order = rng.permutation(n) if cfg.shuffle else np.arange(n)
        total = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            x = Tensor(feats[idx])
            target = Tensor(y[idx])
            loss = mean_all(log_loss(net.forward(x), target))
            opt.zero_grad()
            loss.backward()
            opt.step(lr)
            total += loss.item() * len(idx)
        net.history.append(total / n)
    return net


def predict_proba(mlp: MlpClassifier, features: np.ndarray, batch_size: int = 8192) -> np.ndarray:
    out = np.empty((len(features), 1))
    with no_grad():
        for start in range(0, len(features), batch_size):
            stop = min(start + batch_size, len(features))
            out[start:stop] = mlp.forward(Tensor(features[start:stop])).data
    return out


def predict(mlp: MlpClassifier, features: np.ndarray, threshold: float = 0.5) -> np.ndarray:
    """Fraud iff probability >= threshold."""
    return (predict_proba(mlp, features) >= threshold).astype(np.float64)
