"""Shared helpers: small configurations and finite-difference probes of the
per-network objectives."""
import numpy as np
import pytest

from ccnets.losses import model_losses, prediction_losses, reduce
from ccnets.networks import CooperativeTriple, NetworkConfig
from ccnets.tensor import Tensor, no_grad
from ccnets.trainer import TrainConfig


def small_network_config(**overrides) -> NetworkConfig:
    base = dict(observe_size=6, label_size=1, explain_size=4, hidden_size=10,
                inner_num_layers=2)
    base.update(overrides)
    return NetworkConfig(**base)


def small_train_config(**overrides) -> TrainConfig:
    base = dict(epochs=3, batch_size=16, learning_rate=1e-3, seed=0)
    base.update(overrides)
    return TrainConfig(**base)


def triple_model_loss(triple: CooperativeTriple, x: np.ndarray, y: np.ndarray,
                      loss_kind: str = "l1", form: str = "signed"):
    """The three scalar objectives for one batch, on the live graph."""
    xt, yt = Tensor(x), Tensor(y)
    e = triple.explainer.forward(xt)
    y_hat = triple.reasoner.forward(xt, e)
    x_gen = triple.producer.forward(e, yt)
    x_rec = triple.producer.forward(e, y_hat)
    pred = prediction_losses(loss_kind, xt, x_gen, x_rec)
    reduced = pred.map(lambda t: reduce(t, "all"))
    return model_losses(reduced, form=form)


def model_loss_value_fn(triple, net_name, param, x, y, loss_kind="l1"):
    """Scalar objective of ``net_name`` as a function of one parameter's
    values, for finite differencing."""

    def fn(values: np.ndarray) -> float:
        old = param.data
        param.data = values
        try:
            with no_grad():
                m = triple_model_loss(triple, x, y, loss_kind)
            return getattr(m, net_name).item()
        finally:
            param.data = old

    return fn


@pytest.fixture
def rng():
    return np.random.default_rng(0)
