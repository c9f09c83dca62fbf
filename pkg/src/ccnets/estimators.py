"""Estimator-style wrappers so the models compose with sklearn tooling
(pipelines, clone, grid search). The heavy lifting stays in the functional
modules; these classes hold hyperparameters and fitted state."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin

from .baselines import AutoencoderNet, MlpClassifier, train_autoencoder, train_mlp
from .baselines import predict_proba as mlp_predict_proba
from .config import MIDPOINT_THRESHOLD
from .data import TabularDataset
from .errors import DomainError, StateError
from .networks import NetworkConfig, amplify as amplify_triple, generate_dataset, reconstruct_dataset
from .tensor import Tensor, no_grad
from .trainer import TrainConfig, build_triple, scores, train
from .validation import check_binary_labels, check_matrix


def _as_dataset(x: np.ndarray, y: np.ndarray) -> TabularDataset:
    return TabularDataset(x, y, [f"f{i}" for i in range(x.shape[1])])


class CCNetsClassifier(BaseEstimator, ClassifierMixin):
    """Cooperative three-network generative classifier.

    fit(X, y) trains the explainer/reasoner/producer jointly; predict uses
    the reasoner path only. The default decision threshold sits at the
    midpoint of the {0, 1} label anchors the producer trains against.
    """

    def __init__(self, explain_size=26, hidden_size=256, inner_num_layers=3,
                 explainer_inner="mlp", reasoner_inner="deepfm", producer_inner="resmlp",
                 reasoner_joint_type="add", producer_joint_type="add",
                 epochs=30, batch_size=512, learning_rate=2e-4, gamma=0.99954,
                 step_size=10, beta1=0.9, beta2=0.999, prediction_loss_type="l1",
                 model_loss_form="signed", decision_threshold=MIDPOINT_THRESHOLD,
                 shuffle=False, random_state=0):
        self.explain_size = explain_size
        self.hidden_size = hidden_size
        self.inner_num_layers = inner_num_layers
        self.explainer_inner = explainer_inner
        self.reasoner_inner = reasoner_inner
        self.producer_inner = producer_inner
        self.reasoner_joint_type = reasoner_joint_type
        self.producer_joint_type = producer_joint_type
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.gamma = gamma
        self.step_size = step_size
        self.beta1 = beta1
        self.beta2 = beta2
        self.prediction_loss_type = prediction_loss_type
        self.model_loss_form = model_loss_form
        self.decision_threshold = decision_threshold
        self.shuffle = shuffle
        self.random_state = random_state

    def _train_config(self) -> TrainConfig:
        return TrainConfig(
            epochs=self.epochs, batch_size=self.batch_size,
            learning_rate=self.learning_rate, gamma=self.gamma,
            step_size=self.step_size, beta1=self.beta1, beta2=self.beta2,
            prediction_loss_type=self.prediction_loss_type,
            model_loss_form=self.model_loss_form, shuffle=self.shuffle,
            seed=self.random_state,
        )

    def fit(self, X, y):
        X = check_matrix(X)
        y = check_binary_labels(y, len(X))
        net_cfg = NetworkConfig(
            observe_size=X.shape[1], label_size=1, explain_size=self.explain_size,
            hidden_size=self.hidden_size, inner_num_layers=self.inner_num_layers,
            explainer_inner=self.explainer_inner, reasoner_inner=self.reasoner_inner,
            producer_inner=self.producer_inner,
            reasoner_joint_type=self.reasoner_joint_type,
            producer_joint_type=self.producer_joint_type,
        )
        cfg = self._train_config()
        triple = build_triple(net_cfg, cfg)
        triple, records = train(triple, _as_dataset(X, y), cfg)
        self.triple_ = triple
        self.history_ = records
        self.network_config_ = net_cfg
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0.0, 1.0])
        return self

    def _check_fitted(self):
        if not hasattr(self, "triple_"):
            raise StateError("estimator is not fitted; call fit(X, y) first")

    def decision_function(self, X):
        """Raw reasoner scores (label anchors at 0 and 1)."""
        self._check_fitted()
        X = check_matrix(X)
        with no_grad():
            xt = Tensor(X)
            e = self.triple_.explainer.forward(xt)
            return self.triple_.reasoner.forward(xt, e).data.ravel()

    def predict_proba(self, X):
        self._check_fitted()
        p = scores(self.triple_, check_matrix(X)).ravel()
        return np.column_stack([1.0 - p, p])

    def predict(self, X):
        return (self.predict_proba(X)[:, 1] >= self.decision_threshold).astype(np.float64)

    def generate(self, X, y):
        """Producer output for the given observations and true labels."""
        self._check_fitted()
        X = check_matrix(X)
        y = check_binary_labels(y, len(X))
        return generate_dataset(self.triple_, _as_dataset(X, y)).features

    def reconstruct(self, X):
        """Producer output under the reasoner's inferred labels."""
        self._check_fitted()
        X = check_matrix(X)
        return reconstruct_dataset(self.triple_, _as_dataset(X, np.zeros((len(X), 1)))).features

    def amplify(self, X, y, factor=10, noise_sigma=0.05, seed=0):
        """factor x len(X) synthetic rows; returns (features, labels)."""
        self._check_fitted()
        X = check_matrix(X)
        y = check_binary_labels(y, len(X))
        out = amplify_triple(self.triple_, _as_dataset(X, y), factor=factor,
                             noise_sigma=noise_sigma, seed=seed)
        return out.features, out.labels


class TabularAutoencoder(BaseEstimator, TransformerMixin):
    """Anomaly-style autoencoder; fit on normal rows, transform to codes."""

    def __init__(self, latent_size=50, epochs=30, batch_size=512, learning_rate=2e-4,
                 gamma=0.99954, step_size=10, beta1=0.9, beta2=0.999,
                 shuffle=False, random_state=0):
        self.latent_size = latent_size
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.gamma = gamma
        self.step_size = step_size
        self.beta1 = beta1
        self.beta2 = beta2
        self.shuffle = shuffle
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_matrix(X)
        if y is not None:
            y = check_binary_labels(y, len(X))
            if y.sum() > 0:
                raise DomainError(
                    f"autoencoder fits normal rows only; got {int(y.sum())} positive labels"
                )
        cfg = TrainConfig(epochs=self.epochs, batch_size=self.batch_size,
                          learning_rate=self.learning_rate, gamma=self.gamma,
                          step_size=self.step_size, beta1=self.beta1, beta2=self.beta2,
                          shuffle=self.shuffle, seed=self.random_state)
        ds = _as_dataset(X, np.zeros((len(X), 1)))
        self.net_ = train_autoencoder(ds, cfg, latent_size=self.latent_size)
        self.history_ = self.net_.history
        self.n_features_in_ = X.shape[1]
        return self

    def _check_fitted(self):
        if not hasattr(self, "net_"):
            raise StateError("estimator is not fitted; call fit(X) first")

    def transform(self, X):
        self._check_fitted()
        with no_grad():
            return self.net_.encode(Tensor(check_matrix(X))).data

    def inverse_transform(self, Z):
        self._check_fitted()
        with no_grad():
            return self.net_.decode(Tensor(check_matrix(Z, name="Z"))).data

    def reconstruction_error(self, X):
        """Per-row mean absolute reconstruction error (anomaly score)."""
        self._check_fitted()
        X = check_matrix(X)
        with no_grad():
            rec = self.net_.forward(Tensor(X)).data
        return np.abs(rec - X).mean(axis=1)


class MLPBinaryClassifier(BaseEstimator, ClassifierMixin):
    """Small dense classifier (256 -> 3 -> 1) trained with log loss."""

    def __init__(self, epochs=30, batch_size=512, learning_rate=2e-4, gamma=0.99954,
                 step_size=10, beta1=0.9, beta2=0.999, threshold=0.5,
                 shuffle=False, random_state=0):
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.gamma = gamma
        self.step_size = step_size
        self.beta1 = beta1
        self.beta2 = beta2
        self.threshold = threshold
        self.shuffle = shuffle
        self.random_state = random_state

    def fit(self, X, y):
        X = check_matrix(X)
        y = check_binary_labels(y, len(X))
        cfg = TrainConfig(epochs=self.epochs, batch_size=self.batch_size,
                          learning_rate=self.learning_rate, gamma=self.gamma,
                          step_size=self.step_size, beta1=self.beta1, beta2=self.beta2,
                          shuffle=self.shuffle, seed=self.random_state)
        self.net_ = train_mlp(X, y, cfg)
        self.history_ = self.net_.history
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0.0, 1.0])
        return self

    def _check_fitted(self):
        if not hasattr(self, "net_"):
            raise StateError("estimator is not fitted; call fit(X, y) first")

    def predict_proba(self, X):
        self._check_fitted()
        p = mlp_predict_proba(self.net_, check_matrix(X)).ravel()
        return np.column_stack([1.0 - p, p])

    def predict(self, X):
        return (self.predict_proba(X)[:, 1] >= self.threshold).astype(np.float64)
