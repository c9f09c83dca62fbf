"""Cooperative three-network generative classifier for imbalanced tabular data.

The explainer encodes observations into a latent code, the reasoner infers
labels from observation plus code, and the producer maps code plus label back
to observation space; all three train jointly but optimize their own
objectives. Includes the data pipeline, autoencoder/MLP baselines,
sklearn-style estimator wrappers, and the experiment CLI.
"""
from .config import MIDPOINT_THRESHOLD, RunConfig
from .data import TabularDataset, load_csv, normalize, split_sequential, synth_imbalanced
from .errors import CcnetsError
from .estimators import CCNetsClassifier, MLPBinaryClassifier, TabularAutoencoder
from .metrics import Metrics, compute_metrics, fit_log_curve
from .networks import (
    CooperativeTriple,
    NetworkConfig,
    amplify,
    explain,
    generate,
    infer,
    produce,
    reconstruct,
)
from .tensor import Parameter, Tensor, no_grad
from .trainer import TrainConfig, build_triple, evaluate, train

__version__ = "0.1.0"

__all__ = [
    "CCNetsClassifier",
    "CcnetsError",
    "CooperativeTriple",
    "MIDPOINT_THRESHOLD",
    "MLPBinaryClassifier",
    "Metrics",
    "NetworkConfig",
    "Parameter",
    "RunConfig",
    "TabularAutoencoder",
    "TabularDataset",
    "Tensor",
    "TrainConfig",
    "amplify",
    "build_triple",
    "compute_metrics",
    "evaluate",
    "explain",
    "fit_log_curve",
    "generate",
    "infer",
    "load_csv",
    "no_grad",
    "normalize",
    "produce",
    "reconstruct",
    "split_sequential",
    "synth_imbalanced",
    "train",
    "__version__",
]
