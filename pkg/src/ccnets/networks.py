"""The three cooperating networks and their forward paths.

The explainer maps an observation to a latent code, the reasoner scores a
label from the observation plus that code, and the producer maps a code plus
a label back to observation space. Generation feeds the producer the true
label; reconstruction feeds it the reasoner's inferred label.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import TabularDataset
from .errors import ConfigError, DimensionError, DomainError, NumericError
from .optim import Adam, StepDecaySchedule
from .tensor import (
    Parameter,
    Tensor,
    activation,
    add,
    affine_forward,
    affine_map,
    concat_cols,
    matmul,
    mul,
    no_grad,
    relu,
    square,
    sub,
    tanh,
)

NET_NAMES = ("explainer", "reasoner", "producer")


# -- building blocks ---------------------------------------------------------


class AffineLayer:
    """Dense layer; weights uniform in +-1/sqrt(fan_in), bias zero."""

    def __init__(self, in_size: int, out_size: int, rng: np.random.Generator, name: str):
        bound = 1.0 / np.sqrt(in_size)
        self.weight = Parameter(rng.uniform(-bound, bound, (in_size, out_size)),
                                name=f"{name}.weight")
        self.bias = Parameter(np.zeros((1, out_size)), name=f"{name}.bias")

    def __call__(self, x: Tensor) -> Tensor:
        return affine_forward(x, self.weight, self.bias)

    @property
    def params(self) -> list[Parameter]:
        return [self.weight, self.bias]


@dataclass
class InnerNetSpec:
    """Configuration of the user-customizable network inside each stack."""

    kind: str = "mlp"  # mlp | resmlp | deepfm
    num_layers: int = 3
    hidden_size: int = 256
    activation: str = "relu"

    def __post_init__(self):
        if self.kind not in ("mlp", "resmlp", "deepfm"):
            raise ConfigError(f"unknown inner network kind {self.kind!r}")
        if self.num_layers < 1:
            raise ConfigError(f"inner num_layers must be >= 1, got {self.num_layers}")
        if self.hidden_size < 1:
            raise ConfigError(f"hidden_size must be >= 1, got {self.hidden_size}")


class MlpInner:
    """num_layers dense layers at hidden width, activation between them."""

    def __init__(self, spec: InnerNetSpec, rng: np.random.Generator, name: str):
        h = spec.hidden_size
        self.activation = spec.activation
        self.layers = [AffineLayer(h, h, rng, f"{name}.fc{i}") for i in range(spec.num_layers)]

    def forward(self, x: Tensor) -> Tensor:
        for i, layer in enumerate(self.layers):
            if i:
                x = activation(self.activation, x)
            x = layer(x)
        return x

    @property
    def params(self) -> list[Parameter]:
        return [p for layer in self.layers for p in layer.params]


class ResMlpInner:
    """num_layers residual blocks: learned per-feature scale/shift, a dense
    layer, the activation, then the skip connection back in."""

    def __init__(self, spec: InnerNetSpec, rng: np.random.Generator, name: str):
        h = spec.hidden_size
        self.activation = spec.activation
        self.blocks = []
        for i in range(spec.num_layers):
            pre_scale = Parameter(np.ones((1, h)), name=f"{name}.block{i}.pre_scale")
            pre_shift = Parameter(np.zeros((1, h)), name=f"{name}.block{i}.pre_shift")
            dense = AffineLayer(h, h, rng, f"{name}.block{i}.fc")
            self.blocks.append((pre_scale, pre_shift, dense))

    def forward(self, x: Tensor) -> Tensor:
        for pre_scale, pre_shift, dense in self.blocks:
            z = add(mul(pre_scale, x), pre_shift)
            z = activation(self.activation, dense(z))
            x = add(x, z)
        return x

    @property
    def params(self) -> list[Parameter]:
        out: list[Parameter] = []
        for pre_scale, pre_shift, dense in self.blocks:
            out += [pre_scale, pre_shift, *dense.params]
        return out


class DeepFmInner:
    """Factorization-machine pairwise interactions over the hidden units plus
    a dense tower, merged back to hidden width.

    Each hidden unit acts as a continuous field: its k-dim embedding is scaled
    by the unit's value, the FM term keeps the per-factor interaction sums,
    and the tower is num_layers dense layers. Both are concatenated and
    projected to hidden width.
    """

    FACTOR_DIM = 8

    def __init__(self, spec: InnerNetSpec, rng: np.random.Generator, name: str):
        h = spec.hidden_size
        k = self.FACTOR_DIM
        bound = 1.0 / np.sqrt(h)
        self.embeddings = Parameter(rng.uniform(-bound, bound, (h, k)),
                                    name=f"{name}.fm_embeddings")
        self.tower = MlpInner(spec, rng, f"{name}.tower")
        self.merge = AffineLayer(h + k, h, rng, f"{name}.merge")

    def forward(self, x: Tensor) -> Tensor:
        sum_embed = matmul(x, self.embeddings)                    # b x k
        sum_square = matmul(square(x), square(self.embeddings))   # b x k
        fm = affine_map(sub(square(sum_embed), sum_square), 0.5, 0.0)
        deep = self.tower.forward(x)
        return self.merge(concat_cols(fm, deep))

    @property
    def params(self) -> list[Parameter]:
        return [self.embeddings, *self.tower.params, *self.merge.params]


def build_inner(spec: InnerNetSpec, rng: np.random.Generator, name: str):
    if spec.kind == "mlp":
        return MlpInner(spec, rng, name)
    if spec.kind == "resmlp":
        return ResMlpInner(spec, rng, name)
    return DeepFmInner(spec, rng, name)


# -- joint mechanism -----------------------------------------------------------


JOINT_MODES = ("none", "add", "cat")


class Joint:
    """Merges two inputs to the hidden width.

    add: each input gets its own projection and the two are averaged.
    cat: the inputs are stacked along features and projected once.
    none: the raw pair is kept separate at the op level; inside a network the
    downstream layer still needs one tensor, so combine() applies a single
    projection over the side-by-side inputs (numerically the cat path).
    """

    def __init__(self, mode: str, a_size: int, b_size: int, target_size: int,
                 rng: np.random.Generator, name: str):
        if mode not in JOINT_MODES:
            raise ConfigError(f"unknown joint mode {mode!r}; expected one of {JOINT_MODES}")
        self.mode = mode
        self.a_size = a_size
        self.b_size = b_size
        self.target_size = target_size
        if mode == "add":
            self.proj_a = AffineLayer(a_size, target_size, rng, f"{name}.proj_a")
            self.proj_b = AffineLayer(b_size, target_size, rng, f"{name}.proj_b")
        else:
            self.proj = AffineLayer(a_size + b_size, target_size, rng, f"{name}.proj")

    def combine(self, a: Tensor, b: Tensor) -> Tensor:
        if a.rows != b.rows:
            raise DimensionError(f"joint: batch dims differ, {a.shape} vs {b.shape}")
        if a.cols != self.a_size or b.cols != self.b_size:
            raise DimensionError(
                f"joint expects widths ({self.a_size}, {self.b_size}), "
                f"got ({a.cols}, {b.cols})"
            )
        if self.mode == "add":
            return affine_map(add(self.proj_a(a), self.proj_b(b)), 0.5, 0.0)
        return self.proj(concat_cols(a, b))

    @property
    def params(self) -> list[Parameter]:
        if self.mode == "add":
            return [*self.proj_a.params, *self.proj_b.params]
        return [*self.proj.params]


def joint_combine(joint: Joint, a: Tensor, b: Tensor):
    """The raw joint op: ``none`` passes the pair through untouched, the other
    modes merge to the joint's target width."""
    if joint.mode == "none":
        if a.rows != b.rows:
            raise DimensionError(f"joint: batch dims differ, {a.shape} vs {b.shape}")
        return a, b
    return joint.combine(a, b)


# -- the three networks --------------------------------------------------------


class ExplainerNet:
    """Observation -> latent code. Six-layer stack: projection, tanh, inner
    network, relu, latent projection, final activation."""

    def __init__(self, observe_size: int, explain_size: int, inner: InnerNetSpec,
                 final_activation: str, rng: np.random.Generator):
        self.observe_size = observe_size
        self.explain_size = explain_size
        self.final_activation = final_activation
        self.input_proj = AffineLayer(observe_size, inner.hidden_size, rng, "explainer.input_proj")
        self.inner = build_inner(inner, rng, "explainer.inner")
        self.latent_proj = AffineLayer(inner.hidden_size, explain_size, rng, "explainer.latent_proj")

    def forward(self, x: Tensor) -> Tensor:
        if x.cols != self.observe_size:
            raise DimensionError(f"explainer expects width {self.observe_size}, got {x.cols}")
        h = tanh(self.input_proj(x))
        h = relu(self.inner.forward(h))
        return activation(self.final_activation, self.latent_proj(h))

    def params(self) -> list[Parameter]:
        return [*self.input_proj.params, *self.inner.params, *self.latent_proj.params]


class ReasonerNet:
    """(observation, latent) -> label score. Seven-layer stack: inputs, joint,
    tanh, inner network, relu, label projection, final activation."""

    def __init__(self, observe_size: int, explain_size: int, label_size: int,
                 joint_mode: str, inner: InnerNetSpec, final_activation: str,
                 rng: np.random.Generator):
        self.observe_size = observe_size
        self.explain_size = explain_size
        self.label_size = label_size
        self.final_activation = final_activation
        self.joint = Joint(joint_mode, observe_size, explain_size, inner.hidden_size,
                           rng, "reasoner.joint")
        self.inner = build_inner(inner, rng, "reasoner.inner")
        self.label_proj = AffineLayer(inner.hidden_size, label_size, rng, "reasoner.label_proj")

    def forward(self, x: Tensor, e: Tensor) -> Tensor:
        h = tanh(self.joint.combine(x, e))
        h = relu(self.inner.forward(h))
        return activation(self.final_activation, self.label_proj(h))

    def params(self) -> list[Parameter]:
        return [*self.joint.params, *self.inner.params, *self.label_proj.params]


class ProducerNet:
    """(latent, label) -> observation. Same seven-layer stack shape as the
    reasoner, ending at observation width."""

    def __init__(self, observe_size: int, explain_size: int, label_size: int,
                 joint_mode: str, inner: InnerNetSpec, final_activation: str,
                 rng: np.random.Generator):
        self.observe_size = observe_size
        self.explain_size = explain_size
        self.label_size = label_size
        self.final_activation = final_activation
        self.joint = Joint(joint_mode, explain_size, label_size, inner.hidden_size,
                           rng, "producer.joint")
        self.inner = build_inner(inner, rng, "producer.inner")
        self.observe_proj = AffineLayer(inner.hidden_size, observe_size, rng,
                                        "producer.observe_proj")

    def forward(self, e: Tensor, label: Tensor) -> Tensor:
        h = tanh(self.joint.combine(e, label))
        h = relu(self.inner.forward(h))
        return activation(self.final_activation, self.observe_proj(h))

    def params(self) -> list[Parameter]:
        return [*self.joint.params, *self.inner.params, *self.observe_proj.params]


@dataclass
class NetworkConfig:
    """Shape and wiring of the cooperative triple (defaults match the fraud
    experiments: 30 features, binary label, 26-wide latent, 256 hidden)."""

    observe_size: int = 30
    label_size: int = 1
    explain_size: int = 26
    hidden_size: int = 256
    inner_num_layers: int = 3
    inner_activation: str = "relu"
    explainer_inner: str = "mlp"
    reasoner_inner: str = "deepfm"
    producer_inner: str = "resmlp"
    reasoner_joint_type: str = "add"
    producer_joint_type: str = "add"
    explainer_final_activation: str = "sigmoid"
    reasoner_final_activation: str = "none"
    producer_final_activation: str = "none"

    def inner_spec(self, kind: str) -> InnerNetSpec:
        return InnerNetSpec(kind=kind, num_layers=self.inner_num_layers,
                            hidden_size=self.hidden_size, activation=self.inner_activation)


class CooperativeTriple:
    """The bound explainer/reasoner/producer plus their optimizers."""

    def __init__(self, explainer: ExplainerNet, reasoner: ReasonerNet, producer: ProducerNet,
                 schedules: dict[str, StepDecaySchedule] | None = None,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        if explainer.explain_size != reasoner.explain_size:
            raise DimensionError(
                f"explainer latent width {explainer.explain_size} vs "
                f"reasoner latent input {reasoner.explain_size}"
            )
        if explainer.explain_size != producer.explain_size:
            raise DimensionError(
                f"explainer latent width {explainer.explain_size} vs "
                f"producer latent input {producer.explain_size}"
            )
        if reasoner.label_size != producer.label_size:
            raise DimensionError(
                f"reasoner label width {reasoner.label_size} vs "
                f"producer label input {producer.label_size}"
            )
        self.explainer = explainer
        self.reasoner = reasoner
        self.producer = producer
        self.nets = {"explainer": explainer, "reasoner": reasoner, "producer": producer}
        self.optimizers = {name: Adam(net.params(), beta1, beta2, eps)
                           for name, net in self.nets.items()}
        self.schedules = schedules or {name: StepDecaySchedule() for name in NET_NAMES}

    @classmethod
    def build(cls, cfg: NetworkConfig, seed: int = 0,
              schedules: dict[str, StepDecaySchedule] | None = None,
              beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> "CooperativeTriple":
        rng = np.random.default_rng(seed)
        explainer = ExplainerNet(cfg.observe_size, cfg.explain_size,
                                 cfg.inner_spec(cfg.explainer_inner),
                                 cfg.explainer_final_activation, rng)
        reasoner = ReasonerNet(cfg.observe_size, cfg.explain_size, cfg.label_size,
                               cfg.reasoner_joint_type, cfg.inner_spec(cfg.reasoner_inner),
                               cfg.reasoner_final_activation, rng)
        producer = ProducerNet(cfg.observe_size, cfg.explain_size, cfg.label_size,
                               cfg.producer_joint_type, cfg.inner_spec(cfg.producer_inner),
                               cfg.producer_final_activation, rng)
        return cls(explainer, reasoner, producer, schedules, beta1, beta2, eps)

    def params(self) -> list[Parameter]:
        return [p for net in self.nets.values() for p in net.params()]

    def zero_grads(self) -> None:
        for p in self.params():
            p.zero_grad()


# -- forward paths ---------------------------------------------------------------


def explain(net: ExplainerNet, x: Tensor) -> Tensor:
    return net.forward(x)


def infer(net: ReasonerNet, x: Tensor, e: Tensor) -> Tensor:
    return net.forward(x, e)


def produce(net: ProducerNet, e: Tensor, label: Tensor) -> Tensor:
    return net.forward(e, label)


def reconstruct(triple: CooperativeTriple, x: Tensor) -> Tensor:
    e = explain(triple.explainer, x)
    y_hat = infer(triple.reasoner, x, e)
    return produce(triple.producer, e, y_hat)


def generate(triple: CooperativeTriple, x: Tensor, y: Tensor) -> Tensor:
    return produce(triple.producer, explain(triple.explainer, x), y)


def generate_dataset(triple: CooperativeTriple, dataset: TabularDataset,
                     batch_size: int = 4096) -> TabularDataset:
    """Producer output over a whole dataset using the true labels."""
    return amplify(triple, dataset, factor=1, noise_sigma=0.0, seed=0, batch_size=batch_size)


def reconstruct_dataset(triple: CooperativeTriple, dataset: TabularDataset,
                        batch_size: int = 4096) -> TabularDataset:
    """Producer output over a whole dataset under inferred labels; the
    source labels are carried over unchanged."""
    n = dataset.n_rows
    out = np.empty_like(dataset.features)
    with no_grad():
        for start in range(0, n, batch_size):
            stop = min(start + batch_size, n)
            x = Tensor(dataset.features[start:stop])
            out[start:stop] = reconstruct(triple, x).data
    if not np.all(np.isfinite(out)):
        raise NumericError("reconstruction produced non-finite observations")
    return TabularDataset(features=out, labels=dataset.labels.copy(),
                          columns=list(dataset.columns))


def amplify(triple: CooperativeTriple, dataset: TabularDataset, factor: int,
            noise_sigma: float = 0.0, seed: int = 0,
            batch_size: int = 4096) -> TabularDataset:
    """Repeat generation ``factor`` times, jittering the latent code with
    zero-mean Gaussian noise per repetition; labels are copied from the
    source rows."""
    if factor < 1:
        raise DomainError(f"amplification factor must be >= 1, got {factor}")
    if noise_sigma < 0:
        raise DomainError(f"noise_sigma must be >= 0, got {noise_sigma}")
    rng = np.random.default_rng(seed)
    n = dataset.n_rows
    blocks: list[np.ndarray] = []
    with no_grad():
        for _ in range(factor):
            noise = (rng.normal(0.0, noise_sigma, (n, triple.explainer.explain_size))
                     if noise_sigma > 0 else None)
            out = np.empty_like(dataset.features)
            for start in range(0, n, batch_size):
                stop = min(start + batch_size, n)
                e = explain(triple.explainer, Tensor(dataset.features[start:stop]))
                code = e.data if noise is None else e.data + noise[start:stop]
                x_syn = produce(triple.producer, Tensor(code), Tensor(dataset.labels[start:stop]))
                out[start:stop] = x_syn.data
            if not np.all(np.isfinite(out)):
                raise NumericError("amplify produced non-finite observations; model untrained or diverged")
            blocks.append(out)
    features = np.concatenate(blocks, axis=0)
    labels = np.tile(dataset.labels, (factor, 1))
    return TabularDataset(features=features, labels=labels, columns=list(dataset.columns))
