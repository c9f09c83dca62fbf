"""Dense 2-D float64 tensors with reverse-mode automatic differentiation.

Every value flowing through the networks is a ``Tensor``: a (rows, cols)
float64 array. Ops executed while gradients are enabled record their inputs
plus vector-Jacobian closures on the output, forming a per-batch tape that
``Tensor.backward`` replays in reverse topological order. Gradients
accumulate only into leaves created with ``requires_grad=True`` (typically
``Parameter``); a detached tensor cuts the flow.
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, DimensionError, NumericError, StateError

_grad_enabled = True


class no_grad:
    """Context manager that disables tape recording (evaluation mode)."""

    def __enter__(self):
        global _grad_enabled
        self._prev = _grad_enabled
        _grad_enabled = False
        return self

    def __exit__(self, *exc):
        global _grad_enabled
        _grad_enabled = self._prev
        return False


def grad_enabled() -> bool:
    return _grad_enabled


def _as_2d(data) -> np.ndarray:
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1)
    elif arr.ndim != 2:
        raise DimensionError(f"tensors are 2-D; got array of shape {arr.shape}")
    return arr


class Tensor:
    """A (rows, cols) float64 value, immutable once produced by an op."""

    __slots__ = ("data", "grad", "requires_grad", "name", "_parents", "_vjps")

    def __init__(self, data, requires_grad: bool = False, name: str = ""):
        self.data = _as_2d(data)
        if not np.all(np.isfinite(self.data)):
            raise NumericError(f"non-finite values in tensor {name or '<unnamed>'}")
        self.requires_grad = bool(requires_grad)
        self.name = name
        self.grad: np.ndarray | None = np.zeros_like(self.data) if requires_grad else None
        self._parents: tuple[Tensor, ...] = ()
        self._vjps: tuple[Callable[[np.ndarray], np.ndarray], ...] = ()

    # -- basic introspection -------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape  # type: ignore[return-value]

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def item(self) -> float:
        if self.data.size != 1:
            raise DimensionError(f"item() needs a 1x1 tensor, got {self.shape}")
        return float(self.data[0, 0])

    def __repr__(self) -> str:
        tag = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{tag})"

    # -- graph management ----------------------------------------------------

    def detach(self) -> "Tensor":
        """A graph-free view of the same values; gradients stop here."""
        out = Tensor.__new__(Tensor)
        out.data = self.data
        out.requires_grad = False
        out.grad = None
        out.name = self.name
        out._parents = ()
        out._vjps = ()
        return out

    def zero_grad(self) -> None:
        if self.grad is not None:
            self.grad.fill(0.0)

    def backward(self, upstream_grad: np.ndarray | None = None,
                 only: Sequence["Tensor"] | None = None) -> None:
        """Accumulate d(self)/d(leaf) into every requires_grad leaf.

        ``upstream_grad`` defaults to 1 and may be omitted only for 1x1
        tensors. ``only`` restricts accumulation to the given leaves and lets
        the walk skip branches that cannot reach them. Repeated calls on the
        same graph keep accumulating, so callers zero parameter grads between
        accumulation cycles.
        """
        if not self._parents:
            if not self.requires_grad:
                raise StateError("backward() on a tensor with no recorded forward graph")
            seed = self._seed(upstream_grad)
            if only is None or any(t is self for t in only):
                self.grad += seed
            return
        seed = self._seed(upstream_grad)
        wanted = None if only is None else {id(t) for t in only}

        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in seen:
                    stack.append((p, False))

        # a node's gradient is worth computing only if some wanted leaf sits
        # upstream of it; parents precede children in ``order``
        useful: dict[int, bool] = {}
        for node in order:
            if node._parents:
                flag = any(useful[id(p)] for p in node._parents)
            else:
                flag = node.requires_grad and (wanted is None or id(node) in wanted)
            useful[id(node)] = flag

        grads: dict[int, np.ndarray] = {id(self): seed}
        for node in reversed(order):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node.requires_grad and node.grad is not None and (
                    wanted is None or id(node) in wanted):
                node.grad += g
            for parent, vjp in zip(node._parents, node._vjps):
                if not useful[id(parent)]:
                    continue
                contrib = vjp(g)
                key = id(parent)
                if key in grads:
                    grads[key] = grads[key] + contrib
                else:
                    grads[key] = contrib

    def _seed(self, upstream_grad: np.ndarray | None) -> np.ndarray:
        if upstream_grad is None:
            if self.data.size != 1:
                raise DimensionError(
                    f"backward() on shape {self.shape} needs an explicit upstream gradient"
                )
            return np.ones_like(self.data)
        seed = np.asarray(upstream_grad, dtype=np.float64)
        if seed.size != self.data.size:
            raise DimensionError(
                f"upstream gradient of size {seed.size} for tensor of shape {self.shape}"
            )
        return seed.reshape(self.data.shape)

    # -- operator sugar --------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Tensor):
            return add(self, other)
        return affine_map(self, 1.0, float(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Tensor):
            return sub(self, other)
        return affine_map(self, 1.0, -float(other))

    def __rsub__(self, other):
        return affine_map(self, -1.0, float(other))

    def __mul__(self, other):
        if isinstance(other, Tensor):
            return mul(self, other)
        return affine_map(self, float(other), 0.0)

    __rmul__ = __mul__

    def __neg__(self):
        return affine_map(self, -1.0, 0.0)


class Parameter(Tensor):
    """A trainable tensor: gradient buffer plus a name for error reports."""

    __slots__ = ()

    def __init__(self, data, name: str):
        super().__init__(data, requires_grad=True, name=name)


def _make(data: np.ndarray, parents: Sequence[Tensor], vjps: Sequence[Callable]) -> Tensor:
    out = Tensor.__new__(Tensor)
    out.data = data
    out.requires_grad = False
    out.grad = None
    out.name = ""
    if _grad_enabled and any(p.requires_grad or p._parents for p in parents):
        out._parents = tuple(parents)
        out._vjps = tuple(vjps)
    else:
        out._parents = ()
        out._vjps = ()
    return out


def assert_finite(t: Tensor, context: str) -> Tensor:
    if not np.all(np.isfinite(t.data)):
        raise NumericError(f"non-finite values in {context}")
    return t


# -- core ops -----------------------------------------------------------------


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.cols != b.rows:
        raise DimensionError(f"matmul: inner dims differ, {a.shape} x {b.shape}")
    return _make(
        a.data @ b.data,
        (a, b),
        (lambda g: g @ b.data.T, lambda g: a.data.T @ g),
    )


def _broadcast_pair(a: Tensor, b: Tensor, opname: str):
    """Allow equal shapes or a 1-row bias against a multi-row operand."""
    if a.shape == b.shape:
        return None
    if a.rows == 1 and b.cols == a.cols:
        return "a"
    if b.rows == 1 and a.cols == b.cols:
        return "b"
    raise DimensionError(f"{opname}: incompatible shapes {a.shape} and {b.shape}")


def add(a: Tensor, b: Tensor) -> Tensor:
    row = _broadcast_pair(a, b, "add")
    vjp_a = (lambda g: g.sum(axis=0, keepdims=True)) if row == "a" else (lambda g: g)
    vjp_b = (lambda g: g.sum(axis=0, keepdims=True)) if row == "b" else (lambda g: g)
    return _make(a.data + b.data, (a, b), (vjp_a, vjp_b))


def sub(a: Tensor, b: Tensor) -> Tensor:
    row = _broadcast_pair(a, b, "sub")
    vjp_a = (lambda g: g.sum(axis=0, keepdims=True)) if row == "a" else (lambda g: g)
    vjp_b = (lambda g: -g.sum(axis=0, keepdims=True)) if row == "b" else (lambda g: -g)
    return _make(a.data - b.data, (a, b), (vjp_a, vjp_b))


def mul(a: Tensor, b: Tensor) -> Tensor:
    row = _broadcast_pair(a, b, "mul")
    if row == "a":
        vjp_a = lambda g: (g * b.data).sum(axis=0, keepdims=True)
        vjp_b = lambda g: g * a.data
    elif row == "b":
        vjp_a = lambda g: g * b.data
        vjp_b = lambda g: (g * a.data).sum(axis=0, keepdims=True)
    else:
        vjp_a = lambda g: g * b.data
        vjp_b = lambda g: g * a.data
    return _make(a.data * b.data, (a, b), (vjp_a, vjp_b))


def affine_map(a: Tensor, alpha: float, beta: float) -> Tensor:
    """Elementwise alpha*a + beta with scalar coefficients."""
    return _make(alpha * a.data + beta, (a,), (lambda g: alpha * g,))


def square(a: Tensor) -> Tensor:
    return _make(a.data * a.data, (a,), (lambda g: 2.0 * a.data * g,))


def absolute(a: Tensor) -> Tensor:
    return _make(np.abs(a.data), (a,), (lambda g: g * np.sign(a.data),))


def log(a: Tensor) -> Tensor:
    return _make(np.log(a.data), (a,), (lambda g: g / a.data,))


def clip(a: Tensor, lo: float, hi: float) -> Tensor:
    mask = (a.data >= lo) & (a.data <= hi)
    return _make(np.clip(a.data, lo, hi), (a,), (lambda g: g * mask,))


def concat_cols(a: Tensor, b: Tensor) -> Tensor:
    if a.rows != b.rows:
        raise DimensionError(f"concat: batch dims differ, {a.shape} vs {b.shape}")
    k = a.cols
    return _make(
        np.concatenate([a.data, b.data], axis=1),
        (a, b),
        (lambda g: g[:, :k], lambda g: g[:, k:]),
    )


def mean_all(a: Tensor) -> Tensor:
    n = a.data.size
    return _make(
        np.array([[a.data.mean()]]),
        (a,),
        (lambda g: np.full_like(a.data, g[0, 0] / n),),
    )


def mean_rows(a: Tensor) -> Tensor:
    """Mean across the batch (first) dimension; output is 1 x cols."""
    n = a.rows
    return _make(
        a.data.mean(axis=0, keepdims=True),
        (a,),
        (lambda g: np.repeat(g / n, n, axis=0),),
    )


def mean_cols(a: Tensor) -> Tensor:
    """Mean across the feature (second) dimension; output is rows x 1."""
    n = a.cols
    return _make(
        a.data.mean(axis=1, keepdims=True),
        (a,),
        (lambda g: np.repeat(g / n, n, axis=1),),
    )


# -- layers ---------------------------------------------------------------


def affine_forward(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """x @ weight + bias with bias broadcast over the batch."""
    if x.cols != weight.rows:
        raise DimensionError(
            f"affine: input shape {x.shape} incompatible with weight shape {weight.shape}"
        )
    if bias.shape != (1, weight.cols):
        raise DimensionError(
            f"affine: bias shape {bias.shape} must be (1, {weight.cols})"
        )
    return add(matmul(x, weight), bias)


def tanh(a: Tensor) -> Tensor:
    t = np.tanh(a.data)
    return _make(t, (a,), (lambda g: g * (1.0 - t * t),))


def relu(a: Tensor) -> Tensor:
    mask = a.data > 0
    return _make(a.data * mask, (a,), (lambda g: g * mask,))


def sigmoid(a: Tensor) -> Tensor:
    x = a.data
    s = np.empty_like(x)
    pos = x >= 0
    s[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    s[~pos] = ex / (1.0 + ex)
    return _make(s, (a,), (lambda g: g * s * (1.0 - s),))


ACTIVATIONS = ("tanh", "relu", "sigmoid", "none")


def activation(kind: str, x: Tensor) -> Tensor:
    """Elementwise activation by name; ``none`` is the identity."""
    if kind == "tanh":
        return tanh(x)
    if kind == "relu":
        return relu(x)
    if kind == "sigmoid":
        return sigmoid(x)
    if kind == "none":
        return x
    raise ConfigError(f"unknown activation {kind!r}; expected one of {ACTIVATIONS}")
