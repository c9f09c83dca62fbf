"""Numeric core: ops against brute-force oracles and the tape against
central finite differences."""
import numpy as np
import pytest

from ccnets import tensor as T
from ccnets.errors import ConfigError, DimensionError, NumericError, StateError
from ccnets.gradcheck import finite_diff_grad, max_rel_error
from ccnets.tensor import Parameter, Tensor


def affine_oracle(x, w, b):
    """Naive triple loop, the independent reference for affine_forward."""
    rows, inner = x.shape
    cols = w.shape[1]
    out = np.zeros((rows, cols))
    for i in range(rows):
        for j in range(cols):
            acc = 0.0
            for k in range(inner):
                acc += x[i, k] * w[k, j]
            out[i, j] = acc + b[0, j]
    return out


class TestTensorBasics:
    def test_scalar_and_vector_coercion(self):
        assert Tensor(3.0).shape == (1, 1)
        assert Tensor([1.0, 2.0]).shape == (1, 2)

    def test_non_finite_rejected(self):
        with pytest.raises(NumericError):
            Tensor([[np.nan, 1.0]])

    def test_item_requires_1x1(self):
        with pytest.raises(DimensionError):
            Tensor([[1.0, 2.0]]).item()


class TestAffineForward:
    def test_identity_weight(self):
        out = T.affine_forward(Tensor([[1.0, 2.0]]), Tensor([[1.0, 0.0], [0.0, 1.0]]),
                               Tensor([[0.0, 0.0]]))
        np.testing.assert_array_equal(out.data, [[1.0, 2.0]])

    def test_zero_input_passes_bias(self):
        out = T.affine_forward(Tensor([[0.0, 0.0]]), Tensor([[5.0, -2.0], [1.0, 7.0]]),
                               Tensor([[3.0, 4.0]]))
        np.testing.assert_array_equal(out.data, [[3.0, 4.0]])

    def test_hand_example(self):
        out = T.affine_forward(Tensor([[1.0, 1.0]]), Tensor([[2.0, 0.0], [0.0, 3.0]]),
                               Tensor([[1.0, 1.0]]))
        np.testing.assert_array_equal(out.data, [[3.0, 4.0]])

    def test_matches_triple_loop_oracle_bitwise(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            b, n, m = rng.integers(1, 17, size=3)
            x = rng.normal(size=(b, n))
            w = rng.normal(size=(n, m))
            bias = rng.normal(size=(1, m))
            got = T.affine_forward(Tensor(x), Tensor(w), Tensor(bias)).data
            want = affine_oracle(x, w, bias)
            # matmul may sum in a different order; demand float equality to the
            # last ulp rather than literal identity only when shapes are tiny
            np.testing.assert_allclose(got, want, rtol=0, atol=1e-13)

    def test_shape_mismatch_names_both_shapes(self):
        with pytest.raises(DimensionError) as exc:
            T.affine_forward(Tensor(np.ones((2, 3))), Tensor(np.ones((4, 5))),
                             Tensor(np.ones((1, 5))))
        assert "(2, 3)" in str(exc.value) and "(4, 5)" in str(exc.value)


class TestActivations:
    def test_tanh_at_zero(self):
        assert T.activation("tanh", Tensor([[0.0]])).item() == 0.0

    def test_relu_clips_negative(self):
        np.testing.assert_array_equal(
            T.activation("relu", Tensor([[-1.0, 2.0]])).data, [[0.0, 2.0]])

    def test_sigmoid_at_zero(self):
        assert T.activation("sigmoid", Tensor([[0.0]])).item() == 0.5

    def test_none_is_identity(self):
        x = Tensor([[1.0, -5.0]])
        assert T.activation("none", x) is x

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            T.activation("gelu", Tensor([[0.0]]))

    def test_sigmoid_stable_at_extremes(self):
        out = T.sigmoid(Tensor([[-800.0, 800.0]]))
        assert np.all(np.isfinite(out.data))
        assert out.data[0, 0] == 0.0 and out.data[0, 1] == 1.0


class TestBackward:
    def test_sigmoid_grad_at_zero(self):
        x = Parameter([[0.0]], name="x")
        T.sigmoid(x).backward()
        assert x.grad[0, 0] == pytest.approx(0.25, abs=1e-15)

    def test_tanh_grad_at_zero(self):
        x = Parameter([[0.0]], name="x")
        T.tanh(x).backward()
        assert x.grad[0, 0] == pytest.approx(1.0, abs=1e-15)

    def test_backward_without_graph_raises(self):
        with T.no_grad():
            y = T.tanh(Tensor([[1.0]]))
        with pytest.raises(StateError):
            y.backward()

    def test_backward_accumulates_until_zeroed(self):
        x = Parameter([[2.0]], name="x")
        y = T.square(x)
        y.backward()
        y.backward()
        assert x.grad[0, 0] == pytest.approx(8.0)
        x.zero_grad()
        assert x.grad[0, 0] == 0.0

    def test_detached_tensor_blocks_flow(self):
        x = Parameter([[3.0]], name="x")
        y = T.square(x).detach()
        z = T.square(y)
        with pytest.raises(StateError):
            z.backward()  # nothing upstream of the detach point
        # mixing a live and a detached branch: only the live one gets gradient
        live = T.square(x)
        mixed = T.add(live, T.square(x).detach())
        x.zero_grad()
        mixed.backward()
        assert x.grad[0, 0] == pytest.approx(6.0)

    def test_repeated_operand_accumulates_both_paths(self):
        x = Parameter([[3.0]], name="x")
        T.mul(x, x).backward()
        assert x.grad[0, 0] == pytest.approx(6.0)

    def test_two_layer_net_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        for seed in range(20):
            rng = np.random.default_rng(seed)
            x = rng.normal(size=(4, 3))
            w1 = Parameter(rng.normal(size=(3, 5)), name="w1")
            b1 = Parameter(rng.normal(size=(1, 5)), name="b1")
            w2 = Parameter(rng.normal(size=(5, 2)), name="w2")
            b2 = Parameter(rng.normal(size=(1, 2)), name="b2")

            def loss_for(params_data, target=None):
                h = T.tanh(T.affine_forward(Tensor(x), w1, b1))
                out = T.sigmoid(T.affine_forward(h, w2, b2))
                return T.mean_all(T.square(out))

            loss = loss_for(None)
            loss.backward()
            for p in (w1, b1, w2, b2):
                def f(values, p=p):
                    old = p.data
                    p.data = values
                    with T.no_grad():
                        h = T.tanh(T.affine_forward(Tensor(x), w1, b1))
                        out = T.sigmoid(T.affine_forward(h, w2, b2))
                        val = T.mean_all(T.square(out)).item()
                    p.data = old
                    return val

                numeric = finite_diff_grad(f, p.data, eps=1e-5)
                assert max_rel_error(p.grad, numeric) < 1e-4

    def test_mean_ops_grads(self):
        x = Parameter(np.arange(6.0).reshape(2, 3), name="x")
        T.mean_all(x).backward()
        np.testing.assert_allclose(x.grad, np.full((2, 3), 1 / 6))
        x.zero_grad()
        T.mean_rows(x).backward(np.ones((1, 3)))
        np.testing.assert_allclose(x.grad, np.full((2, 3), 1 / 2))
        x.zero_grad()
        T.mean_cols(x).backward(np.ones((2, 1)))
        np.testing.assert_allclose(x.grad, np.full((2, 3), 1 / 3))

    def test_explicit_upstream_grad_required_for_nonscalar(self):
        x = Parameter(np.ones((2, 2)), name="x")
        with pytest.raises(DimensionError):
            T.square(x).backward()


class TestOpsForwardValues:
    def test_concat_and_split_grads(self):
        a = Parameter(np.ones((2, 2)), name="a")
        b = Parameter(np.ones((2, 3)), name="b")
        out = T.concat_cols(a, b)
        assert out.shape == (2, 5)
        g = np.arange(10.0).reshape(2, 5)
        out.backward(g)
        np.testing.assert_array_equal(a.grad, g[:, :2])
        np.testing.assert_array_equal(b.grad, g[:, 2:])

    def test_clip_passthrough_and_block(self):
        x = Parameter([[0.5, 2.0, -1.0]], name="x")
        T.clip(x, 0.0, 1.0).backward(np.ones((1, 3)))
        np.testing.assert_array_equal(x.grad, [[1.0, 0.0, 0.0]])

    def test_bias_broadcast_add_sums_rows(self):
        bias = Parameter(np.zeros((1, 3)), name="b")
        x = Tensor(np.ones((4, 3)))
        T.add(x, bias).backward(np.ones((4, 3)))
        np.testing.assert_array_equal(bias.grad, [[4.0, 4.0, 4.0]])

    def test_finiteness_preserved_by_forward(self):
        rng = np.random.default_rng(3)
        x = Tensor(rng.normal(size=(5, 4)))
        w = Tensor(rng.normal(size=(4, 4)))
        b = Tensor(rng.normal(size=(1, 4)))
        out = T.sigmoid(T.affine_forward(T.tanh(T.affine_forward(x, w, b)), w, b))
        assert np.all(np.isfinite(out.data))
