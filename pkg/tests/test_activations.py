import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from serf import activations as A
from serf.gradcheck import check_activation
from serf.reference import (
    erf_quadrature,
    richardson_derivative,
    richardson_second_derivative,
    softplus_reference,
)

# mpmath, 40 digits
ERF_LN2 = 0.67304128974252493642
PRECOND_0 = 0.69790605547850334633
SERF_VALUES = {-3.0: -0.16434553055471847172, -1.0: -0.3422479553893384412,
               0.5: 0.4158293114820590173, 2.0: 1.9947393332677912312}
SMOOTH = ["serf", "swish", "mish", "gelu", "sigmoid", "tanh", "identity"]
finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


@pytest.mark.parametrize("x,expected", sorted(SERF_VALUES.items()))
def test_serf_oracle_values(x, expected):
    assert A.serf(x) == pytest.approx(expected, rel=1e-14)


def test_serf_matches_independent_composition():
    xs = np.linspace(-50, 50, 2001)
    ref = xs * erf_quadrature(softplus_reference(xs))
    assert np.max(np.abs(A.serf(xs) - ref)) <= 1e-9


def test_serf_examples():
    assert A.serf(0.0) == 0.0
    assert A.serf(100.0) == pytest.approx(100.0, abs=1e-12)


@given(st.floats(min_value=1e-6, max_value=1e6))
def test_serf_below_identity_on_positive_side(x):
    assert A.serf(x) <= x


@given(st.floats(min_value=-700.0, max_value=-1e-300))
def test_serf_negative_for_negative_input(x):
    # below about -745, x * exp(x) underflows to -0.0
    assert A.serf(x) < 0.0


def test_serf_approaches_identity_monotonically():
    xs = np.linspace(5, 60, 5000)
    gap = xs - A.serf(xs)
    # erf(softplus(x)) is within an ulp of 1 from x ~ 5.9 on, so allow ulp-level noise
    assert np.all(np.diff(gap) <= np.spacing(xs[1:]))
    assert gap[-1] == 0.0
    assert A.serf(1e3 + 1) > 1e3 and A.serf(1e6 + 1) > 1e6


def test_serf_lower_bound_and_non_monotonic():
    xs = np.linspace(-20, 0, 200001)
    ys = A.serf(xs)
    assert -0.3485 <= ys.min() <= -0.3483
    i = int(np.argmin(ys))
    assert ys[0] > ys[i] and xs[0] < xs[i] < 0


def test_serf_minimum_search():
    x, y = A.serf_minimum()
    assert -0.3485 <= y <= -0.3483
    assert -2.0 < x < 0.0
    assert abs(richardson_derivative(A.serf, x, 1e-4)) < 1e-8


def test_serf_grad_at_zero():
    assert A.serf_grad(0.0) == pytest.approx(ERF_LN2, abs=1e-15)
    assert A.serf_grad(0.0) == pytest.approx(richardson_derivative(A.serf, 0.0, 1e-4), abs=1e-10)


def test_serf_grad_limits():
    assert A.serf_grad(60.0) == 1.0
    assert abs(A.serf_grad(-60.0)) < 1e-20


def test_serf_second_grad_matches_finite_differences():
    xs = np.linspace(-20, 20, 4001)
    fd = richardson_second_derivative(A.serf, xs, 1e-3)
    assert np.max(np.abs(A.serf_second_grad(xs) - fd)) <= 1e-5
    # at 0 it reduces to erf'(ln 2) * (1/2) * 2 = precond(0)
    assert A.serf_second_grad(0.0) == pytest.approx(PRECOND_0, rel=1e-14)
    assert A.serf_second_grad(0.0) == pytest.approx(
        richardson_second_derivative(A.serf, 0.0, 1e-4), abs=1e-6)


def test_serf_second_grad_limits():
    assert abs(A.serf_second_grad(40.0)) < 1e-20
    assert abs(A.serf_second_grad(-40.0)) < 1e-15


def test_decompose_at_zero():
    d = A.serf_decompose(0.0)
    assert d.precond == pytest.approx(PRECOND_0, rel=1e-14)
    assert d.swish_val == 0.0
    assert d.gate == pytest.approx(ERF_LN2, rel=1e-14)
    assert d.total == d.gate


def test_decompose_at_ten():
    d = A.serf_decompose(10.0)
    assert d.swish_val == pytest.approx(9.9995460213129756561, rel=1e-14)
    assert d.precond == pytest.approx(4.1938465730674937558e-44, rel=1e-12)
    assert d.total == pytest.approx(1.0, abs=1e-15)


def test_decompose_matches_grad_and_residual():
    xs = np.random.default_rng(1).normal(scale=10, size=100_000)
    for x in xs[:10_000]:
        d = A.serf_decompose(float(x))
        assert d.total == A.serf_grad(float(x))
        assert d.residual <= 1e-12
    d = A.serf_decompose(xs)
    assert np.max(np.abs(d.precond * d.swish_val + d.gate - d.total)) <= 1e-12


@given(finite)
def test_precond_range(x):
    p = A.serf_decompose(x).precond
    assert 0.0 <= p <= 2.0 / math.sqrt(math.pi)


@pytest.mark.parametrize("kind", ["serf", "swish", "mish"])
def test_self_gated_family_at_zero(kind):
    assert A.value(kind, 0.0) == 0.0
    # swish'(0) is exactly 1/2, so the band is closed
    assert A.grad(kind, 0.0) >= 0.5


def test_family_grads_at_zero():
    assert A.grad("swish", 0.0) == 0.5
    assert A.grad("mish", 0.0) == pytest.approx(math.tanh(math.log(2.0)), rel=1e-14)
    assert A.grad("gelu", 0.0) == 0.5


def test_piecewise_examples():
    assert A.grad("relu", -5.0) == 0.0 and A.grad("relu", 5.0) == 1.0
    assert A.grad("relu", 0.0) == 0.0
    assert A.second_grad("relu", 0.0) == 0.0
    assert A.value("leaky_relu:0.1", -2.0) == pytest.approx(-0.2)
    assert A.grad("leaky_relu:0.1", -2.0) == 0.1
    assert A.value("elu", -1.0) == pytest.approx(math.expm1(-1.0))
    assert A.value("selu", 1.0) == pytest.approx(A.SELU_SCALE)


def test_gelu_is_exact_erf_form():
    for x in (-3.0, -0.5, 0.7, 2.5):
        assert A.value("gelu", x) == pytest.approx(0.5 * x * (1 + math.erf(x / math.sqrt(2))), rel=1e-14)


@pytest.mark.parametrize("bad", ["leaky_relu:0", "leaky_relu:1", "leaky_relu:-0.1", "elu:0", "elu:-1"])
def test_parameter_validation_at_construction(bad):
    with pytest.raises(ValueError):
        A.get_activation(bad)


def test_unknown_kind_lists_valid_names():
    with pytest.raises(ValueError, match="valid kinds: serf"):
        A.get_activation("softsign")
    with pytest.raises(ValueError, match="takes no parameter"):
        A.get_activation("relu:2")


def test_kinds_are_hashable_and_named():
    kinds = A.all_kinds()
    assert len({str(k) for k in kinds}) == len(A.KIND_NAMES) == 11
    assert str(A.get_activation("leaky_relu:0.2")) == "leaky_relu:0.2"
    assert A.get_activation("Leaky-ReLU:0.2") == A.LeakyReLU(0.2)
    assert hash(A.ELU(0.5)) == hash(A.ELU(0.5))


@pytest.mark.parametrize("kind", A.KIND_NAMES)
def test_gradient_check(kind):
    res = check_activation(kind, samples=10_000, tol=1e-6)
    assert res.passed, res


@pytest.mark.parametrize("kind", SMOOTH + ["elu", "selu"])
def test_second_grad_matches_finite_differences(kind):
    act = A.get_activation(kind)
    xs = np.linspace(-20, 20, 2001)
    if act.kinked:
        xs = xs[np.abs(xs) > 1e-2]
    fd = richardson_second_derivative(act.value, xs, 1e-3)
    assert np.max(np.abs(act.second_grad(xs) - fd)) <= 1e-5


@pytest.mark.parametrize("kind", A.KIND_NAMES)
def test_batch_matches_scalar_loop_bitwise(kind):
    xs = np.random.default_rng(3).normal(scale=8, size=(64, 128))
    act = A.get_activation(kind)
    v, g = A.batch_value(kind, xs), A.batch_grad(kind, xs)
    assert v.shape == g.shape == xs.shape
    assert np.array_equal(v, np.vectorize(act.value, otypes=[float])(xs))
    assert np.array_equal(g, np.vectorize(act.grad, otypes=[float])(xs))


def test_batch_value_zeros():
    assert np.array_equal(A.batch_value("serf", np.zeros((3, 4))), np.zeros((3, 4)))
    assert np.array_equal(A.batch_grad("serf", np.linspace(-3, 3, 7)),
                          np.array([A.serf_grad(x) for x in np.linspace(-3, 3, 7)]))


@pytest.mark.parametrize("kind", A.KIND_NAMES)
def test_finite_on_extremes(kind):
    xs = np.array([-1e308, -800.0, -50.0, 0.0, 50.0, 800.0, 1e300])
    act = A.get_activation(kind)
    with np.errstate(over="raise", invalid="raise", divide="raise"):
        for f in (act.value, act.grad, act.second_grad):
            assert np.all(np.isfinite(f(xs)))
