import numpy as np
import pytest
from hypothesis import given

from hinfb import taylor
from hinfb.blaschke import BlaschkeProduct
from hinfb.constrained import ConstrainedFunction

from .strategies import disk_points, seeds


def random_function(rng, B, value_shape=()):
    lam = rng.normal(size=value_shape) + 1j * rng.normal(size=value_shape)
    H = rng.normal(size=(2, 3) + value_shape) + 1j * rng.normal(size=(2, 3) + value_shape)
    return ConstrainedFunction(B, lam, H)


B_MIXED = BlaschkeProduct(((0.2 + 0.3j, 2), (-0.4 + 0j, 1), (0j, 3)))


class TestTaylor:
    def test_reciprocal(self):
        a = np.array([2.0, 1.0, 0.5, 0.0])
        assert np.allclose(taylor.mul(a, taylor.reciprocal(a)), [1, 0, 0, 0])

    def test_power_matches_repeated_mul(self):
        a = np.array([0.3, 1.0, -0.2])
        assert np.allclose(taylor.power(a, 5), taylor.mul(a, taylor.mul(a, taylor.mul(a, taylor.mul(a, a)))))

    def test_polyval_jet(self):
        # p(z) = 1 + 2z + 3z^2 at z0 = 0.5: value 2.75, p' = 5, p''/2 = 3
        jet = taylor.polyval(np.array([1, 2, 3]), taylor.variable(0.5, 2))
        assert np.allclose(jet, [2.75, 5, 3])


class TestMembership:
    @given(seeds)
    def test_equal_values_and_vanishing_derivatives(self, seed):
        rng = np.random.default_rng(seed)
        f = random_function(rng, B_MIXED)
        for alpha, mult in B_MIXED.zeros:
            jet = f.jet(alpha, mult - 1)
            assert abs(jet[0] - f.lam) < 1e-12 * max(1, abs(f.lam))
            assert np.all(np.abs(jet[1:]) < 1e-11)

    def test_products_stay_members(self, rng):
        f, g = random_function(rng, B_MIXED), random_function(rng, B_MIXED)
        h = f * g
        z = disk_points(rng, 5)
        assert np.allclose(h(z), f(z) * g(z), atol=1e-12)
        for alpha, mult in B_MIXED.zeros:
            assert np.all(np.abs(h.jet(alpha, mult - 1)[1:]) < 1e-10)

    def test_derivative_against_finite_difference(self, rng):
        f = random_function(rng, B_MIXED)
        z0, h = 0.1 - 0.2j, 1e-6
        fd = (f(z0 + h) - f(z0 - h)) / (2 * h)
        assert abs(f.derivative(z0, 1) - fd) < 1e-6 * max(1, abs(fd))

    def test_matrix_valued(self, rng):
        f = random_function(rng, B_MIXED, (2, 2))
        z = disk_points(rng, 3)
        vals = f(z)
        assert vals.shape == (3, 2, 2)
        for alpha, _ in B_MIXED.zeros:
            assert np.allclose(f(alpha), f.lam)

    def test_constant_matrix_scaling(self, rng):
        f = random_function(rng, B_MIXED)
        W = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        g = W * f
        z = disk_points(rng, 4)
        assert np.allclose(g(z), f(z)[:, None, None] * W)

    def test_arithmetic(self, rng):
        f, g = random_function(rng, B_MIXED), random_function(rng, B_MIXED)
        z = disk_points(rng, 4)
        assert np.allclose((f - g)(z), f(z) - g(z))
        assert np.allclose((2.5 + f)(z), 2.5 + f(z))
        assert np.allclose((-f)(z), -f(z))

    def test_matrix_products_rejected(self, rng):
        f = random_function(rng, B_MIXED, (2, 2))
        with pytest.raises(ValueError):
            f * f
