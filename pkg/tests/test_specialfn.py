"""Theta functions, twisted kernels and Eisenstein series.

Oracles: the Jacobi triple product for theta_1, hand-derived
quasi-periodicity factors, and the independent q-series route for the
twisted genus-one kernel.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from szegosew.errors import DomainError, ResonanceError
from szegosew.specialfn import (Characteristics, K, TorusModulus, TwistPair,
                                bernoulli_poly, eisenstein_twisted,
                                lattice_distance, lattice_reduce, p1_series,
                                p1_theta, theta1, theta_char)

TAU = TorusModulus(0.3 + 1.0j)
TWO_PI_I = 2j * np.pi


def _theta1_triple_product(z: complex, tau: complex) -> complex:
    """Jacobi triple product route: an independent oracle for theta_1.

    With nome qt = e^{i pi tau} and v = z / (2i):
    theta_1 = -2 qt^{1/4} sin(v) prod (1-qt^{2n})(1-qt^{2n}e^{2iv})(1-qt^{2n}e^{-2iv})
    with the sign fixed by the series convention theta[1/2;1/2](z) =
    sum_m exp(i pi tau (m+1/2)^2 + (m+1/2)(z + i pi)).
    """
    qt = np.exp(1j * np.pi * tau)
    v = z / 2j
    prod = 1.0 + 0.0j
    for n in range(1, 64):
        q2n = qt ** (2 * n)
        prod *= (1 - q2n) * (1 - q2n * np.exp(2j * v)) \
            * (1 - q2n * np.exp(-2j * v))
    return -2.0 * qt ** 0.25 * np.sin(v) * prod


class TestTheta1:
    def test_triple_product_oracle(self):
        for u, v in [(0.23, 0.31), (0.67, -0.52), (-0.41, 0.18)]:
            z = TWO_PI_I * (u + v * TAU.tau)
            direct = theta1(z, TAU)
            oracle = _theta1_triple_product(z, TAU.tau)
            assert abs(direct - oracle) < 1e-12 * abs(oracle)

    @given(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9))
    @settings(max_examples=30, deadline=None)
    def test_odd(self, u, v):
        z = TWO_PI_I * (u + v * TAU.tau)
        assert abs(theta1(z, TAU) + theta1(-z, TAU)) \
            < 1e-12 * max(abs(theta1(z, TAU)), 1e-3)

    def test_quasi_periodicity(self):
        # theta_1(z + 2 pi i (r tau + s)) = (-1)^{r+s} e^{-i pi r^2 tau - r z}
        #   * theta_1(z)   (from completing the square in the series)
        z = TWO_PI_I * (0.23 + 0.31 * TAU.tau)
        base = theta1(z, TAU)
        for r in range(-2, 3):
            for s in range(-2, 3):
                shifted = theta1(z + TWO_PI_I * (r * TAU.tau + s), TAU)
                factor = (-1) ** (r + s) \
                    * np.exp(-1j * np.pi * r * r * TAU.tau - r * z)
                scale = max(abs(shifted), abs(base))
                assert abs(shifted - factor * base) < 1e-10 * scale, (r, s)

    def test_genus_one_theta_char_consistent(self):
        z = TWO_PI_I * (0.23 + 0.31 * TAU.tau)
        chars = Characteristics(alpha=(0.5,), beta=(0.5,))
        assert abs(theta_char(chars, z, TAU) - theta1(z, TAU)) \
            < 1e-12 * abs(theta1(z, TAU))

    def test_theta_char_rejects_genus_mismatch(self):
        chars = Characteristics(alpha=(0.5, 0.5), beta=(0.5, 0.5))
        with pytest.raises(DomainError):
            theta_char(chars, 0.1 + 0.1j, TAU)


class TestPrimeFormFactor:
    def test_normalized_at_origin(self):
        for z in (1e-4 + 2e-4j, -3e-5 + 1e-5j):
            assert abs(K(z, TAU) / z - 1.0) < 1e-6

    def test_odd(self):
        z = TWO_PI_I * (0.23 + 0.31 * TAU.tau)
        assert abs(K(z, TAU) + K(-z, TAU)) < 1e-12 * abs(K(z, TAU))


class TestLattice:
    def test_lattice_distance_brute_force(self):
        for tau in (TAU, TorusModulus(0.5 + 0.5j)):
            z = TWO_PI_I * (0.37 + 0.61 * tau.tau)
            grid = [abs(z - TWO_PI_I * (m * tau.tau + n))
                    for m in range(-50, 51) for n in range(-50, 51)]
            assert abs(float(lattice_distance(z, tau)) - min(grid)) < 1e-12

    def test_lattice_reduce_inverts(self):
        z = TWO_PI_I * (5.37 - 3.61 * TAU.tau)
        z_red, m, n = lattice_reduce(z, TAU)
        assert abs(z_red + TWO_PI_I * (m * TAU.tau + n) - z) < 1e-12
        assert -2 * np.pi * TAU.tau.imag < z_red.real <= 0


class TestTwistedKernel:
    @given(st.floats(0.02, 0.98), st.floats(0.02, 0.98),
           st.floats(-0.45, 0.45), st.floats(-0.45, 0.45))
    @settings(max_examples=40, deadline=None)
    def test_dual_routes_agree(self, u, v, alpha, beta):
        tw = TwistPair(alpha + 0.02, beta + 0.02)
        z = TWO_PI_I * (u + v * TAU.tau)
        if float(lattice_distance(z, TAU)) < 0.05:
            return
        a = p1_theta(tw, z, TAU)
        b = p1_series(tw, z, TAU)
        assert abs(a - b) < 1e-10 * max(abs(a), 1.0)

    def test_multiplier_quasi_periodicity(self):
        tw = TwistPair(0.17, 0.38)
        z = TWO_PI_I * (0.23 + 0.31 * TAU.tau)
        base = p1_theta(tw, z, TAU)
        for r in range(-2, 3):
            for s in range(-2, 3):
                shifted = p1_theta(tw, z + TWO_PI_I * (r * TAU.tau + s), TAU)
                factor = tw.theta ** r * tw.phi ** s
                assert abs(shifted - factor * base) < 1e-10 * abs(base), (r, s)

    def test_simple_pole_with_unit_residue(self):
        tw = TwistPair(0.17, 0.38)
        for z in (1e-4 + 2e-4j, -2e-4 - 1e-4j):
            assert abs(z * p1_theta(tw, z, TAU) - 1.0) < 1e-3

    def test_trivial_twists_rejected(self):
        with pytest.raises(ResonanceError):
            p1_series(TwistPair(0.5, 0.5), 0.1 + 0.1j, TAU)

    def test_multipliers_roundtrip(self):
        tw = TwistPair(0.17, 0.38)
        back = TwistPair.from_multipliers(tw.theta, tw.phi)
        assert abs(back.alpha - tw.alpha) < 1e-12
        assert abs(back.beta - tw.beta) < 1e-12
        with pytest.raises(DomainError):
            TwistPair.from_multipliers(0.5, 1.0)


class TestEisenstein:
    def test_bernoulli_polynomials(self):
        lam = 0.37
        assert abs(bernoulli_poly(1, lam) - (lam - 0.5)) < 1e-14
        assert abs(bernoulli_poly(2, lam) - (lam**2 - lam + 1.0 / 6.0)) < 1e-14
        assert abs(bernoulli_poly(3, lam)
                   - (lam**3 - 1.5 * lam**2 + 0.5 * lam)) < 1e-14

    def test_laurent_coefficients_of_kernel(self):
        # P1(z) - 1/z = - sum_n E_n z^{n-1}: extract by contour moments
        tw = TwistPair(0.17, 0.38)
        m = 256
        phi = 2.0 * np.pi * np.arange(m) / m
        z = 0.3 * np.exp(1j * phi)
        vals = np.array([p1_theta(tw, zz, TAU) for zz in z]) - 1.0 / z
        for n in range(1, 5):
            coeff = np.sum(z / m * vals * z ** (-n))
            en = eisenstein_twisted(tw, n, TAU)
            assert abs(coeff + en) < 1e-9, n

    def test_odd_untwisted_vanish(self):
        tw = TwistPair(0.5, 0.5)  # multipliers (1, 1)
        assert abs(eisenstein_twisted(tw, 3, TAU)) < 1e-12
        assert abs(eisenstein_twisted(tw, 5, TAU)) < 1e-12

    def test_rejects_bad_order(self):
        with pytest.raises(DomainError):
            eisenstein_twisted(TwistPair(0.17, 0.38), 0, TAU)


def test_torus_modulus_requires_upper_half_plane():
    with pytest.raises(DomainError):
        TorusModulus(0.3 - 1.0j)
    assert math.isclose(abs(TAU.q), math.exp(-2.0 * math.pi))
