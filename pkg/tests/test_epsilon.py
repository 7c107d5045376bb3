"""Two-tori sewing: domain checks, degeneration, and the determinant identity."""

import numpy as np
import pytest

from szegosew.epsilon import (EpsilonContext, EpsilonModuli,
                              GenusTwoCharacteristicsEps, SurfacePoint,
                              build_q, det_i_minus_q, epsilon_bound,
                              logdet_series, min_lattice_distance,
                              szego_genus2_eps)
from szegosew.errors import DomainError
from szegosew.numerics import determinant
from szegosew.specialfn import TorusModulus, TwistPair, p1_theta

TWO_PI_I = 2j * np.pi
T1 = TorusModulus(0.3 + 1.0j)
T2 = TorusModulus(0.1 + 1.2j)
CHARS = GenusTwoCharacteristicsEps(TwistPair(0.17, 0.38),
                                   TwistPair(0.07, -0.29))


def _moduli(scale=0.02, **kw):
    return EpsilonModuli.create(T1, T2, scale * epsilon_bound(T1, T2)
                                * np.exp(0.5j), **kw)


def _pt(which, u, v):
    tau = T1 if which == 1 else T2
    return SurfacePoint(which, TWO_PI_I * (u + v * tau.tau))


class TestDomain:
    def test_min_lattice_distance_brute_force(self):
        for tau in (T1, TorusModulus(0.5 + 0.5j)):
            grid = [abs(TWO_PI_I * (m * tau.tau + n))
                    for m in range(-50, 51) for n in range(-50, 51)
                    if (m, n) != (0, 0)]
            assert abs(min_lattice_distance(tau) - min(grid)) < 1e-12

    def test_epsilon_outside_bound_rejected(self):
        with pytest.raises(DomainError):
            _moduli(scale=1.01)

    def test_inconsistent_square_root_rejected(self):
        with pytest.raises(DomainError):
            EpsilonModuli.create(T1, T2, 0.01, sqrt_epsilon=0.2)

    def test_bad_xi_rejected(self):
        with pytest.raises(DomainError):
            _moduli(xi=1.0)

    def test_point_label_validated(self):
        with pytest.raises(DomainError):
            SurfacePoint(3, 0.1 + 0.1j)

    def test_coincident_points_rejected(self):
        ctx = EpsilonContext(CHARS, _moduli(), 8)
        x = _pt(1, 0.23, 0.31)
        with pytest.raises(DomainError):
            ctx.kernel(x, x)

    def test_point_inside_sewing_annulus_rejected(self):
        ctx = EpsilonContext(CHARS, _moduli(), 8)
        with pytest.raises(DomainError):
            ctx.kernel(SurfacePoint(1, 1e-4 + 1e-4j), _pt(1, 0.5, 0.5))


class TestDegeneration:
    def test_zero_epsilon_same_torus_is_genus_one(self):
        moduli = EpsilonModuli.create(T1, T2, 0.0)
        ctx = EpsilonContext(CHARS, moduli, 8)
        x, y = _pt(1, 0.23, 0.31), _pt(1, 0.67, 0.52)
        exact = p1_theta(CHARS.tw1, x.z - y.z, T1)
        assert abs(ctx.kernel(x, y) - exact) < 1e-14 * abs(exact)

    def test_zero_epsilon_cross_torus_vanishes(self):
        moduli = EpsilonModuli.create(T1, T2, 0.0)
        ctx = EpsilonContext(CHARS, moduli, 8)
        assert ctx.kernel(_pt(1, 0.23, 0.31), _pt(2, 0.33, 0.61)) == 0.0
        assert ctx.det() == 1.0

    def test_small_epsilon_close_to_genus_one(self):
        ctx = EpsilonContext(CHARS, _moduli(scale=1e-4), 12)
        x, y = _pt(1, 0.23, 0.31), _pt(1, 0.67, 0.52)
        exact = p1_theta(CHARS.tw1, x.z - y.z, T1)
        assert abs(ctx.kernel(x, y) - exact) < 1e-3 * abs(exact)


class TestKernel:
    def test_convenience_wrapper_matches_context(self):
        moduli = _moduli()
        x, y = _pt(1, 0.23, 0.31), _pt(2, 0.33, 0.61)
        assert szego_genus2_eps(CHARS, x, y, moduli, 12) \
            == EpsilonContext(CHARS, moduli, 12).kernel(x, y)

    def test_skew_symmetry(self):
        moduli = _moduli()
        ctx = EpsilonContext(CHARS, moduli, 12)
        inv = GenusTwoCharacteristicsEps(CHARS.tw1.inverse(),
                                         CHARS.tw2.inverse())
        ctx_inv = EpsilonContext(inv, moduli, 12)
        for x, y in [(_pt(1, 0.23, 0.31), _pt(1, 0.67, 0.52)),
                     (_pt(1, 0.41, 0.18), _pt(2, 0.33, 0.61))]:
            v1, v2 = ctx.kernel(x, y), ctx_inv.kernel(y, x)
            assert abs(v1 + v2) < 1e-11 * abs(v1)

    def test_truncation_converges(self):
        moduli = _moduli()
        x, y = _pt(1, 0.41, 0.18), _pt(2, 0.33, 0.61)
        v8 = EpsilonContext(CHARS, moduli, 8).kernel(x, y)
        v16 = EpsilonContext(CHARS, moduli, 16).kernel(x, y)
        v20 = EpsilonContext(CHARS, moduli, 20).kernel(x, y)
        assert abs(v20 - v16) < 1e-3 * abs(v16 - v8) + 1e-15


class TestDeterminant:
    def test_block_identity_small_order(self):
        ctx = EpsilonContext(CHARS, _moduli(), 10)
        f1, f2 = ctx.f_block(1), ctx.f_block(2)
        q = build_q(f1, f2, ctx.moduli.xi)
        d_big = determinant(np.eye(20, dtype=complex) - q.data)
        assert abs(d_big - det_i_minus_q(f1, f2)) < 1e-13

    def test_log_series_route_agrees(self):
        ctx = EpsilonContext(CHARS, _moduli(), 10)
        f1, f2 = ctx.f_block(1), ctx.f_block(2)
        d_lu = det_i_minus_q(f1, f2)
        d_series = np.exp(logdet_series(f1, f2))
        assert abs(d_lu - d_series) < 1e-12 * abs(d_lu)

    def test_xi_independence(self):
        # the determinant depends on F1 F2 only, not on the branch xi
        ctx_p = EpsilonContext(CHARS, _moduli(xi=1j), 10)
        ctx_m = EpsilonContext(CHARS, _moduli(xi=-1j), 10)
        assert abs(ctx_p.det() - ctx_m.det()) < 1e-15
