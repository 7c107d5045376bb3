"""Verification suites: identity, symmetry, and convergence checks.

Each suite runs a pinned desk-scale configuration of the sewing pipeline
and returns a JSON-ready report with one entry per check: name, measured
residual, tolerance, and pass flag.  The suites are shared between the
CLI ``verify`` subcommand and the acceptance tests, so the pinned
configurations below are the single source of truth for both.

Suites
------
skew          kernel skew-symmetry S[c](x,y) = -S[c^{-1}](y,x), all schemes
dehn          branch-flip invariance and sqrt-epsilon parity (eps scheme)
modular-eps   invariance under the two torus modular groups and the swap
modular-rho   invariance under the Heisenberg-type group and Gamma_1
det-identity  block-determinant identities of both schemes
integral-eq   contour integral equations and Laurent/Eisenstein extraction
degeneration  small-sewing-parameter limits and the sphere-sewing oracle
convergence   quadrature refinement, truncation decay, radius independence
"""

from __future__ import annotations

import math
import time

import numpy as np

from .config import DEFAULT_CONFIG, NumericConfig
from .epsilon import (EpsilonContext, EpsilonModuli, GenusTwoCharacteristicsEps,
                      SurfacePoint, build_q, epsilon_bound)
from .errors import DomainError
from .modular import (EpsGroupElement, RhoGroupElement, det_residual,
                      invariance_residual)
from .numerics import circle_nodes, determinant, tail_estimate
from .rho import (X_RADIUS_FACTOR, HandleTwist, RhoModuliSphere,
                  RhoModuliTorus, RhoTorusContext, det_i_minus_t_sphere,
                  sphere_moments, torus_from_sphere, torus_moments)
from .specialfn import (TorusModulus, TwistPair, eisenstein_twisted, p1_series,
                        p1_theta)

__all__ = ["SUITE_NAMES", "run_suite", "run_all"]

TWO_PI_I = 2j * np.pi

SUITE_NAMES = ("skew", "dehn", "modular-eps", "modular-rho", "det-identity",
               "integral-eq", "degeneration", "convergence")


# ----------------------------------------------------------------------
# pinned configurations
# ----------------------------------------------------------------------

def _eps_setup(n_order: int = 16, eps_scale: float = 0.02,
               cfg: NumericConfig = DEFAULT_CONFIG):
    t1, t2 = TorusModulus(0.3 + 1.0j), TorusModulus(0.1 + 1.2j)
    bound = epsilon_bound(t1, t2)
    moduli = EpsilonModuli.create(t1, t2, eps_scale * bound * np.exp(0.5j))
    chars = GenusTwoCharacteristicsEps(TwistPair(0.17, 0.38),
                                       TwistPair(0.07, -0.29))
    return chars, moduli, bound


def _eps_point(moduli: EpsilonModuli, which: int, u: float,
               v: float) -> SurfacePoint:
    tau = moduli.tau(which)
    return SurfacePoint(which, TWO_PI_I * (u + v * tau.tau))


def _eps_pairs(moduli: EpsilonModuli, count: int = 4):
    labels = ((1, 1), (1, 2), (2, 1), (2, 2))
    coords = [(0.23, 0.31, 0.67, 0.52), (0.41, 0.18, 0.33, 0.61),
              (0.72, 0.44, 0.15, 0.73), (0.58, 0.27, 0.19, 0.66),
              (0.31, 0.62, 0.77, 0.24), (0.49, 0.71, 0.26, 0.39),
              (0.64, 0.13, 0.42, 0.57), (0.17, 0.48, 0.55, 0.82),
              (0.36, 0.25, 0.81, 0.43), (0.68, 0.57, 0.29, 0.16),
              (0.22, 0.74, 0.63, 0.35), (0.53, 0.32, 0.38, 0.69),
              (0.45, 0.86, 0.71, 0.21), (0.78, 0.41, 0.24, 0.54),
              (0.34, 0.19, 0.59, 0.77), (0.61, 0.66, 0.47, 0.28)]
    out = []
    for i in range(count):
        a, b = labels[i % 4]
        u1, v1, u2, v2 = coords[i % len(coords)]
        out.append((_eps_point(moduli, a, u1, v1),
                    _eps_point(moduli, b, u2, v2)))
    return out


def _rho_torus_setup(rho_scale: float = 0.05):
    tau = TorusModulus(0.2 + 1.1j)
    w = TWO_PI_I * (0.31 + 0.27 * tau.tau)
    moduli = RhoModuliTorus.create(
        tau, w, rho_scale * (_w_dist(tau, w) / 2.0) ** 2 * np.exp(0.6j))
    tw1 = TwistPair(0.17, 0.38)
    handle = HandleTwist(0.1, -0.22)
    return tw1, handle, moduli


def _w_dist(tau: TorusModulus, w: complex) -> float:
    from .specialfn import lattice_distance
    return float(lattice_distance(w, tau))


def _rho_torus_pairs(moduli: RhoModuliTorus, count: int = 4):
    tau = moduli.tau.tau
    # deterministic low-discrepancy candidates in lattice-basis coordinates,
    # filtered against the sewing contours below
    coords = []
    for i in range(400):
        u1 = 0.05 + ((0.09 + 0.3819660112501051 * i) % 1.0) * 0.9
        v1 = 0.05 + ((0.53 + 0.6180339887498949 * i) % 1.0) * 0.9
        u2 = 0.05 + ((0.61 + 0.2548776662466927 * i) % 1.0) * 0.9
        v2 = 0.05 + ((0.12 + 0.7548776662466927 * i) % 1.0) * 0.9
        coords.append((u1, v1, u2, v2))
    from .specialfn import lattice_distance
    # generous clearance: quadrature error of the moment contours grows
    # rapidly for evaluation points near the contours themselves
    margin = X_RADIUS_FACTOR * 1.8 * max(moduli.contour_radius(1),
                                         moduli.contour_radius(2))

    def clear(z: complex) -> bool:
        return min(float(lattice_distance(z, moduli.tau)),
                   float(lattice_distance(z - moduli.w, moduli.tau))) > margin

    out = []
    for u1, v1, u2, v2 in coords:
        x = TWO_PI_I * (u1 + v1 * tau)
        y = TWO_PI_I * (u2 + v2 * tau) + moduli.w
        if clear(x) and clear(y) \
                and float(lattice_distance(x - y, moduli.tau)) > 0.4:
            out.append((x, y))
        if len(out) == count:
            return out
    raise DomainError("not enough sample points clear of the sewing contours")


def _sphere_setups():
    out = []
    for lam, th in ((0.25, -np.exp(0.3j)), (0.6, -1.0 + 0.0j)):
        for qabs in (0.05, 0.15):
            handle = HandleTwist.from_multipliers(th, np.exp(TWO_PI_I * lam))
            moduli = RhoModuliSphere.create(qabs * np.exp(0.7j))
            out.append((lam, qabs, handle, moduli))
    return out


def _sphere_log_pairs(qabs: float, count: int = 4):
    """Well-conditioned log-coordinate pairs in the sewing annulus.

    Both points sit near the middle of the fundamental annulus
    (|x| ~ |q|^{0.5}) so the moment expansion converges at the same rate
    from both punctures.
    """
    big_l = -math.log(qabs)
    coords = [(-0.55, 0.8, -0.45, 2.1), (-0.62, -1.3, -0.40, 0.4),
              (-0.50, 2.8, -0.52, -2.0), (-0.58, 0.1, -0.47, 1.2),
              (-0.44, 1.7, -0.57, -0.6), (-0.53, -2.4, -0.43, 2.9),
              (-0.60, 0.9, -0.49, -1.8), (-0.46, -0.2, -0.56, 1.5),
              (-0.51, 2.2, -0.41, -2.7), (-0.59, -1.0, -0.48, 0.7),
              (-0.42, 0.3, -0.54, -1.4), (-0.56, 1.9, -0.44, 2.5),
              (-0.48, -2.9, -0.58, -0.3), (-0.52, 1.1, -0.42, -2.2),
              (-0.45, -0.7, -0.61, 1.8), (-0.57, 2.6, -0.46, -1.1)]
    out = []
    for i in range(count):
        sx, tx, sy, ty = coords[i % len(coords)]
        out.append((sx * big_l + 1j * tx, sy * big_l + 1j * ty))
    return out


def _check(name: str, residual: float, tolerance: float, **extra) -> dict:
    entry = {"name": name, "residual": float(residual),
             "tolerance": float(tolerance),
             "passed": bool(residual < tolerance)}
    entry.update(extra)
    return entry


def _slope_check(name: str, xs, ys, minimum: float) -> dict:
    slope = float(np.polyfit(np.log(xs), np.log(ys), 1)[0])
    return {"name": name, "slope": slope, "minimum": float(minimum),
            "passed": bool(slope >= minimum)}


# ----------------------------------------------------------------------
# suites
# ----------------------------------------------------------------------

def suite_skew(n_order: int | None = None, m_points: int | None = None,
               cfg: NumericConfig = DEFAULT_CONFIG) -> list[dict]:
    tol = 1e-10
    checks = []

    chars, moduli, _ = _eps_setup(cfg=cfg)
    chars_inv = GenusTwoCharacteristicsEps(chars.tw1.inverse(),
                                           chars.tw2.inverse())
    ctx = EpsilonContext(chars, moduli, n_order or 16, cfg)
    ctx_inv = EpsilonContext(chars_inv, moduli, n_order or 16, cfg)
    worst = 0.0
    for x, y in _eps_pairs(moduli, 16):
        v1 = ctx.kernel(x, y)
        v2 = ctx_inv.kernel(y, x)
        worst = max(worst, abs(v1 + v2) / abs(v1))
    checks.append(_check("two-tori kernel skew-symmetry", worst, tol))

    setups = _sphere_setups()
    lam, qabs, handle, smod = setups[0]
    hinv = HandleTwist.from_multipliers(1.0 / handle.theta, 1.0 / handle.phi)
    worst = 0.0
    for lx, ly in _sphere_log_pairs(qabs, 16):
        v1 = torus_from_sphere(handle, np.exp(lx), np.exp(ly), smod, 24,
                               log_x=lx, log_y=ly, cfg=cfg)
        v2 = torus_from_sphere(hinv, np.exp(ly), np.exp(lx), smod, 24,
                               log_x=ly, log_y=lx, cfg=cfg)
        worst = max(worst, abs(v1 + v2) / abs(v1))
    checks.append(_check("self-sewn sphere kernel skew-symmetry", worst, tol))

    tw1, hndl, tmod = _rho_torus_setup()
    hinv = HandleTwist(-hndl.alpha, -hndl.beta)
    ctx = RhoTorusContext(tw1, hndl, tmod, n_order or 12, m_points or 64,
                          cfg=cfg)
    ctx_inv = RhoTorusContext(tw1.inverse(), hinv, tmod, n_order or 12,
                              m_points or 64, cfg=cfg)
    worst = 0.0
    for x, y in _rho_torus_pairs(tmod, 16):
        v1 = ctx.kernel(x, y)
        v2 = ctx_inv.kernel(y, x)
        worst = max(worst, abs(v1 + v2) / abs(v1))
    checks.append(_check("self-sewn torus kernel skew-symmetry", worst, tol))
    return checks


def suite_dehn(n_order: int | None = None, m_points: int | None = None,
               cfg: NumericConfig = DEFAULT_CONFIG) -> list[dict]:
    n = n_order or 16
    chars, moduli, _ = _eps_setup(cfg=cfg)
    flip_sqrt = EpsilonModuli.create(
        moduli.tau(1), moduli.tau(2), moduli.epsilon, xi=moduli.xi,
        sqrt_epsilon=-moduli.sqrt_epsilon)
    flip_joint = EpsilonModuli.create(
        moduli.tau(1), moduli.tau(2), moduli.epsilon, xi=-moduli.xi,
        sqrt_epsilon=-moduli.sqrt_epsilon)
    ctx = EpsilonContext(chars, moduli, n, cfg)
    ctx_sqrt = EpsilonContext(chars, flip_sqrt, n, cfg)
    ctx_joint = EpsilonContext(chars, flip_joint, n, cfg)
    w_joint = w_even = w_odd = 0.0
    for x, y in _eps_pairs(moduli, 8):
        v = ctx.kernel(x, y)
        w_joint = max(w_joint, abs(ctx_joint.kernel(x, y) - v) / abs(v))
        vs = ctx_sqrt.kernel(x, y)
        if x.which == y.which:
            w_even = max(w_even, abs(vs - v) / abs(v))
        else:
            w_odd = max(w_odd, abs(vs + v) / abs(v))
    return [
        _check("joint root-and-branch flip leaves kernel invariant",
               w_joint, 1e-13),
        _check("same-torus values even in the epsilon square root",
               w_even, 1e-13),
        _check("cross-torus values odd in the epsilon square root",
               w_odd, 1e-13),
    ]


_EPS_GENERATORS = (
    ("gamma1-T", EpsGroupElement.gamma1(1, 1, 0, 1)),
    ("gamma1-S", EpsGroupElement.gamma1(0, -1, 1, 0)),
    ("gamma2-T", EpsGroupElement.gamma2(1, 1, 0, 1)),
    ("gamma2-S", EpsGroupElement.gamma2(0, -1, 1, 0)),
    ("swap", EpsGroupElement.beta_swap()),
)

_RHO_GENERATORS = (
    ("A", RhoGroupElement.a_shift(1)),
    ("B", RhoGroupElement.b_shift(1)),
    ("C", RhoGroupElement.c_power(1)),
    ("gamma1-T", RhoGroupElement.gamma1(1, 1, 0, 1)),
)


def suite_modular_eps(n_order: int | None = None,
                      m_points: int | None = None,
                      cfg: NumericConfig = DEFAULT_CONFIG) -> list[dict]:
    n = n_order or 16
    chars, moduli, _ = _eps_setup(cfg=cfg)
    pairs = _eps_pairs(moduli, 4)
    checks = []
    for name, g in _EPS_GENERATORS:
        r = invariance_residual("eps", g, chars, moduli, pairs,
                                n_order=n, cfg=cfg)
        checks.append(_check(f"two-tori kernel invariance under {name}",
                             r, 1e-8))
        d = det_residual("eps", g, chars, moduli, n_order=n, cfg=cfg)
        checks.append(_check(f"two-tori determinant invariance under {name}",
                             d, 1e-9))
    return checks


def suite_modular_rho(n_order: int | None = None,
                      m_points: int | None = None,
                      cfg: NumericConfig = DEFAULT_CONFIG) -> list[dict]:
    n = n_order or 12
    m = m_points or 64
    tw1, handle, moduli = _rho_torus_setup()
    pairs = _rho_torus_pairs(moduli, 2)
    checks = []
    for name, g in _RHO_GENERATORS:
        r = invariance_residual("rho", g, (tw1, handle), moduli, pairs,
                                n_order=n, m_points=m, cfg=cfg)
        checks.append(_check(f"self-sewn torus kernel invariance under {name}",
                             r, 1e-7))
        d = det_residual("rho", g, (tw1, handle), moduli,
                         n_order=n, m_points=m, cfg=cfg)
        checks.append(_check(
            f"self-sewn torus determinant invariance under {name}", d, 1e-7))
    return checks


def suite_det_identity(n_order: int | None = None,
                       m_points: int | None = None,
                       cfg: NumericConfig = DEFAULT_CONFIG) -> list[dict]:
    n = n_order or 32
    checks = []

    chars, moduli, _ = _eps_setup(cfg=cfg)
    ctx = EpsilonContext(chars, moduli, n, cfg)
    f1, f2 = ctx.f_block(1), ctx.f_block(2)
    q = build_q(f1, f2, moduli.xi)
    d_small = ctx.det()
    d_big = determinant(np.eye(2 * n, dtype=complex) - q.data)
    checks.append(_check(
        "block determinant equals half-size determinant (two tori)",
        abs(d_big - d_small), 1e-12, value=[d_small.real, d_small.imag]))

    t0 = time.time()
    worst = 0.0
    for lam, qabs, handle, smod in _sphere_setups():
        mom = sphere_moments(handle, n, smod, cfg)
        d_prod = det_i_minus_t_sphere(handle, n, smod)
        d_mat = determinant(np.eye(2 * n, dtype=complex) - mom.t.data)
        worst = max(worst, abs(d_prod - d_mat))
    checks.append(_check(
        "sphere determinant matches truncated product form", worst, 1e-12,
        seconds=time.time() - t0))
    return checks


def suite_integral_eq(n_order: int | None = None,
                      m_points: int | None = None,
                      cfg: NumericConfig = DEFAULT_CONFIG) -> list[dict]:
    tol = 1e-7
    quad = 128
    checks = []

    # two-tori scheme: S2(x,y) = delta_ab S1_a(x,y)
    #   + (1/2pi i) oint_{C_a} S1_a(x,z) S2(z,y) dz
    chars, moduli, _ = _eps_setup(cfg=cfg)
    ctx = EpsilonContext(chars, moduli, n_order or 16, cfg)
    worst = 0.0
    for x, y in _eps_pairs(moduli, 4):
        a = x.which
        tau_a = moduli.tau(a)
        tw_a = chars.tw1 if a == 1 else chars.tw2
        z, wq = circle_nodes(0.0, 0.6 * moduli.radius(a), quad)
        s1 = np.array([p1_theta(tw_a, x.z - zz, tau_a, cfg) for zz in z])
        s2 = np.array([ctx.kernel(SurfacePoint(a, zz), y) for zz in z])
        base = p1_theta(tw_a, x.z - y.z, tau_a, cfg) if y.which == a else 0.0
        v = ctx.kernel(x, y)
        worst = max(worst, abs(base + np.sum(wq * s1 * s2) - v) / abs(v))
    checks.append(_check("two-tori contour integral equation", worst, tol))

    # self-sewn torus scheme: S2(x,y) = S_kappa(x,y)
    #   + sum_a (1/2pi i) oint_{C_a} S_kappa(x,z) S2(z,y) dz
    from .rho import _circle_log_a, _s_kappa_torus_grid, log_a_torus, \
        s_kappa_torus
    tw1, handle, tmod = _rho_torus_setup()
    rctx = RhoTorusContext(tw1, handle, tmod, n_order or 12, m_points or 64,
                           cfg=cfg)
    worst = 0.0
    for x, y in _rho_torus_pairs(tmod, 4):
        la_x = log_a_torus(x, tmod.tau, tmod.w, cfg, tmod.z_ref,
                           tmod.log_a_ref)
        total = 0.0 + 0.0j
        for a in (1, 2):
            # the contour must separate the sewing annulus from the
            # evaluation points, which are cleared to 1.8x the moment
            # contour radius by the pair filter
            rint = X_RADIUS_FACTOR * 1.5 * tmod.contour_radius(a)
            pts, _, log_a = _circle_log_a(
                tmod.center(a), rint, quad, tmod.tau, tmod.w,
                cfg, tmod.z_ref, tmod.log_a_ref)
            wts = (pts[:quad] - tmod.center(a)) / quad
            row = _s_kappa_torus_grid(tw1, handle.kappa, [x], [la_x],
                                      pts[:quad], log_a[:quad], tmod.tau,
                                      tmod.w, cfg)[0]
            col = np.array([rctx.kernel(z, y, log_a_x=la)
                            for z, la in zip(pts[:quad], log_a[:quad])])
            total += np.sum(wts * row * col)
        base = s_kappa_torus(tw1, handle, x, y, tmod, cfg, log_a_x=la_x)
        v = rctx.kernel(x, y, log_a_x=la_x)
        worst = max(worst, abs(base + total - v) / abs(v))
    checks.append(_check("self-sewn torus contour integral equation",
                         worst, tol))

    # Laurent extraction: coefficients of P1 - 1/z match minus the
    # twisted Eisenstein series; odd untwisted series vanish
    tau = TorusModulus(0.3 + 1.0j)
    tw = TwistPair(0.17, 0.38)
    z, wq = circle_nodes(0.0, 0.3, 256)
    vals = np.array([p1_theta(tw, zz, tau, cfg) for zz in z]) - 1.0 / z
    worst = 0.0
    for m in range(1, 7):
        coeff = np.sum(wq * vals * z ** (-m))
        worst = max(worst, abs(coeff + eisenstein_twisted(tw, m, tau, cfg)))
    checks.append(_check(
        "genus-one kernel Laurent coefficients match Eisenstein series",
        worst, 1e-8))
    tw_unit = TwistPair(0.5, 0.5)
    worst = max(abs(eisenstein_twisted(tw_unit, 3, tau, cfg)),
                abs(eisenstein_twisted(tw_unit, 5, tau, cfg)))
    checks.append(_check("odd untwisted Eisenstein series vanish",
                         worst, 1e-12))
    return checks


def suite_degeneration(n_order: int | None = None,
                       m_points: int | None = None,
                       cfg: NumericConfig = DEFAULT_CONFIG) -> list[dict]:
    n = n_order or 16
    checks = []

    chars, _, bound = _eps_setup(cfg=cfg)
    t1 = TorusModulus(0.3 + 1.0j)
    scales = np.array([1e-2, 1e-3, 1e-4])
    d_same, d_cross = [], []
    for s in scales:
        moduli = EpsilonModuli.create(t1, TorusModulus(0.1 + 1.2j),
                                      s * bound * np.exp(0.5j))
        ctx = EpsilonContext(chars, moduli, n, cfg)
        xs, ys = _eps_point(moduli, 1, 0.23, 0.31), \
            _eps_point(moduli, 1, 0.67, 0.52)
        xc, yc = _eps_point(moduli, 1, 0.41, 0.18), \
            _eps_point(moduli, 2, 0.33, 0.61)
        d_same.append(abs(ctx.kernel(xs, ys)
                          - p1_theta(chars.tw1, xs.z - ys.z, t1, cfg)))
        d_cross.append(abs(ctx.kernel(xc, yc)))
    checks.append(_slope_check(
        "same-torus deviation vanishes linearly in the sewing parameter",
        scales, d_same, 0.95))
    checks.append(_slope_check(
        "cross-torus values vanish as the square root of the sewing parameter",
        scales, d_cross, 0.45))

    t0 = time.time()
    worst = 0.0
    for lam, qabs, handle, smod in _sphere_setups():
        for lx, ly in _sphere_log_pairs(qabs, 4):
            val = torus_from_sphere(handle, np.exp(lx), np.exp(ly), smod, 24,
                                    log_x=lx, log_y=ly, cfg=cfg)
            conv = val * np.exp(0.5 * (lx + ly))
            oracle = p1_series(handle, lx - ly, smod.tau, cfg)
            worst = max(worst, abs(conv - oracle) / abs(oracle))
    checks.append(_check(
        "sphere-sewn torus kernel matches the exact genus-one kernel",
        worst, 1e-9, seconds=time.time() - t0))
    return checks


def suite_convergence(n_order: int | None = None,
                      m_points: int | None = None,
                      cfg: NumericConfig = DEFAULT_CONFIG) -> list[dict]:
    checks = []
    tw1, handle, tmod = _rho_torus_setup()
    x, y = _rho_torus_pairs(tmod, 1)[0]

    v64 = RhoTorusContext(tw1, handle, tmod, 12, 64, cfg=cfg).kernel(x, y)
    v128 = RhoTorusContext(tw1, handle, tmod, 12, 128, cfg=cfg).kernel(x, y)
    checks.append(_check(
        "quadrature refinement M to 2M leaves the kernel unchanged",
        abs(v64 - v128) / abs(v64), 1e-9))

    vals = [RhoTorusContext(tw1, handle, tmod, n, 64, cfg=cfg).kernel(x, y)
            for n in (4, 8, 12, 16)]
    rate, _ = tail_estimate(vals)
    checks.append({"name": "self-sewn torus truncation tail is geometric",
                   "rate": float(rate), "maximum": 0.7,
                   "passed": bool(rate < 0.7)})

    chars, moduli, _ = _eps_setup(cfg=cfg)
    xe, ye = _eps_pairs(moduli, 2)[1]
    vals = [EpsilonContext(chars, moduli, n, cfg).kernel(xe, ye)
            for n in (4, 8, 12, 16)]
    rate, _ = tail_estimate(vals)
    checks.append({"name": "two-tori truncation tail is geometric",
                   "rate": float(rate), "maximum": 0.7,
                   "passed": bool(rate < 0.7)})

    base = torus_moments(tw1, handle, 8, tmod, 64, cfg=cfg)
    worst = 0.0
    for scale in (0.8, 1.2):
        mom = torus_moments(tw1, handle, 8, tmod, 64, radius_scale=scale,
                            cfg=cfg)
        worst = max(worst, float(np.max(np.abs(mom.g.data - base.g.data))))
        hx = base.h_vector(x)
        worst = max(worst, float(np.max(np.abs(mom.h_vector(x) - hx))))
    checks.append(_check(
        "moment contours are radius-independent within the annuli",
        worst, 1e-9))
    return checks


_SUITES = {
    "skew": suite_skew,
    "dehn": suite_dehn,
    "modular-eps": suite_modular_eps,
    "modular-rho": suite_modular_rho,
    "det-identity": suite_det_identity,
    "integral-eq": suite_integral_eq,
    "degeneration": suite_degeneration,
    "convergence": suite_convergence,
}


def run_suite(name: str, n_order: int | None = None,
              m_points: int | None = None,
              cfg: NumericConfig = DEFAULT_CONFIG) -> dict:
    """Run one verification suite; returns a JSON-ready report."""
    if name not in _SUITES:
        raise DomainError(
            f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    t0 = time.time()
    checks = _SUITES[name](n_order=n_order, m_points=m_points, cfg=cfg)
    return {"suite": name, "passed": all(c["passed"] for c in checks),
            "seconds": time.time() - t0, "checks": checks}


def run_all(n_order: int | None = None, m_points: int | None = None,
            cfg: NumericConfig = DEFAULT_CONFIG) -> dict:
    """Run every verification suite."""
    reports = [run_suite(s, n_order, m_points, cfg) for s in SUITE_NAMES]
    return {"passed": all(r["passed"] for r in reports), "suites": reports}
