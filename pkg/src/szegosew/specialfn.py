"""Theta functions, twisted Weierstrass functions and Eisenstein series.

Conventions (fixed everywhere in this package, normative for all tests):

* the torus lattice is ``Lambda = 2 pi i (Z tau + Z)`` and theta arguments
  carry the matching scaling,

      theta[alpha; beta](z | Omega)
        = sum_m exp( i pi (m+alpha).Omega.(m+alpha) + (m+alpha).(z + 2 pi i beta) )

  over integer vectors m, with real characteristic vectors alpha, beta;
* ``theta_1 = theta[1/2; 1/2]`` and ``K(z,tau) = theta_1(z,tau)/theta_1'(0,tau)``
  with ``K(z)/z -> 1`` as ``z -> 0``;
* cycle multipliers ``theta = -exp(-2 pi i beta)``, ``phi = -exp(2 pi i alpha)``;
  ``lam in [0,1)`` with ``phi = exp(2 pi i lam)`` and ``kappa = lam - 1/2``
  in ``[-1/2, 1/2)`` so ``phi = -exp(2 pi i kappa)``;
* the twisted Weierstrass function has the two equivalent forms

      P1[theta; phi](z, tau)
        = theta[alpha; beta](z,tau) / theta[alpha; beta](0,tau) / K(z,tau)
        = - sum_{k in Z} q_z^{k+lam} / (1 - theta^{-1} q^{k+lam}),

  with ``q = e^{2 pi i tau}``, ``q_z = e^z``, the series converging on the
  annulus ``|q| < |e^z| < 1``, and lattice shifts acting by
  ``P1(z + 2 pi i (m tau + n)) = theta^m phi^n P1(z)``;
* ``P_k = (-1)^{k-1}/(k-1)! d^{k-1}_z P1`` so that ``z^k P_k(z) -> 1``;
* the Laurent expansion ``P1(z) = 1/z - sum_{n>=1} E_n z^{n-1}`` defines the
  twisted Eisenstein series, evaluated directly from their q-series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.special

from .config import DEFAULT_CONFIG, NumericConfig
from .errors import ConvergenceError, DomainError, ResonanceError

TWO_PI = 2.0 * np.pi
THETA_BOX_CAP = 64

__all__ = [
    "TorusModulus", "PeriodMatrix", "Characteristics", "TwistPair",
    "theta_char", "theta1", "theta1_deriv0", "K",
    "lattice_reduce", "lattice_distance",
    "p1_theta", "p1_series", "p_k", "p_k_vector",
    "eisenstein_twisted", "bernoulli_poly",
]


# ----------------------------------------------------------------------
# domain types
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class TorusModulus:
    """A point tau of the upper half-plane with derived nome q = e^{2 pi i tau}."""

    tau: complex

    def __post_init__(self) -> None:
        t = complex(self.tau)
        if not np.isfinite(t.real) or not np.isfinite(t.imag):
            raise DomainError("tau must be finite")
        if t.imag <= 0:
            raise DomainError(f"Im(tau) must be positive, got {t.imag}")
        object.__setattr__(self, "tau", t)

    @property
    def q(self) -> complex:
        return np.exp(2j * np.pi * self.tau)


@dataclass(frozen=True)
class PeriodMatrix:
    """Symmetric g x g period matrix with positive-definite imaginary part."""

    omega: np.ndarray

    def __post_init__(self) -> None:
        om = np.atleast_2d(np.asarray(self.omega, dtype=complex))
        if om.shape[0] != om.shape[1]:
            raise DomainError("period matrix must be square")
        if not np.all(np.isfinite(om)):
            raise DomainError("period matrix must be finite")
        om = 0.5 * (om + om.T)  # enforce exact symmetry
        try:
            np.linalg.cholesky(om.imag)
        except np.linalg.LinAlgError as exc:
            raise DomainError("Im(omega) must be positive definite") from exc
        object.__setattr__(self, "omega", om)

    @classmethod
    def from_tau(cls, tau) -> "PeriodMatrix":
        t = tau.tau if isinstance(tau, TorusModulus) else complex(tau)
        return cls(np.array([[t]], dtype=complex))

    @property
    def genus(self) -> int:
        return self.omega.shape[0]


def _reduce_mod1(values) -> tuple:
    out = tuple(float(v) % 1.0 for v in np.atleast_1d(np.asarray(values, dtype=float)))
    if not all(math.isfinite(v) for v in out):
        raise DomainError("characteristics must be finite reals")
    return out


@dataclass(frozen=True)
class Characteristics:
    """Real theta characteristics (alpha, beta), stored reduced mod 1.

    Reduction changes theta[alpha;beta] only by the unit factor
    e^{2 pi i alpha.s} of the characteristic periodicity law; the cycle
    multipliers are unchanged.
    """

    alpha: tuple
    beta: tuple

    def __post_init__(self) -> None:
        a = _reduce_mod1(self.alpha)
        b = _reduce_mod1(self.beta)
        if len(a) != len(b):
            raise DomainError("alpha and beta must have equal length")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def genus(self) -> int:
        return len(self.alpha)


@dataclass(frozen=True)
class TwistPair:
    """Genus-one twist data: characteristics plus derived multipliers.

    ``theta = -e^{-2 pi i beta}`` and ``phi = -e^{2 pi i alpha}`` are the
    multipliers around the two torus cycles; ``lam`` and ``kappa`` are the
    additive exponents used by the q-series and the self-sewing scheme.
    """

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        a, = _reduce_mod1([self.alpha])
        b, = _reduce_mod1([self.beta])
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @classmethod
    def from_multipliers(cls, theta: complex, phi: complex,
                         tol: float = 1e-9) -> "TwistPair":
        theta = complex(theta)
        phi = complex(phi)
        if abs(abs(theta) - 1.0) > tol:
            raise DomainError(f"theta must be unit modulus, |theta|={abs(theta)}")
        if abs(abs(phi) - 1.0) > tol:
            raise DomainError(f"phi must be unit modulus, |phi|={abs(phi)}")
        alpha = np.angle(-phi) / TWO_PI
        beta = -np.angle(-theta) / TWO_PI
        return cls(alpha=alpha, beta=beta)

    @property
    def theta(self) -> complex:
        return -np.exp(-2j * np.pi * self.beta)

    @property
    def phi(self) -> complex:
        return -np.exp(2j * np.pi * self.alpha)

    @property
    def lam(self) -> float:
        """Exponent lam in [0,1) with phi = e^{2 pi i lam}."""
        return (self.alpha + 0.5) % 1.0

    @property
    def kappa(self) -> float:
        """Exponent kappa in [-1/2,1/2) with phi = -e^{2 pi i kappa}."""
        return self.lam - 0.5

    @property
    def is_trivial(self) -> bool:
        """True when (theta, phi) = (1, 1), the untwisted point."""
        return abs(self.theta - 1.0) < 1e-12 and abs(self.phi - 1.0) < 1e-12

    def inverse(self) -> "TwistPair":
        """Twist with both multipliers inverted."""
        return TwistPair(alpha=-self.alpha, beta=-self.beta)

    def characteristics(self) -> Characteristics:
        return Characteristics(alpha=(self.alpha,), beta=(self.beta,))


# ----------------------------------------------------------------------
# theta functions
# ----------------------------------------------------------------------

def _box_radius(lam_min: float, cmax: float, tol: float) -> int:
    """Summation box radius making the Gaussian tail provably below tol."""
    big_l = -math.log(tol) + 6.0
    r = (cmax + math.sqrt(cmax * cmax + 4.0 * math.pi * lam_min * big_l)) \
        / (2.0 * math.pi * lam_min)
    radius = int(math.ceil(r)) + 2
    if radius > THETA_BOX_CAP:
        raise ConvergenceError(
            f"theta box radius {radius} exceeds cap {THETA_BOX_CAP}; "
            "Im(Omega) too small or |Re z| too large")
    return max(radius, 1)


def theta_char(chars: Characteristics, z, omega, trunc: int | None = None,
               cfg: NumericConfig = DEFAULT_CONFIG) -> complex:
    """Genus-g theta function with real characteristics.

    ``z`` is a length-g complex vector (scalar at g=1) in the package's
    2 pi i scaled convention; ``omega`` is a PeriodMatrix (a TorusModulus
    or bare complex is promoted at g=1). With ``trunc`` given, the box
    radius is fixed and the boundary shell is checked against the
    configured tolerance; otherwise the radius is chosen automatically.
    """
    if not isinstance(omega, PeriodMatrix):
        omega = PeriodMatrix.from_tau(omega)
    g = omega.genus
    if chars.genus != g:
        raise DomainError("characteristics genus does not match omega")
    zv = np.atleast_1d(np.asarray(z, dtype=complex))
    if zv.shape != (g,):
        raise DomainError(f"z must have length {g}")
    if not np.all(np.isfinite(zv)):
        raise DomainError("z must be finite")

    lam_min = float(np.linalg.eigvalsh(omega.omega.imag)[0])
    cmax = float(np.max(np.abs(zv.real))) if g else 0.0
    radius = trunc if trunc is not None else _box_radius(lam_min, cmax, cfg.theta_tol)
    if radius < 1:
        raise DomainError("trunc must be >= 1")

    rng = np.arange(-radius, radius + 1)
    mesh = np.meshgrid(*([rng] * g), indexing="ij")
    m = np.stack([mm.ravel() for mm in mesh], axis=1).astype(float)
    ma = m + np.asarray(chars.alpha)
    zb = zv + 2j * np.pi * np.asarray(chars.beta)
    expo = 1j * np.pi * np.einsum("mi,ij,mj->m", ma, omega.omega, ma) + ma @ zb
    terms = np.exp(expo)
    total = complex(np.sum(terms))

    # boundary-shell check: the largest term on the outermost shell must be
    # negligible, otherwise the requested truncation has not converged.
    on_boundary = np.max(np.abs(m), axis=1) >= radius - 0.5
    if np.any(on_boundary):
        shell = float(np.max(np.abs(terms[on_boundary])))
        scale = max(abs(total), 1.0)
        if shell > 100.0 * cfg.theta_tol * scale:
            raise ConvergenceError(
                f"theta tail {shell:.2e} above tolerance at box radius {radius}")
    return total


def _theta_g1_derivs(alpha: float, beta: float, z, tau: complex, nderiv: int,
                     cfg: NumericConfig) -> np.ndarray:
    """Vectorized genus-one theta and z-derivatives.

    Returns an array of shape (nderiv+1,) + z.shape with entry j holding
    d^j/dz^j theta[alpha;beta](z, tau).
    """
    zv = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(zv)):
        raise DomainError("z must be finite")
    im = tau.imag
    cmax = float(np.max(np.abs(zv.real))) if zv.size else 0.0
    radius = _box_radius(im, cmax, cfg.theta_tol)
    # polynomial weights (m+alpha)^j only shift the tail by a few entries
    radius = min(radius + (2 if nderiv else 0) + nderiv // 8, THETA_BOX_CAP)
    ma = np.arange(-radius, radius + 1, dtype=float) + alpha
    expo = (1j * np.pi * tau) * ma**2 \
        + np.multiply.outer(zv + 2j * np.pi * beta, ma)
    terms = np.exp(expo)  # shape z.shape + (m,)
    out = np.empty((nderiv + 1,) + zv.shape, dtype=complex)
    weighted = terms
    for j in range(nderiv + 1):
        out[j] = np.sum(weighted, axis=-1)
        if j < nderiv:
            weighted = weighted * ma
    return out


def theta1(z, tau: TorusModulus, cfg: NumericConfig = DEFAULT_CONFIG,
           deriv: int = 0):
    """theta_1 = theta[1/2;1/2] (or its deriv-th z-derivative), vectorized in z."""
    vals = _theta_g1_derivs(0.5, 0.5, z, tau.tau, deriv, cfg)
    return vals[deriv]


def theta1_deriv0(tau: TorusModulus, cfg: NumericConfig = DEFAULT_CONFIG) -> complex:
    """d_z theta_1(0, tau), the prime-form normalization constant."""
    val = complex(_theta_g1_derivs(0.5, 0.5, np.array(0.0 + 0.0j), tau.tau, 1, cfg)[1])
    if val == 0:
        raise ConvergenceError("theta_1'(0) evaluated to zero; broken theta sum")
    return val


def K(z, tau: TorusModulus, cfg: NumericConfig = DEFAULT_CONFIG):
    """Genus-one prime-form factor K(z,tau) = theta_1(z,tau)/theta_1'(0,tau).

    Odd in z with K(z)/z -> 1 as z -> 0. Vanishes on the lattice; callers
    dividing by K are responsible for pole guards.
    """
    return theta1(z, tau, cfg) / theta1_deriv0(tau, cfg)


# ----------------------------------------------------------------------
# lattice reduction
# ----------------------------------------------------------------------

def lattice_reduce(z, tau: TorusModulus):
    """Shift z by a lattice vector into the convergence annulus of the q-series.

    Returns ``(z_red, m, n)`` with ``z = z_red + 2 pi i (m tau + n)``,
    ``Re z_red in (-2 pi Im tau, 0]`` (so |q| < |e^{z_red}| <= 1, split
    logarithmically at |q|^{1/2}) and ``Im z_red in [-pi, pi)``.
    Vectorized over z.
    """
    zv = np.asarray(z, dtype=complex)
    t = tau.tau
    v = -zv.real / (TWO_PI * t.imag)
    m = np.floor(v)
    rem = zv - 2j * np.pi * m * t
    n = np.floor(rem.imag / TWO_PI + 0.5)
    z_red = rem - 2j * np.pi * n
    return z_red, m.astype(int), n.astype(int)


def lattice_distance(z, tau: TorusModulus):
    """Distance from z to the nearest point of 2 pi i (Z tau + Z). Vectorized."""
    zv = np.asarray(z, dtype=complex)
    t = tau.tau
    # real-linear coordinates z = 2 pi i (v tau + u)
    v = -zv.real / (TWO_PI * t.imag)
    u = zv.imag / TWO_PI - v * t.real
    best = None
    for dm in (0.0, 1.0):
        for dn in (0.0, 1.0):
            mm = np.floor(v) + dm
            nn = np.floor(u) + dn
            d = np.abs(zv - 2j * np.pi * (mm * t + nn))
            best = d if best is None else np.minimum(best, d)
    return best


# ----------------------------------------------------------------------
# twisted Weierstrass functions
# ----------------------------------------------------------------------

def _check_not_trivial(tw: TwistPair) -> None:
    if tw.is_trivial:
        raise ResonanceError(
            "(theta, phi) = (1, 1): the twisted genus-one kernel degenerates")


def _multiplier(tw: TwistPair, m, n):
    """Exact lattice-shift multiplier theta^m phi^n (vectorized in m, n)."""
    return tw.theta ** np.asarray(m) * tw.phi ** np.asarray(n)


def p1_theta(tw: TwistPair, z, tau: TorusModulus,
             cfg: NumericConfig = DEFAULT_CONFIG):
    """P1 via the theta-quotient route. Vectorized over z.

    Reduces z into the fundamental annulus first and multiplies by the
    exact lattice multiplier theta^m phi^n, so arbitrarily large arguments
    are handled without overflow.
    """
    _check_not_trivial(tw)
    zv = np.asarray(z, dtype=complex)
    z_red, m, n = lattice_reduce(zv, tau)
    dist = lattice_distance(z_red, tau)
    if np.any(dist < cfg.pole_guard):
        raise DomainError("z within pole guard of a lattice point")
    th = _theta_g1_derivs(tw.alpha, tw.beta, z_red, tau.tau, 0, cfg)[0]
    th0 = complex(_theta_g1_derivs(tw.alpha, tw.beta, np.array(0j), tau.tau, 0, cfg)[0])
    if abs(th0) < cfg.resonance_guard:
        raise ResonanceError("theta[alpha;beta](0, tau) vanishes for this twist")
    val = _multiplier(tw, m, n) * th / (th0 * K(z_red, tau, cfg))
    return val if np.ndim(z) else complex(val)


def _series_terms(tw: TwistPair, z_red: complex, tau: TorusModulus, jmax: int,
                  cfg: NumericConfig):
    """Terms t_j = q_z^{j+lam}/(1 - theta^{-1} q^{j+lam}), j = -jmax..jmax.

    The j+lam < 0 half is rewritten to keep every exponential bounded.
    Returns (exponents j+lam, terms).
    """
    lam = tw.lam
    th = tw.theta
    t = tau.tau
    j = np.arange(-jmax, jmax + 1, dtype=float) + lam
    terms = np.empty(j.shape, dtype=complex)
    pos = j >= 0
    qpow = np.exp(2j * np.pi * t * j[pos])
    den = 1.0 - qpow / th
    if np.any(np.abs(den) < cfg.resonance_guard):
        raise ResonanceError("resonant denominator 1 - theta^{-1} q^{k+lam}")
    terms[pos] = np.exp(j[pos] * z_red) / den
    neg = ~pos
    qinv = np.exp(-2j * np.pi * t * j[neg])
    den2 = 1.0 - th * qinv
    if np.any(np.abs(den2) < cfg.resonance_guard):
        raise ResonanceError("resonant denominator 1 - theta q^{-(k+lam)}")
    terms[neg] = -th * np.exp(j[neg] * (z_red - 2j * np.pi * t)) / den2
    return j, terms


def _series_jmax(z_red: complex, tau: TorusModulus, weight_pow: int,
                 cfg: NumericConfig) -> int:
    """Truncation index for the q-series at the (reduced) point z_red."""
    rate_pos = z_red.real                                # log |e^{z_red}|
    rate_neg = -(z_red.real + TWO_PI * tau.tau.imag)     # log |q / e^{z_red}|
    rate = max(rate_pos, rate_neg)
    if rate >= -1e-9:
        raise ConvergenceError(
            "q-series does not converge: reduced point on the annulus boundary")
    logtol = math.log(cfg.series_tol) - 6.0
    jmax = int(math.ceil(logtol / rate)) + 4
    if weight_pow:
        # allow for the polynomial weight (j+lam)^{weight_pow}
        jmax += int(math.ceil(weight_pow * math.log(jmax + weight_pow + 2) / -rate)) + 2
    if jmax > 200_000:
        raise ConvergenceError(
            f"q-series truncation {jmax} unreasonably large; "
            "point too close to the annulus boundary")
    return jmax


def p1_series(tw: TwistPair, z, tau: TorusModulus,
              cfg: NumericConfig = DEFAULT_CONFIG) -> complex:
    """P1 via the q-series route (independent oracle for p1_theta). Scalar z."""
    _check_not_trivial(tw)
    z_red, m, n = lattice_reduce(complex(z), tau)
    z_red = complex(z_red)
    if float(lattice_distance(z_red, tau)) < cfg.pole_guard:
        raise DomainError("z within pole guard of a lattice point")
    jmax = _series_jmax(z_red, tau, 0, cfg)
    _, terms = _series_terms(tw, z_red, tau, jmax, cfg)
    val = -np.sum(terms)
    tail = max(abs(terms[0]), abs(terms[-1]))
    if tail > 1e3 * cfg.series_tol * max(abs(val), 1.0):
        raise ConvergenceError(f"q-series tail {tail:.2e} above tolerance")
    return complex(_multiplier(tw, int(m), int(n)) * val)


_P1_BOUNDARY_MARGIN = 0.04  # fraction of the annulus log-width


def p_k_vector(tw: TwistPair, kmax: int, z, tau: TorusModulus,
               cfg: NumericConfig = DEFAULT_CONFIG) -> np.ndarray:
    """P_k(z) for k = 1..kmax at a single point, term-wise analytic.

    Primary route: the reduced q-series differentiated term by term,
    P_k = (-1)^{k-1}/(k-1)! * (-sum_j (j+lam)^{k-1} t_j) * theta^m phi^n.
    Near the annulus boundary (where the q-series converges too slowly)
    the analytically differentiated theta-quotient route is used instead;
    both routes are exact derivatives, never finite differences.
    """
    _check_not_trivial(tw)
    if kmax < 1:
        raise DomainError("kmax must be >= 1")
    z_red, m, n = lattice_reduce(complex(z), tau)
    z_red = complex(z_red)
    if float(lattice_distance(z_red, tau)) < cfg.pole_guard:
        raise DomainError("z within pole guard of a lattice point")
    mult = _multiplier(tw, int(m), int(n))

    width = TWO_PI * tau.tau.imag
    interior = min(-z_red.real, z_red.real + width) > _P1_BOUNDARY_MARGIN * width
    if interior:
        jmax = _series_jmax(z_red, tau, kmax - 1, cfg)
        j, terms = _series_terms(tw, z_red, tau, jmax, cfg)
        out = np.empty(kmax, dtype=complex)
        weighted = terms
        sign_fact = -1.0
        for k in range(1, kmax + 1):
            out[k - 1] = sign_fact * np.sum(weighted)
            weighted = weighted * j
            sign_fact *= -1.0 / k
        return mult * out
    return mult * _p_k_theta_route(tw, kmax, z_red, tau, cfg)


def _p_k_theta_route(tw: TwistPair, kmax: int, z_red: complex,
                     tau: TorusModulus, cfg: NumericConfig) -> np.ndarray:
    """P_k at z_red from analytic derivatives of the theta quotient.

    With A(z) = theta[a;b](z)/theta[a;b](0) and B(z) = K(z,tau), the
    quotient rule gives the recurrence
    P1^{(n)} = (A^{(n)} - sum_{j<n} C(n,j) P1^{(j)} B^{(n-j)}) / B.
    """
    nd = kmax - 1
    za = np.array(z_red)
    th = _theta_g1_derivs(tw.alpha, tw.beta, za, tau.tau, nd, cfg)
    th0 = complex(_theta_g1_derivs(tw.alpha, tw.beta, np.array(0j), tau.tau, 0, cfg)[0])
    if abs(th0) < cfg.resonance_guard:
        raise ResonanceError("theta[alpha;beta](0, tau) vanishes for this twist")
    kk = _theta_g1_derivs(0.5, 0.5, za, tau.tau, nd, cfg) / theta1_deriv0(tau, cfg)
    a = th / th0
    p_derivs = np.empty(nd + 1, dtype=complex)
    for nn in range(nd + 1):
        acc = a[nn]
        for jj in range(nn):
            acc -= math.comb(nn, jj) * p_derivs[jj] * kk[nn - jj]
        p_derivs[nn] = acc / kk[0]
    out = np.empty(kmax, dtype=complex)
    fact = 1.0
    for k in range(1, kmax + 1):
        out[k - 1] = (-1.0) ** (k - 1) / fact * p_derivs[k - 1]
        fact *= k
    return out


def p_k(tw: TwistPair, k: int, z, tau: TorusModulus,
        cfg: NumericConfig = DEFAULT_CONFIG) -> complex:
    """P_k(z) for a single order k >= 1 (k=1 coincides with p1_series)."""
    return complex(p_k_vector(tw, k, z, tau, cfg)[k - 1])


# ----------------------------------------------------------------------
# Bernoulli polynomials and twisted Eisenstein series
# ----------------------------------------------------------------------

def bernoulli_poly(n: int, lam: float) -> float:
    """Bernoulli polynomial B_n(lam), generating function q_z^lam/(q_z - 1).

    The expansion is 1/z + sum_{n>=1} B_n(lam)/n! z^{n-1}, so B_1(lam)
    = lam - 1/2 (B_1 = -1/2 convention for the Bernoulli numbers).
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    numbers = scipy.special.bernoulli(n)
    return float(sum(math.comb(n, k) * numbers[k] * lam ** (n - k)
                     for k in range(n + 1)))


def eisenstein_twisted(tw: TwistPair, n: int, tau: TorusModulus,
                       cfg: NumericConfig = DEFAULT_CONFIG) -> complex:
    """Twisted Eisenstein series E_n[theta; phi](tau).

        E_n = -B_n(lam)/n!
              + 1/(n-1)! sum_{r>=0} (r+lam)^{n-1} u_r/(1-u_r)
              + (-1)^n/(n-1)! sum_{r>=1} (r-lam)^{n-1} v_r/(1-v_r)

    with u_r = theta^{-1} q^{r+lam}, v_r = theta q^{r-lam}. At the
    untwisted point (theta,phi) = (1,1) the resonant r=0 term carries the
    weight 0^{n-1} and is dropped for n >= 2 (classical Eisenstein
    reduction, E_n = 0 for odd n); n = 1 is a genuine degeneration.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    lam = tw.lam
    th = tau.tau
    theta = tw.theta
    q_abs = abs(np.exp(2j * np.pi * th))
    rate = math.log(q_abs)
    logtol = math.log(cfg.series_tol) - 6.0
    rmax = int(math.ceil(logtol / rate)) + 4
    rmax += int(math.ceil((n - 1) * math.log(rmax + n + 2) / -rate)) + 2

    r = np.arange(0, rmax + 1, dtype=float)
    fact = math.factorial(n - 1)
    total = -bernoulli_poly(n, lam) / math.factorial(n)

    e1 = r + lam
    u = np.exp(2j * np.pi * th * e1) / theta
    den1 = 1.0 - u
    resonant = np.abs(den1) < cfg.resonance_guard
    if np.any(resonant):
        # only the r=0, lam=0, theta=1 term can resonate inside the nome disk
        if lam == 0.0 and resonant[0] and not np.any(resonant[1:]):
            if n == 1:
                raise ResonanceError(
                    "E_1 at (theta,phi)=(1,1) diverges (untwisted resonance)")
            u = u[1:]
            den1 = den1[1:]
            e1 = e1[1:]
        else:
            raise ResonanceError("resonant denominator in twisted Eisenstein sum")
    total += np.sum(e1 ** (n - 1) * u / den1) / fact

    r2 = np.arange(1, rmax + 1, dtype=float)
    e2 = r2 - lam
    v = theta * np.exp(2j * np.pi * th * e2)
    den2 = 1.0 - v
    if np.any(np.abs(den2) < cfg.resonance_guard):
        raise ResonanceError("resonant denominator in twisted Eisenstein sum")
    total += (-1.0) ** n * np.sum(e2 ** (n - 1) * v / den2) / fact
    return complex(total)
