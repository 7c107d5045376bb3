"""Two-tori sewing: moment matrices and the sewn genus-two kernel.

Two tori with moduli tau_1, tau_2 are sewn through annuli identified by
z_1 z_2 = epsilon. The sewn Szego kernel is assembled from closed-form
moments of the genus-one kernels:

    C[theta;phi](k,l)   = (-1)^l binom(k+l-2, k-1) E_{k+l-1}[theta;phi](tau)
    F_a(k,l)            = epsilon^{(k+l-1)/2} C[theta_a;phi_a](k,l, tau_a)
    h_a(k,x)            = epsilon^{k/2-1/4} P_k[theta_a;phi_a](x, tau_a)
    hbar_a[c](k,y)      = -h_a[c^{-1}](k,y)

    same torus a:   S(x,y) = P1[c_a](x-y,tau_a)
                             + h_a(x) (I - F_abar F_a)^{-1} F_abar hbar_a^T(y)
    opposite tori:  S(x,y) = xi (-1)^abar h_a(x) (I - F_abar F_a)^{-1}
                             hbar_abar^T(y)

The half-integer powers of epsilon are carried through the recorded
square-root branch sqrt_epsilon, never recomputed from epsilon, so the
Dehn-twist parity (same-torus even, cross odd in sqrt_epsilon, joint
(sqrt_epsilon, xi) flip invariant) holds exactly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import DEFAULT_CONFIG, NumericConfig
from .errors import DomainError, SingularMatrixError
from .numerics import MomentMatrix, determinant, lu_solve
from .specialfn import (TorusModulus, TwistPair, eisenstein_twisted,
                        lattice_distance, p1_theta, p_k_vector)

__all__ = [
    "EpsilonModuli", "GenusTwoCharacteristicsEps", "SurfacePoint",
    "min_lattice_distance", "epsilon_bound",
    "c_matrix", "f_matrix", "h_vector", "hbar_vector",
    "build_q", "solve_x", "det_i_minus_q", "logdet_series",
    "EpsilonContext", "szego_genus2_eps",
]

RADIUS_FACTOR = 0.45  # contour radii r_a = 0.45 D(q_a), strict domain margin


def min_lattice_distance(tau: TorusModulus) -> float:
    """Minimal nonzero length D(q) = min |2 pi i (m tau + n)| of the lattice."""
    t = tau.tau
    span = int(math.ceil(2.0 / t.imag)) + 2
    best = math.inf
    for m in range(-span, span + 1):
        for n in range(-span, span + 1):
            if m == 0 and n == 0:
                continue
            best = min(best, 2.0 * math.pi * abs(m * t + n))
    return best


def epsilon_bound(tau1: TorusModulus, tau2: TorusModulus) -> float:
    """Sewing-domain bound: |epsilon| < D(q_1) D(q_2) / 4."""
    return 0.25 * min_lattice_distance(tau1) * min_lattice_distance(tau2)


@dataclass(frozen=True)
class EpsilonModuli:
    """Point of the two-tori sewing domain with explicit branch data.

    ``sqrt_epsilon`` records the chosen square root of epsilon and ``xi``
    in {+i, -i} the half-form branch of the sewing relation; a Dehn twist
    flips both and leaves every kernel value unchanged.
    """

    tau1: TorusModulus
    tau2: TorusModulus
    epsilon: complex
    sqrt_epsilon: complex
    xi: complex

    def __post_init__(self) -> None:
        eps = complex(self.epsilon)
        sq = complex(self.sqrt_epsilon)
        xi = complex(self.xi)
        if abs(sq * sq - eps) > 1e-12 * max(abs(eps), 1e-300):
            raise DomainError("sqrt_epsilon**2 does not equal epsilon")
        if abs(xi - 1j) > 1e-12 and abs(xi + 1j) > 1e-12:
            raise DomainError("xi must be +i or -i")
        if abs(eps) >= epsilon_bound(self.tau1, self.tau2):
            raise DomainError(
                f"|epsilon| = {abs(eps):.3e} outside the sewing domain "
                f"bound {epsilon_bound(self.tau1, self.tau2):.3e}")
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "sqrt_epsilon", sq)
        object.__setattr__(self, "xi", xi)

    @classmethod
    def create(cls, tau1, tau2, epsilon, xi=1j, sqrt_epsilon=None) -> "EpsilonModuli":
        t1 = tau1 if isinstance(tau1, TorusModulus) else TorusModulus(tau1)
        t2 = tau2 if isinstance(tau2, TorusModulus) else TorusModulus(tau2)
        eps = complex(epsilon)
        if sqrt_epsilon is None:
            sqrt_epsilon = cmath.sqrt(eps)
        return cls(tau1=t1, tau2=t2, epsilon=eps,
                   sqrt_epsilon=complex(sqrt_epsilon), xi=complex(xi))

    def tau(self, a: int) -> TorusModulus:
        if a == 1:
            return self.tau1
        if a == 2:
            return self.tau2
        raise DomainError("torus label must be 1 or 2")

    def radius(self, a: int) -> float:
        """Sewing annulus outer radius r_a."""
        return RADIUS_FACTOR * min_lattice_distance(self.tau(a))

    @property
    def bound(self) -> float:
        return epsilon_bound(self.tau1, self.tau2)

    def dehn_twist(self) -> "EpsilonModuli":
        """epsilon -> e^{2 pi i} epsilon: flip (sqrt_epsilon, xi)."""
        return EpsilonModuli(tau1=self.tau1, tau2=self.tau2, epsilon=self.epsilon,
                             sqrt_epsilon=-self.sqrt_epsilon, xi=-self.xi)


@dataclass(frozen=True)
class GenusTwoCharacteristicsEps:
    """Twist data inherited from the two tori on the sewn genus-two surface."""

    tw1: TwistPair
    tw2: TwistPair

    def __post_init__(self) -> None:
        for a, tw in ((1, self.tw1), (2, self.tw2)):
            if tw.is_trivial:
                raise DomainError(
                    f"torus {a} twist is (1,1); the genus-one kernel degenerates")

    def tw(self, a: int) -> TwistPair:
        if a == 1:
            return self.tw1
        if a == 2:
            return self.tw2
        raise DomainError("torus label must be 1 or 2")

    def inverse(self) -> "GenusTwoCharacteristicsEps":
        return GenusTwoCharacteristicsEps(self.tw1.inverse(), self.tw2.inverse())

    def swap(self) -> "GenusTwoCharacteristicsEps":
        return GenusTwoCharacteristicsEps(self.tw2, self.tw1)


@dataclass(frozen=True)
class SurfacePoint:
    """Point on punctured torus `which` with local coordinate z on C/Lambda."""

    which: int
    z: complex

    def __post_init__(self) -> None:
        if self.which not in (1, 2):
            raise DomainError("which must be 1 or 2")
        z = complex(self.z)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise DomainError("point coordinate must be finite")
        object.__setattr__(self, "z", z)


def validate_point(pt: SurfacePoint, moduli: EpsilonModuli,
                   cfg: NumericConfig = DEFAULT_CONFIG) -> None:
    """Check that pt avoids the excised disk and lattice poles on its torus."""
    a = pt.which
    dist = float(lattice_distance(pt.z, moduli.tau(a)))
    inner = abs(moduli.epsilon) / moduli.radius(3 - a)
    if dist <= max(inner, cfg.pole_guard):
        raise DomainError(
            f"point on torus {a} lies inside the excised disk or at a pole "
            f"(lattice distance {dist:.3e}, inner radius {inner:.3e})")


# ----------------------------------------------------------------------
# moments
# ----------------------------------------------------------------------

def c_matrix(tw: TwistPair, n_order: int, tau: TorusModulus,
             cfg: NumericConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Laurent moment matrix C(k,l) = (-1)^l binom(k+l-2,k-1) E_{k+l-1}."""
    if n_order < 1:
        raise DomainError("order must be >= 1")
    eis = [eisenstein_twisted(tw, m, tau, cfg) for m in range(1, 2 * n_order)]
    c = np.empty((n_order, n_order), dtype=complex)
    for k in range(1, n_order + 1):
        for l in range(1, n_order + 1):
            c[k - 1, l - 1] = ((-1.0) ** l * math.comb(k + l - 2, k - 1)
                               * eis[k + l - 2])
    return c


def f_matrix(tw: TwistPair, n_order: int, tau: TorusModulus,
             moduli: EpsilonModuli,
             cfg: NumericConfig = DEFAULT_CONFIG) -> np.ndarray:
    """F_a(k,l) = epsilon^{(k+l-1)/2} C(k,l) with the recorded sqrt branch."""
    c = c_matrix(tw, n_order, tau, cfg)
    sq = moduli.sqrt_epsilon
    kl = np.arange(1, n_order + 1)
    powers = sq ** (kl[:, None] + kl[None, :] - 1)
    return powers * c


def _quarter_root(moduli: EpsilonModuli) -> complex:
    """Principal epsilon^{-1/4}, the normalization of the public h vectors."""
    if moduli.epsilon == 0:
        raise DomainError("epsilon = 0 has no h normalization")
    return cmath.exp(-0.25 * cmath.log(moduli.epsilon))


def h_vector(tw: TwistPair, n_order: int, x, tau: TorusModulus,
             moduli: EpsilonModuli,
             cfg: NumericConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Half-form moment vector h(k,x) = epsilon^{k/2-1/4} P_k(x,tau), k=1..N.

    The half-integer powers split as sqrt_epsilon^k times the principal
    epsilon^{-1/4}; under the joint Dehn flip only odd-k entries change sign.
    """
    z = x.z if isinstance(x, SurfacePoint) else complex(x)
    if moduli.epsilon == 0:
        return np.zeros(n_order, dtype=complex)
    pk = p_k_vector(tw, n_order, z, tau, cfg)
    powers = moduli.sqrt_epsilon ** np.arange(1, n_order + 1)
    return _quarter_root(moduli) * powers * pk


def hbar_vector(tw: TwistPair, n_order: int, y, tau: TorusModulus,
                moduli: EpsilonModuli,
                cfg: NumericConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Conjugate moment vector hbar[c](k,y) = -h[c^{-1}](k,y)."""
    return -h_vector(tw.inverse(), n_order, y, tau, moduli, cfg)


# ----------------------------------------------------------------------
# block matrices, solve, determinant
# ----------------------------------------------------------------------

def build_q(f1: np.ndarray, f2: np.ndarray, xi: complex) -> MomentMatrix:
    """Block matrix Q = [[0, xi F1], [-xi F2, 0]]."""
    f1 = np.asarray(f1, dtype=complex)
    f2 = np.asarray(f2, dtype=complex)
    if f1.shape != f2.shape or f1.shape[0] != f1.shape[1]:
        raise DomainError("F1, F2 must be square with equal shapes")
    zero = np.zeros_like(f1)
    return MomentMatrix.from_blocks(zero, xi * f1, -xi * f2, zero)


def _spectral_radius_check(q: np.ndarray) -> None:
    """A few deterministic power iterations; the truncated Q must contract."""
    n = q.shape[0]
    rng = np.random.default_rng(12345)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(12):
        w = q @ v
        est = np.linalg.norm(w)
        if est == 0.0:
            return
        v = w / est
    if est >= 1.0:
        raise SingularMatrixError(
            f"spectral radius estimate {est:.3f} >= 1: epsilon too large "
            "or degenerate characteristics")


def solve_x(q: MomentMatrix, f: MomentMatrix,
            cfg: NumericConfig = DEFAULT_CONFIG,
            neumann_terms: int | None = None) -> MomentMatrix:
    """Solve (I - Q) X = F for the moment matrix X.

    Default is a dense LU solve; with ``neumann_terms`` the partial
    Neumann sum sum_{n<=M} Q^n F is returned instead (test mode).
    """
    if q.trunc_order != f.trunc_order:
        raise DomainError("Q and F truncation orders differ")
    qm, fm = q.data, f.data
    _spectral_radius_check(qm)
    if neumann_terms is not None:
        acc = fm.copy()
        term = fm.copy()
        for _ in range(neumann_terms):
            term = qm @ term
            acc = acc + term
        return MomentMatrix(acc, q.trunc_order)
    eye = np.eye(qm.shape[0], dtype=complex)
    x = lu_solve(eye - qm, fm, cfg)
    return MomentMatrix(x, q.trunc_order)


def det_i_minus_q(f1: np.ndarray, f2: np.ndarray) -> complex:
    """det(I - F1 F2) on the N-block, equal to det(I - Q) on the 2N block."""
    f1 = np.asarray(f1, dtype=complex)
    f2 = np.asarray(f2, dtype=complex)
    eye = np.eye(f1.shape[0], dtype=complex)
    return determinant(eye - f1 @ f2)


def logdet_series(f1: np.ndarray, f2: np.ndarray, terms: int = 40) -> complex:
    """Cross-check: log det(I-F1F2) = -sum_{n>=1} tr((F1 F2)^n)/n."""
    prod = np.asarray(f1, dtype=complex) @ np.asarray(f2, dtype=complex)
    acc = 0.0 + 0.0j
    power = np.eye(prod.shape[0], dtype=complex)
    for n in range(1, terms + 1):
        power = power @ prod
        acc -= np.trace(power) / n
    return complex(acc)


# ----------------------------------------------------------------------
# kernel assembly
# ----------------------------------------------------------------------

class EpsilonContext:
    """Cached assembly data for one (characteristics, moduli, N) configuration."""

    def __init__(self, chars: GenusTwoCharacteristicsEps, moduli: EpsilonModuli,
                 n_order: int | None = None,
                 cfg: NumericConfig = DEFAULT_CONFIG) -> None:
        self.chars = chars
        self.moduli = moduli
        self.cfg = cfg
        self.n_order = n_order if n_order is not None else cfg.trunc_order
        if self.n_order < 1:
            raise DomainError("truncation order must be >= 1")
        self._f = {}
        self._lu_rhs = {}

    def f_block(self, a: int) -> np.ndarray:
        if a not in self._f:
            self._f[a] = f_matrix(self.chars.tw(a), self.n_order,
                                  self.moduli.tau(a), self.moduli, self.cfg)
        return self._f[a]

    def _middle(self, a: int, with_f: bool) -> np.ndarray:
        """(I - F_abar F_a)^{-1} F_abar  or  (I - F_abar F_a)^{-1}."""
        key = (a, with_f)
        if key not in self._lu_rhs:
            fa = self.f_block(a)
            fb = self.f_block(3 - a)
            eye = np.eye(self.n_order, dtype=complex)
            rhs = fb if with_f else eye
            self._lu_rhs[key] = lu_solve(eye - fb @ fa, rhs, self.cfg)
        return self._lu_rhs[key]

    def _u(self, a: int, z: complex, inverse: bool) -> np.ndarray:
        """sqrt_epsilon^k P_k(z) for k = 1..N (h vectors without eps^{-1/4})."""
        tw = self.chars.tw(a)
        if inverse:
            tw = tw.inverse()
        pk = p_k_vector(tw, self.n_order, z, self.moduli.tau(a), self.cfg)
        return self.moduli.sqrt_epsilon ** np.arange(1, self.n_order + 1) * pk

    def kernel(self, x: SurfacePoint, y: SurfacePoint) -> complex:
        """Sewn genus-two Szego kernel coefficient of dx^1/2 dy^1/2."""
        validate_point(x, self.moduli, self.cfg)
        validate_point(y, self.moduli, self.cfg)
        mod = self.moduli
        a = x.which
        if y.which == a:
            tau = mod.tau(a)
            sep = float(lattice_distance(x.z - y.z, tau))
            if sep < self.cfg.pole_guard:
                raise DomainError("x and y coincide on the torus (kernel pole)")
            base = p1_theta(self.chars.tw(a), x.z - y.z, tau, self.cfg)
            if mod.epsilon == 0:
                return complex(base)
            u = self._u(a, x.z, inverse=False)
            v = -self._u(a, y.z, inverse=True)
            corr = u @ self._middle(a, with_f=True) @ v / mod.sqrt_epsilon
            return complex(base + corr)
        if mod.epsilon == 0:
            return 0.0 + 0.0j
        abar = 3 - a
        u = self._u(a, x.z, inverse=False)
        v = -self._u(abar, y.z, inverse=True)
        val = mod.xi * (-1.0) ** abar \
            * (u @ self._middle(a, with_f=False) @ v) / mod.sqrt_epsilon
        return complex(val)

    def det(self) -> complex:
        if self.moduli.epsilon == 0:
            return 1.0 + 0.0j
        return det_i_minus_q(self.f_block(1), self.f_block(2))


def szego_genus2_eps(chars: GenusTwoCharacteristicsEps, x: SurfacePoint,
                     y: SurfacePoint, moduli: EpsilonModuli,
                     n_order: int | None = None,
                     cfg: NumericConfig = DEFAULT_CONFIG) -> complex:
    """Genus-two Szego kernel from two sewn tori (coefficient of dx^1/2 dy^1/2)."""
    return EpsilonContext(chars, moduli, n_order, cfg).kernel(x, y)
