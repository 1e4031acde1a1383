"""Closed-form three-mode dynamics of the radiation-pressure driven mirror.

Modes are ordered (Stokes a1, mirror b, anti-Stokes a2). Everything is
parameterised by the scaled time t' = Theta*t, the coupling ratio
r = theta/chi > 1 and the initial mirror occupation n_bar.

The correlation coefficients are written in terms of half-angle quantities
(w = sin^2(t'/2), y = sin(t'/2)/sqrt(r^2 - 1)) instead of 1 - cos(...)
differences. The rewritten forms are algebraically identical to the textbook
expressions but have no subtractive cancellation, which matters because for
r - 1 ~ 1e-7 the individual terms reach ~1e13 while the physics near
t' = 2*pi lives at O(1).
"""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass
from types import SimpleNamespace

import numpy as np
from scipy import constants

from .gaussian_core import precise_context, symplectic_form

TWO_PI = math.tau
R_MIN = 1.0 + 1e-12

_NP = SimpleNamespace(sin=np.sin, cos=np.cos, sqrt=np.sqrt)


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory inputs. Frequencies in rad/s, bandwidths in Hz, SI otherwise."""

    power: float
    carrier_frequency: float
    mechanical_frequency: float
    detection_bandwidth: float
    mode_bandwidth: float
    effective_mass: float
    incidence_angle: float = 0.0

    def __post_init__(self):
        for name in ("power", "carrier_frequency", "mechanical_frequency",
                     "detection_bandwidth", "mode_bandwidth", "effective_mass"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if self.mechanical_frequency >= self.carrier_frequency:
            raise ValueError("mechanical_frequency must be below carrier_frequency")
        if not 0.0 <= self.incidence_angle < math.pi / 2:
            raise ValueError("incidence_angle must lie in [0, pi/2)")


@dataclass(frozen=True)
class Couplings:
    chi: float
    theta: float
    r: float
    big_theta: float

    def pulse_duration(self, t_prime: float = TWO_PI) -> float:
        """Physical interaction time (s) corresponding to scaled time t'."""
        if self.big_theta <= 0:
            raise ValueError("Theta vanishes; scaled time is undefined")
        return t_prime / self.big_theta


@dataclass(frozen=True)
class ScaledParams:
    t_prime: float
    r: float
    n_bar: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.t_prime):
            raise ValueError(f"t_prime must be finite, got {self.t_prime!r}")
        if not (math.isfinite(self.r) and self.r > R_MIN):
            raise ValueError(f"r must exceed 1 + 1e-12, got {self.r!r}")
        if not (math.isfinite(self.n_bar) and self.n_bar >= 0):
            raise ValueError(f"n_bar must be finite and >= 0, got {self.n_bar!r}")

    def at(self, t_prime: float) -> "ScaledParams":
        return ScaledParams(t_prime, self.r, self.n_bar)


@dataclass(frozen=True)
class CoefficientSet:
    A: float
    B: float
    C: float
    D: float
    E: float
    F: float

    def as_tuple(self) -> tuple:
        return astuple(self)

    @property
    def alphas(self) -> tuple:
        """Marker aliases alpha_1..alpha_7 (index 0 unused)."""
        return (None, self.E, self.B, self.A, self.E, self.D, self.C, self.F)


def couplings_from_physical(p: PhysicalParams) -> Couplings:
    w0, om = p.carrier_frequency, p.mechanical_frequency
    chi = math.cos(p.incidence_angle) * math.sqrt(
        p.power * p.detection_bandwidth**2 * (w0 - om)
        / (2.0 * p.effective_mass * om * constants.c**2 * p.mode_bandwidth)
    )
    theta = chi * math.sqrt((w0 + om) / (w0 - om))
    # r^2 - 1 = 2*Omega/(omega0 - Omega), evaluated without cancellation
    eps = 2.0 * om / (w0 - om)
    return Couplings(chi=chi, theta=theta, r=theta / chi, big_theta=chi * math.sqrt(eps))


def reduce_time(t_prime):
    """Map t' into [0, 2*pi); exact in floating point (fmod is exact)."""
    x = np.fmod(t_prime, TWO_PI)
    x = np.where(x < 0, x + TWO_PI, x)
    return float(x) if np.ndim(x) == 0 else x


def _eps(r):
    return (r - 1.0) * (r + 1.0)


def phase_variables(t_prime, r, xp=_NP):
    """Half-angle variables shared by all closed forms.

    Returns a namespace with s = sin(x/2), c = cos(x/2), w = s^2, sx = sin x,
    cx = cos x, eps = r^2 - 1 and y = s / sqrt(eps), where x is t' reduced
    modulo 2*pi.
    """
    x = reduce_time(t_prime)
    if xp is not _NP:
        x = xp.mpf(x)
        r = xp.mpf(r)
    eps = _eps(r)
    s = xp.sin(x / 2)
    c = xp.cos(x / 2)
    return SimpleNamespace(
        x=x, r=r, eps=eps, s=s, c=c, w=s * s, sx=2 * s * c, cx=xp.cos(x),
        y=s / xp.sqrt(eps),
    )


def coefficient_values(t_prime, r, n_bar, xp=_NP):
    """(A, B, C, D, E, F); t_prime may be a numpy array, or xp an mpmath context."""
    v = phase_variables(t_prime, r, xp)
    if xp is not _NP:
        n_bar = xp.mpf(n_bar)
    eps, w, c2, sx, cx, r = v.eps, v.w, v.c * v.c, v.sx, v.cx, v.r
    y2 = v.y * v.y
    eps32 = eps * xp.sqrt(eps)
    A = 4 * y2 * (eps + w + n_bar * eps * c2) / eps
    B = n_bar * cx * cx + sx * sx / eps
    C = sx * (eps + 2 * w + n_bar * eps * cx) / eps32
    D = -r * sx * (2 * w + n_bar * eps * cx) / eps32
    E = 4 * r * r * y2 * (w + n_bar * eps * c2) / eps
    F = 4 * r * y2 * (eps / 2 + w + n_bar * eps * c2) / eps
    return A, B, C, D, E, F


def working_dps(r: float) -> int:
    """Decimal digits needed to resolve O(eps^2)-relative features of the CM."""
    return 24 + 4 * max(1, math.ceil(-math.log10(_eps(r))))


def coefficients(s: ScaledParams) -> CoefficientSet:
    return CoefficientSet(*(float(v) for v in coefficient_values(s.t_prime, s.r, s.n_bar)))


def coefficients_mp(s: ScaledParams, dps: int | None = None) -> CoefficientSet:
    """Extended-precision coefficients (mpf fields) at ``dps`` digits."""
    ctx = precise_context(dps or working_dps(s.r))
    return CoefficientSet(*coefficient_values(s.t_prime, s.r, s.n_bar, xp=ctx))


def _cm_entries(A, B, C, D, E, F, half):
    return [
        [A + half, 0, C, 0, F, 0],
        [0, A + half, 0, -C, 0, -F],
        [C, 0, B + half, 0, -D, 0],
        [0, -C, 0, B + half, 0, -D],
        [F, 0, -D, 0, E + half, 0],
        [0, -F, 0, -D, 0, E + half],
    ]


def cm_from_coefficients(k: CoefficientSet) -> np.ndarray:
    return np.array(_cm_entries(*k.as_tuple(), 0.5), dtype=float)


def full_cm(s: ScaledParams) -> np.ndarray:
    """6x6 covariance matrix over (X1, P1, Xb, Pb, X2, P2)."""
    return cm_from_coefficients(coefficients(s))


def full_cm_mp(s: ScaledParams, dps: int | None = None):
    """Same matrix as :func:`full_cm` as an mpmath matrix at ``dps`` digits."""
    ctx = precise_context(dps or working_dps(s.r))
    k = coefficient_values(s.t_prime, s.r, s.n_bar, xp=ctx)
    return ctx.matrix(_cm_entries(*k, ctx.mpf(1) / 2))


def initial_cm(n_bar: float) -> np.ndarray:
    """Vacuum (Stokes) x thermal(n_bar) (mirror) x vacuum (anti-Stokes)."""
    return np.diag([0.5, 0.5, n_bar + 0.5, n_bar + 0.5, 0.5, 0.5])


def _heisenberg_entries(v):
    p = 1 + 2 * v.y**2          # (theta^2 - chi^2 cos)/Theta^2
    q = 2 * v.c * v.y           # chi sin/Theta
    g = 2 * v.r * v.y**2        # chi theta (1 - cos)/Theta^2
    h = v.cx - 2 * v.y**2       # (theta^2 cos - chi^2)/Theta^2
    rq, cx, z = v.r * q, v.cx, 0 * q
    return [
        [p, z, q, z, -g, z],
        [z, p, z, -q, z, g],
        [q, z, cx, z, -rq, z],
        [z, -q, z, cx, z, -rq],
        [g, z, rq, z, h, z],
        [z, -g, z, rq, z, h],
    ]


def heisenberg_symplectic(t_prime: float, r: float) -> np.ndarray:
    """Quadrature map S with xi(t) = S xi(0), from the Bogoliubov solutions.

    a1(t) = p a1 + q b^dag - g a2^dag, b(t) = q a1^dag + cos b - r q a2,
    a2(t) = g a1^dag + r q b + h a2; these are the solutions of
    a1' = chi b^dag, b' = chi a1^dag - theta a2, a2' = theta b.
    """
    if not r > R_MIN:
        raise ValueError(f"r must exceed 1 + 1e-12, got {r!r}")
    return np.array(_heisenberg_entries(phase_variables(t_prime, r)), dtype=float)


def heisenberg_symplectic_mp(t_prime: float, r: float, dps: int | None = None):
    """:func:`heisenberg_symplectic` as an mpmath matrix at ``dps`` digits."""
    if not r > R_MIN:
        raise ValueError(f"r must exceed 1 + 1e-12, got {r!r}")
    ctx = precise_context(dps or working_dps(r))
    return ctx.matrix(_heisenberg_entries(phase_variables(t_prime, r, xp=ctx)))


def evolve_cm_oracle(V0: np.ndarray, t_prime: float, r: float) -> np.ndarray:
    S = heisenberg_symplectic(t_prime, r)
    V = S @ np.asarray(V0, dtype=float) @ S.T
    return 0.5 * (V + V.T)


def _generator_entries(k1, k2, zero):
    # X1' = k1 Xb, P1' = -k1 Pb, Xb' = k1 X1 - k2 X2, Pb' = -k1 P1 - k2 P2,
    # X2' = k2 Xb, P2' = k2 Pb
    z = zero
    return [
        [z, z, k1, z, z, z],
        [z, z, z, -k1, z, z],
        [k1, z, z, z, -k2, z],
        [z, -k1, z, z, z, -k2],
        [z, z, k2, z, z, z],
        [z, z, z, k2, z, z],
    ]


def quadrature_generator(r: float) -> np.ndarray:
    """Generator M of d(xi)/dt' = M xi from the linear Heisenberg equations."""
    root = math.sqrt(_eps(r))
    return np.array(_generator_entries(1.0 / root, r / root, 0.0))


def default_ode_steps(t_prime: float, r: float) -> int:
    M = quadrature_generator(r)
    return max(10_000, math.ceil(8.0 * abs(t_prime) * np.linalg.norm(M, 2)))


def _rk4_step_matrix(M, h, one):
    # the four RK4 stages applied to the identity give the one-step propagator
    k1 = M
    k2 = M * (one + (h / 2) * k1)
    k3 = M * (one + (h / 2) * k2)
    k4 = M * (one + h * k3)
    return one + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def ode_symplectic(t_prime: float, r: float, steps: int | None = None,
                   dps: int | None = None) -> np.ndarray:
    """Fixed-step RK4 solution of dS/dt' = M S, S(0) = I.

    The system is linear and autonomous, so ``steps`` RK4 steps equal R^steps
    with R the one-step propagator. R is built from the RK4 stages in
    extended precision and powered by repeated squaring: marching step by
    step in doubles amplifies rounding by ~(r^2 - 1)^-2 near t' = 2 pi.
    """
    if not r > R_MIN:
        raise ValueError(f"r must exceed 1 + 1e-12, got {r!r}")
    steps = steps or default_ode_steps(t_prime, r)
    h = t_prime / steps
    if t_prime != 0.0 and abs(h) < 1e-300:
        raise ArithmeticError("step size underflow")
    ctx = precise_context(dps or working_dps(r))
    eps = (ctx.mpf(r) - 1) * (ctx.mpf(r) + 1)
    M = ctx.matrix(_generator_entries(1 / ctx.sqrt(eps), ctx.mpf(r) / ctx.sqrt(eps), 0))
    one = ctx.eye(6)
    R = _rk4_step_matrix(M, ctx.mpf(t_prime) / steps, one)
    S, n = one, steps
    while n:
        if n & 1:
            S = S * R
        R = R * R
        n >>= 1
    return np.array(S.tolist(), dtype=float)


def ode_symplectic_march(t_prime: float, r: float, steps: int | None = None) -> np.ndarray:
    """Same RK4 scheme stepped sequentially in double precision."""
    if not r > R_MIN:
        raise ValueError(f"r must exceed 1 + 1e-12, got {r!r}")
    steps = steps or default_ode_steps(t_prime, r)
    h = t_prime / steps
    M = quadrature_generator(r)
    S = np.eye(6)
    for _ in range(steps):
        k1 = M @ S
        k2 = M @ (S + 0.5 * h * k1)
        k3 = M @ (S + 0.5 * h * k2)
        k4 = M @ (S + h * k3)
        S = S + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return S


def ode_oracle(V0: np.ndarray, t_prime: float, r: float, steps: int | None = None) -> np.ndarray:
    S = ode_symplectic(t_prime, r, steps)
    V = S @ np.asarray(V0, dtype=float) @ S.T
    return 0.5 * (V + V.T)


def symplectic_defect(S: np.ndarray) -> float:
    """max |S J S^T - J| divided by max(1, ||S||^2)."""
    J = symplectic_form(S.shape[0] // 2)
    return float(np.max(np.abs(S @ J @ S.T - J)) / max(1.0, np.max(np.abs(S)) ** 2))


def tms_squeezing_parameter(r: float) -> float:
    """Two-mode squeezing of the sideband pair at t' = pi."""
    if not r > 1.0:
        raise ValueError(f"r must exceed 1, got {r!r}")
    eps = _eps(r)
    return math.asinh(2.0 * r * (r * r + 1.0) / eps**2)


def half_period_cm(r: float, n_bar: float) -> np.ndarray:
    """TMS(sidebands) (+) thermal(mirror): the t' = pi matrix written directly."""
    eps = _eps(r)
    a = 4.0 * r * r / eps**2 + 0.5
    f = 2.0 * r * (r * r + 1.0) / eps**2
    V = np.zeros((6, 6))
    V[0, 0] = V[1, 1] = V[4, 4] = V[5, 5] = a
    V[2, 2] = V[3, 3] = n_bar + 0.5
    V[0, 4] = V[4, 0] = f
    V[1, 5] = V[5, 1] = -f
    return V
