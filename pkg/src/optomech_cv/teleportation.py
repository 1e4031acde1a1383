"""Coherent-state teleportation through the Stokes-mirror channel.

Two channels are compared: the anti-Stokes mode simply discarded, or
heterodyned with the outcome fed forward to the mirror. Closed forms are
written in the half-angle variables of :mod:`dynamics`; for r - 1 ~ 1e-7 the
textbook expressions subtract numbers of order 1e13 to get O(1) results.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import dynamics as dyn
from .entanglement import MIRROR, STOKES, heterodyne_conditioned_cm, reduced_cm
from .gaussian_core import EntropyPair, entropy_from_pair

PEAK_WINDOW = 0.1
SCAN_POINTS = 20_000
TIE_TOL = 1e-15


class ChannelKind(enum.Enum):
    TracedOut = "traced"
    HeterodyneConditioned = "heterodyne"


@dataclass(frozen=True)
class TeleportChannel:
    kind: ChannelKind
    cm: np.ndarray  # (X1, P1, Xb, Pb)


@dataclass(frozen=True)
class FidelityPoint:
    t_prime: float
    fidelity: float
    kind: ChannelKind

    @property
    def beats_classical(self) -> bool:
        return self.fidelity > 0.5


@dataclass(frozen=True)
class ReadoutCoefficients:
    c_bdag: float
    c_a1: float
    c_a2dag: float

    def dominance_ratio(self) -> float:
        return abs(self.c_bdag) / max(abs(self.c_a1), abs(self.c_a2dag))


def channel(s: dyn.ScaledParams, kind: ChannelKind) -> TeleportChannel:
    if kind is ChannelKind.TracedOut:
        cm = reduced_cm(dyn.full_cm(s), (STOKES, MIRROR))
    elif kind is ChannelKind.HeterodyneConditioned:
        cm = heterodyne_conditioned_cm(s)
    else:
        raise ValueError(f"unknown channel kind {kind!r}")
    return TeleportChannel(kind, cm)


def teleport_output_cm(V_in, ch: TeleportChannel) -> np.ndarray:
    """Output CM of the receiver mode for a single-mode Gaussian input."""
    V_in = np.asarray(V_in, dtype=float)
    if V_in.shape != (2, 2):
        raise ValueError("input must be a single-mode (2x2) covariance matrix")
    V = ch.cm
    xx = V[0, 0] + 2 * V[0, 2] + V[2, 2]
    xp = V[0, 3] - V[0, 1] + V[2, 3] - V[1, 2]
    pp = V[1, 1] - 2 * V[1, 3] + V[3, 3]
    return V_in + np.array([[xx, xp], [xp, pp]])


def _traced_sum(v, n_bar):
    # 1 + A + B + 2C
    q = 2 * v.c * v.y
    return (1 + q + 2 * v.y**2) ** 2 + n_bar * (v.cx + q) ** 2


def _traced_difference(v, n_bar):
    # 1 + A + B - 2C
    q = 2 * v.c * v.y
    return (1 - q + 2 * v.y**2) ** 2 + n_bar * (v.cx - q) ** 2


def _het_denominator(v, n_bar):
    # E + 1
    y2 = v.y**2
    return 1 + 4 * v.r**2 * y2 * (y2 + n_bar * v.c**2)


def effective_thermal_values(t_prime, r, n_bar):
    """n_eff = 1 + A + B + 2C - (F - D)^2/(E + 1), array-capable."""
    v = dyn.phase_variables(t_prime, r)
    return (n_bar + 1) * (1 + 2 * v.c * v.y + 2 * v.y**2) ** 2 / _het_denominator(v, n_bar)


def fidelity_values(t_prime, r, n_bar, kind: ChannelKind):
    """Coherent-state fidelity for scalar or array t_prime."""
    if kind is ChannelKind.TracedOut:
        return 1.0 / (1.0 + _traced_sum(dyn.phase_variables(t_prime, r), n_bar))
    if kind is ChannelKind.HeterodyneConditioned:
        return 1.0 / (1.0 + effective_thermal_values(t_prime, r, n_bar))
    raise ValueError(f"unknown channel kind {kind!r}")


def fidelity_traced(s: dyn.ScaledParams) -> FidelityPoint:
    return FidelityPoint(s.t_prime, float(fidelity_values(s.t_prime, s.r, s.n_bar,
                                                          ChannelKind.TracedOut)),
                         ChannelKind.TracedOut)


def fidelity_heterodyne(s: dyn.ScaledParams) -> FidelityPoint:
    kind = ChannelKind.HeterodyneConditioned
    return FidelityPoint(s.t_prime, float(fidelity_values(s.t_prime, s.r, s.n_bar, kind)), kind)


def effective_thermal_number(s: dyn.ScaledParams) -> float:
    return float(effective_thermal_values(s.t_prime, s.r, s.n_bar))


def _pair(t_plus, t_minus, gap, det_root) -> EntropyPair:
    # standard-form spectrum: n+ = (sqrt(T+ T-) + |a - b|)/2, n+ n- = ab - c^2
    n_plus = (math.sqrt(t_plus * t_minus) + gap) / 2
    return EntropyPair(n_plus, det_root / n_plus)


def channel_spectrum(s: dyn.ScaledParams, kind: ChannelKind) -> EntropyPair:
    """Symplectic eigenvalues of the channel CM without forming it."""
    v = dyn.phase_variables(s.t_prime, s.r)
    n, y2, w = s.n_bar, v.y**2, v.w
    y4 = y2 * y2
    if kind is ChannelKind.TracedOut:
        A, B, *_ = dyn.coefficient_values(s.t_prime, s.r, n)
        det4 = ((1 + 2 * n) * (1 + 8 * y4) - 8 * n * y2 + 8 * w * y2 * (1 + 3 * n)
                - 8 * n * w * (1 - w))
        return _pair(float(_traced_sum(v, n)), float(_traced_difference(v, n)),
                     abs(float(A - B)), det4 / 4)
    if kind is ChannelKind.HeterodyneConditioned:
        P = _het_denominator(v, n)
        t_plus = (n + 1) * (1 + 2 * v.c * v.y + 2 * y2) ** 2 / P
        t_minus = (n + 1) * (1 - 2 * v.c * v.y + 2 * y2) ** 2 / P
        gap = n * (1 - 2 * y2 - 2 * w) ** 2 / P
        Q = ((1 + 2 * n) * (1 + 4 * y4) - 4 * n * y2 + 4 * w * y2 * (1 + 3 * n)
             - 4 * n * w * (1 - w))
        return _pair(float(t_plus), float(t_minus), float(gap), float(Q / (4 * P)))
    raise ValueError(f"unknown channel kind {kind!r}")


def information_gain(s: dyn.ScaledParams) -> float:
    """Entropy (bits) removed from the channel by heterodyning the anti-Stokes mode."""
    return float(entropy_from_pair(channel_spectrum(s, ChannelKind.TracedOut))
                 - entropy_from_pair(channel_spectrum(s, ChannelKind.HeterodyneConditioned)))


def feedforward_gains(s: dyn.ScaledParams):
    """(gX_hom, gP_hom, gX_het, gP_het) for the receiver's displacement."""
    _, _, _, D, E, F = dyn.coefficient_values(s.t_prime, s.r, s.n_bar)
    root2 = math.sqrt(2.0)
    return root2, -root2, float(root2 * (F - D) / (E + 1)), float(root2 * (F + D) / (E + 1))


def readout_coefficients(t: float, c: dyn.Couplings) -> ReadoutCoefficients:
    """Coefficients of b^dag(0), a1(0), a2^dag(0) in Z(t) = a1(t) - a2^dag(t).

    t is physical time in seconds. 1 - cos is written as 2 sin^2 to keep the
    optical coefficients accurate when Theta << chi.
    """
    big = c.big_theta
    if not big > 0:
        raise ValueError("Theta must be positive")
    phase = big * t
    one_minus_cos = 2.0 * math.sin(phase / 2) ** 2
    total = c.chi + c.theta
    return ReadoutCoefficients(
        c_bdag=total * math.sin(phase) / big,
        c_a1=1.0 - c.chi * one_minus_cos / total,
        c_a2dag=-1.0 + c.theta * one_minus_cos / total,
    )


def optimal_fidelity_scan(t_range, r: float, n_bar: float, kind: ChannelKind,
                          points: int = SCAN_POINTS):
    """(t'_max, F_max) over ``t_range``: grid scan, then golden-section refinement.

    Ties on the grid (within 1e-15) go to the smallest t'.
    """
    lo, hi = t_range if t_range is not None else (dyn.TWO_PI - PEAK_WINDOW, dyn.TWO_PI)
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise ValueError(f"empty scan range ({lo!r}, {hi!r})")
    if points < 3:
        raise ValueError("points must be >= 3")
    dyn.ScaledParams(lo, r, n_bar)  # validates r and n_bar
    grid = np.linspace(lo, hi, points)
    f = fidelity_values(grid, r, n_bar, kind)
    i = int(np.flatnonzero(f >= f.max() - TIE_TOL)[0])
    best_t, best_f = float(grid[i]), float(f[i])
    if 0 < i < points - 1:
        res = optimize.minimize_scalar(
            lambda t: -float(fidelity_values(t, r, n_bar, kind)),
            bracket=(grid[i - 1], grid[i], grid[i + 1]),
            method="golden", options={"xtol": 1e-13},
        )
        t_ref = float(res.x)
        if lo <= t_ref <= hi and -res.fun > best_f:
            best_t, best_f = t_ref, float(-res.fun)
    return best_t, best_f
