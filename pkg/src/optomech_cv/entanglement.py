"""Entanglement structure of the three-mode state.

Mode positions inside the 6x6 matrix are STOKES=0, MIRROR=1, ANTI_STOKES=2.
The NPT eigenvalues are computed on an extended-precision copy of the
covariance matrix: its entries reach ~1e13 while the eigenvalues that decide
the class are O(1) or exactly zero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import dynamics as dyn
from .gaussian_core import _is_mp, default_tolerance, npt_min_eigenvalue

STOKES, MIRROR, ANTI_STOKES = 0, 1, 2
MODE_NAMES = ("1", "b", "2")


class EntanglementLabel(enum.Enum):
    FullyInseparable = 1
    OneModeBiseparable = 2
    TwoModeBiseparable = 3
    ThreeModeBiseparableOrSeparable = "4or5"

    def __str__(self):
        return str(self.value)


class NoNegativityError(ValueError):
    """Raised when the mirror test-matrix eigenvalue is not negative."""


@dataclass(frozen=True)
class EntanglementClass:
    label: EntanglementLabel
    etas: tuple  # (eta_1, eta_2, eta_b)
    tol: float

    @property
    def eta_1(self):
        return self.etas[0]

    @property
    def eta_2(self):
        return self.etas[1]

    @property
    def eta_b(self):
        return self.etas[2]


@dataclass(frozen=True)
class SimonMarker:
    j: int  # traced mode: 1 Stokes, 2 anti-Stokes, 3 mirror
    value: float

    def __post_init__(self):
        if self.j not in (1, 2, 3):
            raise ValueError(f"marker index must be 1, 2 or 3, got {self.j!r}")

    @property
    def entangled(self) -> bool:
        return self.value < 0


def label_from_etas(etas, tol: float) -> EntanglementLabel:
    passing = sum(1 for e in etas if e >= -tol)
    return {
        0: EntanglementLabel.FullyInseparable,
        1: EntanglementLabel.OneModeBiseparable,
        2: EntanglementLabel.TwoModeBiseparable,
        3: EntanglementLabel.ThreeModeBiseparableOrSeparable,
    }[passing]


_NPT_MODES = (STOKES, ANTI_STOKES, MIRROR)


def _etas_of(V, modes):
    return tuple(npt_min_eigenvalue(V, k) for k in modes)


def input_resolution(s: dyn.ScaledParams, etas, modes=_NPT_MODES) -> float:
    """Largest change of the etas when t' moves to a neighbouring double.

    A state that is marginal at t' = m pi is not marginal at float(m pi):
    float(pi) misses pi by 1.2e-16, which leaves eta_b ~ -3e-20. Values
    inside this spread cannot be told apart from zero given the input.
    """
    spread = 0.0
    for direction in (-math.inf, math.inf):
        near = s.at(float(np.nextafter(s.t_prime, direction)))
        others = _etas_of(dyn.full_cm_mp(near), modes)
        spread = max(spread, *(abs(a - b) for a, b in zip(etas, others)))
    return spread


def npt_etas(s: dyn.ScaledParams, dps: int | None = None):
    """(eta_1, eta_2, eta_b) and the extended-precision CM they came from."""
    V = dyn.full_cm_mp(s, dps)
    return _etas_of(V, _NPT_MODES), V


def npt_eta(s: dyn.ScaledParams, mode: int):
    """(eta, default tolerance) for a single transposed mode."""
    V = dyn.full_cm_mp(s)
    (eta,) = _etas_of(V, (mode,))
    return eta, max(default_tolerance(V), input_resolution(s, (eta,), (mode,)))


def classify(s: dyn.ScaledParams, tol: float | None = None) -> EntanglementClass:
    """Class from the NPT eigenvalues.

    Default tolerance: rounding bound of the extended-precision eigenvalues
    plus :func:`input_resolution`.
    """
    etas, V = npt_etas(s)
    if tol is None:
        tol = max(default_tolerance(V), input_resolution(s, etas))
    return EntanglementClass(label_from_etas(etas, tol), etas, tol)


def log_negativity_b(s: dyn.ScaledParams, tol: float | None = None) -> float:
    """log10 |eta_b|; raises NoNegativityError when eta_b is not negative."""
    eta_b, default_tol = npt_eta(s, MIRROR)
    tol = default_tol if tol is None else tol
    if eta_b >= -tol:
        raise NoNegativityError(f"eta_b = {eta_b!r} is not negative at {s}")
    return math.log10(-eta_b)


def _markers(v, n_bar):
    # factored forms of the three markers; y^2 = w/eps keeps every factor O(1)
    r, w, eps = v.r, v.w, v.eps
    y2 = v.y * v.y
    y4 = y2 * y2
    u1 = 4 * n_bar * (n_bar + 1) * r * r * y4 * (1 + 2 * y2) ** 2
    u3 = -4 * r * r * y4 * ((1 + 2 * y2) ** 2 + 4 * n_bar * y2 * (1 - w) * (eps + 2))
    pos = ((n_bar + 1) - 4 * n_bar * w * (1 - w) + 4 * y2 + 4 * y4 * (1 + n_bar)
           + 4 * n_bar * w * y2)
    u2 = 4 * y2 * (y2 * (2 * eps * n_bar + eps + n_bar) - (n_bar + 1)) * pos
    return u1, u2, u3


def simon_marker_values(t_prime, r, n_bar):
    """(U1, U2, U3) for scalar or array t_prime."""
    return _markers(dyn.phase_variables(t_prime, r), n_bar)


def simon_marker(s: dyn.ScaledParams, j: int) -> SimonMarker:
    if j not in (1, 2, 3):
        raise ValueError(f"marker index must be 1, 2 or 3, got {j!r}")
    return SimonMarker(j, float(simon_marker_values(s.t_prime, s.r, s.n_bar)[j - 1]))


def simon_marker_from_coefficients(k: dyn.CoefficientSet, j: int):
    """Marker evaluated term by term from the alias table.

    Loses all precision for r near 1 in double precision; pass a
    CoefficientSet with mpf fields (``coefficients_mp``) there.
    """
    if j not in (1, 2, 3):
        raise ValueError(f"marker index must be 1, 2 or 3, got {j!r}")
    a = k.alphas
    p, q, m = a[j], a[j + 1], a[j + 4]
    # 0.25 and 0.0625 are exact binary fractions, so mpf fields stay exact
    return ((p * q + 0.25 + (p + q) / 2 - m * m) ** 2 + 0.0625
            - m * m / 2 - (p / 2 + 0.25) ** 2 - (q / 2 + 0.25) ** 2)


def _mode_position(m) -> int:
    if isinstance(m, str):
        if m not in MODE_NAMES:
            raise ValueError(f"unknown mode name {m!r}")
        return MODE_NAMES.index(m)
    if isinstance(m, (int, np.integer)) and not isinstance(m, bool):
        return int(m)
    raise TypeError(f"mode must be a position or one of {MODE_NAMES}, got {m!r}")


def reduced_cm(V, keep):
    """Two-mode CM of the modes in ``keep`` (positions or names "1", "b", "2")."""
    i, j = (_mode_position(m) for m in keep)
    n = V.rows // 2 if _is_mp(V) else np.shape(V)[0] // 2
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"modes {keep!r} out of range for {n} modes")
    if i == j:
        raise ValueError("keep must name two distinct modes")
    idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
    if _is_mp(V):
        out = V.ctx.matrix(4, 4)
        for a, p in enumerate(idx):
            for b, q in enumerate(idx):
                out[a, b] = V[p, q]
        return out
    return np.asarray(V, dtype=float)[np.ix_(idx, idx)]


def standard_form_cm(a, b, c) -> np.ndarray:
    """[[a,0,c,0],[0,a,0,-c],[c,0,b,0],[0,-c,0,b]]."""
    return np.array([[a, 0, c, 0], [0, a, 0, -c], [c, 0, b, 0], [0, -c, 0, b]], dtype=float)


def conditioned_entries(t_prime, r, n_bar):
    """Numerators N1, N2, N3 and common denominator P of the conditioned CM.

    a' = N1/P, b' = N2/P, c' = N3/P equal A + 1/2 - F^2/(E+1),
    B + 1/2 - D^2/(E+1) and C + F D/(E+1), with the cancellations done
    analytically.
    """
    v = dyn.phase_variables(t_prime, r)
    y2, w, eps, n = v.y * v.y, v.w, v.eps, n_bar
    y4 = y2 * y2
    P = 1 + 4 * v.r * v.r * y2 * (y2 + n * v.c * v.c)
    base = 1 + 8 * y2 + 4 * y4 * (1 - eps)
    N1 = (base + 12 * n * y2 * (1 - w) + 4 * n * w * (1 - w)) / 2
    N2 = (base + 2 * n + 4 * n * y2 + 8 * n * y4 + 4 * n * w * y2
          - 4 * n * w + 4 * n * w * w) / 2
    N3 = 2 * v.c * v.y * (n + 1) * (2 * y2 + 1)
    return N1, N2, N3, P


def heterodyne_conditioned_cm(s: dyn.ScaledParams) -> np.ndarray:
    """Stokes-mirror CM after heterodyning the anti-Stokes mode."""
    N1, N2, N3, P = conditioned_entries(s.t_prime, s.r, s.n_bar)
    return standard_form_cm(N1 / P, N2 / P, N3 / P)
