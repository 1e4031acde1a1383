"""Symplectic linear algebra for Gaussian covariance matrices.

Conventions: quadratures ordered (X1, P1, X2, P2, ...), X = (a + a^dag)/sqrt(2),
so the vacuum covariance matrix is identity/2.

Functions accept either numpy arrays (double precision) or ``mpmath.matrix``
objects; the latter are routed through mpmath's Hermitian eigensolver, which is
what the state-family code uses when entries span ~25 orders of magnitude.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import mpmath
import numpy as np
from mpmath.matrices.matrices import _matrix as _MPMatrix

_local = threading.local()


def precise_context(dps: int) -> mpmath.ctx_mp.MPContext:
    """Thread-local mpmath context at ``dps`` decimal digits.

    Private contexts keep the global ``mpmath.mp`` precision untouched, so
    concurrent callers at different precisions do not interfere.
    """
    cache = getattr(_local, "contexts", None)
    if cache is None:
        cache = _local.contexts = {}
    ctx = cache.get(dps)
    if ctx is None:
        ctx = mpmath.MPContext()
        ctx.dps = dps
        cache[dps] = ctx
    return ctx


class NumericalError(RuntimeError):
    """An eigensolver failed or a result violated a physical bound."""


@dataclass(frozen=True)
class EntropyPair:
    """Symplectic eigenvalues of a two-mode covariance matrix."""

    n_plus: float
    n_minus: float

    def is_pure(self, tol: float = 1e-9) -> bool:
        return abs(self.n_plus - 0.5) <= tol and abs(self.n_minus - 0.5) <= tol


def _is_mp(V) -> bool:
    return isinstance(V, _MPMatrix)


def n_modes_of(V) -> int:
    rows = V.rows if _is_mp(V) else np.shape(V)[0]
    if rows % 2:
        raise ValueError(f"covariance matrix must have even dimension, got {rows}")
    return rows // 2


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form, one [[0, 1], [-1, 0]] block per mode."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def partial_transpose(V, mode_index: int):
    """Flip the sign of mode ``mode_index``'s momentum row and column."""
    n = n_modes_of(V)
    if not 0 <= mode_index < n:
        raise IndexError(f"mode_index {mode_index} out of range for {n} modes")
    p = 2 * mode_index + 1
    if _is_mp(V):
        out = V.copy()
        for i in range(2 * n):
            if i != p:
                out[p, i] = -out[p, i]
                out[i, p] = -out[i, p]
        return out
    out = np.array(V, dtype=float, copy=True)
    out[p, :] *= -1.0
    out[:, p] *= -1.0
    return out


def _test_matrix_np(V: np.ndarray) -> np.ndarray:
    return np.asarray(V, dtype=complex) + 0.5j * symplectic_form(n_modes_of(V))


def _test_matrix_mp(V):
    ctx = V.ctx
    H = ctx.matrix(V.rows, V.cols)
    for i in range(V.rows):
        for j in range(V.cols):
            H[i, j] = ctx.mpc(V[i, j])
    half_i = ctx.mpc(0, 0.5)
    for k in range(V.rows // 2):
        H[2 * k, 2 * k + 1] += half_i
        H[2 * k + 1, 2 * k] -= half_i
    return H


def min_uncertainty_eigenvalue(V) -> float:
    """Smallest eigenvalue of V + (i/2) J; negative means unphysical."""
    if _is_mp(V):
        try:
            ev = V.ctx.eighe(_test_matrix_mp(V), eigvals_only=True)
        except Exception as exc:  # mpmath raises bare exceptions on non-convergence
            raise NumericalError(f"mpmath eigensolver failed: {exc}") from exc
        return float(min(ev))
    try:
        return float(np.linalg.eigvalsh(_test_matrix_np(V))[0])
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc


def npt_min_eigenvalue(V, mode_index: int) -> float:
    """Minimum eigenvalue of the partially transposed test matrix.

    Negative means the split (mode_index | rest) is entangled.
    """
    return min_uncertainty_eigenvalue(partial_transpose(V, mode_index))


def default_tolerance(V) -> float:
    """1e-9 relative to the largest entry, at double precision.

    For extended-precision matrices the relative factor shrinks with the
    working precision: 1e-9 * 10**(16 - dps).
    """
    if _is_mp(V):
        scale = max(abs(V[i, j]) for i in range(V.rows) for j in range(V.cols))
        return float(max(1, scale)) * 10.0 ** (7 - V.ctx.dps)
    return 1e-9 * max(1.0, float(np.max(np.abs(V))))


def is_valid_cm(V, tol: float | None = None) -> bool:
    """True iff V is square, symmetric and satisfies V + (i/2) J >= -tol."""
    arr = np.array(V.tolist(), dtype=float) if _is_mp(V) else np.asarray(V, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] % 2:
        return False
    if not np.all(np.isfinite(arr)):
        return False
    if tol is None:
        tol = default_tolerance(V)
    if np.max(np.abs(arr - arr.T)) > tol:
        return False
    try:
        return min_uncertainty_eigenvalue(V) >= -tol
    except NumericalError:
        return False


def _blocks(V):
    if n_modes_of(V) != 2:
        raise ValueError("expected a two-mode (4x4) covariance matrix")
    V = np.asarray(V.tolist() if _is_mp(V) else V, dtype=float)
    return V[:2, :2], V[2:, 2:], V[:2, 2:]


def symplectic_eigenvalues_2mode(V, tol: float = 1e-9) -> EntropyPair:
    """Closed-form symplectic spectrum of a 4x4 covariance matrix.

    Uses Delta = det A + det B + 2 det C and n_+- = sqrt((Delta +- sqrt(Delta^2 - 4 det V)) / 2).
    The smaller eigenvalue is recovered as sqrt(det V) / n_+ to avoid cancellation.
    """
    A, B, C = _blocks(V)
    full = np.block([[A, C], [C.T, B]])
    delta = np.linalg.det(A) + np.linalg.det(B) + 2.0 * np.linalg.det(C)
    det_v = np.linalg.det(full)
    scale = max(1.0, delta * delta)
    disc = delta * delta - 4.0 * det_v
    if disc < -tol * scale:
        raise NumericalError(f"negative discriminant {disc:.3e}: not a valid covariance matrix")
    if det_v < -tol * scale:
        raise NumericalError(f"negative determinant {det_v:.3e}: not a valid covariance matrix")
    n_plus = math.sqrt((delta + math.sqrt(max(disc, 0.0))) / 2.0)
    n_minus = math.sqrt(max(det_v, 0.0)) / n_plus if n_plus > 0 else 0.0
    return EntropyPair(n_plus, n_minus)


def _g(n: float) -> float:
    # entropy contribution of one symplectic eigenvalue, in bits
    lo = n - 0.5
    if lo <= 0.0:
        return 0.0
    return (n + 0.5) * math.log2(n + 0.5) - lo * math.log2(lo)


def entropy_from_pair(pair: EntropyPair, tol: float = 1e-9) -> float:
    for n in (pair.n_plus, pair.n_minus):
        if n < 0.5 - tol:
            raise NumericalError(f"symplectic eigenvalue {n!r} below 1/2")
    return _g(pair.n_plus) + _g(pair.n_minus)


def von_neumann_entropy(V, tol: float = 1e-9) -> float:
    """Von Neumann entropy (bits) of a two-mode Gaussian state."""
    return entropy_from_pair(symplectic_eigenvalues_2mode(V, tol), tol)


def thermal_entropy(n_bar: float) -> float:
    """Entropy (bits) of a single-mode thermal state with mean occupation n_bar."""
    return _g(n_bar + 0.5)
