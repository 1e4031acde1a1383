"""Independent oracles: the coefficient formulas transcribed literally and
evaluated in high precision, plus brute-force linear algebra."""

import mpmath
import numpy as np

DPS = 80


def _ctx():
    ctx = mpmath.MPContext()
    ctx.dps = DPS
    return ctx


def literal_coefficients(t_prime, r, n_bar):
    """(A..F) with the 1 - cos differences left in; exact enough at 80 digits."""
    mp = _ctx()
    x, r, n = mp.mpf(t_prime), mp.mpf(r), mp.mpf(n_bar)
    e = r * r - 1
    k = n * e - 1
    A = ((1 - mp.cos(2 * x)) * k + 4 * r * r * (1 - mp.cos(x))) / (2 * e**2)
    B = ((1 + mp.cos(2 * x)) * n * e + 1 - mp.cos(2 * x)) / (2 * e)
    C = (2 * r * r * mp.sin(x) + k * mp.sin(2 * x)) / (2 * e ** mp.mpf(1.5))
    D = -r * (2 * mp.sin(x) + k * mp.sin(2 * x)) / (2 * e ** mp.mpf(1.5))
    E = r * r * ((1 - mp.cos(2 * x)) * k + 4 * (1 - mp.cos(x))) / (2 * e**2)
    F = r * ((1 - mp.cos(2 * x)) * k + 2 * (1 + r * r) * (1 - mp.cos(x))) / (2 * e**2)
    return A, B, C, D, E, F


def literal_cm(t_prime, r, n_bar):
    A, B, C, D, E, F = literal_coefficients(t_prime, r, n_bar)
    mp = _ctx()
    h = mp.mpf(1) / 2
    return mp.matrix([
        [A + h, 0, C, 0, F, 0],
        [0, A + h, 0, -C, 0, -F],
        [C, 0, B + h, 0, -D, 0],
        [0, -C, 0, B + h, 0, -D],
        [F, 0, -D, 0, E + h, 0],
        [0, -F, 0, -D, 0, E + h],
    ])


def half_period_matrix(r, n_bar):
    """Sideband two-mode squeezed state (+) thermal mirror, written out by hand."""
    mp = _ctx()
    r, n = mp.mpf(r), mp.mpf(n_bar)
    e = r * r - 1
    a = 4 * r * r / e**2 + mp.mpf(1) / 2
    f = 2 * r * (r * r + 1) / e**2
    V = mp.zeros(6, 6)
    V[0, 0] = V[1, 1] = V[4, 4] = V[5, 5] = a
    V[2, 2] = V[3, 3] = n + mp.mpf(1) / 2
    V[0, 4] = V[4, 0] = f
    V[1, 5] = V[5, 1] = -f
    return V


def simon_invariant(V4):
    """Simon's two-mode separability function (vacuum = 1/2 units) on a 4x4 mp matrix.

    Negative means entangled.
    """
    A = V4[0:2, 0:2]
    B = V4[2:4, 2:4]
    C = V4[0:2, 2:4]
    mp = V4.ctx
    J = mp.matrix([[0, 1], [-1, 0]])
    dA, dB, dC = mp.det(A), mp.det(B), mp.det(C)
    tr = sum((A * J * C * J * B * J * C.T * J)[i, i] for i in range(2))
    return dA * dB + (mp.mpf(1) / 4 - abs(dC)) ** 2 - tr - (dA + dB) / 4


def embedded_min_eigenvalue(H):
    """Smallest eigenvalue of the real symmetric 2n x 2n embedding of Hermitian H."""
    H = np.asarray(H, dtype=complex)
    R = np.block([[H.real, -H.imag], [H.imag, H.real]])
    return float(np.linalg.eigvalsh(R)[0])


def thermal_entropy_bits(n_bar):
    if n_bar == 0:
        return 0.0
    return float((n_bar + 1) * np.log2(n_bar + 1) - n_bar * np.log2(n_bar))
