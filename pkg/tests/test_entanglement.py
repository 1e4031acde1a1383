import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optomech_cv import dynamics as dyn
from optomech_cv import entanglement as ent
from optomech_cv.gaussian_core import (is_valid_cm, npt_min_eigenvalue, partial_transpose,
                                       symplectic_form)

from reference import simon_invariant

R_REF = 1 + 2.5e-7
L = ent.EntanglementLabel
NBARS = (0.0, 1.0, 1e3, 1e7)


def sp(t, r=R_REF, n=0.0):
    return dyn.ScaledParams(t, r, n)


# --- labels -------------------------------------------------------------------

@pytest.mark.parametrize("etas,label", [
    ((-0.5, -0.5, -0.1), L.FullyInseparable),
    ((-0.5, -0.5, 0.0), L.OneModeBiseparable),
    ((-0.5, 0.2, 0.0), L.TwoModeBiseparable),
    ((0.0, 0.0, 0.0), L.ThreeModeBiseparableOrSeparable),
])
def test_label_from_etas(etas, label):
    assert ent.label_from_etas(etas, 1e-12) is label


def test_label_tolerance_edge():
    assert ent.label_from_etas((-1e-3, -1e-3, -1e-13), 1e-12) is L.OneModeBiseparable
    assert ent.label_from_etas((-1e-3, -1e-3, -1e-11), 1e-12) is L.FullyInseparable


def test_label_str():
    assert str(L.ThreeModeBiseparableOrSeparable) == "4or5"
    assert str(L.FullyInseparable) == "1"


@pytest.mark.parametrize("n", NBARS)
def test_classify_half_period(n):
    c = ent.classify(sp(math.pi, n=n))
    assert c.label is L.OneModeBiseparable
    assert c.eta_1 == pytest.approx(-0.5, abs=1e-9)
    assert c.eta_2 == pytest.approx(-0.5, abs=1e-9)
    assert abs(c.eta_b) <= c.tol


@pytest.mark.parametrize("n", NBARS)
@pytest.mark.parametrize("t", [0.0, 2 * math.pi])
def test_classify_product_state(n, t):
    c = ent.classify(sp(t, n=n))
    assert c.label is L.ThreeModeBiseparableOrSeparable
    assert c.etas == (0.0, 0.0, 0.0) or all(abs(e) <= c.tol for e in c.etas)


@pytest.mark.parametrize("n", NBARS)
@pytest.mark.parametrize("t", [1e-3, 0.7, 2.0, math.pi - 1e-3, math.pi + 1e-3, 4.5,
                               2 * math.pi - 1e-3])
def test_classify_interior(n, t):
    assert ent.classify(sp(t, n=n)).label is L.FullyInseparable


@pytest.mark.parametrize("n", NBARS)
def test_boundary_is_approached_continuously(n):
    # eta_b shrinks towards the half period and stays resolved on both sides
    prev = None
    for d in (0.05, 1e-2, 1e-3, 1e-4, 1e-6):
        below = ent.classify(sp(math.pi - d, n=n))
        above = ent.classify(sp(math.pi + d, n=n))
        assert below.label is above.label is L.FullyInseparable
        assert below.eta_b == pytest.approx(above.eta_b, rel=1e-6)
        if prev is not None:
            assert abs(below.eta_b) < abs(prev)
        prev = below.eta_b


def test_classify_explicit_tolerance():
    c = ent.classify(sp(math.pi - 1e-3, n=1e3), tol=1e-9)
    assert c.label is L.OneModeBiseparable
    assert c.tol == 1e-9


def test_classify_r_moderate():
    assert ent.classify(sp(math.pi, 1.5, 1.0)).label is L.OneModeBiseparable
    assert ent.classify(sp(1.0, 1.5, 1.0)).label is L.FullyInseparable


def test_default_tolerance_tracks_input_rounding():
    # float(pi) misses pi, so eta_b is a tiny genuine negative inside the spread
    c = ent.classify(sp(math.pi))
    assert c.eta_b < 0
    assert ent.input_resolution(sp(math.pi), c.etas) >= abs(c.eta_b)


# --- NPT eigenvalues: second route ---------------------------------------------

def _embedded_min_mp(V, mode):
    W = partial_transpose(V, mode)
    mp = V.ctx
    J = symplectic_form(3)
    n = 6
    R = mp.zeros(2 * n, 2 * n)
    for i in range(n):
        for j in range(n):
            R[i, j] = R[i + n, j + n] = W[i, j]
            R[i, j + n] = -J[i, j] / 2
            R[i + n, j] = J[i, j] / 2
    return min(mp.eigsy(R, eigvals_only=True))


@pytest.mark.parametrize("t", [math.pi / 2, 2.0, 5.0])
def test_npt_dual_eigensolver(t):
    s = sp(t, n=2.0)
    etas, V = ent.npt_etas(s)
    for mode, eta in zip((ent.STOKES, ent.ANTI_STOKES, ent.MIRROR), etas):
        other = _embedded_min_mp(V, mode)
        assert float(other) == pytest.approx(eta, rel=1e-9, abs=1e-20)


def test_npt_eta_matches_classify():
    s = sp(1.3, n=5.0)
    c = ent.classify(s)
    assert ent.npt_eta(s, ent.MIRROR)[0] == c.eta_b
    assert ent.npt_eta(s, ent.STOKES)[0] == c.eta_1


# --- log negativity ------------------------------------------------------------

def test_log_negativity_value():
    s = sp(math.pi / 2, n=1.0)
    assert ent.log_negativity_b(s) == pytest.approx(math.log10(-ent.classify(s).eta_b))


@pytest.mark.parametrize("t", [0.0, 2 * math.pi])
def test_log_negativity_raises_without_entanglement(t):
    with pytest.raises(ent.NoNegativityError):
        ent.log_negativity_b(sp(t, n=1.0))


def test_log_negativity_tolerance_override():
    with pytest.raises(ent.NoNegativityError):
        ent.log_negativity_b(sp(math.pi - 0.05, n=1e3), tol=1e-6)


@pytest.mark.parametrize("t", [0.5, math.pi - 0.05, math.pi + 0.3, 5.0])
def test_mirror_negativity_shrinks_with_temperature(t):
    values = [ent.log_negativity_b(sp(t, n=n)) for n in NBARS]
    assert all(b < a for a, b in zip(values, values[1:])), values


# --- Simon markers -------------------------------------------------------------

_PAIRS = {1: ("b", "2"), 2: ("1", "b"), 3: ("1", "2")}


@given(st.floats(0.0, 2 * math.pi), st.sampled_from([R_REF, 1.0000005, 1.5, 3.0]),
       st.sampled_from([0.0, 1.0, 10.0, 1e3]), st.sampled_from([1, 2, 3]))
@settings(max_examples=60, deadline=None)
def test_markers_match_literal_and_simon_function(t, r, n, j):
    s = sp(t, r, n)
    got = ent.simon_marker(s, j).value
    literal = ent.simon_marker_from_coefficients(dyn.coefficients_mp(s, 80), j)
    simon = simon_invariant(ent.reduced_cm(dyn.full_cm_mp(s, 80), _PAIRS[j]))
    # the unscaled marker is ~(r-1)^-4 large; compare at that scale
    scale = max(1.0, float(abs(literal)), (1 + n) ** 2 / float((r * r - 1) ** 2))
    assert abs(got - float(literal)) <= 1e-9 * scale
    assert abs(got - float(simon)) <= 1e-9 * scale


def test_marker_from_float_coefficients_moderate_r():
    s = sp(2.0, 1.5, 3.0)
    for j in (1, 2, 3):
        got = ent.simon_marker_from_coefficients(dyn.coefficients(s), j)
        assert got == pytest.approx(ent.simon_marker(s, j).value, rel=1e-10)


def test_marker_index_checked():
    with pytest.raises(ValueError):
        ent.simon_marker(sp(1.0), 4)
    with pytest.raises(ValueError):
        ent.SimonMarker(0, 1.0)
    with pytest.raises(ValueError):
        ent.simon_marker_from_coefficients(dyn.coefficients(sp(1.0)), 0)


def test_marker_entangled_flag():
    assert ent.simon_marker(sp(1.0, n=1.0), 3).entangled
    assert not ent.simon_marker(sp(1.0, n=1.0), 1).entangled


def test_marker_vectorized():
    t = np.linspace(0.1, 6.0, 7)
    u = ent.simon_marker_values(t, 1.5, 2.0)
    for i, x in enumerate(t):
        for j in (1, 2, 3):
            assert u[j - 1][i] == ent.simon_marker(sp(float(x), 1.5, 2.0), j).value


def test_stokes_mirror_marker_window():
    # U2 < 0 exactly where sin^2(t'/2) < eps (n+1) / (2 eps n + eps + n)
    n = 1e3
    eps = (R_REF - 1) * (R_REF + 1)
    edge = 2 * math.asin(math.sqrt(eps * (n + 1) / (2 * eps * n + eps + n)))
    assert edge < 2e-3
    for t in (0.5 * edge, 0.99 * edge, 2 * math.pi - 0.5 * edge):
        assert ent.simon_marker(sp(t, n=n), 2).value < 0, t
    for t in (1.01 * edge, 0.1, math.pi, 5.0, 2 * math.pi - 1.01 * edge):
        assert ent.simon_marker(sp(t, n=n), 2).value > 0, t


@pytest.mark.parametrize("t", [5e-4, 1e-3, 1.5e-3, 0.3, 3.0])
@pytest.mark.parametrize("n", [0.0, 1e3])
def test_simon_and_npt_agree_on_stokes_mirror_pair(t, n):
    s = sp(t, n=n)
    V2 = ent.reduced_cm(dyn.full_cm_mp(s), ("1", "b"))
    eta = npt_min_eigenvalue(V2, 1)
    marker = ent.simon_marker(s, 2).value
    assert (eta < 0) == (marker < 0), (eta, marker)


# --- reduced and conditioned matrices ------------------------------------------

def test_reduced_cm_blocks():
    V = dyn.full_cm(sp(1.0, 1.5, 2.0))
    k = dyn.coefficients(sp(1.0, 1.5, 2.0))
    W = ent.reduced_cm(V, ("1", "2"))
    assert np.array_equal(W, ent.reduced_cm(V, (0, 2)))
    assert np.allclose(W, ent.standard_form_cm(k.A + 0.5, k.E + 0.5, k.F))
    Wb = ent.reduced_cm(V, ("1", "b"))
    assert np.allclose(Wb, ent.standard_form_cm(k.A + 0.5, k.B + 0.5, k.C))


def test_reduced_cm_order_swaps_blocks():
    V = dyn.full_cm(sp(1.0, 1.5, 2.0))
    a, b = ent.reduced_cm(V, ("1", "b")), ent.reduced_cm(V, ("b", "1"))
    assert np.array_equal(a[:2, :2], b[2:, 2:])


def test_reduced_cm_mp():
    s = sp(1.0, 1.5, 2.0)
    V = dyn.full_cm_mp(s)
    got = ent.reduced_cm(V, ("b", "2"))
    assert got.ctx is V.ctx
    assert np.allclose(np.array(got.tolist(), dtype=float), ent.reduced_cm(dyn.full_cm(s), (1, 2)))


def test_reduced_cm_errors():
    V = 0.5 * np.eye(6)
    with pytest.raises(ValueError):
        ent.reduced_cm(V, ("1", "1"))
    with pytest.raises(ValueError):
        ent.reduced_cm(V, ("1", "x"))
    with pytest.raises(IndexError):
        ent.reduced_cm(V, (0, 3))
    with pytest.raises(TypeError):
        ent.reduced_cm(V, (0.0, 1))


@pytest.mark.parametrize("t", [0.0, 2 * math.pi])
def test_conditioned_cm_at_product_state(t):
    n = 3.0
    W = ent.heterodyne_conditioned_cm(sp(t, n=n))
    assert np.allclose(W, np.diag([0.5, 0.5, n + 0.5, n + 0.5]), atol=1e-12)


def test_conditioned_cm_half_period():
    # the Stokes mode collapses to vacuum, the mirror keeps its thermal state
    W = ent.heterodyne_conditioned_cm(sp(math.pi, n=2.0))
    assert np.allclose(W, np.diag([0.5, 0.5, 2.5, 2.5]), atol=1e-6)


@pytest.mark.parametrize("r", [1.1, 1.5, 3.0])
@pytest.mark.parametrize("t", [0.4, 1.7, 3.0, 5.2])
def test_conditioned_cm_matches_schur_complement(r, t):
    n = 2.0
    k = dyn.coefficients(sp(t, r, n))
    W = ent.heterodyne_conditioned_cm(sp(t, r, n))
    assert W[0, 0] == pytest.approx(k.A + 0.5 - k.F**2 / (k.E + 1), rel=1e-10)
    assert W[2, 2] == pytest.approx(k.B + 0.5 - k.D**2 / (k.E + 1), rel=1e-10)
    assert W[0, 2] == pytest.approx(k.C + k.F * k.D / (k.E + 1), rel=1e-10, abs=1e-12)


@given(st.floats(0.0, 2 * math.pi), st.sampled_from([R_REF, 1.0000005, 1.5, 3.0]),
       st.sampled_from([0.0, 1.0, 10.0, 1e3]))
@settings(max_examples=100, deadline=None)
def test_conditioned_cm_is_physical_and_smaller(t, r, n):
    s = sp(t, r, n)
    W = ent.heterodyne_conditioned_cm(s)
    assert is_valid_cm(W, tol=1e-9 * max(1.0, np.abs(W).max()))
    k = dyn.coefficients(s)
    assert W[0, 0] <= (k.A + 0.5) * (1 + 1e-12)
    assert W[2, 2] <= (k.B + 0.5) * (1 + 1e-12)
