"""Named scalar quantities addressable from sweeps."""

from __future__ import annotations

import math

from . import dynamics as dyn
from . import entanglement as ent
from . import teleportation as tel

DEFAULT_CLAMP_LOG = -16.0


class _Point:
    """Per-point cache so several eta columns share one eigen-solve."""

    def __init__(self, s: dyn.ScaledParams, clamp_log: float):
        self.s = s
        self.clamp_log = clamp_log
        self._coeffs = None
        self._cls = None
        self._eta_b = None

    @property
    def coeffs(self) -> dyn.CoefficientSet:
        if self._coeffs is None:
            self._coeffs = dyn.coefficients(self.s)
        return self._coeffs

    @property
    def cls(self) -> ent.EntanglementClass:
        if self._cls is None:
            self._cls = ent.classify(self.s)
        return self._cls

    def eta_b(self):
        if self._cls is not None:
            return self._cls.eta_b, self._cls.tol
        if self._eta_b is None:
            self._eta_b = ent.npt_eta(self.s, ent.MIRROR)
        return self._eta_b

    def log_neg(self):
        eta_b, tol = self.eta_b()
        if eta_b >= -tol:
            return self.clamp_log, 1.0
        value = math.log10(-eta_b)
        if value < self.clamp_log:
            return self.clamp_log, 1.0
        return value, 0.0


def _coef(name):
    return lambda p: getattr(p.coeffs, name)


REGISTRY = {
    "A": _coef("A"),
    "B": _coef("B"),
    "C": _coef("C"),
    "D": _coef("D"),
    "E": _coef("E"),
    "F": _coef("F"),
    "eta_1": lambda p: p.cls.eta_1,
    "eta_2": lambda p: p.cls.eta_2,
    "eta_b": lambda p: p.cls.eta_b,
    "class_label": lambda p: {"4or5": 4.5}.get(p.cls.label.value, p.cls.label.value),
    "upsilon1": lambda p: ent.simon_marker(p.s, 1).value,
    "upsilon2": lambda p: ent.simon_marker(p.s, 2).value,
    "upsilon3": lambda p: ent.simon_marker(p.s, 3).value,
    "fidelity_traced": lambda p: tel.fidelity_traced(p.s).fidelity,
    "fidelity_het": lambda p: tel.fidelity_heterodyne(p.s).fidelity,
    "info_gain": lambda p: tel.information_gain(p.s),
    "n_eff": lambda p: tel.effective_thermal_number(p.s),
    "log_neg_b": lambda p: p.log_neg()[0],
    "log_neg_b_flag": lambda p: p.log_neg()[1],
}

DESCRIPTIONS = {
    "A": "Stokes excess variance",
    "B": "mirror excess variance",
    "C": "Stokes-mirror correlation",
    "D": "mirror-anti-Stokes correlation (sign as in the CM)",
    "E": "anti-Stokes excess variance",
    "F": "Stokes-anti-Stokes correlation",
    "eta_1": "NPT test eigenvalue, Stokes transposed",
    "eta_2": "NPT test eigenvalue, anti-Stokes transposed",
    "eta_b": "NPT test eigenvalue, mirror transposed",
    "class_label": "entanglement class (4.5 encodes 4or5)",
    "upsilon1": "Simon marker, Stokes traced out",
    "upsilon2": "Simon marker, anti-Stokes traced out",
    "upsilon3": "Simon marker, mirror traced out",
    "fidelity_traced": "teleportation fidelity, anti-Stokes discarded",
    "fidelity_het": "teleportation fidelity, anti-Stokes heterodyned",
    "info_gain": "entropy difference of the two channels (bits)",
    "n_eff": "effective thermal number of the heterodyne channel",
    "log_neg_b": "log10|eta_b|, clamped",
    "log_neg_b_flag": "1 where log_neg_b was clamped",
}


def check_names(names) -> None:
    unknown = [n for n in names if n not in REGISTRY]
    if unknown:
        raise KeyError(f"unknown quantities: {', '.join(unknown)}")


def evaluate(s: dyn.ScaledParams, names, clamp_log: float = DEFAULT_CLAMP_LOG) -> list:
    check_names(names)
    point = _Point(s, clamp_log)
    return [float(REGISTRY[n](point)) for n in names]
