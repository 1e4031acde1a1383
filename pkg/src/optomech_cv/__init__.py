"""Three-mode Gaussian optomechanics: dynamics, entanglement and teleportation."""

__version__ = "0.1.0"

from .dynamics import (Couplings, CoefficientSet, PhysicalParams, ScaledParams,  # noqa: E402
                       coefficients, couplings_from_physical, full_cm)
from .entanglement import (EntanglementClass, EntanglementLabel, SimonMarker,  # noqa: E402
                           classify, log_negativity_b, simon_marker)
from .gaussian_core import NumericalError  # noqa: E402
from .teleportation import (ChannelKind, effective_thermal_number,  # noqa: E402
                            fidelity_heterodyne, fidelity_traced, information_gain,
                            optimal_fidelity_scan)
