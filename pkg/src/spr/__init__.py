"""Smith-Purcell radiation of non-paraxial electron wave packets.

Charge, charge-quadrupole interference and quadrupole contributions to the
radiation of a spreading packet passing over a finite strip grating,
including inclined passage.
"""
from .packets import (LAMBDA_C, T_C, C_LIGHT, Gaussian, LaguerreGauss, PacketSpec, QuadrupoleLaw,
                      quadrupole_law, diffraction_time, mean_radius)
from .geometry import GratingSpec, Observation, regime_report, critical_angle, max_strips

__all__ = [
    "LAMBDA_C", "T_C", "C_LIGHT", "Gaussian", "LaguerreGauss", "PacketSpec", "QuadrupoleLaw",
    "quadrupole_law", "diffraction_time", "mean_radius", "GratingSpec", "Observation",
    "regime_report", "critical_angle", "max_strips",
]
__version__ = "0.1.0"
