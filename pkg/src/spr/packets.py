"""Electron wave packets and their intrinsic quadrupole-moment law.

Internal units: c = 1, lengths and times in centimetres.  The radiation
pipeline only accepts axially symmetric packets, whose quadrupole tensor is
``Q(t) diag(1, 1, -2)`` with ``Q(t) = q0 + q2 t**2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Compton wavelength of the electron [cm]
LAMBDA_C = 3.9e-11
#: Compton time [s]
T_C = 1.3e-21
#: speed of light implied by the two constants above [cm/s]
C_LIGHT = LAMBDA_C / T_C
#: electron mass as an inverse length [1/cm]
ELECTRON_MASS = 1.0 / LAMBDA_C


@dataclass(frozen=True)
class Constants:
    lambda_c: float = LAMBDA_C
    t_c: float = T_C

    @property
    def electron_mass(self) -> float:
        return 1.0 / self.lambda_c


class PacketError(ValueError):
    pass


@dataclass(frozen=True)
class LaguerreGauss:
    """Vortex packet with mean radius ``rho0`` [cm] and OAM ``ell``."""

    rho0: float
    ell: int

    def __post_init__(self):
        if not self.rho0 > 0:
            raise PacketError("rho0 must be positive")
        if int(self.ell) != self.ell:
            raise PacketError("ell must be an integer")


@dataclass(frozen=True)
class Gaussian:
    """Axially symmetric Gaussian packet, widths in cm."""

    sigma_perp: float
    sigma_z: float

    def __post_init__(self):
        if not (self.sigma_perp > 0 and self.sigma_z > 0):
            raise PacketError("Gaussian widths must be positive")


@dataclass(frozen=True)
class PacketSpec:
    variant: LaguerreGauss | Gaussian
    beta: float
    #: +1 flips the Gaussian q2 to the sign without the leading minus
    gauss_q2_sign: int = -1

    def __post_init__(self):
        if not 0 < self.beta < 1:
            raise PacketError("beta must lie in (0, 1)")
        if self.gauss_q2_sign not in (-1, 1):
            raise PacketError("gauss_q2_sign must be +1 or -1")

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.beta**2)

    @property
    def energy(self) -> float:
        """Electron energy gamma*m as an inverse length."""
        return self.gamma * ELECTRON_MASS

    @property
    def is_vortex(self) -> bool:
        return isinstance(self.variant, LaguerreGauss)

    @property
    def size(self) -> float:
        """Characteristic transverse size used by the validity checks."""
        v = self.variant
        if isinstance(v, LaguerreGauss):
            return v.rho0
        return max(v.sigma_perp, v.sigma_z)

    @property
    def ell(self) -> int:
        return int(self.variant.ell) if self.is_vortex else 0


@dataclass(frozen=True)
class QuadrupoleLaw:
    """Q(t) = q0 + q2 t^2 with q0 in cm^2 and q2 dimensionless."""

    q0: float
    q2: float

    def __call__(self, t):
        return self.q0 + self.q2 * np.asarray(t) ** 2

    def scaled(self, factor: float) -> "QuadrupoleLaw":
        return QuadrupoleLaw(factor * self.q0, factor * self.q2)

    @property
    def is_zero(self) -> bool:
        return self.q0 == 0 and self.q2 == 0


ZERO_LAW = QuadrupoleLaw(0.0, 0.0)


def quadrupole_law(packet: PacketSpec) -> QuadrupoleLaw:
    v = packet.variant
    if isinstance(v, LaguerreGauss):
        return QuadrupoleLaw(v.rho0**2, v.ell**2 * LAMBDA_C**2 / v.rho0**2)
    q0 = v.sigma_perp**2 - v.sigma_z**2
    q2 = packet.gauss_q2_sign * q0 * LAMBDA_C**2 / (4 * v.sigma_perp**2 * v.sigma_z**2)
    return QuadrupoleLaw(q0, q2)


def diffraction_time(packet: PacketSpec):
    """Diffraction (Rayleigh) time in cm.

    For an LG packet this is ``rho0**2 / (|ell| lambda_c)``.  A Gaussian packet
    has no single such time; the pair ``(t_perp, t_z)`` with
    ``t_i = 2 sigma_i**2 / lambda_c`` is returned instead, and only ``t_perp``
    enters the collision geometry.
    """
    v = packet.variant
    if isinstance(v, LaguerreGauss):
        if v.ell == 0:
            raise PacketError("no finite vortex diffraction time for ell = 0")
        return v.rho0**2 / (abs(v.ell) * LAMBDA_C)
    return (2 * v.sigma_perp**2 / LAMBDA_C, 2 * v.sigma_z**2 / LAMBDA_C)


def diffraction_time_seconds(packet: PacketSpec):
    td = diffraction_time(packet)
    if isinstance(td, tuple):
        return tuple(t / C_LIGHT for t in td)
    return td / C_LIGHT


def spreading(packet: PacketSpec) -> tuple[float, float]:
    """Initial transverse radius and its spreading time (cm, cm).

    The spreading time is ``inf`` for a non-vortex LG packet.
    """
    v = packet.variant
    if isinstance(v, LaguerreGauss):
        if v.ell == 0:
            return v.rho0, math.inf
        return v.rho0, diffraction_time(packet)
    return v.sigma_perp, 2 * v.sigma_perp**2 / LAMBDA_C


def mean_radius(packet: PacketSpec, t):
    """Mean transverse radius at time ``t`` (cm of light travel)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise PacketError("time must be non-negative")
    rho0, td = spreading(packet)
    if math.isinf(td):
        return rho0 * np.ones_like(t)[()]
    return (rho0 * np.sqrt(1 + (t / td) ** 2))[()]


def triaxial_quadrupole(sigma_x: float, sigma_y: float, sigma_z: float, t) -> np.ndarray:
    """Diagonal quadrupole tensor of a free triaxial Gaussian packet.

    Diagnostic only; the field model downstream is restricted to the
    axially symmetric case.
    """
    sig = np.array([sigma_x, sigma_y, sigma_z], dtype=float)
    t = float(t)
    diag = np.empty(3)
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        diag[i] = 2 * sig[i] ** 2 - sig[j] ** 2 - sig[k] ** 2 + t**2 * LAMBDA_C**2 / 4 * (
            2 / sig[i] ** 2 - 1 / sig[j] ** 2 - 1 / sig[k] ** 2
        )
    return np.diag(diag)
