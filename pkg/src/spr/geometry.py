"""Passage geometry and regime classification.

Collision limits of a spreading packet over a strip grating, effective strip
counts and impact parameters, and the dimensionless parameters that decide
which multipole contribution dominates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .packets import PacketSpec, quadrupole_law, spreading, LAMBDA_C

INFINITE = math.inf
#: |phi_I - phi_c| below this is treated as exactly critical [rad]
NEAR_CRITICAL_TOL = 1e-12


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class GratingSpec:
    """Strip grating: period ``d``, strip width ``a``, impact parameter ``h`` (cm).

    ``n_strips`` is an integer or ``math.inf``; ``phi_i`` is the inclination
    angle in radians (positive tilts the path away from the grating).
    """

    d: float
    a: float
    n_strips: float
    phi_i: float
    h: float

    def __post_init__(self):
        if not 0 < self.a <= self.d:
            raise GeometryError("strip width must satisfy 0 < a <= d")
        if not self.h > 0:
            raise GeometryError("impact parameter must be positive")
        if not abs(self.phi_i) < math.pi / 2:
            raise GeometryError("|phi_i| must be below pi/2")
        if self.n_strips != INFINITE and (self.n_strips < 1 or int(self.n_strips) != self.n_strips):
            raise GeometryError("n_strips must be a positive integer or infinite")

    @property
    def infinite(self) -> bool:
        return self.n_strips == INFINITE

    def with_(self, **changes) -> "GratingSpec":
        return GratingSpec(**{**asdict(self), **changes})


@dataclass(frozen=True)
class Observation:
    """Emission direction (polar ``theta``, azimuth ``phi``) and frequency [1/cm]."""

    theta: float
    phi: float
    omega: float

    @property
    def e0(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    @property
    def k_x(self) -> float:
        return self.omega * math.sin(self.theta) * math.cos(self.phi)


def transverse_factor(theta, phi, beta: float):
    """sqrt(1/(gamma beta)^2 + cos^2(Phi) sin^2(Theta)), i.e. mu/omega."""
    gb2 = beta**2 / (1 - beta**2)
    return np.sqrt(1 / gb2 + (np.cos(phi) * np.sin(theta)) ** 2)


def critical_angle(packet: PacketSpec) -> float:
    """Inclination above which the spreading packet never reaches the grating.

    Returns 0 when the packet does not spread (LG with ell = 0).
    """
    rho0, td = spreading(packet)
    if math.isinf(td):
        return 0.0
    return math.atan(rho0 / (packet.beta * td))


def collision_margin(packet: PacketSpec, grating: GratingSpec, t):
    """``beta t sin(phi) + h - rho(t) cos(phi)``; positive while clear of the grating."""
    rho0, td = spreading(packet)
    t = np.asarray(t, dtype=float)
    rho = rho0 * np.sqrt(1 + (t / td) ** 2) if not math.isinf(td) else rho0 + 0 * t
    phi = grating.phi_i
    return packet.beta * t * math.sin(phi) + grating.h - rho * math.cos(phi)


def is_near_critical(packet: PacketSpec, grating: GratingSpec) -> bool:
    phic = critical_angle(packet)
    return phic > 0 and abs(grating.phi_i - phic) < NEAR_CRITICAL_TOL


def max_passage_time(packet: PacketSpec, grating: GratingSpec) -> float:
    """Largest time [cm] for which the packet stays clear of the grating plane.

    Positive root of ``rho(t) cos(phi) = beta t sin(phi) + h``; infinite at and
    above the critical angle.
    """
    rho0, td = spreading(packet)
    if math.isinf(td):
        return INFINITE if grating.h > rho0 * math.cos(grating.phi_i) else 0.0
    if is_near_critical(packet, grating):
        return INFINITE
    b, h = packet.beta, grating.h
    s, c = math.sin(grating.phi_i), math.cos(grating.phi_i)
    denom = (rho0 * c) ** 2 - (b * td * s) ** 2
    if denom <= 0:
        return INFINITE
    disc = h**2 - (rho0 * c) ** 2 + (b * td * s) ** 2
    if disc <= 0:
        return 0.0
    t = td * (b * td * h * s + rho0 * c * math.sqrt(disc)) / denom
    return max(t, 0.0)


def max_strips(packet: PacketSpec, grating: GratingSpec) -> float:
    """floor(beta t_max / d), or infinity above the critical angle."""
    t = max_passage_time(packet, grating)
    if math.isinf(t):
        return INFINITE
    return math.floor(packet.beta * t / grating.d)


def formation_strips(packet: PacketSpec, grating: GratingSpec) -> float:
    """Strips the packet passes before touching the grating: min(N, N_max).

    Below the critical angle the collision point ends the formation length.
    """
    n = min(grating.n_strips, max_strips(packet, grating))
    if n < 1:
        raise GeometryError("packet reaches the grating before the first strip")
    return n


def max_strips_estimate(packet: PacketSpec, grating: GratingSpec, wavelength: float) -> float:
    """Order-of-magnitude bound ``h rho0 / (|ell| lambda lambda_c)`` for parallel passage."""
    if packet.ell == 0:
        return INFINITE
    return grating.h * packet.size / (abs(packet.ell) * wavelength * LAMBDA_C)


def line_width(n_strips: float, phi_i: float, theta, phi, beta: float):
    """Relative spectral width 1/N + sin(phi_I) sqrt(1/(gamma beta)^2 + cos^2 Phi sin^2 Theta)."""
    inv_n = 0.0 if n_strips == INFINITE else 1.0 / n_strips
    return inv_n + math.sin(phi_i) * transverse_factor(theta, phi, beta)


def effective_strips(grating: GratingSpec, theta, phi, packet: PacketSpec):
    """Inverse relative line width ``N_eff``."""
    shift = math.sin(grating.phi_i) * transverse_factor(theta, phi, packet.beta)
    if grating.infinite:
        if grating.phi_i == 0:
            raise GeometryError("effective strip count undefined for an infinite grating at phi_i = 0")
        return 1.0 / shift
    n = grating.n_strips
    return n / (1 + n * shift)


def effective_impact(beta: float, gamma: float, omega) -> float:
    """Field decay length of Smith-Purcell radiation, beta gamma / omega."""
    return beta * gamma / omega


def inclined_impact(grating: GratingSpec) -> float:
    """Impact-parameter combination 2h cos(phi) + (a - d) sin(phi) of the inclined charge term."""
    phi = grating.phi_i
    return 2 * grating.h * math.cos(phi) + (grating.a - grating.d) * math.sin(phi)


def resonance_frequency(g: int, theta, phi_i: float, beta: float, d: float):
    """Angular frequency [1/cm] of diffraction order ``g``."""
    denom = math.cos(phi_i) / beta - np.cos(theta)
    if np.any(denom <= 0):
        raise GeometryError("no forward resonance at this angle")
    return 2 * math.pi * g / d / denom


@dataclass(frozen=True)
class RegimeReport:
    eta_q: float
    eta_q0: float
    eta_q1: float
    eta_q2: float
    t_max: float
    phi_c: float
    n_max: float
    n_max_estimate: float
    n_eff: float
    h_eff: float
    wavelength: float
    multipole_valid: bool
    spread_valid: bool
    near_critical: bool

    def as_dict(self) -> dict:
        return asdict(self)


def regime_report(packet: PacketSpec, grating: GratingSpec, obs: Observation) -> RegimeReport:
    """Classify the emission regime.  Never raises on physically marginal input."""
    law = quadrupole_law(packet)
    omega = obs.omega
    lam = 2 * math.pi / omega
    h_eff = effective_impact(packet.beta, packet.gamma, omega)
    if grating.infinite and grating.phi_i == 0:
        n_eff = INFINITE
    else:
        n_eff = float(effective_strips(grating, obs.theta, obs.phi, packet))
    eta_q1 = abs(law.q2)
    size = packet.size
    return RegimeReport(
        eta_q=omega / packet.energy,
        eta_q0=abs(law.q0) / h_eff**2,
        eta_q1=eta_q1,
        eta_q2=n_eff**2 * eta_q1 if eta_q1 else 0.0,
        t_max=max_passage_time(packet, grating),
        phi_c=critical_angle(packet),
        n_max=max_strips(packet, grating),
        n_max_estimate=max_strips_estimate(packet, grating, lam),
        n_eff=n_eff,
        h_eff=h_eff,
        wavelength=lam,
        multipole_valid=size < lam,
        spread_valid=size**2 < lam**2 - (packet.gamma * packet.beta * grating.d) ** 2,
        near_critical=is_near_critical(packet, grating),
    )
