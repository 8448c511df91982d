"""Surface currents and the charge / interference / quadrupole intensity split.

The radiated amplitude is ``J = sum_k j_k G_k`` where ``j_k`` are the z^k
coefficients of the surface current ``(1/2pi) e0 x (n x E)`` on the grating
plane and ``G_k`` the strip moments of :mod:`spr.formfactor`; the spectral-
angular density is ``omega^2 |J|^2``.  This normalisation reproduces the
parallel-passage charge result of :func:`charge_angular_parallel` exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields as dc_fields

import numpy as np

from .fields import primed_field, rotate_to_lab
from .formfactor import form_factor_args, strip_moments
from .geometry import GratingSpec, Observation, inclined_impact, resonance_frequency
from .packets import PacketSpec, quadrupole_law

__all__ = [
    "Observation", "CurrentDecomposition", "IntensityBreakdown", "RadiationError", "surface_currents",
    "intensity_terms", "charge_intensity_infinite", "charge_angular_parallel", "TERMS",
]

TERMS = ("w_ee", "w_eq0", "w_eq1", "w_eq2", "w_qq", "w_total")


class RadiationError(ValueError):
    pass


@dataclass
class CurrentDecomposition:
    """z^0, z^1, z^2 coefficients of the surface current, common factor stripped.

    Arrays have the component on the last axis; ``phase_rate`` is the complex
    rate of the stripped factor ``exp(i z phase_rate)``.
    """

    je: np.ndarray
    jq0: np.ndarray
    jq1: np.ndarray
    jq2: np.ndarray
    phase_rate: np.ndarray

    @property
    def j0(self):
        return self.je + self.jq0

    @property
    def quadrupole(self):
        return (self.jq0, self.jq1, self.jq2)


@dataclass
class IntensityBreakdown:
    w_ee: np.ndarray
    w_eq0: np.ndarray
    w_eq1: np.ndarray
    w_eq2: np.ndarray
    w_qq: np.ndarray
    w_total: np.ndarray

    @classmethod
    def from_terms(cls, w_ee, w_eq0, w_eq1, w_eq2, w_qq):
        return cls(w_ee, w_eq0, w_eq1, w_eq2, w_qq, w_ee + w_eq0 + w_eq1 + w_eq2 + w_qq)

    def as_tuple(self):
        return tuple(getattr(self, f.name) for f in dc_fields(self))

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in dc_fields(self)}


def _current(E, e0):
    ex, ez = E[..., 0], E[..., 2]
    ex0, ey0, ez0 = e0
    return np.stack([-ex * ey0, ex * ex0 + ez * ez0, -ez * ey0], axis=-1) / (2 * math.pi)


def surface_currents(obs: Observation, grating: GratingSpec, packet: PacketSpec) -> CurrentDecomposition:
    """Currents induced on the grating plane; ``obs.omega`` may be an array."""
    omega = np.asarray(obs.omega, dtype=float)
    e0 = obs.e0
    kx = omega * e0[0]
    beta = packet.beta
    charge = rotate_to_lab(primed_field(kx, omega, beta, include_charge=True), grating.phi_i, grating.h)
    law = quadrupole_law(packet)
    quad = rotate_to_lab(primed_field(kx, omega, beta, law, include_charge=False), grating.phi_i, grating.h)
    je = _current(charge.c0, e0)
    jq = [_current(quad.coeffs[..., k, :], e0) for k in range(3)]
    return CurrentDecomposition(je, jq[0], jq[1], jq[2], charge.phase_rate)


def _net_wavenumber(obs: Observation, grating: GratingSpec, packet: PacketSpec):
    args = form_factor_args(obs.omega, obs.theta, obs.phi, grating, packet.beta)
    return args.c


def _cdot(a, b):
    return np.sum(a * np.conj(b), axis=-1)


def intensity_terms(obs: Observation, grating: GratingSpec, packet: PacketSpec) -> IntensityBreakdown:
    """Spectral-angular densities at ``obs`` (vectorised over ``obs.omega``)."""
    if grating.infinite and grating.phi_i <= 0:
        raise RadiationError("infinite grating requires positive inclination")
    cur = surface_currents(obs, grating, packet)
    c = _net_wavenumber(obs, grating, packet)
    G = strip_moments(c, grating, 2)
    omega2 = np.asarray(obs.omega, dtype=float) ** 2
    Je = cur.je * G[0][..., None]
    parts = [jq * G[k][..., None] for k, jq in enumerate(cur.quadrupole)]
    JQ = parts[0] + parts[1] + parts[2]
    w_ee = omega2 * np.real(_cdot(Je, Je))
    w_qq = omega2 * np.real(_cdot(JQ, JQ))
    w_eq = []
    for P in parts:
        z = 2 * _cdot(Je, P)
        w_eq.append(omega2 * np.real(z))
    return IntensityBreakdown.from_terms(w_ee, *w_eq, w_qq)


def _anisotropy(theta, phi, beta):
    bg2 = beta**2 / (1 - beta**2)
    return 1 + bg2 * (np.cos(phi) * np.sin(theta)) ** 2


def charge_intensity_infinite(obs: Observation, grating: GratingSpec, packet: PacketSpec):
    """Closed-form charge density for inclined passage over a semi-infinite grating.

    Uses the same normalisation as :func:`intensity_terms`, with which it agrees
    identically for ``N = inf``.
    """
    phi_i = grating.phi_i
    if phi_i <= 0:
        raise RadiationError("infinite grating requires positive inclination")
    beta, gamma = packet.beta, packet.gamma
    th, ph = obs.theta, obs.phi
    omega = np.asarray(obs.omega, dtype=float)
    A = _anisotropy(th, ph, beta)
    theta_i = math.cos(phi_i) / beta - math.cos(th)
    m_rate = math.sin(phi_i) * math.sqrt(1 / (beta * gamma) ** 2 + (math.cos(ph) * math.sin(th)) ** 2)
    a, d = grating.a, grating.d
    decay = np.exp(-omega * inclined_impact(grating) / (beta * gamma) * math.sqrt(A))
    ratio = (np.cos(a * omega * theta_i) - np.cosh(a * omega * m_rate)) / (
        np.cos(d * omega * theta_i) - np.cosh(d * omega * m_rate))
    c2t, s2t = math.cos(th) ** 2, math.sin(th) ** 2
    c2p, s2p = math.cos(ph) ** 2, math.sin(ph) ** 2
    cf, sf2 = math.cos(phi_i), math.sin(phi_i) ** 2
    g2 = gamma**2
    angular = (c2t + s2p * s2t) * (cf**2 + g2 * sf2) + beta * g2 * c2p * s2t * (
        2 * cf * math.cos(th) + beta * g2 * c2t * sf2 + beta * g2 * s2t * (1 + s2p * sf2))
    kin = g2 * cf**2 - 2 * beta * g2 * cf * math.cos(th) + beta**2 * g2 * c2t + sf2 * A
    return decay * ratio * angular / (A * kin)


def charge_angular_parallel(theta, phi, grating: GratingSpec, packet: PacketSpec, g: int = 1):
    """Frequency-integrated charge density of order ``g`` for parallel passage, large N.

    For ``g = 1`` this is the standard closed form; higher orders carry the
    extra ``sin^2(pi g a/d)/g^3`` dependence of the strip and line factors.
    """
    if grating.phi_i != 0:
        raise RadiationError("parallel-passage closed form needs phi_I = 0")
    if grating.infinite:
        raise RadiationError("parallel-passage closed form needs a finite grating")
    beta, gamma = packet.beta, packet.gamma
    d, a, y, n = grating.d, grating.a, grating.h, grating.n_strips
    w1 = resonance_frequency(g, theta, 0.0, beta, d)
    A = _anisotropy(theta, phi, beta)
    ct, st = np.cos(theta), np.sin(theta)
    c2p, s2p = np.cos(phi) ** 2, np.sin(phi) ** 2
    g2 = gamma**2
    num = ct**2 + 2 * beta * g2 * c2p * ct * st**2 + s2p * st**2 + beta**2 * g2**2 * c2p * st**4
    return (n * d**2 * w1**3 / (math.pi**2 * g**3) * math.sin(a * math.pi * g / d) ** 2
            * np.exp(-2 * w1 * y / (beta * gamma) * np.sqrt(A)) * num / (beta**2 * g2 * A))
