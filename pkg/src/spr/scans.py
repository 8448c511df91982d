"""Spectral-line integration and the spectrum / polar / inclination sweeps.

Line integrals use composite Gauss-Legendre rules on panels one Dirichlet
lobe wide, halving the panels until every breakdown term is stable.  Sweeps
evaluate grid points independently and may fan out over processes; results
are assembled by grid index, so they do not depend on the worker count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import (GeometryError, GratingSpec, Observation, critical_angle, formation_strips, line_width,
                       regime_report, resonance_frequency)
from .packets import C_LIGHT, PacketSpec
from .radiation import TERMS, IntensityBreakdown, intensity_terms

__all__ = [
    "ScanRequest", "ScanResult", "LineIntegral", "IntegrationError", "integrate_line", "line_window",
    "spectrum_scan", "polar_scan", "inclination_scan", "run_scan", "worker_count",
]

DEFAULT_WINDOW = 10.0
DEFAULT_TOL = 1e-6
#: Gauss-Legendre nodes per panel
GL_ORDER = 16
MAX_REFINE = 8
#: grid points handed to a worker at once in spectrum sweeps
SPECTRUM_CHUNK = 64

_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)


class IntegrationError(RuntimeError):
    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


@dataclass(frozen=True)
class LineIntegral:
    """Frequency-integrated breakdown of one spectral line."""

    values: IntensityBreakdown
    errors: dict
    window: tuple
    nodes: int


def line_window(theta, phi, grating: GratingSpec, packet: PacketSpec, g: int = 1,
                window: float = DEFAULT_WINDOW):
    """``(omega_g, Gamma_I, lo, hi)`` of the integration window around order ``g``.

    The window is clipped to half-way towards the neighbouring orders.
    """
    wg = resonance_frequency(g, theta, grating.phi_i, packet.beta, grating.d)
    gam = float(line_width(grating.n_strips, grating.phi_i, theta, phi, packet.beta))
    half = min(window * gam, 0.5 / g)
    return wg, gam, wg * (1 - half), wg * (1 + half)


def _lobe(wg, gam, grating: GratingSpec, g: int):
    # spacing of the Dirichlet zeros, or the line width when that is wider
    if grating.infinite:
        return wg * gam
    return wg / (g * grating.n_strips)


def _panel_rule(lo, hi, panels):
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * _GL_X).ravel()
    w = (half[:, None] * _GL_W).ravel()
    return x, w


def integrate_line(theta, phi, grating: GratingSpec, packet: PacketSpec, g: int = 1,
                   window: float = DEFAULT_WINDOW, tol: float = DEFAULT_TOL) -> LineIntegral:
    """Integrate every breakdown term over the g-th line at direction (theta, phi)."""
    if not 0 < tol <= 1e-2:
        raise ValueError("tol must lie in (0, 1e-2]")
    if window <= 0:
        raise ValueError("window must be positive")
    wg, gam, lo, hi = line_window(theta, phi, grating, packet, g, window)
    panels = max(4, math.ceil((hi - lo) / _lobe(wg, gam, grating, g)))
    prev = None
    err = np.full(5, np.inf)
    for _ in range(MAX_REFINE + 1):
        x, w = _panel_rule(lo, hi, panels)
        terms = intensity_terms(Observation(theta, phi, x), grating, packet)
        vals = np.array([w @ t for t in terms.as_tuple()[:5]])
        scale = np.array([w @ np.abs(t) for t in terms.as_tuple()[:5]])
        if prev is not None:
            err = np.abs(vals - prev)
            if np.all(err <= tol * scale):
                break
        prev = vals
        panels *= 2
    else:
        with np.errstate(invalid="ignore"):
            achieved = float(np.max(err / np.maximum(scale, 1e-300)))
        raise IntegrationError(f"line integral not converged (relative change {achieved:.3g})", achieved)
    errors = dict(zip(TERMS[:5], err.tolist()))
    errors["w_total"] = float(np.sum(err))
    return LineIntegral(IntensityBreakdown.from_terms(*vals), errors, (lo, hi), x.size)


@dataclass(frozen=True)
class ScanRequest:
    """One sweep.  ``grid`` is ``(start, stop, count)`` in the sweep's natural unit.

    spectrum: omega / omega_g; polar: Theta in degrees; inclination: phi_I / phi_c
    (phi_I in degrees when the packet does not spread).

    ``formation`` selects the radiating length: ``"collision"`` stops at the
    strip where the spreading packet would touch the grating, ``"grating"``
    uses every strip (the point-charge reference).
    """

    kind: str
    packet: PacketSpec
    grating: GratingSpec
    grid: tuple
    theta: float = math.pi / 2
    phi: float = math.pi / 2
    g: int = 1
    window: float = DEFAULT_WINDOW
    tol: float = DEFAULT_TOL
    formation: str = "collision"

    def __post_init__(self):
        if self.formation not in ("collision", "grating"):
            raise ValueError("formation must be 'collision' or 'grating'")
        if self.kind not in ("spectrum", "polar", "inclination"):
            raise ValueError(f"unknown scan kind {self.kind!r}")
        if int(self.grid[2]) < 2:
            raise ValueError("grid count must be at least 2")
        if self.window <= 0:
            raise ValueError("window must be positive")
        if not 0 < self.tol <= 1e-2:
            raise ValueError("tol must lie in (0, 1e-2]")
        if self.g < 1:
            raise ValueError("diffraction order must be positive")
        if self.grating.infinite:
            tilts = self.values if self.kind == "inclination" else [self.grating.phi_i]
            if min(tilts) <= 0:
                raise GeometryError("infinite grating requires positive inclination")

    @property
    def values(self) -> np.ndarray:
        # i/(n-1) is exactly rounded, so refined grids reproduce shared points bitwise
        start, stop, count = float(self.grid[0]), float(self.grid[1]), int(self.grid[2])
        return start + (stop - start) * (np.arange(count) / (count - 1))

    def effective_grating(self, grating: GratingSpec | None = None) -> GratingSpec:
        grating = self.grating if grating is None else grating
        if self.formation == "grating":
            return grating
        n = formation_strips(self.packet, grating)
        return grating if n == grating.n_strips else grating.with_(n_strips=n)

    @property
    def axis_name(self) -> str:
        if self.kind == "spectrum":
            return "omega_rad_per_s"
        if self.kind == "polar":
            return "theta_deg"
        return "phi_over_phic" if critical_angle(self.packet) > 0 else "phi_deg"


@dataclass
class ScanResult:
    axis_name: str
    axis: np.ndarray
    rows: np.ndarray  # (count, 6) in TERMS order
    errors: np.ndarray  # (count, 6); zero for pointwise spectra
    metadata: dict = field(default_factory=dict)

    @property
    def columns(self):
        return (self.axis_name,) + TERMS

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, TERMS.index(name)]


def worker_count() -> int:
    env = os.environ.get("SPR_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise ValueError("SPR_THREADS must be a positive integer") from exc
        if n < 1:
            raise ValueError("SPR_THREADS must be a positive integer")
        return n
    return os.cpu_count() or 1


def _map(fn, tasks):
    n = min(worker_count(), len(tasks))
    if n <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, tasks))


def _spectrum_chunk(task):
    req, omegas = task
    terms = intensity_terms(Observation(req.theta, req.phi, np.asarray(omegas)), req.effective_grating(),
                            req.packet)
    return np.stack(terms.as_tuple(), axis=-1)


def _line_point(task):
    theta, grating, req = task
    grating = req.effective_grating(grating)
    res = integrate_line(theta, req.phi, grating, req.packet, req.g, req.window, req.tol)
    errs = [res.errors[t] for t in TERMS]
    return np.array(res.values.as_tuple()), np.array(errs)


def _metadata(req: ScanRequest, obs_omega: float) -> dict:
    report = regime_report(req.packet, req.grating, Observation(req.theta, req.phi, obs_omega))
    return {"request": req, "regime": report.as_dict(),
            "formation_strips": float(req.effective_grating().n_strips)}


def spectrum_scan(req: ScanRequest) -> ScanResult:
    """Pointwise spectral densities over omega/omega_g (charge-only is ``w_ee``)."""
    wg = resonance_frequency(req.g, req.theta, req.grating.phi_i, req.packet.beta, req.grating.d)
    omegas = req.values * wg
    # fixed chunking keeps the arithmetic independent of the worker count
    tasks = [(req, omegas[i:i + SPECTRUM_CHUNK]) for i in range(0, omegas.size, SPECTRUM_CHUNK)]
    rows = np.concatenate(_map(_spectrum_chunk, tasks), axis=0)
    meta = _metadata(req, wg)
    meta["omega_g"] = wg
    return ScanResult(req.axis_name, omegas * C_LIGHT, rows, np.zeros_like(rows), meta)


def _line_scan(req: ScanRequest, tasks, axis) -> ScanResult:
    out = _map(_line_point, tasks)
    rows = np.array([o[0] for o in out])
    errs = np.array([o[1] for o in out])
    wg = resonance_frequency(req.g, req.theta, req.grating.phi_i, req.packet.beta, req.grating.d)
    return ScanResult(req.axis_name, axis, rows, errs, _metadata(req, wg))


def polar_scan(req: ScanRequest) -> ScanResult:
    """Line-integrated intensity against Theta (degrees) at fixed Phi and phi_I."""
    thetas = np.radians(req.values)
    return _line_scan(req, [(t, req.grating, req) for t in thetas], req.values)


def inclination_scan(req: ScanRequest) -> ScanResult:
    """Line-integrated intensity against phi_I, in units of phi_c when it is finite."""
    phic = critical_angle(req.packet)
    unit = phic if phic > 0 else math.radians(1.0)
    tasks = [(req.theta, req.grating.with_(phi_i=float(v * unit)), req) for v in req.values]
    result = _line_scan(req, tasks, req.values)
    result.metadata["phi_c"] = phic
    return result


def run_scan(req: ScanRequest) -> ScanResult:
    return {"spectrum": spectrum_scan, "polar": polar_scan, "inclination": inclination_scan}[req.kind](req)


def with_inclination(req: ScanRequest, phi_over_phic: float) -> ScanRequest:
    """Copy of ``req`` with the grating tilted to ``phi_over_phic * phi_c``."""
    return replace(req, grating=req.grating.with_(phi_i=phi_over_phic * critical_angle(req.packet)))
