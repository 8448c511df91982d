"""Independent numerical oracles and the embedded self-test suite.

Each check compares a closed form against a method that shares none of its
algebra: brute-force Fourier quadrature for the fields, contour-integral
differentiation and direct per-strip quadrature for the form factor, and
the analytic special cases for the radiation pipeline.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .fields import (FourierPoint, charge_field_fourier, master_integral, quadrupole_field_fourier)
from .formfactor import FormFactorArgs, form_factor, form_factor_infinite
from .geometry import (GratingSpec, Observation, critical_angle, effective_impact, max_strips,
                       resonance_frequency)
from .packets import LaguerreGauss, PacketSpec, QuadrupoleLaw
from .radiation import charge_angular_parallel, charge_intensity_infinite, intensity_terms


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.value:.3g} (tol {self.tolerance:.3g}, {self.seconds:.2f} s)"


def _timed(name, tol, fn, *, upper=True):
    t = time.perf_counter()
    val = float(fn())
    ok = val <= tol if upper else val >= tol
    return CheckResult(name, bool(ok and np.isfinite(val)), val, tol, time.perf_counter() - t)


def relative_error(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


# --- differentiation oracle ----------------------------------------------


def contour_derivative(fn, x, order: int, radius: float, points: int = 32):
    """k-th derivative of an analytic ``fn`` at real ``x`` from a circle of samples.

    Trapezoidal rule on Cauchy's integral; exponentially accurate in
    ``points`` and free of the subtractive cancellation of finite differences.
    Works for complex-valued ``fn``, where the plain complex step does not.
    """
    theta = 2 * math.pi * np.arange(points) / points
    zk = radius * np.exp(1j * theta)
    vals = np.array([fn(x + z) for z in zk])
    return math.factorial(order) * np.mean(vals * np.exp(-1j * order * theta)) / radius**order


def form_factor_derivative_error(grating: GratingSpec, omega_i: float, m_i: float, order: int) -> float:
    def f(om):
        return form_factor(FormFactorArgs(om, 0.0, om, m_i, grating), 0)
    L = grating.d * (grating.n_strips if not grating.infinite else 1.0 / max(m_i * grating.d, 1e-300))
    ref = contour_derivative(f, omega_i, order, radius=0.05 / L)
    got = form_factor(FormFactorArgs(omega_i, 0.0, omega_i, m_i, grating), order)
    return abs(got - ref) / abs(ref)


def strip_sum_brute_force(grating: GratingSpec, c: complex, order: int, nodes: int = 48) -> complex:
    """``sum_j int (i z)^k exp(i c z) dz`` by Gauss-Legendre quadrature of every strip.

    Each strip spans at most a few oscillations, so a 48-point rule is exact to
    rounding; strips are accumulated with exactly rounded summation.
    """
    x, w = np.polynomial.legendre.leggauss(nodes)
    half = 0.5 * grating.a
    re, im = [], []
    for j in range(int(grating.n_strips)):
        z = j * grating.d + half * (x + 1)
        v = half * np.sum(w * (1j * z) ** order * np.exp(1j * c * z))
        re.append(v.real)
        im.append(v.imag)
    return complex(math.fsum(re), math.fsum(im))


# --- field oracle grid ---------------------------------------------------

#: (diffraction order, y / h_eff) per beta; the four combinations per velocity
FIELD_GRID_POINTS = ((1, 0.5), (1, 1.0), (1, 2.0), (2, 1.0))
FIELD_GRID_BETAS = (0.3, 0.5, 0.7)
FIELD_GRID_D = 10e-4
FIELD_GRID_LAW = QuadrupoleLaw(1e-10, 1e-6)


def field_grid():
    """The 12 sample points: Theta = pi/2, Phi = pi/3 so that q_x != 0."""
    pts = []
    for beta in FIELD_GRID_BETAS:
        gamma = 1 / math.sqrt(1 - beta**2)
        for g, frac in FIELD_GRID_POINTS:
            omega = resonance_frequency(g, math.pi / 2, 0.0, beta, FIELD_GRID_D)
            qx = omega * math.cos(math.pi / 3)
            y = -frac * effective_impact(beta, gamma, omega)
            pts.append(FourierPoint(qx, y, omega, beta))
    return pts


def field_point_error(p: FourierPoint, law: QuadrupoleLaw = FIELD_GRID_LAW) -> float:
    """Worst relative mismatch of charge and quadrupole fields against brute force."""
    from ._oracle import LabFieldModel, numerical_fourier_oracle

    qx, om = float(p.qx), float(p.omega)
    errs = []
    ref = numerical_fourier_oracle(LabFieldModel(p.beta), qx, p.y, 0.0, om, p.beta)
    errs.append(relative_error(charge_field_fourier(p)(0.0), ref))
    quad = quadrupole_field_fourier(p, law)
    lam = 2 * math.pi * p.beta / om
    # three longitudinal positions pin all three polynomial coefficients
    for z in (0.0, 0.7 * lam, -1.9 * lam):
        ref = numerical_fourier_oracle(LabFieldModel(p.beta, law, include_charge=False), qx, p.y, z, om, p.beta)
        errs.append(relative_error(quad(z), ref))
    return max(errs)


def master_integral_error(n: int, p: FourierPoint) -> float:
    from ._oracle import numerical_fourier_oracle

    g = p.gamma

    def f(x, y, z, t):
        return (x * x + y * y + g * g * (z - p.beta * t) ** 2) ** (-(2 * n + 1) / 2)
    ref = numerical_fourier_oracle(f, float(p.qx), p.y, 0.0, float(p.omega), p.beta, rtol=1e-9)
    return relative_error(master_integral(n, p), ref)


# --- reference parameter sets -----------------------------------------------


def fig3_packet() -> PacketSpec:
    return PacketSpec(LaguerreGauss(100e-7, 10), 0.5)


def fig4_packet() -> PacketSpec:
    return PacketSpec(LaguerreGauss(50e-7, 10), 0.5)


def fig3_grating(n_strips=3500, phi_i=0.0) -> GratingSpec:
    return GratingSpec(10e-4, 5e-4, n_strips, phi_i, 2.8e-4)


def selftest_checks(include_field_grid: bool = True):
    """Yield :class:`CheckResult` for every embedded oracle comparison."""
    pk = fig3_packet()
    yield _timed("critical angle 0.0045 deg", 0.03,
                 lambda: abs(math.degrees(critical_angle(pk)) / 0.0045 - 1))
    yield _timed("N_max(0) = 1800", 0.01,
                 lambda: abs(max_strips(fig4_packet(), fig3_grating()) / 1800 - 1))
    wg = resonance_frequency(1, math.pi / 2, 0.0, 0.5, 10e-4)
    yield _timed("h_eff = 1.84 um", 0.01, lambda: abs(effective_impact(0.5, pk.gamma, wg) / 1.84e-4 - 1))

    p = FourierPoint(0.4 * wg, -2.8e-4, wg, 0.5)
    yield _timed("master integral I3 vs quadrature", 1e-6, lambda: master_integral_error(1, p))
    yield _timed("master integral I5 vs quadrature", 1e-5, lambda: master_integral_error(2, p))
    yield _timed("master integral I7 vs quadrature", 1e-5, lambda: master_integral_error(3, p))

    if include_field_grid:
        for k, q in enumerate(field_grid()):
            yield _timed(f"field oracle point {k + 1:2d} (beta={q.beta}, y={q.y * 1e4:.3f} um)", 1e-4,
                         lambda q=q: field_point_error(q))

    rng = np.random.default_rng(20240611)
    g50 = GratingSpec(10e-4, 4e-4, 50, 0.0, 2.8e-4)

    def deriv_worst():
        worst = 0.0
        for _ in range(20):
            om = rng.uniform(0.2, 3.0) * 2 * math.pi / g50.d
            m = rng.uniform(0.0, 0.05) / g50.d
            for order in (1, 2):
                worst = max(worst, form_factor_derivative_error(g50, om, m, order))
        return worst
    yield _timed("form factor derivatives vs contour differentiation", 1e-8, deriv_worst)

    def brute_worst():
        worst = 0.0
        for om, m in [(0.37, 0.0), (1.0, 0.01), (2.21, 0.03)]:
            c = (om + 1j * m) * 2 * math.pi / g50.d
            args = FormFactorArgs(c.real, 0.0, c.real, c.imag, g50)
            for order in range(3):
                worst = max(worst, relative_error(form_factor(args, order),
                                                  strip_sum_brute_force(g50, c, order)))
        return worst
    yield _timed("strip sum vs per-strip quadrature (N=50)", 1e-12, brute_worst)

    def infinite_limit():
        g = GratingSpec(10e-4, 5e-4, 10_000, 0.0, 2.8e-4)
        m = 1e-2 / g.d
        om = 2 * math.pi / g.d * 1.0003
        args = FormFactorArgs(om, 0.0, om, m, g)
        return abs(abs(form_factor(args)) / abs(form_factor_infinite(args)) - 1)
    yield _timed("|F(N=1e4)| vs infinite grating", 1e-3, infinite_limit)

    def inclined_charge():
        pc = fig3_packet()
        phic = critical_angle(pc)
        g = fig3_grating(10_000, phic)
        gi = g.with_(n_strips=math.inf)
        om = resonance_frequency(1, math.pi / 2, phic, 0.5, g.d) * np.array([0.9995, 1.0, 1.0004])
        obs = Observation(math.pi / 2, math.pi / 2, om)
        return relative_error(intensity_terms(obs, gi, pc).w_ee, charge_intensity_infinite(obs, gi, pc))
    yield _timed("inclined charge pipeline vs closed form", 1e-3, inclined_charge)

    def parallel_charge():
        from .scans import integrate_line
        g = fig3_grating(1000)
        res = integrate_line(math.pi / 2, math.pi / 2, g, pk)
        return abs(res.values.w_ee / charge_angular_parallel(math.pi / 2, math.pi / 2, g, pk) - 1)
    yield _timed("integrated charge line vs parallel closed form", 0.02, parallel_charge)
