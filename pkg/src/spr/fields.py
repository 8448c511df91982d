"""Electric fields of the moving packet, in time domain and Fourier domain.

Fourier convention: ``E(q_x, y', z', omega) = int dx dt E(r', t) exp(i omega t - i q_x x)``
in the beam-aligned frame (x', y', z'), x' = x.  Every closed-form field has
the shape ``exp(i omega z'/beta - mu |y'|) * P(z', |y'|)`` with ``P`` a
polynomial of total degree <= 2, and ``mu = sqrt(omega^2/(gamma beta)^2 + q_x^2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _fourier_coeffs as _fc
from .packets import LAMBDA_C, QuadrupoleLaw, ZERO_LAW

MONOMIALS = tuple(_fc.MONOMIALS)


class FieldError(ValueError):
    pass


def _check_height(y):
    if np.any(np.asarray(y) == 0):
        raise FieldError("on-surface singularity: y' = 0")


@dataclass(frozen=True)
class FourierPoint:
    qx: complex
    y: float
    omega: complex
    beta: float

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.beta**2)

    @property
    def kappa(self):
        return self.omega / (self.gamma * self.beta)

    @property
    def mu(self):
        return np.sqrt(self.kappa**2 + self.qx**2)


@dataclass
class PolynomialField:
    """``exp(i z phase_rate) * (c0 + c1 z + c2 z^2)`` with 3-vector coefficients.

    ``coeffs`` has shape ``(..., 3, 3)``: polynomial power, then component.
    """

    coeffs: np.ndarray
    phase_rate: complex

    @property
    def c0(self):
        return self.coeffs[..., 0, :]

    @property
    def c1(self):
        return self.coeffs[..., 1, :]

    @property
    def c2(self):
        return self.coeffs[..., 2, :]

    def __call__(self, z):
        """Evaluate the full field at longitudinal coordinate(s) ``z``."""
        z = np.asarray(z)[..., None]
        poly = self.c0 + self.c1 * z + self.c2 * z**2
        return np.exp(1j * z * np.asarray(self.phase_rate)[..., None]) * poly


@dataclass
class PrimedField:
    """Fourier field in the beam frame as a polynomial in (z', |y'|).

    ``coeffs[..., m, :]`` multiplies ``z'**a * |y'|**b`` for ``(a, b) = MONOMIALS[m]``;
    the factor ``exp(i omega z'/beta - mu |y'|)`` is implicit.
    """

    coeffs: np.ndarray
    omega: np.ndarray
    beta: float
    mu: np.ndarray
    sgn: int

    def at(self, y, z):
        """Full complex field at primed height ``y`` (sign must match ``sgn``) and ``z``."""
        Y = abs(y)
        poly = sum(self.coeffs[..., m, :] * (z**a * Y**b) for m, (a, b) in enumerate(MONOMIALS))
        phase = np.exp(1j * self.omega * z / self.beta - self.mu * Y)
        return np.asarray(phase)[..., None] * poly


def master_integral(n: int, p: FourierPoint):
    """I_{2n+1} with the factor exp(i omega z'/beta) removed.

    The spherical Hankel functions at imaginary argument reduce to
    ``exp(-x) * theta_{n-1}(x)`` with reverse Bessel polynomials theta.
    """
    if n not in (1, 2, 3):
        raise ValueError("master integrals are provided for n = 1, 2, 3")
    _check_height(p.y)
    Y = abs(p.y)
    x = p.mu * Y
    theta = {1: 1.0, 2: x + 1.0, 3: x**2 + 3.0 * x + 3.0}[n]
    dfact = {1: 1.0, 2: 3.0, 3: 15.0}[n]
    return 2 * math.pi / (p.gamma * p.beta) * np.exp(-x) * theta / (dfact * Y ** (2 * n - 1))


def charge_field_fourier(p: FourierPoint) -> PolynomialField:
    _check_height(p.y)
    mu = p.mu
    s = math.copysign(1.0, p.y)
    pref = 2 * math.pi / p.beta * np.exp(-mu * abs(p.y)) / mu
    c0 = pref * np.array([-1j * p.qx, s * mu, -1j * p.omega / (p.beta * p.gamma**2)])
    coeffs = np.zeros((3, 3), dtype=complex)
    coeffs[0] = c0
    return PolynomialField(coeffs, p.omega / p.beta)


def _charge_monomials(qx, kappa, mu, beta, gamma, s):
    # charge field has no (z', |y'|) dependence besides the common exponent
    c = 2 * np.pi / beta
    zero = 0 * mu
    row0 = [-1j * c * qx / mu, c * s + zero, -1j * c * kappa / (gamma * mu)]
    return [row0] + [[0, 0, 0]] * (len(MONOMIALS) - 1)


def _stack(rows, shape):
    out = np.zeros(shape + (len(MONOMIALS), 3), dtype=complex)
    for m, row in enumerate(rows):
        for k, v in enumerate(row):
            out[..., m, k] = v
    return out


def primed_field(qx, omega, beta: float, qlaw: QuadrupoleLaw = ZERO_LAW, sgn: int = -1,
                 include_charge: bool = True) -> PrimedField:
    """Closed-form Fourier field in the beam frame, vectorised over ``omega``/``qx``."""
    qx, omega = np.broadcast_arrays(np.asarray(qx), np.asarray(omega))
    gamma = 1.0 / math.sqrt(1 - beta**2)
    kappa = omega / (gamma * beta)
    mu = np.sqrt(kappa**2 + qx**2)
    shape = np.shape(mu)
    coeffs = np.zeros(shape + (len(MONOMIALS), 3), dtype=complex)
    args = (qx, kappa, mu, beta, gamma, sgn)
    if include_charge:
        coeffs += _stack(_charge_monomials(*args), shape)
    if qlaw.q0:
        coeffs += qlaw.q0 * _stack(_fc.q0_coefficients(*args), shape)
    if qlaw.q2:
        coeffs += qlaw.q2 * _stack(_fc.q2_coefficients(*args), shape)
    return PrimedField(coeffs, omega, beta, mu, sgn)


def quadrupole_field_fourier(p: FourierPoint, qlaw: QuadrupoleLaw) -> PolynomialField:
    """Quadrupole part of the beam-frame field at height ``p.y`` as a polynomial in z'."""
    _check_height(p.y)
    s = int(math.copysign(1, p.y))
    pf = primed_field(p.qx, p.omega, p.beta, qlaw, sgn=s, include_charge=False)
    Y = abs(p.y)
    coeffs = np.zeros((3, 3), dtype=complex)
    for m, (a, b) in enumerate(MONOMIALS):
        coeffs[a] += pf.coeffs[m] * Y**b
    coeffs *= np.exp(-p.mu * Y)
    return PolynomialField(coeffs, p.omega / p.beta)


def rotate_components(vec, phi_i: float):
    """Beam-frame components (x', y', z') to lab components (x, y, z)."""
    vec = np.asarray(vec)
    c, s = math.cos(phi_i), math.sin(phi_i)
    out = np.empty_like(vec)
    out[..., 0] = vec[..., 0]
    out[..., 1] = vec[..., 1] * c + vec[..., 2] * s
    out[..., 2] = vec[..., 2] * c - vec[..., 1] * s
    return out


def rotate_to_lab(field: PrimedField, phi_i: float, h: float) -> PolynomialField:
    """Lab-frame field on the grating plane y = 0 as a polynomial in lab z.

    On the plane ``y' = -(h cos phi + z sin phi)`` and ``z' = z cos phi - h sin phi``;
    the packet is above the grating so ``sgn(y') = -1`` there.
    """
    if field.sgn != -1:
        raise FieldError("surface fields require the below-packet branch sgn(y') = -1")
    c, s = math.cos(phi_i), math.sin(phi_i)
    zp = np.array([-h * s, c])  # z' = zp[0] + zp[1] z
    Y = np.array([h * c, s])
    lab = np.zeros(field.coeffs.shape[:-2] + (3, 3), dtype=complex)
    for m, (a, b) in enumerate(MONOMIALS):
        poly = np.polynomial.polynomial.polymul(
            np.polynomial.polynomial.polypow(zp, a), np.polynomial.polynomial.polypow(Y, b)
        )
        for k, pk in enumerate(poly):
            if pk != 0:
                lab[..., k, :] += pk * field.coeffs[..., m, :]
    lab = rotate_components(lab, phi_i)
    const = np.exp(1j * field.omega * zp[0] / field.beta - field.mu * Y[0])
    lab *= np.asarray(const)[..., None, None]
    rate = field.omega * c / field.beta + 1j * field.mu * s
    return PolynomialField(lab, rate)


# --- time domain -----------------------------------------------------------


def rest_field_kernel(x, y, z, t, q0, q2, m_ell, charge):
    """Rest-frame (E, H) of charge + axial quadrupole + magnetic moment.

    Plain arithmetic only, so it works on scalars, numpy arrays and under numba.
    ``m_ell`` is the magnetic moment ell/(2m); ``charge`` is 1.0 or 0.0.
    """
    r2 = x * x + y * y + z * z
    r = r2**0.5
    r3 = r2 * r
    r5 = r3 * r2
    zz = z * z / r2
    tt = 3.0 * t * t / r2
    perp = charge + 0.25 * (3.0 * q0 / r2 * (1.0 - 5.0 * zz) + q2 * (tt * (1.0 - 5.0 * zz) + 3.0 * zz - 1.0))
    axial = charge + 0.25 * (3.0 * q0 / r2 * (3.0 - 5.0 * zz) + q2 * (tt * (3.0 - 5.0 * zz) + 3.0 * zz - 1.0))
    ex = x / r3 * perp
    ey = y / r3 * perp
    ez = z / r3 * axial
    hx = z / r5 * (3.0 * x * m_ell + 1.5 * q2 * t * y)
    hy = z / r5 * (3.0 * y * m_ell - 1.5 * q2 * t * x)
    hz = m_ell * (3.0 * zz - 1.0) / r3
    return ex, ey, ez, hx, hy, hz


def lab_field_kernel(x, y, z, t, beta, q0, q2, m_ell, charge):
    """Lab-frame E of the packet moving along +z, from the boosted rest fields."""
    gamma = 1.0 / (1.0 - beta * beta) ** 0.5
    rz = gamma * (z - beta * t)
    tz = gamma * (t - beta * z)
    ex, ey, ez, hx, hy, hz = rest_field_kernel(x, y, rz, tz, q0, q2, m_ell, charge)
    return gamma * (ex + beta * hy), gamma * (ey - beta * hx), ez


def rest_frame_fields(r, t, qlaw: QuadrupoleLaw = ZERO_LAW, ell: int = 0, include_magnetic: bool = False,
                      include_charge: bool = True):
    r = np.asarray(r, dtype=float)
    if np.any(np.sum(r**2, axis=-1) == 0):
        raise FieldError("field singular at r = 0")
    m_ell = ell * LAMBDA_C / 2 if include_magnetic else 0.0
    parts = rest_field_kernel(r[..., 0], r[..., 1], r[..., 2], t, qlaw.q0, qlaw.q2, m_ell,
                              1.0 if include_charge else 0.0)
    return np.stack(parts[:3], axis=-1), np.stack(parts[3:], axis=-1)


def boost_to_lab(E, H, beta: float):
    """Electric field seen in the lab, given rest-frame fields at the boosted point."""
    E, H = np.asarray(E), np.asarray(H)
    gamma = 1.0 / math.sqrt(1 - beta**2)
    out = np.empty(np.broadcast_shapes(E.shape, H.shape))
    out[..., 0] = gamma * (E[..., 0] + beta * H[..., 1])
    out[..., 1] = gamma * (E[..., 1] - beta * H[..., 0])
    out[..., 2] = E[..., 2]
    return out


def lab_field(x, y, z, t, beta: float, qlaw: QuadrupoleLaw = ZERO_LAW, ell: int = 0,
              include_magnetic: bool = False, include_charge: bool = True):
    """Lab-frame electric field at (x, y, z, t), stacked on the last axis."""
    m_ell = ell * LAMBDA_C / 2 if include_magnetic else 0.0
    parts = lab_field_kernel(np.asarray(x, float), np.asarray(y, float), np.asarray(z, float),
                             np.asarray(t, float), beta, qlaw.q0, qlaw.q2, m_ell,
                             1.0 if include_charge else 0.0)
    return np.stack(np.broadcast_arrays(*parts), axis=-1)


def numerical_fourier_oracle(field_fn, p: FourierPoint, z: float, rtol: float = 1e-7):
    """Adaptive 2D quadrature of ``field_fn`` against exp(i(omega t - q_x x)) at ``(p.y, z)``.

    See :mod:`spr._oracle`; the result keeps the full phase exp(i omega z/beta).
    """
    from ._oracle import numerical_fourier_oracle as _run

    return _run(field_fn, float(np.real(p.qx)), p.y, z, float(np.real(p.omega)), p.beta, rtol=rtol)
