"""Grating generating function and its frequency derivatives.

With ``c = Omega_I + i M_I`` the generating function of an N-strip grating is

    F(c) = sum_{j=0}^{N-1} int_{jd}^{jd+a} exp(i c z) dz,

and the k-th derivative with respect to ``Omega_I`` is the same sum with the
integrand multiplied by ``(i z)^k``.  Everything here works on the strip-sum
form: each strip integral is elementary and the strip sum is a finite power
series in ``r = exp(i c d)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import comb

from .geometry import GratingSpec, GeometryError, resonance_frequency, transverse_factor

__all__ = [
    "FormFactorArgs", "form_factor_args", "form_factor", "form_factor_infinite", "form_factor_product",
    "strip_moments", "resonance_frequency", "line_width",
]

#: |c a| below this uses the power series of the single-strip moments
SERIES_THRESHOLD = 1.0
_SERIES_TERMS = 30
#: number of complex exponentials per block in the direct strip sum
_BLOCK = 1 << 21


class FormFactorError(ValueError):
    pass


@dataclass(frozen=True)
class FormFactorArgs:
    """Net complex wavenumber of the grating integral.

    ``omega_i = omega * theta_i`` and ``m_i = sin(phi_I) * mu``; arrays are allowed.
    """

    omega: np.ndarray
    theta_i: np.ndarray
    omega_i: np.ndarray
    m_i: np.ndarray
    grating: GratingSpec

    @property
    def c(self):
        return self.omega_i + 1j * self.m_i


def form_factor_args(omega, theta, phi, grating: GratingSpec, beta: float) -> FormFactorArgs:
    omega = np.asarray(omega, dtype=float)
    theta_i = math.cos(grating.phi_i) / beta - np.cos(theta)
    mu = omega * transverse_factor(theta, phi, beta)
    return FormFactorArgs(omega, theta_i, omega * theta_i, math.sin(grating.phi_i) * mu, grating)


def _single_strip_moments(s, a: float, kmax: int):
    """``I_m = int_0^a u^m exp(s u) du`` for m = 0..kmax."""
    s = np.asarray(s, dtype=complex)
    flat = s.ravel()
    out = np.empty((kmax + 1, flat.size), dtype=complex)
    # upward recursion, stable away from s = 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        e = np.exp(flat * a)
        prev = (e - 1) / flat
        out[0] = prev
        for m in range(1, kmax + 1):
            prev = (a**m * e - m * prev) / flat
            out[m] = prev
    small = np.abs(flat * a) < SERIES_THRESHOLD
    if np.any(small):
        x = flat[small] * a
        n = np.arange(_SERIES_TERMS)[:, None]
        # (s a)^n / n!, built by cumulative products
        terms = np.cumprod(np.vstack([np.ones_like(x), x / n[1:]]), axis=0)
        for m in range(kmax + 1):
            out[m, small] = a ** (m + 1) * np.sum(terms / (n + m + 1), axis=0)
    return out.reshape((kmax + 1,) + s.shape)


def _power_sums(s, d: float, n_strips: float, pmax: int):
    """``S_p = sum_j j^p exp(s d j)`` over the strips, p = 0..pmax."""
    s = np.asarray(s, dtype=complex)
    flat = s.ravel()
    out = np.zeros((pmax + 1, flat.size), dtype=complex)
    if n_strips == math.inf:
        r = np.exp(flat * d)
        if np.any(np.abs(r) >= 1):
            raise FormFactorError("infinite grating requires positive inclination")
        q = 1 - r
        sums = [1 / q, r / q**2, r * (1 + r) / q**3]
        for p in range(pmax + 1):
            out[p] = sums[p]
        return out.reshape((pmax + 1,) + s.shape)
    n = int(n_strips)
    rows = max(1, _BLOCK // max(n, 1))
    cols = max(1, min(n, _BLOCK))
    for start in range(0, n, cols):
        j = np.arange(start, min(n, start + cols), dtype=float)
        powers = [np.ones_like(j), j, j * j][: pmax + 1]
        for lo in range(0, flat.size, rows):
            blk = np.exp(np.multiply.outer(flat[lo:lo + rows] * d, j))
            for p in range(pmax + 1):
                # row-wise pairwise summation: O(log N) ulps and independent of
                # the number of rows, unlike a threaded BLAS product
                out[p, lo:lo + rows] += (blk * powers[p]).sum(axis=1) if p else blk.sum(axis=1)
    return out.reshape((pmax + 1,) + s.shape)


def strip_moments(c, grating: GratingSpec, kmax: int = 2):
    """``G_k = sum_j int_{jd}^{jd+a} z^k exp(i c z) dz`` for k = 0..kmax."""
    if kmax > 2:
        raise ValueError("moments above second order are not supported")
    s = 1j * np.asarray(c, dtype=complex)
    I = _single_strip_moments(s, grating.a, kmax)
    S = _power_sums(s, grating.d, grating.n_strips, kmax)
    d = grating.d
    G = np.empty_like(I)
    for k in range(kmax + 1):
        # z = j d + u, expand z^k binomially
        G[k] = sum(comb(k, m, exact=True) * d ** (k - m) * I[m] * S[k - m] for m in range(k + 1))
    return G


def form_factor(args: FormFactorArgs, order: int = 0):
    """``d^k F / d Omega_I^k`` for k = ``order`` in {0, 1, 2}."""
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    if args.grating.infinite:
        return form_factor_infinite(args, order)
    G = strip_moments(args.c, args.grating, order)
    return 1j**order * G[order]


def form_factor_infinite(args: FormFactorArgs, order: int = 0):
    """Semi-infinite grating; converges only for M_I > 0."""
    if np.any(np.asarray(args.m_i) <= 0):
        raise FormFactorError("infinite grating requires positive inclination")
    g = args.grating if args.grating.infinite else args.grating.with_(n_strips=math.inf)
    G = strip_moments(args.c, g, order)
    return 1j**order * G[order]


def form_factor_product(args: FormFactorArgs):
    """Closed product form of F (finite N), kept as an independent cross-check.

    ``F = exp(i c (a + (N-1) d)/2) * 2 sin(c a/2)/c * sin(N c d/2)/sin(c d/2)``
    """
    g = args.grating
    if g.infinite:
        raise FormFactorError("product form needs a finite strip count")
    c = np.asarray(args.c, dtype=complex)
    n = g.n_strips
    phase = np.exp(0.5j * c * (g.a + (n - 1) * g.d))
    with np.errstate(divide="ignore", invalid="ignore"):
        strip = np.where(c == 0, g.a, 2 * np.sin(0.5 * c * g.a) / c)
        half = 0.5 * c * g.d
        dirichlet = np.where(np.sin(half) == 0, n * np.cos(n * half) / np.cos(half), np.sin(n * half) / np.sin(half))
    return phase * strip * dirichlet


def line_width(args: FormFactorArgs, n_strips: float | None = None):
    """Relative line width 1/N + M_I/omega."""
    n = args.grating.n_strips if n_strips is None else n_strips
    inv_n = 0.0 if n == math.inf else 1.0 / n
    return inv_n + np.asarray(args.m_i) / np.asarray(args.omega)


def resonance_order_frequency(g: int, theta, grating: GratingSpec, beta: float):
    """Convenience wrapper: resonance of order ``g`` for a given grating."""
    if g < 1:
        raise GeometryError("diffraction order must be positive")
    return resonance_frequency(g, theta, grating.phi_i, beta, grating.d)
