import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spr.fields import primed_field, rotate_components
from spr.geometry import GratingSpec, Observation, critical_angle, inclined_impact, resonance_frequency
from spr.packets import Gaussian, LaguerreGauss, PacketSpec, quadrupole_law
from spr.radiation import (TERMS, RadiationError, charge_angular_parallel, charge_intensity_infinite,
                           intensity_terms, surface_currents)
from spr.scans import integrate_line

PK = PacketSpec(LaguerreGauss(100e-7, 10), 0.5)


def grating(n=500, phi_i=0.0, h=2.8e-4):
    return GratingSpec(10e-4, 5e-4, n, phi_i, h)


def line(theta=math.pi / 2, phi=math.pi / 2, g=grating(), n=201, span=3.0):
    wg = resonance_frequency(1, theta, g.phi_i, PK.beta, g.d)
    return Observation(theta, phi, wg * (1 + np.linspace(-span, span, n) / g.n_strips))


@given(st.floats(0.3, 2.8), st.floats(0.0, 6.28), st.floats(0.0, 0.5))
def test_breakdown_consistency(theta, phi, frac):
    g = grating(200, frac * critical_angle(PK))
    w = intensity_terms(line(theta, phi, g, n=41), g, PK)
    assert np.all(w.w_ee >= 0) and np.all(w.w_qq >= 0)
    assert np.allclose(w.w_total, w.w_ee + w.w_eq0 + w.w_eq1 + w.w_eq2 + w.w_qq, rtol=1e-12)
    assert tuple(w.as_dict()) == TERMS
    assert all(np.all(np.isfinite(t)) for t in w.as_tuple())


@given(st.floats(0.3, 2.8), st.floats(0.0, math.pi / 2))
def test_azimuthal_mirror_symmetry(theta, phi):
    g = grating(200)
    a = intensity_terms(line(theta, phi, g, n=21), g, PK)
    b = intensity_terms(line(theta, math.pi - phi, g, n=21), g, PK)
    for x, y in zip(a.as_tuple(), b.as_tuple()):
        assert np.allclose(x, y, rtol=1e-9, atol=1e-12 * np.abs(a.w_ee).max())


def test_charge_term_independent_of_packet_shape():
    g = grating()
    other = PacketSpec(LaguerreGauss(30e-7, 3), 0.5)
    assert np.allclose(intensity_terms(line(), g, PK).w_ee, intensity_terms(line(), g, other).w_ee, rtol=1e-13)


def test_multipole_scaling():
    # rho0 -> 2 rho0, ell -> 4 ell scales both q0 and q2 by 4
    small, large = PacketSpec(LaguerreGauss(50e-7, 4), 0.5), PacketSpec(LaguerreGauss(100e-7, 16), 0.5)
    g = grating()
    a, b = intensity_terms(line(), g, small), intensity_terms(line(), g, large)
    for k in ("w_eq0", "w_eq1", "w_eq2"):
        assert np.allclose(getattr(b, k), 4 * getattr(a, k), rtol=1e-10)
    assert np.allclose(b.w_qq, 16 * a.w_qq, rtol=1e-10)


def test_currents_shapes():
    cur = surface_currents(line(n=7), grating(), PK)
    assert cur.je.shape == (7, 3) and cur.jq2.shape == (7, 3)
    assert np.allclose(cur.j0, cur.je + cur.jq0)


def test_infinite_parallel_rejected():
    g = grating(math.inf)
    with pytest.raises(RadiationError):
        intensity_terms(line(g=grating()), g, PK)
    with pytest.raises(RadiationError):
        charge_intensity_infinite(line(g=grating()), g, PK)


@pytest.mark.parametrize("frac", [0.5, 1.0, 2.0])
def test_inclined_closed_form(frac):
    g = grating(math.inf, frac * critical_angle(PK))
    wg = resonance_frequency(1, math.pi / 2, g.phi_i, 0.5, g.d)
    obs = Observation(math.pi / 2, math.pi / 2, wg * np.linspace(0.999, 1.001, 9))
    ref = charge_intensity_infinite(obs, g, PK)
    assert np.allclose(intensity_terms(obs, g, PK).w_ee, ref, rtol=1e-7)


@pytest.mark.parametrize("order", [1, 2])
def test_parallel_closed_form(order):
    # a = 0.3 d so that the second order is not extinguished by the strip factor
    g = GratingSpec(10e-4, 3e-4, 1000, 0.0, 2.8e-4)
    res = integrate_line(math.pi / 2, math.pi / 2, g, PK, g=order)
    assert res.values.w_ee == pytest.approx(charge_angular_parallel(math.pi / 2, math.pi / 2, g, PK, order), rel=0.02)


def test_parallel_closed_form_guards():
    with pytest.raises(RadiationError):
        charge_angular_parallel(1.0, 1.0, grating(phi_i=1e-4), PK)
    with pytest.raises(RadiationError):
        charge_angular_parallel(1.0, 1.0, grating(math.inf), PK)


def test_zero_quadrupole_packet():
    # a spherical Gaussian has q0 = q2 = 0
    sphere = PacketSpec(Gaussian(40e-7, 40e-7), 0.5)
    w = intensity_terms(line(), grating(), sphere)
    for k in ("w_eq0", "w_eq1", "w_eq2", "w_qq"):
        assert np.all(getattr(w, k) == 0)
    assert np.array_equal(w.w_total, w.w_ee)


def test_vanishing_strips():
    a = intensity_terms(line(), GratingSpec(10e-4, 1e-9, 500, 0.0, 2.8e-4), PK)
    b = intensity_terms(line(), grating(), PK)
    assert np.max(np.abs(a.w_total)) < 1e-8 * np.max(b.w_total)


@given(st.floats(0.5, 2.6), st.floats(0, 6.28), st.floats(1e-4, 8e-4), st.floats(1e-4, 8e-4),
       st.floats(0.0, 1.5))
def test_charge_height_factor(theta, phi, h1, h2, frac):
    phi_i = frac * critical_angle(PK)
    g1, g2 = grating(100, phi_i, h1), grating(100, phi_i, h2)
    obs = line(theta, phi, g1, n=5)
    ratio = intensity_terms(obs, g1, PK).w_ee / intensity_terms(obs, g2, PK).w_ee
    bg = PK.beta * PK.gamma
    aniso = math.sqrt(1 + (bg * math.cos(phi) * math.sin(theta)) ** 2)
    dh = inclined_impact(g1) - inclined_impact(g2)
    assert np.allclose(ratio, np.exp(-obs.omega * dh * aniso / bg), rtol=1e-9)


def test_parallel_height_doubling():
    g1 = grating(1000)
    g2 = grating(1000, h=2 * g1.h)
    w1 = resonance_frequency(1, math.pi / 2, 0.0, 0.5, g1.d)
    ratio = charge_angular_parallel(math.pi / 2, math.pi / 2, g2, PK) / charge_angular_parallel(
        math.pi / 2, math.pi / 2, g1, PK)
    assert ratio == pytest.approx(math.exp(-2 * w1 * g1.h / (PK.beta * PK.gamma)), rel=1e-12)


def test_semi_plane_continuity():
    # a -> d closes the gaps; the closed form is continuous there
    phi_i = critical_angle(PK)
    obs = line(g=grating(phi_i=phi_i), n=7)
    full = charge_intensity_infinite(obs, GratingSpec(10e-4, 10e-4, math.inf, phi_i, 2.8e-4), PK)
    gaps = [1e-6, 1e-7, 1e-8]
    err = [np.max(np.abs(charge_intensity_infinite(obs, GratingSpec(10e-4, 10e-4 * (1 - e), math.inf, phi_i, 2.8e-4),
                                                   PK) / full - 1)) for e in gaps]
    # at least first-order convergence in the gap width
    assert err[1] <= 0.11 * err[0] and err[2] <= 0.11 * err[1] and err[2] < 1e-4


def _brute_force_breakdown(obs, g, packet, nodes=64):
    """Pointwise surface currents integrated strip by strip, no polynomial algebra."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    e0 = obs.e0
    c, s = math.cos(g.phi_i), math.sin(g.phi_i)
    law = quadrupole_law(packet)
    out = []
    for om in np.atleast_1d(obs.omega):
        kx = om * e0[0]
        pe = primed_field(kx, om, packet.beta, include_charge=True)
        pq = primed_field(kx, om, packet.beta, law, include_charge=False)
        Je, JQ = np.zeros(3, complex), np.zeros(3, complex)
        for j in range(int(g.n_strips)):
            z = j * g.d + 0.5 * g.a * (x + 1)
            yp, zp = -(g.h * c + z * s), z * c - g.h * s
            phase = np.exp(-1j * om * e0[2] * z)[:, None] * (0.5 * g.a * w)[:, None]
            for pf, acc in ((pe, Je), (pq, JQ)):
                E = rotate_components(np.array([pf.at(yi, zi) for yi, zi in zip(yp, zp)]), g.phi_i)
                jz = np.stack([-E[:, 0] * e0[1], E[:, 0] * e0[0] + E[:, 2] * e0[2], -E[:, 2] * e0[1]], -1)
                acc += np.sum(jz * phase, axis=0) / (2 * math.pi)
        out.append([om**2 * np.vdot(Je, Je).real, om**2 * 2 * np.vdot(JQ, Je).real, om**2 * np.vdot(JQ, JQ).real])
    return np.array(out)


@pytest.mark.parametrize("theta,phi,frac", [(math.pi / 2, math.pi / 2, 0.0), (1.1, 0.4, 0.7), (2.0, 2.5, 1.3)])
def test_pipeline_vs_pointwise_assembly(theta, phi, frac):
    g = grating(6, frac * critical_angle(PK))
    obs = line(theta, phi, g, n=5, span=0.4)
    w = intensity_terms(obs, g, PK)
    ref = _brute_force_breakdown(obs, g, PK)
    got = np.stack([w.w_ee, w.w_eq0 + w.w_eq1 + w.w_eq2, w.w_qq], -1)
    assert np.allclose(got, ref, rtol=1e-6, atol=1e-6 * np.abs(ref).max(axis=0))


def test_static_quadrupole_current_order():
    from spr.geometry import effective_impact
    g = grating(3500)
    wg = resonance_frequency(1, math.pi / 2, 0.0, 0.5, g.d)
    cur = surface_currents(Observation(math.pi / 2, math.pi / 2, np.array([wg])), g, PK)
    eta_q0 = PK.variant.rho0**2 / effective_impact(0.5, PK.gamma, wg) ** 2
    ratio = np.linalg.norm(cur.jq0) / np.linalg.norm(cur.je)
    assert eta_q0 / 10 <= ratio <= 10 * eta_q0
