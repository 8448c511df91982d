import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spr.geometry import (GeometryError, GratingSpec, Observation, collision_margin, critical_angle,
                          effective_impact, effective_strips, formation_strips, inclined_impact,
                          line_width, max_passage_time, max_strips, regime_report, resonance_frequency,
                          transverse_factor)
from spr.packets import LaguerreGauss, PacketSpec

FIG4 = PacketSpec(LaguerreGauss(50e-7, 10), 0.5)


def grating(**kw):
    base = dict(d=10e-4, a=5e-4, n_strips=2500, phi_i=0.0, h=2.8e-4)
    return GratingSpec(**{**base, **kw})


@pytest.mark.parametrize("kw", [dict(a=0.0), dict(a=11e-4), dict(h=0.0), dict(phi_i=2.0),
                                dict(n_strips=0), dict(n_strips=2.5)])
def test_invalid_grating(kw):
    with pytest.raises(GeometryError):
        grating(**kw)


def test_infinite_grating():
    g = grating(n_strips=math.inf)
    assert g.infinite and not grating().infinite
    assert g.with_(n_strips=5).n_strips == 5


def test_direction_vector():
    obs = Observation(math.pi / 2, math.pi / 3, 2.0)
    assert np.allclose(obs.e0, [0.5, math.sqrt(3) / 2, 0])
    assert obs.k_x == pytest.approx(1.0)


@given(st.floats(0.05, 0.95), st.floats(0.01, 3.1), st.floats(0, 6.3))
def test_transverse_factor_bounds(beta, theta, phi):
    gb = beta / math.sqrt(1 - beta**2)
    f = transverse_factor(theta, phi, beta)
    assert 1 / gb - 1e-12 <= f <= math.sqrt(1 / gb**2 + 1) + 1e-12


@given(st.floats(0.0, 0.95))
def test_collision_root(frac):
    g = grating(phi_i=frac * critical_angle(FIG4))
    t = max_passage_time(FIG4, g)
    assert math.isfinite(t)
    assert collision_margin(FIG4, g, t) == pytest.approx(0.0, abs=1e-12 * g.h)
    assert collision_margin(FIG4, g, 0.5 * t) > 0
    assert collision_margin(FIG4, g, 1.5 * t) < 0


def test_above_critical_never_collides():
    phic = critical_angle(FIG4)
    for f in (1.0, 1.2, 3.0):
        assert math.isinf(max_strips(FIG4, grating(phi_i=f * phic)))


def test_max_strips_floor():
    g = grating()
    assert max_strips(FIG4, g) == math.floor(FIG4.beta * max_passage_time(FIG4, g) / g.d)


def test_max_strips_grows_with_tilt():
    phic = critical_angle(FIG4)
    n = [max_strips(FIG4, grating(phi_i=f * phic)) for f in np.linspace(0, 0.9, 10)]
    assert np.all(np.diff(n) >= 0)


def test_formation_strips():
    g = grating(h=0.92e-4)
    assert formation_strips(FIG4, g) == max_strips(FIG4, g) < 2500
    assert formation_strips(FIG4, grating(h=9.2e-4)) == 2500
    with pytest.raises(GeometryError):
        formation_strips(FIG4, grating(h=FIG4.variant.rho0 * 1.0000001))


def test_packet_touching_at_start():
    g = grating(h=0.9 * FIG4.variant.rho0)
    assert max_passage_time(FIG4, g) == 0.0


@given(st.integers(1, 5), st.floats(0.1, 3.0), st.floats(0.05, 0.95))
def test_resonance_condition(g, theta, beta):
    om = resonance_frequency(g, theta, 0.0, beta, 1e-3)
    lam = 2 * math.pi / om
    assert 1e-3 * (1 / beta - math.cos(theta)) == pytest.approx(g * lam)


def test_no_backward_resonance():
    with pytest.raises(GeometryError):
        resonance_frequency(1, 0.0, 1.4, 0.5, 1e-3)


@given(st.integers(10, 10**6), st.floats(0, 0.01), st.floats(0.1, 3.0), st.floats(0, 6.3))
def test_effective_strips_is_inverse_width(n, phi_i, theta, phi):
    g = grating(n_strips=n, phi_i=phi_i)
    neff = effective_strips(g, theta, phi, FIG4)
    assert neff * line_width(n, phi_i, theta, phi, 0.5) == pytest.approx(1.0)
    assert neff <= n


def test_effective_strips_infinite():
    with pytest.raises(GeometryError):
        effective_strips(grating(n_strips=math.inf), 1.0, 1.0, FIG4)
    g = grating(n_strips=math.inf, phi_i=1e-4)
    assert effective_strips(g, 1.0, 1.0, FIG4) == pytest.approx(1 / line_width(math.inf, 1e-4, 1.0, 1.0, 0.5))


def test_inclined_impact_reduces():
    assert inclined_impact(grating()) == pytest.approx(2 * 2.8e-4)
    assert inclined_impact(grating(phi_i=0.01)) < 2 * 2.8e-4


def test_regime_report_flags():
    g = grating()
    om = resonance_frequency(1, math.pi / 2, 0.0, 0.5, g.d)
    rep = regime_report(FIG4, g, Observation(math.pi / 2, math.pi / 2, om))
    assert rep.multipole_valid and not rep.near_critical
    assert rep.h_eff == pytest.approx(effective_impact(0.5, FIG4.gamma, om))
    assert rep.eta_q2 == pytest.approx(rep.n_eff**2 * rep.eta_q1)
    assert rep.as_dict()["n_max"] == rep.n_max
    # a packet larger than the wavelength breaks the multipole expansion
    big = PacketSpec(LaguerreGauss(20e-4, 10), 0.5)
    rep = regime_report(big, grating(h=30e-4), Observation(math.pi / 2, math.pi / 2, om))
    assert not rep.multipole_valid


def test_regime_report_infinite_parallel_does_not_raise():
    g = grating(n_strips=math.inf)
    rep = regime_report(FIG4, g, Observation(math.pi / 2, math.pi / 2, 3e3))
    assert math.isinf(rep.n_eff)


def test_critical_angle_values():
    assert math.degrees(critical_angle(PacketSpec(LaguerreGauss(100e-7, 10), 0.5))) == pytest.approx(0.0045, rel=0.03)
    assert math.degrees(critical_angle(FIG4)) == pytest.approx(0.0089, rel=0.01)


def test_parallel_passage_time():
    from spr.packets import diffraction_time, mean_radius
    g = grating()
    t = max_passage_time(FIG4, g)
    td = diffraction_time(FIG4)
    assert t == pytest.approx(td * math.sqrt((g.h / 50e-7) ** 2 - 1), rel=1e-12)
    assert t / td == pytest.approx(56, rel=0.01)
    assert mean_radius(FIG4, t) == pytest.approx(g.h, rel=1e-12)


def test_unlimited_passage_above_critical():
    assert math.isinf(max_passage_time(FIG4, grating(phi_i=1.5 * critical_angle(FIG4))))


def test_effective_strips_semi_infinite_value():
    g = grating(n_strips=math.inf, phi_i=math.asin(1e-4))
    beta_gamma = 0.5 / math.sqrt(0.75)
    assert effective_strips(g, math.pi / 2, math.pi / 2, FIG4) == pytest.approx(beta_gamma * 1e4)
    assert beta_gamma * 1e4 == pytest.approx(5774, abs=1)


def test_inclined_impact_value():
    g = grating(phi_i=math.radians(0.0045))
    assert inclined_impact(g) * 1e4 == pytest.approx(5.5996, abs=1e-4)


def test_eta_q1_value():
    g = grating()
    om = resonance_frequency(1, math.pi / 2, 0.0, 0.5, g.d)
    rep = regime_report(FIG4, g, Observation(math.pi / 2, math.pi / 2, om))
    assert rep.eta_q1 == pytest.approx(100 * (3.9e-11 / 5e-6) ** 2)
    assert rep.eta_q1 == pytest.approx(6.08e-9, rel=1e-3)


@given(st.floats(1e-7, 1e-4))
def test_fast_packets_violate_spreading_bound(rho0):
    # lambda^2 < (gamma beta d)^2 for vertical radiation once beta exceeds ~0.786
    pk = PacketSpec(LaguerreGauss(rho0, 10), 0.79)
    g = grating()
    om = resonance_frequency(1, math.pi / 2, 0.0, 0.79, g.d)
    assert not regime_report(pk, g, Observation(math.pi / 2, math.pi / 2, om)).spread_valid


def test_tilt_shifts_resonance():
    w0 = resonance_frequency(1, math.pi / 2, 0.0, 0.5, 10e-4)
    w1 = resonance_frequency(1, math.pi / 2, 1e-3, 0.5, 10e-4)
    assert w1 / w0 == pytest.approx(1 / math.cos(1e-3))


def test_line_width_fig3_value():
    gam = line_width(3500, 7.85e-5, math.pi / 2, math.pi / 2, 0.5)
    assert gam == pytest.approx(1 / 3500 + 7.85e-5 * math.sqrt(3), rel=1e-12)
    assert gam == pytest.approx(4.217e-4, rel=1e-3)
