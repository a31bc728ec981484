import math

import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

import _oracles as O
from uavscp import analytic
from uavscp.analytic import (
    classify_case,
    f_gamma1_cdf,
    f_gamma1_pdf,
    f_gamma2,
    f_gamma3,
    gamma1_rates,
    geometry,
    indicator_g,
    interference_limited,
    regime,
    s_values,
    s_values_radial,
    scp,
)
from uavscp.los import reference_fit
from uavscp.oracle import s_values_oracle
from uavscp.scene import NetworkConfig, get_environment

SUBURBAN = reference_fit("suburban")


# -- condition table ----------------------------------------------------------------


def table_oracle(a, b, r, ltj, h):
    """Every row's predicate written out literally, first match wins.

    Equalities are decided to the classifier's relative tolerance, so a
    tie that rounding splits either way is still a tie.
    """

    def eq(x, y):
        return math.isclose(x, y, rel_tol=analytic.EQ_TOL, abs_tol=1e-300)

    def lt(x, y):
        return x < y and not eq(x, y)

    sba = math.sqrt(a * b) if a * b >= 0 else math.nan
    ra = r * r * a
    lo = (-ra - b) / (2 * r)
    hi = (ra + b) / (2 * r)
    mid = abs(ra + b) / (2 * r)
    rows = [
        a < 0 and b <= 0 and lt(ra, b) and lo <= ltj and not eq(ltj, sba),
        a < 0 and b <= 0 and eq(ra, b) and lo <= ltj and not eq(ltj, sba),
        a < 0 and b <= 0 and lt(ra, b) and sba < ltj < lo,
        a < 0 and b <= 0 and lt(b, ra) and lo <= ltj,
        a < 0 and b <= 0,
        a > 0 and b >= 0 and lt(b, ra) and hi <= ltj and not eq(ltj, sba),
        a > 0 and b >= 0 and eq(ra, b) and hi <= ltj and not eq(ltj, sba),
        a > 0 and b >= 0 and lt(b, ra) and sba < ltj < hi,
        a > 0 and b >= 0 and lt(ra, b) and hi <= ltj,
        a < 0 and b > 0 and ltj >= mid,
        a < 0 and b > 0 and -ra > b and ltj < lo,
        a < 0 and b > 0,
        a > 0 and b < 0 and -ra > b and ltj < lo,
        a > 0 and b < 0 and ltj >= mid,
        a > 0 and b < 0 and -ra < b and ltj < hi,
        a == 0 and (ltj**2 - h**2) / (2 * r) <= ltj and ltj > h and not eq(ltj, h),
        a == 0 and (h**2 - ltj**2) / (2 * r) <= ltj and ltj < h and not eq(ltj, h),
        a == 0 and eq(ltj, h),
        a == 0 and ltj < (h**2 - ltj**2) / (2 * r),
    ]
    return next((k + 1 for k, hit in enumerate(rows) if hit), None)


def test_table_example_a_zero_on_height():
    g = geometry(0.0, 300.0, 300.0, 200.0)
    assert classify_case(g) == 18


def test_table_example_first_row():
    # A < 0, B <= 0, r^2 A < B, (-r^2 A - B)/(2r) <= l_tj
    g = geometry(-0.5, 400.0, 400.0, 500.0)
    assert g.b_coef <= 0 and g.r**2 * g.a_coef < g.b_coef
    assert classify_case(g) == 1


@settings(max_examples=400)
@given(a=st.floats(-3.0, 0.999), ltj=st.floats(1.0, 800.0), h=st.floats(10.0, 2000.0), r=st.floats(1.0, 1000.0))
@example(a=0.7407360919003438, ltj=10.0, h=10.0, r=10.0)  # r^2 A = B up to rounding
def test_classifier_agrees_with_literal_table(a, ltj, h, r):
    g = geometry(a, ltj, h, r)
    if g.a_coef == 0.0 and a != 0.0:
        return  # snapped to the A = 0 rows on purpose
    assert classify_case(g) == table_oracle(g.a_coef, g.b_coef, r, ltj, h)


# -- indicator and S values --------------------------------------------------------------


def test_indicator_by_hand():
    cfg = NetworkConfig(l_tj_m=100.0, h_m=500.0, ps_w=0.1, pj_w=0.01)
    assert (cfg.ps_eff, cfg.pj_eff) == (0.1, 0.01)
    # d^2 = 1e4 + 4e4 - 2e4 = 3e4, H^2 + l^2 = 2.9e5, so 1 + SIR = 1 + 30/29
    phi = math.pi / 3
    assert not indicator_g(2.0, 1.0, 200.0, phi, cfg)
    assert indicator_g(2.1, 1.0, 200.0, phi, cfg)
    assert not indicator_g(1.0, 1.0, 200.0, phi, cfg)
    assert indicator_g(1e9, 1.0, 200.0, phi, cfg)


def test_full_region_values():
    cfg = NetworkConfig(l_tj_m=100.0)
    r = 300.0
    s = s_values(analytic.case_geometry(1e9, 1.0, r, cfg))
    assert s == pytest.approx((math.pi * r * r / 2, math.pi * r, math.pi * r**3), rel=1e-9)
    assert s_values(analytic.case_geometry(1.0, 1.0, r, cfg)) == (0.0, 0.0, 0.0)


@pytest.mark.parametrize(
    "a, ltj, h, r",
    [(-0.4, 150.0, 500.0, 400.0), (0.3, 200.0, 100.0, 500.0), (0.6, 50.0, 300.0, 250.0),
     (-2.0, 400.0, 100.0, 500.0), (0.95, 450.0, 1000.0, 500.0), (0.2, 80.0, 150.0, 800.0)],
)
def test_s_values_match_direct_integration(a, ltj, h, r):
    g = geometry(a, ltj, h, r)
    got = s_values(g)
    ref = s_values_oracle(g.a_coef, ltj, h, r)
    scale = (math.pi * r * r / 2, math.pi * r, math.pi * r**3)
    for x, y, s in zip(got, ref, scale):
        assert x / s == pytest.approx(y / s, abs=1e-6)


@pytest.mark.parametrize("a", [-1.0, 0.0, 0.5, 0.9])
def test_jammer_over_transmitter_reduces_to_radial(a):
    h, r = 400.0, 500.0
    tiny = geometry(a, 1e-4, h, r)
    assert s_values(tiny) == pytest.approx(s_values_radial(tiny.a_coef, h, r), rel=1e-6, abs=1e-6)


def test_conditional_cdf_saturates():
    cfg = NetworkConfig()
    r = 250.0
    assert f_gamma3(1e12, 1.0, r, cfg) == pytest.approx(r * r / cfg.r1_m**2, rel=1e-9)


# -- Gamma_2 -----------------------------------------------------------------------------

CDF_CASES = {
    "default": NetworkConfig(),
    "urban_wide": NetworkConfig(environment=get_environment("urban"), h_m=150.0, l_tj_m=80.0, r1_m=800.0,
                                pj_w=0.002, rt_bps_hz=0.5, l_sd_m=60.0),
    "highrise": NetworkConfig(environment=get_environment("highrise_urban"), h_m=1000.0, l_tj_m=300.0,
                              pj_w=0.05),
}


@pytest.mark.parametrize("name", sorted(CDF_CASES))
@pytest.mark.parametrize("y", [1.0001, 1.01, 1.55, 3.0, 20.0, 45.0, 300.0])
def test_cdf_matches_direct_integration(name, y):
    cfg = CDF_CASES[name]
    p = reference_fit(cfg.environment.name)
    assert f_gamma2(y, cfg, p) == pytest.approx(O.cdf_gamma2(y, cfg, p), abs=1e-7)


@given(a=st.floats(1.0, 1e4), b=st.floats(1.0, 1e4), h=st.sampled_from([100.0, 500.0, 1000.0]),
       ltj=st.floats(0.0, 500.0))
def test_cdf_monotone_and_bounded(a, b, h, ltj):
    cfg = NetworkConfig(h_m=h, l_tj_m=ltj)
    lo, hi = sorted((a, b))
    f_lo, f_hi = f_gamma2(lo, cfg, SUBURBAN), f_gamma2(hi, cfg, SUBURBAN)
    assert 0.0 <= f_lo <= f_hi + 1e-9
    assert f_hi <= 1.0


def test_cdf_limits():
    cfg = NetworkConfig()
    assert f_gamma2(1.0, cfg, SUBURBAN) == 0.0
    assert f_gamma2(1e12, cfg, SUBURBAN) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("edge", [0, 1, 2])
def test_cdf_continuous_across_regimes(edge):
    h = 200.0
    bp = SUBURBAN.breakpoints(h)[edge]
    below = NetworkConfig(h_m=h, l_tj_m=50.0, r1_m=bp * (1 - 1e-10))
    above = below.replace(r1_m=bp * (1 + 1e-10))
    assert regime(below, SUBURBAN) == edge + 1
    assert regime(above, SUBURBAN) == edge + 2
    for y in (1.5, 4.0, 30.0):
        assert f_gamma2(y, below, SUBURBAN) == pytest.approx(f_gamma2(y, above, SUBURBAN), abs=1e-6)


# -- Gamma_1 -----------------------------------------------------------------------------


@pytest.mark.parametrize(
    "cfg",
    [NetworkConfig(), NetworkConfig(h_m=100.0, l_tj_m=400.0, phi_jp=3.0),
     NetworkConfig(l_tj_m=100.0, phi_jp=0.3, phi_d=0.3)],
)
def test_gamma1_rates_match_coordinates(cfg):
    got = [x for pair in gamma1_rates(cfg, SUBURBAN) for x in pair]
    ref = [x for pair in O.gamma1_rates(cfg, SUBURBAN) for x in pair]
    assert got == pytest.approx(ref, rel=1e-12)


def test_gamma1_pdf_is_cdf_derivative():
    cfg = NetworkConfig(h_m=100.0, l_tj_m=400.0, phi_jp=3.0)
    for g in (1.2, 3.0, 10.0):
        d = 1e-5
        fd = (f_gamma1_cdf(g + d, cfg, SUBURBAN) - f_gamma1_cdf(g - d, cfg, SUBURBAN)) / (2 * d)
        assert f_gamma1_pdf(g, cfg, SUBURBAN) == pytest.approx(fd, abs=1e-8)


# -- SCP -----------------------------------------------------------------------------------

# values from the direct-integration reference (tests/_oracles.py), which
# integrates the indicator over the disk and the Gamma_1 density with
# QUADPACK; they take minutes to recompute
FROZEN_SCP = {
    "default": (NetworkConfig(), 0.10551521581782168),
    "low_offset": (NetworkConfig(h_m=100.0, l_tj_m=200.0, pj_w=1e-3, phi_jp=1.0), 0.06647908407142974),
    "highrise_two": (NetworkConfig(environment=get_environment("highrise_urban"), h_m=1000.0, l_tj_m=300.0,
                                   n_eves=2, pj_w=0.05), 0.5999873477506916),
    "urban_wide": (CDF_CASES["urban_wide"], 0.5802911242232632),
    "quiet_dense": (interference_limited(NetworkConfig(environment=get_environment("dense_urban"), h_m=300.0,
                                                       l_tj_m=150.0, phi_jp=2.0, pj_w=0.01)),
                    0.17379369056324356),
}


@pytest.mark.parametrize("name", sorted(FROZEN_SCP))
def test_scp_matches_reference(name):
    cfg, expected = FROZEN_SCP[name]
    res = scp(cfg, reference_fit(cfg.environment.name))
    assert res.scp == pytest.approx(expected, abs=1e-7)
    assert res.quadrature_error_estimate <= 1e-8


@settings(max_examples=10)
@given(rot=st.floats(-6.0, 6.0))
def test_scp_rotation_invariant(rot):
    cfg = NetworkConfig(l_tj_m=150.0, phi_jp=0.7, phi_d=0.2, pj_w=1e-3)
    turned = cfg.replace(phi_jp=cfg.phi_jp + rot, phi_d=cfg.phi_d + rot)
    assert scp(turned, SUBURBAN).scp == pytest.approx(scp(cfg, SUBURBAN).scp, abs=1e-8)


def test_harmless_eavesdroppers_leave_outage_only(monkeypatch):
    monkeypatch.setattr(analytic, "f_gamma2", lambda y, cfg, p: 1.0 if y >= 1.0 else 0.0)
    cfg = NetworkConfig(pj_w=1e-3)
    expected = 1.0 - f_gamma1_cdf(2**cfg.rt_bps_hz, cfg, SUBURBAN)
    assert scp(cfg, SUBURBAN).scp == pytest.approx(expected, abs=1e-8)


@pytest.mark.parametrize("k", [0.1, 10.0])
def test_zero_rate_interference_limited_scales_out(k):
    cfg = interference_limited(NetworkConfig(pj_w=0.01, rt_bps_hz=0.0, l_tj_m=100.0))
    scaled = cfg.replace(ps_w=cfg.ps_w * k, pj_w=cfg.pj_w * k)
    assert scp(scaled, SUBURBAN).scp == pytest.approx(scp(cfg, SUBURBAN).scp, abs=1e-8)


def test_two_eavesdroppers_use_the_squared_cdf(monkeypatch):
    cfg = NetworkConfig(pj_w=1e-2, n_eves=2)
    two = scp(cfg, SUBURBAN).scp
    real = analytic.f_gamma2
    monkeypatch.setattr(analytic, "f_gamma2", lambda y, c, p: real(y, c, p) ** 2)
    assert scp(cfg.replace(n_eves=1), SUBURBAN).scp == pytest.approx(two, abs=1e-8)
    monkeypatch.undo()
    assert two <= scp(cfg.replace(n_eves=1), SUBURBAN).scp


def test_no_jamming_gives_zero():
    res = scp(NetworkConfig(pj_w=0.0), SUBURBAN)
    assert res.scp == 0.0


def test_scp_result_metadata():
    res = scp(NetworkConfig(), SUBURBAN)
    assert res.lower_bound
    assert res.regime == regime(NetworkConfig(), SUBURBAN)
    assert res.gamma1_truncation > 1.0
    quiet = scp(interference_limited(NetworkConfig()), SUBURBAN)
    assert not quiet.lower_bound


def test_scp_bounded_over_power_grid():
    values = [scp(NetworkConfig(pj_w=float(x)), SUBURBAN).scp for x in np.logspace(-5, 0, 6)]
    assert all(0.0 <= v <= 1.0 for v in values)
