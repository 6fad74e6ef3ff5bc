"""Tuning rules on the critical point: reference values and rule structure."""

import math
import warnings

import numpy as np
import pytest

import relaytune as rt


def test_tune_ah_reference_values():
    g = rt.tune_ah(rt.CriticalPoint(6.21, 4.0))
    assert g.kp == pytest.approx(3.726, rel=1e-12)
    assert g.ti == pytest.approx(2.0, rel=1e-12)
    assert g.td == pytest.approx(0.5, rel=1e-12)


def test_tune_ah_trivial_and_arithmetic():
    assert rt.tune_ah(rt.CriticalPoint(1, 1)) == rt.PidGains(0.6, 0.5, 0.125)
    g = rt.tune_ah(rt.CriticalPoint(10, 2))
    assert (g.kp, g.ti, g.td) == (6.0, 1.0, 0.25)


def test_tune_kc_reference_values():
    g = rt.tune_kc(rt.CriticalPoint(6.21, 4.0), 50.0)
    assert g.kp == pytest.approx(3.99, abs=0.01)
    assert g.ti == pytest.approx(3.49, abs=0.01)
    assert g.td == pytest.approx(0.873, abs=0.01)
    # formula check against an independent evaluation
    c, s = math.cos(math.radians(50)), math.sin(math.radians(50))
    assert g.kp == pytest.approx(6.21 * c, rel=1e-15)
    assert g.ti == pytest.approx(4.0 * (1 + s) / (math.pi * c), rel=1e-15)
    assert g.td == pytest.approx(0.25 * g.ti, rel=1e-15)


def test_tune_kc_small_pm_limit():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", rt.PhaseMarginWarning)
        g = rt.tune_kc(rt.CriticalPoint(6.21, 4.0), 1e-7)
    assert g.kp == pytest.approx(6.21, rel=1e-6)
    assert g.ti == pytest.approx(4.0 / math.pi, rel=1e-6)
    assert g.td == pytest.approx(1.0 / math.pi, rel=1e-6)


@pytest.mark.parametrize("pm", [90.0, 0.0, -10.0, 120.0, math.nan])
def test_tune_kc_rejects_degenerate_pm(pm):
    with pytest.raises(rt.InvalidPhaseMargin):
        rt.tune_kc(rt.CriticalPoint(6.21, 4.0), pm)


def test_kr_extra_delay_values():
    assert rt.kr_extra_delay(70.0, 4.0) == pytest.approx(11.0 / 30.0, rel=1e-15)
    with pytest.warns(rt.PhaseMarginWarning):
        assert rt.kr_extra_delay(37.0, 4.0) == 0.0
    with pytest.warns(rt.PhaseMarginWarning):
        assert rt.kr_extra_delay(397.0, 1.0) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(rt.InvalidPhaseMargin):
        rt.kr_extra_delay(36.9, 4.0)
    with pytest.raises(rt.InvalidArgument):
        rt.kr_extra_delay(50.0, 0.0)


def test_kr_extra_delay_linear_in_tc_affine_in_pm():
    base = rt.kr_extra_delay(55.0, 2.0)
    assert rt.kr_extra_delay(55.0, 6.0) == pytest.approx(3 * base, rel=1e-12)
    d1 = rt.kr_extra_delay(47.0, 2.0)
    d2 = rt.kr_extra_delay(57.0, 2.0)
    d3 = rt.kr_extra_delay(67.0, 2.0)
    assert d3 - d2 == pytest.approx(d2 - d1, rel=1e-12)


def test_tune_kr_reference_values():
    g = rt.tune_kr(rt.CriticalPoint(5.6, 4.8))
    assert g.kp == pytest.approx(4.48, rel=1e-12)
    assert g.ti == pytest.approx(3.072, rel=1e-12)
    assert g.td == pytest.approx(0.768, rel=1e-12)
    assert rt.tune_kr(rt.CriticalPoint(1, 1)) == rt.PidGains(0.8, 0.64, 0.16)
    g = rt.tune_kr(rt.CriticalPoint(2, 10))
    assert (g.kp, g.ti, g.td) == (1.6, pytest.approx(6.4), pytest.approx(1.6))


def test_td_is_quarter_ti_for_every_rule():
    rng = np.random.default_rng(11)
    for _ in range(50):
        kc, tc = np.exp(rng.uniform(-2, 3, size=2))
        cp = rt.CriticalPoint(float(kc), float(tc))
        assert rt.tune_ah(cp).td == 0.25 * rt.tune_ah(cp).ti
        assert rt.tune_kr(cp).td == 0.25 * rt.tune_kr(cp).ti
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", rt.PhaseMarginWarning)
            g = rt.tune_kc(cp, float(rng.uniform(5, 85)))
        assert g.td == 0.25 * g.ti


def test_rules_are_homogeneous_in_kc_and_tc():
    cp = rt.CriticalPoint(6.21, 4.0)
    for rule in (rt.tune_ah, rt.tune_kr, lambda c: rt.tune_kc(c, 50.0)):
        base = rule(cp)
        scaled_kc = rule(rt.CriticalPoint(3.0 * cp.kc, cp.tc))
        assert scaled_kc.kp == pytest.approx(3.0 * base.kp, rel=1e-12)
        assert scaled_kc.ti == pytest.approx(base.ti, rel=1e-12)
        assert scaled_kc.td == pytest.approx(base.td, rel=1e-12)
        scaled_tc = rule(rt.CriticalPoint(cp.kc, 3.0 * cp.tc))
        assert scaled_tc.kp == pytest.approx(base.kp, rel=1e-12)
        assert scaled_tc.ti == pytest.approx(3.0 * base.ti, rel=1e-12)
        assert scaled_tc.td == pytest.approx(3.0 * base.td, rel=1e-12)


def test_tune_kc_monotone_in_pm():
    cp = rt.CriticalPoint(6.21, 4.0)
    pms = np.arange(5.0, 86.0, 5.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", rt.PhaseMarginWarning)
        gains = [rt.tune_kc(cp, float(pm)) for pm in pms]
    kps = [g.kp for g in gains]
    tis = [g.ti for g in gains]
    assert all(a > b for a, b in zip(kps, kps[1:]))
    assert all(a < b for a, b in zip(tis, tis[1:]))


def test_phase_margin_warning_window():
    cp = rt.CriticalPoint(6.21, 4.0)
    for pm in (30.0, 75.0):
        with pytest.warns(rt.PhaseMarginWarning):
            rt.tune_kc(cp, pm)
    for pm in (40.0, 50.0, 70.0):
        with warnings.catch_warnings():
            warnings.simplefilter("error", rt.PhaseMarginWarning)
            rt.tune_kc(cp, pm)


def test_critical_point_validation():
    with pytest.raises(rt.InvalidArgument):
        rt.CriticalPoint(0.0, 1.0)
    with pytest.raises(rt.InvalidArgument):
        rt.CriticalPoint(1.0, -1.0)
    with pytest.raises(rt.InvalidArgument):
        rt.CriticalPoint(math.inf, 1.0)
