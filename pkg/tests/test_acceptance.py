"""Acceptance suite.

One test per shipped acceptance criterion, each asserting the stated
tolerance and printing a PASS line (run with `pytest -s` to see them):

 1. Tuning arithmetic on the reference critical points, exact.
 2. Relay experiment reproduces the benchmark plant's critical point.
 3. Delayed-relay experiment reproduces the shifted critical point.
 4. Identification round trip recovers the benchmark model within 5%.
 5. Closed-loop regulation and overshoot ranking of the three rule sets.
 6. Circuit synthesis round trip and half-split consistency flagging.
 7. Property sweep: linearity, time invariance, homogeneity, convergence,
    averaging invariances, CSV byte stability.
"""

import math
import time

import numpy as np
import pytest

import relaytune as rt
from relaytune import csvio

from conftest import (
    BENCH_DEAD,
    BENCH_GAIN,
    BENCH_TAU,
    ORACLE_KR_EXTRA,
    ORACLE_TU,
    step_input,
)

BENCH = rt.FopdtModel(BENCH_GAIN, BENCH_TAU, BENCH_DEAD)
CFG = rt.SimConfig(dt=0.01, duration=100.0)


def _ok(n, name):
    print(f"ACCEPTANCE {n} {name}: PASS")


def test_acceptance_1_tuning_arithmetic():
    g = rt.tune_ah(rt.CriticalPoint(6.21, 4.0))
    assert g.kp == pytest.approx(3.726, abs=1e-12)
    assert g.ti == pytest.approx(2.0, abs=1e-12)
    assert g.td == pytest.approx(0.5, abs=1e-12)

    g = rt.tune_kc(rt.CriticalPoint(6.21, 4.0), 50.0)
    assert g.kp == pytest.approx(3.99, abs=0.01)
    assert g.ti == pytest.approx(3.49, abs=0.01)
    assert g.td == pytest.approx(0.873, abs=0.01)

    g = rt.tune_kr(rt.CriticalPoint(5.6, 4.8))
    assert g.kp == pytest.approx(4.48, abs=1e-12)
    assert g.ti == pytest.approx(3.072, abs=1e-12)
    assert g.td == pytest.approx(0.768, abs=1e-12)
    _ok(1, "tuning arithmetic")


def test_acceptance_2_relay_critical_point():
    # analytic oracle, computed independently: the phase-crossover frequency
    # w solves dead*w + atan(tau*w) = pi, giving Tu ~ 4.04
    w = 2.0 * math.pi / ORACLE_TU
    assert abs(BENCH_DEAD * w + math.atan(BENCH_TAU * w) - math.pi) < 1e-9
    df_gain_bound = math.sqrt(1.0 + (BENCH_TAU * w) ** 2) / BENCH_GAIN
    assert df_gain_bound == pytest.approx(7.13, abs=0.01)

    start = time.perf_counter()
    outcome, _ = rt.relay_experiment(BENCH, 1.0, cfg=CFG)
    elapsed = time.perf_counter() - start
    assert outcome.period_tc == pytest.approx(4.0, rel=0.10)
    assert outcome.period_tc == pytest.approx(ORACLE_TU, rel=0.10)
    assert outcome.critical_gain_kc == pytest.approx(6.21, rel=0.15)
    assert outcome.critical_gain_kc < df_gain_bound  # sinusoid approximation caps it
    assert elapsed < 1.0
    _ok(2, f"relay critical point (Tc={outcome.period_tc:.3f}, "
           f"Kc={outcome.critical_gain_kc:.3f}, {elapsed * 1e3:.0f} ms)")


def test_acceptance_3_delayed_relay_critical_point():
    start = time.perf_counter()
    outcome, _ = rt.relay_experiment(BENCH, 1.0, extra_delay=0.3667, cfg=CFG)
    elapsed = time.perf_counter() - start
    assert outcome.period_tc == pytest.approx(4.8, rel=0.10)
    assert outcome.critical_gain_kc == pytest.approx(5.6, rel=0.15)
    assert elapsed < 1.0
    _ok(3, f"delayed relay critical point (Tc={outcome.period_tc:.3f}, "
           f"Kc={outcome.critical_gain_kc:.3f}, {elapsed * 1e3:.0f} ms)")


def test_acceptance_4_identification_round_trip():
    start = time.perf_counter()
    cfg = rt.SimConfig(dt=0.01, duration=30.0)
    trace = rt.simulate_open_loop(BENCH, step_input(cfg, step_time=1.0), cfg)
    record = rt.ResponseRecord(time=trace.times(), input=trace.control,
                               output=trace.output)
    fit = rt.identify_fopdt(record)
    elapsed = time.perf_counter() - start
    assert fit.gain_kp == pytest.approx(BENCH_GAIN, rel=0.05)
    assert fit.tau == pytest.approx(BENCH_TAU, rel=0.05)
    assert fit.dead_time == pytest.approx(BENCH_DEAD, rel=0.05)
    assert elapsed < 1.0
    _ok(4, f"identification round trip (K={fit.gain_kp:.4f}, tau={fit.tau:.3f}, "
           f"dead={fit.dead_time:.3f}, {elapsed * 1e3:.0f} ms)")


def test_acceptance_5_closed_loop_regulation_and_ranking():
    gain_sets = {
        "ah": rt.PidGains(3.726, 2.0, 0.5),
        "kc": rt.PidGains(3.99, 3.4985, 0.8746),
        "kr": rt.PidGains(4.48, 3.072, 0.768),
    }
    scenario = rt.LoopScenario()  # unit step, -0.5 input disturbance at 50 s
    start = time.perf_counter()
    overshoot = {}
    for name, gains in gain_sets.items():
        trace = rt.simulate_closed_loop(BENCH, gains, scenario, CFG)
        k49 = int(round(49.9 / CFG.dt))
        assert abs(1.0 - trace.output[k49]) < 0.01, f"{name} not settled before 50 s"
        assert abs(1.0 - trace.output[-1]) < 0.01, f"{name} not recovered by 100 s"
        m = rt.compute_metrics(trace, 0.05, disturbance_time=50.0)
        overshoot[name] = m.overshoot_percent
    elapsed = time.perf_counter() - start
    assert overshoot["kc"] < overshoot["ah"]
    assert overshoot["kc"] < overshoot["kr"]
    assert elapsed < 5.0
    _ok(5, "closed-loop regulation and ranking (overshoot: "
           + ", ".join(f"{k}={v:.1f}%" for k, v in overshoot.items())
           + f", {elapsed:.2f} s)")


def test_acceptance_6_circuit_round_trip_and_half_split():
    rng = np.random.default_rng(23)
    for _ in range(1000):
        kp = float(np.exp(rng.uniform(-2, 4)))
        ki = float(np.exp(rng.uniform(-3, 4)))
        c1 = float(np.exp(rng.uniform(np.log(1e-7), np.log(1e-3))))
        c2 = float(np.exp(rng.uniform(np.log(1e-7), np.log(1e-3))))
        r3 = float(np.exp(rng.uniform(np.log(100.0), np.log(1e5))))
        kd = float(rng.uniform(0.0, 0.99) * kp * c1 / c2)
        target = rt.ParallelGains(kp, ki, kd)
        got = rt.circuit_gains(rt.synthesize_exact(target, r3, c1, c2).design)
        assert got.kp == pytest.approx(kp, rel=1e-9)
        assert got.ki == pytest.approx(ki, rel=1e-9)
        assert got.kd == pytest.approx(kd, rel=1e-9, abs=1e-300)

    target = rt.ParallelGains(3.99, 1.95, 2.03)
    result = rt.synthesize_half_split(target, r3=1000.0, c1=220e-6, c2=22e-6)
    exact_r1 = 3.99 / (2 * 1.95 * 22e-6)
    exact_r2 = 3.99 / (2 * 1.95 * 220e-6)
    assert result.design.r1 == pytest.approx(exact_r1, rel=0.01)
    assert result.design.r1 == pytest.approx(46.5e3, rel=0.01)
    assert result.design.r2 == pytest.approx(exact_r2, rel=0.01)
    assert result.design.r2 == pytest.approx(4.65e3, rel=0.01)
    assert result.design.r4 == pytest.approx(1.995e3, rel=0.01)
    # the report must flag the KP mismatch of the half-split formulas
    assert not result.report.is_consistent()
    assert result.report.rel_errors()["kp"] > 1.0
    # forward evaluation of the published rounded component set lands near 19.2
    published = rt.CircuitDesign(r1=45e3, r2=4.5e3, r3=1e3, r4=1.9e3,
                                 c1=220e-6, c2=22e-6)
    assert rt.circuit_gains(published).kp == pytest.approx(19.2, abs=0.05)
    _ok(6, "circuit round trip and half-split consistency flag")


def test_acceptance_7_property_sweep(tmp_path):
    cfg = rt.SimConfig(dt=0.01, duration=30.0)
    rng = np.random.default_rng(29)
    u = rng.standard_normal(cfg.n_samples)
    y = rt.simulate_open_loop(BENCH, u, cfg).output

    # linearity to 1e-12
    y3 = rt.simulate_open_loop(BENCH, 3.0 * u, cfg).output
    assert y3 == pytest.approx(3.0 * y, rel=1e-12, abs=1e-12)

    # time invariance, exact
    shift = 200
    u_shift = np.concatenate([np.zeros(shift), u[:-shift]])
    y_shift = rt.simulate_open_loop(BENCH, u_shift, cfg).output
    assert np.array_equal(y_shift[shift:], y[:-shift])

    # relay amplitude homogeneity in d, critical gain invariant
    o1, _ = rt.relay_experiment(BENCH, 1.0, cfg=CFG)
    o2, _ = rt.relay_experiment(BENCH, 2.0, cfg=CFG)
    assert o2.amplitude_a / o1.amplitude_a == pytest.approx(2.0, abs=1e-6)
    assert o2.critical_gain_kc == pytest.approx(o1.critical_gain_kc, rel=1e-12)

    # dt halving moves the step response by < 0.5%
    fine = rt.SimConfig(dt=0.005, duration=30.0)
    ys = rt.simulate_open_loop(BENCH, step_input(cfg), cfg).output
    yf = rt.simulate_open_loop(BENCH, step_input(fine), fine).output
    assert np.max(np.abs(ys - yf[::2])) / abs(ys[-1]) < 0.005

    # averaging idempotence and permutation invariance
    t = np.linspace(0.0, 10.0, 60)
    recs = [rt.ResponseRecord(time=t, input=np.ones(60),
                              output=rng.standard_normal(60))
            for _ in range(3)]
    single = rt.average_records([recs[0]], grid_dt=0.2)
    again = rt.average_records([single], grid_dt=0.2)
    assert again.output == pytest.approx(single.output, rel=1e-12, abs=1e-15)
    fwd = rt.average_records(recs, grid_dt=0.2)
    rev = rt.average_records(recs[::-1], grid_dt=0.2)
    assert rev.output == pytest.approx(fwd.output, rel=1e-12, abs=1e-15)

    # CSV export/import byte stability
    trace = rt.simulate_open_loop(BENCH, step_input(cfg, step_time=1.0), cfg)
    p1 = tmp_path / "t1.csv"
    p2 = tmp_path / "t2.csv"
    csvio.write_trace_csv(p1, trace)
    rec = csvio.read_record_csv(p1)
    csvio.write_record_csv(p2, rec)
    rec2 = csvio.read_record_csv(p2)
    p3 = tmp_path / "t3.csv"
    csvio.write_record_csv(p3, rec2)
    assert p2.read_bytes() == p3.read_bytes()
    _ok(7, "property sweep")
