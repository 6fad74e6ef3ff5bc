"""Open-loop simulation: exactness of the discretization and its invariants."""

import math

import numpy as np
import pytest

import relaytune as rt

from conftest import BENCH_DEAD, BENCH_GAIN, BENCH_TAU, step_input


def test_step_reaches_steady_gain(bench_model):
    cfg = rt.SimConfig(dt=0.01, duration=15.0)
    trace = rt.simulate_open_loop(bench_model, step_input(cfg), cfg)
    assert abs(trace.output[-1] - BENCH_GAIN) <= 0.001 * BENCH_GAIN


def test_zero_input_stays_zero(bench_model):
    cfg = rt.SimConfig(dt=0.01, duration=5.0)
    trace = rt.simulate_open_loop(bench_model, np.zeros(cfg.n_samples), cfg)
    assert not trace.output.any()


def test_step_value_at_dead_time_plus_tau(bench_model):
    # analytic FOPDT step: y(dead + tau) = K*(1 - 1/e)
    cfg = rt.SimConfig(dt=0.01, duration=10.0)
    trace = rt.simulate_open_loop(bench_model, step_input(cfg), cfg)
    k = int(round((BENCH_DEAD + BENCH_TAU) / cfg.dt))
    expected = BENCH_GAIN * (1.0 - math.exp(-1.0))
    assert expected == pytest.approx(0.20354281994279558)
    assert trace.output[k] == pytest.approx(expected, abs=0.002)


def test_step_matches_analytic_solution_on_grid(bench_model):
    # zero-order hold is exact for steps when the dead time sits on the grid
    cfg = rt.SimConfig(dt=0.01, duration=20.0)
    trace = rt.simulate_open_loop(bench_model, step_input(cfg), cfg)
    t = trace.times()
    analytic = np.where(
        t >= BENCH_DEAD - 1e-12,
        BENCH_GAIN * (1.0 - np.exp(-(t - BENCH_DEAD) / BENCH_TAU)),
        0.0,
    )
    assert np.max(np.abs(trace.output - analytic)) < 1e-9


def test_output_holds_through_dead_time(bench_model):
    cfg = rt.SimConfig(dt=0.01, duration=5.0)
    trace = rt.simulate_open_loop(bench_model, step_input(cfg), cfg)
    n_dead = int(round(BENCH_DEAD / cfg.dt))
    assert not trace.output[:n_dead + 1].any()
    assert trace.output[n_dead + 1] != 0.0


def test_equilibrium_start_is_stationary():
    model = rt.FopdtModel(0.5, 2.0, 1.0)
    cfg = rt.SimConfig(dt=0.05, duration=10.0, initial_output=2.0)
    u = np.full(cfg.n_samples, 2.0 / 0.5)
    trace = rt.simulate_open_loop(model, u, cfg)
    assert trace.output == pytest.approx(np.full(cfg.n_samples, 2.0), rel=1e-12)


def test_time_invariance_exact(bench_model):
    cfg = rt.SimConfig(dt=0.01, duration=30.0)
    rng = np.random.default_rng(3)
    u = rng.standard_normal(cfg.n_samples)
    shift = 137
    u_shifted = np.concatenate([np.zeros(shift), u[:-shift]])
    y = rt.simulate_open_loop(bench_model, u, cfg).output
    y_shifted = rt.simulate_open_loop(bench_model, u_shifted, cfg).output
    assert np.array_equal(y_shifted[shift:], y[:-shift])


def test_linearity(bench_model):
    cfg = rt.SimConfig(dt=0.01, duration=30.0)
    rng = np.random.default_rng(4)
    u = rng.standard_normal(cfg.n_samples)
    y = rt.simulate_open_loop(bench_model, u, cfg).output
    for a in (0.25, -3.0, 17.0):
        ya = rt.simulate_open_loop(bench_model, a * u, cfg).output
        assert ya == pytest.approx(a * y, rel=1e-12, abs=1e-12)


def test_dt_halving_convergence(bench_model):
    coarse = rt.SimConfig(dt=0.01, duration=20.0)
    fine = rt.SimConfig(dt=0.005, duration=20.0)
    y1 = rt.simulate_open_loop(bench_model, step_input(coarse), coarse).output
    y2 = rt.simulate_open_loop(bench_model, step_input(fine), fine).output
    scale = abs(y1[-1])
    diff = np.max(np.abs(y1 - y2[::2])) / scale
    assert diff < 0.005


def test_config_errors(bench_model):
    with pytest.raises(rt.ConfigError):
        rt.simulate_open_loop(bench_model, np.zeros(10),
                              rt.SimConfig(dt=0.5, duration=5.0))
    cfg = rt.SimConfig(dt=0.01, duration=5.0)
    with pytest.raises(rt.ConfigError):
        rt.simulate_open_loop(bench_model, np.zeros(cfg.n_samples - 3), cfg)


def test_sim_config_validation():
    with pytest.raises(rt.InvalidArgument):
        rt.SimConfig(dt=0.0, duration=1.0)
    with pytest.raises(rt.InvalidArgument):
        rt.SimConfig(dt=0.1, duration=0.0)
    with pytest.raises(rt.InvalidArgument):
        rt.SimConfig(dt=2.0, duration=1.0)
    assert rt.SimConfig(dt=0.01, duration=100.0).n_samples == 10001
