"""Shared fixtures and frozen oracle values.

BENCH_* constants describe the benchmark plant used throughout the suite:
G(s) = 0.322/(1.33 s + 1) * exp(-1.3 s). The oracle values below were
computed independently of the simulator (transcendental equations solved to
high precision beforehand); test_relay.py::test_frozen_oracles re-verifies
each one against its defining equation before any simulation test trusts it.
"""

import math

import pytest

import relaytune as rt

BENCH_GAIN = 0.322
BENCH_TAU = 1.33
BENCH_DEAD = 1.3

# Phase-crossover frequency of the benchmark plant: the w > 0 solving
#   dead*w + atan(tau*w) = pi,  ultimate period Tu = 2*pi/w.
ORACLE_TU = 4.041175474371774

# Exact symmetric relay limit cycle (piecewise-exponential analysis, d = 1):
# half-period h solves  K + (y1 - K)*exp(-(h - dead)/tau) = 0  with
# y1 = -K*(1 - exp(-dead/tau)) the output at the delayed switch arrival,
# and the oscillation amplitude is |y1|.
ORACLE_RELAY_TC = 3.8893681882765665
ORACLE_RELAY_AMP = 0.20084049065304782

# Same analysis with an extra transport delay of (70-37)/360*4 = 11/30 s.
ORACLE_KR_EXTRA = 11.0 / 30.0
ORACLE_DELAYED_TC = 4.767227962766284
ORACLE_DELAYED_AMP = 0.23003402115782304


@pytest.fixture
def bench_model():
    return rt.FopdtModel(BENCH_GAIN, BENCH_TAU, BENCH_DEAD)


@pytest.fixture
def default_cfg():
    return rt.SimConfig(dt=0.01, duration=100.0)


def step_input(cfg: rt.SimConfig, magnitude: float = 1.0, step_time: float = 0.0):
    """Sampled step input on cfg's grid: 0 before step_time, magnitude after."""
    import numpy as np

    u = np.full(cfg.n_samples, magnitude, dtype=np.float64)
    k0 = int(math.ceil(step_time / cfg.dt - 1e-9))
    u[: min(max(k0, 0), cfg.n_samples)] = 0.0
    return u
