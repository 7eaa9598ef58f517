import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cac_oracle import brute_force_admission
from femtohandover.cac import (
    CacPolicy,
    CacState,
    Decision,
    admit_decision,
    first_admission,
    run_gate,
    update,
)
from femtohandover.errors import ContractViolation
from femtohandover.radio import Measurement

THR = -30.0


def trace(times, rsl, esio):
    return [Measurement(float(t), float(r), float(e)) for t, r, e in zip(times, rsl, esio)]


def grid(n, dt=0.1):
    return np.arange(n) * dt


def test_dip_at_twenty_seconds_never_admits():
    t = grid(301)
    rsl = np.where(t < 20.0 - 1e-9, THR + 5, THR - 5)
    policy = CacPolicy(THR, 20.0, 0.0)
    state = CacState()
    for m in trace(t, rsl, np.full_like(t, 10.0)):
        state = update(state, m, policy)
        assert state.last_decision is not Decision.ADMIT
        if m.time >= 20.0 - 1e-9:
            assert state.above_since is None


def test_zero_threshold_time_admits_on_first_sample():
    state = update(CacState(), Measurement(0.0, THR, 5.0), CacPolicy(THR, 0.0, 0.0))
    assert admit_decision(state) is Decision.ADMIT


def test_ten_second_timer_admits_at_fifteen():
    t = grid(301)
    rsl = np.where(t >= 5.0 - 1e-9, THR + 1, THR - 1)
    ms = trace(t, rsl, np.full_like(t, 3.0))
    state, m = run_gate(ms, CacPolicy(THR, 10.0, 0.0))
    assert m.time == pytest.approx(15.0)
    assert state.above_since == pytest.approx(5.0)
    assert first_admission(t, rsl, np.full_like(t, 3.0), CacPolicy(THR, 10.0, 0.0)) == 150


def test_fresh_state_pending():
    assert admit_decision(CacState()) is Decision.PENDING


def test_interference_rejection_is_not_latched():
    policy = CacPolicy(THR, 1.0, 6.0)
    t = grid(40)
    esio = np.where(t < 3.0 - 1e-9, 0.0, 9.0)
    state = CacState()
    decisions = []
    for m in trace(t, np.full_like(t, THR + 2), esio):
        state = update(state, m, policy)
        decisions.append(state.last_decision)
    assert Decision.REJECT_INTERFERENCE in decisions
    assert decisions[-1] is Decision.ADMIT
    assert decisions.index(Decision.ADMIT) == 30


def test_always_low_es_io_rejects():
    t = grid(200)
    state, m = run_gate(trace(t, np.full_like(t, THR + 2), np.full_like(t, -3.0)), CacPolicy(THR, 5.0, 0.0))
    assert m is None
    assert admit_decision(state) is Decision.REJECT_INTERFERENCE


def test_out_of_order_measurement():
    policy = CacPolicy(THR, 1.0)
    s = update(CacState(), Measurement(5.0, THR, 1.0), policy)
    with pytest.raises(ContractViolation):
        update(s, Measurement(4.9, THR, 1.0), policy)
    with pytest.raises(ContractViolation):
        first_admission([0.0, 1.0, 0.5], [0, 0, 0], [0, 0, 0], policy)


def test_policy_validation():
    with pytest.raises(ValueError):
        CacPolicy(THR, -1.0)
    with pytest.raises(ValueError):
        CacPolicy(THR, 1.0, 0.0, 0.0)


def random_trace(rng, n):
    t = np.cumsum(rng.choice([0.1, 0.1, 0.1, 0.2, 0.5], n)) - 0.1
    # random walk crossing the threshold many times
    rsl = THR + np.cumsum(rng.normal(0, 1.0, n))
    esio = rng.normal(3.0, 4.0, n)
    return t, rsl, esio


traces = st.integers(0, 2**32 - 1).map(lambda s: random_trace(np.random.default_rng(s), 150))
T_values = st.sampled_from([0.0, 0.5, 1.0, 2.0, 5.0, 10.0])


@settings(max_examples=200, deadline=None)
@given(traces, T_values, st.floats(-5, 8))
def test_vectorized_and_folded_gate_match_brute_force(tr, T, floor):
    t, rsl, esio = tr
    policy = CacPolicy(THR, T, floor)
    expected = brute_force_admission(t, rsl, esio, THR, T, floor)
    assert first_admission(t, rsl, esio, policy) == expected
    _, m = run_gate(trace(t, rsl, esio), policy)
    assert (m is None and expected is None) or m.time == t[expected]


@settings(max_examples=200, deadline=None)
@given(traces, T_values, T_values)
def test_admission_monotone_in_threshold_time(tr, a, b):
    t, rsl, esio = tr
    lo, hi = sorted((a, b))
    i_hi = first_admission(t, rsl, esio, CacPolicy(THR, hi, -np.inf))
    i_lo = first_admission(t, rsl, esio, CacPolicy(THR, lo, -np.inf))
    if i_hi is not None:
        assert i_lo is not None and t[i_lo] <= t[i_hi]


@settings(max_examples=100, deadline=None)
@given(traces, T_values)
def test_floor_above_trace_max_blocks_admission(tr, T):
    t, rsl, esio = tr
    assert first_admission(t, rsl, esio, CacPolicy(THR, T, float(esio.max()) + 0.1)) is None


@settings(max_examples=100, deadline=None)
@given(traces, T_values)
def test_admitting_run_is_fully_above_threshold(tr, T):
    t, rsl, esio = tr
    i = first_admission(t, rsl, esio, CacPolicy(THR, T, -np.inf))
    if i is None:
        return
    j = i
    while j > 0 and rsl[j - 1] >= THR:
        j -= 1
    assert all(rsl[j:i + 1] >= THR)
    assert t[i] - t[j] >= T - 1e-9


def test_update_is_pure():
    policy = CacPolicy(THR, 2.0, 0.0)
    s = CacState(above_since=1.0, last_time=2.0)
    m = Measurement(3.0, THR + 1, 4.0)
    assert update(s, m, policy) == update(s, m, policy)
    assert s == CacState(above_since=1.0, last_time=2.0)
