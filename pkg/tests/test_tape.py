import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from cascade_pricer.tape import ThresholdTape, tape_value

idx = st.integers(0, 2**31)


@given(st.integers(0, 2**63 - 1), idx, idx, idx, st.integers(0, 1))
def test_pure_function_of_indices(master, trial, node, event, stream):
    a = ThresholdTape(master).value(trial, node, event, stream)
    assert a == ThresholdTape(master).value(trial, node, event, stream)
    assert 0.0 <= a < 1.0


def test_order_independent():
    tape = ThresholdTape(42)
    keys = [(t, v, e) for t in range(5) for v in range(7) for e in range(3)]
    forward = {k: tape.value(*k) for k in keys}
    backward = {k: tape.value(*k) for k in reversed(keys)}
    assert forward == backward


def _sample(master, n, vary):
    out = np.empty(n)
    for i in range(n):
        key = [0, 0, 0, 0]
        key[vary] = i
        out[i] = tape_value(master, key[0], key[1], key[2], key[3])
    return out


@pytest.mark.parametrize("vary", [0, 1, 2, 3])
def test_uniform_along_each_index(vary):
    xs = _sample(7, 20000, vary)
    assert stats.kstest(xs, "uniform").pvalue > 1e-3


def test_neighbouring_streams_uncorrelated():
    n = 20000
    a = np.array([tape_value(3, t, 5, 0, 0) for t in range(n)])
    b = np.array([tape_value(3, t, 6, 0, 0) for t in range(n)])
    c = np.array([tape_value(3, t, 5, 1, 0) for t in range(n)])
    d = np.array([tape_value(3, t, 5, 0, 1) for t in range(n)])
    for other in (b, c, d):
        assert abs(np.corrcoef(a, other)[0, 1]) < 4 / np.sqrt(n)


def test_masters_differ():
    assert ThresholdTape(1).value(0, 0, 0) != ThresholdTape(2).value(0, 0, 0)


@pytest.mark.parametrize("seed", [-1, 2**63])
def test_seed_range(seed):
    with pytest.raises(ValueError):
        ThresholdTape(seed)
