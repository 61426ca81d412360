"""Counter-based threshold tapes.

Every uniform is a pure function of ``(master seed, trial, node, event,
stream)``, so two strategies simulated on the same tape see the same
thresholds no matter how trials are ordered or split across workers.
Stream 0 holds purchase thresholds, stream 1 the cashback-recipient draws.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)

THRESHOLD_STREAM = 0
CASHBACK_STREAM = 1


@njit(cache=True, inline="always")
def _mix(z):
    # splitmix64 finalizer
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True)
def tape_value(master, trial, node, event, stream):
    h = _mix(np.uint64(master) + _GOLDEN)
    h = _mix(h ^ _mix(np.uint64(trial) + _GOLDEN))
    h = _mix(h ^ _mix(np.uint64(node) + _GOLDEN))
    h = _mix(h ^ _mix(np.uint64(event) + _GOLDEN))
    h = _mix(h ^ _mix(np.uint64(stream) + _GOLDEN))
    return np.float64(h >> _S11) * (1.0 / 9007199254740992.0)


@dataclass(frozen=True)
class ThresholdTape:
    master_seed: int

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**63:
            raise ValueError("master seed must lie in [0, 2**63)")

    def value(self, trial: int, node: int, event: int, stream: int = THRESHOLD_STREAM) -> float:
        return float(tape_value(self.master_seed, trial, node, event, stream))
