"""Effective-rate computation with training-overhead prelog factors."""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class LinkBudget:
    tx_power: float      # P, linear watts
    noise_power: float   # sigma^2, linear watts
    block_length: int    # N, symbols per coherent block

    def __post_init__(self):
        if self.tx_power <= 0 or self.noise_power <= 0 or self.block_length < 1:
            raise ValueError("require P > 0, sigma^2 > 0, N >= 1")

    @property
    def snr_per_unit_gain(self):
        return self.tx_power / self.noise_power


def effective_rate(gain: float, n_used: int, lb: LinkBudget) -> float:
    """Spectral efficiency (bps/Hz) discounted by the training prelog.

    max(0, (N - n_used)/N) * log2(1 + P*gain/sigma^2); the prelog clamps at
    zero when training consumes the whole coherent block.
    """
    if n_used < 0:
        raise ValueError("training symbol count must be >= 0")
    prelog = max(0.0, (lb.block_length - n_used) / lb.block_length)
    return prelog * math.log2(1.0 + lb.snr_per_unit_gain * gain)


def average_rate(outcomes, lb: LinkBudget) -> float:
    """Mean effective rate over scheme outcomes (one per evaluated location).

    Uses exact summation so the result is independent of evaluation order.
    """
    outcomes = list(outcomes)
    if not outcomes:
        raise ValueError("cannot average an empty outcome sequence")
    return math.fsum(effective_rate(o.gain, o.n_used, lb) for o in outcomes) / len(outcomes)
