"""UE location-error model: horizontal Rayleigh-magnitude perturbation.

The reported location is the true location displaced in the horizontal
plane by a radius drawn from a Rayleigh distribution with scale
sigma = mu * sqrt(2/pi), so the mean displacement is exactly mu, and a
uniform direction. Height is preserved. Each location index gets its own
RNG substream keyed by (seed, index) so evaluation order never matters.
"""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LocationErrorModel:
    mean_error: float  # mu, meters
    seed: int = 0

    def __post_init__(self):
        if self.mean_error < 0:
            raise ValueError("mean location error must be >= 0")

    @property
    def rayleigh_scale(self):
        return self.mean_error * math.sqrt(2.0 / math.pi)

    def perturb(self, q_true, index: int = 0) -> np.ndarray:
        q = np.asarray(q_true, dtype=float).copy()
        if self.mean_error == 0.0:
            return q
        rng = np.random.default_rng([self.seed, index])
        r = rng.rayleigh(self.rayleigh_scale)
        ang = rng.uniform(0.0, 2.0 * math.pi)
        q[0] += r * math.cos(ang)
        q[1] += r * math.sin(ang)
        return q
