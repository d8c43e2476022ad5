"""Per-location multipath records and geometric channel synthesis.

A channel is a finite sum of rank-1 terms,
    H = sqrt(Mr*Mt) * sum_l alpha_l * a_r(AoA_l) a_t(AoD_l)^H,
with constant-modulus unit-norm steering vectors on both sides. Complex path
gains are stored as magnitude + phase because map interpolation treats the
two differently.
"""

import math
from dataclasses import dataclass

import numpy as np

from .geometry import AnglePair, UpaConfig, steering_vector


@dataclass(frozen=True)
class Path:
    """One propagation path: linear amplitude, phase, and departure/arrival
    angles expressed in the respective local array frames."""

    amplitude: float
    phase: float
    aod: AnglePair
    aoa: AnglePair

    def __post_init__(self):
        if not (self.amplitude >= 0.0 and math.isfinite(self.amplitude)):
            raise ValueError("path amplitude must be finite and >= 0")

    @property
    def gain(self) -> complex:
        return self.amplitude * complex(math.cos(self.phase), math.sin(self.phase))


@dataclass(frozen=True)
class PathSet:
    """Up to max_paths strongest paths, sorted descending by amplitude.

    Zero-amplitude paths are dropped at construction (degenerate rank-0
    terms add noise to rank checks).
    """

    paths: tuple
    max_paths: int

    def __init__(self, paths, max_paths):
        kept = sorted((p for p in paths if p.amplitude > 0.0),
                      key=lambda p: -p.amplitude)[:max_paths]
        object.__setattr__(self, "paths", tuple(kept))
        object.__setattr__(self, "max_paths", int(max_paths))

    def __len__(self):
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)


def synthesize_channel(z: PathSet, tx: UpaConfig, rx: UpaConfig) -> np.ndarray:
    """Dense Mr x Mt channel matrix from a path record (empty -> zeros)."""
    H = np.zeros((rx.size, tx.size), dtype=complex)
    scale = math.sqrt(rx.size * tx.size)
    for p in z:
        ar = steering_vector(rx, p.aoa)
        at = steering_vector(tx, p.aod)
        H += (scale * p.gain) * np.outer(ar, at.conj())
    return H


def beamformed_gain(H: np.ndarray, w: np.ndarray, f: np.ndarray) -> float:
    """|w^H H f|^2 for a receive combiner w and transmit beam f."""
    if H.shape != (len(w), len(f)):
        raise ValueError(f"shape mismatch: H {H.shape}, w {len(w)}, f {len(f)}")
    return float(abs(np.vdot(w, H @ f)) ** 2)


def rank_upper_bound_check(H: np.ndarray, L: int, rel_tol: float = 1e-9) -> bool:
    """True iff the numerical rank of H is at most L."""
    s = np.linalg.svd(H, compute_uv=False)
    if L >= len(s) or s[0] == 0.0:
        return True
    return s[L] <= rel_tol * s[0]
