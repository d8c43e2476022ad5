"""Synthetic site geometry and a deterministic image-method ray tracer.

The scene is a BS above a rectangular UE sampling region populated with
axis-aligned box reflectors ("buildings"). Ground-truth multipath records
contain the unblocked line-of-sight path plus one specular single-bounce
path per visible box face, found by mirroring the BS across the face plane.
Free-space amplitude is lambda/(4*pi*d) (amplitude, not power); reflections
are additionally scaled by a constant complex coefficient gamma.
"""

import cmath
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import Path, PathSet
from .geometry import angles_from_direction, rotation_about_z

# Open-segment trim for blockage tests, as a fraction of segment length.
# Keeps a reflection point sitting exactly on its own face from registering
# as self-blockage.
_SEG_EPS = 1e-9


@dataclass(frozen=True)
class Box:
    """Axis-aligned box reflector."""

    lo: np.ndarray
    hi: np.ndarray

    def __init__(self, lo, hi):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if not np.all(hi > lo):
            raise ValueError("box corners must satisfy hi > lo componentwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def contains(self, p) -> bool:
        p = np.asarray(p, dtype=float)
        return bool(np.all(p >= self.lo) and np.all(p <= self.hi))


@dataclass(frozen=True)
class Scene:
    """Immutable site description; the ground-truth generator for path records."""

    bs_position: np.ndarray
    wavelength: float
    boxes: tuple
    gamma: complex = -0.5  # uniform specular reflection coefficient
    region_x: tuple = (-100.0, 100.0)
    region_y: tuple = (-100.0, 100.0)
    ue_height: float = 1.5
    bs_orientation: np.ndarray = field(default_factory=lambda: np.eye(3))
    ue_orientation: np.ndarray = field(default_factory=lambda: rotation_about_z(math.pi))

    def __post_init__(self):
        object.__setattr__(self, "bs_position", np.asarray(self.bs_position, dtype=float))
        object.__setattr__(self, "boxes", tuple(self.boxes))
        object.__setattr__(self, "bs_orientation", np.asarray(self.bs_orientation, dtype=float))
        object.__setattr__(self, "ue_orientation", np.asarray(self.ue_orientation, dtype=float))
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")
        if abs(self.gamma) > 1.0:
            raise ValueError("|gamma| must be <= 1")
        for b in self.boxes:
            if b.contains(self.bs_position):
                raise ValueError("BS position lies inside a reflector box")

    def to_dict(self):
        return {
            "bs_position": list(self.bs_position),
            "wavelength": self.wavelength,
            "gamma": [self.gamma.real, self.gamma.imag],
            "region_x": list(self.region_x),
            "region_y": list(self.region_y),
            "ue_height": self.ue_height,
            "boxes": [[list(b.lo), list(b.hi)] for b in self.boxes],
            "bs_orientation": [list(r) for r in self.bs_orientation],
            "ue_orientation": [list(r) for r in self.ue_orientation],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            bs_position=d["bs_position"],
            wavelength=d["wavelength"],
            boxes=tuple(Box(lo, hi) for lo, hi in d["boxes"]),
            gamma=complex(d["gamma"][0], d["gamma"][1]),
            region_x=tuple(d["region_x"]),
            region_y=tuple(d["region_y"]),
            ue_height=d["ue_height"],
            bs_orientation=np.array(d["bs_orientation"]),
            ue_orientation=np.array(d["ue_orientation"]),
        )

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class GroundTruthSample:
    location: np.ndarray
    pathset: PathSet


def _segment_hits_box(a, b, box, t_lo, t_hi):
    """Slab test: does segment a + t*(b-a), t in (t_lo, t_hi), enter the box?"""
    d = b - a
    for ax in range(3):
        if d[ax] == 0.0:
            if a[ax] < box.lo[ax] or a[ax] > box.hi[ax]:
                return False
        else:
            inv = 1.0 / d[ax]
            t0 = (box.lo[ax] - a[ax]) * inv
            t1 = (box.hi[ax] - a[ax]) * inv
            if t0 > t1:
                t0, t1 = t1, t0
            t_lo = max(t_lo, t0)
            t_hi = min(t_hi, t1)
            if t_lo > t_hi:
                return False
    return True


def los_blocked(s: Scene, a, b) -> bool:
    """True iff the open segment (a, b) passes through any reflector box."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return any(_segment_hits_box(a, b, box, _SEG_EPS, 1.0 - _SEG_EPS) for box in s.boxes)


def _wrap_phase(psi):
    """Wrap a phase into (-pi, pi]."""
    return -math.remainder(-psi, 2.0 * math.pi)


def _make_path(s: Scene, amp, psi, depart_world, arrive_world):
    aod = angles_from_direction(s.bs_orientation.T @ depart_world)
    aoa = angles_from_direction(s.ue_orientation.T @ arrive_world)
    return Path(amp, _wrap_phase(psi), aod, aoa)


def trace_paths(s: Scene, ue, L: int) -> PathSet:
    """Up to L strongest paths (LoS + single-bounce speculars) at a UE location."""
    ue = np.asarray(ue, dtype=float)
    for box in s.boxes:
        if box.contains(ue):
            raise ValueError("UE location lies inside a reflector box")
    bs = s.bs_position
    paths = []

    # Line of sight
    if not los_blocked(s, bs, ue):
        d = float(np.linalg.norm(ue - bs))
        u = (ue - bs) / d
        amp = s.wavelength / (4.0 * math.pi * d)
        paths.append(_make_path(s, amp, -2.0 * math.pi * d / s.wavelength, u, -u))

    # One specular single-bounce path per visible box face (image method)
    gamma_abs, gamma_arg = abs(s.gamma), cmath.phase(s.gamma)
    for bi, box in enumerate(s.boxes):
        for ax in range(3):
            for side, plane in ((-1.0, box.lo[ax]), (1.0, box.hi[ax])):
                # both endpoints strictly on the outer side of the face plane
                if side * (bs[ax] - plane) <= 0.0 or side * (ue[ax] - plane) <= 0.0:
                    continue
                img = bs.copy()
                img[ax] = 2.0 * plane - bs[ax]
                t = (plane - img[ax]) / (ue[ax] - img[ax])
                refl = img + t * (ue - img)
                in_face = all(box.lo[o] <= refl[o] <= box.hi[o]
                              for o in range(3) if o != ax)
                if not in_face:
                    continue
                if los_blocked(s, bs, refl) or los_blocked(s, refl, ue):
                    continue
                d_total = float(np.linalg.norm(img - ue))
                amp = gamma_abs * s.wavelength / (4.0 * math.pi * d_total)
                depart = refl - bs
                depart /= np.linalg.norm(depart)
                arrive = refl - ue
                arrive /= np.linalg.norm(arrive)
                psi = -2.0 * math.pi * d_total / s.wavelength + gamma_arg
                paths.append(_make_path(s, amp, psi, depart, arrive))

    return PathSet(paths, L)


def sample_ue_location(s: Scene, rng, max_attempts: int = 1000) -> np.ndarray:
    """Uniform draw over the sampling region, resampling out of boxes."""
    for _ in range(max_attempts):
        q = np.array([rng.uniform(*s.region_x), rng.uniform(*s.region_y), s.ue_height])
        if not any(b.contains(q) for b in s.boxes):
            return q
    raise RuntimeError("sampling region appears fully occupied by reflector boxes")


def generate_dataset(s: Scene, count: int, L: int, seed: int):
    """count location-tagged ground-truth samples; deterministic given seed.

    Each location uses an independent RNG substream keyed by (seed, index),
    so generation order can never affect the output.
    """
    if count < 1:
        raise ValueError("dataset size must be >= 1")
    samples = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        q = sample_ue_location(s, rng)
        samples.append(GroundTruthSample(q, trace_paths(s, q, L)))
    return samples


DATASET_MAGIC = "ckmbeam-dataset-v1"


def save_dataset(samples, path, s: Scene, seed: int, L: int):
    """Line-delimited text export: header, then one record per sample.

    Record layout: x y z n_paths then (amp phase thAoD phAoD thAoA phAoA)
    per path, full double precision. Externally produced ray-tracing exports
    in the same format are accepted by load_dataset.
    """
    with open(path, "w") as fh:
        fh.write(f"# {DATASET_MAGIC} lambda={s.wavelength!r} "
                 f"gamma={s.gamma.real!r},{s.gamma.imag!r} "
                 f"scene_hash={s.digest()} seed={seed} L={L}\n")
        for smp in samples:
            fields = [repr(float(v)) for v in smp.location] + [str(len(smp.pathset))]
            for p in smp.pathset:
                fields += [repr(p.amplitude), repr(p.phase),
                           repr(p.aod.zenith), repr(p.aod.azimuth),
                           repr(p.aoa.zenith), repr(p.aoa.azimuth)]
            fh.write(" ".join(fields) + "\n")


def load_dataset(path):
    """Parse a dataset file; returns (samples, header_metadata)."""
    from .geometry import AnglePair

    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith(f"# {DATASET_MAGIC}"):
            raise ValueError(f"not a {DATASET_MAGIC} file: {path}")
        meta = dict(kv.split("=", 1) for kv in header.split()[2:])
        L = int(meta["L"])
        samples = []
        for line_no, line in enumerate(fh, start=2):
            tok = line.split()
            if not tok:
                continue
            try:
                loc = np.array([float(v) for v in tok[:3]])
                n = int(tok[3])
                vals = [float(v) for v in tok[4:4 + 6 * n]]
                if len(vals) != 6 * n:
                    raise ValueError("truncated record")
            except (ValueError, IndexError) as e:
                raise ValueError(f"{path}:{line_no}: malformed dataset record ({e})")
            paths = [Path(vals[6 * i], vals[6 * i + 1],
                          AnglePair(vals[6 * i + 2], vals[6 * i + 3]),
                          AnglePair(vals[6 * i + 4], vals[6 * i + 5]))
                     for i in range(n)]
            samples.append(GroundTruthSample(loc, PathSet(paths, L)))
    return samples, meta


def default_desk_scene() -> Scene:
    """Six-reflector 200 m x 200 m scene used by the desk-scale experiments.

    Four tall buildings cast LoS shadows over a substantial fraction of the
    region; two thin perimeter walls reflect coverage back into the shadows,
    so blocked locations keep an environment-dependent NLoS channel that a
    purely geometric (location-based) scheme cannot find.
    """
    boxes = (
        Box([-80.0, 20.0, 0.0], [-55.0, 60.0, 40.0]),
        Box([-45.0, -70.0, 0.0], [-10.0, -30.0, 35.0]),
        Box([10.0, 30.0, 0.0], [50.0, 70.0, 45.0]),
        Box([35.0, -60.0, 0.0], [75.0, -15.0, 38.0]),
        Box([92.0, -95.0, 0.0], [95.0, 95.0, 32.0]),   # east wall
        Box([-95.0, 92.0, 0.0], [95.0, 95.0, 32.0]),   # north wall
    )
    return Scene(bs_position=np.array([0.0, 0.0, 25.0]), wavelength=0.005,
                 boxes=boxes, gamma=-0.8)
