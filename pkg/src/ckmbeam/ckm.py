"""Channel knowledge maps: CPM (location -> path record) and BIM (location -> beam pair).

CPM answers queries by K-nearest-neighbor inverse-distance-weighted
interpolation of the stored path records, associating paths across
neighbors by amplitude rank. BIM stores the optimal beam-pair label per
sample and answers queries by KNN majority vote.

Interpolation rules (per amplitude rank l, over the neighbors that have an
l-th path, weights renormalized):
  - amplitude: weighted arithmetic mean
  - phase: circular mean of unit phasors; if the mean phasor is shorter
    than 0.1 the phases are deemed incoherent and the nearest contributing
    neighbor's phase is used
  - angles: weighted mean of unit direction vectors on the sphere,
    renormalized; same 0.1-norm fallback to the nearest neighbor
A query within 1e-6 m of a stored sample returns that sample's record
verbatim, so interpolation reproduces its knots exactly.
"""

import cmath
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .channel import Path, PathSet, synthesize_channel
from .codebook import BeamIndex, BeamPair, best_beam_pair
from .geometry import AnglePair, angles_from_direction, direction_from_angles

EXACT_HIT_EPS = 1e-6   # meters
COHERENCE_FLOOR = 0.1  # min norm of a weighted phasor/direction mean

CKM_FORMAT = "ckmbeam-ckm"
CKM_VERSION = 1


class CkmFormatError(ValueError):
    """Raised when a persisted map file cannot be parsed."""


def _canonical_order(locations):
    return sorted(range(len(locations)), key=lambda i: tuple(locations[i]))


@dataclass(frozen=True)
class CpmDatabase:
    samples: tuple   # GroundTruthSample, canonically sorted by location
    K: int
    p: float         # IDW exponent
    L: int
    tree: cKDTree

    def locations(self):
        return np.array([s.location for s in self.samples])


@dataclass(frozen=True)
class BimDatabase:
    locations: np.ndarray  # (n, 3), canonically sorted
    labels: tuple          # BeamPair per location
    K: int
    f_shape: tuple         # (cols, rows) of the tx codebook
    w_shape: tuple
    tree: cKDTree


def build_cpm(dataset, K: int, p: float, L: int) -> CpmDatabase:
    if len(dataset) < K:
        raise ValueError(f"need at least K={K} samples, got {len(dataset)}")
    order = _canonical_order([s.location for s in dataset])
    samples = tuple(dataset[i] for i in order)
    locs = np.array([s.location for s in samples])
    return CpmDatabase(samples, K, p, L, cKDTree(locs))


def _interp_direction(dirs, weights, nearest_angles):
    mean = np.einsum("k,kj->j", weights, dirs)
    n = float(np.linalg.norm(mean))
    if n < COHERENCE_FLOOR:
        return nearest_angles
    return angles_from_direction(mean / n)


def cpm_query(db: CpmDatabase, q) -> PathSet:
    q = np.asarray(q, dtype=float)
    dist, idx = db.tree.query(q, k=db.K)
    dist, idx = np.atleast_1d(dist), np.atleast_1d(idx)
    if dist[0] < EXACT_HIT_EPS:
        return db.samples[idx[0]].pathset

    w = dist ** (-db.p)
    w /= w.sum()
    neighbors = [db.samples[i].pathset for i in idx]

    paths = []
    for l in range(db.L):
        have = [k for k in range(db.K) if len(neighbors[k]) > l]
        if not have:
            continue
        wl = np.array([w[k] for k in have])
        wl /= wl.sum()
        pl = [neighbors[k].paths[l] for k in have]
        nearest = pl[0]  # `have` preserves the distance ordering

        amp = float(np.dot(wl, [p.amplitude for p in pl]))
        phasor = complex(np.dot(wl, [cmath.exp(1j * p.phase) for p in pl]))
        phase = cmath.phase(phasor) if abs(phasor) >= COHERENCE_FLOOR else nearest.phase
        aod = _interp_direction(np.array([direction_from_angles(p.aod) for p in pl]),
                                wl, nearest.aod)
        aoa = _interp_direction(np.array([direction_from_angles(p.aoa) for p in pl]),
                                wl, nearest.aoa)
        paths.append(Path(amp, phase, aod, aoa))
    return PathSet(paths, db.L)


def build_bim(dataset, tx, rx, F, W, K: int) -> BimDatabase:
    """Label every sample with its exhaustive-search optimal beam pair."""
    if len(dataset) < K:
        raise ValueError(f"need at least K={K} samples, got {len(dataset)}")
    order = _canonical_order([s.location for s in dataset])
    locs = np.array([dataset[i].location for i in order])
    labels = tuple(
        best_beam_pair(synthesize_channel(dataset[i].pathset, tx, rx), F, W)[0]
        for i in order
    )
    return BimDatabase(locs, labels, K, (F.cols, F.rows), (W.cols, W.rows),
                       cKDTree(locs))


def bim_query(db: BimDatabase, q) -> BeamPair:
    """Majority vote over the K nearest labels; ties go to the nearest holder.

    A query within EXACT_HIT_EPS of a stored location returns that sample's
    own label directly, so the map reproduces its knots even when farther
    neighbors would outvote them.
    """
    dist, idx = db.tree.query(np.asarray(q, dtype=float), k=db.K)
    dist, idx = np.atleast_1d(dist), np.atleast_1d(idx)
    if dist[0] < EXACT_HIT_EPS:
        return db.labels[idx[0]]
    votes = {}
    for i in idx:
        votes[db.labels[i].key] = votes.get(db.labels[i].key, 0) + 1
    top = max(votes.values())
    for i in idx:  # idx is sorted by distance
        if votes[db.labels[i].key] == top:
            return db.labels[i]
    raise AssertionError("unreachable")


def save_ckm(db, path):
    """Persist a CPM or BIM as self-describing JSON (exact float round-trip)."""
    if isinstance(db, CpmDatabase):
        doc = {
            "format": CKM_FORMAT, "version": CKM_VERSION, "kind": "cpm",
            "K": db.K, "p": db.p, "L": db.L,
            "samples": [
                [list(map(float, s.location)),
                 [[p.amplitude, p.phase, p.aod.zenith, p.aod.azimuth,
                   p.aoa.zenith, p.aoa.azimuth] for p in s.pathset]]
                for s in db.samples
            ],
        }
    elif isinstance(db, BimDatabase):
        doc = {
            "format": CKM_FORMAT, "version": CKM_VERSION, "kind": "bim",
            "K": db.K, "f_shape": list(db.f_shape), "w_shape": list(db.w_shape),
            "samples": [
                [list(map(float, loc)), [lab.tx.m, lab.tx.n, lab.rx.m, lab.rx.n]]
                for loc, lab in zip(db.locations, db.labels)
            ],
        }
    else:
        raise TypeError(f"not a CKM database: {type(db)}")
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_ckm(path):
    from .scene import GroundTruthSample

    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise CkmFormatError(f"cannot parse CKM file {path}: {e}")
    if doc.get("format") != CKM_FORMAT:
        raise CkmFormatError(f"{path}: not a {CKM_FORMAT} file")
    if doc.get("version") != CKM_VERSION:
        raise CkmFormatError(f"{path}: unsupported version {doc.get('version')}")

    try:
        if doc["kind"] == "cpm":
            L = doc["L"]
            samples = [
                GroundTruthSample(
                    np.array(loc),
                    PathSet([Path(a, ps, AnglePair(tzd, pzd), AnglePair(tza, pza))
                             for a, ps, tzd, pzd, tza, pza in recs], L))
                for loc, recs in doc["samples"]
            ]
            return build_cpm(samples, doc["K"], doc["p"], L)
        if doc["kind"] == "bim":
            fc, fr = doc["f_shape"]
            wc, wr = doc["w_shape"]
            locs = np.array([loc for loc, _ in doc["samples"]])
            labels = tuple(
                BeamPair(BeamIndex(tm, tn, tm * fr + tn), BeamIndex(rm, rn, rm * wr + rn))
                for _, (tm, tn, rm, rn) in doc["samples"]
            )
            return BimDatabase(locs, labels, doc["K"], (fc, fr), (wc, wr), cKDTree(locs))
        raise CkmFormatError(f"{path}: unknown CKM kind {doc['kind']!r}")
    except (KeyError, TypeError, ValueError, IndexError) as e:
        if isinstance(e, CkmFormatError):
            raise
        raise CkmFormatError(f"{path}: malformed CKM file ({e})")
