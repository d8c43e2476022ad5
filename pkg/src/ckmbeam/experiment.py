"""Experiment orchestration: sweep the BS array size and compare schemes.

For each transmit array width in the sweep, every enabled scheme is
evaluated at the same set of test locations against the ground-truth
channel, and the per-scheme average effective rate goes into one CSV row.
The CPM is built once (path records are array-independent); the BIM is
rebuilt per array size because its labels depend on the codebook.
"""

import math
import os
from dataclasses import dataclass, replace

import numpy as np

from . import alignment
from .channel import synthesize_channel
from .ckm import build_bim, build_cpm
from .codebook import build_codebook
from .geometry import UpaConfig
from .locerror import LocationErrorModel
from .metrics import LinkBudget, average_rate
from .scene import (Scene, default_desk_scene, generate_dataset, load_dataset,
                    sample_ue_location, trace_paths)

SCHEMES = ("perfect_csi", "training_estimation", "beam_sweeping",
           "location_based", "cpm", "bim")

# Fixed offsets so dataset, test-location, and error substreams never collide.
_TEST_LOC_STREAM = 1_000_003
_LOC_ERROR_STREAM = 2_000_003


@dataclass(frozen=True)
class ExperimentConfig:
    scene_path: str = ""        # empty -> built-in desk scene
    dataset_path: str = ""      # empty -> generate from the scene
    tx_rows: int = 4            # BS Mz, fixed across the sweep
    tx_cols_sweep: tuple = (4, 8, 16, 32, 64)  # BS My values
    rx_rows: int = 2
    rx_cols: int = 2
    block_length: int = 800     # N, scaled with the desk-size arrays
    tx_power: float = 1.0
    noise_power: float = 1e-10
    n_paths: int = 3            # L
    knn: int = 3                # K
    idw_power: float = 2.0
    n_samples: int = 12000
    n_test: int = 200
    loc_error: float = 0.0      # mu, meters
    seed: int = 0
    schemes: tuple = SCHEMES
    output_path: str = "results.csv"
    test_at_knots: bool = False  # use dataset knots as test locations

    def validate(self):
        if not self.schemes:
            raise ValueError("at least one scheme must be selected")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ValueError(f"unknown scheme {s!r}; valid: {', '.join(SCHEMES)}")
        for name in ("tx_rows", "rx_rows", "rx_cols", "block_length",
                     "n_paths", "knn", "n_samples", "n_test"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not self.tx_cols_sweep or any(m < 1 for m in self.tx_cols_sweep):
            raise ValueError("tx_cols_sweep must be non-empty positive counts")
        return self


def load_config(path) -> ExperimentConfig:
    import json

    with open(path) as fh:
        d = json.load(fh)
    cfg = ExperimentConfig()
    unknown = set(d) - set(cfg.__dataclass_fields__)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key in ("tx_cols_sweep", "schemes"):
        if key in d:
            d[key] = tuple(d[key])
    return replace(cfg, **d).validate()


def experiment_scene(cfg: ExperimentConfig) -> Scene:
    return Scene.load(cfg.scene_path) if cfg.scene_path else default_desk_scene()


def experiment_dataset(cfg: ExperimentConfig, scene: Scene):
    if cfg.dataset_path:
        samples, _ = load_dataset(cfg.dataset_path)
        return samples
    return generate_dataset(scene, cfg.n_samples, cfg.n_paths, cfg.seed)


def test_locations(cfg: ExperimentConfig, scene: Scene, dataset):
    """Fresh uniform draws by default; dataset knots when test_at_knots."""
    if cfg.test_at_knots:
        return [s.location for s in dataset[:cfg.n_test]]
    return [sample_ue_location(scene, np.random.default_rng([cfg.seed, _TEST_LOC_STREAM, i]))
            for i in range(cfg.n_test)]


def evaluate_location(scheme, H_true, q_reported, scene, tx, rx, F, W, cpm, bim):
    if scheme == "perfect_csi":
        return alignment.scheme_perfect_csi(H_true, F, W)
    if scheme == "training_estimation":
        return alignment.scheme_training_estimation(H_true, F, W)
    if scheme == "beam_sweeping":
        return alignment.scheme_beam_sweeping(H_true, F, W)
    if scheme == "location_based":
        return alignment.scheme_location_based(H_true, scene.bs_position,
                                               q_reported, tx, rx, F, W)
    if scheme == "cpm":
        return alignment.scheme_cpm(H_true, cpm, q_reported, tx, rx, F, W)
    if scheme == "bim":
        return alignment.scheme_bim(H_true, bim, q_reported, F, W)
    raise ValueError(f"unknown scheme {scheme!r}")


def run_experiment(cfg: ExperimentConfig, scene=None, dataset=None,
                   cpm=None, bims=None):
    """Full sweep; returns (rows, outcomes) where rows are CSV-ready dicts and
    outcomes[(Mt, scheme)] is the per-location SchemeOutcome list.

    scene/dataset/cpm/bims override the config-driven builds; bims maps the
    tx column count to a prebuilt BimDatabase (they are expensive to rebuild
    when sweeping repeatedly over the same dataset)."""
    cfg.validate()
    scene = scene if scene is not None else experiment_scene(cfg)
    dataset = dataset if dataset is not None else experiment_dataset(cfg, scene)
    lb = LinkBudget(cfg.tx_power, cfg.noise_power, cfg.block_length)

    locs = test_locations(cfg, scene, dataset)
    err = LocationErrorModel(cfg.loc_error, seed_for_stream(cfg.seed))
    reported = [err.perturb(q, i) for i, q in enumerate(locs)]
    truth = [trace_paths(scene, q, cfg.n_paths) for q in locs]

    rx = UpaConfig(cfg.rx_rows, cfg.rx_cols, orientation=scene.ue_orientation)
    W = build_codebook(cfg.rx_cols, cfg.rx_rows)
    if cpm is None and "cpm" in cfg.schemes:
        cpm = build_cpm(dataset, cfg.knn, cfg.idw_power, cfg.n_paths)

    rows, outcomes = [], {}
    for my in cfg.tx_cols_sweep:
        tx = UpaConfig(cfg.tx_rows, my, orientation=scene.bs_orientation)
        F = build_codebook(my, cfg.tx_rows)
        if bims is not None and my in bims:
            bim = bims[my]
        else:
            bim = (build_bim(dataset, tx, rx, F, W, cfg.knn)
                   if "bim" in cfg.schemes else None)
        H_true = [synthesize_channel(z, tx, rx) for z in truth]
        for scheme in cfg.schemes:
            outs = [evaluate_location(scheme, H_true[i], reported[i], scene,
                                      tx, rx, F, W, cpm, bim)
                    for i in range(len(locs))]
            outcomes[(tx.size, scheme)] = outs
            rows.append({
                "Mt": tx.size,
                "scheme": scheme,
                "avg_rate_bpshz": average_rate(outs, lb),
                "avg_gain": math.fsum(o.gain for o in outs) / len(outs),
                "avg_overhead_symbols": math.fsum(o.n_used for o in outs) / len(outs),
                "n_locations": len(outs),
                "seed": cfg.seed,
            })
    return rows, outcomes


def seed_for_stream(seed):
    return seed + _LOC_ERROR_STREAM


def resolve_output_path(path):
    """CKMBEAM_OUTDIR, when set, redirects relative output paths."""
    outdir = os.environ.get("CKMBEAM_OUTDIR", "")
    if outdir and not os.path.isabs(path):
        os.makedirs(outdir, exist_ok=True)
        return os.path.join(outdir, path)
    return path


def write_results_csv(rows, cfg: ExperimentConfig, path=None):
    path = resolve_output_path(path or cfg.output_path)
    cols = ["Mt", "scheme", "avg_rate_bpshz", "avg_gain",
            "avg_overhead_symbols", "n_locations", "seed"]
    with open(path, "w") as fh:
        fh.write(f"# ckmbeam-results v1 seed={cfg.seed} N={cfg.block_length} "
                 f"P={cfg.tx_power!r} noise={cfg.noise_power!r} "
                 f"L={cfg.n_paths} K={cfg.knn} p={cfg.idw_power!r} "
                 f"loc_error={cfg.loc_error!r} n_samples={cfg.n_samples}\n")
        fh.write(",".join(cols) + "\n")
        for r in rows:
            fh.write(",".join(repr(r[c]) if isinstance(r[c], float) else str(r[c])
                              for c in cols) + "\n")
    return path


def read_results_csv(path):
    rows = []
    with open(path) as fh:
        header = None
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                continue
            vals = line.split(",")
            r = dict(zip(header, vals))
            r["Mt"] = int(r["Mt"])
            for k in ("avg_rate_bpshz", "avg_gain", "avg_overhead_symbols"):
                r[k] = float(r[k])
            rows.append(r)
    return rows


def write_report_csv(rows, path):
    """Pivot result rows into plot-ready form: one row per Mt, one column per scheme."""
    schemes = sorted({r["scheme"] for r in rows}, key=SCHEMES.index)
    mts = sorted({r["Mt"] for r in rows})
    table = {(r["Mt"], r["scheme"]): r["avg_rate_bpshz"] for r in rows}
    path = resolve_output_path(path)
    with open(path, "w") as fh:
        fh.write("Mt," + ",".join(schemes) + "\n")
        for mt in mts:
            fh.write(str(mt) + "," +
                     ",".join(repr(table.get((mt, s), float("nan"))) for s in schemes)
                     + "\n")
    return path
