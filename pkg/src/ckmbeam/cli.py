"""Command-line pipeline: scene-gen | dataset-gen | build-cpm | build-bim | evaluate | report.

Each stage reads and writes the declared file formats, so the pipeline is
composable and any stage can be replaced by externally produced files (e.g.
a real ray-tracing export in the dataset format). Relative output paths are
redirected by the CKMBEAM_OUTDIR environment variable when it is set.
"""

import argparse
import dataclasses
import sys

from .ckm import build_bim, build_cpm, save_ckm
from .codebook import build_codebook
from .experiment import (SCHEMES, ExperimentConfig, experiment_scene,
                         load_config, read_results_csv, resolve_output_path,
                         run_experiment, write_report_csv, write_results_csv)
from .geometry import UpaConfig
from .scene import default_desk_scene, generate_dataset, load_dataset, save_dataset


def _add_config_args(p):
    p.add_argument("--config", default="", help="JSON file with ExperimentConfig fields")
    for f in dataclasses.fields(ExperimentConfig):
        flag = "--" + f.name.replace("_", "-")
        if f.name in ("tx_cols_sweep", "schemes"):
            p.add_argument(flag, default=None, help=f"comma-separated {f.name}")
        elif isinstance(f.default, bool):
            p.add_argument(flag, action="store_true", default=None)
        else:
            p.add_argument(flag, default=None, type=type(f.default))


def _config_from_args(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {}
    for f in dataclasses.fields(ExperimentConfig):
        v = getattr(args, f.name, None)
        if v is None:
            continue
        if f.name == "tx_cols_sweep":
            v = tuple(int(x) for x in v.split(","))
        elif f.name == "schemes":
            v = tuple(v.split(","))
        overrides[f.name] = v
    return dataclasses.replace(cfg, **overrides).validate()


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="ckmbeam",
        description="CKM-based training-free beam alignment experiments")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scene-gen", help="write the built-in desk scene to a JSON file")
    p.add_argument("--out", default="scene.json")

    p = sub.add_parser("dataset-gen", help="trace ground-truth paths at random UE locations")
    p.add_argument("--scene", default="", help="scene JSON (default: built-in desk scene)")
    p.add_argument("--n-samples", type=int, default=5000)
    p.add_argument("--n-paths", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="dataset.txt")

    p = sub.add_parser("build-cpm", help="build and persist a channel path map")
    p.add_argument("--dataset", required=True)
    p.add_argument("--knn", type=int, default=3)
    p.add_argument("--idw-power", type=float, default=2.0)
    p.add_argument("--out", default="cpm.json")

    p = sub.add_parser("build-bim", help="build and persist a beam index map")
    p.add_argument("--dataset", required=True)
    p.add_argument("--scene", default="", help="scene JSON for array orientations")
    p.add_argument("--tx-rows", type=int, default=4)
    p.add_argument("--tx-cols", type=int, default=16)
    p.add_argument("--rx-rows", type=int, default=2)
    p.add_argument("--rx-cols", type=int, default=2)
    p.add_argument("--knn", type=int, default=3)
    p.add_argument("--out", default="bim.json")

    p = sub.add_parser("evaluate", help="run the scheme comparison sweep")
    _add_config_args(p)

    p = sub.add_parser("report", help="pivot a results CSV to plot-ready rate-vs-Mt form")
    p.add_argument("--results", required=True)
    p.add_argument("--out", default="report.csv")

    args = ap.parse_args(argv)
    try:
        return _dispatch(args)
    except (ValueError, OSError, RuntimeError) as e:
        print(f"ckmbeam: error: {e}", file=sys.stderr)
        return 1


def _dispatch(args):
    if args.command == "scene-gen":
        out = resolve_output_path(args.out)
        default_desk_scene().save(out)
        print(f"wrote scene to {out}")
    elif args.command == "dataset-gen":
        from .scene import Scene
        scene = Scene.load(args.scene) if args.scene else default_desk_scene()
        samples = generate_dataset(scene, args.n_samples, args.n_paths, args.seed)
        out = resolve_output_path(args.out)
        save_dataset(samples, out, scene, args.seed, args.n_paths)
        print(f"wrote {len(samples)} samples to {out}")
    elif args.command == "build-cpm":
        samples, meta = load_dataset(args.dataset)
        db = build_cpm(samples, args.knn, args.idw_power, int(meta["L"]))
        out = resolve_output_path(args.out)
        save_ckm(db, out)
        print(f"wrote CPM ({len(samples)} samples, K={args.knn}) to {out}")
    elif args.command == "build-bim":
        from .scene import Scene
        scene = Scene.load(args.scene) if args.scene else default_desk_scene()
        samples, _ = load_dataset(args.dataset)
        tx = UpaConfig(args.tx_rows, args.tx_cols, orientation=scene.bs_orientation)
        rx = UpaConfig(args.rx_rows, args.rx_cols, orientation=scene.ue_orientation)
        F = build_codebook(args.tx_cols, args.tx_rows)
        W = build_codebook(args.rx_cols, args.rx_rows)
        db = build_bim(samples, tx, rx, F, W, args.knn)
        out = resolve_output_path(args.out)
        save_ckm(db, out)
        print(f"wrote BIM ({len(samples)} labels, Mt={tx.size}) to {out}")
    elif args.command == "evaluate":
        cfg = _config_from_args(args)
        rows, _ = run_experiment(cfg)
        out = write_results_csv(rows, cfg)
        print(f"wrote {len(rows)} result rows to {out}")
    elif args.command == "report":
        rows = read_results_csv(args.results)
        if not rows:
            raise ValueError(f"no result rows in {args.results}")
        out = write_report_csv(rows, args.out)
        print(f"wrote report to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
