"""Shared fixtures: the desk-scale scene, dataset, and maps are expensive to
build, so they are constructed once per session and reused across tests."""

import pytest

from ckmbeam.ckm import build_bim, build_cpm
from ckmbeam.codebook import build_codebook
from ckmbeam.experiment import ExperimentConfig, experiment_dataset, experiment_scene
from ckmbeam.geometry import UpaConfig


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance-criteria PASS lines after the test summary."""
    try:
        from test_acceptance import PASS_LINES
    except ImportError:
        return
    if PASS_LINES:
        terminalreporter.section("acceptance criteria")
        for line in PASS_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def desk_cfg():
    return ExperimentConfig()


@pytest.fixture(scope="session")
def desk_scene(desk_cfg):
    return experiment_scene(desk_cfg)


@pytest.fixture(scope="session")
def desk_dataset(desk_cfg, desk_scene):
    return experiment_dataset(desk_cfg, desk_scene)


@pytest.fixture(scope="session")
def desk_cpm(desk_cfg, desk_dataset):
    return build_cpm(desk_dataset, desk_cfg.knn, desk_cfg.idw_power, desk_cfg.n_paths)


@pytest.fixture(scope="session")
def desk_bims(desk_cfg, desk_scene, desk_dataset):
    rx = UpaConfig(desk_cfg.rx_rows, desk_cfg.rx_cols, orientation=desk_scene.ue_orientation)
    W = build_codebook(desk_cfg.rx_cols, desk_cfg.rx_rows)
    bims = {}
    for my in desk_cfg.tx_cols_sweep:
        tx = UpaConfig(desk_cfg.tx_rows, my, orientation=desk_scene.bs_orientation)
        F = build_codebook(my, desk_cfg.tx_rows)
        bims[my] = build_bim(desk_dataset, tx, rx, F, W, desk_cfg.knn)
    return bims
