"""Detectors for passive sensing with known channel subspaces."""

import json as _json

from . import _core
from ._core import (
    DETECTORS,
    SubspaceGlrError,
    __version__,
    calibrate_threshold,
    coherence_matrix,
    read_snapshots,
    read_steering,
    sample_cov,
    wilson_interval,
    write_snapshots,
)

__all__ = [
    "DETECTORS",
    "SubspaceGlrError",
    "__version__",
    "calibrate_threshold",
    "coherence_matrix",
    "evaluate",
    "read_snapshots",
    "read_steering",
    "resolve_config",
    "run_null_dist",
    "run_pm_sweep",
    "run_roc",
    "sample_cov",
    "simulate",
    "wilson_interval",
    "write_snapshots",
]


def _text(config):
    if config is None:
        return None
    if isinstance(config, str):
        return config
    return _json.dumps(config)


def evaluate(y_s, y_r, u_s, u_r, detectors=None, config=None):
    """Detector statistics for one record; config may be a dict or JSON text."""
    return _core.evaluate(y_s, y_r, u_s, u_r, detectors, _text(config))


def simulate(config, trial_index=0, h1=True, point=0):
    return _core.simulate(_text(config), trial_index, h1, point)


def resolve_config(config):
    return _json.loads(_core.resolve_config(_text(config)))


def run_roc(config, threads=0):
    return _core.run_roc(_text(config), threads)


def run_pm_sweep(config, threads=0):
    return _core.run_pm_sweep(_text(config), threads)


def run_null_dist(config, threads=0):
    return _core.run_null_dist(_text(config), threads)
