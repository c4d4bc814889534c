"""Ground-truth trajectory reconstruction and evaluation toolkit."""

from ._gtruth import (
    ConfigError,
    DataError,
    DegeneracyError,
    Error,
    __version__,
    calibrate,
    compare,
    enu_to_geodetic,
    estimate_rigid_transform,
    evaluate,
    geodetic_to_enu,
    inter_distance_errors,
    inter_experiment_errors,
    nn_match,
    quantile,
    reconstruct,
    reconstruct_pose,
    rts_to_cartesian,
    summarize,
    synth,
)

__all__ = [
    "ConfigError",
    "DataError",
    "DegeneracyError",
    "Error",
    "__version__",
    "calibrate",
    "compare",
    "enu_to_geodetic",
    "estimate_rigid_transform",
    "evaluate",
    "geodetic_to_enu",
    "inter_distance_errors",
    "inter_experiment_errors",
    "nn_match",
    "quantile",
    "reconstruct",
    "reconstruct_pose",
    "rts_to_cartesian",
    "summarize",
    "synth",
]
