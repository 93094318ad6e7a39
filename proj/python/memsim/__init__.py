"""Python bindings for the memsim MEMS-LiDAR simulator."""

from ._core import (
    DataError,
    ValidationError,
    average_precision,
    denormalize,
    intrinsics_from_fov,
    iou3d,
    normalize,
    rounded_share,
    run_cli,
    scan_directions,
    simulate_frame,
)

__all__ = [
    "DataError",
    "ValidationError",
    "average_precision",
    "denormalize",
    "intrinsics_from_fov",
    "iou3d",
    "normalize",
    "rounded_share",
    "run_cli",
    "scan_directions",
    "simulate_frame",
]
__version__ = "0.1.0"
