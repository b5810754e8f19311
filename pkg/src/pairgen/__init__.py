"""Volume and surface spontaneous parametric down-conversion in bulk crystals
and 1D layered structures, with the usual photon-pair observables."""

__version__ = "0.1.0"

from .amplitudes import AmplitudeGrid, AmplitudeLine, GaussianFilter, KernelPair  # noqa: E402
from .bulk import BulkConfig, PumpSpec, bulk_kernel_pair  # noqa: E402
from .layered import Layer, LayerStack, layered_kernel_pair  # noqa: E402
from .materials import CONSTANTS, load_material_db, refractive_index  # noqa: E402

__all__ = [
    "AmplitudeGrid",
    "AmplitudeLine",
    "GaussianFilter",
    "KernelPair",
    "BulkConfig",
    "PumpSpec",
    "bulk_kernel_pair",
    "Layer",
    "LayerStack",
    "layered_kernel_pair",
    "CONSTANTS",
    "load_material_db",
    "refractive_index",
]
