"""Holographic search algorithms for phase-only, phase-sensitive Fourier holograms."""

from .field import FieldError, TwiddleTables, as_field, forward_dft, incremental_update, inverse_dft
from .metrics import RegionKind, RegionWeights, diffraction_efficiency, mse, mse_delta_for_pixel_change, ssim
from .modulation import Kind, ModulationScheme, SchemeError, parse_scheme, quantize, quantize_phase
from .search import (
    AnnealSchedule,
    PredictiveAccumulator,
    SearchState,
    ds_step,
    hps_solve_phase,
    hps_step,
    initialize,
    run,
    sa_step,
)
from .target import EnergyNorm, Layout, Target, TargetSpec, build_target, load_image
from .trace import ConvergenceTrace, TraceRecord

__version__ = "0.1.0"
