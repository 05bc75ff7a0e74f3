"""Holographic search engines: direct search, simulated annealing and predictive search.

All three share one state and one pixel-selection protocol. A seed spawns four
independent random streams (initial phase, pixel choice, trial value, SA
acceptance), so runs of different algorithms with the same seed initialise
identically and visit the same pixels in the same order. That pairing is what
makes the predictive-search dominance over direct search checkable.

Every update is incremental (O(N) per iteration, N = nx*ny); a full transform
re-synchronises the cached replay field every ``recompute_interval`` applied
changes to bound floating-point drift.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass

import numpy as np

from . import metrics
from .field import TwiddleTables, as_field, forward_dft, inverse_dft
from .metrics import RegionWeights
from .modulation import ModulationScheme, phase_level, quantize, quantize_phase
from .target import Target
from .trace import ConvergenceTrace, TraceRecord

__all__ = [
    "ALGORITHMS",
    "AnnealSchedule",
    "PredictiveAccumulator",
    "SearchState",
    "initialize",
    "ds_step",
    "sa_step",
    "hps_solve_phase",
    "hps_step",
    "run",
]

log = logging.getLogger(__name__)

ALGORITHMS = ("ds", "sa", "hps")
DEFAULT_RECOMPUTE_INTERVAL = 10_000
DEFAULT_T0 = 5.0
_BLOCK = 4096
# |S|/sqrt(N) below this means the pixel's optimal value has (numerically) no preferred phase
_DEGENERATE_TOL = 1e-12


class _Stream:
    """Block-buffered draws from one generator; the sequence depends only on the seed."""

    def __init__(self, rng: np.random.Generator, draw):
        self._rng = rng
        self._draw = draw
        self._buf = None
        self._pos = _BLOCK

    def next(self):
        if self._pos >= _BLOCK:
            self._buf = self._draw(self._rng, _BLOCK).tolist()
            self._pos = 0
        value = self._buf[self._pos]
        self._pos += 1
        return value


@dataclass(frozen=True)
class AnnealSchedule:
    """Exponentially decaying temperature ``t(n) = t_coeff * exp(-t0 * n / N)``."""

    t_coeff: float
    t0: float
    iterations: int

    def __post_init__(self):
        if not self.t_coeff > 0:
            raise ValueError("t_coeff must be positive")
        if not self.t0 > 0:
            raise ValueError("t0 must be positive")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")

    def temperature(self, n: int) -> float:
        if n == 0 or self.iterations == 0:
            return float(self.t_coeff)
        return self.t_coeff * math.exp(-self.t0 * n / self.iterations)

    @staticmethod
    def acceptance_probability(delta_e: float, t: float) -> float:
        """Boltzmann acceptance ``exp(-delta_e / t)``, capped at 1 for improvements."""
        if delta_e <= 0:
            return 1.0
        ratio = delta_e / t
        return 0.0 if ratio > 745.0 else math.exp(-ratio)


@dataclass(frozen=True)
class PredictiveAccumulator:
    """Sums of ``sqrt(E_dag) * sin(C)`` and ``sqrt(E_dag) * cos(C)`` over the replay field."""

    sum_sin: float
    sum_cos: float
    norm: float = 1.0

    @property
    def degenerate(self) -> bool:
        return math.hypot(self.sum_sin, self.sum_cos) * self.norm <= _DEGENERATE_TOL

    @property
    def theta(self) -> float:
        if self.degenerate:
            return 0.0
        return math.atan2(self.sum_sin, self.sum_cos) % (2.0 * math.pi)

    def delta_error(self, theta: float) -> float:
        """Summed error change relative to the zeroed-pixel field, unit-magnitude pixel at ``theta``."""
        return 1.0 - 2.0 * self.norm * (math.cos(theta) * self.sum_cos + math.sin(theta) * self.sum_sin)


class SearchState:
    """Hologram, cached replay field, running error and random streams for one run.

    ``levels`` holds the integer level index of every pixel for discrete
    schemes and is ``None`` for continuous phase.
    """

    def __init__(
        self,
        target: np.ndarray,
        scheme: ModulationScheme,
        hologram: np.ndarray,
        levels: np.ndarray | None,
        seed_seq: np.random.SeedSequence,
        recompute_interval: int = DEFAULT_RECOMPUTE_INTERVAL,
    ):
        self.target = target
        self.scheme = scheme
        self.hologram = hologram
        self.levels = levels
        self.tables = TwiddleTables(target.shape)
        self.recompute_interval = int(recompute_interval)
        if self.recompute_interval < 1:
            raise ValueError("recompute_interval must be >= 1")
        self.states = scheme.states() if scheme.is_discrete else None

        pixel_ss, value_ss, accept_ss = seed_seq.spawn(3)
        n_pixels = target.size
        self._pixels = _Stream(np.random.default_rng(pixel_ss), lambda g, k: g.integers(0, n_pixels, size=k))
        if scheme.is_discrete:
            others = scheme.levels - 1
            self._values = _Stream(np.random.default_rng(value_ss), lambda g, k: g.integers(0, others, size=k))
        else:
            self._values = _Stream(np.random.default_rng(value_ss), lambda g, k: g.random(size=k))
        self._accepts = _Stream(np.random.default_rng(accept_ss), lambda g, k: g.random(size=k))

        self.iteration = 0
        self.accepted = 0
        self.last_pixel: tuple[int, int] | None = None
        self.refreshes = 0
        self._since_refresh = 0
        self.replay = np.empty_like(hologram)
        self.error = 0.0
        self.refresh()

    @property
    def shape(self) -> tuple[int, int]:
        return self.target.shape

    def refresh(self) -> None:
        """Recompute the replay field and error from scratch."""
        self.replay = forward_dft(self.hologram)
        self.error = metrics.mse(self.target, self.replay)
        self._since_refresh = 0

    def next_pixel(self) -> tuple[int, int]:
        self.last_pixel = divmod(self._pixels.next(), self.shape[1])
        return self.last_pixel

    def level(self, x: int, y: int) -> int | None:
        return None if self.levels is None else int(self.levels[x, y])

    def propose(self, x: int, y: int) -> tuple[complex, int | None]:
        """A uniformly random achievable value for ``(x, y)`` different from the current one."""
        if self.levels is None:
            theta = 2.0 * math.pi * self._values.next()
            return complex(math.cos(theta), math.sin(theta)), None
        j = self._values.next()
        current = self.levels[x, y]
        k = j + 1 if j >= current else j
        return complex(self.states[k]), int(k)

    def delta_for(self, x: int, y: int, new_value: complex) -> float:
        return metrics.mse_delta_for_pixel_change(
            self.target, self.replay, x, y, self.hologram[x, y], new_value, self.tables
        )

    def apply(self, x: int, y: int, new_value: complex, new_level: int | None, delta_e: float,
              replay: np.ndarray | None = None) -> None:
        """Commit a pixel change whose error change is ``delta_e``.

        ``replay`` may supply the already-updated replay field; otherwise it is
        updated incrementally here.
        """
        if replay is None:
            d = new_value - self.hologram[x, y]
            ex, ey = self.tables.axes(x, y)
            self.replay += np.outer(ex * (d * self.tables.norm), ey)
        else:
            self.replay = replay
        self.hologram[x, y] = new_value
        if self.levels is not None:
            self.levels[x, y] = new_level
        self.error += delta_e
        self.accepted += 1
        self._since_refresh += 1
        if self._since_refresh >= self.recompute_interval:
            self.refresh()
            self.refreshes += 1

    def accept_draw(self) -> float:
        return self._accepts.next()


def _target_field(target) -> np.ndarray:
    if isinstance(target, Target):
        return target.field
    return as_field(target)


def initialize(
    target,
    scheme: ModulationScheme,
    seed: int,
    recompute_interval: int = DEFAULT_RECOMPUTE_INTERVAL,
) -> SearchState:
    """Random-phase back-projection of the target, quantised onto the device.

    ``target`` is a :class:`~holosearch.target.Target` or a corner-origin
    complex array.
    """
    if not scheme.is_phase:
        raise ValueError(f"search engines support phase schemes only, got {scheme.kind.value}")
    field = _target_field(target)
    init_ss, run_ss = np.random.SeedSequence(int(seed)).spawn(2)
    phases = np.random.default_rng(init_ss).uniform(0.0, 2.0 * np.pi, size=field.shape)
    back = inverse_dft(np.abs(field) * np.exp(1j * phases))
    if scheme.is_discrete:
        levels = np.asarray(phase_level(np.angle(back), scheme.levels), dtype=np.int64)
        hologram = scheme.states()[levels]
    else:
        levels = None
        hologram = np.asarray(quantize(back, scheme), dtype=np.complex128)
    return SearchState(field, scheme, hologram, levels, run_ss, recompute_interval)


def ds_step(state: SearchState) -> SearchState:
    """One direct-search trial: random pixel, random different value, keep iff error does not grow."""
    state.iteration += 1
    x, y = state.next_pixel()
    new_value, new_level = state.propose(x, y)
    delta = state.delta_for(x, y, new_value)
    if delta <= 0.0:
        state.apply(x, y, new_value, new_level, delta)
    return state


def sa_step(state: SearchState, schedule: AnnealSchedule) -> SearchState:
    """One annealing trial: like :func:`ds_step` but worse values pass with Boltzmann probability."""
    state.iteration += 1
    x, y = state.next_pixel()
    new_value, new_level = state.propose(x, y)
    delta = state.delta_for(x, y, new_value)
    if delta <= 0.0:
        state.apply(x, y, new_value, new_level, delta)
    else:
        t = schedule.temperature(state.iteration)
        if state.accept_draw() < AnnealSchedule.acceptance_probability(delta, t):
            state.apply(x, y, new_value, new_level, delta)
    return state


def _solve(state: SearchState, x: int, y: int):
    tables = state.tables
    tables.check_index(x, y)
    ex, ey = tables.axes(x, y)
    h = state.hologram[x, y]
    # zeroed-pixel replay field
    zeroed = state.replay - np.outer(ex * (h * tables.norm), ey)
    residual = state.target - zeroed
    # sqrt(E_dag) * exp(iC) = |T - R_dag| * exp(i*angle(T - R_dag)) * exp(+2*pi*i*(ux/nx + vy/ny))
    #                       = (T - R_dag) * conj(kernel), so both sums come from one reduction
    s = complex(ex.conj() @ residual @ ey.conj())
    acc = PredictiveAccumulator(sum_sin=s.imag, sum_cos=s.real, norm=tables.norm)
    return acc.theta, acc, zeroed, ex, ey


def hps_solve_phase(state: SearchState, x: int, y: int) -> tuple[float, PredictiveAccumulator]:
    """Optimal unconstrained phase for pixel ``(x, y)`` given all other pixels.

    Returns ``theta`` in ``[0, 2*pi)`` from ``atan2(sum_sin, sum_cos)`` and the
    accumulator. ``theta`` is 0 when the accumulator is degenerate.
    """
    theta, acc, *_ = _solve(state, x, y)
    return theta, acc


def hps_step(state: SearchState) -> SearchState:
    """One predictive-search iteration.

    The selected pixel is set to the achievable phase nearest the analytic
    optimum. The change is kept only if the error does not grow, which can
    only fail through rounding.
    """
    state.iteration += 1
    x, y = state.next_pixel()
    theta, acc, zeroed, ex, ey = _solve(state, x, y)
    scheme = state.scheme
    if scheme.is_discrete:
        k = phase_level(theta, scheme.levels)
        if k == state.levels[x, y]:
            return state
        new_value = complex(state.states[k])
    else:
        k = None
        new_value = quantize_phase(theta, scheme)
    old = state.hologram[x, y]
    d = new_value - old
    n = state.target.size
    # residual sum before zeroing: S0 = S_dag - h * sqrt(N)
    s0 = complex(acc.sum_cos, acc.sum_sin) - old / state.tables.norm
    delta = ((d.real**2 + d.imag**2) - 2.0 * (d.conjugate() * s0).real * state.tables.norm) / n
    if delta <= 0.0:
        zeroed += np.outer(ex * (new_value * state.tables.norm), ey)
        state.apply(x, y, new_value, k, delta, replay=zeroed)
    return state


def _record(state: SearchState, target, region: RegionWeights, start_ns: int | None) -> TraceRecord:
    ssim_value = None
    if isinstance(target, Target):
        ref = target.amplitude_image
        if min(ref.shape) >= metrics.SSIM_WINDOW:
            ssim_value = metrics.ssim(target.roi_amplitude(state.replay), ref, dynamic_range=1.0)
    return TraceRecord(
        iteration=state.iteration,
        mse=float(state.error),
        efficiency=metrics.diffraction_efficiency(state.replay, region),
        ssim=ssim_value,
        elapsed_ns=None if start_ns is None else time.perf_counter_ns() - start_ns,
        accepted=state.accepted,
    )


def run(
    algorithm: str,
    target,
    scheme: ModulationScheme,
    iterations: int,
    seed: int,
    checkpoint_interval: int = 1000,
    *,
    t_coeff: float | None = None,
    t0: float = DEFAULT_T0,
    recompute_interval: int = DEFAULT_RECOMPUTE_INTERVAL,
    record_timing: bool = False,
    log_every: int | None = None,
) -> tuple[SearchState, ConvergenceTrace]:
    """Run ``iterations`` steps of ``algorithm`` and record a checkpointed trace.

    Checkpoints are taken at iteration 0, every ``checkpoint_interval``
    iterations, and at the final iteration. For ``"sa"`` a missing ``t_coeff``
    defaults to 1/100 of the initial error.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    if checkpoint_interval < 1:
        raise ValueError("checkpoint_interval must be >= 1")

    start_ns = time.perf_counter_ns() if record_timing else None
    state = initialize(target, scheme, seed, recompute_interval)
    region = target.region if isinstance(target, Target) else RegionWeights.full_field(state.shape)

    schedule = None
    if algorithm == "sa":
        schedule = AnnealSchedule(
            t_coeff=state.error / 100.0 if t_coeff is None else t_coeff,
            t0=t0,
            iterations=iterations,
        )

    trace = ConvergenceTrace()
    trace.append(_record(state, target, region, start_ns))
    for n in range(1, iterations + 1):
        if algorithm == "ds":
            ds_step(state)
        elif algorithm == "hps":
            hps_step(state)
        else:
            sa_step(state, schedule)
        if n % checkpoint_interval == 0 or n == iterations:
            trace.append(_record(state, target, region, start_ns))
        if log_every and n % log_every == 0:
            log.info("%s iteration %d/%d mse %.6g", algorithm, n, iterations, state.error)
    return state, trace
