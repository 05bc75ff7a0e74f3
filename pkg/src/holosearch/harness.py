"""Run configuration, artifact output and paired comparisons."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .modulation import ModulationScheme, SchemeError, parse_scheme
from .search import ALGORITHMS, DEFAULT_RECOMPUTE_INTERVAL, DEFAULT_T0, SearchState, run
from .target import (
    EnergyNorm,
    Layout,
    Target,
    TargetError,
    TargetSpec,
    build_target,
    load_image,
    save_gray16,
    test_pattern,
)
from .trace import ConvergenceTrace

__all__ = [
    "ConfigError",
    "RunConfig",
    "RunResult",
    "load_target",
    "execute",
    "write_artifacts",
    "cli_run",
    "compare",
    "cli_compare",
    "comparison_table",
]

log = logging.getLogger(__name__)

PHASE_MAP_SCALE = 65536


class ConfigError(ValueError):
    """Invalid run configuration (CLI exit status 1)."""


def _parse_size(value) -> tuple[int, int]:
    if isinstance(value, str):
        parts = value.lower().replace(",", "x").split("x")
        try:
            dims = tuple(int(p) for p in parts if p)
        except ValueError:
            raise ConfigError(f"invalid field size {value!r}") from None
    elif isinstance(value, int):
        dims = (value,)
    else:
        dims = tuple(int(v) for v in value)
    if len(dims) == 1:
        dims = dims * 2
    if len(dims) != 2 or min(dims) < 1:
        raise ConfigError(f"invalid field size {value!r}")
    return dims


@dataclass
class RunConfig:
    algorithm: str = "hps"
    scheme: str = "phase:256"
    iterations: int = 10_000
    seed: int = 0
    checkpoint_interval: int = 1000
    t_coeff: float | None = None
    t0: float = DEFAULT_T0
    amplitude_image: str | None = None
    phase_image: str | None = None
    field_size: tuple[int, int] = (64, 64)
    layout: str = Layout.CENTRAL_QUADRANT.value
    energy_norm: str = EnergyNorm.PARSEVAL_MATCHED.value
    out: str = "out"
    record_timing: bool = False
    recompute_interval: int = DEFAULT_RECOMPUTE_INTERVAL

    def validate(self) -> "RunConfig":
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        try:
            scheme = parse_scheme(self.scheme)
        except SchemeError as exc:
            raise ConfigError(str(exc)) from None
        if not scheme.is_phase:
            raise ConfigError(f"search needs a phase scheme, got {self.scheme!r}")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.checkpoint_interval < 1:
            raise ConfigError("checkpoint interval must be >= 1")
        if self.recompute_interval < 1:
            raise ConfigError("recompute interval must be >= 1")
        if self.algorithm == "sa":
            if self.t_coeff is not None and not self.t_coeff > 0:
                raise ConfigError("--t-coeff must be positive")
            if not self.t0 > 0:
                raise ConfigError("--t0 must be positive")
        self.field_size = _parse_size(self.field_size)
        try:
            Layout(self.layout)
            EnergyNorm(self.energy_norm)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return self

    @property
    def modulation(self) -> ModulationScheme:
        return parse_scheme(self.scheme)

    def target_key(self) -> tuple:
        return (self.amplitude_image, self.phase_image, tuple(_parse_size(self.field_size)), self.layout, self.energy_norm)


@dataclass
class RunResult:
    config: RunConfig
    target: Target
    state: SearchState
    trace: ConvergenceTrace
    wall_time_s: float

    def summary(self) -> dict:
        last = self.trace.last
        steps = self.config.iterations
        return {
            "algorithm": self.config.algorithm,
            "scheme": self.config.scheme,
            "seed": self.config.seed,
            "iterations": steps,
            "field_size": list(self.target.shape),
            "final_mse": last.mse,
            "final_efficiency": last.efficiency,
            "final_ssim": last.ssim,
            "accepted": last.accepted,
            "full_recomputes": self.state.refreshes,
            "wall_time_s": self.wall_time_s,
            "iterations_per_sec": steps / self.wall_time_s if self.wall_time_s > 0 else None,
        }


def load_target(config: RunConfig) -> Target:
    """Build the target for ``config``; synthetic test patterns stand in for missing images."""
    shape = _parse_size(config.field_size)
    layout = Layout(config.layout)
    image_shape = (shape[0] // 2, shape[1] // 2) if layout is Layout.CENTRAL_QUADRANT else shape
    try:
        if config.amplitude_image is None:
            amp = test_pattern(image_shape, "amplitude")
            phase = test_pattern(image_shape, "phase") if config.phase_image is None else load_image(config.phase_image)
        else:
            amp = load_image(config.amplitude_image)
            phase = None if config.phase_image is None else load_image(config.phase_image)
        return build_target(TargetSpec(amp, shape, phase, layout, EnergyNorm(config.energy_norm)))
    except (FileNotFoundError, TargetError) as exc:
        raise ConfigError(str(exc)) from None


def execute(config: RunConfig, target: Target | None = None) -> RunResult:
    config.validate()
    if target is None:
        target = load_target(config)
    start = time.perf_counter()
    state, trace = run(
        config.algorithm,
        target,
        config.modulation,
        config.iterations,
        config.seed,
        config.checkpoint_interval,
        t_coeff=config.t_coeff,
        t0=config.t0,
        recompute_interval=config.recompute_interval,
        record_timing=config.record_timing,
        log_every=max(config.iterations // 10, 1),
    )
    return RunResult(config, target, state, trace, time.perf_counter() - start)


def _phase_map(hologram: np.ndarray) -> np.ndarray:
    turns = np.mod(np.angle(hologram) / (2 * np.pi), 1.0)
    return (np.round(turns * PHASE_MAP_SCALE).astype(np.int64) % PHASE_MAP_SCALE).astype(np.uint16)


def write_artifacts(result: RunResult, out_dir) -> dict[str, Path]:
    """Write trace CSV, phase map, reconstruction and summary into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "trace": out / "trace.csv",
        "phase_map": out / "hologram_phase.png",
        "phase_meta": out / "hologram_phase.json",
        "reconstruction": out / "reconstruction.png",
        "summary": out / "summary.json",
    }
    result.trace.write_csv(paths["trace"])
    Image.fromarray(_phase_map(result.state.hologram)).save(paths["phase_map"], format="PNG")
    meta = {
        "scheme": result.config.scheme,
        "shape": list(result.state.hologram.shape),
        "encoding": f"phase_radians = 2*pi*value/{PHASE_MAP_SCALE}",
    }
    paths["phase_meta"].write_text(json.dumps(meta, indent=2) + "\n")
    save_gray16(paths["reconstruction"], result.target.roi_amplitude(result.state.replay))
    summary = result.summary()
    summary["config"] = _config_dict(result.config)
    paths["summary"].write_text(json.dumps(summary, indent=2) + "\n")
    return paths


def _config_dict(config: RunConfig) -> dict:
    d = asdict(config)
    d["field_size"] = list(_parse_size(config.field_size))
    d["out"] = str(config.out)
    return d


def cli_run(config: RunConfig) -> RunResult:
    result = execute(config)
    write_artifacts(result, config.out)
    return result


def _labels(configs: list[RunConfig]) -> list[str]:
    labels, seen = [], {}
    for c in configs:
        seen[c.algorithm] = seen.get(c.algorithm, 0) + 1
        labels.append(c.algorithm if seen[c.algorithm] == 1 else f"{c.algorithm}_{seen[c.algorithm]}")
    return labels


def _paired(configs: list[RunConfig]) -> bool:
    first = configs[0]
    return all(
        (c.seed, c.scheme, c.iterations, c.checkpoint_interval) == (first.seed, first.scheme, first.iterations, first.checkpoint_interval)
        for c in configs
    )


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("HOLO_THREADS", "1")))
    except ValueError:
        raise ConfigError("HOLO_THREADS must be an integer") from None


def compare(configs: list[RunConfig]) -> tuple[list[str], list[RunResult]]:
    """Run several configurations against one shared target."""
    if len(configs) < 2:
        raise ConfigError("compare needs at least two runs")
    for c in configs:
        c.validate()
    if len({c.target_key() for c in configs}) != 1:
        raise ConfigError("compared runs must share the same target")
    target = load_target(configs[0])
    workers = min(_threads(), len(configs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda c: execute(c, target), configs))
    else:
        results = [execute(c, target) for c in configs]
    return _labels(configs), results


def _ratio(value: float, base: float) -> float:
    if base == 0.0:
        return 1.0 if value == 0.0 else math.inf
    return value / base


def comparison_table(labels: list[str], traces: list[ConvergenceTrace], paired: bool = True) -> str:
    """Merged CSV keyed by iteration; ratios and dominance are relative to the first run.

    Columns: ``iteration``, ``<label>_mse`` per run, then ``<label>_ratio`` and
    (for paired runs) ``<label>_dominant`` for every run after the first.
    ``dominant`` is ``true`` when that run's error is no larger than the
    first run's at that iteration.
    """
    by_iter = [{r.iteration: r.mse for r in t} for t in traces]
    iterations = sorted(set().union(*by_iter))
    header = ["iteration"] + [f"{lab}_mse" for lab in labels]
    for lab in labels[1:]:
        header.append(f"{lab}_ratio")
        if paired:
            header.append(f"{lab}_dominant")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for it in iterations:
        vals = [m.get(it) for m in by_iter]
        row = [str(it)] + ["" if v is None else repr(float(v)) for v in vals]
        base = vals[0]
        for v in vals[1:]:
            if v is None or base is None:
                row.append("")
                if paired:
                    row.append("")
                continue
            row.append(repr(_ratio(v, base)))
            if paired:
                row.append("true" if v <= base else "false")
        writer.writerow(row)
    return buf.getvalue()


def cli_compare(configs: list[RunConfig], out_dir) -> dict:
    """Run, write each run's artifacts under ``out_dir/<label>`` plus a merged comparison."""
    labels, results = compare(configs)
    out = Path(out_dir)
    for lab, res in zip(labels, results):
        write_artifacts(res, out / lab)
    paired = _paired(configs)
    table = comparison_table(labels, [r.trace for r in results], paired)
    (out / "comparison.csv").write_text(table, encoding="utf-8", newline="")
    base = results[0].trace
    report = {"baseline": labels[0], "paired": paired, "runs": {}}
    for lab, res in zip(labels, results):
        entry = res.summary()
        if lab != labels[0]:
            entry["final_ratio"] = _ratio(res.trace.last.mse, base.last.mse)
            if paired:
                entry["dominant_at_every_checkpoint"] = all(
                    a.mse <= b.mse for a, b in zip(res.trace, base)
                )
        report["runs"][lab] = entry
    (out / "comparison.json").write_text(json.dumps(report, indent=2) + "\n")
    return report
