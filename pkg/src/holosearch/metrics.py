"""Phase-sensitive error, diffraction efficiency and SSIM."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .field import TwiddleTables, _tables_for

__all__ = [
    "RegionKind",
    "RegionWeights",
    "mse",
    "mse_delta_for_pixel_change",
    "diffraction_efficiency",
    "ssim",
    "SSIM_WINDOW",
]


class RegionKind(str, enum.Enum):
    FULL_FIELD = "full-field"
    CENTRAL_QUADRANT = "central-quadrant"


@dataclass(frozen=True)
class RegionWeights:
    """Region of interest in corner-origin replay coordinates.

    ``mask`` is 1 inside the region and 0 outside. It only selects energy for
    efficiency and the pixels used for SSIM; the error is always summed over
    the whole field, with the target amplitude set to zero outside the region.
    """

    mask: np.ndarray
    kind: RegionKind = RegionKind.FULL_FIELD

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=np.float64)
        if mask.ndim != 2:
            raise ValueError("region mask must be 2D")
        if np.any(mask < 0) or not np.all(np.isfinite(mask)):
            raise ValueError("region mask must be finite and non-negative")
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "kind", RegionKind(self.kind))

    @property
    def shape(self) -> tuple[int, int]:
        return self.mask.shape

    @classmethod
    def full_field(cls, shape) -> "RegionWeights":
        return cls(np.ones(shape), RegionKind.FULL_FIELD)

    @classmethod
    def central_quadrant(cls, shape) -> "RegionWeights":
        nx, ny = shape
        if nx % 2 or ny % 2:
            raise ValueError(f"central quadrant needs even dimensions, got {shape}")
        centred = np.zeros(shape)
        centred[nx // 4 : nx // 4 + nx // 2, ny // 4 : ny // 4 + ny // 2] = 1.0
        return cls(np.fft.ifftshift(centred), RegionKind.CENTRAL_QUADRANT)


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")


def mse(target, replay) -> float:
    """Phase-sensitive mean squared error ``mean(|T - R|^2)`` over the full field."""
    target = np.asarray(target)
    replay = np.asarray(replay)
    _check_same_shape(target, replay)
    diff = target - replay
    return float(np.mean(diff.real**2 + diff.imag**2))


def mse_delta_for_pixel_change(
    target: np.ndarray,
    replay: np.ndarray,
    x: int,
    y: int,
    old_value: complex,
    new_value: complex,
    tables: TwiddleTables | None = None,
) -> float:
    """Change in :func:`mse` if hologram pixel ``(x, y)`` went from ``old_value`` to ``new_value``.

    ``replay`` must be the current replay field of the hologram holding
    ``old_value`` at ``(x, y)``. With ``d = new - old`` and residual
    ``D = T - R``, the change is ``(|d|^2 - 2 Re(conj(d) * S) / sqrt(N)) / N``
    where ``S = sum_uv D[u,v] * conj(kernel[u,v])``. One O(N) reduction, no
    transform.
    """
    _check_same_shape(target, replay)
    if tables is None:
        tables = _tables_for(replay.shape)
    tables.check_index(x, y)
    d = complex(new_value) - complex(old_value)
    if d == 0:
        return 0.0
    s = tables.project(target - replay, x, y)
    n = replay.size
    return ((d.real**2 + d.imag**2) - 2.0 * (d.conjugate() * s).real * tables.norm) / n


def diffraction_efficiency(replay, region: RegionWeights) -> float:
    """Fraction of replay energy inside ``region``.

    Raises:
        ValueError: for a replay field with no energy.
    """
    replay = np.asarray(replay)
    _check_same_shape(replay, region.mask)
    energy = replay.real**2 + replay.imag**2
    total = float(energy.sum())
    if total == 0.0:
        raise ValueError("diffraction efficiency is undefined for an all-zero replay field")
    return float((energy * region.mask).sum() / total)


SSIM_WINDOW = 11
_SSIM_SIGMA = 1.5
# radius = int(truncate * sigma + 0.5) = 5 -> 11 taps
_SSIM_TRUNCATE = 3.5
_K1 = 0.01
_K2 = 0.03


def ssim(a, b, dynamic_range: float = 1.0) -> float:
    """Mean structural similarity of two real images.

    Gaussian-weighted local statistics (11x11 window, sigma 1.5, reflected
    borders) with K1 = 0.01 and K2 = 0.03; the mean is taken over pixels whose
    window lies entirely inside the image. Both images must be at least 11
    pixels in each dimension.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_same_shape(a, b)
    if a.ndim != 2:
        raise ValueError("ssim expects 2D images")
    if min(a.shape) < SSIM_WINDOW:
        raise ValueError(f"images must be at least {SSIM_WINDOW}x{SSIM_WINDOW} for SSIM, got {a.shape}")
    if not dynamic_range > 0:
        raise ValueError("dynamic_range must be positive")

    def blur(img):
        return gaussian_filter(img, sigma=_SSIM_SIGMA, truncate=_SSIM_TRUNCATE, mode="reflect")

    mu_a = blur(a)
    mu_b = blur(b)
    var_a = blur(a * a) - mu_a * mu_a
    var_b = blur(b * b) - mu_b * mu_b
    cov = blur(a * b) - mu_a * mu_b

    c1 = (_K1 * dynamic_range) ** 2
    c2 = (_K2 * dynamic_range) ** 2
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    pad = (SSIM_WINDOW - 1) // 2
    return float(np.mean((num / den)[pad:-pad, pad:-pad]))
