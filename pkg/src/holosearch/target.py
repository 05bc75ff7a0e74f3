"""Phase-sensitive targets: amplitude and phase images placed in a replay field.

Targets are laid out in the DC-centred view (what a camera in the replay plane
would see) and converted to corner-origin arrays with ``ifftshift`` before any
transform runs. In the central-quadrant layout the images occupy rows
``nx/4 .. 3nx/4 - 1`` and columns ``ny/4 .. 3ny/4 - 1`` of the centred view,
and the target is exactly zero elsewhere.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .metrics import RegionWeights

__all__ = [
    "Layout",
    "EnergyNorm",
    "TargetSpec",
    "Target",
    "TargetError",
    "build_target",
    "load_image",
    "save_gray16",
    "test_pattern",
    "to_centred",
    "to_corner",
]

# Rec. 709 luma
_LUMA = np.array([0.2126, 0.7152, 0.0722])


class TargetError(ValueError):
    pass


class Layout(str, enum.Enum):
    FULL_FIELD = "full-field"
    CENTRAL_QUADRANT = "central-quadrant"


class EnergyNorm(str, enum.Enum):
    PARSEVAL_MATCHED = "parseval-matched"
    UNIT_MAX = "unit-max"


def to_corner(centred: np.ndarray) -> np.ndarray:
    return np.fft.ifftshift(centred)


def to_centred(corner: np.ndarray) -> np.ndarray:
    return np.fft.fftshift(corner)


@dataclass
class TargetSpec:
    amplitude_image: np.ndarray
    field_shape: tuple[int, int]
    phase_image: np.ndarray | None = None
    layout: Layout = Layout.CENTRAL_QUADRANT
    energy_norm: EnergyNorm = EnergyNorm.PARSEVAL_MATCHED


@dataclass
class Target:
    """A built target.

    Attributes:
        field: corner-origin complex target used by the search engines.
        region: region of interest, corner-origin.
        amplitude_image: the source amplitude image, values in [0, 1].
        scale: factor mapping ``amplitude_image`` onto ``|field|`` in the region.
        layout: how the images were placed.
    """

    field: np.ndarray
    region: RegionWeights
    amplitude_image: np.ndarray
    scale: float
    layout: Layout

    @property
    def shape(self) -> tuple[int, int]:
        return self.field.shape

    def centred(self) -> np.ndarray:
        return to_centred(self.field)

    def roi_slices(self) -> tuple[slice, slice]:
        """Slices selecting the region from a centred-view array."""
        nx, ny = self.shape
        if self.layout is Layout.CENTRAL_QUADRANT:
            return slice(nx // 4, nx // 4 + nx // 2), slice(ny // 4, ny // 4 + ny // 2)
        return slice(0, nx), slice(0, ny)

    def roi_amplitude(self, replay: np.ndarray) -> np.ndarray:
        """``|replay|`` over the region, rescaled to the amplitude image's units."""
        sx, sy = self.roi_slices()
        return np.abs(to_centred(replay)[sx, sy]) / self.scale


def build_target(spec: TargetSpec) -> Target:
    """Build the complex target described by ``spec``.

    Inside the region the target is ``A * exp(2*pi*i*p)`` where ``A`` is the
    amplitude image and ``p`` the phase image (``p = 1`` wraps to zero phase).
    With parseval-matched normalisation the amplitudes are scaled so the total
    target energy equals ``nx * ny``, the energy of any unit-magnitude phase
    hologram. Unit-max scales the brightest pixel to 1.
    """
    layout = Layout(spec.layout)
    norm = EnergyNorm(spec.energy_norm)
    nx, ny = (int(n) for n in spec.field_shape)
    if nx < 1 or ny < 1:
        raise TargetError(f"invalid field shape {spec.field_shape}")
    amp = np.asarray(spec.amplitude_image, dtype=np.float64)
    if amp.ndim != 2:
        raise TargetError("amplitude image must be 2D")
    if np.any(amp < 0) or np.any(amp > 1) or not np.all(np.isfinite(amp)):
        raise TargetError("amplitude image values must lie in [0, 1]")

    if layout is Layout.CENTRAL_QUADRANT:
        if nx % 2 or ny % 2:
            raise TargetError(f"central-quadrant layout needs even field dimensions, got {(nx, ny)}")
        expected = (nx // 2, ny // 2)
    else:
        expected = (nx, ny)
    if amp.shape != expected:
        raise TargetError(f"amplitude image is {amp.shape}, layout {layout.value} needs {expected}")

    if spec.phase_image is None:
        phase = np.zeros_like(amp)
    else:
        p = np.asarray(spec.phase_image, dtype=np.float64)
        if p.shape != amp.shape:
            raise TargetError(f"phase image is {p.shape}, amplitude image is {amp.shape}")
        if np.any(p < 0) or np.any(p > 1) or not np.all(np.isfinite(p)):
            raise TargetError("phase image values must lie in [0, 1]")
        phase = 2.0 * np.pi * np.where(p >= 1.0, 0.0, p)

    if norm is EnergyNorm.PARSEVAL_MATCHED:
        energy = float(np.sum(amp * amp))
        if energy == 0.0:
            raise TargetError("cannot energy-match an all-zero amplitude image")
        scale = float(np.sqrt(nx * ny / energy))
    else:
        peak = float(amp.max())
        if peak == 0.0:
            raise TargetError("cannot unit-max scale an all-zero amplitude image")
        scale = 1.0 / peak

    centred = np.zeros((nx, ny), dtype=np.complex128)
    if layout is Layout.CENTRAL_QUADRANT:
        sx = slice(nx // 4, nx // 4 + nx // 2)
        sy = slice(ny // 4, ny // 4 + ny // 2)
        centred[sx, sy] = scale * amp * np.exp(1j * phase)
        region = RegionWeights.central_quadrant((nx, ny))
    else:
        centred[:, :] = scale * amp * np.exp(1j * phase)
        region = RegionWeights.full_field((nx, ny))
    return Target(
        field=to_corner(centred),
        region=region,
        amplitude_image=amp,
        scale=scale,
        layout=layout,
    )


def _read_pgm(path: Path) -> np.ndarray:
    data = path.read_bytes()
    if not data.startswith(b"P5"):
        raise TargetError(f"{path}: only binary (P5) PGM files are supported")
    fields: list[bytes] = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise TargetError(f"{path}: truncated PGM header")
        fields.append(data[start:pos])
    pos += 1  # single whitespace before raster
    try:
        width, height, maxval = (int(f) for f in fields)
    except ValueError:
        raise TargetError(f"{path}: malformed PGM header") from None
    if width < 1 or height < 1:
        raise TargetError(f"{path}: zero-dimension image")
    if not 0 < maxval < 65536:
        raise TargetError(f"{path}: invalid PGM maxval {maxval}")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    count = width * height
    raster = np.frombuffer(data, dtype=dtype, count=count, offset=pos) if len(data) - pos >= count * dtype.itemsize else None
    if raster is None:
        raise TargetError(f"{path}: truncated PGM raster")
    return raster.reshape(height, width).astype(np.float64) / maxval


def load_image(path) -> np.ndarray:
    """Read a PNG or binary PGM as a grayscale float image in [0, 1].

    Integer samples are scaled linearly by the full range of their bit depth
    (the header maxval for PGM). Colour images are reduced with Rec. 709 luma
    weights; alpha is discarded.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"image not found: {path}")
    if path.suffix.lower() in (".pgm", ".pnm"):
        return _read_pgm(path)
    try:
        with Image.open(path) as im:
            im.load()
            if im.format != "PNG":
                raise TargetError(f"{path}: unsupported image format {im.format}")
            mode = im.mode
            if mode == "1":
                img = np.asarray(im, dtype=np.float64)
            elif mode == "L":
                img = np.asarray(im, dtype=np.float64) / 255.0
            elif mode.startswith("I;16") or mode == "I":
                img = np.asarray(im, dtype=np.float64) / 65535.0
            elif mode in ("LA", "La"):
                img = np.asarray(im.getchannel(0), dtype=np.float64) / 255.0
            else:
                rgb = np.asarray(im.convert("RGB"), dtype=np.float64) / 255.0
                img = rgb @ _LUMA
    except TargetError:
        raise
    except (OSError, ValueError) as exc:
        raise TargetError(f"{path}: cannot read image ({exc})") from exc
    if img.ndim != 2 or img.size == 0:
        raise TargetError(f"{path}: zero-dimension image")
    return np.clip(img, 0.0, 1.0)


def save_gray16(path, image: np.ndarray) -> None:
    """Write a [0, 1] float image as a 16-bit grayscale PNG."""
    img = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    Image.fromarray(np.round(img * 65535.0).astype(np.uint16)).save(path, format="PNG")


def test_pattern(shape: tuple[int, int], kind: str = "amplitude") -> np.ndarray:
    """Deterministic synthetic test images in [0, 1], used when no image file is given.

    ``"amplitude"`` is a soft disc with a bright ring and a corner gradient;
    ``"phase"`` is a quadratic (lens-like) phase profile plus a gentle tilt,
    wrapped into [0, 1).
    """
    nx, ny = shape
    x = (np.arange(nx) - (nx - 1) / 2) / nx
    y = (np.arange(ny) - (ny - 1) / 2) / ny
    xx, yy = np.meshgrid(x, y, indexing="ij")
    r = np.hypot(xx, yy)
    if kind == "amplitude":
        disc = 1.0 / (1.0 + np.exp((r - 0.38) / 0.03))
        ring = np.exp(-(((r - 0.22) / 0.05) ** 2))
        img = 0.35 * disc + 0.45 * ring + 0.2 * (xx + 0.5)
        return np.clip(img / img.max(), 0.0, 1.0)
    if kind == "phase":
        return np.mod(3.0 * (xx**2 + yy**2) * 4.0 + 0.5 * xx, 1.0)
    raise ValueError(f"unknown test pattern {kind!r}")
