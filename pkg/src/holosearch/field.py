"""Complex 2D fields, the unitary DFT pair and single-pixel replay updates.

Fields are plain ``complex128`` numpy arrays of shape ``(nx, ny)`` indexed
``[x, y]`` in the diffraction plane and ``[u, v]`` in the replay plane. The
origin is the array corner (DC at ``[0, 0]``); centring is applied only when
targets are built or images exported.

Both transform directions carry the ``1/sqrt(nx*ny)`` prefactor, so the pair
is unitary and the total energy of a field is preserved.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "FieldError",
    "TwiddleTables",
    "as_field",
    "forward_dft",
    "inverse_dft",
    "incremental_update",
]


class FieldError(ValueError):
    """Raised for malformed fields (wrong rank, empty, non-finite)."""


def as_field(data, copy: bool = False) -> np.ndarray:
    """Validate ``data`` as a field and return it as a complex128 array."""
    arr = np.array(data, dtype=np.complex128, copy=copy) if copy else np.asarray(data, dtype=np.complex128)
    if arr.ndim != 2:
        raise FieldError(f"field must be 2D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise FieldError(f"field dimensions must be positive, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise FieldError("field contains non-finite values")
    return arr


def forward_dft(field) -> np.ndarray:
    """Unitary forward 2D DFT (diffraction plane -> replay plane)."""
    return np.fft.fft2(as_field(field), norm="ortho")


def inverse_dft(field) -> np.ndarray:
    """Unitary inverse 2D DFT (replay plane -> diffraction plane)."""
    return np.fft.ifft2(as_field(field), norm="ortho")


class TwiddleTables:
    """Per-axis phase tables for the kernel ``exp(-2*pi*i*(u*x/nx + v*y/ny))``.

    The kernel for a fixed source pixel ``(x, y)`` is separable: it is the
    outer product of ``exp(-2*pi*i*u*x/nx)`` over ``u`` and
    ``exp(-2*pi*i*v*y/ny)`` over ``v``. Each factor is a gather from a table of
    length ``nx`` (or ``ny``), so no trigonometry runs inside the per-iteration
    loops.
    """

    def __init__(self, shape: tuple[int, int]):
        nx, ny = (int(n) for n in shape)
        if nx < 1 or ny < 1:
            raise FieldError(f"invalid shape {shape}")
        self.shape = (nx, ny)
        self.norm = 1.0 / np.sqrt(nx * ny)
        self._wx = np.exp(-2j * np.pi * np.arange(nx) / nx)
        self._wy = np.exp(-2j * np.pi * np.arange(ny) / ny)
        self._u = np.arange(nx)
        self._v = np.arange(ny)

    def check_index(self, x: int, y: int) -> None:
        nx, ny = self.shape
        if not (0 <= x < nx and 0 <= y < ny):
            raise IndexError(f"pixel ({x}, {y}) outside field of shape {self.shape}")

    def axes(self, x: int, y: int) -> tuple[np.ndarray, np.ndarray]:
        """Return the two 1D kernel factors for source pixel ``(x, y)``."""
        nx, ny = self.shape
        return self._wx[(self._u * x) % nx], self._wy[(self._v * y) % ny]

    def kernel(self, x: int, y: int) -> np.ndarray:
        """Full ``(nx, ny)`` kernel for source pixel ``(x, y)``, unnormalised."""
        ex, ey = self.axes(x, y)
        return np.outer(ex, ey)

    def project(self, field: np.ndarray, x: int, y: int) -> complex:
        """``sum_uv field[u, v] * conj(kernel[u, v])`` without forming the kernel.

        Equals ``sqrt(nx*ny) * inverse_dft(field)[x, y]``.
        """
        ex, ey = self.axes(x, y)
        return complex(ex.conj() @ field @ ey.conj())


_table_cache: dict[tuple[int, int], TwiddleTables] = {}


def _tables_for(shape) -> TwiddleTables:
    key = (int(shape[0]), int(shape[1]))
    tables = _table_cache.get(key)
    if tables is None:
        tables = _table_cache[key] = TwiddleTables(key)
    return tables


def incremental_update(
    replay: np.ndarray,
    x: int,
    y: int,
    delta_h: complex,
    tables: TwiddleTables | None = None,
) -> np.ndarray:
    """Apply a change ``delta_h`` of hologram pixel ``(x, y)`` to ``replay`` in place.

    Costs O(nx*ny) instead of a fresh transform. ``replay`` must be a
    complex128 array; it is modified and also returned.

    Raises:
        IndexError: if ``(x, y)`` lies outside the field.
    """
    if tables is None:
        tables = _tables_for(replay.shape)
    elif tables.shape != replay.shape:
        raise FieldError(f"tables for {tables.shape} used on field {replay.shape}")
    tables.check_index(x, y)
    if delta_h == 0:
        return replay
    ex, ey = tables.axes(x, y)
    replay += np.outer(ex * (delta_h * tables.norm), ey)
    return replay
