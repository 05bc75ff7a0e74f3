"""Achievable pixel states of a spatial light modulator and quantisation onto them.

Phase devices with ``L`` levels realise ``exp(2*pi*i*k/L)`` for ``k = 0..L-1``.
Amplitude devices realise real values in ``[0, 1]``: ``k/(L-1)`` when
discrete. Exact midpoints between two states resolve to the lower level index.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Kind",
    "ModulationScheme",
    "SchemeError",
    "parse_scheme",
    "quantize",
    "quantize_phase",
    "phase_level",
]

TWO_PI = 2.0 * np.pi
_UNIT_TOL = 4 * np.finfo(np.float64).eps


class SchemeError(ValueError):
    pass


class Kind(str, enum.Enum):
    BINARY_AMPLITUDE = "binary-amplitude"
    MULTI_AMPLITUDE = "multi-amplitude"
    CONTINUOUS_AMPLITUDE = "continuous-amplitude"
    BINARY_PHASE = "binary-phase"
    MULTI_PHASE = "multi-phase"
    CONTINUOUS_PHASE = "continuous-phase"


_PHASE_KINDS = {Kind.BINARY_PHASE, Kind.MULTI_PHASE, Kind.CONTINUOUS_PHASE}
_CONTINUOUS_KINDS = {Kind.CONTINUOUS_PHASE, Kind.CONTINUOUS_AMPLITUDE}


@dataclass(frozen=True)
class ModulationScheme:
    """A device modulation scheme.

    ``levels`` is ignored (and normalised to 0) for continuous kinds.
    """

    kind: Kind
    levels: int = 0

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind in _CONTINUOUS_KINDS:
            object.__setattr__(self, "levels", 0)
            return
        levels = int(self.levels)
        if kind in (Kind.BINARY_PHASE, Kind.BINARY_AMPLITUDE) and levels in (0, 2):
            levels = 2
        if levels < 2:
            raise SchemeError(f"{kind.value} needs at least 2 levels, got {self.levels}")
        if kind in (Kind.BINARY_PHASE, Kind.BINARY_AMPLITUDE) and levels != 2:
            raise SchemeError(f"{kind.value} has exactly 2 levels, got {levels}")
        object.__setattr__(self, "levels", levels)

    @property
    def is_phase(self) -> bool:
        return self.kind in _PHASE_KINDS

    @property
    def is_discrete(self) -> bool:
        return self.kind not in _CONTINUOUS_KINDS

    def states(self) -> np.ndarray:
        """All achievable states as a complex array (discrete kinds only)."""
        if not self.is_discrete:
            raise SchemeError(f"{self.kind.value} has a continuum of states")
        k = np.arange(self.levels)
        if self.is_phase:
            return np.exp(1j * TWO_PI * k / self.levels)
        return (k / (self.levels - 1)).astype(np.complex128)

    def __str__(self) -> str:
        prefix = "phase" if self.is_phase else "amplitude"
        return f"{prefix}:{self.levels if self.is_discrete else 'continuous'}"


def parse_scheme(text: str) -> ModulationScheme:
    """Parse ``phase:256``, ``phase:2``, ``phase:continuous``, ``amplitude:4`` ..."""
    try:
        family, _, count = text.strip().lower().partition(":")
    except AttributeError:
        raise SchemeError(f"invalid scheme {text!r}") from None
    if family not in ("phase", "amplitude") or not count:
        raise SchemeError(f"invalid scheme {text!r}; expected e.g. phase:256 or phase:continuous")
    if count == "continuous":
        return ModulationScheme(Kind.CONTINUOUS_PHASE if family == "phase" else Kind.CONTINUOUS_AMPLITUDE)
    try:
        levels = int(count)
    except ValueError:
        raise SchemeError(f"invalid level count in {text!r}") from None
    if family == "phase":
        kind = Kind.BINARY_PHASE if levels == 2 else Kind.MULTI_PHASE
    else:
        kind = Kind.BINARY_AMPLITUDE if levels == 2 else Kind.MULTI_AMPLITUDE
    return ModulationScheme(kind, levels)


def _nearest_index(x: np.ndarray, n: int, periodic: bool) -> np.ndarray:
    # x is a position in level units; ties go to the lower index
    lo = np.floor(x)
    frac = x - lo
    lo = lo.astype(np.int64)
    hi = lo + 1
    if periodic:
        lo %= n
        hi %= n
    k = np.where(frac > 0.5, hi, lo)
    return np.where(frac == 0.5, np.minimum(lo, hi), k)


def phase_level(theta, levels: int) -> np.ndarray | int:
    """Index of the phase level nearest to ``theta`` on the circle."""
    theta = np.asarray(theta, dtype=np.float64)
    x = np.mod(theta * (levels / TWO_PI), levels)
    k = _nearest_index(x, levels, periodic=True)
    return int(k) if k.ndim == 0 else k


def quantize_phase(theta, scheme: ModulationScheme):
    """Snap phase ``theta`` (radians) to the nearest achievable phase state.

    Returns ``exp(i*theta_q)`` (complex scalar for scalar input).

    Raises:
        SchemeError: for amplitude schemes.
    """
    if not scheme.is_phase:
        raise SchemeError(f"quantize_phase needs a phase scheme, got {scheme.kind.value}")
    theta = np.asarray(theta, dtype=np.float64)
    if scheme.is_discrete:
        out = scheme.states()[phase_level(theta, scheme.levels)]
    else:
        out = np.exp(1j * theta)
    return complex(out) if np.ndim(out) == 0 else out


def quantize(value, scheme: ModulationScheme):
    """Nearest achievable state to ``value`` in the complex plane."""
    value = np.asarray(value, dtype=np.complex128)
    if scheme.is_phase:
        if scheme.is_discrete:
            out = quantize_phase(np.angle(value), scheme)
        else:
            mag = np.abs(value)
            out = np.where(mag > 0, np.exp(1j * np.angle(value)), 1.0 + 0j)
            # values already on the unit circle pass through, keeping quantize idempotent
            out = np.where(np.abs(mag - 1.0) <= _UNIT_TOL, value, out)
    else:
        # distance to a real state a is (Re v - a)^2 + (Im v)^2, so only Re v matters
        re = np.clip(value.real, 0.0, 1.0)
        if scheme.is_discrete:
            k = _nearest_index(re * (scheme.levels - 1), scheme.levels, periodic=False)
            out = scheme.states()[k]
        else:
            out = re.astype(np.complex128)
    return complex(out) if np.ndim(out) == 0 else np.asarray(out, dtype=np.complex128)
