import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holosearch.modulation import (
    Kind,
    ModulationScheme,
    SchemeError,
    parse_scheme,
    phase_level,
    quantize,
    quantize_phase,
)

PHASE_SCHEMES = [parse_scheme(s) for s in ("phase:2", "phase:3", "phase:4", "phase:16", "phase:256", "phase:continuous")]
ALL_SCHEMES = PHASE_SCHEMES + [parse_scheme(s) for s in ("amplitude:2", "amplitude:5", "amplitude:continuous")]


def test_binary_phase_nearest():
    assert quantize(0.9 * np.exp(0.1j), parse_scheme("phase:2")) == pytest.approx(1.0)


def test_four_level_phase():
    q = quantize(np.exp(1j * np.pi / 3), parse_scheme("phase:4"))
    assert abs(q - np.exp(1j * np.pi / 2)) < 1e-15


@pytest.mark.parametrize("levels", [2, 4, 7, 256])
def test_zero_maps_to_level_zero(levels):
    assert quantize(0j, parse_scheme(f"phase:{levels}")) == 1.0


def test_quantize_phase_examples():
    sch = parse_scheme("phase:4")
    assert abs(quantize_phase(0.24 * 2 * np.pi, sch) - 1j) < 1e-15
    assert quantize_phase(1.234, parse_scheme("phase:continuous")) == np.exp(1.234j)


@pytest.mark.parametrize("levels", [2, 4, 8, 256])
def test_midpoint_tie_goes_to_lower_index(levels):
    assert phase_level(np.pi / levels, levels) == 0
    assert phase_level(3 * np.pi / levels, levels) == (1 if levels > 2 else 0)
    # wrap-around tie between L-1 and 0
    assert phase_level(-np.pi / levels, levels) == 0


def test_quantize_phase_rejects_amplitude():
    with pytest.raises(SchemeError):
        quantize_phase(0.3, parse_scheme("amplitude:4"))


@pytest.mark.parametrize("levels", [2, 3, 5, 8, 64, 256])
def test_exhaustive_nearest_phase(levels):
    states = 2 * np.pi * np.arange(levels) / levels
    theta = np.linspace(-7, 7, 5001)
    k = phase_level(theta, levels)
    dist = np.abs(np.angle(np.exp(1j * (theta[:, None] - states[None, :]))))
    best = dist.min(axis=1)
    chosen = dist[np.arange(theta.size), k]
    np.testing.assert_allclose(chosen, best, atol=1e-12)


def test_amplitude_kinds():
    assert quantize(0.4 + 0.9j, parse_scheme("amplitude:2")) == 0.0
    assert quantize(0.6, parse_scheme("amplitude:2")) == 1.0
    assert quantize(0.5, parse_scheme("amplitude:2")) == 0.0  # tie -> lower index
    assert quantize(0.3, parse_scheme("amplitude:5")) == 0.25
    assert quantize(1.7 - 2j, parse_scheme("amplitude:continuous")) == 1.0
    assert quantize(-0.2, parse_scheme("amplitude:continuous")) == 0.0
    assert quantize(0.42, parse_scheme("amplitude:continuous")) == 0.42


def test_states():
    np.testing.assert_allclose(parse_scheme("phase:4").states(), [1, 1j, -1, -1j], atol=1e-15)
    np.testing.assert_allclose(parse_scheme("amplitude:3").states(), [0, 0.5, 1])
    with pytest.raises(SchemeError):
        parse_scheme("phase:continuous").states()


def test_parse_scheme():
    assert parse_scheme("phase:2").kind is Kind.BINARY_PHASE
    assert parse_scheme("phase:256") == ModulationScheme(Kind.MULTI_PHASE, 256)
    assert parse_scheme("phase:continuous").kind is Kind.CONTINUOUS_PHASE
    assert parse_scheme("amplitude:2").kind is Kind.BINARY_AMPLITUDE
    assert str(parse_scheme("phase:16")) == "phase:16"
    for bad in ("phase", "phase:1", "phase:x", "colour:4", "", "phase:0"):
        with pytest.raises(SchemeError):
            parse_scheme(bad)


def test_level_validation():
    with pytest.raises(SchemeError):
        ModulationScheme(Kind.MULTI_PHASE, 1)
    with pytest.raises(SchemeError):
        ModulationScheme(Kind.BINARY_PHASE, 3)
    assert ModulationScheme(Kind.CONTINUOUS_PHASE, 17).levels == 0


finite = st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(v=finite, idx=st.integers(0, len(ALL_SCHEMES) - 1))
def test_quantize_idempotent(v, idx):
    sch = ALL_SCHEMES[idx]
    q = quantize(v, sch)
    assert quantize(q, sch) == q


@settings(max_examples=200, deadline=None)
@given(v=finite, idx=st.integers(0, len(PHASE_SCHEMES) - 1))
def test_phase_states_unit_magnitude(v, idx):
    assert abs(abs(quantize(v, PHASE_SCHEMES[idx])) - 1.0) < 1e-15


@settings(max_examples=200, deadline=None)
@given(v=finite, idx=st.integers(0, len(ALL_SCHEMES) - 1))
def test_quantize_is_nearest_state(v, idx):
    sch = ALL_SCHEMES[idx]
    if not sch.is_discrete:
        return
    q = quantize(v, sch)
    assert abs(q - v) <= np.min(np.abs(sch.states() - v)) + 1e-9 * max(1.0, abs(v))
