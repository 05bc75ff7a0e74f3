import numpy as np
import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one acceptance line; all lines are printed in the terminal summary."""

    def _report(label: str, passed: bool, detail: str) -> bool:
        _ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}")
        return passed

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_field(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def naive_dft(f, sign=-1):
    """Explicit double-sum DFT with 1/sqrt(N) scaling."""
    nx, ny = f.shape
    out = np.zeros_like(f, dtype=complex)
    x = np.arange(nx)[:, None]
    y = np.arange(ny)[None, :]
    for u in range(nx):
        for v in range(ny):
            out[u, v] = np.sum(f * np.exp(sign * 2j * np.pi * (u * x / nx + v * y / ny)))
    return out / np.sqrt(nx * ny)
