import numpy as np
import pytest

from tpaopt import build_kernel, decompose, make_system, reference_grid


@pytest.fixture(scope="session")
def detuned_system():
    return make_system(0.5, 5.0)


@pytest.fixture(scope="session")
def detuned_small(detuned_system):
    """Detuned point (Delta = 5, gamma_f = 0.5) on a coarse grid: (kernel, decomposition)."""
    k = build_kernel(detuned_system, reference_grid(detuned_system, 201))
    return k, decompose(k)


@pytest.fixture(scope="session")
def harmonic_small():
    sys = make_system(2.0, 0.0)
    k = build_kernel(sys, reference_grid(sys, 201))
    return k, decompose(k)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
