import numpy as np
import pytest

from mengerlab.curve import FourierCurve, circle, perturbed

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def random_curve(N, dim=3, seed=0, decay=1.5, base_radius=None):
    """Circle plus random modes 2..N with polynomially decaying size; simple for small amplitudes."""
    rng = np.random.default_rng(seed)
    c = circle(dim, N, base_radius).coeffs.copy()
    for k in range(2, N + 1):
        z = (rng.normal(size=dim) + 1j * rng.normal(size=dim)) * 0.01 * k**-decay
        c[N + k] += z
        c[N - k] += np.conj(z)
    return FourierCurve(c)


@pytest.fixture(scope="session")
def table25():
    from mengerlab.variation import multiplier_table

    return multiplier_table(2.5, 32)


@pytest.fixture(scope="session")
def flow_run():
    """The mode-3 perturbed circle flowed to a critical point at p = 2.5."""
    import time

    from mengerlab.energy import EnergyParams
    from mengerlab.flow import FlowConfig, find_critical_point

    init = perturbed(circle(3, 16), 3, 1e-2)
    t0 = time.perf_counter()
    state = find_critical_point(init, FlowConfig(), EnergyParams(2.5))
    return init, state, time.perf_counter() - t0
