import numpy as np
import pytest

from aloha_lab import SystemConfig, UserSpec


class ForcedUniform:
    """Stands in for SplitMix64 and replays fixed uniforms, cycling."""

    seed = 0

    def __init__(self, values):
        self.values = np.asarray(values, dtype=np.float64)
        self.i = 0

    def uniform(self, n):
        idx = (self.i + np.arange(n)) % len(self.values)
        self.i += n
        return self.values[idx]

    def spawn(self):
        return self


class FixedGaps:
    """Gap model that replays a fixed list of gaps and then huge ones."""

    def __init__(self, gaps):
        self.gaps = list(gaps)
        self.mean = 1.0

    def sample(self, rng, n):
        out = (self.gaps + [1e300] * n)[:n]
        self.gaps = self.gaps[n:]
        return np.asarray(out, dtype=np.float64)


@pytest.fixture
def hetero_config():
    users = (UserSpec(0, 0.001), UserSpec(1, 0.002), UserSpec(2, 0.004))
    return SystemConfig(users=users, airtime=1.0, horizon=1e7, seed=42)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record a criterion verdict line, then assert it."""

    def _check(number, ok, detail):
        ACCEPTANCE_LINES.append(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return _check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
