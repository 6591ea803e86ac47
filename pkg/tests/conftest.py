import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from catgini import PairedDataset  # noqa: E402

ACCEPTANCE_LINES = []


def random_paired(rng, n_classes=None, min_size=2, max_size=10, max_dim=4):
    """A random PairedDataset with continuous features (no ties)."""
    K = n_classes or int(rng.integers(2, 4))
    sizes = rng.integers(min_size, max_size + 1, size=K)
    labels = np.repeat(np.arange(K), sizes)
    rng.shuffle(labels)
    n = labels.size
    p, q = (int(v) for v in rng.integers(1, max_dim + 1, size=2))
    x = rng.normal(size=(n, p)) + labels[:, None] * rng.uniform(0, 1)
    y = rng.normal(size=(n, q)) * rng.uniform(0.5, 3) + labels[:, None] * rng.uniform(0, 1)
    return PairedDataset(x, y, labels)


@pytest.fixture
def acceptance_report():
    def record(number, text, ok):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
