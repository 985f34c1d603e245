import math

import numpy as np
import pytest

from tanglegram.core import BinaryTree, Tanglegram
from tanglegram.sampler import SampleConfig, random_tanglegram

ACCEPTANCE_LINES = []


def random_instances(count, nmin, nmax, seed):
    """Deterministic tanglegrams cycling n through [nmin, nmax]."""
    out = []
    for i in range(count):
        n = nmin + i % (nmax - nmin + 1)
        out.append(random_tanglegram(SampleConfig(n, seed=seed), i))
    return out


def random_layout(t, rng):
    m = t.n - 1
    from tanglegram.layout import TanglegramLayout

    return TanglegramLayout(tuple(rng.integers(0, 2, m)), tuple(rng.integers(0, 2, m)))


def relabeled(t: Tanglegram, rng) -> Tanglegram:
    """Same tanglegram with fresh labels, as seen by an isomorphism test."""
    labels = t.labels
    perm = rng.permutation(len(labels))
    mapping = {lab: f"z{int(p)}" for lab, p in zip(labels, perm)}
    return Tanglegram(t.left.relabel(mapping), t.right.relabel(mapping))


def record_acceptance(number, name, ok, detail=""):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {name}" + (f" ({detail})" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
