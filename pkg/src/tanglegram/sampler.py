"""
Seeded random trees and tanglegrams.

Trees are grown by grafting: leaf i+1 subdivides a uniformly chosen edge of
the current tree, the virtual edge above the root included.  Every labeled
topology on n leaves is reached in exactly one way, so the result is uniform
over the (2n-3)!! labeled rooted binary trees.  Under ``plane-uniform`` the
new leaf also lands on a fair-coin side, which makes the stored child order
uniform as well; ``shape-uniform-substitute`` always places it second.

A tanglegram is two independent trees plus a uniform bijection between the
leaf sets.  This stands in for uniform sampling over tanglegram isomorphism
classes; the two agree up to the weight 1/|Aut(T)|, which is 1 for almost
all large tanglegrams.

Streams: sample ``index`` of a config uses numpy's PCG64 seeded with
``SeedSequence(entropy=seed, spawn_key=(n, index))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import BinaryTree, Tanglegram, TanglegramError, _subdivide

__all__ = [
    "DISTRIBUTIONS",
    "RNG_RULE",
    "SampleConfig",
    "sample_rng",
    "random_tree",
    "random_tanglegram",
    "samples",
]

DISTRIBUTIONS = ("plane-uniform", "shape-uniform-substitute")
RNG_RULE = "numpy.random.PCG64(SeedSequence(entropy=seed, spawn_key=(n, index)))"


@dataclass(frozen=True)
class SampleConfig:
    n: int
    seed: int = 0
    count: int = 1
    distribution: str = "plane-uniform"

    def __post_init__(self):
        if self.n < 1:
            raise TanglegramError("sample size n must be >= 1")
        if self.count < 1:
            raise TanglegramError("sample count must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise TanglegramError("seed must fit in 64 unsigned bits")
        if self.distribution not in DISTRIBUTIONS:
            raise TanglegramError(f"unknown distribution {self.distribution!r}")


def sample_rng(cfg: SampleConfig, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=cfg.seed, spawn_key=(cfg.n, index))
    return np.random.Generator(np.random.PCG64(ss))


def random_tree(n: int, rng=None, labels=None, plane: bool = True) -> BinaryTree:
    """Uniform random labeled rooted binary tree; leaf i gets ``labels[i]``."""
    if n < 1:
        raise TanglegramError("random_tree needs n >= 1")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    if labels is None:
        labels = [f"t{i}" for i in range(n)]
    if len(labels) != n:
        raise TanglegramError("need exactly n labels")
    kids: dict = {}
    parent: dict = {}
    nodes = [0]
    root = 0
    for leaf in range(1, n):
        target = nodes[int(rng.integers(len(nodes)))]
        flip = bool(rng.integers(2)) if plane else False
        root = _subdivide(kids, parent, root, target, leaf, flip)
        nodes.append(leaf)
        nodes.append(("x", leaf))
    return BinaryTree._from_links(root, kids, dict(enumerate(labels)))


def random_tanglegram(cfg: SampleConfig, index: int = 0) -> Tanglegram:
    """Sample ``index`` of ``cfg``; identical (cfg, index) give identical output."""
    if not 0 <= index:
        raise TanglegramError("sample index must be >= 0")
    rng = sample_rng(cfg, index)
    plane = cfg.distribution == "plane-uniform"
    labels = [f"t{i}" for i in range(cfg.n)]
    left = random_tree(cfg.n, rng, labels, plane)
    perm = rng.permutation(cfg.n)
    right = random_tree(cfg.n, rng, [labels[int(p)] for p in perm], plane)
    return Tanglegram(left, right)


def samples(cfg: SampleConfig) -> Iterator[Tanglegram]:
    for i in range(cfg.count):
        yield random_tanglegram(cfg, i)
