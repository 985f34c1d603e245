"""
Lower-bound simulation harness.

For every n in a range and every sample index, draw a random tanglegram and
evaluate the clade-partition bound under each ordered pair of cap policies
(s = 4, m = sqrt(n), l = n/2).  Rows come out sorted by
(n, sample, cl, cr), policies in s, m, l order, so the CSV does not depend
on how the work was scheduled.
"""

from __future__ import annotations

import csv
import io
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import comb

import numpy as np

from . import __version__
from .bound import CAP_POLICIES, crossing_lower_bound
from .sampler import RNG_RULE, SampleConfig, random_tanglegram
from .solver import exact_crt

__all__ = [
    "POLICY_ORDER",
    "POLICY_PAIRS",
    "CSV_HEADER",
    "SimulationRow",
    "simulate_n",
    "run_simulation",
    "write_csv",
    "summarize",
    "quadratic_fit",
    "thread_limit",
]

POLICY_ORDER = "sml"
POLICY_PAIRS = tuple(a + b for a in POLICY_ORDER for b in POLICY_ORDER)
CSV_HEADER = ("n", "seed", "sample", "cl", "cr", "bound", "crt", "runtime_s")

# reference leading coefficients for the ll mean and max series
REFERENCE_MEAN_N2 = 0.055
REFERENCE_MAX_N2 = 0.08


@dataclass(frozen=True)
class SimulationRow:
    n: int
    seed: int
    sample: int
    cl: str
    cr: str
    bound: int
    crt: int | None = None
    runtime_s: float | None = None

    def sort_key(self):
        return (self.n, self.sample, POLICY_ORDER.index(self.cl), POLICY_ORDER.index(self.cr))

    def as_csv(self) -> list:
        return [
            str(self.n),
            str(self.seed),
            str(self.sample),
            self.cl,
            self.cr,
            str(self.bound),
            "" if self.crt is None else str(self.crt),
            "" if self.runtime_s is None else f"{self.runtime_s:.6g}",
        ]


def _check_pairs(pairs) -> tuple:
    pairs = tuple(pairs)
    for p in pairs:
        if p not in POLICY_PAIRS:
            raise ValueError(f"unknown policy pair {p!r}; use two of {POLICY_ORDER!r}")
    return pairs


def simulate_n(
    n: int,
    samples: int,
    seed: int,
    pairs=POLICY_PAIRS,
    exact_upto: int = 0,
    timing: bool = False,
    distribution: str = "plane-uniform",
) -> list:
    """All rows for one n."""
    cfg = SampleConfig(n, seed=seed, count=samples, distribution=distribution)
    caps = {p: CAP_POLICIES[p](n) for p in POLICY_ORDER}
    ceiling = comb(n, 2) / 2
    rows = []
    for i in range(samples):
        t = random_tanglegram(cfg, i)
        crt = exact_crt(t).crt if n <= exact_upto else None
        for pair in pairs:
            cl, cr = pair
            start = time.perf_counter()
            value = crossing_lower_bound(t, caps[cl], caps[cr])
            elapsed = time.perf_counter() - start
            if value >= ceiling and n >= 2:
                raise RuntimeError(f"bound {value} reaches C(n,2)/2 at n={n}, sample {i}")
            if crt is not None and value > crt:
                raise RuntimeError(f"bound {value} exceeds crt {crt} at n={n}, sample {i}")
            rows.append(SimulationRow(n, seed, i, cl, cr, value, crt, elapsed if timing else None))
    return rows


def thread_limit() -> int:
    """Worker count: the CPU count, capped by ``TGL_THREADS`` when set."""
    limit = os.cpu_count() or 1
    env = os.environ.get("TGL_THREADS")
    if env:
        limit = min(limit, max(1, int(env)))
    return limit


def run_simulation(
    nmin: int,
    nmax: int,
    samples: int,
    seed: int,
    pairs=POLICY_PAIRS,
    exact_upto: int = 0,
    timing: bool = False,
    distribution: str = "plane-uniform",
    threads: int | None = None,
) -> list:
    if nmin > nmax:
        raise ValueError(f"nmin={nmin} exceeds nmax={nmax}")
    if nmin < 3:
        raise ValueError("nmin must be >= 3 so that every cap policy exceeds 1")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    pairs = _check_pairs(pairs)
    threads = thread_limit() if threads is None else threads
    args = [(n, samples, seed, pairs, exact_upto, timing, distribution) for n in range(nmin, nmax + 1)]
    rows = []
    if threads <= 1 or len(args) == 1:
        for a in args:
            rows.extend(simulate_n(*a))
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(_simulate_args, args):
                rows.extend(part)
    rows.sort(key=SimulationRow.sort_key)
    return rows


def _simulate_args(a):
    return simulate_n(*a)


def write_csv(rows, fh=None) -> str | None:
    """Write rows with the fixed header; LF line endings."""
    out = io.StringIO() if fh is None else fh
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.as_csv())
    return out.getvalue() if fh is None else None


def quadratic_fit(xs, ys) -> list | None:
    """Least-squares ``[a, b, c]`` for a*n^2 + b*n + c; None with < 3 points."""
    if len(set(xs)) < 3:
        return None
    return [float(c) for c in np.polyfit(np.asarray(xs, float), np.asarray(ys, float), 2)]


def summarize(rows, meta: dict | None = None) -> dict:
    """Per-n means and maxima for every policy pair, plus quadratic fits."""
    series: dict = {}
    for r in rows:
        series.setdefault(r.cl + r.cr, {}).setdefault(r.n, []).append(r.bound)
    out = {
        "version": __version__,
        "rng": RNG_RULE,
        "numpy": np.__version__,
        "reference": {"ll_mean_n2": REFERENCE_MEAN_N2, "ll_max_n2": REFERENCE_MAX_N2},
        "series": {},
    }
    if meta:
        out.update(meta)
    for pair in POLICY_PAIRS:
        if pair not in series:
            continue
        ns = sorted(series[pair])
        means = [float(np.mean(series[pair][n])) for n in ns]
        maxes = [int(max(series[pair][n])) for n in ns]
        out["series"][pair] = {
            "n": ns,
            "mean": means,
            "max": maxes,
            "fit_mean": quadratic_fit(ns, means),
            "fit_max": quadratic_fit(ns, maxes),
        }
    return out
