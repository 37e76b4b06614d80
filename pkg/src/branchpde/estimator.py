"""Monte Carlo aggregation of the path functional over independent trees.

The sample mean of the functional over trees started at (t, x) with a given
code estimates the corresponding component of the PDE solution.  Sample i
always uses RNG substream (seed, i), so results are bit-identical for any
worker count; workers only partition the index range.
"""

from __future__ import annotations

import csv
import logging
import math
import multiprocessing
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .lifetimes import LifetimeModel, validate_assumption_h
from .mechanism import Code
from .tree import CapExceeded, Caps, evaluate_functional, sample_tree

log = logging.getLogger("branchpde")


class AssumptionHViolated(RuntimeError):
    """The lifetime model fails the positivity/survival-domination check."""


class AllSamplesCapped(RuntimeError):
    """Every sampled tree hit the caps; no estimate can be formed."""


@dataclass(frozen=True)
class CodeOracle:
    """Evaluator of terminal code values: (code, point) -> the normalized
    derivative alpha!^{-1} d^alpha phi(x) (j=-1) or
    alpha!^{-1} d^alpha [f^{(j)}(phi)](x) (j>=0)."""

    evaluator: Callable[[Code, Sequence[float]], float]

    def __call__(self, code: Code, x) -> float:
        return self.evaluator(code, x)


@dataclass(frozen=True)
class ProblemSetup:
    """What the estimator needs: a code oracle, a lifetime model, and d."""

    oracle: CodeOracle
    model: LifetimeModel
    d: int


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float
    n_samples: int
    n_capped: int
    elapsed: float


def _sample_values(
    setup: ProblemSetup,
    c: Code,
    t: float,
    x,
    T: float,
    indices: range,
    seed: int,
    caps: Caps,
) -> tuple[np.ndarray, int]:
    values = np.empty(len(indices))
    m = 0
    capped = 0
    for i in indices:
        try:
            tree = sample_tree(c, t, x, T, setup.model, setup.d, seed, i, caps)
        except CapExceeded:
            capped += 1
            continue
        values[m] = evaluate_functional(tree, setup.oracle, setup.model, T)
        m += 1
    return values[:m], capped


_FORK_JOB = None  # set in the parent right before forking workers


def _fork_chunk(bounds: tuple[int, int]) -> tuple[np.ndarray, int]:
    setup, c, t, x, T, seed, caps = _FORK_JOB
    return _sample_values(setup, c, t, x, T, range(*bounds), seed, caps)


def estimate_u(
    c: Code,
    t: float,
    x,
    T: float,
    setup: ProblemSetup,
    n: int,
    seed: int,
    caps: Caps = Caps(),
    workers: int = 1,
) -> Estimate:
    """Sample mean and standard error of the functional over n trees.

    Capped samples are excluded from the mean and reported in n_capped
    (truncating them instead would bias silently).  Aggregation uses numpy
    pairwise summation, so the result does not depend on chunking.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    start = time.perf_counter()
    report = validate_assumption_h(setup.model, T if T > t else max(T, 1e-12))
    if not report.ok:
        raise AssumptionHViolated("; ".join(report.failures))
    if t == T:
        # degenerate: no tree, the estimate is the terminal oracle value
        value = setup.oracle(c, tuple(float(v) for v in x))
        return Estimate(value, 0.0, n, 0, time.perf_counter() - start)

    if workers > 1:
        chunks = _split_range(n, workers)
        global _FORK_JOB
        _FORK_JOB = (setup, c, t, tuple(float(v) for v in x), T, seed, caps)
        try:
            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(workers) as pool:
                parts = pool.map(_fork_chunk, chunks)
        except ValueError:
            log.warning("fork start method unavailable; running sequentially")
            parts = [_fork_chunk(ch) for ch in chunks]
        finally:
            _FORK_JOB = None
        values = np.concatenate([p[0] for p in parts])
        capped = sum(p[1] for p in parts)
    else:
        values, capped = _sample_values(
            setup, c, t, tuple(float(v) for v in x), T, range(n), seed, caps
        )

    if values.size == 0:
        raise AllSamplesCapped(f"all {n} samples exceeded caps {caps}")
    mean = float(np.sum(values)) / values.size
    if values.size >= 2:
        var = float(np.sum((values - mean) ** 2)) / (values.size - 1)
        se = math.sqrt(var / values.size)
    else:
        se = float("inf")
    return Estimate(mean, se, n, capped, time.perf_counter() - start)


def _split_range(n: int, workers: int) -> list[tuple[int, int]]:
    step = (n + workers - 1) // workers
    return [(lo, min(lo + step, n)) for lo in range(0, n, step)]


def estimate_grid(
    c: Code,
    points: Sequence[tuple[float, Sequence[float]]],
    T: float,
    setup: ProblemSetup,
    n: int,
    seed: int,
    caps: Caps = Caps(),
    workers: int = 1,
    seed_offsets: Optional[Sequence[int]] = None,
) -> list[tuple[float, tuple, Estimate]]:
    """Batched estimate over (t, x) rows with shared configuration.

    Row k uses seed + seed_offsets[k] (all offsets default to 0, so identical
    rows produce identical estimates).  A failing row is recorded as None and
    does not stop the batch.
    """
    if seed_offsets is None:
        seed_offsets = [0] * len(points)
    if len(seed_offsets) != len(points):
        raise ValueError("seed_offsets must match points")
    out = []
    for (t, x), off in zip(points, seed_offsets):
        try:
            est = estimate_u(c, t, x, T, setup, n, seed + off, caps, workers)
        except (AssumptionHViolated, AllSamplesCapped) as exc:
            log.error("grid row (t=%s, x=%s) failed: %s", t, x, exc)
            est = None
        out.append((t, tuple(float(v) for v in x), est))
    return out


def median_of_means(
    c: Code,
    t: float,
    x,
    T: float,
    setup: ProblemSetup,
    n: int,
    groups: int,
    seed: int,
    caps: Caps = Caps(),
) -> Estimate:
    """Median of per-group means over a contiguous partition of the sample
    index range; heavy-tail mitigation for the product functional.

    groups=1 reduces to the plain mean.  The reported std_error is the
    asymptotic median factor sqrt(pi/2) times the spread of group means; it
    is a diagnostic, not a guarantee.
    """
    if groups < 1 or (groups > 1 and (groups % 2 == 0 or groups < 3)):
        raise ValueError("groups must be 1 or an odd integer >= 3")
    start = time.perf_counter()
    if t == T or groups == 1:
        est = estimate_u(c, t, x, T, setup, n, seed, caps)
        return Estimate(
            est.mean, est.std_error, est.n_samples, est.n_capped,
            time.perf_counter() - start,
        )
    bounds = _split_range(n, groups)
    means = []
    capped = 0
    report = validate_assumption_h(setup.model, T)
    if not report.ok:
        raise AssumptionHViolated("; ".join(report.failures))
    for lo, hi in bounds:
        values, c_ = _sample_values(
            setup, c, t, tuple(float(v) for v in x), T, range(lo, hi), seed, caps
        )
        capped += c_
        if values.size == 0:
            raise AllSamplesCapped(f"group {lo}:{hi} entirely capped")
        means.append(float(np.sum(values)) / values.size)
    med = float(np.median(means))
    if len(means) >= 2:
        se = math.sqrt(math.pi / 2) * float(np.std(means, ddof=1)) / math.sqrt(len(means))
    else:
        se = float("inf")
    return Estimate(med, se, n, capped, time.perf_counter() - start)


def write_csv(
    fileobj,
    rows: Sequence[tuple[float, tuple, Optional[Estimate]]],
    code: Code,
    n: int,
    seed: int,
    seed_offsets: Optional[Sequence[int]] = None,
) -> None:
    """CSV columns: t, x_1..x_d, code_alpha, code_j, mean, std_error, n,
    n_capped, seed."""
    d = len(rows[0][1]) if rows else 0
    writer = csv.writer(fileobj, lineterminator="\n")
    writer.writerow(
        ["t"] + [f"x_{i+1}" for i in range(d)]
        + ["code_alpha", "code_j", "mean", "std_error", "n", "n_capped", "seed"]
    )
    offsets = seed_offsets if seed_offsets is not None else [0] * len(rows)
    alpha_txt = "|".join(str(a) for a in code.alpha)
    for (t, x, est), off in zip(rows, offsets):
        base = [repr(float(t))] + [repr(float(v)) for v in x] + [alpha_txt, code.j]
        if est is None:
            writer.writerow(base + ["nan", "nan", n, n, seed + off])
        else:
            writer.writerow(
                base
                + [repr(est.mean), repr(est.std_error), est.n_samples,
                   est.n_capped, seed + off]
            )
