"""Sampling of the coded branching diffusion and of the binary dominating
chain; evaluation of the path functional and of multiplicative weighted
progenies.

Reproducibility contract: every branch draws from its own generator derived
from (seed, sample_index, label) via SeedSequence spawn keys, so the tree is
a pure function of those values regardless of traversal or worker order.
Per-branch draw order is: lifetime uniform, displacement normals (spatial
trees only), offspring uniform.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .lifetimes import LifetimeModel
from .mechanism import (
    Code,
    MechanismEntry,
    dominating_offspring_prob,
    offspring_prob,
    sample_dominating_offspring,
    sample_offspring,
)

Label = tuple[int, ...]


class CapExceeded(RuntimeError):
    """Tree grew past the configured caps; the sample must be discarded."""


@dataclass(frozen=True)
class Caps:
    max_branches: int = 10**6
    max_generation: int = 200


@dataclass(frozen=True)
class BranchRecord:
    label: Label
    code: Code
    birth_time: float
    death_time: float                    # > T means the branch survived to T
    birth_position: Optional[tuple[float, ...]]
    terminal_position: Optional[tuple[float, ...]]  # present iff survived
    offspring_entry: Optional[MechanismEntry]       # present iff died <= T

    @property
    def generation(self) -> int:
        return len(self.label)


@dataclass(frozen=True)
class TreeSample:
    branches: tuple[BranchRecord, ...]
    survived_labels: tuple[Label, ...]
    died_labels: tuple[Label, ...]
    generation_counts: dict[int, int]

    def __len__(self) -> int:
        return len(self.branches)


@dataclass(frozen=True)
class WeightSpec:
    """Positive weights attached to branches: sigma_boundary(alpha, j>=-1)
    for branches alive at the horizon, sigma_inner(alpha, j, kind) for
    branches that split, and the boundary inflation kappa >= 1 used by the
    dominating chain."""

    sigma_boundary: Callable[[tuple, int], float]
    sigma_inner: Callable[[tuple, int, int], float]
    kappa: float = 1.0

    def boundary_dominating(self, alpha, j) -> float:
        return self.kappa * self.sigma_boundary(alpha, j)


def branch_rng(seed: int, sample_index: int, label: Label) -> np.random.Generator:
    """Independent substream for one branch of one sample, counter-derived."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(sample_index,) + label)
    return np.random.Generator(np.random.PCG64(ss))


def _finish(records: list[BranchRecord], T: float) -> TreeSample:
    records.sort(key=lambda r: r.label)
    survived = tuple(r.label for r in records if r.death_time > T)
    died = tuple(r.label for r in records if r.death_time <= T)
    gens: dict[int, int] = {}
    for r in records:
        gens[r.generation] = gens.get(r.generation, 0) + 1
    return TreeSample(
        branches=tuple(records),
        survived_labels=survived,
        died_labels=died,
        generation_counts=gens,
    )


def sample_tree(
    c0: Code,
    t: float,
    x: Sequence[float],
    T: float,
    model: LifetimeModel,
    d: int,
    seed: int,
    sample_index: int = 0,
    caps: Caps = Caps(),
) -> TreeSample:
    """Sample one coded branching diffusion on [t, T] started at (t, x, c0).

    A branch dying at s <= T spawns the children of its sampled offspring
    entry at its death position; a branch alive at T records its terminal
    position.  Per-coordinate displacement variance equals elapsed time.
    """
    if not 0 <= t <= T:
        raise ValueError(f"need 0 <= t <= T, got t={t}, T={T}")
    if len(x) != d:
        raise ValueError(f"start point has dimension {len(x)}, expected {d}")
    records: list[BranchRecord] = []
    stack: list[tuple[Label, Code, float, tuple[float, ...]]] = [
        ((), c0, t, tuple(float(v) for v in x))
    ]
    while stack:
        label, code, birth, pos = stack.pop()
        if len(label) > caps.max_generation:
            raise CapExceeded(f"generation cap {caps.max_generation} exceeded")
        if len(records) >= caps.max_branches:
            raise CapExceeded(f"branch cap {caps.max_branches} exceeded")
        rng = branch_rng(seed, sample_index, label)
        tau = model.inverse_cdf(rng.random())
        death = birth + tau
        if death > T:
            disp = rng.standard_normal(d) * math.sqrt(T - birth)
            records.append(
                BranchRecord(
                    label=label,
                    code=code,
                    birth_time=birth,
                    death_time=death,
                    birth_position=pos,
                    terminal_position=tuple(p + dv for p, dv in zip(pos, disp)),
                    offspring_entry=None,
                )
            )
        else:
            disp = rng.standard_normal(d) * math.sqrt(tau)
            dpos = tuple(p + dv for p, dv in zip(pos, disp))
            entry = sample_offspring(code, d, rng.random())
            records.append(
                BranchRecord(
                    label=label,
                    code=code,
                    birth_time=birth,
                    death_time=death,
                    birth_position=pos,
                    terminal_position=None,
                    offspring_entry=entry,
                )
            )
            for k, child in enumerate(entry.children, start=1):
                stack.append((label + (k,), child, death, dpos))
    return _finish(records, T)


def sample_dominating_tree(
    alpha: tuple,
    j: int,
    t: float,
    T: float,
    lam: float,
    d: int,
    seed: int,
    sample_index: int = 0,
    caps: Caps = Caps(),
) -> TreeSample:
    """Sample the binary dominating chain: exponential(lam) lifetimes, every
    death spawns exactly two children, no spatial component."""
    if not 0 <= t <= T:
        raise ValueError(f"need 0 <= t <= T, got t={t}, T={T}")
    if j < 0:
        raise ValueError("dominating chain codes have j >= 0")
    records: list[BranchRecord] = []
    stack: list[tuple[Label, Code, float]] = [((), Code(tuple(alpha), j), t)]
    while stack:
        label, code, birth = stack.pop()
        if len(label) > caps.max_generation:
            raise CapExceeded(f"generation cap {caps.max_generation} exceeded")
        if len(records) >= caps.max_branches:
            raise CapExceeded(f"branch cap {caps.max_branches} exceeded")
        rng = branch_rng(seed, sample_index, label)
        tau = -math.log1p(-rng.random()) / lam
        death = birth + tau
        if death > T:
            records.append(
                BranchRecord(label, code, birth, death, None, None, None)
            )
        else:
            entry = sample_dominating_offspring(code.alpha, code.j, d, rng.random())
            records.append(
                BranchRecord(label, code, birth, death, None, None, entry)
            )
            for k, child in enumerate(entry.children, start=1):
                stack.append((label + (k,), child, death))
    return _finish(records, T)


def evaluate_functional(tree: TreeSample, oracle, model: LifetimeModel, T: float) -> float:
    """Path functional: product over survived branches of
    oracle(code)(X_T)/rho_bar(T - birth) times, over died branches, of
    z1/(rho(tau) q(entry))."""
    out = 1.0
    for rec in tree.branches:
        if rec.death_time > T:
            value = oracle(rec.code, rec.terminal_position)
            out *= value / model.survival(T - rec.birth_time)
        else:
            tau = rec.death_time - rec.birth_time
            q = offspring_prob(rec.code, rec.offspring_entry, len(rec.code.alpha))
            out *= float(rec.offspring_entry.weight) / (model.density(tau) * float(q))
    return out


def weighted_progeny(tree: TreeSample, w: WeightSpec) -> float:
    """Multiplicative progeny of an original tree: prod of inner weights over
    died branches times boundary weights over survived branches."""
    out = 1.0
    for rec in tree.branches:
        alpha, j = rec.code
        if rec.offspring_entry is None:
            out *= float(w.sigma_boundary(alpha, j))
        else:
            out *= float(w.sigma_inner(alpha, j, rec.offspring_entry.kind))
    return out


def dominating_weighted_progeny(tree: TreeSample, w: WeightSpec) -> float:
    """Multiplicative progeny of a dominating tree, with boundary weights
    inflated by kappa."""
    out = 1.0
    for rec in tree.branches:
        alpha, j = rec.code
        if rec.offspring_entry is None:
            out *= float(w.boundary_dominating(alpha, j))
        else:
            out *= float(w.sigma_inner(alpha, j, rec.offspring_entry.kind))
    return out


def total_progeny(tree: TreeSample) -> int:
    """Number of branches ever alive."""
    return len(tree.branches)


def dump_jsonl(tree: TreeSample, fileobj) -> None:
    """One JSON record per branch: label, code, times, positions, split kind."""
    for rec in tree.branches:
        entry = rec.offspring_entry
        fileobj.write(
            json.dumps(
                {
                    "label": list(rec.label),
                    "alpha": list(rec.code.alpha),
                    "j": rec.code.j,
                    "birth_time": rec.birth_time,
                    "death_time": rec.death_time,
                    "birth_position": list(rec.birth_position)
                    if rec.birth_position is not None
                    else None,
                    "terminal_position": list(rec.terminal_position)
                    if rec.terminal_position is not None
                    else None,
                    "split_kind": entry.kind if entry is not None else None,
                    "split_beta": list(entry.beta) if entry is not None else None,
                }
            )
            + "\n"
        )
