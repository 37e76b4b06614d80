import math
from fractions import Fraction

import numpy as np
import pytest

from branchpde.lifetimes import exponential_model
from branchpde.mechanism import Code, offspring_prob, offspring_set
from branchpde.estimator import CodeOracle
from branchpde import stability
from branchpde.tree import (
    BranchRecord,
    CapExceeded,
    Caps,
    TreeSample,
    WeightSpec,
    branch_rng,
    dominating_weighted_progeny,
    dump_jsonl,
    evaluate_functional,
    sample_dominating_tree,
    sample_tree,
    total_progeny,
    weighted_progeny,
)

MODEL = exponential_model(1.0)


def test_root_survival_single_branch():
    # find a sample whose root outlives the horizon
    T = 0.05
    for i in range(50):
        tree = sample_tree(Code((0,), -1), 0.0, (0.3,), T, MODEL, 1, seed=1, sample_index=i)
        if len(tree) == 1:
            rec = tree.branches[0]
            assert rec.death_time > T
            assert rec.terminal_position is not None
            assert tree.survived_labels == ((),)
            return
    pytest.fail("no surviving root found in 50 samples")


def test_pure_derivative_death_spawns_single_child():
    # horizon of two mean lifetimes makes root deaths common; the unique
    # child of (alpha,-1) is (alpha,0)
    T = 2.0
    for i in range(200):
        tree = sample_tree(
            Code((2,), -1), 0.0, (0.0,), T, MODEL, 1, seed=5, sample_index=i,
            caps=Caps(max_branches=100_000, max_generation=500),
        )
        root = tree.branches[0] if tree.branches[0].label == () else None
        assert root is not None
        if root.death_time <= T:
            children = [r for r in tree.branches if len(r.label) == 1]
            assert len(children) == 1
            assert children[0].code == Code((2,), 0)
            assert children[0].birth_time == root.death_time
            assert children[0].birth_position == root_position_at_death(tree)
            return
    pytest.fail("root never died")


def root_position_at_death(tree):
    child = next(r for r in tree.branches if len(r.label) == 1)
    return child.birth_position


def test_composition_codes_spawn_two_children():
    T = 3.0
    seen_split = False
    for i in range(100):
        tree = sample_tree(
            Code((1,), 0), 0.0, (0.0,), T, MODEL, 1, seed=9, sample_index=i,
            caps=Caps(max_branches=100_000, max_generation=400),
        )
        for rec in tree.branches:
            if rec.offspring_entry is not None and rec.code.j >= 0:
                labels = {r.label for r in tree.branches}
                assert rec.label + (1,) in labels and rec.label + (2,) in labels
                seen_split = True
    assert seen_split


def test_reproducibility_bit_identical():
    a = sample_tree(Code((1,), 0), 0.0, (0.5,), 1.0, MODEL, 1, seed=42, sample_index=7)
    b = sample_tree(Code((1,), 0), 0.0, (0.5,), 1.0, MODEL, 1, seed=42, sample_index=7)
    assert a == b
    c = sample_tree(Code((1,), 0), 0.0, (0.5,), 1.0, MODEL, 1, seed=43, sample_index=7)
    assert a != c


def test_branch_rng_streams_are_independent_of_sampling_order():
    g1 = branch_rng(10, 3, (1, 2))
    g2 = branch_rng(10, 3, (1, 2))
    assert g1.random() == g2.random()
    assert branch_rng(10, 3, (1,)).random() != branch_rng(10, 3, (2,)).random()


def test_cap_exceeded():
    with pytest.raises(CapExceeded):
        # supercritical: horizon much longer than mean lifetime, tiny cap
        for i in range(50):
            sample_tree(
                Code((0,), 0), 0.0, (0.0,), 50.0, MODEL, 1, seed=3, sample_index=i,
                caps=Caps(max_branches=16, max_generation=200),
            )


def test_functional_single_survivor():
    # single survived root coded Id with phi = 1: H = 1/survival(T - t)
    T = 0.2
    oracle = CodeOracle(lambda code, x: 1.0 if code == Code((0,), -1) else 0.0)
    for i in range(50):
        tree = sample_tree(Code((0,), -1), 0.0, (0.0,), T, MODEL, 1, seed=8, sample_index=i)
        if len(tree) == 1:
            h = evaluate_functional(tree, oracle, MODEL, T)
            assert h == pytest.approx(1.0 / MODEL.survival(T))
            return
    pytest.fail("no surviving root found")


def test_functional_depth_one_unroll():
    # hand-built depth-1 tree: root (j=0) dies at s, both children survive
    d = 1
    c0 = Code((0,), 0)
    entries = offspring_set(c0, d)
    entry = entries[0]  # kind 0: children (0,0) and (0,1), weight 1
    s, T = 0.3, 0.5
    root = BranchRecord((), c0, 0.0, s, (0.0,), None, entry)
    ch1 = BranchRecord((1,), entry.children[0], s, T + 1.0, (0.1,), (0.2,), None)
    ch2 = BranchRecord((2,), entry.children[1], s, T + 2.0, (0.1,), (-0.3,), None)
    tree = TreeSample(
        branches=(root, ch1, ch2),
        survived_labels=((1,), (2,)),
        died_labels=((),),
        generation_counts={0: 1, 1: 2},
    )
    values = {(Code((0,), 0), (0.2,)): 1.7, (Code((0,), 1), (-0.3,)): -0.4}
    oracle = CodeOracle(lambda code, x: values[(code, tuple(x))])
    q = float(offspring_prob(c0, entry, d))
    expected = (
        float(entry.weight)
        / (MODEL.density(s) * q)
        * 1.7
        / MODEL.survival(T - s)
        * (-0.4)
        / MODEL.survival(T - s)
    )
    assert evaluate_functional(tree, oracle, MODEL, T) == pytest.approx(expected)


def test_functional_mean_is_one_for_zero_nonlinearity():
    # f = 0, phi = 1: the solution is constant 1
    def oracle_fn(code, x):
        if code.j >= 0:
            return 0.0
        return 1.0 if sum(code.alpha) == 0 else 0.0

    oracle = CodeOracle(oracle_fn)
    T, n = 0.3, 4000
    total = 0.0
    sq = 0.0
    for i in range(n):
        tree = sample_tree(Code((0,), -1), 0.0, (0.0,), T, MODEL, 1, seed=21, sample_index=i)
        h = evaluate_functional(tree, oracle, MODEL, T)
        total += h
        sq += h * h
    mean = total / n
    se = math.sqrt((sq / n - mean * mean) / n)
    assert abs(mean - 1.0) <= 3.0 * se


def test_dominating_tree_progeny_odd_and_survival():
    lam, T = 1.0, 0.7
    n = 4000
    survived_roots = 0
    for i in range(n):
        tree = sample_dominating_tree((1,), 0, 0.0, T, lam, 1, seed=11, sample_index=i)
        assert total_progeny(tree) % 2 == 1
        if len(tree) == 1:
            survived_roots += 1
    p = math.exp(-lam * T)
    se = math.sqrt(p * (1 - p) / n)
    assert abs(survived_roots / n - p) <= 4.0 * se


def test_total_progeny_small_trees():
    # no branching -> 1; one branching -> 3 (binary chain)
    seen = set()
    for i in range(300):
        tree = sample_dominating_tree((0,), 0, 0.0, 0.5, 1.0, 1, seed=2, sample_index=i)
        seen.add(total_progeny(tree))
    assert 1 in seen and 3 in seen
    assert all(v % 2 == 1 for v in seen)


def test_progeny_law_small():
    lam, horizon = 1.0, math.log(2.0)
    n = 20_000
    counts = {}
    for i in range(n):
        tree = sample_dominating_tree((0,), 0, 0.0, horizon, lam, 1, seed=77, sample_index=i)
        counts[total_progeny(tree)] = counts.get(total_progeny(tree), 0) + 1
    assert all(k % 2 == 1 for k in counts)
    for m in range(5):
        emp = counts.get(2 * m + 1, 0) / n
        assert abs(emp - 0.5 ** (m + 1)) <= 0.02


def unit_weights():
    return WeightSpec(
        sigma_boundary=lambda a, j: 1.0, sigma_inner=lambda a, j, k: 1.0, kappa=1.0
    )


def test_weighted_progeny_unit_weights():
    tree = sample_tree(Code((1,), 0), 0.0, (0.0,), 1.0, MODEL, 1, seed=4, sample_index=0)
    assert weighted_progeny(tree, unit_weights()) == 1.0


def test_weighted_progeny_single_survivor_and_depth_one():
    w = WeightSpec(
        sigma_boundary=lambda a, j: 2.0 + sum(a) + 0.1 * (j + 1),
        sigma_inner=lambda a, j, k: 1.5 + k,
        kappa=1.0,
    )
    c0 = Code((2,), 3)
    root_only = TreeSample(
        branches=(BranchRecord((), c0, 0.0, 9.9, (0.0,), (0.1,), None),),
        survived_labels=((),),
        died_labels=(),
        generation_counts={0: 1},
    )
    assert weighted_progeny(root_only, w) == pytest.approx(w.sigma_boundary((2,), 3))

    entries = offspring_set(c0, 1)
    entry = entries[1]  # kind 0, beta=(1,): children (1,0) and (1,4)
    assert entry.kind == 0 and entry.beta == (1,)
    tree = TreeSample(
        branches=(
            BranchRecord((), c0, 0.0, 0.3, (0.0,), None, entry),
            BranchRecord((1,), entry.children[0], 0.3, 9.9, (0.0,), (0.0,), None),
            BranchRecord((2,), entry.children[1], 0.3, 9.9, (0.0,), (0.0,), None),
        ),
        survived_labels=((1,), (2,)),
        died_labels=((),),
        generation_counts={0: 1, 1: 2},
    )
    expected = (
        w.sigma_inner((2,), 3, 0)
        * w.sigma_boundary((1,), 0)
        * w.sigma_boundary((1,), 4)
    )
    assert weighted_progeny(tree, w) == pytest.approx(expected)


def _survival_curve(values, grid):
    values = np.sort(np.asarray(values))
    return np.array([np.mean(values > g) for g in grid])


def test_stochastic_dominance_of_weighted_progeny():
    # survival of N on the original tree sits below survival of N~ on the
    # dominating chain at 20 pooled quantiles, up to two-sample 99% DKW bands
    lam, T = 1.0, 0.1
    p = stability.GrowthParams(
        regime=stability.Factorial(theta=Fraction(1), r=Fraction(1)),
        delta1=Fraction(1),
        delta2=Fraction(1),
        lam=lam,
        T=T,
        d=1,
    )
    assert stability.verify_weight_dominance_algebra(p, alphamax=4, jmax=2)
    w = p.build_weights()
    n = 8000
    for alpha, j in (((0,), 0), ((1,), 0)):
        n_vals = []
        for i in range(n):
            tree = sample_tree(
                Code(alpha, j), 0.0, (0.0,), T, MODEL, 1, seed=100, sample_index=i
            )
            n_vals.append(weighted_progeny(tree, w))
        nt_vals = []
        for i in range(n):
            tree = sample_dominating_tree(alpha, j, 0.0, T, lam, 1, seed=200, sample_index=i)
            nt_vals.append(dominating_weighted_progeny(tree, w))
        pooled = np.concatenate([n_vals, nt_vals])
        grid = np.quantile(pooled, np.linspace(0.02, 0.98, 20))
        eps = 2.0 * math.sqrt(math.log(2.0 / 0.01) / (2.0 * n))
        s_orig = _survival_curve(n_vals, grid)
        s_dom = _survival_curve(nt_vals, grid)
        assert np.all(s_orig <= s_dom + eps)


def test_dump_jsonl_roundtrip():
    import io
    import json

    tree = sample_tree(Code((1,), 0), 0.0, (0.0,), 1.0, MODEL, 1, seed=4, sample_index=1)
    buf = io.StringIO()
    dump_jsonl(tree, buf)
    lines = buf.getvalue().strip().split("\n")
    assert len(lines) == len(tree)
    first = json.loads(lines[0])
    assert first["label"] == []
    assert first["alpha"] == [1] and first["j"] == 0
