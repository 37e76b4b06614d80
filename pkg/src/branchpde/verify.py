"""Built-in consistency suite behind `branchpde verify`: exact identities,
recursion/closed-form equivalence, dominance, and a reduced end-to-end
solve, sized to finish in a couple of minutes.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .combinatorics import polylog_neg_half, tree_identity_check
from .estimator import ProblemSetup, estimate_u
from .lifetimes import exponential_model
from .mechanism import Code, offspring_prob, offspring_set
from .multiindex import mi_abs, mi_enumerate_below
from . import problems, progeny, stability
from .tree import dominating_weighted_progeny, sample_dominating_tree, total_progeny


def _check_identities(fault: bool) -> bool:
    ok = all(tree_identity_check(k) for k in range(16))
    ok = ok and all(polylog_neg_half(m) > 0 for m in range(1, 16))
    if fault:
        ok = False
    return ok


def _check_offspring_normalization() -> bool:
    from itertools import product as iproduct

    for d in (1, 2, 3):
        for alpha in iproduct(range(3), repeat=d):
            if mi_abs(alpha) > 4:
                continue
            c = Code(alpha, 0)
            total = sum(offspring_prob(c, e, d) for e in offspring_set(c, d))
            if total != 1:
                return False
    return True


def _check_recursion_equivalence() -> bool:
    theta = r = Fraction(1)
    for d in (1, 2):
        g = progeny.g_factorial(theta, r)
        for m in range(1, 4):
            alpha = (m,) + (0,) * (d - 1)
            table = progeny.ahat_recursion(g, d, alpha, 4)
            for k in range(5):
                if table.values[(alpha, k)] != progeny.ahat_closed_factorial(
                    theta, r, d, alpha, k
                ):
                    return False
    return True


def _check_radius() -> bool:
    a199 = progeny.ahat_closed_factorial(Fraction(1), Fraction(1), 1, (1,), 199)
    a200 = progeny.ahat_closed_factorial(Fraction(1), Fraction(1), 1, (1,), 200)
    ratio = float(a199 / a200)
    return abs(ratio - 2.0 / 27.0) / (2.0 / 27.0) < 0.05


def _check_progeny_law() -> bool:
    lam, horizon = 1.0, math.log(2.0)
    n = 20_000
    counts: dict[int, int] = {}
    for i in range(n):
        tree = sample_dominating_tree((0,), 0, 0.0, horizon, lam, 1, seed=77, sample_index=i)
        size = total_progeny(tree)
        counts[size] = counts.get(size, 0) + 1
    if any(k % 2 == 0 for k in counts):
        return False
    for m in range(5):
        emp = counts.get(2 * m + 1, 0) / n
        if abs(emp - 0.5**(m + 1)) > 0.02:
            return False
    return True


def _check_dominance_series() -> bool:
    p = stability.GrowthParams(
        regime=stability.Factorial(theta=Fraction(3, 2), r=Fraction(1)),
        delta1=Fraction(1),
        delta2=Fraction(1),
        lam=1.0,
        T=0.1,
        d=1,
    )
    w = p.build_weights()
    table = progeny.a_recursion(w, 1, (1,), 0, 4, collapse_j=True)
    g = progeny.g_factorial(Fraction(3, 2), Fraction(1))
    that = progeny.ahat_recursion(g, 1, (1,), 4)
    return all(
        table.values[((1,), k)] <= that.values[((1,), k)] for k in range(5)
    )


def _check_b2_solve() -> bool:
    T = 0.1
    problem = problems.b2_problem(T)
    setup = ProblemSetup(oracle=problem.oracle, model=exponential_model(1.0), d=1)
    est = estimate_u(Code((0,), -1), 0.0, (0.0,), T, setup, n=20_000, seed=123)
    exact = problem.exact_solution(0.0, (0.0,))
    return abs(est.mean - exact) <= 4.0 * est.std_error


def _check_mild_solution() -> bool:
    problem = problems.b2_problem(0.1)
    return problems.mild_solution_check(problem, Code((0,), -1), 0.0, (0.0,)) <= 5e-4


def run_suite(fault: bool = False) -> list[tuple[str, bool]]:
    checks = [
        ("exact-identities", lambda: _check_identities(fault)),
        ("offspring-normalization", _check_offspring_normalization),
        ("recursion-closed-form", _check_recursion_equivalence),
        ("radius-ratio", _check_radius),
        ("total-progeny-law", _check_progeny_law),
        ("series-domination", _check_dominance_series),
        ("mild-solution", _check_mild_solution),
        ("b2-end-to-end", _check_b2_solve),
    ]
    results = []
    for name, fn in checks:
        try:
            results.append((name, bool(fn())))
        except Exception:  # a crash is a failure, not an abort
            results.append((name, False))
    return results
