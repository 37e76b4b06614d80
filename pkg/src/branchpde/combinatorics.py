"""Stirling numbers, Bell polynomials, Fuss-Catalan numbers and the exact
identities used by the growth analysis.

Integer-valued results are exact; `fuss_catalan` and `log_gamma_ratio` are
the only float paths.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Sequence


@lru_cache(maxsize=None)
def _stirling2_rec(m: int, k: int) -> int:
    if k > m or k < 0:
        return 0
    if m == 0:
        return 1
    if k == 0:
        return 0
    return k * _stirling2_rec(m - 1, k) + _stirling2_rec(m - 1, k - 1)


def stirling2(m: int, k: int) -> int:
    """Stirling number of the second kind S(m, k), exact.

    Recursion S(m+1, k) = k S(m, k) + S(m, k-1) with S(0,0)=1,
    S(m,0)=0 for m>=1.
    """
    if m < 0 or k < 0 or k > m:
        raise ValueError(f"need 0 <= k <= m, got m={m}, k={k}")
    return _stirling2_rec(m, k)


def bell_partial(m: int, k: int, x: Sequence[float]):
    """Partial exponential Bell polynomial B_{m,k}(x_1, ..., x_{m-k+1}).

    Recursion over the first block containing element 1:
    B_{m,k} = sum_j C(m-1, j-1) x_j B_{m-j,k-1}.
    """
    if not (1 <= k <= m):
        raise ValueError(f"need 1 <= k <= m, got m={m}, k={k}")
    if len(x) < m - k + 1:
        raise ValueError(f"need at least {m - k + 1} arguments, got {len(x)}")

    table = {(0, 0): 1}

    def b(mm, kk):
        if kk == 0:
            return 1 if mm == 0 else 0
        if mm < kk:
            return 0
        key = (mm, kk)
        if key not in table:
            table[key] = sum(
                math.comb(mm - 1, j - 1) * x[j - 1] * b(mm - j, kk - 1)
                for j in range(1, mm - kk + 2)
            )
        return table[key]

    return b(m, k)


def bell_complete(m: int, x: Sequence[float]):
    """Complete exponential Bell polynomial B_m = sum_k B_{m,k}."""
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if len(x) < m:
        raise ValueError(f"need at least {m} arguments, got {len(x)}")
    return sum(bell_partial(m, k, x) for k in range(1, m + 1))


def generalized_binomial(s: float, k: int) -> float:
    """binom(s, k) = s(s-1)...(s-k+1)/k! for real s, integer k >= 0.

    Product form of the Gamma-ratio convention Gamma(s+1)/(Gamma(k+1)
    Gamma(s-k+1)); valid for negative s where the Gamma form has poles.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    out = 1.0
    for i in range(k):
        out *= (s - i) / (i + 1)
    return out


def fuss_catalan(k: int, p: float, r: float) -> float:
    """Fuss-Catalan number F_k(p, r) = (r/k) binom(kp + r - 1, k - 1)."""
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    return r / k * generalized_binomial(k * p + r - 1, k - 1)


def polylog_neg_half(m: int) -> int:
    """Li_{-m}(1/2) via two independent Stirling sums, exact.

    Computes both sum_{k=0}^{m} k! S(m+1, k+1) and 2 sum_{k=1}^{m} k! S(m, k)
    and raises if they disagree (that would be an implementation bug).
    """
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    a = sum(math.factorial(k) * stirling2(m + 1, k + 1) for k in range(m + 1))
    b = 2 * sum(math.factorial(k) * stirling2(m, k) for k in range(1, m + 1))
    if a != b:
        raise AssertionError(f"polylog Stirling sums disagree at m={m}: {a} != {b}")
    return a


def tree_identity_check(k: int) -> bool:
    """Check sum_l C(k,l) (l+1)^(l-1) (k-l+1)^(k-l-1) == 2 (k+2)^(k-1), exact.

    The l=0 and l=k terms (and the right side at k=0) involve 1^(-1) and
    2^(-1); Fractions keep those exact.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    lhs = sum(
        Fraction(math.comb(k, l))
        * Fraction(l + 1) ** (l - 1)
        * Fraction(k - l + 1) ** (k - l - 1)
        for l in range(k + 1)
    )
    rhs = 2 * Fraction(k + 2) ** (k - 1)
    return lhs == rhs


def log_gamma_ratio(a: float, b: float) -> float:
    """log(Gamma(a) / Gamma(b)) for a, b > 0, overflow-safe."""
    if a <= 0 or b <= 0:
        raise ValueError(f"need positive arguments, got a={a}, b={b}")
    return math.lgamma(a) - math.lgamma(b)


def gamma_ratio_exact(b: Fraction, n: int) -> Fraction:
    """Gamma(b + n) / Gamma(b) = b (b+1) ... (b+n-1), exact for rational b."""
    if n < 0:
        raise ValueError("n must be >= 0")
    out = Fraction(1)
    for i in range(n):
        out *= b + i
    return out


def pochhammer_falling(m: int, r) -> Fraction:
    """(m + r - 1)_m = (r)(r+1)...(r+m-1), the growth factor prod_{l<m}(r+l)."""
    out = Fraction(1)
    for l in range(m):
        out *= r + l
    return out
