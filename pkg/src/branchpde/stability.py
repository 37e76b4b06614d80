"""Growth-regime analysis: decide whether the branching representation is
integrable on a horizon, build the matching branch-weight presets, compute
maximal horizons, and evaluate explicit bounds.

Two regimes are supported, named by how fast the derivative envelopes of
the terminal data and nonlinearity may grow with the order |alpha|:

  factorial(theta, r):  envelope delta1 theta^{|alpha|} (r)(r+1)...(r+|alpha|-1)
  exponential(theta):   envelope delta1 theta^{|alpha|}
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .combinatorics import bell_complete, pochhammer_falling
from .lifetimes import LifetimeModel
from .mechanism import Code, index_product
from .multiindex import mi_abs, mi_enumerate_below, mi_factorial
from . import progeny
from .tree import WeightSpec


@dataclass(frozen=True)
class Factorial:
    theta: float
    r: float


@dataclass(frozen=True)
class Exponential:
    theta: float


@dataclass(frozen=True)
class GrowthParams:
    """Everything the stability formulas consume.

    The side conditions theta*r >= sqrt(2/d) (resp. theta >= sqrt(2/d)) and
    min(theta^2 r^2, 1) >= 1/((d+1) delta1 delta2) (resp. with theta^2) are
    exposed as booleans and rechecked by check_conditions.
    """

    regime: Factorial | Exponential
    delta1: float
    delta2: float
    lam: float
    T: float
    d: int

    def __post_init__(self):
        if self.delta1 <= 0 or self.delta2 <= 0 or self.lam <= 0 or self.d < 1:
            raise ValueError("need delta1, delta2, lambda > 0 and d >= 1")

    @property
    def regime_name(self) -> str:
        return "factorial" if isinstance(self.regime, Factorial) else "exponential"

    @property
    def theta(self):
        return self.regime.theta

    @property
    def r(self):
        return self.regime.r if isinstance(self.regime, Factorial) else None

    def radius(self) -> float:
        if isinstance(self.regime, Factorial):
            return progeny.radius_factorial(self.regime.theta, self.regime.r, self.d)
        return progeny.radius_exponential(self.regime.theta, self.d)

    def scaled_radius(self) -> float:
        """The horizon-condition threshold: 2^-(r+2) R (factorial), R (exp)."""
        if isinstance(self.regime, Factorial):
            return 2.0 ** (-(float(self.regime.r) + 2)) * self.radius()
        return self.radius()

    def side_condition_theta(self) -> bool:
        lhs = (
            float(self.regime.theta) * float(self.regime.r)
            if isinstance(self.regime, Factorial)
            else float(self.regime.theta)
        )
        return lhs >= math.sqrt(2.0 / self.d)

    def side_condition_delta(self) -> bool:
        th = float(self.regime.theta)
        sq = (th * float(self.regime.r)) ** 2 if isinstance(self.regime, Factorial) else th**2
        return min(sq, 1.0) >= 1.0 / ((self.d + 1) * float(self.delta1) * float(self.delta2))

    def growth_envelope(self, m: int):
        """g(m) = theta^m (r)(r+1)...(r+m-1) / 1 (factorial) or theta^m."""
        th = self.regime.theta
        if isinstance(self.regime, Factorial):
            return th**m * pochhammer_falling(m, self.regime.r)
        return th**m

    def build_weights(self) -> WeightSpec:
        return build_weights(self)


def build_weights(p: GrowthParams) -> WeightSpec:
    """Branch-weight preset matching the growth regime.

    boundary:  (alpha,-1) -> delta1 g(alpha)/alpha!,
               (alpha,j)  -> delta1/(delta2 v 1) g(alpha)/alpha!
    inner:     (alpha,-1) -> delta2 (the single pass-through entry),
               kind 0     -> (d+1) delta2 prod(1+alpha_k),
               kind i     -> (d+1) delta2/12 (2+alpha_i)(3+alpha_i) prod(1+alpha_k)
    kappa = max(1, delta2).

    Arithmetic follows the parameter types: Fraction parameters give exact
    Fraction weights.
    """
    th = p.regime.theta
    rr = p.regime.r if isinstance(p.regime, Factorial) else None
    d1, d2 = p.delta1, p.delta2
    d2v1 = d2 if float(d2) > 1 else (Fraction(1) if isinstance(d2, (int, Fraction)) else 1.0)

    def g_over_factorial(alpha):
        m = mi_abs(alpha)
        poch = pochhammer_falling(m, rr) if rr is not None else 1
        return poch * th**m / Fraction(mi_factorial(alpha))

    def sigma_boundary(alpha, j):
        base = d1 * g_over_factorial(alpha)
        return base if j < 0 else base / d2v1

    def sigma_inner(alpha, j, kind):
        if j < 0:
            if kind != 0:
                raise ValueError("pure-derivative codes only have the kind-0 entry")
            return d2
        prod = index_product(alpha)
        if kind == 0:
            return (p.d + 1) * d2 * prod
        ai = alpha[kind - 1]
        return (p.d + 1) * d2 * (2 + ai) * (3 + ai) * prod / (
            Fraction(12) if isinstance(d2, (int, Fraction)) else 12.0
        )

    kappa = d2 if float(d2) > 1 else (Fraction(1) if isinstance(d2, (int, Fraction)) else 1.0)
    return WeightSpec(sigma_boundary=sigma_boundary, sigma_inner=sigma_inner, kappa=kappa)


@dataclass(frozen=True)
class Condition:
    name: str
    lhs: float
    rhs: float
    passed: bool
    strict: bool  # True when the inequality must be strict


@dataclass(frozen=True)
class ConditionReport:
    conditions: tuple[Condition, ...]
    passed: bool

    def by_name(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)


def check_conditions(p: GrowthParams, model: LifetimeModel) -> ConditionReport:
    """Evaluate the integrability conditions at horizon p.T:

      split-time:  1/rho_*(T) <= delta2
      radius:      (1-exp(-lam T)) delta1 delta2 < 2^-(r+2) R  (factorial)
                                                 < R            (exponential)
      side-theta:  theta r >= sqrt(2/d)   (resp. theta >= sqrt(2/d))
      side-delta:  min((theta r)^2, 1) >= 1/((d+1) delta1 delta2) (resp. theta^2)

    The verdict is the conjunction; each row carries its numbers.
    """
    rho_star = model.rho_star(p.T)
    split = Condition(
        "bound-split-time",
        lhs=math.inf if rho_star == 0 else 1.0 / rho_star,
        rhs=float(p.delta2),
        passed=rho_star > 0 and 1.0 / rho_star <= float(p.delta2),
        strict=False,
    )
    x = (1.0 - math.exp(-p.lam * p.T)) * float(p.delta1) * float(p.delta2)
    radius = Condition(
        "bound-radius",
        lhs=x,
        rhs=p.scaled_radius(),
        passed=x < p.scaled_radius(),
        strict=True,
    )
    th = float(p.regime.theta)
    lhs_theta = th * float(p.regime.r) if isinstance(p.regime, Factorial) else th
    side_theta = Condition(
        "side-theta",
        lhs=lhs_theta,
        rhs=math.sqrt(2.0 / p.d),
        passed=p.side_condition_theta(),
        strict=False,
    )
    sq = lhs_theta**2
    side_delta = Condition(
        "side-delta",
        lhs=min(sq, 1.0),
        rhs=1.0 / ((p.d + 1) * float(p.delta1) * float(p.delta2)),
        passed=p.side_condition_delta(),
        strict=False,
    )
    conditions = (split, radius, side_theta, side_delta)
    return ConditionReport(conditions=conditions, passed=all(c.passed for c in conditions))


@dataclass(frozen=True)
class HorizonReport:
    t_max: float
    lambda_free_envelope: float   # sup over lam of t_max: 2^-(r+2) R


def max_horizon(regime: Factorial, lam: float, d: int) -> HorizonReport:
    """Largest horizon for exponential lifetimes with the deltas at their
    floors delta1 = 1/survival(T), delta2 = 1/rho_*(T):

        T_max = (1/lam) log( 1/2 + sqrt(1/4 + lam 2^-(r+2) R) ),

    and the lambda-free envelope T < 2^-(r+2) R."""
    if not isinstance(regime, Factorial):
        raise ValueError("max_horizon is defined for the factorial regime")
    if lam <= 0:
        raise ValueError("lambda must be > 0")
    R = progeny.radius_factorial(regime.theta, regime.r, d)
    y = 2.0 ** (-(float(regime.r) + 2)) * R
    t_max = math.log(0.5 + math.sqrt(0.25 + lam * y)) / lam
    return HorizonReport(t_max=t_max, lambda_free_envelope=y)


def params_at_floor(regime: Factorial, lam: float, T: float, d: int) -> GrowthParams:
    """GrowthParams with exponential-lifetime floor deltas
    delta2 = exp(lam T)/lam, delta1 = exp(lam T)."""
    return GrowthParams(
        regime=regime,
        delta1=math.exp(lam * T),
        delta2=math.exp(lam * T) / lam,
        lam=lam,
        T=T,
        d=d,
    )


def verify_weight_dominance_algebra(
    p: GrowthParams,
    alphamax: int = 5,
    jmax: int = 3,
    inner_scale=1,
) -> bool:
    """Exact check of the four reduced dominance inequalities for the built
    preset on the grid beta <= alpha, |alpha| <= alphamax, j <= jmax:

      1) sigma_b(alpha,-1) <= kappa sigma_b(alpha,0)
      2) sigma_i0(alpha,-1) <= kappa
      3) 1 <= sb~(alpha-beta,0) sb~(beta,j+1) si0~(alpha,j)/sb~(alpha,j)
      4) 1 <= sb~(alpha-beta+1_i,0) sb~(beta+1_i,j+1) si_i~(alpha,j)/sb~(alpha,j)

    where sb~ = kappa sigma_b and si~ = sigma_i.  `inner_scale` multiplies
    the inner weights (used by tests to break the preset deliberately).
    """
    w = p.build_weights()

    def sb_dom(alpha, j):
        return w.boundary_dominating(alpha, j)

    def si(alpha, j, kind):
        return inner_scale * w.sigma_inner(alpha, j, kind)

    from itertools import product as iproduct

    alphas = [
        al
        for al in iproduct(range(alphamax + 1), repeat=p.d)
        if mi_abs(al) <= alphamax
    ]
    for alpha in alphas:
        if not w.sigma_boundary(alpha, -1) <= w.kappa * w.sigma_boundary(alpha, 0):
            return False
        if not si(alpha, -1, 0) <= w.kappa:
            return False
        for j in range(jmax + 1):
            for beta in mi_enumerate_below(alpha):
                gamma = tuple(a - b for a, b in zip(alpha, beta))
                lhs0 = (
                    sb_dom(gamma, 0)
                    * sb_dom(beta, j + 1)
                    * si(alpha, j, 0)
                    / sb_dom(alpha, j)
                )
                if not lhs0 >= 1:
                    return False
                for i in range(1, p.d + 1):
                    gp = gamma[: i - 1] + (gamma[i - 1] + 1,) + gamma[i:]
                    bp = beta[: i - 1] + (beta[i - 1] + 1,) + beta[i:]
                    lhsi = (
                        sb_dom(gp, 0)
                        * sb_dom(bp, j + 1)
                        * si(alpha, j, i)
                        / sb_dom(alpha, j)
                    )
                    if not lhsi >= 1:
                        return False
    return True


def hbound(alpha, j: int, p: GrowthParams) -> dict:
    """Explicit bound on the mean absolute path functional for a code of
    order alpha under passing conditions.

    factorial:   C (2 theta d)^{|alpha|} delta1 / (2^-(r+2) R - x)
    exponential: C (d / log(R/x))^{|alpha|-1} delta1   (|alpha| >= 1),
                 (delta1/2) e                          (|alpha| = 0),

    with x = (1-exp(-lam T)) delta1 delta2 and the tracked constant reported
    separately.  For |alpha| = 0 in the factorial regime the constant is the
    max of the series-sup constant and the generating-function-sup constant,
    so both bound paths stay consistent.
    """
    alpha = tuple(alpha)
    m = mi_abs(alpha)
    x = (1.0 - math.exp(-p.lam * p.T)) * float(p.delta1) * float(p.delta2)
    if isinstance(p.regime, Factorial):
        y = p.scaled_radius()
        if not x < y:
            raise progeny.OutsideRadius(f"x = {x:.6g} >= 2^-(r+2) R = {y:.6g}")
        C = progeny.tracked_constant(p, m)
        if m == 0:
            r = float(p.regime.r)
            C = max(C, 0.5 * ((r + 2) / (r + 1)) ** (r + 1) * y)
        formula = (
            (2.0 * float(p.regime.theta) * p.d) ** m * float(p.delta1) / (y - x)
        )
        return {
            "alpha": alpha,
            "regime": "factorial",
            "formula_factor": formula,
            "tracked_constant": C,
            "value": C * formula,
            "series_argument": x,
            "threshold": y,
        }
    R = p.radius()
    if not x < R:
        raise progeny.OutsideRadius(f"x = {x:.6g} >= R = {R:.6g}")
    if m == 0:
        return {
            "alpha": alpha,
            "regime": "exponential",
            "formula_factor": 0.5 * math.e,
            "tracked_constant": float(p.delta1),
            "value": 0.5 * math.e * float(p.delta1),
            "series_argument": x,
            "threshold": R,
        }
    series = progeny._ghat_series_value(p, m, x)
    disp = (p.d / math.log(R / x)) ** (m - 1) if x > 0 else 1.0
    return {
        "alpha": alpha,
        "regime": "exponential",
        "formula_factor": disp * float(p.delta1),
        "tracked_constant": series / disp if disp > 0 else math.inf,
        "value": float(p.delta1) * series,
        "series_argument": x,
        "threshold": R,
    }


@dataclass(frozen=True)
class CodeBoundRow:
    m: int
    k: int                   # -1 for the terminal-data side
    sup_abs: float           # grid sup of |d^m .|
    envelope: float          # the regime's right-hand side
    margin: float            # envelope - scaled sup (>= 0 means pass)
    passed: bool


def verify_code_bounds(
    oracle,
    p: GrowthParams,
    grid: Sequence[float],
    m_max: int,
    k_max: int = 4,
    survival_at_T: Optional[float] = None,
) -> dict:
    """Grid verification of the derivative-envelope conditions for d = 1:

      (1/rho_bar(T)) max(|d^m phi|, (delta2 v 1) sup_k |d^m f^{(k)}(phi)|)
          <= delta1 g(m)

    The sup over the real line is approximated on the supplied grid; the
    report states the grid and both delta1 conventions (envelope with the
    1/rho_bar(T) factor folded in, and the raw inequality with
    delta1' = delta1 rho_bar(T)).
    """
    if p.d != 1:
        raise ValueError("grid verification is implemented for d = 1")
    surv = survival_at_T if survival_at_T is not None else math.exp(-p.lam * p.T)
    d2v1 = max(float(p.delta2), 1.0)
    rows = []
    for m in range(m_max + 1):
        envelope = float(p.delta1) * float(p.growth_envelope(m))
        fac = math.factorial(m)
        sup_phi = max(abs(oracle(Code((m,), -1), (x,))) * fac for x in grid)
        scaled = sup_phi / surv
        rows.append(
            CodeBoundRow(m, -1, sup_phi, envelope, envelope - scaled, scaled <= envelope)
        )
        sup_f = max(
            abs(oracle(Code((m,), k), (x,))) * fac for x in grid for k in range(k_max + 1)
        )
        scaled_f = d2v1 * sup_f / surv
        rows.append(
            CodeBoundRow(m, k_max, sup_f, envelope, envelope - scaled_f, scaled_f <= envelope)
        )
    return {
        "rows": rows,
        "passed": all(r.passed for r in rows),
        "grid": (min(grid), max(grid), len(grid)),
        "survival_at_T": surv,
        "conventions": {
            "with_survival_factor": float(p.delta1),
            "raw_delta1": float(p.delta1) * surv,
        },
    }


def bell_growth_transfer(K: Sequence[float], sup_f: float, m_max: int) -> list[float]:
    """Envelope transfer through composition: Theta(m) =
    max(K(m), sup_f * B_m(K(1), ..., K(m))) for m = 1..m_max.

    K is indexed from 1 (K[0] is K(1))."""
    if len(K) < m_max:
        raise ValueError(f"need K(1..{m_max}), got {len(K)} values")
    if any(k <= 0 for k in K[:m_max]):
        raise ValueError("K(m) must be positive")
    out = []
    for m in range(1, m_max + 1):
        bell = bell_complete(m, K[:m])
        out.append(max(float(K[m - 1]), float(sup_f) * float(bell)))
    return out
