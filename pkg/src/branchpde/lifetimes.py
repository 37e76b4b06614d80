"""Branch lifetime models: density rho, survival rho-bar, inverse-CDF
sampling, and validation of the positivity/exponential-domination
assumptions the solver relies on.

Required properties (checked by `validate_assumption_h`):
  i)  rho_*(T) = min_{s in [0,T]} rho(s) > 0, and
  ii) rho_bar(r) >= exp(-lambda r) for all r >= 0, for the model's lambda.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence


@dataclass(frozen=True)
class LifetimeModel:
    kind: str
    lam: float                                # rate in rho_bar(r) >= exp(-lam r)
    density: Callable[[float], float]         # rho
    survival: Callable[[float], float]        # rho_bar
    inverse_cdf: Callable[[float], float]
    _rho_star: Callable[[float], float] = field(repr=False, default=None)

    def rho_star(self, T: float) -> float:
        """min of the density over [0, T]."""
        return self._rho_star(T)


def exponential_model(lam: float) -> LifetimeModel:
    """Exponential lifetimes: rho(s) = lam e^{-lam s}; the survival bound
    holds with equality."""
    if lam <= 0:
        raise ValueError(f"rate lambda must be > 0, got {lam}")
    return LifetimeModel(
        kind="exponential",
        lam=lam,
        density=lambda s: lam * math.exp(-lam * s) if s >= 0 else 0.0,
        survival=lambda r: math.exp(-lam * r) if r >= 0 else 1.0,
        inverse_cdf=lambda u: -math.log1p(-u) / lam,
        _rho_star=lambda T: lam * math.exp(-lam * T),
    )


def tabulated_model(points: Sequence[tuple[float, float]], lam: float) -> LifetimeModel:
    """Density from tabulated (r, rho) pairs with linear interpolation.

    The table must start at r=0 and is normalized to unit mass; the density
    is 0 beyond the last knot.  Sampling inverts the piecewise-quadratic CDF
    by bisection on the knots plus a quadratic solve on the segment.
    """
    if lam <= 0:
        raise ValueError(f"rate lambda must be > 0, got {lam}")
    rs = [float(r) for r, _ in points]
    vs = [float(v) for _, v in points]
    if len(rs) < 2 or rs[0] != 0.0 or any(b <= a for a, b in zip(rs, rs[1:])):
        raise ValueError("need increasing knots starting at r=0")
    if any(v < 0 for v in vs):
        raise ValueError("density values must be >= 0")
    mass = sum(
        0.5 * (vs[i] + vs[i + 1]) * (rs[i + 1] - rs[i]) for i in range(len(rs) - 1)
    )
    if mass <= 0:
        raise ValueError("tabulated density has zero mass")
    vs = [v / mass for v in vs]
    # cdf at knots
    cdf = [0.0]
    for i in range(len(rs) - 1):
        cdf.append(cdf[-1] + 0.5 * (vs[i] + vs[i + 1]) * (rs[i + 1] - rs[i]))

    def density(s: float) -> float:
        if s < 0 or s > rs[-1]:
            return 0.0
        i = min(bisect.bisect_right(rs, s), len(rs) - 1) - 1
        i = max(i, 0)
        t = (s - rs[i]) / (rs[i + 1] - rs[i])
        return vs[i] + t * (vs[i + 1] - vs[i])

    def cdf_at(s: float) -> float:
        if s <= 0:
            return 0.0
        if s >= rs[-1]:
            return 1.0
        i = max(min(bisect.bisect_right(rs, s), len(rs) - 1) - 1, 0)
        h = s - rs[i]
        slope = (vs[i + 1] - vs[i]) / (rs[i + 1] - rs[i])
        return cdf[i] + vs[i] * h + 0.5 * slope * h * h

    def inverse_cdf(u: float) -> float:
        if not 0.0 <= u < 1.0:
            raise ValueError("uniform variate must lie in [0, 1)")
        i = max(min(bisect.bisect_right(cdf, u), len(cdf) - 1) - 1, 0)
        lo, hi = rs[i], rs[i + 1]
        for _ in range(60):  # bisection: monotone piecewise-quadratic segment
            mid = 0.5 * (lo + hi)
            if cdf_at(mid) < u:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def rho_star(T: float) -> float:
        # linear pieces attain extrema at segment endpoints
        candidates = [density(r) for r in rs if r <= T] + [density(min(T, rs[-1]))]
        if T > rs[-1]:
            return 0.0
        return min(candidates)

    return LifetimeModel(
        kind="tabulated",
        lam=lam,
        density=density,
        survival=lambda r: max(1.0 - cdf_at(r), 0.0),
        inverse_cdf=inverse_cdf,
        _rho_star=rho_star,
    )


def sample_lifetime(model: LifetimeModel, u: float) -> float:
    """Inverse-CDF lifetime sample from a uniform variate in [0, 1)."""
    if not 0.0 <= u < 1.0:
        raise ValueError(f"uniform variate must lie in [0, 1), got {u}")
    return model.inverse_cdf(u)


@dataclass(frozen=True)
class AssumptionReport:
    rho_star: float
    lam: float
    ok: bool
    failures: tuple[str, ...] = ()


def validate_assumption_h(
    model: LifetimeModel, T: float, grid_points: int = 1000
) -> AssumptionReport:
    """Check rho_*(T) > 0 and rho_bar(r) >= exp(-lam r) on a grid.

    The survival bound is checked on `grid_points` points of [0, 10/lam]
    (pointwise checking over all r is not decidable); failures are reported,
    never raised.
    """
    if T <= 0:
        raise ValueError(f"horizon T must be > 0, got {T}")
    failures = []
    rho_star = model.rho_star(T)
    if not rho_star > 0:
        failures.append(f"rho_*({T}) = {rho_star} is not > 0")
    hi = 10.0 / model.lam
    tol = 1e-12
    for i in range(grid_points):
        r = hi * i / (grid_points - 1)
        if model.survival(r) < math.exp(-model.lam * r) - tol:
            failures.append(
                f"survival({r:.6g}) = {model.survival(r):.6g} < "
                f"exp(-lambda r) = {math.exp(-model.lam * r):.6g}"
            )
            break
    return AssumptionReport(
        rho_star=rho_star, lam=model.lam, ok=not failures, failures=tuple(failures)
    )


def model_from_config(cfg: dict) -> LifetimeModel:
    """Build a model from {"kind": "exponential", "lambda": x} or
    {"kind": "tabulated", "points": [[r, rho], ...], "lambda": x}."""
    kind = cfg.get("kind", "exponential")
    if kind == "exponential":
        return exponential_model(float(cfg["lambda"]))
    if kind == "tabulated":
        return tabulated_model(
            [(float(r), float(v)) for r, v in cfg["points"]], float(cfg["lambda"])
        )
    raise ValueError(f"unknown lifetime kind {kind!r}")
