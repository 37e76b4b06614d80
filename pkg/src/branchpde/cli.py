"""Command-line entry point: solve (Monte Carlo estimation), stability
(condition reports and horizon sweeps), progeny (series tables), verify
(built-in consistency suite).

JSON config in, CSV/JSON out, no interactive mode.  Exit codes are part of
the contract: solve returns 0 on success, 2 when the lifetime model fails
validation, 3 on config errors; stability returns 1 when conditions fail
(the report is still written); verify returns 0 iff every check passes.
Log level comes from the BRANCHPDE_LOG environment variable.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import os
import sys
from fractions import Fraction

from .estimator import (
    AllSamplesCapped,
    AssumptionHViolated,
    Estimate,
    ProblemSetup,
    estimate_u,
    median_of_means,
    write_csv,
)
from .lifetimes import model_from_config, validate_assumption_h
from .mechanism import Code
from .tree import Caps
from . import problems, progeny, stability

log = logging.getLogger("branchpde")


class ConfigError(ValueError):
    pass


def _setup_logging() -> None:
    level = os.environ.get("BRANCHPDE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _require(cfg: dict, field: str, kind=None):
    if field not in cfg:
        raise ConfigError(f"config field {field!r} is missing")
    value = cfg[field]
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(f"config field {field!r} has wrong type {type(value).__name__}")
    return value


def _positive(cfg: dict, field: str) -> float:
    value = float(_require(cfg, field, (int, float)))
    if value <= 0:
        raise ConfigError(f"config field {field!r} must be > 0, got {value}")
    return value


def _resolve_solve_config(cfg: dict, args) -> dict:
    resolved = dict(cfg)
    if args.seed is not None:
        resolved["seed"] = args.seed
    if args.workers is not None:
        resolved["workers"] = args.workers
    resolved.setdefault("seed", 0)
    resolved.setdefault("workers", 1)
    resolved.setdefault("n", 100_000)
    resolved.setdefault("estimator", "mean")
    resolved.setdefault("groups", 9)
    resolved.setdefault("code", {"alpha": [0], "j": -1})
    resolved.setdefault("lifetime", {"kind": "exponential", "lambda": 1.0})
    resolved.setdefault(
        "caps", {"max_branches": 10**6, "max_generation": 200}
    )
    return resolved


def cmd_solve(args) -> int:
    cfg = _resolve_solve_config(_load_config(args.config), args)
    try:
        name = _require(cfg, "problem", str)
        T = _positive(cfg, "T")
        lifetime_cfg = _require(cfg, "lifetime", dict)
        if float(lifetime_cfg.get("lambda", 0)) <= 0:
            raise ConfigError("config field 'lifetime.lambda' must be > 0")
        model = model_from_config(lifetime_cfg)
        problem = problems.make_problem(name, T)
        code_cfg = _require(cfg, "code", dict)
        code = Code(tuple(int(a) for a in code_cfg["alpha"]), int(code_cfg["j"]))
        if len(code.alpha) != problem.d:
            raise ConfigError(
                f"code alpha has dimension {len(code.alpha)}, problem wants {problem.d}"
            )
        points = _require(cfg, "points", list)
        parsed_points = []
        for row in points:
            t = float(row["t"])
            x = [float(v) for v in row["x"]]
            if len(x) != problem.d:
                raise ConfigError(f"point {row} has wrong dimension for d={problem.d}")
            parsed_points.append((t, x))
        n = int(cfg["n"])
        seed = int(cfg["seed"])
        workers = int(cfg["workers"])
        caps = Caps(
            max_branches=int(cfg["caps"]["max_branches"]),
            max_generation=int(cfg["caps"]["max_generation"]),
        )
        estimator_kind = cfg["estimator"]
        if estimator_kind not in ("mean", "mom"):
            raise ConfigError(f"config field 'estimator' must be mean|mom")
    except ConfigError as exc:
        log.error("%s", exc)
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except (KeyError, TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3

    setup = ProblemSetup(oracle=problem.oracle, model=model, d=problem.d)
    rows = []
    offsets = cfg.get("seed_offsets", [0] * len(parsed_points))
    try:
        for (t, x), off in zip(parsed_points, offsets):
            if estimator_kind == "mean":
                est = estimate_u(code, t, x, T, setup, n, seed + off, caps, workers)
            else:
                est = median_of_means(
                    code, t, x, T, setup, n, int(cfg["groups"]), seed + off, caps
                )
                plain = estimate_u(code, t, x, T, setup, n, seed + off, caps, workers)
                gap = abs(est.mean - plain.mean)
                scale = max(est.std_error, plain.std_error, 1e-300)
                if gap > 5.0 * scale:
                    log.warning(
                        "median-of-means %.6g and mean %.6g disagree by %.1f SE "
                        "at (t=%s, x=%s); the functional may be heavy-tailed",
                        est.mean, plain.mean, gap / scale, t, x,
                    )
            rows.append((t, tuple(x), est))
    except AssumptionHViolated as exc:
        print(f"lifetime model fails validation: {exc}", file=sys.stderr)
        return 2
    except AllSamplesCapped as exc:
        print(f"estimation failed: {exc}", file=sys.stderr)
        return 2

    out_fmt = args.format or cfg.get("format", "csv")
    buf = io.StringIO()
    if out_fmt == "csv":
        write_csv(buf, rows, code, n, seed, offsets)
        payload = buf.getvalue()
    else:
        payload = json.dumps(
            {
                "config": cfg,
                "rows": [
                    {
                        "t": t,
                        "x": list(x),
                        "mean": est.mean,
                        "std_error": est.std_error,
                        "n": est.n_samples,
                        "n_capped": est.n_capped,
                    }
                    for t, x, est in rows
                ],
            },
            indent=2,
        ) + "\n"
    _emit(args.out, payload)
    if args.out and out_fmt == "csv":
        # resolved config sidecar for bit-exact re-runs
        with open(args.out + ".config.json", "w") as fh:
            json.dump(cfg, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def cmd_stability(args) -> int:
    cfg = _load_config(args.config)
    try:
        regime_cfg = _require(cfg, "regime", dict)
        kind = _require(regime_cfg, "kind", str)
        if kind == "factorial":
            regime = stability.Factorial(
                theta=_positive(regime_cfg, "theta"), r=_positive(regime_cfg, "r")
            )
        elif kind == "exponential":
            regime = stability.Exponential(theta=_positive(regime_cfg, "theta"))
        else:
            raise ConfigError("regime.kind must be factorial|exponential")
        lam = _positive(cfg, "lambda")
        d = int(cfg.get("d", 1))
        delta1 = _positive(cfg, "delta1")
        delta2 = _positive(cfg, "delta2")
        m_max = int(cfg.get("m_max", 3))
        sweep = cfg.get("sweep_T")
        T = float(cfg["T"]) if "T" in cfg else None
        if T is None and not sweep:
            raise ConfigError("config needs either 'T' or 'sweep_T'")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3

    model = model_from_config(cfg.get("lifetime", {"kind": "exponential", "lambda": lam}))
    report: dict = {"config": cfg}
    overall = True

    def conditions_at(TT: float) -> dict:
        p = stability.GrowthParams(regime=regime, delta1=delta1, delta2=delta2,
                                   lam=lam, T=TT, d=d)
        rep = stability.check_conditions(p, model)
        return {
            "T": TT,
            "pass": rep.passed,
            "conditions": [
                {"name": c.name, "lhs": c.lhs, "rhs": c.rhs, "pass": c.passed}
                for c in rep.conditions
            ],
        }

    if T is not None:
        main = conditions_at(T)
        report["report"] = main
        overall = main["pass"]
        if main["pass"]:
            p = stability.GrowthParams(regime=regime, delta1=delta1, delta2=delta2,
                                       lam=lam, T=T, d=d)
            report["hbound"] = [
                {
                    "alpha_order": m,
                    **{k: v for k, v in stability.hbound((m,) + (0,) * (d - 1), 0, p).items()
                       if k != "alpha"},
                }
                for m in range(m_max + 1)
            ]
    if isinstance(regime, stability.Factorial):
        horizon = stability.max_horizon(regime, lam, d)
        report["t_max"] = horizon.t_max
        report["lambda_free_envelope"] = horizon.lambda_free_envelope
    if sweep:
        report["sweep"] = [conditions_at(float(TT)) for TT in sweep]

    report["pass"] = overall
    _emit(args.out, json.dumps(report, indent=2) + "\n")
    return 0 if overall else 1


def cmd_progeny(args) -> int:
    cfg = _load_config(args.config)
    try:
        kind = _require(cfg, "regime", dict).get("kind", "factorial")
        theta_raw = _require(cfg["regime"], "theta", (int, float, str))
        theta = Fraction(str(theta_raw))
        r = Fraction(str(cfg["regime"]["r"])) if kind == "factorial" else None
        d = int(cfg.get("d", 1))
        kmax = int(cfg.get("kmax", 6))
        alpha_max = int(cfg.get("alpha_max", 3))
        exact = bool(cfg.get("exact", True))
    except (ConfigError, KeyError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3

    if kind == "factorial":
        radius = progeny.radius_factorial(float(theta), float(r), d)
        g = progeny.g_factorial(theta, r)
    else:
        radius = progeny.radius_exponential(float(theta), d)
        g = progeny.g_exponential(theta)

    lines = ["alpha,k,value_num,value_den,value_float,regime,radius"]
    from itertools import product as iproduct

    for alpha in iproduct(range(alpha_max + 1), repeat=d):
        if sum(alpha) > alpha_max:
            continue
        table = progeny.ahat_recursion(g, d, alpha, kmax)
        alpha_txt = "|".join(str(a) for a in alpha)
        for k in range(kmax + 1):
            v = table.values[(alpha, k)]
            frac = Fraction(v)
            num, den = (frac.numerator, frac.denominator) if exact else ("", "")
            lines.append(
                f"{alpha_txt},{k},{num},{den},{float(v)!r},{kind},{radius!r}"
            )
    _emit(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_verify(args) -> int:
    from .verify import run_suite

    results = run_suite(fault=getattr(args, "inject_fault", False))
    width = max(len(name) for name, _ in results)
    for name, ok in results:
        print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}")
    n_fail = sum(1 for _, ok in results if not ok)
    print(f"{len(results) - n_fail}/{len(results)} checks passed")
    return 0 if n_fail == 0 else 1


def _emit(out_path, payload: str) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def main(argv=None) -> int:
    _setup_logging()
    parser = argparse.ArgumentParser(
        prog="branchpde",
        description="Branching Monte Carlo solver and stability analyzer "
        "for semilinear heat equations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="Monte Carlo estimation from a JSON config")
    p_solve.add_argument("--config", required=True)
    p_solve.add_argument("--out", default=None)
    p_solve.add_argument("--seed", type=int, default=None)
    p_solve.add_argument("--workers", type=int, default=None)
    p_solve.add_argument("--format", choices=("csv", "json"), default=None)
    p_solve.set_defaults(func=cmd_solve)

    p_stab = sub.add_parser("stability", help="integrability condition report")
    p_stab.add_argument("--config", required=True)
    p_stab.add_argument("--out", default=None)
    p_stab.set_defaults(func=cmd_stability)

    p_prog = sub.add_parser("progeny", help="dominating-series tables as CSV")
    p_prog.add_argument("--config", required=True)
    p_prog.add_argument("--out", default=None)
    p_prog.set_defaults(func=cmd_progeny)

    p_ver = sub.add_parser("verify", help="run the built-in consistency suite")
    p_ver.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p_ver.set_defaults(func=cmd_verify)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
