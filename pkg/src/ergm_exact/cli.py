"""Command line front end.

Subcommands ``hull``, ``check``, ``fit``, ``degeneracy``, ``probe`` and
``all`` share one pipeline: enumerate, geometry, membership certificate,
then fit or degeneracy trajectory.  The report is one JSON document on
stdout; diagnostics go to stderr.

Exit codes: 0 success, 2 configuration or input error, 3 no MLE, 4
capacity exceeded, 5 non-convergence, 6 target not separable, 7 violated
internal bound, 8 cache error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .cache import load_or_build
from .degeneracy import boundary_witness, degeneracy_trajectory, separating_direction
from .errors import ConfigError, ErgmError, InvalidInput, NoMLE, NonConvergence
from .exact import format_rational, parse_rational
from .geometry import Verdict, affine_geometry, rint_membership
from .graphspace import K_MAX, KINDS, check_k
from .likelihood import FitConfig, concavity_probe, fit_mle, log_likelihood, perp_invariance_check

log = logging.getLogger("ergm_exact")

SCHEMA_VERSION = "1.0"
MODES = ("hull", "check", "fit", "degeneracy", "probe", "all")
NEEDS_TARGET = ("check", "fit", "degeneracy", "probe")
CONFIG_KEYS = {"k", "statistics", "target", "mode", "fit", "r_schedule", "cache", "seed", "probe_trials"}
FIT_KEYS = {"grad_tol", "max_iters", "armijo_c", "backtrack_factor", "init"}


@dataclass(frozen=True)
class RunConfig:
    k: int
    statistics: tuple[str, ...]
    target: tuple[Fraction, ...] | None = None
    mode: str = "all"
    fit: FitConfig = field(default_factory=FitConfig)
    r_schedule: tuple[float, ...] | None = None
    cache_path: str | None = None
    seed: int = 0
    probe_trials: int = 100

    def echo(self) -> dict:
        return {
            "k": self.k,
            "statistics": list(self.statistics),
            "target": None if self.target is None else [format_rational(x) for x in self.target],
            "mode": self.mode,
            "fit": {
                "grad_tol": self.fit.grad_tol,
                "max_iters": self.fit.max_iters,
                "armijo_c": self.fit.armijo_c,
                "backtrack_factor": self.fit.backtrack_factor,
                "init": None if self.fit.init is None else list(self.fit.init),
            },
            "r_schedule": None if self.r_schedule is None else list(self.r_schedule),
            "seed": self.seed,
            "probe_trials": self.probe_trials,
        }


def _number(value, path: str, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float) if kind is float else int):
        raise ConfigError(path, f"expected {'a number' if kind is float else 'an integer'}, got {value!r}")
    return kind(value)


def config_from_dict(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("$", "configuration must be an object")
    unknown = set(doc) - CONFIG_KEYS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown field")
    if "k" not in doc:
        raise ConfigError("k", "required")
    k = _number(doc["k"], "k", int)
    if k < 2:
        raise ConfigError("k", "must be at least 2")
    stats = doc.get("statistics")
    if not isinstance(stats, list) or not stats:
        raise ConfigError("statistics", "expected a nonempty list")
    for i, s in enumerate(stats):
        if s not in KINDS:
            raise ConfigError(f"statistics[{i}]", f"unknown statistic {s!r}; known: {', '.join(KINDS)}")
    mode = doc.get("mode", "all")
    if mode not in MODES:
        raise ConfigError("mode", f"expected one of {', '.join(MODES)}")

    target = doc.get("target")
    if target is not None:
        if not isinstance(target, list):
            raise ConfigError("target", "expected a list of rational strings")
        parsed = []
        for i, x in enumerate(target):
            try:
                parsed.append(parse_rational(x))
            except InvalidInput as exc:
                raise ConfigError(f"target[{i}]", str(exc)) from None
        if len(parsed) != len(stats):
            raise ConfigError("target", f"has {len(parsed)} entries for {len(stats)} statistics")
        target = tuple(parsed)
    elif mode in NEEDS_TARGET:
        raise ConfigError("target", f"required for mode {mode}")

    fit_doc = doc.get("fit") or {}
    if not isinstance(fit_doc, dict):
        raise ConfigError("fit", "expected an object")
    bad = set(fit_doc) - FIT_KEYS
    if bad:
        raise ConfigError(f"fit.{sorted(bad)[0]}", "unknown field")
    kwargs = {}
    for key in ("grad_tol", "armijo_c", "backtrack_factor"):
        if key in fit_doc:
            kwargs[key] = _number(fit_doc[key], f"fit.{key}")
    if "max_iters" in fit_doc:
        kwargs["max_iters"] = _number(fit_doc["max_iters"], "fit.max_iters", int)
    if fit_doc.get("init") is not None:
        init = fit_doc["init"]
        if not isinstance(init, list) or len(init) != len(stats):
            raise ConfigError("fit.init", "expected one number per statistic")
        kwargs["init"] = tuple(_number(x, f"fit.init[{i}]") for i, x in enumerate(init))
    try:
        fit = FitConfig(**kwargs)
    except InvalidInput as exc:
        raise ConfigError("fit", str(exc)) from None

    sched = doc.get("r_schedule")
    if sched is not None:
        if not isinstance(sched, list) or not sched:
            raise ConfigError("r_schedule", "expected a nonempty list of numbers")
        sched = tuple(_number(r, f"r_schedule[{i}]") for i, r in enumerate(sched))
        if any(r < 0 for r in sched) or any(b <= a for a, b in zip(sched, sched[1:])):
            raise ConfigError("r_schedule", "must be nonnegative and strictly increasing")
    cache = doc.get("cache")
    if cache is not None and not isinstance(cache, str):
        raise ConfigError("cache", "expected a directory path")
    seed = _number(doc.get("seed", 0), "seed", int)
    trials = _number(doc.get("probe_trials", 100), "probe_trials", int)
    if trials < 1:
        raise ConfigError("probe_trials", "must be positive")
    return RunConfig(k, tuple(stats), target, mode, fit, sched, cache, seed, trials)


def parse_config(text: str) -> RunConfig:
    """Parse a JSON run configuration."""
    try:
        doc = json.loads(text)
    except ValueError as exc:
        raise ConfigError("$", f"invalid JSON: {exc}") from None
    return config_from_dict(doc)


# --- serialization ------------------------------------------------------------

def _q(x: Fraction | None):
    return None if x is None else format_rational(x)


def _qv(v):
    return None if v is None else [format_rational(x) for x in v]


def _floats(a) -> list[float]:
    return [float(x) for x in np.asarray(a).reshape(-1)]


def _certificate(cert) -> dict:
    return {
        "verdict": cert.verdict.value,
        "weights": _qv(cert.weights),
        "min_weight": _q(cert.min_weight),
        # distance-to-boundary diagnostic; large means near degenerate
        "inverse_min_weight": _q(1 / cert.min_weight) if cert.min_weight else None,
        "separator": _qv(cert.separator),
        "margin": _q(cert.margin),
        "affine_residual": _qv(cert.affine_residual),
        "vertex_index": cert.vertex_index,
    }


def _fit(res) -> dict:
    return {
        "theta_hat": _floats(res.theta_hat),
        "iterations": res.iterations,
        "final_grad_norm": res.final_grad_norm,
        "ell_at_opt": res.ell_at_opt,
        "path": [{"theta": _floats(th), "ell": ell} for th, ell in res.path],
        "increments": list(res.increments),
        "step_sizes": list(res.step_sizes),
    }


def _geometry(geo, rs) -> dict:
    out = {
        "dim": geo.dim,
        "v_basis": [_qv(v) for v in geo.v_basis],
        "vperp_basis": [_qv(v) for v in geo.vperp_basis],
        "vertex_indices": None,
        "vertices": None,
    }
    if geo.vertex_indices is not None:
        out["vertex_indices"] = list(geo.vertex_indices)
        out["vertices"] = [_qv(rs.points[i]) for i in geo.vertex_indices]
    return out


def _degeneracy(rep, rs, geo) -> dict:
    witness = boundary_witness(rep.face_indices, rs, geo)
    return {
        "direction": _qv(rep.direction),
        "margin": _q(rep.margin),
        "case": rep.case,
        "face_indices": list(rep.face_indices),
        "face_points": [_qv(rs.points[i]) for i in rep.face_indices],
        "second_gap": _q(rep.second_gap),
        "face_on_relative_boundary": witness,
        "rows": [
            {"r": row.r, "ell": row.ell, "mass_on_face": row.mass_on_face,
             "lower_bound": row.lower_bound, "bound_ok": row.ell >= row.lower_bound - 1e-9 * max(1.0, abs(row.lower_bound))}
            for row in rep.rows
        ],
    }


# --- probes -------------------------------------------------------------------

def _probe(cfg: RunConfig, rs, geo) -> dict:
    rng = np.random.default_rng(cfg.seed)
    n = rs.n
    t = cfg.target
    counts = {"trials": cfg.probe_trials, "strict_predicted": 0, "strict_observed": 0, "consistent": 0}
    min_gap = None
    for _ in range(cfg.probe_trials):
        th1, th2 = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
        tau = float(rng.uniform(0.05, 0.95))
        rep = concavity_probe(th1, th2, tau, t, rs, geo)
        counts["strict_predicted"] += rep.strict_predicted
        counts["strict_observed"] += rep.strict_observed
        counts["consistent"] += rep.consistent
        gap = rep.lhs - rep.rhs
        min_gap = gap if min_gap is None else min(min_gap, gap)
    # directions with no V component must give equality
    flat = []
    for u in geo.vperp_basis:
        uf = np.array([float(x) for x in u])
        th = rng.uniform(-1, 1, n)
        rep = concavity_probe(th, th + uf, 0.5, t, rs, geo)
        flat.append({"u": _qv(u), "lhs": rep.lhs, "rhs": rep.rhs, "consistent": rep.consistent})
    counts["min_gap"] = min_gap
    invariance = []
    for u in geo.vperp_basis:
        uf = np.array([float(x) for x in u])
        for s in (-10.0, -1.0, 1.0, 10.0):
            th = rng.uniform(-1, 1, n)
            rep = perp_invariance_check(th, t, rs, s * uf, geo)
            invariance.append({
                "u": _qv(u), "s": s, "difference": rep.difference, "predicted": rep.predicted,
                "in_affine_hull": rep.in_affine_hull, "ok": rep.ok,
            })
    return {"concavity": counts, "flat_directions": flat, "invariance": invariance}


# --- pipeline -----------------------------------------------------------------

def run(cfg: RunConfig) -> tuple[dict, int]:
    """Execute one configuration; returns (report, exit code)."""
    started = time.perf_counter()
    report: dict = {"schema_version": SCHEMA_VERSION, "tool_version": __version__, "config": cfg.echo()}
    timings: dict = {}
    code = 0
    try:
        check_k(cfg.k)
        t0 = time.perf_counter()
        rs, source = load_or_build(cfg.k, cfg.statistics, cfg.cache_path)
        timings["realizable_s"] = time.perf_counter() - t0
        timings["realizable_source"] = source
        report["realizable"] = {
            "k": rs.k,
            "statistics": list(rs.labels),
            "graphs": rs.total,
            "distinct_points": len(rs.points),
            "points": [{"point": _qv(p), "multiplicity": m} for p, m in zip(rs.points, rs.multiplicities)],
        }
        want_vertices = cfg.mode in ("hull", "all")
        t0 = time.perf_counter()
        geo = affine_geometry(rs, vertices=want_vertices)
        timings["geometry_s"] = time.perf_counter() - t0
        report["geometry"] = _geometry(geo, rs)
        if cfg.mode == "hull" or cfg.target is None:
            return report, code

        t0 = time.perf_counter()
        cert = rint_membership(cfg.target, rs, geo)
        timings["membership_s"] = time.perf_counter() - t0
        report["certificate"] = _certificate(cert)
        outside = cert.verdict in (Verdict.OUTSIDE_HULL, Verdict.OUTSIDE_AFFINE_HULL)

        if cfg.mode in ("fit", "all") and not (cfg.mode == "all" and not cert.in_relative_interior):
            t0 = time.perf_counter()
            try:
                res = fit_mle(cfg.target, rs, cfg.fit, geo)
                report["fit"] = _fit(res)
            except NonConvergence as exc:
                if exc.best is not None:
                    report["fit"] = _fit(exc.best)
                raise
            finally:
                timings["fit_s"] = time.perf_counter() - t0
        if cfg.mode == "degeneracy" or (cfg.mode == "all" and outside):
            t0 = time.perf_counter()
            theta, eps = separating_direction(cfg.target, rs, geo)
            rep = degeneracy_trajectory(cfg.target, rs, theta, eps, cfg.r_schedule)
            report["degeneracy"] = _degeneracy(rep, rs, geo)
            report["degeneracy"]["ell_at_zero"] = log_likelihood(np.zeros(rs.n), cfg.target, rs)
            timings["degeneracy_s"] = time.perf_counter() - t0
        if cfg.mode == "all" and cert.verdict is Verdict.RELATIVE_BOUNDARY:
            report["note"] = "target on the relative boundary: no MLE and no separating direction"
        if cfg.mode == "probe":
            t0 = time.perf_counter()
            report["probe"] = _probe(cfg, rs, geo)
            timings["probe_s"] = time.perf_counter() - t0
            if not all(row["ok"] for row in report["probe"]["invariance"]) or report["probe"]["concavity"]["consistent"] != cfg.probe_trials:
                log.warning("probe battery found inconsistencies")
    except ErgmError as exc:
        code = exc.exit_code
        err = {"type": type(exc).__name__, "message": str(exc), "exit_code": code}
        if isinstance(exc, NoMLE):
            report["certificate"] = _certificate(exc.certificate)
            if exc.certificate.verdict in (Verdict.OUTSIDE_HULL, Verdict.OUTSIDE_AFFINE_HULL):
                err["hint"] = "target lies outside the hull; run the degeneracy subcommand"
            else:
                err["hint"] = "target is on the relative boundary of the hull"
        report["error"] = err
    finally:
        timings["total_s"] = time.perf_counter() - started
        report["timings"] = timings
    return report, code


def _csv(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ergm-exact", description="Exact ERGM analysis on small graph spaces.")
    p.add_argument("mode", choices=MODES)
    p.add_argument("--config", help="JSON run configuration file")
    p.add_argument("--k", type=int, help=f"vertex count (2..{K_MAX})")
    p.add_argument("--stats", help="comma-separated statistics: " + ",".join(KINDS))
    p.add_argument("--target", help="comma-separated target values, e.g. 1/8,3/2,1")
    p.add_argument("--cache", help="cache directory for realizable sets")
    p.add_argument("--seed", type=int, help="seed for randomized probe batteries")
    p.add_argument("--r-schedule", help="comma-separated increasing r values")
    p.add_argument("--grad-tol", type=float)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--probe-trials", type=int)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args) -> RunConfig:
    doc: dict = {}
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError("--config", str(exc)) from None
        except ValueError as exc:
            raise ConfigError("--config", f"invalid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("$", "configuration must be an object")
    doc["mode"] = args.mode
    if args.k is not None:
        doc["k"] = args.k
    if args.stats:
        doc["statistics"] = _csv(args.stats)
    if args.target:
        doc["target"] = _csv(args.target)
    if args.cache:
        doc["cache"] = args.cache
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.probe_trials is not None:
        doc["probe_trials"] = args.probe_trials
    if args.r_schedule:
        try:
            doc["r_schedule"] = [float(x) for x in _csv(args.r_schedule)]
        except ValueError:
            raise ConfigError("r_schedule", "expected numbers") from None
    fit = dict(doc.get("fit") or {})
    if args.grad_tol is not None:
        fit["grad_tol"] = args.grad_tol
    if args.max_iters is not None:
        fit["max_iters"] = args.max_iters
    if fit:
        doc["fit"] = fit
    return config_from_dict(doc)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return exc.exit_code
    report, code = run(cfg)
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")
    if code:
        err = report.get("error", {})
        print(f"{err.get('type')}: {err.get('message')}", file=sys.stderr)
        if "hint" in err:
            print(f"hint: {err['hint']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
