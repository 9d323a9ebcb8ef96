"""Batch runner: ``fenchel-game run|equiv|rates CONFIG``.

Configs are INI files with three sections::

    [problem]
    type = quadratic        # quadratic, half_norm, logsumexp, abs_sum, linear, lasso, finite_sum
    dim = 10
    kappa = 100
    seed = 0
    domain = l2ball         # unconstrained, box, l2ball, lpball, simplex
    radius = 1

    [algorithm]
    name = nesterov_1mem
    gamma = 0.0025          # any keyword of the method, all optional
    generator = l2          # l2, entropy
    w0 = zero               # zero, default, or comma-separated coordinates

    [run]
    T = 200
    name = demo
    tol = 1e-10
    grid = 16,32,64,128,256,512,1024,2048

Exit codes: 0 success, 1 check failed, 2 bad config, 3 oracle mismatch.
"""

from __future__ import annotations

import argparse
import configparser
import inspect
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from .core import format_float
from .geometry import Box, Entropy, L2Ball, LpBall, Simplex, SquaredL2, Unconstrained
from .optimizers import ALGORITHMS, run_optimizer
from .problems import AbsSum, FiniteSumQuadratic, Lasso, Linear, LogSumExp, OracleUnavailable, Quadratic
from .verify import equivalence_pair, finite_diff_check, fit_rate

__all__ = ["main", "load_config", "build_problem", "build_domain", "ConfigError", "OracleMismatch"]

PROBLEM_KEYS = {
    "type", "dim", "kappa", "seed", "scale", "n", "m", "tau", "c", "sparsity",
    "domain", "radius", "p", "lo", "hi", "x_star",
}
RUN_KEYS = {"t", "name", "tol", "grid", "model", "out"}
ALGORITHM_META = {"name", "generator", "w0"}

# expected power-law exponent (negative) or "exp" for linear-rate methods
EXPECTED = {
    "frank_wolfe": -1.0,
    "incremental_frank_wolfe": -1.0,
    "boundary_fw": -1.0,
    "gd_averaging": -1.0,
    "cumulative_gd": -0.5,
    "single_call_extragradient": -1.0,
    "heavy_ball": -1.0,
    "nesterov_unconstrained": -2.0,
    "nesterov_1mem": -2.0,
    "nesterov_infmem": -2.0,
    "accelerated_proximal": -2.0,
    "gauge_fw_smooth": -2.0,
    "optimistic_md_averaging": -2.0,
    "adaptive_frank_wolfe": "exp",
    "accelerated_linear": "exp",
    "gauge_fw_strongly_convex": "exp",
}


class ConfigError(ValueError):
    """Unknown or malformed config entry (exit code 2)."""


class OracleMismatch(RuntimeError):
    """Problem gradient disagrees with finite differences (exit code 3)."""


def _num(section, key, default=None, kind=float):
    if key not in section:
        return default
    try:
        return kind(section[key])
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {section[key]!r}") from exc


def load_config(path) -> dict:
    """Parse a config file into ``{"problem": {...}, "algorithm": {...}, "run": {...}}``."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    extra = set(cp.sections()) - {"problem", "algorithm", "run"}
    if extra:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(extra))}")
    for sec in ("problem", "algorithm", "run"):
        if not cp.has_section(sec):
            raise ConfigError(f"missing section [{sec}]")
    cfg = {sec: dict(cp[sec]) for sec in ("problem", "algorithm", "run")}
    for sec, allowed in (("problem", PROBLEM_KEYS), ("run", RUN_KEYS)):
        bad = set(cfg[sec]) - allowed
        if bad:
            raise ConfigError(f"unknown key(s) in [{sec}]: {', '.join(sorted(bad))}")
    if "name" not in cfg["algorithm"]:
        raise ConfigError("[algorithm] needs a name")
    for name in _names(cfg):
        if name not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {name!r}")
    return cfg


def _names(cfg):
    return [s.strip() for s in cfg["algorithm"]["name"].split(",") if s.strip()]


def build_domain(sec: dict, dim: int):
    kind = sec.get("domain", "unconstrained").lower()
    if kind == "unconstrained":
        return Unconstrained(dim)
    if kind == "box":
        return Box(_num(sec, "lo", -1.0), _num(sec, "hi", 1.0), dim)
    if kind == "l2ball":
        return L2Ball(_num(sec, "radius", 1.0), dim)
    if kind == "lpball":
        return LpBall(_num(sec, "p", 1.5), _num(sec, "radius", 1.0), dim)
    if kind == "simplex":
        return Simplex(dim)
    raise ConfigError(f"unknown domain {kind!r}")


def build_problem(sec: dict):
    """Instantiate the problem of a ``[problem]`` section; seeds only enter here."""
    kind = sec.get("type")
    if kind is None:
        raise ConfigError("[problem] needs a type")
    d = _num(sec, "dim", 10, int)
    seed = _num(sec, "seed", 0, int)
    scale = _num(sec, "scale", 1.0)
    x_star = None
    if "x_star" in sec:
        # a minimizer of the given norm along the all-ones direction
        x_star = _num(sec, "x_star") * np.ones(d) / math.sqrt(d)
    if kind == "quadratic":
        return Quadratic.random(d, _num(sec, "kappa", 10.0), seed=seed, x_star=x_star, scale=scale)
    if kind == "half_norm":
        return Quadratic(np.eye(d), np.zeros(d))
    if kind == "logsumexp":
        return LogSumExp.random(d, seed=seed, tau=_num(sec, "tau", 1.0))
    if kind == "abs_sum":
        return AbsSum(d)
    if kind == "linear":
        c = np.random.default_rng(seed).standard_normal(d)
        return Linear(scale * c / np.linalg.norm(c))
    if kind == "lasso":
        return Lasso.planted(
            _num(sec, "m", 3 * d, int), d, c=_num(sec, "c", 0.1),
            sparsity=_num(sec, "sparsity", 3, int), seed=seed, scale=scale,
        )
    if kind == "finite_sum":
        return FiniteSumQuadratic.random(_num(sec, "n", 20, int), d, seed=seed, x_star=x_star, scale=scale)
    raise ConfigError(f"unknown problem type {kind!r}")


def _coerce(text: str):
    low = text.strip().lower()
    if low in ("none", ""):
        return None
    if low in ("true", "false"):
        return low == "true"
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text.strip()


def _algorithm_kwargs(name: str, sec: dict) -> dict:
    fn = ALGORITHMS[name]
    allowed = set(inspect.signature(fn).parameters) - {"p", "domain", "gen", "w0", "x0", "z0", "T", "gset"}
    kw = {}
    for key, val in sec.items():
        if key in ALGORITHM_META:
            continue
        if key not in allowed:
            raise ConfigError(f"unknown hyperparameter {key!r} for {name}")
        kw[key] = _coerce(val)
    return kw


def _generator(sec: dict):
    kind = sec.get("generator", "l2").lower()
    if kind == "l2":
        return SquaredL2()
    if kind == "entropy":
        return Entropy()
    raise ConfigError(f"unknown generator {kind!r}")


def _w0(sec: dict, domain, dim: int) -> np.ndarray:
    text = sec.get("w0", "default").strip().lower()
    if text == "zero":
        return np.zeros(dim)
    if text == "default":
        return domain.default_point(dim)
    try:
        w = np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise ConfigError(f"bad w0 {text!r}") from exc
    if w.shape != (dim,):
        raise ConfigError(f"w0 has {w.size} coordinates, expected {dim}")
    return w


def _f_star(p, domain) -> Optional[float]:
    try:
        return float(p.minimum(domain)[1])
    except (OracleUnavailable, ValueError):
        return None


def _check_oracle(p, w0, seed: int, tol: float = 1e-5):
    if not getattr(p, "smooth", True):
        return
    p = getattr(p, "smooth_part", p)  # composite problems: check the smooth part
    rng = np.random.default_rng(seed)
    for x in (w0, rng.standard_normal(p.dim)):
        res = finite_diff_check(p, x)
        if not res.kink and res.error > tol:
            raise OracleMismatch(f"gradient check failed for {p.name}: relative error {res.error:.3g}")


def _grid(text: Optional[str], T: int):
    if text is None:
        hi = max(T, 256)
        return sorted({int(round(v)) for v in np.geomspace(16, hi, 12)})
    try:
        return sorted({int(v) for v in text.split(",")})
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}") from exc


class _Setup:
    """Everything one config resolves to; rebuilt inside worker processes."""

    def __init__(self, cfg: dict, seed: Optional[int] = None):
        self.cfg = cfg
        prob = dict(cfg["problem"])
        if seed is not None:
            prob["seed"] = str(seed)
        self.seed = _num(prob, "seed", 0, int)
        self.problem = build_problem(prob)
        self.domain = build_domain(prob, self.problem.dim)
        self.gen = _generator(cfg["algorithm"])
        self.w0 = _w0(cfg["algorithm"], self.domain, self.problem.dim)
        self.names = _names(cfg)
        self.kwargs = {n: _algorithm_kwargs(n, cfg["algorithm"]) for n in self.names}
        self.T = _num(cfg["run"], "t", 100, int)
        if self.T < 1:
            raise ConfigError("T must be positive")
        self.f_star = _f_star(self.problem, self.domain)

    def objective(self, x) -> float:
        return self.problem.value(x)

    def run(self, name: str, T: int):
        return run_optimizer(name, self.problem, self.domain, self.w0, T, gen=self.gen, **self.kwargs[name])


def _run_name(cfg, algorithm):
    return cfg["run"].get("name", algorithm)


def _out_dir(args, cfg) -> Path:
    out = args.out or os.environ.get("FGNRD_OUT") or cfg["run"].get("out") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _dump(obj) -> str:
    def enc(v):
        if isinstance(v, dict):
            return {str(k): enc(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [enc(x) for x in v]
        if isinstance(v, (bool, np.bool_)):
            return bool(v)
        if isinstance(v, (int, np.integer)):
            return int(v)
        if isinstance(v, (float, np.floating)):
            return float(format_float(v)) if math.isfinite(v) else None
        if isinstance(v, np.ndarray):
            return enc(v.tolist())
        return v if v is None or isinstance(v, str) else repr(v)

    return json.dumps(enc(obj), indent=2, sort_keys=True) + "\n"


def cmd_run(args, cfg) -> int:
    st = _Setup(cfg, args.seed)
    _check_oracle(st.problem, st.w0, st.seed)
    out = _out_dir(args, cfg)
    for name in st.names:
        run = st.run(name, st.T)
        label = _run_name(cfg, name) if len(st.names) == 1 else f"{_run_name(cfg, name)}_{name}"
        (out / f"{label}_trace.csv").write_text(run.to_csv(st.objective, st.f_star))
        final = st.objective(run.output)
        summary = {
            "algorithm": name,
            "problem": st.problem.name,
            "domain": repr(st.domain),
            "seed": st.seed,
            "T": run.T,
            "status": run.status,
            "params": run.params,
            "final_value": final,
            "f_star": st.f_star,
            "final_gap": None if st.f_star is None else final - st.f_star,
            "output": run.output,
        }
        (out / f"{label}_summary.json").write_text(_dump(summary))
        print(f"{label}: T={run.T} final={format_float(final)}")
    return 0


def cmd_equiv(args, cfg) -> int:
    st = _Setup(cfg, args.seed)
    _check_oracle(st.problem, st.w0, st.seed)
    tol = args.tol if args.tol is not None else _num(cfg["run"], "tol", 1e-10)
    ok = True
    for name in st.names:
        _, _, rep = equivalence_pair(name, st.problem, st.domain, st.w0, st.T, gen=st.gen, tol=tol, **st.kwargs[name])
        print(f"{name}: max deviation {format_float(rep.max_deviation)} ({'PASS' if rep.passed else 'FAIL'}, tol {tol:g})")
        ok = ok and rep.passed
    return 0 if ok else 1


def _rate_point(job):
    cfg, seed, name, T = job
    st = _Setup(cfg, seed)
    run = st.run(name, T)
    return T, st.objective(run.output) - st.f_star, run.aux.get("exponent")


def _judge(expected, fit, exponent):
    if expected == "exp":
        if exponent is None:
            return math.nan, fit.r2 >= 0.95
        return -float(exponent), fit.slope <= -0.8 * float(exponent) and fit.r2 >= 0.98
    width = 0.15 if expected > -0.75 else None
    if width is not None:
        return expected, abs(fit.slope - expected) <= width
    return expected, expected - 0.3 <= fit.slope <= expected + 0.2


def cmd_rates(args, cfg) -> int:
    st = _Setup(cfg, args.seed)
    _check_oracle(st.problem, st.w0, st.seed)
    if st.f_star is None:
        raise ConfigError("rates need a problem/domain pair with a known minimum")
    grid = _grid(cfg["run"].get("grid"), st.T)
    rows = ["algorithm,slope_or_rate,r2,expected,pass"]
    ok = True
    for name in st.names:
        expected = EXPECTED[name]
        if name == "gd_averaging" and st.kwargs[name].get("mode", "smooth") == "nonsmooth":
            expected = -0.5
        jobs = [(st.cfg, args.seed, name, T) for T in grid]
        if args.parallel and args.parallel > 1:
            with ProcessPoolExecutor(max_workers=args.parallel) as pool:
                pts = list(pool.map(_rate_point, jobs))
        else:
            pts = [_rate_point(j) for j in jobs]
        model = "exponential" if expected == "exp" else "power"
        model = cfg["run"].get("model", model)
        fit = fit_rate([(T, g) for T, g, _ in pts], model)
        exp_value, passed = _judge(expected, fit, pts[-1][2])
        ok = ok and passed
        rows.append(",".join([name, format_float(fit.slope), format_float(fit.r2), format_float(exp_value), str(passed).lower()]))
        print(f"{name}: {model} slope {fit.slope:.4f} R2 {fit.r2:.4f} ({'PASS' if passed else 'FAIL'})")
    (_out_dir(args, cfg) / "rates.csv").write_text("\n".join(rows) + "\n")
    return 0 if ok else 1


COMMANDS = {"run": cmd_run, "equiv": cmd_equiv, "rates": cmd_rates}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fenchel-game", description=__doc__.split("\n")[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("config", help="INI config with [problem], [algorithm], [run]")
    ap.add_argument("--out", help="output directory (default: $FGNRD_OUT, then [run] out, then .)")
    ap.add_argument("--seed", type=int, help="override the problem seed")
    ap.add_argument("--parallel", type=int, default=0, help="worker processes for rate sweeps")
    ap.add_argument("--tol", type=float, help="override the equivalence tolerance")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](args, cfg)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OracleMismatch as exc:
        print(f"oracle mismatch: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
