"""Command line harness: ``toda solve|invariants|compare <config.json>``.

Config (JSON):

    {
      "initial": {"type": "jacobi", "diag": [...], "offdiag": [...]}
                 | {"type": "phase_point", "q": [...], "p": [...], "nu": [...]}
                 | {"type": "lower", "rho0": [...], "rho1": [...]}
                 | {"type": "random", "N": 6},
      "flows": {"1": 0.5, "3": 0.1},
      "grid": [0.0, 0.5, 1.0],
      "paths": ["spectral", "qr", "rk4", "rk4@10"],
      "rk4_steps": 2000,
      "seed": 0,
      "out": "out",
      "tol": null
    }

Each flow l in ``flows`` is run on its own: a grid value s means the time
vector {l: s * t_l}. ``rk4@n`` is the RK4 path with n steps.

Exit codes: 0 ok, 1 config error, 2 numeric failure, 3 invariant failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import platform
import sys
import time
from importlib import metadata
from itertools import combinations

import numpy as np

from .flaschka import NuWeight, PhasePoint, flaschka_map
from .invariants import DEFAULT_TOLS, random_jacobi, run_suite
from .lax_oracle import casimir, qr_flow, rk4_lax
from .spectral_solver import (
    DegenerateSpectrumError,
    InvalidMomentsError,
    JacobiBanded,
    SplitBlockError,
    toda_solve,
)

KNOWN_PATHS = ("spectral", "qr", "rk4")
NUMERIC_ERRORS = (DegenerateSpectrumError, InvalidMomentsError, SplitBlockError,
                  np.linalg.LinAlgError, FloatingPointError)


class ConfigError(ValueError):
    pass


def _floats(obj, key):
    try:
        return [float(v) for v in obj[key]]
    except KeyError:
        raise ConfigError(f"initial.{key} is missing")
    except (TypeError, ValueError):
        raise ConfigError(f"initial.{key} must be a list of numbers")


def load_config(path: str, overrides: dict) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}")
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    for key, val in overrides.items():
        if val is not None:
            cfg[key] = val
    cfg.setdefault("paths", ["spectral"])
    cfg.setdefault("grid", [0.0, 0.25, 0.5, 0.75, 1.0])
    cfg.setdefault("rk4_steps", 2000)
    cfg.setdefault("seed", 0)
    cfg.setdefault("out", "out")
    cfg.setdefault("initial", {"type": "random", "N": 5})
    cfg.setdefault("flows", {"1": 1.0})
    validate(cfg)
    return cfg


def validate(cfg: dict) -> None:
    paths = cfg["paths"]
    if not isinstance(paths, list) or not paths:
        raise ConfigError("paths must be a non-empty list")
    for p in paths:
        _path_spec(p, cfg)
    if len(set(paths)) != len(paths):
        raise ConfigError("paths contains duplicates")
    grid = cfg["grid"]
    try:
        grid = [float(g) for g in grid]
    except (TypeError, ValueError):
        raise ConfigError("grid must be a list of numbers")
    if not grid:
        raise ConfigError("grid must not be empty")
    for i in range(1, len(grid)):
        if grid[i] <= grid[i - 1]:
            raise ConfigError(
                f"grid must be strictly increasing: entry {i} ({grid[i]}) <= entry {i - 1} ({grid[i - 1]})"
            )
    flows = cfg["flows"]
    if not isinstance(flows, dict) or not flows:
        raise ConfigError('flows must be a non-empty map like {"1": 0.5}')
    for l, v in flows.items():
        try:
            li = int(l)
            float(v)
        except (TypeError, ValueError):
            raise ConfigError(f"bad flow entry {l!r}: {v!r}")
        if li < 1 or str(li) != str(l).strip():
            raise ConfigError(f"flow index must be a positive integer, got {l!r}")
    try:
        seed = int(cfg["seed"])
    except (TypeError, ValueError):
        raise ConfigError("seed must be an integer")
    if seed < 0:
        raise ConfigError("seed must be non-negative")
    if not isinstance(cfg["rk4_steps"], int) or cfg["rk4_steps"] < 1:
        raise ConfigError("rk4_steps must be a positive integer")
    if cfg.get("tol") is not None:
        try:
            if float(cfg["tol"]) <= 0:
                raise ValueError
        except (TypeError, ValueError):
            raise ConfigError("tol must be a positive number")
    build_initial(cfg)


def _path_spec(name, cfg):
    if not isinstance(name, str):
        raise ConfigError(f"path names must be strings, got {name!r}")
    base, _, steps = name.partition("@")
    if base not in KNOWN_PATHS:
        raise ConfigError(f"unknown path {name!r}; choose from {', '.join(KNOWN_PATHS)}")
    if steps:
        if base != "rk4":
            raise ConfigError(f"only rk4 takes a step count, got {name!r}")
        try:
            n = int(steps)
        except ValueError:
            raise ConfigError(f"bad step count in {name!r}")
        if n < 1:
            raise ConfigError(f"bad step count in {name!r}")
        return base, n
    return base, cfg.get("rk4_steps", 2000)


def build_initial(cfg: dict) -> JacobiBanded:
    init = cfg["initial"]
    if not isinstance(init, dict) or "type" not in init:
        raise ConfigError("initial must be an object with a 'type'")
    kind = init["type"]
    if kind == "jacobi":
        d, o = _floats(init, "diag"), _floats(init, "offdiag")
        if len(o) != max(len(d) - 1, 0):
            raise ConfigError(f"offdiag needs {max(len(d) - 1, 0)} entries, got {len(o)}")
        J = JacobiBanded(d, o)
    elif kind == "lower":
        d, o = _floats(init, "rho0"), _floats(init, "rho1")
        if len(o) != max(len(d) - 1, 0):
            raise ConfigError(f"rho1 needs {max(len(d) - 1, 0)} entries, got {len(o)}")
        J = JacobiBanded(d, o)
    elif kind == "phase_point":
        q, p, nu = _floats(init, "q"), _floats(init, "p"), _floats(init, "nu")
        if len(q) != len(p) or len(nu) != max(len(q) - 1, 0):
            raise ConfigError("phase_point needs len(q) = len(p) = len(nu) + 1")
        rho = flaschka_map(PhasePoint(q, p), NuWeight(nu, 2))
        J = JacobiBanded(rho.rho0, rho.rho_km1)
    elif kind == "random":
        try:
            n = int(init.get("N", 5))
        except (TypeError, ValueError):
            raise ConfigError("initial.N must be an integer")
        if n < 1:
            raise ConfigError("initial.N must be >= 1")
        J = random_jacobi(np.random.default_rng(int(cfg["seed"])), n)
    else:
        raise ConfigError(f"unknown initial type {kind!r}")
    if J.N == 0:
        raise ConfigError("initial data is empty")
    if not np.all(np.isfinite(J.diag)) or not np.all(np.isfinite(J.offdiag)):
        raise ConfigError("initial data must be finite")
    if np.any(J.offdiag < 0):
        raise ConfigError("off-diagonal entries must be non-negative")
    return J


def _run_path(name: str, J0: JacobiBanded, l: int, t: float, cfg: dict) -> np.ndarray:
    base, steps = _path_spec(name, cfg)
    if base == "spectral":
        return toda_solve(J0, {l: t}).to_dense()
    if base == "qr":
        return qr_flow(J0.to_dense(), l, t)
    return rk4_lax(J0.to_dense(), l, t, steps)


def trajectories(cfg: dict, J0: JacobiBanded):
    """{path: [(t, l, dense state)]} and wall time per path."""
    grid = [float(g) for g in cfg["grid"]]
    flows = sorted((int(l), float(v)) for l, v in cfg["flows"].items())
    out, walls = {}, {}
    for name in cfg["paths"]:
        t0 = time.perf_counter()
        rows = []
        for l, tl in flows:
            for s in grid:
                rows.append((s * tl, l, _run_path(name, J0, l, s * tl, cfg)))
        walls[name] = time.perf_counter() - t0
        out[name] = rows
    return out, walls


def _fmt(x) -> str:
    return repr(float(x))


def _csv_bytes(header, rows) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue().encode("utf-8")


def _state_row(t, l, M):
    n = len(M)
    inv = [casimir(M, m) for m in range(1, 5)]
    return ([_fmt(t), str(l)] + [_fmt(M[i, i]) for i in range(n)]
            + [_fmt(M[i + 1, i]) for i in range(n - 1)] + [_fmt(v) for v in inv])


def _state_header(n):
    return (["t", "flow_l"] + [f"diag_{i}" for i in range(n)]
            + [f"offdiag_{i}" for i in range(n - 1)] + ["I1", "I2", "I3", "I4"])


def _safe(name: str) -> str:
    return name.replace("@", "_")


def _versions() -> dict:
    out = {"python": platform.python_version()}
    for pkg in ("artifact", "numpy", "scipy", "mpmath"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = None
    return out


class Writer:
    def __init__(self, outdir: str):
        self.outdir = outdir
        self.files = []
        os.makedirs(outdir, exist_ok=True)

    def write(self, name: str, data: bytes) -> None:
        with open(os.path.join(self.outdir, name), "wb") as fh:
            fh.write(data)
        self.files.append({"name": name, "sha256": hashlib.sha256(data).hexdigest(), "bytes": len(data)})

    def manifest(self, command: str, cfg: dict, extra: dict) -> None:
        doc = {"command": command, "config": cfg, "versions": _versions(), **extra, "files": self.files}
        data = (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")
        with open(os.path.join(self.outdir, "manifest.json"), "wb") as fh:
            fh.write(data)


def _pair_devs(trajs: dict) -> dict:
    devs = {}
    for a, b in combinations(list(trajs), 2):
        devs[f"{a}|{b}"] = [float(np.max(np.abs(x[2] - y[2]))) for x, y in zip(trajs[a], trajs[b])]
    return devs


def cmd_solve(cfg: dict) -> int:
    J0 = build_initial(cfg)
    trajs, walls = trajectories(cfg, J0)
    w = Writer(cfg["out"])
    for name, rows in trajs.items():
        body = _csv_bytes(_state_header(J0.N), [_state_row(*r) for r in rows])
        w.write(f"{_safe(name)}.csv", body)
    devs = {k: max(v) for k, v in _pair_devs(trajs).items()}
    w.manifest("solve", cfg, {"wall_times": walls, "max_deviation": devs})
    return 0


def cmd_compare(cfg: dict) -> int:
    if len(cfg["paths"]) < 2:
        print("compare needs at least two paths, e.g. \"paths\": [\"spectral\", \"qr\"]", file=sys.stderr)
        return 1
    J0 = build_initial(cfg)
    trajs, walls = trajectories(cfg, J0)
    devs = _pair_devs(trajs)
    first = trajs[cfg["paths"][0]]
    header = ["t", "flow_l"] + [f"dev[{k}]" for k in devs]
    rows = [[_fmt(r[0]), str(r[1])] + [_fmt(devs[k][i]) for k in devs] for i, r in enumerate(first)]
    w = Writer(cfg["out"])
    w.write("compare.csv", _csv_bytes(header, rows))
    w.write("timing.csv", _csv_bytes(["path", "wall_seconds"], [[p, _fmt(s)] for p, s in walls.items()]))
    w.manifest("compare", cfg, {"wall_times": walls, "max_deviation": {k: max(v) for k, v in devs.items()}})
    return 0


def cmd_invariants(cfg: dict) -> int:
    J0 = build_initial(cfg)
    tols = dict(DEFAULT_TOLS)
    if cfg.get("tol") is not None:
        tols = {k: float(cfg["tol"]) for k in tols}
    t0 = time.perf_counter()
    report = run_suite(J0, np.random.default_rng(int(cfg["seed"])), tols)
    wall = time.perf_counter() - t0
    ok = all(r["pass"] for r in report)
    w = Writer(cfg["out"])
    w.write("invariants.json", (json.dumps({"all_pass": ok, "invariants": report}, indent=2) + "\n").encode())
    w.manifest("invariants", cfg, {"wall_times": {"suite": wall}})
    for r in report:
        status = "PASS" if r["pass"] else "FAIL"
        print(f"{status} {r['name']}: residual {r['residual']:.3e} (tol {r['tol']:.1e})")
    return 0 if ok else 3


COMMANDS = {"solve": cmd_solve, "invariants": cmd_invariants, "compare": cmd_compare}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="toda", description="Toda hierarchy solver and cross-checks")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("config")
    ap.add_argument("--out", default=None, help="output directory")
    ap.add_argument("--seed", type=int, default=None, help="seed for random data")
    ap.add_argument("--tol", type=float, default=None, help="override every invariant tolerance")
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config, {"out": args.out, "seed": args.seed, "tol": args.tol})
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    try:
        with np.errstate(over="raise", invalid="raise"):
            return COMMANDS[args.command](cfg)
    except NUMERIC_ERRORS as e:
        print(f"numeric failure ({type(e).__name__}): {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
