"""Command-line front end.

Subcommands: classify, integrate, reconstruct, verify, sweep.  Exit codes:
0 success, 1 verification failure, 2 bad input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from . import __version__
from .analysis import S_TAIL, check_eta_monotone, qualitative_report, self_intersects
from .errors import HyperCSFError, InputError, NotOnInvariantSet, NumericalError
from .flow import csf_residual
from .frame import reconstruct, soliton_residual
from .minkowski import (
    ISOMETRY_FOR,
    CausalKind,
    IsometryKind,
    canonical_direction,
    classify,
    minkowski_inner,
)
from .models import to_disk, to_half_plane
from .soliton_ode import (
    FamilyKind,
    Manifold,
    SolitonParams,
    SolitonState,
    classify_initial,
    integrate,
    quadratic_invariant,
    seed_invariant_manifold,
)

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_PSI0 = {
    FamilyKind.H: (math.sqrt(2.0), 1.0, 0.0),
    FamilyKind.C: (1.0, 1.0, 0.0),
    FamilyKind.S: (0.0, 0.6, 0.8),
}
DEFAULT_RANGES = {
    FamilyKind.H: ((-2.0, 2.0), (-2.0, 2.0)),  # tau0, eta0
    FamilyKind.C: ((-2.0, 2.0), (-2.0, 2.0)),  # tau0, eta0
    FamilyKind.S: ((-2.0, 2.0), (0.0, 2.0 * math.pi)),  # alpha0, angle
}
SEED_EPSILON = 1e-6
SWEEP_SUCCESS = 0.99
CSF_DT = 1e-5
CSF_T = 0.5
EMBED_SAMPLES = 4001
VERIFY_THRESHOLDS = {
    "soliton_residual": 1e-7,
    "csf_residual": 1e-6,
    "conservation": 1e-9,
}
SVG_SIZE = 1000
SVG_DISK_RADIUS = 450


@dataclass
class RunConfig:
    a: float = 1.0
    family: FamilyKind | None = None
    psi0: tuple[float, float, float] | None = None
    window: tuple[float, float] | None = None
    rtol: float = 1e-12
    atol: float = 1e-14
    format: str | None = None
    model: str = "hyperboloid"
    out: str | None = None
    grid: tuple[int, int] = (11, 11)
    range1: tuple[float, float] | None = None
    range2: tuple[float, float] | None = None
    seed_manifold: tuple[Manifold, int] | None = None
    kind: IsometryKind | None = None
    samples: int | None = None

    def __post_init__(self):
        if not self.a > 0:
            raise InputError(f"a must be positive, got {self.a}")
        if min(self.grid) < 1:
            raise InputError(f"sweep counts must be >= 1, got {self.grid}")
        if self.samples is not None and self.samples < 4:
            raise InputError("samples must be at least 4")


# ---------------------------------------------------------------- parsing

def _floats(text: str, n: int, sep: str) -> tuple[float, ...]:
    parts = [p for p in text.replace(" ", "").split(sep)]
    try:
        values = tuple(float(p) for p in parts)
    except ValueError:
        raise InputError(f"expected {n} numbers separated by {sep!r}, got {text!r}") from None
    if len(values) != n or not all(map(math.isfinite, values)):
        raise InputError(f"expected {n} finite numbers separated by {sep!r}, got {text!r}")
    return values


def _grid(text: str) -> tuple[int, int]:
    t = text.lower().replace("×", "x")
    try:
        n, m = (int(p) for p in t.split("x"))
    except ValueError:
        raise InputError(f"grid must look like NxM, got {text!r}") from None
    return n, m


def _seed(text: str) -> tuple[Manifold, int]:
    if len(text) != 2 or text[0] not in "us" or text[1] not in "+-":
        raise InputError(f"seed-manifold must be one of u+, u-, s+, s-, got {text!r}")
    return Manifold(text[0]), 1 if text[1] == "+" else -1


def _choice(enum_cls, text: str):
    for member in enum_cls:
        if text.lower() in (member.value.lower(), member.name.lower()):
            return member
    raise InputError(f"unknown {enum_cls.__name__} {text!r}")


_PARSERS = {
    "a": float,
    "family": lambda t: _choice(FamilyKind, t),
    "psi0": lambda t: _floats(t, 3, ","),
    "window": lambda t: _floats(t, 2, ":"),
    "rtol": float,
    "atol": float,
    "format": str,
    "model": str,
    "out": str,
    "grid": _grid,
    "range1": lambda t: _floats(t, 2, ":"),
    "range2": lambda t: _floats(t, 2, ":"),
    "seed_manifold": _seed,
    "kind": lambda t: _choice(IsometryKind, t),
    "samples": int,
}


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected key = value")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _PARSERS:
            raise InputError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge flags over the config file over the defaults."""
    raw = read_config_file(args.config) if getattr(args, "config", None) else {}
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            raw[f.name] = value
    parsed = {}
    for key, value in raw.items():
        try:
            parsed[key] = _PARSERS[key](value) if isinstance(value, str) else value
        except ValueError as exc:
            raise InputError(f"bad value for {key}: {value!r} ({exc})") from None
    return RunConfig(**parsed)


# ---------------------------------------------------------------- helpers

def resolve_initial(cfg: RunConfig) -> tuple[FamilyKind, SolitonState]:
    if cfg.seed_manifold is not None:
        which, sign = cfg.seed_manifold
        return FamilyKind.S, seed_invariant_manifold(cfg.a, which, SEED_EPSILON, sign)
    if cfg.psi0 is not None:
        family = classify_initial(cfg.psi0)
        if cfg.family is not None and cfg.family is not family:
            raise NotOnInvariantSet(
                f"psi0 lies on family {family.value}, not the requested {cfg.family.value}"
            )
        return family, SolitonState(*cfg.psi0)
    family = cfg.family or FamilyKind.H
    return family, SolitonState(*DEFAULT_PSI0[family])


def _params(cfg: RunConfig, family, psi0, default_window) -> SolitonParams:
    lo, hi = cfg.window or default_window
    return SolitonParams(cfg.a, family, psi0, lo, hi, cfg.rtol, cfg.atol, cfg.samples)


def _tail(window) -> float:
    return min(S_TAIL, -window[0], window[1])


def _report(traj):
    lo, hi = traj.window
    return qualitative_report(
        traj, s_tail=_tail(traj.window), embed_half_width=min(20.0, -lo, hi),
        embed_samples=EMBED_SAMPLES,
    ).to_dict()


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (IsometryKind, FamilyKind, CausalKind, Manifold)):
        return obj.value
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def write_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _config_dict(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d.pop("out")
    if cfg.seed_manifold is not None:
        d["seed_manifold"] = cfg.seed_manifold[0].value + ("+" if cfg.seed_manifold[1] > 0 else "-")
    return d


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def svg_polyline(points2d, model: str) -> str:
    """A 1000x1000 SVG of a planar polyline.

    In the disk model the unit disk is drawn with radius 450 about the
    centre; other models are scaled to fit their bounding box.
    """
    p = np.asarray(points2d, dtype=float)
    c = SVG_SIZE / 2
    parts = []
    if model == "disk":
        scale, ox, oy = SVG_DISK_RADIUS, 0.0, 0.0
        parts.append(
            f'<circle cx="{c:g}" cy="{c:g}" r="{SVG_DISK_RADIUS}" fill="none" stroke="black" stroke-width="1"/>'
        )
    else:
        lo, hi = p.min(axis=0), p.max(axis=0)
        span = float(max(hi - lo)) or 1.0
        scale = 0.9 * SVG_SIZE / span
        ox, oy = 0.5 * (lo + hi)
    xs = c + scale * (p[:, 0] - ox)
    ys = c - scale * (p[:, 1] - oy)
    pts = " ".join(f"{x:.3f},{y:.3f}" for x, y in zip(xs, ys))
    parts.append(f'<polyline points="{pts}" fill="none" stroke="#1f4e9c" stroke-width="1.5"/>')
    body = "\n  ".join(parts)
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SVG_SIZE}" '
        f'height="{SVG_SIZE}" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">\n  {body}\n</svg>\n'
    )


# ---------------------------------------------------------------- commands

def cmd_classify(args, cfg: RunConfig) -> int:
    v = np.array(args.vector, dtype=float)
    kind = classify(v)
    q = float(minkowski_inner(v, v))
    a = abs(v[0]) if kind is CausalKind.LIGHTLIKE else math.sqrt(abs(q))
    e = canonical_direction(kind)
    if (cfg.format or "text") == "json":
        _emit(write_json({
            "vector": v.tolist(), "kind": kind.value, "e": e.tolist(), "a": a,
            "isometry": ISOMETRY_FOR[kind].value,
        }), cfg)
    else:
        e_txt = ",".join(f"{x:g}" for x in e)
        _emit(f"{kind.value.capitalize()}, e=({e_txt}), a={a:.17g}\n", cfg)
    return EXIT_OK


def cmd_integrate(args, cfg: RunConfig) -> int:
    family, psi0 = resolve_initial(cfg)
    traj = integrate(_params(cfg, family, psi0, (-40.0, 40.0)))
    drift = np.abs(quadratic_invariant(traj.psi) - family.delta)
    header = ["s", "alpha", "tau", "eta", "invariant_drift"]
    rows = np.column_stack([traj.s, traj.psi, drift])
    if (cfg.format or "csv") == "csv":
        _emit(write_csv(header, rows), cfg)
    elif cfg.format == "json":
        _emit(write_json({
            "config": _config_dict(cfg),
            "family": family.value,
            "columns": header,
            "rows": rows.tolist(),
            "report": _report(traj),
        }), cfg)
    else:
        raise InputError(f"integrate writes csv or json, not {cfg.format}")
    return EXIT_OK


def _curve(cfg: RunConfig):
    family, psi0 = resolve_initial(cfg)
    traj = integrate(_params(cfg, family, psi0, (-20.0, 20.0)))
    return reconstruct(traj)


def cmd_reconstruct(args, cfg: RunConfig) -> int:
    curve = _curve(cfg)
    if cfg.model == "hyperboloid":
        coords, names = curve.X, ["x1", "x2", "x3"]
        planar = curve.X[:, 1:]
    elif cfg.model == "disk":
        coords = planar = to_disk(curve.X)
        names = ["x", "y"]
    elif cfg.model == "halfplane":
        coords = planar = to_half_plane(curve.X)
        names = ["x", "y"]
    else:
        raise InputError(f"model must be hyperboloid, disk or halfplane, got {cfg.model!r}")
    fmt = cfg.format or "csv"
    if fmt == "csv":
        _emit(write_csv(["s", *names, "k"], np.column_stack([curve.s, coords, curve.k])), cfg)
    elif fmt == "svg":
        _emit(svg_polyline(planar, cfg.model), cfg)
    elif fmt == "json":
        _emit(write_json({
            "config": _config_dict(cfg), "columns": ["s", *names, "k"],
            "rows": np.column_stack([curve.s, coords, curve.k]).tolist(),
        }), cfg)
    else:
        raise InputError(f"unknown format {fmt!r}")
    return EXIT_OK


def verify_checks(cfg: RunConfig) -> list[dict]:
    curve = _curve(cfg)
    traj = curve.trajectory
    kind = cfg.kind or ISOMETRY_FOR[traj.family.causal_kind]
    values = {
        "soliton_residual": soliton_residual(curve, cfg.a * curve.e),
        "csf_residual": csf_residual(curve, kind, cfg.a, CSF_T, CSF_DT),
        "conservation": traj.max_invariant_drift,
    }
    checks = [
        {"name": name, "value": value, "threshold": VERIFY_THRESHOLDS[name],
         "passed": bool(value <= VERIFY_THRESHOLDS[name])}
        for name, value in values.items()
    ]
    checks.append({"name": "eta_monotone", "value": None, "threshold": None,
                   "passed": check_eta_monotone(traj)})
    s = np.linspace(curve.s[0], curve.s[-1], EMBED_SAMPLES)
    embedded = not self_intersects(to_disk(reconstruct(traj, s=s).X))
    checks.append({"name": "embedded", "value": None, "threshold": None, "passed": embedded})
    return checks


def cmd_verify(args, cfg: RunConfig) -> int:
    checks = verify_checks(cfg)
    failed = [c["name"] for c in checks if not c["passed"]]
    _emit(write_json({"config": _config_dict(cfg), "passed": not failed, "checks": checks}), cfg)
    if failed:
        print("verification failed: " + ", ".join(failed), file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _axis(rng, count, periodic):
    lo, hi = rng
    if count == 1:
        return np.array([0.5 * (lo + hi)])
    if periodic:
        return lo + (hi - lo) * np.arange(count) / count
    return np.linspace(lo, hi, count)


def sweep_initial(family: FamilyKind, u: float, v: float) -> tuple[float, float, float]:
    """Point of the constraint set for grid coordinates ``(u, v)``.

    H and C: ``(tau0, eta0)`` with alpha0 > 0 from the invariant.  S:
    ``(alpha0, theta)`` with ``(tau0, eta0)`` on the circle of radius
    ``sqrt(1 + alpha0^2)``.
    """
    if family is FamilyKind.H:
        return (math.sqrt(1.0 + u * u + v * v), u, v)
    if family is FamilyKind.C:
        return (math.hypot(u, v), u, v)
    r = math.sqrt(1.0 + u * u)
    return (u, r * math.cos(v), r * math.sin(v))


def sweep_grid(cfg: RunConfig, family: FamilyKind) -> list[tuple[int, int, tuple]]:
    r1, r2 = DEFAULT_RANGES[family]
    r1, r2 = cfg.range1 or r1, cfg.range2 or r2
    periodic = family is FamilyKind.S and cfg.range2 is None
    us = _axis(r1, cfg.grid[0], False)
    vs = _axis(r2, cfg.grid[1], periodic)
    return [(i, j, sweep_initial(family, float(u), float(v)))
            for i, u in enumerate(us) for j, v in enumerate(vs)]


def run_cell(job):
    cfg, family, (i, j, psi0) = job
    try:
        traj = integrate(_params(cfg, family, psi0, (-40.0, 40.0)))
        report = _report(traj)
        return {"cell": [i, j], "status": "ok", **report}
    except HyperCSFError as exc:
        return {"cell": [i, j], "status": "error", "family": family.value, "a": cfg.a,
                "psi0": list(psi0), "error": f"{type(exc).__name__}: {exc}"}


def sweep_workers() -> int:
    cap = os.environ.get("HYPERCSF_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise InputError(f"HYPERCSF_THREADS must be an integer, got {cap!r}") from None
    return n


def run_sweep(cfg: RunConfig, family: FamilyKind, workers: int | None = None) -> list[dict]:
    jobs = [(cfg, family, cell) for cell in sweep_grid(cfg, family)]
    workers = sweep_workers() if workers is None else workers
    if workers <= 1 or len(jobs) == 1:
        return [run_cell(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_cell, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def cmd_sweep(args, cfg: RunConfig) -> int:
    family = cfg.family or FamilyKind.H
    reports = run_sweep(replace(cfg, out=None), family)
    _emit(write_json(reports), cfg)
    ok = sum(r["status"] == "ok" for r in reports)
    if ok < SWEEP_SUCCESS * len(reports):
        print(f"sweep: only {ok}/{len(reports)} cells succeeded", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file; flags override it")
    common.add_argument("--a", type=str, help="rate a > 0 (default 1)")
    common.add_argument("--family", help="H, C or S")
    common.add_argument("--psi0", help="alpha,tau,eta")
    common.add_argument("--window", help="s_min:s_max")
    common.add_argument("--rtol", help="relative tolerance")
    common.add_argument("--atol", help="absolute tolerance")
    common.add_argument("--model", help="hyperboloid, disk or halfplane")
    common.add_argument("--format", help="csv, json, svg (classify: text or json)")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--grid", help="sweep counts NxM")
    common.add_argument("--range1", help="first sweep coordinate lo:hi")
    common.add_argument("--range2", help="second sweep coordinate lo:hi")
    common.add_argument("--seed-manifold", dest="seed_manifold", help="u+, u-, s+ or s-")
    common.add_argument("--kind", help="isometry kind used by verify (rotation, parabolic, boost)")
    common.add_argument("--samples", help="number of output samples")

    parser = argparse.ArgumentParser(prog="hypercsf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("classify", parents=[common], help="causal kind of a vector")
    p.add_argument("vector", nargs=3, type=float)
    p.set_defaults(func=cmd_classify)
    for name, func, text in (
        ("integrate", cmd_integrate, "integrate the reduced system"),
        ("reconstruct", cmd_reconstruct, "rebuild the curve and project it"),
        ("verify", cmd_verify, "run the soliton checks on one configuration"),
        ("sweep", cmd_sweep, "qualitative reports over a grid of initial data"),
    ):
        sub.add_parser(name, parents=[common], help=text).set_defaults(func=func)
    return parser


_VALUE_FLAGS = ("--window", "--psi0", "--range1", "--range2", "--a")


def _glue_negative_values(argv):
    """``--window -10:10`` -> ``--window=-10:10`` so argparse keeps the value."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_negative_values(argv))
    try:
        cfg = build_config(args)
        return args.func(args, cfg)
    except InputError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
