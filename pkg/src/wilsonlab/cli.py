"""Command-line front end: campaigns, registry listing and small utilities.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for invalid
input or configuration.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, checks, contin, frames, grid, serialize, sympl, synth
from . import groups as grp
from .errors import ConfigError, InvalidInput, WilsonLabError

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2
DEFAULT_GRID = {"d": 1, "P": 4, "r": 8}
_TOP_KEYS = {"seed", "checks", "grid", "group", "window", "tolerances", "params", "output",
             "autocorr", "family"}


# ---- configuration ------------------------------------------------------------

def load_config(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {str(path)!r} does not exist")
    try:
        cfg = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    cfg["_base"] = str(path.parent)
    return cfg


def _positive_int(value, what):
    if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
        raise ConfigError(f"{what} must be a positive integer, got {value!r}")
    return value


def resolve_config(cfg: dict, require_checks: bool = True) -> dict:
    """Fill defaults and validate; the result is what reports echo."""
    unknown = set(cfg) - _TOP_KEYS - {"_base"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    g = {**DEFAULT_GRID, **cfg.get("grid", {})}
    for k in ("d", "P", "r"):
        _positive_int(g.get(k), f"grid.{k}")
    out = {"grid": {k: g[k] for k in ("d", "P", "r")}}
    group = cfg.get("group", {})
    gens = group.get("generators", [[1] * g["d"]])
    out["group"] = {"dimension": int(group.get("dimension", g["d"])), "generators": gens}
    if out["group"]["dimension"] != g["d"]:
        raise ConfigError("group.dimension differs from grid.d")
    seed = cfg.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed must be an integer")
    out["seed"] = seed
    window = {"kind": "random", **cfg.get("window", {})}
    if window["kind"] not in ("random", "symmetric", "hermitian", "builtin", "file"):
        raise ConfigError(f"unknown window kind {window['kind']!r}")
    window.setdefault("seed", seed)
    if window["kind"] == "builtin":
        window.setdefault("name", "cos")
    if window["kind"] == "file":
        if "path" not in window:
            raise ConfigError("window.kind = 'file' needs window.path")
        p = Path(cfg.get("_base", ".")) / window["path"]
        if not p.exists():
            raise ConfigError(f"window file {str(p)!r} does not exist")
        window["path"] = str(p)
    out["window"] = window
    names = cfg.get("checks", [])
    if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
        raise ConfigError("checks must be an array of names")
    if require_checks and not names:
        raise ConfigError("the campaign lists no checks")
    for n in names:
        checks.get_check(n)
    out["checks"] = list(names)
    tols = cfg.get("tolerances", {})
    for name, tol in tols.items():
        checks.get_check(name)
        if isinstance(tol, bool) or not isinstance(tol, (int, float)) or not tol > 0:
            raise ConfigError(f"tolerance override for {name!r} must be positive, got {tol!r}")
    out["tolerances"] = {k: float(v) for k, v in tols.items()}
    params = cfg.get("params", {})
    for name in params:
        checks.get_check(name)
    out["params"] = {n: {**checks.get_check(n).defaults, **params.get(n, {})} for n in names}
    out["output"] = dict(cfg.get("output", {}))
    for key in ("autocorr", "family"):
        if key in cfg:
            out[key] = dict(cfg[key])
    return out


def _builtin_samples(name, spec, G):
    w = contin.builtin_window(name)
    if w.d != 1:
        raise ConfigError(f"builtin window {name!r} has no time-side samples")
    line = grid.periodize_sample(w, grid.make_grid(1, spec.P, spec.r)).values.reshape(-1)
    parts = list(G.blocks) + ([G.remainder] if G.remainder else [])
    factors = []
    for part in parts:
        fac = np.ones(())
        for _ in part:
            fac = np.multiply.outer(fac, line)
        factors.append(fac)
    return frames.separable_from_factors(spec, G, factors), factors


def build_context(rc: dict) -> checks.CheckContext:
    spec = grid.make_grid(**rc["grid"])
    G = grp.group_from_mapping(rc["group"])
    w = rc["window"]
    factors = None
    if w["kind"] == "random":
        g, factors = frames.random_separable_window(spec, G, int(w["seed"]))
    elif w["kind"] == "symmetric":
        g = grid.random_symmetric_window(spec, int(w["seed"]))
    elif w["kind"] == "hermitian":
        g = grid.random_hermitian_window(spec, int(w["seed"]))
    elif w["kind"] == "builtin":
        g, factors = _builtin_samples(w["name"], spec, G)
    else:
        g = serialize.read_signal(w["path"], spec)
    return checks.CheckContext(spec, G, g, factors, rc["seed"])


# ---- running campaigns ------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        return v if math.isfinite(v) else repr(v)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def run_one(name: str, ctx: checks.CheckContext, rc: dict) -> tuple:
    chk = checks.get_check(name)
    tol = rc["tolerances"].get(name, chk.tolerance)
    params = rc["params"].get(name, chk.defaults)
    record = {"check": name, "paper_claim_tag": chk.claim.tag, "tolerance": tol}
    grids, invalid = {}, False
    try:
        res = chk.run(ctx, params)
        value = float(res.value)
        record.update(parameters=res.parameters, value=value, details=res.details,
                      **{"pass": bool(value <= tol)})
        grids = res.grids
    except WilsonLabError as exc:
        invalid = isinstance(exc, InvalidInput)
        record.update(parameters=params, value=float("inf"), error=f"{type(exc).__name__}: {exc}",
                      **{"pass": False})
    return _jsonable(record), grids, invalid


def thread_count(requested: int | None = None) -> int:
    env = os.environ.get("WILSON_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            raise ConfigError(f"WILSON_THREADS must be an integer, got {env!r}") from None
    if requested:
        cap = min(cap, requested)
    return cap


def run_campaign(rc: dict, threads: int | None = None) -> tuple:
    """Run the checks in declaration order; returns (report, grids, invalid)."""
    ctx = build_context(rc)
    names = rc["checks"]
    workers = min(thread_count(threads), len(names))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda n: run_one(n, ctx, rc), names))
    records = [r for r, _, _ in results]
    grids = {}
    for _, g, _ in results:
        grids.update(g)
    passed = sum(r["pass"] for r in records)
    report = {
        "schema": SCHEMA,
        "tool_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "config": _jsonable(rc),
        "records": records,
        "summary": {"total": len(records), "passed": passed, "failed": len(records) - passed},
    }
    return report, grids, any(i for _, _, i in results)


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def write_outputs(report, grids, outdir: Path, csv: bool) -> Path:
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "report.json"
    path.write_text(dump_report(report))
    if csv:
        for name, (omega, values, err) in grids.items():
            serialize.write_grid_csv(outdir / f"{name}.csv", omega, values, err)
    return path


def _status_line(rec) -> str:
    mark = "PASS" if rec["pass"] else "FAIL"
    return f"{mark} {rec['check']} [{rec['paper_claim_tag']}] value={rec['value']} tol={rec['tolerance']}"


def cmd_run(args) -> int:
    rc = resolve_config(load_config(args.config))
    report, grids, invalid = run_campaign(rc, args.threads)
    for rec in report["records"]:
        print(_status_line(rec), file=sys.stderr)
    outdir = None
    if args.output:
        outdir = Path(args.output)
    elif rc["output"].get("directory"):
        outdir = Path(args.config).parent / rc["output"]["directory"]
    if outdir is not None:
        path = write_outputs(report, grids, outdir, bool(rc["output"].get("csv", False)))
        print(f"report written to {path}", file=sys.stderr)
    else:
        print(dump_report(report))
    if invalid:
        return EXIT_INVALID
    return EXIT_OK if report["summary"]["failed"] == 0 else EXIT_FAIL


def cmd_list_checks(args) -> int:
    rows = checks.claim_table()
    if args.json:
        print(json.dumps([{"check": n, "paper_claim_tag": t, "citation": c, "tolerance": tol}
                          for n, t, c, tol in rows], indent=2))
        return EXIT_OK
    for name, tag, citation, tol in rows:
        print(f"{name:24s} {tag:38s} tol={tol:g}")
        print(f"    {citation}")
    return EXIT_OK


def cmd_gram(args) -> int:
    F = serialize.read_family(args.family)
    rep = frames.frame_bounds(F)
    if args.csv:
        G = frames.gram(F)
        np.savetxt(args.csv, np.column_stack([G.real.reshape(-1), G.imag.reshape(-1)]),
                   delimiter=",", header="re,im", comments="", fmt="%.17g")
    print(json.dumps(_jsonable({"kind": F.kind, **rep.as_dict()}), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_autocorr(args) -> int:
    rc = resolve_config(load_config(args.config), require_checks=False)
    ac = rc.get("autocorr", {})
    out = args.output or ac.get("output")
    rows = []
    if "window" in ac:
        # continuous model: {T_{n a} M_{m b} g} with a built-in window
        w = contin.builtin_window(ac["window"])
        a, b = contin.LATTICES[ac.get("lattice", "M_{m/2}T_n")]
        n = int(ac.get("n_omega", 32))
        om = np.linspace(0, b, n, endpoint=False)
        alphas = ac.get("alphas", [[k / a] for k in range(-2, 3)])
        tab = contin.autocorr_continuous(w, b, a, alphas, om)
        for res in tab.values():
            rows.append((res.alpha, res.omega, res.values, res.error_bound))
    else:
        ctx = build_context(rc)
        build = {"gabor": synth.gabor_family, "wilson": synth.wilson_family}[ac.get("family", "gabor")]
        F = build(ctx.window, ctx.group)
        spec = ctx.spec
        axes = np.meshgrid(*([grid.frequencies(spec)] * spec.d), indexing="ij")
        om = np.column_stack([a.reshape(-1) for a in axes])
        alphas = [tuple(a) for a in ac.get("alphas", frames.dual_residues(F))]
        for al in alphas:
            rows.append((al, om, frames.autocorrelation(F, al).reshape(-1), 0.0))
    if out:
        Path(out).mkdir(parents=True, exist_ok=True)
        for al, om, vals, err in rows:
            tag = "_".join(f"{float(a):g}" for a in al)
            serialize.write_grid_csv(Path(out) / f"t_alpha_{tag}.csv", om, vals, err, al)
        print(f"wrote {len(rows)} grids to {out}", file=sys.stderr)
    else:
        import csv as _csv
        w = _csv.writer(sys.stdout)
        for al, om, vals, err in rows:
            om2 = np.asarray(om).reshape(len(vals), -1)
            for o, v in zip(om2, vals):
                w.writerow([*(float(a) for a in al), *(float(x) for x in o),
                            repr(float(v.real)), repr(float(v.imag)), repr(float(err))])
    return EXIT_OK


def cmd_decompose(args) -> int:
    A = serialize.read_matrix_csv(args.matrix)
    order = tuple(args.order.upper())
    if sorted(set(order)) != sorted(order) or not set(order) <= set("KLQR"):
        raise ConfigError("--order must list distinct blocks from K, L, Q, R")
    plan = sympl.decompose(A, order, args.cond)
    print(serialize.plan_to_json(plan))
    return EXIT_OK


def cmd_family(args) -> int:
    rc = resolve_config(load_config(args.config), require_checks=False)
    ctx = build_context(rc)
    build = {"gabor": synth.gabor_family, "wilson": synth.wilson_family}[args.kind]
    F = build(ctx.window, ctx.group)
    serialize.write_family(F, args.out)
    print(f"wrote {F.count} members to {args.out}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wilsonlab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"wilsonlab {__version__}")
    sub = ap.add_subparsers(dest="verb", required=True)
    p = sub.add_parser("run", help="run a verification campaign")
    p.add_argument("config")
    p.add_argument("--output", help="directory for report.json (default: config output.directory)")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("list-checks", help="list registered checks and their claim tags")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_list_checks)
    p = sub.add_parser("gram", help="frame report of a saved family")
    p.add_argument("family")
    p.add_argument("--csv", help="also write the Gram matrix as CSV")
    p.set_defaults(func=cmd_gram)
    p = sub.add_parser("autocorr", help="autocorrelation grids as CSV")
    p.add_argument("config")
    p.add_argument("--output")
    p.set_defaults(func=cmd_autocorr)
    p = sub.add_parser("decompose", help="operator plan for a symplectic matrix in CSV")
    p.add_argument("matrix")
    p.add_argument("--order", default="LKRQ")
    p.add_argument("--cond", type=float, default=sympl.COND_MAX)
    p.set_defaults(func=cmd_decompose)
    p = sub.add_parser("family", help="build a Gabor or Wilson family and save it")
    p.add_argument("config")
    p.add_argument("--kind", choices=("gabor", "wilson"), default="wilson")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_family)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInput, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except WilsonLabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
