"""Command-line front end: build/cache bases, evaluate kernels on point
files, and run verification suites.

Exit codes: 0 success, 1 at least one check failed, 2 configuration or I/O
error.  Reports are deterministic given (config, seed); see VerifyConfig.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from dataclasses import fields, replace

import numpy as np

try:
    import jsonschema
except ImportError:  # pragma: no cover
    jsonschema = None

from . import hermite
from .kernels import (
    DEFAULT_CONFIG,
    KernelConfig,
    OrbitTooClose,
    dunkl_kernel,
    heat_kernel,
    riesz_kernel,
)
from .reflection import InvalidRootSystem, root_system
from .verify import DEFAULT_VERIFY, ALL_CHECKS, VerifyConfig, run_checks


class ConfigError(ValueError):
    pass


_KAPPA_SCHEMA = {
    "oneOf": [
        {"type": "number", "minimum": 0},
        {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1},
    ]
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        # either the flat keys (group/kappa/roots) or a root_system block
        "root_system": {
            "type": "object",
            "properties": {
                "type": {"type": "string", "enum": ["catalogue", "explicit"]},
                "name": {"type": "string"},
                "dim": {"type": "integer", "minimum": 1},
                "roots": {
                    "type": "array",
                    "items": {"type": "array", "items": {"type": "number"}},
                },
                "multiplicity": _KAPPA_SCHEMA,
            },
            "required": ["type"],
            "additionalProperties": False,
        },
        "group": {"type": "string"},
        "dim": {"type": "integer", "minimum": 1},
        "kappa": _KAPPA_SCHEMA,
        "roots": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}},
        },
        "degree": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer"},
        "checks": {"type": "array", "items": {"type": "string", "enum": sorted(ALL_CHECKS)}},
        "arithmetic": {"type": "string", "enum": ["auto", "exact", "float"]},
        "out": {"type": "string"},
        "cache_dir": {"type": "string"},
        "kernel": {"type": "object"},
        "verify": {"type": "object"},
    },
    "additionalProperties": False,
}

DEFAULTS = {
    "group": "z2",
    "kappa": 0.5,
    "degree": 8,
    "seed": DEFAULT_VERIFY.seed,
    "arithmetic": "auto",
    "checks": sorted(ALL_CHECKS),
}


def load_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                user = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        cfg.update(user)
    for key in ("group", "degree", "seed", "out"):
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            cfg[key] = val
    if getattr(args, "kappa", None) is not None:
        parts = [float(s) for s in str(args.kappa).split(",")]
        cfg["kappa"] = parts[0] if len(parts) == 1 else parts
    if getattr(args, "checks", None) is not None:
        cfg["checks"] = [s for s in args.checks.split(",") if s]
    if jsonschema is not None:
        try:
            jsonschema.validate(cfg, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"config validation failed: {exc.message}") from exc
    return cfg


def _build_root_system(cfg):
    block = cfg.get("root_system")
    try:
        if block is not None:
            mult = block.get("multiplicity", cfg.get("kappa", 0.0))
            if block["type"] == "explicit":
                if "roots" not in block:
                    raise ConfigError("explicit root_system needs a 'roots' list")
                return root_system(roots=block["roots"], multiplicity=mult)
            if "name" not in block:
                raise ConfigError("catalogue root_system needs a 'name'")
            return root_system(block["name"], dim=block.get("dim"), multiplicity=mult)
        kappa = cfg.get("kappa", 0.0)
        if "roots" in cfg:
            return root_system(roots=cfg["roots"], multiplicity=kappa)
        return root_system(cfg["group"], dim=cfg.get("dim"), multiplicity=kappa)
    except InvalidRootSystem as exc:
        raise ConfigError(str(exc)) from exc


def _cache_key(cfg) -> str:
    blob = json.dumps(
        {
            k: cfg.get(k)
            for k in ("root_system", "group", "dim", "kappa", "roots", "degree", "arithmetic")
        },
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:24]


def _get_basis(cfg, basis_file=None):
    if basis_file:
        return hermite.load_basis(basis_file)
    cache_dir = cfg.get("cache_dir")
    if cache_dir:
        path = os.path.join(cache_dir, f"basis-{_cache_key(cfg)}.json")
        if os.path.exists(path):
            return hermite.load_basis(path)
    rs = _build_root_system(cfg)
    exact = {"auto": None, "exact": True, "float": False}[cfg.get("arithmetic", "auto")]
    basis = hermite.build_basis(rs, cfg["degree"], exact=exact)
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        hermite.save_basis(basis, path)
    return basis


def _sub_config(cls, default, overrides: dict):
    if not overrides:
        return default
    known = {f.name for f in fields(cls)}
    unknown = set(overrides) - known
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} fields: {sorted(unknown)}")
    coerced = {}
    for k, v in overrides.items():
        coerced[k] = tuple(v) if isinstance(v, list) else v
    return replace(default, **coerced)


def cmd_basis(args) -> int:
    cfg = load_config(args)
    basis = _get_basis(cfg)
    out = cfg.get("out") or f"basis-{_cache_key(cfg)}.json"
    hermite.save_basis(basis, out)
    print(f"group={basis.rs.name} dim={basis.rs.dim} kappa={basis.rs.multiplicity.tolist()}")
    print(f"degree={basis.N} basis_size={basis.size} arithmetic={'exact' if basis.exact else 'float'}")
    print(f"c_kappa={basis.c_kappa!r} m_kappa={basis.m_kappa!r} gamma={basis.gamma!r}")
    print(f"written: {out}")
    return 0


def _read_points(path, expected_cols):
    try:
        with open(path) as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    except OSError as exc:
        raise ConfigError(f"cannot read points file: {exc}") from exc
    if rows and not _is_float(rows[0][0]):
        rows = rows[1:]  # header
    out = []
    for r in rows:
        vals = [float(v) for v in r if v.strip() != ""]
        if len(vals) != expected_cols:
            raise ConfigError(
                f"points row has {len(vals)} columns, expected {expected_cols}"
            )
        out.append(vals)
    return out


def _is_float(s):
    try:
        float(s)
        return True
    except ValueError:
        return False


def cmd_eval(args) -> int:
    cfg = load_config(args)
    basis = _get_basis(cfg, args.basis_file)
    kernel_cfg = _sub_config(KernelConfig, DEFAULT_CONFIG, cfg.get("kernel", {}))
    d = basis.rs.dim
    what = args.what
    if what == "dunkl-kernel":
        cols, header = 2 * d, ["x" + str(i) for i in range(d)] + ["y" + str(i) for i in range(d)]
    elif what == "heat-kernel":
        cols, header = 1 + 2 * d, ["t"] + ["x" + str(i) for i in range(d)] + ["y" + str(i) for i in range(d)]
    else:
        cols, header = 1 + 2 * d, ["j"] + ["x" + str(i) for i in range(d)] + ["y" + str(i) for i in range(d)]
    points = _read_points(args.points, cols)
    out_path = cfg.get("out") or "eval.csv"
    with open(out_path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header + ["value", "status"])
        for row in points:
            try:
                if what == "dunkl-kernel":
                    x, y = np.array(row[:d]), np.array(row[d:])
                    val = dunkl_kernel(basis, x, y, kernel_cfg)
                elif what == "heat-kernel":
                    t, x, y = row[0], np.array(row[1 : 1 + d]), np.array(row[1 + d :])
                    val = heat_kernel(basis, t, x, y, kernel_cfg)
                else:
                    j, x, y = int(row[0]), np.array(row[1 : 1 + d]), np.array(row[1 + d :])
                    val = riesz_kernel(basis, j, x, y, kernel_cfg)
                wr.writerow(row + [repr(float(val)), "ok"])
            except OrbitTooClose:
                wr.writerow(row + ["", "orbit-too-close"])
    print(f"written: {out_path}")
    return 0


def cmd_verify(args) -> int:
    cfg = load_config(args)
    basis = _get_basis(cfg, args.basis_file)
    kernel_cfg = _sub_config(KernelConfig, DEFAULT_CONFIG, cfg.get("kernel", {}))
    vcfg = _sub_config(VerifyConfig, DEFAULT_VERIFY, cfg.get("verify", {}))
    vcfg = replace(vcfg, seed=cfg["seed"])
    names = cfg.get("checks") or []
    report = run_checks(basis, names, vcfg, kernel_cfg)
    out = cfg.get("out") or "report"
    with open(out + ".json", "w") as fh:
        fh.write(report.to_json())
    with open(out + ".csv", "w") as fh:
        fh.write(report.constants_csv())
    for c in report.checks:
        print(f"{c.name:26s} {c.status.upper():5s} ({c.runtime_ms:8.1f} ms)")
    print(f"written: {out}.json, {out}.csv")
    return 0 if report.all_passed else 1


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="dunklriesz",
        description="Dunkl-Hermite spectral systems, heat kernels, and Riesz "
        "transform verification",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--group", help="catalogue name: z2, z2^d, a2, b2, i2(m)")
        p.add_argument("--kappa", help="multiplicity (scalar or comma list per orbit)")
        p.add_argument("--degree", type=int, help="basis truncation degree")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output path (or prefix for verify)")

    p = sub.add_parser("basis", help="build and serialize a Hermite basis")
    common(p)
    p.set_defaults(fn=cmd_basis)

    p = sub.add_parser("eval", help="evaluate kernels on a CSV of points")
    common(p)
    p.add_argument("--what", required=True, choices=["dunkl-kernel", "heat-kernel", "riesz-kernel"])
    p.add_argument("--points", required=True, help="CSV of point tuples")
    p.add_argument("--basis-file", help="use a serialized basis instead of building")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("verify", help="run verification checks and write reports")
    common(p)
    p.add_argument("--checks", help="comma-separated check names (default: all)")
    p.add_argument("--basis-file", help="use a serialized basis instead of building")
    p.set_defaults(fn=cmd_verify)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, InvalidRootSystem, hermite.BasisChecksum) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
