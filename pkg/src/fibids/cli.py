"""Command-line interface: ``fibids {bands, ids, holder, dynamics, verify}``.

Exit codes: 0 success, 1 usage or input error, 2 computation error. Every
failure prints one line ``ERROR <code>: <reason>`` on stderr.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import export
from .acceptance import run_all
from .approximants import SCAN_LEVEL_CAP, TREE_LEVEL_CAP, build_band_tree, scan_bands
from .dynamics import TorusPoint, escape_raster, per2_solve, semiconjugacy_defect
from .errors import FibError, UnsupportedCouplingError
from .ids_engine import IdsSample, ids_free, ids_grid
from .regularity import empirical_holder


class UsageError(Exception):
    code = "usage"


@dataclass
class RunConfig:
    coupling: float | None = None
    max_level: int | None = None
    format: str = "csv"
    output: str | None = None
    seed: int = 0
    max_iter: int = 200
    kmax: int = 10

    @classmethod
    def keys(cls) -> set:
        return {f.name for f in fields(cls)}


# config-file spellings accepted on top of the field names
_ALIASES = {"lambda": "coupling", "level": "max_level", "max-iter": "max_iter"}
_CASTS = {"coupling": float, "max_level": int, "seed": int, "max_iter": int, "kmax": int,
          "format": str, "output": str}


def read_config(path: str) -> dict:
    """key=value lines; '#' starts a comment; unknown keys are rejected."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    out = {}
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = _ALIASES.get(key, key)
        if key not in RunConfig.keys():
            raise UsageError(f"{path}:{num}: unknown key {key!r}")
        try:
            out[key] = _CASTS[key](value)
        except ValueError:
            raise UsageError(f"{path}:{num}: bad value for {key}: {value!r}") from None
    return out


def resolve_config(args) -> RunConfig:
    cfg = read_config(args.config) if args.config else {}
    for key in RunConfig.keys():
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    rc = RunConfig(**cfg)
    if rc.format not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {rc.format!r}")
    if rc.coupling is not None and not (math.isfinite(rc.coupling) and rc.coupling >= 0):
        raise UsageError(f"lambda must be a finite number >= 0, got {rc.coupling}")
    return rc


def _need(value, name):
    if value is None:
        raise UsageError(f"--{name} is required")
    return value


def parse_grid(spec: str) -> np.ndarray:
    try:
        lo, hi, count = spec.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise UsageError(f"grid must look like lo:hi:count, got {spec!r}") from None
    if count < 1:
        raise UsageError("grid count must be >= 1")
    return np.linspace(lo, hi, count)


def read_energies(path: str) -> list:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read energies {path}: {exc.strerror}") from None
    out = []
    for num, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if line:
            try:
                out.append(float(line))
            except ValueError:
                raise UsageError(f"{path}:{num}: not a number: {line!r}") from None
    return out


# ---------------------------------------------------------------- commands


def cmd_bands(args, rc: RunConfig) -> int:
    lam = _need(rc.coupling, "lambda")
    level = _need(rc.max_level, "level")
    if args.scan:
        spectrum = scan_bands(lam, level)
        text = export.render(export.band_records(spectrum), export.BAND_FIELDS, rc.format)
    else:
        try:
            tree = build_band_tree(lam, level, precision=args.precision)
        except UnsupportedCouplingError:
            raise UnsupportedCouplingError("hierarchy requires lambda > 4; use --scan") from None
        if rc.format == "json":
            text = export.tree_json(tree)
        else:
            text = export.to_csv(export.band_records(tree.bands(level)), export.BAND_FIELDS)
    export.write_text(text, rc.output)
    return 0


def cmd_ids(args, rc: RunConfig) -> int:
    if (args.grid is None) == (args.energies is None):
        raise UsageError("give exactly one of --grid or --energies")
    energies = parse_grid(args.grid) if args.grid else read_energies(args.energies)
    if args.free:
        samples = [IdsSample(float(E), 0.0, -1, float(ids_free(E)), 0.0) for E in energies]
        records = export.ids_records(samples)
        for r in records:
            r["level"] = None
    else:
        lam = _need(rc.coupling, "lambda")
        level = _need(rc.max_level, "level")
        records = export.ids_records(ids_grid(lam, energies, level))
    export.write_text(export.render(records, export.IDS_FIELDS, rc.format), rc.output)
    return 0


def cmd_holder(args, rc: RunConfig) -> int:
    lam = _need(rc.coupling, "lambda")
    kmax = rc.kmax
    if not args.kmin <= kmax:
        raise UsageError(f"--kmin {args.kmin} exceeds --kmax {kmax}")
    depth = rc.max_level if rc.max_level is not None else kmax + 2
    tree = build_band_tree(lam, depth)
    estimates = empirical_holder(tree, range(args.kmin, kmax + 1))
    text = export.render(export.holder_records(estimates), export.HOLDER_FIELDS, rc.format)
    export.write_text(text, rc.output)
    return 0


def cmd_dynamics(args, rc: RunConfig) -> int:
    if args.what == "per2":
        p = per2_solve(_need(rc.coupling, "lambda"))
        records = [{"lambda": p.coupling, "x": p.point.x, "y": p.point.y, "z": p.point.z,
                    "mu_u": p.mu_u}]
        text = export.render(records, ("lambda", "x", "y", "z", "mu_u"), rc.format)
    elif args.what == "escape-raster":
        lam = _need(rc.coupling, "lambda")
        energies = parse_grid(_need(args.grid, "grid"))
        rows = escape_raster(lam, energies, rc.max_iter)
        text = export.render(export.raster_records(rows), export.RASTER_FIELDS, rc.format)
    else:
        if args.samples:
            rng = np.random.default_rng(rc.seed)
            pts = [TorusPoint(float(a), float(b)) for a, b in rng.random((args.samples, 2))]
        else:
            g = np.arange(args.size) / args.size
            pts = [TorusPoint(float(a), float(b)) for a in g for b in g]
        worst = max(semiconjugacy_defect(t) for t in pts)
        records = [{"points": len(pts), "seed": rc.seed if args.samples else None,
                    "max_defect": worst}]
        text = export.render(records, ("points", "seed", "max_defect"), rc.format)
    export.write_text(text, rc.output)
    return 0


def cmd_verify(args, rc: RunConfig) -> int:
    results = run_all(sys.stdout)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed"
          + (f"; failing: {failed}" if failed else ""))
    return 0 if not failed else 2


# ---------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; flags override it")
    common.add_argument("--seed", type=int, help="seed for randomized sweeps")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--output", "-o", help="output file (default stdout)")

    p = _Parser(prog="fibids", description="Fibonacci Hamiltonian spectra, IDS and regularity")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bands", parents=[common], help="band edges of sigma_level")
    b.add_argument("--lambda", dest="coupling", type=float)
    b.add_argument("--level", dest="max_level", type=int)
    b.add_argument("--scan", action="store_true", help="flat scan, any lambda >= 0")
    b.add_argument("--precision", choices=("auto", "float", "mp"), default="auto")
    b.set_defaults(func=cmd_bands)

    i = sub.add_parser("ids", parents=[common], help="integrated density of states")
    i.add_argument("--lambda", dest="coupling", type=float)
    i.add_argument("--level", dest="max_level", type=int)
    i.add_argument("--grid", help="lo:hi:count")
    i.add_argument("--energies", help="file with one energy per line")
    i.add_argument("--free", action="store_true", help="closed-form lambda = 0 IDS")
    i.set_defaults(func=cmd_ids)

    h = sub.add_parser("holder", parents=[common], help="empirical Hoelder exponents")
    h.add_argument("--lambda", dest="coupling", type=float)
    h.add_argument("--kmin", type=int, default=4)
    h.add_argument("--kmax", type=int)
    h.add_argument("--level", dest="max_level", type=int, help="tree depth (default kmax + 2)")
    h.set_defaults(func=cmd_holder)

    d = sub.add_parser("dynamics", parents=[common], help="trace-map dynamics")
    d.add_argument("what", choices=("per2", "escape-raster", "semiconj"))
    d.add_argument("--lambda", dest="coupling", type=float)
    d.add_argument("--grid", help="energy grid lo:hi:count (escape-raster)")
    d.add_argument("--max-iter", dest="max_iter", type=int)
    d.add_argument("--size", type=int, default=200, help="torus grid side (semiconj)")
    d.add_argument("--samples", type=int, default=0, help="random torus points instead of a grid")
    d.set_defaults(func=cmd_dynamics)

    v = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    v.set_defaults(func=cmd_verify)
    return p


_VALUE_FLAGS = ("--grid", "--lambda", "--energies")


def _glue_values(argv):
    """Turn ``--grid -2:2:5`` into ``--grid=-2:2:5`` so argparse keeps the value."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_glue_values(argv))
        rc = resolve_config(args)
        if rc.max_level is not None and not 0 <= rc.max_level <= max(TREE_LEVEL_CAP, SCAN_LEVEL_CAP):
            raise UsageError(f"level {rc.max_level} outside 0..{TREE_LEVEL_CAP}")
        return args.func(args, rc)
    except UsageError as exc:
        print(f"ERROR {exc.code}: {exc}", file=sys.stderr)
        return 1
    except FibError as exc:
        print(f"ERROR {exc.code}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
