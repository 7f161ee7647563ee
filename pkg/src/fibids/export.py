"""CSV / JSON writers for bands, IDS samples, Hoelder estimates and escape rasters.

Floats go out with 17 significant digits so binary64 values round-trip;
extended-precision band edges are written with the same digit count.
"""
from __future__ import annotations

import csv
import io
import json
import sys
from enum import Enum

import mpmath

from .approximants import BandTree, PeriodicSpectrum

BAND_FIELDS = ("level", "index", "kind", "lo", "hi", "length")
IDS_FIELDS = ("E", "N", "level", "error_bound")
HOLDER_FIELDS = ("lambda", "k", "source", "band_length", "delta_N", "exponent",
                 "delta_N_finite", "gamma_lower", "gamma_tilde_k", "in_envelope")
RASTER_FIELDS = ("E", "escaped_at_step")


def fmt_number(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, mpmath.mpf):
        return mpmath.nstr(v, 17)
    if isinstance(v, Enum):
        return str(v.value)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, Enum):
        return v.value
    if isinstance(v, mpmath.mpf):
        return float(v)
    return v


def band_records(source) -> list:
    if isinstance(source, BandTree):
        bands = [b for level in source.levels for b in level]
    elif isinstance(source, PeriodicSpectrum):
        bands = list(source.bands)
    else:
        bands = list(source)
    return [{"level": b.level, "index": b.index, "kind": b.kind.value,
             "lo": b.lo, "hi": b.hi, "length": b.length} for b in bands]


def ids_records(samples) -> list:
    return [{"E": s.energy, "N": s.value, "level": s.level_used,
             "error_bound": s.error_bound} for s in samples]


def holder_records(estimates) -> list:
    out = []
    for e in estimates:
        out.append({
            "lambda": e.coupling, "k": e.k, "source": e.source, "band_length": e.scale,
            "delta_N": e.delta_N, "exponent": e.exponent, "delta_N_finite": e.delta_N_finite,
            "gamma_lower": e.gamma_lower, "gamma_tilde_k": e.gamma_tilde_k,
            "in_envelope": e.in_envelope if e.gamma_tilde_k is not None else None,
        })
    return out


def raster_records(rows) -> list:
    return [{"E": E, "escaped_at_step": step} for E, step in rows]


def to_csv(records, fields) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in records:
        w.writerow([fmt_number(r.get(f)) for f in fields])
    return buf.getvalue()


def to_json(records, fields=None, extra=None) -> str:
    rows = [{k: _json_value(r[k]) for k in (fields or r)} for r in records]
    doc = rows if extra is None else {**extra, "records": rows}
    return json.dumps(doc, indent=1) + "\n"


def tree_json(tree: BandTree) -> str:
    """Nested form: all bands plus the parent -> child containment edges."""
    edges = [{"parent": list(p), "child": list(c)} for p, c in tree.edges()]
    return to_json(band_records(tree), BAND_FIELDS,
                   {"coupling": tree.coupling, "max_level": tree.max_level,
                    "edges": edges})


def write_text(text: str, path=None):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def render(records, fields, fmt: str, extra=None) -> str:
    if fmt == "csv":
        return to_csv(records, fields)
    if fmt == "json":
        return to_json(records, fields, extra)
    raise ValueError(f"unknown format {fmt!r}")
