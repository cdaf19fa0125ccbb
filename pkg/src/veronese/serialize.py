"""Canonical JSON and CSV output: rationals as ``"p/q"``, slopes as fixed-precision decimals."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math

from gmpy2 import mpq, mpz

from .exactnum import BigRat, Interval, RealHandle, format_rat
from .reports import ExponentReport

FLOAT_DIGITS = 6


def to_jsonable(obj):
    """Recursively convert results into JSON-ready values; exact rationals never become floats."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, type(mpz(0)))):
        return int(obj)
    if isinstance(obj, (BigRat, mpq)):
        return format_rat(obj)
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return f"{obj:.{FLOAT_DIGITS}f}"
    if isinstance(obj, Interval):
        return {"lo": format_rat(obj.lo), "hi": format_rat(obj.hi)}
    if isinstance(obj, RealHandle):
        return obj.describe()
    if isinstance(obj, ExponentReport):
        d = {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        d["last_three"] = to_jsonable(obj.last_three)
        return d
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, tuple) and hasattr(obj, "_asdict"):
        return {k: to_jsonable(v) for k, v in obj._asdict().items()}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (frozenset, set)):
        return sorted(to_jsonable(v) for v in obj)
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def samples_csv(report: ExponentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "k", "scale", "value", "witness"])
    for s in report.samples:
        wit = s.witness if not isinstance(s.witness, (tuple, list)) else " ".join(map(str, s.witness))
        w.writerow([report.kind, report.k, int(s.scale), to_jsonable(float(s.value)), wit])
    return buf.getvalue()
