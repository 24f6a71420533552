"""Deterministic JSON and CSV output with 17 significant digits.

Complex numbers are written as ``{"re": x, "im": y}`` in JSON and as a
pair of ``<name>_re`` / ``<name>_im`` columns in CSV; ``parse`` undoes
both, so ``parse(emit(r)) == r`` for results built from dicts, lists,
strings, booleans, ints, floats and complex numbers.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from fractions import Fraction

import numpy as np

FLOAT_FORMAT = "%.17g"


def to_plain(obj):
    """Convert numpy scalars, tuples, NamedTuples, dataclasses and Fractions to plain values."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if hasattr(obj, "_asdict"):
        return {k: to_plain(v) for k, v in obj._asdict().items()}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return complex(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return FLOAT_FORMAT % x


def _json(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = ", " if not indent else ","
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, complex):
        return _json({"re": obj.real, "im": obj.imag}, indent, level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        return "[" + sep.join(pad + _json(v, indent, level + 1) for v in obj) + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (pad + json.dumps(k) + ": " + _json(v, indent, level + 1) for k, v in obj.items())
        return "{" + sep.join(items) + end + "}"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps_json(results, indent: int = 2) -> str:
    return _json(to_plain(results), indent, 0) + "\n"


def _revive(obj):
    if isinstance(obj, dict):
        if set(obj) == {"re", "im"} and all(isinstance(v, (int, float)) for v in obj.values()):
            return complex(obj["re"], obj["im"])
        return {k: _revive(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_revive(v) for v in obj]
    return obj


def loads_json(text: str):
    return _revive(json.loads(text))


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _float(v)
    if isinstance(v, (list, dict)):
        return _json(v, 0, 0)
    return str(v)


def _flatten_row(row: dict) -> dict:
    out = {}
    for k, v in row.items():
        if isinstance(v, complex):
            out[f"{k}_re"] = v.real
            out[f"{k}_im"] = v.imag
        else:
            out[k] = v
    return out


def dumps_csv(rows, columns=None) -> str:
    """Rows (dicts) as CSV; the header is ``columns`` or every key in order of first appearance."""
    rows = [_flatten_row(to_plain(r)) for r in (rows or [])]
    if columns is None:
        columns = list(dict.fromkeys(k for r in rows for k in r))
    else:
        flat = []
        for c in columns:
            flat += [f"{c}_re", f"{c}_im"] if any(f"{c}_re" in r for r in rows) else [c]
        columns = flat
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_csv_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _csv_value(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    if text[:1] in "[{":
        try:
            return loads_json(text)
        except json.JSONDecodeError:
            return text
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def loads_csv(text: str) -> list:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        return []
    rows = []
    for rec in reader:
        row = {h: _csv_value(v) for h, v in zip(header, rec)}
        merged = {}
        for h in header:
            if h.endswith("_re") and h[:-3] + "_im" in row:
                re, im = row[h], row[h[:-3] + "_im"]
                merged[h[:-3]] = None if re is None and im is None else complex(re or 0, im or 0)
            elif h.endswith("_im") and h[:-3] + "_re" in row:
                continue
            else:
                merged[h] = row[h]
        rows.append(merged)
    return rows


def emit(results, fmt: str = "json", path=None, columns=None) -> str:
    """Serialise ``results`` (a document for JSON, a list of rows for CSV) and write to ``path``."""
    if fmt == "json":
        text = dumps_json(results)
    elif fmt == "csv":
        text = dumps_csv(results, columns)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def parse(text: str, fmt: str = "json"):
    if fmt == "json":
        return loads_json(text)
    if fmt == "csv":
        return loads_csv(text)
    raise ValueError(f"unknown format {fmt!r}")
