"""
Deterministic CSV / JSON writers for :class:`~parastab.experiments.SweepResult`.

Angular-frequency columns (unit ``rad/s``) are written as ordinary
frequencies in Hz.  Every number is printed with 17 significant digits;
a value that is missing or non-finite is left empty (CSV) or ``null``
(JSON) and the row's ``error`` column says why.
"""

import csv
import io
import json
import math

from . import __version__

TWO_PI = 2.0 * math.pi


def _output_unit(unit):
    return "Hz" if unit == "rad/s" else unit


def export_rows(result):
    """Rows converted to output units, with non-finite values turned into errors."""
    out = []
    for row in result.rows:
        new = {}
        bad = []
        for col in result.columns:
            v = row.get(col)
            if isinstance(v, float) or (isinstance(v, (int,)) and not isinstance(v, bool)):
                v = float(v)
                if result.units.get(col) == "rad/s":
                    v /= TWO_PI
                if not math.isfinite(v):
                    bad.append(col)
                    v = None
            new[col] = v
        if bad:
            note = "non-finite " + ",".join(bad)
            new["error"] = f"{new['error']}; {note}" if new.get("error") else note
        out.append(new)
    return out


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.16e}"
    return str(v)


def header_lines(config_text, timestamp=None):
    lines = [f"parastab {__version__}"]
    if timestamp is not None:
        lines.append(f"generated {timestamp}")
    lines.append("resolved configuration:")
    lines.extend(config_text.rstrip("\n").split("\n"))
    return lines


def to_csv(result, config_text, timestamp=None):
    buf = io.StringIO(newline="")
    for line in header_lines(config_text, timestamp):
        buf.write(f"# {line}".rstrip() + "\n")
    units = " ".join(f"{c}={_output_unit(result.units[c])}" for c in result.columns
                     if c in result.units)
    if units:
        buf.write(f"# units: {units}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.columns)
    for row in export_rows(result):
        writer.writerow([_fmt(row[c]) for c in result.columns])
    return buf.getvalue()


def to_json(result, config_text, timestamp=None):
    doc = {
        "version": __version__,
        "config": config_text,
        "columns": list(result.columns),
        "units": {c: _output_unit(u) for c, u in result.units.items()},
        "rows": export_rows(result),
    }
    if timestamp is not None:
        doc["generated"] = timestamp
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def write_result(path, result, config_text, fmt="csv", timestamp=None):
    text = (to_csv if fmt == "csv" else to_json)(result, config_text, timestamp)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path
