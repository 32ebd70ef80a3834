"""CSV ingestion and report writing.

Two sample layouts are supported. Wide: first column ``id``, remaining
columns numeric time labels, one row per curve, scalar values only. Long:
columns ``id``, ``t``, ``x1``..``xd``, one row per (curve, time point).
Files are UTF-8, comma-separated, ``.`` decimal point, header first.
Missing cells are hard errors naming the curve and time point; no imputation.
"""

import csv
import json

import numpy as np

from .core import Curve, FunctionalSample, TimeGrid
from .errors import DataError, InputError

_SIG_DIGITS = "{:.12g}"


def _parse_float(text, where):
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"non-numeric value {text!r} at {where}") from None
    if not np.isfinite(value):
        raise DataError(f"non-finite value {text!r} at {where}")
    return value


def _load_wide(rows):
    header = rows[0]
    if len(header) < 2 or header[0] != "id":
        raise DataError("wide header must be 'id' followed by numeric time labels")
    labels = header[1:]
    coords = [
        _parse_float(lab, f"header column {i + 2}") for i, lab in enumerate(labels)
    ]
    if any(b <= a for a, b in zip(coords, coords[1:])):
        raise DataError("wide time labels must be strictly increasing")
    grid = TimeGrid(tuple(labels), tuple(coords))
    curves = []
    seen = set()
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataError(
                f"row {r} has {len(row)} cells, header has {len(header)}"
            )
        cid = row[0]
        if not cid:
            raise DataError(f"row {r} has an empty id")
        if cid in seen:
            raise DataError(f"duplicate curve id {cid!r} at row {r}")
        seen.add(cid)
        values = np.empty((grid.k, 1))
        for c, cell in enumerate(row[1:]):
            if cell.strip() == "":
                raise DataError(
                    f"missing value for curve {cid!r} at time {labels[c]!r} "
                    f"(row {r}, column {c + 2})"
                )
            values[c, 0] = _parse_float(
                cell, f"curve {cid!r}, time {labels[c]!r} (row {r}, column {c + 2})"
            )
        curves.append(Curve(cid, values))
    if not curves:
        raise DataError("no curve rows in file")
    return FunctionalSample(grid, tuple(curves))


def _load_long(rows):
    header = rows[0]
    if len(header) < 3 or header[0] != "id" or header[1] != "t":
        raise DataError("long header must be 'id,t,x1[,...,xd]'")
    d = len(header) - 2
    records = {}
    order = []
    t_values = {}
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataError(f"row {r} has {len(row)} cells, header has {len(header)}")
        cid = row[0]
        if not cid:
            raise DataError(f"row {r} has an empty id")
        t_raw = row[1]
        t = _parse_float(t_raw, f"row {r}, column 2")
        if cid not in records:
            records[cid] = {}
            order.append(cid)
        if t in records[cid]:
            raise DataError(f"duplicate (id, t) = ({cid!r}, {t_raw}) at row {r}")
        point = np.empty(d)
        for c in range(d):
            cell = row[2 + c]
            if cell.strip() == "":
                raise DataError(
                    f"missing value for curve {cid!r} at time {t_raw} "
                    f"(row {r}, column {c + 3})"
                )
            point[c] = _parse_float(
                cell, f"curve {cid!r}, time {t_raw} (row {r}, column {c + 3})"
            )
        records[cid][t] = point
        t_values.setdefault(t, t_raw)
    if not records:
        raise DataError("no data rows in file")
    grid_t = sorted(t_values)
    grid = TimeGrid(tuple(t_values[t] for t in grid_t), tuple(grid_t))
    curves = []
    for cid in order:
        have = records[cid]
        missing = [t for t in grid_t if t not in have]
        if missing:
            raise DataError(
                f"curve {cid!r} is missing time point {t_values[missing[0]]!r}"
            )
        values = np.stack([have[t] for t in grid_t])
        curves.append(Curve(cid, values))
    return FunctionalSample(grid, tuple(curves))


def load_sample(path, schema="wide"):
    """Load a functional sample from a CSV file ('wide' or 'long' schema)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh)]
    if not rows:
        raise DataError(f"{path}: empty file")
    if schema == "wide":
        return _load_wide(rows)
    if schema == "long":
        return _load_long(rows)
    raise InputError(f"unknown schema {schema!r}")


def write_sample(sample, path, schema="wide"):
    """Write a sample back to CSV (wide needs d=1 and numeric labels)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if schema == "wide":
            if sample.d != 1:
                raise InputError("wide format holds scalar curves only")
            coords = sample.grid.coords
            if coords is None:
                raise InputError("wide format needs numeric time coordinates")
            writer.writerow(["id"] + [_SIG_DIGITS.format(c) for c in coords])
            for curve in sample.curves:
                writer.writerow(
                    [curve.id] + [_SIG_DIGITS.format(v) for v in curve.values[:, 0]]
                )
        elif schema == "long":
            coords = sample.grid.coords
            if coords is None:
                coords = range(1, sample.k + 1)
            writer.writerow(["id", "t"] + [f"x{i + 1}" for i in range(sample.d)])
            for curve in sample.curves:
                for t, coord in enumerate(coords):
                    writer.writerow(
                        [curve.id, _SIG_DIGITS.format(coord)]
                        + [_SIG_DIGITS.format(v) for v in curve.values[t]]
                    )
        else:
            raise InputError(f"unknown schema {schema!r}")


def dump_report(report, stream, fmt="csv"):
    """Write a depth report to an open text stream.

    CSV: columns id,depth,rank plus a flagged column when the report carries
    a flag list. JSON lines: a leading config object, then one object per
    curve. Numbers carry 12 significant digits.
    """
    flagged = set(report.flagged) if report.flagged is not None else None
    if fmt == "csv":
        writer = csv.writer(stream)
        header = ["id", "depth", "rank"]
        if flagged is not None:
            header.append("flagged")
        writer.writerow(header)
        for e in report.entries:
            row = [e.id, _SIG_DIGITS.format(e.depth), str(e.rank)]
            if flagged is not None:
                row.append("true" if e.id in flagged else "false")
            writer.writerow(row)
    elif fmt == "jsonl":
        head = {"config": report.config, "subset_count": report.subset_count}
        if report.flagged is not None:
            head["flagged"] = list(report.flagged)
        stream.write(json.dumps(head, sort_keys=True) + "\n")
        for e in report.entries:
            obj = {
                "id": e.id,
                "depth": float(_SIG_DIGITS.format(e.depth)),
                "rank": e.rank,
            }
            if flagged is not None:
                obj["flagged"] = e.id in flagged
            stream.write(json.dumps(obj, sort_keys=True) + "\n")
    else:
        raise InputError(f"unknown report format {fmt!r}")


def write_report(report, path, fmt="csv"):
    """Write a depth report to ``path``; see :func:`dump_report`."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        dump_report(report, fh, fmt)


def read_report_csv(path):
    """Parse a CSV depth report back into (id, depth, rank) tuples."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}: empty report")
    out = []
    for row in rows[1:]:
        out.append((row[0], float(row[1]), int(row[2])))
    return out
