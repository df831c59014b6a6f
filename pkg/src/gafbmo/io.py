"""CSV and JSON records shared by the CLI and scripts."""
import csv
import json
import math
import os

SCHEMA_VERSION = "gafbmo-results/1"


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def write_csv(path, rows, columns=None):
    columns = columns or (list(rows[0].keys()) if rows else [])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r.get(c, "")) for c in columns])
    return columns


def _parse(s):
    if s in ("true", "false"):
        return s == "true"
    for cast in (int, float):
        try:
            return cast(s)
        except ValueError:
            pass
    return s


def read_csv(path):
    with open(path, newline="") as fh:
        return [{k: _parse(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "tolist"):
        return _jsonable(x.tolist())
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def summarize(rows, group, fields):
    """Mean of ``fields`` per value of ``group`` (order of first appearance)."""
    keys, buckets = [], {}
    for r in rows:
        g = r[group]
        if g not in buckets:
            keys.append(g)
            buckets[g] = []
        buckets[g].append(r)
    out = []
    for g in keys:
        rs = buckets[g]
        rec = {group: g, "count": len(rs)}
        for f in fields:
            rec[f"mean_{f}"] = math.fsum(float(r[f]) for r in rs) / len(rs)
        out.append(rec)
    return out


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
