"""File formats: CSV dumps, JSON summaries, TOML configs and table CSVs."""

import csv
import json
import math
import os
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import InvalidConfigError, MalformedTableError
from .kernel import Limits, er_kernel, tabular_kernel


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(path, header, columns):
    """Write equal-length columns under ``header``; '\\n' line endings."""
    cols = [np.asarray(c) for c in columns]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([_fmt(v) for v in row])


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def dumps_json(obj, indent=2):
    """JSON text with floats written to 17 significant digits; key order kept."""
    return _dump(obj, indent, 0) + "\n"


def _dump(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}{_dump(str(k), indent, 0)}: {_dump(v, indent, level + 1)}'
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + _dump(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(path, obj):
    Path(path).write_text(dumps_json(obj))


def load_table_csv(path):
    """Read rows ``x_bucket,k,prob`` into a ``{(k, x_bucket): prob}`` table."""
    table = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        if header != ["x_bucket", "k", "prob"]:
            raise MalformedTableError(f"expected header x_bucket,k,prob, got {header}")
        for i, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                xb, k, prob = int(row[0]), int(row[1]), float(row[2])
            except (ValueError, IndexError) as e:
                raise MalformedTableError(f"line {i}: {e}") from None
            table[(k, xb)] = table.get((k, xb), 0.0) + prob
    return table


KERNEL_KEYS = {"type", "N", "c", "table", "gamma", "psi", "C_L"}
RUN_KEYS = {"runs", "seed", "run_index", "dt", "t_max", "lambda", "threads",
            "output_dir", "T", "h", "preset"}


def load_config(path):
    """Parse a TOML config with ``[kernel]`` and ``[run]`` sections; unknown keys are errors."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as e:
        raise InvalidConfigError(f"cannot read config {path}: {e}") from None
    except tomllib.TOMLDecodeError as e:
        raise InvalidConfigError(f"bad TOML in {path}: {e}") from None
    extra = set(data) - {"kernel", "run"}
    if extra:
        raise InvalidConfigError(f"unknown config sections: {sorted(extra)}")
    kern = data.get("kernel", {})
    run = data.get("run", {})
    for name, sec, allowed in (("kernel", kern, KERNEL_KEYS), ("run", run, RUN_KEYS)):
        bad = set(sec) - allowed
        if bad:
            raise InvalidConfigError(f"unknown keys in [{name}]: {sorted(bad)}")
    if "table" in kern:
        kern["table"] = str((Path(path).parent / kern["table"]))
    return {"kernel": kern, "run": run}


def kernel_from_spec(spec):
    """Build a kernel from a ``[kernel]`` mapping."""
    kind = spec.get("type", "er")
    if "N" not in spec:
        raise InvalidConfigError("kernel N is required")
    N = spec["N"]
    if kind == "er":
        if "c" not in spec:
            raise InvalidConfigError("ER kernel needs c")
        return er_kernel(N, spec["c"])
    if kind == "table":
        for key in ("table", "gamma", "psi"):
            if key not in spec:
                raise InvalidConfigError(f"table kernel needs '{key}'")
        limits = Limits.polynomial(spec["gamma"], spec["psi"], spec.get("C_L"))
        return tabular_kernel(N, load_table_csv(spec["table"]), limits)
    raise InvalidConfigError(f"unknown kernel type {kind!r}")


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return Path(path)
