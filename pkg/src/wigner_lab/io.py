"""CSV/JSON serialization with a fixed numeric format.

CSV files start with a ``# config_hash: <hex>`` line, use ``\\n`` line
endings and print floats with 9 significant digits. Density matrices are
JSON objects ``{"dim": d, "data": [[re, im], ...]}`` in row-major order.
"""
import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .wigner import GridSpec, WignerGrid

HASH_PREFIX = "# config_hash: "


def config_hash(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def fmt(x):
    """One CSV cell: floats with 9 significant digits, everything else via ``str``."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.9g}"
    return str(x)


def write_csv(path, columns, rows, hash_value):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(f"{HASH_PREFIX}{hash_value}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(x) for x in row])
    return path


def read_csv(path):
    """Return ``(hash, columns, rows)``; cells are left as strings."""
    with open(path, newline="") as fh:
        first = fh.readline().rstrip("\n")
        if not first.startswith(HASH_PREFIX):
            raise ValueError(f"{path}: missing config hash header")
        reader = csv.reader(fh)
        columns = next(reader)
        return first[len(HASH_PREFIX) :], columns, [r for r in reader]


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


def matrix_to_json(rho):
    rho = np.asarray(rho, dtype=complex)
    return {"dim": int(rho.shape[0]), "data": [[float(z.real), float(z.imag)] for z in rho.ravel()]}


def matrix_from_json(obj):
    d = int(obj["dim"])
    data = np.asarray(obj["data"], dtype=float)
    if data.shape != (d * d, 2):
        raise ValueError(f"expected {d * d} [re, im] pairs, got {data.shape[0]}")
    return (data[:, 0] + 1j * data[:, 1]).reshape(d, d)


def grid_rows(grid):
    x, y = grid.spec.x, grid.spec.y
    return [(x[i], y[j], grid.values[i, j]) for i in range(grid.spec.nx) for j in range(grid.spec.ny)]


def grid_to_json(grid):
    s = grid.spec
    return {
        "spec": {"x_min": s.x_min, "x_max": s.x_max, "y_min": s.y_min, "y_max": s.y_max, "nx": s.nx, "ny": s.ny},
        "values": [float(v) for v in grid.values.ravel()],
    }


def grid_from_json(obj):
    spec = GridSpec(**obj["spec"])
    return WignerGrid(spec, np.asarray(obj["values"], dtype=float).reshape(spec.nx, spec.ny))
