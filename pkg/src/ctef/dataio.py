"""CSV input and JSON serialization of fit results."""
from __future__ import annotations

import csv
import json

import numpy as np

from .fitting import FitResult

SCHEMA_VERSION = 1


class CsvFormatError(ValueError):
    """A data file is not a rectangular table of numbers."""


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_matrix(path) -> np.ndarray:
    """Read a comma-separated numeric table.

    A first line containing any non-numeric cell is taken as a header and
    skipped. Blank lines are ignored.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise CsvFormatError(f"{path}: no data")
    if not all(_is_number(c.strip()) for c in rows[0]):
        rows = rows[1:]
    if not rows:
        raise CsvFormatError(f"{path}: header but no data rows")
    width = len(rows[0])
    out = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise CsvFormatError(f"{path}: row {i + 1} has {len(row)} columns, expected {width}")
        for j, cell in enumerate(row):
            try:
                out[i, j] = float(cell.strip())
            except ValueError:
                raise CsvFormatError(f"{path}: non-numeric value {cell!r} at row {i + 1}, column {j + 1}") from None
    if not np.all(np.isfinite(out)):
        raise CsvFormatError(f"{path}: non-finite values")
    return out


def write_matrix(path, X, header=None) -> None:
    X = np.asarray(X, dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header is not None:
            w.writerow(header)
        for row in X:
            w.writerow([repr(float(v)) for v in row])


def fit_to_dict(result: FitResult) -> dict:
    """JSON-ready description of a fit (rotation matrices row-major)."""
    M, center = result.quadratic_form()
    rep = result.report
    out = {
        "schema_version": SCHEMA_VERSION,
        "dim": int(result.params.dim),
        "center": center.tolist(),
        "axis_lengths": result.axis_lengths.tolist(),
        "rotation": result.rotation.tolist(),
        "quadratic_form": M.tolist(),
        "loss": result.loss,
        "iterations": rep.n_iterations,
        "evaluations": rep.n_evaluations,
        "status": rep.status,
        "active_bounds": list(rep.active_bounds),
        "weight": result.box.weight,
        "params_pca": {
            "a": result.params.a.tolist(),
            "c": result.params.c.tolist(),
            "s": result.params.s.tolist(),
        },
        "pca": {
            "mean": result.pca.mean.tolist(),
            "components": result.pca.components.tolist(),
            "eigenvalues": result.pca.eigenvalues.tolist(),
        },
    }
    if result.subspace is not None:
        out["subspace_columns"] = [c + 1 for c in result.subspace]
        out["subspace_center"] = result.params.c.tolist()
        out["subspace_rotation"] = result.params.rotation.tolist()
    return out


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
