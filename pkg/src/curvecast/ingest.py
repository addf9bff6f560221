"""Turn raw measurement CSVs into curve datasets.

Handles the usual cleanup for daily pollutant-style records: linear
interpolation of missing cells within a curve, a square-root variance
stabilization, and removal of weekday mean profiles.
"""

import csv

import numpy as np

from .curves import FunctionalDataset, Grid, _looks_like_header, _parse_cell
from .errors import IngestError


def ingest(
    path,
    interpolate_missing: bool = True,
    transform: str = "none",
    weekday_adjust: str = None,
    rows_per_curve: int = None,
) -> FunctionalDataset:
    """Read, clean and reshape a raw CSV of curve samples.

    Parameters
    ----------
    path : str or Path
        CSV with one curve per row, or a flat value stream when
        rows_per_curve is given.
    interpolate_missing : bool
        Fill missing cells by linear interpolation inside each curve,
        extending flat at the ends.  When False, missing cells are an
        error.
    transform : str
        'none' or 'sqrt'.  The square root is applied before any
        centering and rejects negative values.
    weekday_adjust : str, optional
        Name of a label column; the mean curve of each label group is
        subtracted from its members.  Requires a header row and is not
        combined with rows_per_curve.
    rows_per_curve : int, optional
        Reshape the flattened numeric cells into curves of this length.

    Returns
    -------
    FunctionalDataset
        Curves on the midpoint grid matching their sample count.
    """
    if transform not in ("none", "sqrt"):
        raise ValueError(f"transform must be 'none' or 'sqrt', got {transform!r}")
    if weekday_adjust is not None and rows_per_curve is not None:
        raise ValueError("weekday_adjust and rows_per_curve cannot be combined")
    values, labels = _read_raw(path, weekday_adjust, rows_per_curve)
    missing = np.isnan(values)
    if missing.any():
        if not interpolate_missing:
            rows = sorted(set(np.nonzero(missing)[0].tolist()))
            raise IngestError(f"{path}: missing cells in rows {rows} and interpolation is off")
        values = _interpolate(values, path)
    if transform == "sqrt":
        neg = np.nonzero(np.any(values < 0.0, axis=1))[0]
        if neg.size:
            raise IngestError(
                f"{path}: sqrt transform needs nonnegative values, rows {neg.tolist()} fail"
            )
        values = np.sqrt(values)
    if labels is not None:
        values = values.copy()
        for label in sorted(set(labels)):
            mask = np.array([lab == label for lab in labels])
            values[mask] -= values[mask].mean(axis=0)
    return FunctionalDataset(grid=Grid(values.shape[1]), values=values)


def _read_raw(path, weekday_adjust, rows_per_curve):
    with open(path, newline="") as fh:
        raw = [row for row in csv.reader(fh) if row]
    if not raw:
        raise IngestError(f"{path}: file is empty")
    labels = None
    if weekday_adjust is not None:
        header = [c.strip() for c in raw[0]]
        if weekday_adjust not in header:
            raise IngestError(f"{path}: no column named {weekday_adjust!r} in the header")
        li = header.index(weekday_adjust)
        body = raw[1:]
        labels = [row[li].strip() for row in body]
        body = [[c for i, c in enumerate(row) if i != li] for row in body]
    else:
        body = raw[1:] if _looks_like_header(raw[0]) else raw
    try:
        cells = [[_parse_cell(c) for c in row] for row in body]
    except ValueError as err:
        raise IngestError(f"{path}: non-numeric cell ({err})") from None
    if rows_per_curve is not None:
        if rows_per_curve < 2:
            raise IngestError(f"rows_per_curve must be >= 2, got {rows_per_curve}")
        flat = [v for row in cells for v in row]
        if len(flat) % rows_per_curve:
            raise IngestError(
                f"{path}: {len(flat)} values do not divide into curves of {rows_per_curve}"
            )
        return np.array(flat, dtype=float).reshape(-1, rows_per_curve), None
    widths = {len(row) for row in cells}
    if len(widths) != 1:
        raise IngestError(f"{path}: inconsistent row lengths {sorted(widths)}")
    return np.array(cells, dtype=float), labels


def _interpolate(values: np.ndarray, path) -> np.ndarray:
    out = values.copy()
    idx = np.arange(values.shape[1])
    for i, row in enumerate(out):
        good = ~np.isnan(row)
        if not good.any():
            raise IngestError(f"{path}: curve row {i} is entirely missing")
        if good.all():
            continue
        # np.interp holds the first/last finite value flat past the ends
        out[i] = np.interp(idx, idx[good], row[good])
    return out
