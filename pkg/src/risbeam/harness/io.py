"""Per-step CSV and JSON summary writers/readers."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .simulate import APPROACHES, CONTROLLED, LossSummary, RunSeries

SERIES_HEADER = ["k", "t_s", "pr_ideal_dbm", "pr_naive_dbm", "pr_ops_dbm", "pr_opa_dbm",
                 "loss_naive_db", "loss_ops_db", "loss_opa_db"]


def _fmt(x: float) -> str:
    # repr round-trips a float exactly; non-finite values use plain tokens.
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return repr(float(x))


def export_series(series: RunSeries, path) -> None:
    losses = [series.loss_db(a) for a in CONTROLLED]
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SERIES_HEADER)
        for i in range(len(series)):
            row = [str(int(series.k[i])), _fmt(series.t[i])]
            row += [_fmt(series.pr_dbm[a][i]) for a in APPROACHES]
            row += [_fmt(l[i]) for l in losses]
            w.writerow(row)


def read_series(path) -> dict[str, np.ndarray]:
    """Columns of a per-step CSV, keyed by header name."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != SERIES_HEADER:
        raise ValueError(f"{path}:1: expected header {','.join(SERIES_HEADER)}")
    cols: dict[str, list] = {h: [] for h in SERIES_HEADER}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(SERIES_HEADER):
            raise ValueError(f"{path}:{lineno}: expected {len(SERIES_HEADER)} fields, got {len(row)}")
        for h, v in zip(SERIES_HEADER, row):
            try:
                cols[h].append(float(v))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: column {h}: not a number: {v!r}") from None
    out = {h: np.array(v) for h, v in cols.items()}
    out["k"] = out["k"].astype(np.int64)
    return out


def summary_to_dict(s: LossSummary, **extra) -> dict:
    d = {
        "window_s": list(s.window),
        "realizations": s.realizations,
        "seed": s.seed,
        "records": s.n_records,
        "flagged_records": s.n_flagged,
        "mean_loss_db": {a: s.mean[a] for a in CONTROLLED},
        "max_loss_db": {a: s.max[a] for a in CONTROLLED},
    }
    d.update(extra)
    return d


def export_summary(s: LossSummary, path, **extra) -> None:
    Path(path).write_text(json.dumps(summary_to_dict(s, **extra), indent=2) + "\n")


def read_summary(path) -> LossSummary:
    d = json.loads(Path(path).read_text())
    return LossSummary(tuple(d["window_s"]), dict(d["mean_loss_db"]), dict(d["max_loss_db"]),
                       d["records"], d["flagged_records"], d["realizations"], d["seed"])
