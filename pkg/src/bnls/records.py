"""Experiment records: JSON-lines persistence, CSV flattening, slope fits."""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares line through (log x, log y) points."""

    points: tuple[tuple[float, float], ...]
    slope: float
    intercept: float
    r2: float

    @classmethod
    def fit(cls, xs: Sequence[float], ys: Sequence[float]) -> "SlopeFit":
        if len(xs) < 3 or len(xs) != len(ys):
            raise ValueError("a slope fit needs at least 3 (x, y) pairs")
        lx = np.log(np.asarray(xs, dtype=float))
        ly = np.log(np.asarray(ys, dtype=float))
        slope, intercept = np.polyfit(lx, ly, 1)
        resid = ly - (slope * lx + intercept)
        ss_tot = float(np.sum((ly - ly.mean()) ** 2))
        r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
        return cls(points=tuple(zip(lx.tolist(), ly.tolist())),
                   slope=float(slope), intercept=float(intercept), r2=r2)

    def as_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept,
                "r2": self.r2, "points": [list(p) for p in self.points]}


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class ExperimentRecord:
    """One study outcome: inputs, measurements, fits and the pass flag."""

    study: str
    config: dict
    outputs: dict = field(default_factory=dict)
    passed: bool | None = None
    status: str = "ok"
    error: str | None = None
    seed: int | None = None

    def as_dict(self) -> dict:
        return {
            "study": self.study,
            "config": self.config,
            "config_hash": config_hash(self.config),
            "outputs": self.outputs,
            "passed": self.passed,
            "status": self.status,
            "error": self.error,
            "seed": self.seed,
        }


def write_jsonl(records: Iterable[ExperimentRecord], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.as_dict(), sort_keys=True) + "\n")


def read_jsonl(path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def _flatten(prefix: str, obj, row: dict) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, row)
    elif isinstance(obj, (list, tuple)):
        row[prefix] = json.dumps(obj)
    else:
        row[prefix] = obj


def write_csv(records: Sequence[ExperimentRecord], path) -> None:
    """Flattened one-row-per-record table (dotted keys, lists as JSON)."""
    rows = []
    for rec in records:
        row: dict = {}
        _flatten("", rec.as_dict(), row)
        rows.append(row)
    keys: list[str] = []
    for row in rows:
        for k in row:
            if k not in keys:
                keys.append(k)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=keys)
        writer.writeheader()
        writer.writerows(rows)


def write_fit_csv(fit: SlopeFit, path) -> None:
    """Plot data for one slope fit: log x, log y and the fitted line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["log_x", "log_y", "fit"])
        for lx, ly in fit.points:
            writer.writerow([lx, ly, fit.slope * lx + fit.intercept])


__all__ = ["SlopeFit", "ExperimentRecord", "config_hash",
           "write_jsonl", "read_jsonl", "write_csv", "write_fit_csv"]
