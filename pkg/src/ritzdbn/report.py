"""Run reports: per-iteration records, refinement records and the final model."""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

ITERATION_COLUMNS = ("k", "J", "e_n", "xi", "ms")


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "item"):
        return _clean(value.item())
    return value


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fmt(value) -> str:
    """Round-trip float formatting used in every CSV."""
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


@dataclass
class RunReport:
    problem: str
    method: str
    config: dict = field(default_factory=dict)
    iterations: list = field(default_factory=list)
    refinements: list = field(default_factory=list)
    model: dict = field(default_factory=dict)
    seed: int = 0

    def to_dict(self) -> dict:
        return _clean({
            "problem": self.problem,
            "method": self.method,
            "config": self.config,
            "iterations": self.iterations,
            "refinements": self.refinements,
            "model": self.model,
            "seed": self.seed,
        })

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        return cls(problem=d["problem"], method=d["method"], config=d.get("config", {}),
                   iterations=d.get("iterations", []), refinements=d.get("refinements", []),
                   model=d.get("model", {}), seed=d.get("seed", 0))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, allow_nan=False)

    def save(self, path) -> None:
        atomic_write(path, self.to_json() + "\n")

    @classmethod
    def load(cls, path) -> "RunReport":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def final(self, key: str):
        """Last non-null value of ``key`` over the iteration records."""
        for rec in reversed(self.iterations):
            if rec.get(key) is not None:
                return rec[key]
        return None

    def iterations_csv(self) -> str:
        rows = [",".join(ITERATION_COLUMNS)]
        for rec in self.iterations:
            rows.append(",".join(fmt(rec.get(col)) for col in ITERATION_COLUMNS))
        return "\n".join(rows) + "\n"


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    atomic_write(path, "\n".join(lines) + "\n")


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
