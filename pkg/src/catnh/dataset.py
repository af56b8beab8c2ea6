"""Tabular sweep datasets: CSV with a '#'-prefixed JSON provenance header.

A dataset is a named set of equal-length columns plus a provenance block
(config, config hash, truncation dims, tolerances, wall time, package
version).  Writing is deterministic: identical inputs produce identical
bytes except for the ``wall_time_s`` provenance field.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

SCHEMA_VERSION = "catnh.sweep/1"


def config_hash(config: dict) -> str:
    """sha256 of the canonical JSON encoding of a config mapping."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _format_value(x) -> str:
    if isinstance(x, (complex, np.complexfloating)):
        return repr(complex(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


@dataclass
class SweepResult:
    """One experiment's tabular output plus provenance."""

    experiment: str
    columns: list[str]
    data: dict[str, np.ndarray]
    provenance: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def __post_init__(self):
        lengths = {len(self.data[c]) for c in self.columns}
        if len(lengths) > 1:
            raise ValueError(f"ragged columns: {lengths}")
        missing = [c for c in self.columns if c not in self.data]
        if missing:
            raise ValueError(f"columns missing from data: {missing}")

    @property
    def n_rows(self) -> int:
        return len(self.data[self.columns[0]]) if self.columns else 0

    def to_csv(self, path) -> None:
        header = {
            "schema": self.schema_version,
            "experiment": self.experiment,
            "provenance": self.provenance,
        }
        buf = io.StringIO()
        buf.write("# " + json.dumps(header, sort_keys=True, separators=(",", ":")) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for i in range(self.n_rows):
            writer.writerow([_format_value(self.data[c][i]) for c in self.columns])
        with open(path, "w", newline="") as fh:
            fh.write(buf.getvalue())

    @classmethod
    def from_csv(cls, path) -> "SweepResult":
        with open(path, newline="") as fh:
            first = fh.readline()
            if not first.startswith("# "):
                raise ConfigError(f"{path}: missing provenance header line")
            header = json.loads(first[2:])
            reader = csv.reader(fh)
            columns = next(reader)
            rows = list(reader)
        data = {}
        for j, col in enumerate(columns):
            raw = [row[j] for row in rows]
            data[col] = _parse_column(raw)
        return cls(
            experiment=header["experiment"], columns=columns, data=data,
            provenance=header.get("provenance", {}),
            schema_version=header.get("schema", SCHEMA_VERSION),
        )


def _parse_column(raw: list[str]) -> np.ndarray:
    try:
        return np.array([float(x) for x in raw])
    except ValueError:
        pass
    try:
        return np.array([complex(x.strip("()")) for x in raw])
    except ValueError:
        return np.array(raw)
