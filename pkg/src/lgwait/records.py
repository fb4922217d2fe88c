"""Output record schema and CSV/JSON round-tripping."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, fields
from typing import Iterable

COLUMNS = (
    "model", "omega", "lambda", "t1", "t2", "t3",
    "c12", "c23", "c13",
    "lhs1", "lhs2", "lhs3", "lhs4",
    "p0", "p1", "p010", "p011", "xi",
    "stderr_c12", "seed", "n_runs",
)

_INT_COLUMNS = {"seed", "n_runs"}
_STR_COLUMNS = {"model"}


@dataclass
class Record:
    model: str
    omega: float
    lam: float
    t1: float
    t2: float
    t3: float
    c12: float | None = None
    c23: float | None = None
    c13: float | None = None
    lhs1: float | None = None
    lhs2: float | None = None
    lhs3: float | None = None
    lhs4: float | None = None
    p0: float | None = None
    p1: float | None = None
    p010: float | None = None
    p011: float | None = None
    xi: float | None = None
    stderr_c12: float | None = None
    seed: int | None = None
    n_runs: int | None = None

    @property
    def lhs(self) -> tuple:
        return (self.lhs1, self.lhs2, self.lhs3, self.lhs4)

    def as_row(self) -> dict:
        row = asdict(self)
        row["lambda"] = row.pop("lam")
        return {k: row[k] for k in COLUMNS}

    @classmethod
    def from_row(cls, row: dict) -> "Record":
        kw = {}
        for name in COLUMNS:
            value = row.get(name)
            key = "lam" if name == "lambda" else name
            if value is None or value == "":
                kw[key] = None
            elif name in _STR_COLUMNS:
                kw[key] = str(value)
            elif name in _INT_COLUMNS:
                kw[key] = int(value)
            else:
                kw[key] = float(value)
        return cls(**kw)

    def finite(self) -> bool:
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float) and not math.isfinite(v):
                return False
        return True


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_csv(records: Iterable[Record]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for rec in records:
        row = rec.as_row()
        writer.writerow([format_cell(row[c]) for c in COLUMNS])
    return buf.getvalue()


def to_json(records: Iterable[Record]) -> str:
    return json.dumps([rec.as_row() for rec in records], indent=2) + "\n"


def dumps(records: Iterable[Record], fmt: str) -> str:
    if fmt == "csv":
        return to_csv(records)
    if fmt == "json":
        return to_json(records)
    raise ValueError(f"unknown output format {fmt!r}")


def loads(text: str, fmt: str) -> list[Record]:
    if fmt == "csv":
        return [Record.from_row(row) for row in csv.DictReader(io.StringIO(text))]
    if fmt == "json":
        return [Record.from_row(row) for row in json.loads(text)]
    raise ValueError(f"unknown output format {fmt!r}")


def read_records(path: str, fmt: str | None = None) -> list[Record]:
    if fmt is None:
        fmt = "json" if str(path).endswith(".json") else "csv"
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), fmt)
