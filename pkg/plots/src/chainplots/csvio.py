"""Parsing of chaintransport CSV files.

Files start with `# key: value` comment lines (`spec` and `overlays`
carry JSON), then a column header row, then data rows. Trailing comment
lines (footer checks) are also collected.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import PlotError


@dataclass
class ParsedCSV:
    path: str
    comments: dict[str, str]
    columns: list[str]
    rows: list[list[str]]

    def column(self, name: str) -> np.ndarray:
        """Numeric column; blanks and non-numeric entries become NaN."""
        if name not in self.columns:
            raise PlotError(f"{self.path}: no column {name!r}")
        k = self.columns.index(name)

        def num(s: str) -> float:
            try:
                return float(s)
            except ValueError:
                return float("nan")

        return np.array([num(r[k]) for r in self.rows])

    def text_column(self, name: str) -> list[str]:
        if name not in self.columns:
            raise PlotError(f"{self.path}: no column {name!r}")
        k = self.columns.index(name)
        return [r[k] for r in self.rows]

    @property
    def spec(self) -> dict | None:
        if "spec" not in self.comments:
            return None
        return json.loads(self.comments["spec"])

    @property
    def overlays(self) -> dict | None:
        if "overlays" not in self.comments:
            return None
        return json.loads(self.comments["overlays"])

    @property
    def trajectory_meta(self) -> dict | None:
        if "trajectory" not in self.comments:
            return None
        return json.loads(self.comments["trajectory"])


def parse_csv(path: str | Path) -> ParsedCSV:
    path = Path(path)
    if not path.exists():
        raise PlotError(f"input file {path} does not exist")
    comments: dict[str, str] = {}
    columns: list[str] = []
    rows: list[list[str]] = []
    for raw in path.read_text().splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            key, sep, value = body.partition(":")
            if sep:
                comments[key.strip()] = value.strip()
            continue
        if not columns:
            columns = [c.strip() for c in line.split(",")]
            continue
        cells = [c.strip() for c in line.split(",")]
        # status fields may contain commas; fold any excess into the last column
        if len(cells) > len(columns):
            cells = cells[: len(columns) - 1] + [",".join(cells[len(columns) - 1 :])]
        if len(cells) < len(columns):
            cells += [""] * (len(columns) - len(cells))
        rows.append(cells)
    if not columns:
        raise PlotError(f"{path}: no column header found")
    if not rows:
        raise PlotError(f"{path}: empty data grid")
    return ParsedCSV(path=str(path), comments=comments, columns=columns, rows=rows)
