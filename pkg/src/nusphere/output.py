"""Deterministic CSV/JSON serialization of sweep datasets.

CSV layout: '#'-prefixed ``key=value`` metadata lines embedding the full
resolved configuration, one header line of column names, then data rows.
Floating-point cells carry 17 significant digits, so equal inputs yield
byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

from .sweeps import Dataset


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def render_csv(dataset: Dataset) -> str:
    lines = [f"# {key}={format_cell(value)}" for key, value in dataset.meta.items()]
    lines.append(",".join(dataset.columns))
    for row in dataset.rows:
        lines.append(",".join(format_cell(cell) for cell in row))
    return "\n".join(lines) + "\n"


def render_json(dataset: Dataset) -> str:
    payload = {"meta": dataset.meta, "columns": dataset.columns, "rows": dataset.rows}
    return json.dumps(payload, indent=None, separators=(",", ":"), sort_keys=False) + "\n"


def write_dataset(dataset: Dataset, path: str | Path, fmt: str = "csv") -> Path:
    path = Path(path)
    if fmt == "csv":
        text = render_csv(dataset)
    elif fmt == "json":
        text = render_json(dataset)
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def parse_csv_metadata(path: str | Path) -> dict[str, str]:
    """Recover the embedded key=value configuration from a dataset file."""
    meta: dict[str, str] = {}
    for line in Path(path).read_text().splitlines():
        if not line.startswith("#"):
            break
        body = line[1:].strip()
        if "=" in body:
            key, value = body.split("=", 1)
            meta[key.strip()] = value.strip()
    return meta
