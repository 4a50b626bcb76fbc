"""CSV/TSV/JSON writers for the CLI tasks.

Numeric columns use 17 significant digits so doubles round-trip losslessly,
and every file starts with comment lines embedding the generator version,
the self-energy mode and the fully resolved configuration.  Nothing here
depends on wall-clock time, so reruns are byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .model import BdgMatrix

__all__ = [
    "fmt",
    "write_csv",
    "write_bdg_tsv",
    "read_bdg_tsv",
    "write_metadata",
]


def fmt(value) -> str:
    """Render one number with 17 significant digits."""
    return f"{float(value):.17g}"


def _comment_lines(meta: dict | None) -> list[str]:
    if not meta:
        return []
    compact = json.dumps(meta, sort_keys=True, separators=(",", ":"), default=str)
    return [f"# {compact}"]


def write_csv(
    path: Path,
    header: list[str],
    columns: list,
    meta: dict | None = None,
    formats: list | None = None,
) -> None:
    """Write comma-separated columns with a header row and metadata comment."""
    formats = formats or [fmt] * len(columns)
    lines = _comment_lines(meta)
    lines.append(",".join(header))
    for row in zip(*columns):
        lines.append(",".join(f(v) for f, v in zip(formats, row)))
    Path(path).write_text("\n".join(lines) + "\n")


def write_bdg_tsv(path: Path, bdg: BdgMatrix, meta: dict | None = None) -> None:
    """Dump the dense particle-hole matrix, row-major, cells as "re,im"."""
    lines = _comment_lines(meta)
    for row in np.asarray(bdg.entries):
        lines.append("\t".join(f"{c.real:.17g},{c.imag:.17g}" for c in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_bdg_tsv(path: Path) -> np.ndarray:
    """Read back a matrix written by ``write_bdg_tsv``."""
    rows = []
    for line in Path(path).read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        rows.append(
            [complex(float(c.split(",")[0]), float(c.split(",")[1])) for c in line.split("\t")]
        )
    return np.array(rows)


def write_metadata(path: Path, meta: dict) -> None:
    """Write the run metadata sidecar as deterministic JSON."""
    Path(path).write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n")
