"""Deterministic CSV output with self-describing manifest headers.

Every file this package writes starts with a comment-line manifest that
names the command, the tool version, every resolved configuration
value, every tolerance in effect, and the full list of files the run
produced. Data rows follow a plain CSV header. Floats are rendered at
17 significant digits so a rerun of an identical configuration is
byte-identical; nothing time- or host-dependent is ever written.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .config import Tolerances

__all__ = ["Manifest", "format_value", "write_csv"]


def format_value(v) -> str:
    """Stable text form: floats at 17 significant digits, '.' decimal."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


@dataclass
class Manifest:
    command: str
    config_items: tuple[tuple[str, str], ...]
    tolerances: Tolerances
    source: str = ""
    outputs: list[str] = field(default_factory=list)

    def lines(self) -> list[str]:
        out = [f"# hpaxis {__version__} command={self.command}"]
        if self.source:
            out.append(f"# source: {self.source}")
        for key, value in self.config_items:
            out.append(f"# config: {key} = {value}")
        for name, value in self.tolerances.items():
            out.append(f"# tolerance: {name} = {format_value(value)}")
        for name in self.outputs:
            out.append(f"# output: {name}")
        return out


def write_csv(
    path: Path,
    columns: list[str],
    rows: list[list],
    manifest: Manifest,
    footer: list[str] | None = None,
) -> None:
    """Write one manifest-headed CSV file.

    ``rows`` cells pass through ``format_value``; ``footer`` lines (if
    any) are appended as comments after the data section.
    """
    parts = manifest.lines()
    parts.append(",".join(columns))
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row width {len(row)} != header width {len(columns)}")
        parts.append(",".join(format_value(v) for v in row))
    if footer:
        parts.extend(f"# {line}" for line in footer)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(parts) + "\n", encoding="utf-8", newline="\n")
