from pathlib import Path
from typing import Any

from pydantic import BaseModel

from falpv_lft.models import Report


def _lines(value: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    for key, item in value.items():
        if isinstance(item, dict):
            lines.append(f"{pad}{key}:")
            lines.extend(_lines(item, indent + 1))
        elif item is None:
            lines.append(f"{pad}{key}: -")
        elif isinstance(item, float):
            lines.append(f"{pad}{key}: {item:.6g}")
        else:
            lines.append(f"{pad}{key}: {item}")
    return lines


def render_report(title: str, report: BaseModel) -> str:
    """Indented ``key: value`` rendering of ``report``; floats keep six significant digits."""
    return "\n".join([f"{title}", *_lines(report.model_dump(mode="json"), 1)])


def emit_report(title: str, report: Report, path: Path | None = None) -> None:
    """Print the text report and, when ``path`` is given, write its JSON twin."""
    print(render_report(title, report))
    if path is not None:
        path.write_text(report.model_dump_json(indent=2) + "\n")
