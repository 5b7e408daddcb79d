"""Grid specs and byte-reproducible CSV/JSON output."""

from __future__ import annotations

import json
import os
import tempfile
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np

from .errors import DomainError
from .funcspace import format_float


def parse_grid(spec: str) -> np.ndarray:
    """Resolve ``log:<min>:<max>:<count>``, ``lin:<min>:<max>:<count>`` or a
    comma-separated list into a strictly increasing positive array."""
    spec = spec.strip()
    if not spec:
        raise DomainError("empty grid spec")
    kind, _, rest = spec.partition(":")
    if kind in ("log", "lin") and rest:
        parts = rest.split(":")
        if len(parts) != 3:
            raise DomainError(f"grid spec {spec!r} must look like {kind}:<min>:<max>:<count>")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise DomainError(f"bad grid spec {spec!r}: {exc}") from exc
        if count < 1:
            raise DomainError("grid count must be at least 1")
        if lo <= 0 or hi < lo or (count > 1 and hi == lo):
            raise DomainError(f"grid bounds must satisfy 0 < min < max, got {lo}, {hi}")
        if count == 1:
            grid = np.array([lo])
        elif kind == "log":
            grid = np.geomspace(lo, hi, count)
            grid[0], grid[-1] = lo, hi
        else:
            grid = np.linspace(lo, hi, count)
    else:
        try:
            grid = np.array([float(v) for v in spec.split(",") if v.strip()])
        except ValueError as exc:
            raise DomainError(f"bad grid list {spec!r}: {exc}") from exc
    if grid.size == 0:
        raise DomainError("grid is empty")
    if np.any(~np.isfinite(grid)) or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be finite, positive and strictly increasing")
    return grid


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def json_text(obj, indent: int = 2) -> str:
    """JSON with floats at 17 significant digits; NaN and inf become null."""
    return _encode(obj, indent, 0) + "\n"


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if x != x or x in (float("inf"), float("-inf")):
            return "null"
        text = format_float(x)
        if "e" not in text and "." not in text:
            text += ".0"
        return text
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_encode(str(k), indent, level + 1)}: {_encode(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write text via a temporary file in the same directory plus rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
