"""Helpers for consistent JSON documents across commands."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Union

from pydantic import BaseModel

from src.utils.errors import ParseError, StructuralError

PathLike = Union[str, Path]


def _jsonable(value: Any) -> Any:
    """Plain JSON values with models dumped and NaN/inf replaced by null."""
    if isinstance(value, BaseModel):
        return _jsonable(value.model_dump(mode="json", exclude_none=True))
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    return value


def dump_json(content: Any, pretty: bool = True) -> str:
    """Serialize ``content`` to JSON with optional pretty formatting; NaN/inf become null."""
    payload = _jsonable(content)

    json_kwargs: dict[str, Any] = {"ensure_ascii": False, "allow_nan": False}
    if pretty:
        json_kwargs["indent"] = 2
    else:
        json_kwargs["separators"] = (",", ":")

    return json.dumps(payload, **json_kwargs)


def write_json(path: PathLike, content: Any, pretty: bool = True) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_json(content, pretty) + "\n", encoding="utf-8")
    return path


def load_json(path: PathLike) -> Any:
    """Parse a JSON file; decoding failures carry the line and column of the problem."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise StructuralError(f"input file not found: {path}") from exc
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8 text: {exc.reason}", source=str(path)) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, source=str(path), line=exc.lineno, column=exc.colno) from exc


__all__ = ["dump_json", "load_json", "write_json"]
