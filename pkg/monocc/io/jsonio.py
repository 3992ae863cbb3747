"""JSON reading and writing with stable output."""

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from monocc.errors import DescriptorParseError


def _plain(value: Any) -> Any:
    """Convert numpy scalars / arrays and non-finite floats into JSON values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def write_json(path: str | Path, data: Any) -> Path:
    """Write JSON with sorted keys, two-space indent and a trailing newline."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_plain(data), f, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")
    return path


def read_json(path: str | Path) -> Any:
    """
    Read a JSON file.

    Raises:
        DescriptorParseError: With line and column on syntax errors.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise DescriptorParseError(
            f"invalid JSON in {path}: {e.msg}", line=e.lineno, column=e.colno
        ) from e


def dumps(data: Any) -> str:
    """Serialize to a compact, sorted JSON string."""
    return json.dumps(_plain(data), sort_keys=True, allow_nan=False)
