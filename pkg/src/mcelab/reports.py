"""Atomic report writers shared by the CLI and scripts."""

from __future__ import annotations

import json
import math
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

__all__ = ["jsonable", "write_text_atomic", "write_json", "write_csv", "output_dir"]


def jsonable(obj):
    """Recursively convert numpy scalars and non-finite floats to JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def write_text_atomic(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_json(path, payload: dict, timestamp: bool = True) -> Path:
    body = jsonable(payload)
    if timestamp:
        body = {**body, "timestamp": datetime.now(timezone.utc).isoformat()}
    return write_text_atomic(path, json.dumps(body, indent=2, sort_keys=False) + "\n")


def write_csv(path, text: str) -> Path:
    return write_text_atomic(path, text)


def output_dir(cli_value=None) -> Path:
    """CLI flag, then ``MCELAB_OUT``, then ``./mcelab_out``."""
    if cli_value:
        return Path(cli_value)
    return Path(os.environ.get("MCELAB_OUT", "mcelab_out"))
