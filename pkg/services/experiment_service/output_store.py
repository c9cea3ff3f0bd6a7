# output_store.py - Atomic result files
# This file writes command outputs through a temporary file and os.replace so
# readers never observe a partially written CSV or JSON document.

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Union

import pandas as pd

from .config import settings

logger = logging.getLogger(__name__)

def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(temp_name, path)
    except BaseException:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise
    logger.debug(f"Wrote {path}")
    return path

def atomic_write_json(path: Union[str, Path], payload: Any) -> Path:
    text = json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"
    return atomic_write_text(path, text)

def atomic_write_frame(path: Union[str, Path], frame: pd.DataFrame) -> Path:
    text = frame.to_csv(index=False, float_format=settings.float_format, lineterminator="\n")
    return atomic_write_text(path, text)

def trace_file_name(n: int, gamma: float, label: str = "") -> str:
    suffix = f"_{label}" if label else ""
    return f"trace_n{n}_g{gamma:.17g}{suffix}.csv"
