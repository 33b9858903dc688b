# app/tooling/report_io.py
from __future__ import annotations

import csv
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Sequence

from pydantic import BaseModel

log = logging.getLogger(__name__)


def ensure_dir(path: str | Path) -> Path:
    target = Path(path)
    target.mkdir(parents=True, exist_ok=True)
    return target


def write_json(path: str | Path, payload: BaseModel | dict[str, Any]) -> Path:
    """Sorted keys, fixed indent, trailing newline: identical payloads give identical bytes."""
    data = payload.model_dump(mode="json") if isinstance(payload, BaseModel) else payload
    target = Path(path)
    target.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    log.debug("Report written [path=%s]", target)
    return target


def write_text(path: str | Path, text: str) -> Path:
    target = Path(path)
    target.write_text(text, encoding="utf-8")
    return target


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    target = Path(path)
    with target.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
    log.debug("CSV written [path=%s]", target)
    return target
