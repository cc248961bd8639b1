"""Result serialization: deterministic CSV/JSON emission of estimate rows."""

from __future__ import annotations

import json
import os
from dataclasses import fields

from .estimators import EstimateRecord

CSV_HEADER = ("experiment,theta,ell,a,n,L,rule,mode,boundary,"
              "trials,successes,estimate,stderr,seed")
_FIELDS = [f.name for f in fields(EstimateRecord)]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def records_to_csv(records: list[EstimateRecord]) -> str:
    lines = [CSV_HEADER]
    for rec in records:
        lines.append(",".join(_fmt(getattr(rec, name)) for name in _FIELDS))
    return "\n".join(lines) + "\n"


def records_to_json(records: list[EstimateRecord]) -> str:
    rows = [{name: getattr(rec, name) for name in _FIELDS}
            for rec in records]
    return json.dumps(rows, indent=2, sort_keys=False) + "\n"


def write_records(records: list[EstimateRecord], path: str,
                  fmt: str = "csv") -> None:
    """Atomic write: the file appears complete or not at all."""
    if fmt == "csv":
        text = records_to_csv(records)
    elif fmt == "json":
        text = records_to_json(records)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)
