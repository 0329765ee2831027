#!/usr/bin/env python3
"""Report writers for the quadrance e.c. toolkit.

JSON is the canonical format; CSV is a flat projection used for survey
tables and sphere counts.
"""

import csv
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Set, TextIO, Tuple


def export_json(data: Any, output: Optional[TextIO] = None) -> None:
    """Write one JSON document.

    Args:
        data: JSON-serialisable document.
        output: Output file handle (None for stdout).
    """
    file_handle = output if output else sys.stdout
    json.dump(data, file_handle, indent=2, sort_keys=False)
    file_handle.write("\n")


def export_csv(rows: Sequence[Dict[str, Any]], fieldnames: Sequence[str], output: Optional[TextIO] = None) -> None:
    """Write rows as CSV with a header.

    Args:
        rows: Row dictionaries; missing keys are written empty.
        fieldnames: Column order.
        output: Output file handle (None for stdout).
    """
    file_handle = output if output else sys.stdout
    writer = csv.DictWriter(file_handle, fieldnames=list(fieldnames), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: _csv_value(row.get(key)) for key in fieldnames})


def _csv_value(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return " ".join(str(v) for v in value)
    return "" if value is None else value


def write_report(data: Any, format_type: str = "json", output_path: Optional[str] = None, fieldnames: Optional[Sequence[str]] = None) -> None:
    """Write a report to a file or stdout.

    Args:
        data: A JSON document, or for CSV a list of row dictionaries.
        format_type: 'json' or 'csv'.
        output_path: Output file path (None for stdout).
        fieldnames: CSV column order (defaults to the keys of the first row).
    """
    if format_type not in ("json", "csv"):
        raise ValueError(f"Unknown format: {format_type}")

    output_file = open(output_path, "w", encoding="utf-8", newline="") if output_path else None
    try:
        if format_type == "json":
            export_json(data, output_file)
        else:
            rows = data if isinstance(data, list) else [data]
            columns = list(fieldnames) if fieldnames else (list(rows[0].keys()) if rows else [])
            export_csv(rows, columns, output_file)
        if output_path:
            logging.info(f"Wrote {format_type} report to {output_path}")
    finally:
        if output_file:
            output_file.close()


def cell_path(cell_dir: str, m: int, d: int, n: int) -> Path:
    return Path(cell_dir) / f"m{m}_d{d}_n{n}.json"


def save_cell_report(cell_dir: str, m: int, d: int, n: int, row: Dict[str, Any]) -> Path:
    """Persist one survey row so an interrupted survey can resume."""
    path = cell_path(cell_dir, m, d, n)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        export_json(row, f)
    logging.debug(f"Saved survey cell to {path}")
    return path


def load_cell_report(cell_dir: str, m: int, d: int, n: int) -> Optional[Dict[str, Any]]:
    path = cell_path(cell_dir, m, d, n)
    if not path.exists():
        return None
    try:
        with open(path, "r", encoding="utf-8") as f:
            row: Dict[str, Any] = json.load(f)
            return row
    except (OSError, ValueError) as e:
        logging.warning(f"Ignoring unreadable survey cell {path}: {e}")
        return None


def completed_cells(cell_dir: str) -> Set[Tuple[int, int, int]]:
    """(m, d, n) of every survey cell already saved under cell_dir."""
    done: Set[Tuple[int, int, int]] = set()
    for path in Path(cell_dir).glob("m*_d*_n*.json"):
        try:
            m, d, n = (int(part[1:]) for part in path.stem.split("_"))
        except ValueError:
            logging.debug(f"Skipping unrelated file {path}")
            continue
        done.add((m, d, n))
    return done


def sphere_rows(counts: Sequence[int]) -> List[Dict[str, int]]:
    return [{"u": u, "count": count} for u, count in enumerate(counts)]
