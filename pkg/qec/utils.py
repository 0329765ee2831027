#!/usr/bin/env python3
"""Utility module for the quadrance e.c. toolkit.

This module provides logging setup and parsers for command-line values.
"""

import logging
from typing import FrozenSet, List, Optional

from qec.graph import Point, canonical_edge_values, quadratic_residues


def setup_logging(verbose: bool = False) -> None:
    """Configure logging for the CLI.

    Args:
        verbose: If True, set logging level to DEBUG, otherwise INFO.
    """
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )


def parse_int_list(text: str) -> List[int]:
    """Parse "1,2,3" into [1, 2, 3].

    Raises:
        ValueError: On an empty item or non-integer text.
    """
    items = [item.strip() for item in text.split(",")]
    if not items or any(item == "" for item in items):
        raise ValueError(f"expected comma-separated integers, got {text!r}")
    return [int(item) for item in items]


def parse_point(text: str, m: int, d: int) -> Point:
    """Parse comma-separated canonical residues into a point of Z_m^d."""
    coords = parse_int_list(text)
    if len(coords) != d:
        raise ValueError(f"point {text!r} has {len(coords)} coordinates, expected {d}")
    if any(not 0 <= c < m for c in coords):
        raise ValueError(f"point {text!r} has coordinates outside [0, {m - 1}]")
    return Point(tuple(coords), m)


def parse_edge_values(text: Optional[str], m: int) -> FrozenSet[int]:
    """Edge values from "canonical" (default), "qr" or an explicit comma list."""
    if text is None or text == "canonical":
        return canonical_edge_values(m)
    if text == "qr":
        return quadratic_residues(m)
    values = parse_int_list(text)
    if any(not 0 <= v < m for v in values):
        raise ValueError(f"edge values {text!r} must lie in [0, {m - 1}]")
    return frozenset(values)
