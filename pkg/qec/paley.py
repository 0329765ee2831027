#!/usr/bin/env python3
"""Quadratic-residue quadrance graphs in the plane and Paley graphs of order p^2.

For p = 3 (mod 4), x^2 + 1 is irreducible over Z_p, so Z_p[i] is the field
with p^2 elements. The point (x, y) is identified with x + y*i; the field norm
of x + y*i is x^2 + y^2, i.e. the quadrance from the origin. A difference is a
nonzero square in the field exactly when its norm is a nonzero square in Z_p,
which makes the identity map an isomorphism.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from qec.checker import CheckMode, EcReport, check_ec
from qec.errors import UnsupportedFieldError
from qec.graph import DEFAULT_MATERIALIZE_LIMIT, GraphParams, Point, QuadranceGraph, build, is_edge, point_at
from qec.zmod import require_odd_prime

Element = Tuple[int, int]


def build_quadratic_residue_graph(p: int, materialize_limit: int = DEFAULT_MATERIALIZE_LIMIT) -> QuadranceGraph:
    """G_{V,p}: the plane Z_p^2 with X ~ Y iff Q(X, Y) is a nonzero square."""
    return build(GraphParams.residue_graph(p, 2), materialize_limit)


class PaleyGraph:
    """Paley graph on the field Z_p[i] of order q = p^2; vertex index x * p + y."""

    def __init__(self, p: int):
        require_odd_prime(p)
        if p % 4 != 3:
            raise UnsupportedFieldError(f"extension by i not a field for p = {p} (p = 1 mod 4)")
        self.p = p
        self.q = p * p

    def element(self, index: int) -> Element:
        return divmod(index, self.p)

    def field_sub(self, z: Element, w: Element) -> Element:
        return ((z[0] - w[0]) % self.p, (z[1] - w[1]) % self.p)

    def field_mul(self, z: Element, w: Element) -> Element:
        p = self.p
        return ((z[0] * w[0] - z[1] * w[1]) % p, (z[0] * w[1] + z[1] * w[0]) % p)

    def field_pow(self, z: Element, e: int) -> Element:
        result: Element = (1, 0)
        while e:
            if e & 1:
                result = self.field_mul(result, z)
            z = self.field_mul(z, z)
            e >>= 1
        return result

    def field_norm(self, z: Element) -> int:
        return (z[0] * z[0] + z[1] * z[1]) % self.p

    def is_field_square(self, z: Element) -> bool:
        """Nonzero square test by Euler's criterion in the field of order q."""
        return z != (0, 0) and self.field_pow(z, (self.q - 1) // 2) == (1, 0)

    def is_edge(self, i: int, j: int) -> bool:
        return i != j and self.is_field_square(self.field_sub(self.element(i), self.element(j)))

    @property
    def degree(self) -> int:
        return (self.q - 1) // 2

    def adjacency_matrix(self) -> np.ndarray:
        squares = np.zeros(self.q, dtype=bool)
        for index in range(self.q):
            squares[index] = self.is_field_square(self.element(index))
        grid = squares.reshape(self.p, self.p)
        rows = [np.roll(grid, shift=self.element(index), axis=(0, 1)).ravel() for index in range(self.q)]
        return np.array(rows, dtype=np.int64)


def build_paley(p: int) -> PaleyGraph:
    return PaleyGraph(p)


@dataclass(frozen=True)
class IsoMap:
    """Vertex index of Z_p^2 -> field element x + y*i."""

    p: int
    images: Tuple[Element, ...]

    @classmethod
    def identity(cls, p: int) -> "IsoMap":
        return cls(p, tuple((x, y) for x, y in itertools.product(range(p), repeat=2)))

    def is_bijective(self) -> bool:
        return len(self.images) == self.p * self.p and len(set(self.images)) == len(self.images)


@dataclass(frozen=True)
class IsoResult:
    p: int
    isomorphic: bool
    mapping: IsoMap
    pairs_checked: int
    counterexample: Optional[Tuple[Point, Point]] = None


def verify_isomorphism(p: int) -> IsoResult:
    """Check over all vertex pairs that quadrance adjacency equals Paley adjacency under x + y*i."""
    paley = build_paley(p)
    graph = build_quadratic_residue_graph(p)
    mapping = IsoMap.identity(p)
    pairs = 0
    for i, j in itertools.combinations(range(paley.q), 2):
        pairs += 1
        x, y = point_at(i, p, 2), point_at(j, p, 2)
        zi, zj = mapping.images[i], mapping.images[j]
        field_edge = zi != zj and paley.is_field_square(paley.field_sub(zi, zj))
        if is_edge(graph, x, y) != field_edge:
            logging.info(f"Paley isomorphism fails for p={p} at {x} / {y}")
            return IsoResult(p, False, mapping, pairs, (x, y))
    logging.info(f"Identity map is an isomorphism onto the Paley graph of order {paley.q} ({pairs} pairs)")
    return IsoResult(p, mapping.is_bijective(), mapping, pairs)


def strongly_regular_parameters(adjacency: np.ndarray) -> Optional[Tuple[int, int, int, int]]:
    """(v, k, lambda, mu) of a strongly regular graph, or None if it is not one."""
    v = adjacency.shape[0]
    degrees = adjacency.sum(axis=1)
    if v < 2 or not np.all(degrees == degrees[0]):
        return None
    common = adjacency @ adjacency
    off_diagonal = ~np.eye(v, dtype=bool)
    joined = (adjacency == 1) & off_diagonal
    apart = (adjacency == 0) & off_diagonal
    lambdas = np.unique(common[joined])
    mus = np.unique(common[apart])
    if len(lambdas) > 1 or len(mus) > 1:
        return None
    lam = int(lambdas[0]) if len(lambdas) else 0
    mu = int(mus[0]) if len(mus) else 0
    return (int(v), int(degrees[0]), lam, mu)


def expected_paley_parameters(q: int) -> Tuple[int, int, int, int]:
    return (q, (q - 1) // 2, (q - 5) // 4, (q - 1) // 4)


def check_paley_ec(p: int, n: int, mode: Optional[CheckMode] = None, max_workers: int = 1) -> EcReport:
    """Run the n-e.c. checker on G_{V,p}, i.e. on the Paley graph of order p^2."""
    return check_ec(build_quadratic_residue_graph(p), n, mode, max_workers)
