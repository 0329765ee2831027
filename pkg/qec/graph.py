#!/usr/bin/env python3
"""Quadrance graphs on Z_m^d.

Vertices are the points of Z_m^d, indexed big-endian mixed radix:
index(X) = sum(x_i * m^(d-1-i)), which is numpy's C order over an array of
shape (m,) * d. Two distinct points are adjacent when their quadrance lies in
the edge-value set. Adjacency depends only on the difference of the points,
so every neighbourhood is a translate of one connection-set indicator.
"""

import functools
import hashlib
import itertools
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from qec.errors import DimensionMismatchError, GraphSizeError, ModulusError, NotMaterializedError
from qec.zmod import Modulus, legendre_symbol, require_odd_prime

DEFAULT_MATERIALIZE_LIMIT = 2**21
DEFAULT_BITSET_CACHE_SIZE = 16384
DEFAULT_BITSET_CACHE_BYTES = 2**26


@dataclass(frozen=True)
class Point:
    """A point of Z_m^d with canonical coordinates."""

    coords: Tuple[int, ...]
    m: int

    def __post_init__(self) -> None:
        if self.m < 2:
            raise ModulusError(f"modulus must be >= 2, got {self.m}")
        object.__setattr__(self, "coords", tuple(int(c) % self.m for c in self.coords))

    @classmethod
    def of(cls, coords: Iterable[int], m: int) -> "Point":
        return cls(tuple(coords), m)

    @classmethod
    def origin(cls, m: int, d: int) -> "Point":
        return cls((0,) * d, m)

    @classmethod
    def unit(cls, m: int, d: int, i: int) -> "Point":
        """The standard basis vector e_{i+1} (0-based i)."""
        return cls(tuple(1 if k == i else 0 for k in range(d)), m)

    @property
    def d(self) -> int:
        return len(self.coords)

    def _check(self, other: "Point") -> None:
        if self.m != other.m or self.d != other.d:
            raise DimensionMismatchError(f"points live in different spaces: Z_{self.m}^{self.d} vs Z_{other.m}^{other.d}")

    def __add__(self, other: "Point") -> "Point":
        self._check(other)
        return Point(tuple(a + b for a, b in zip(self.coords, other.coords)), self.m)

    def __sub__(self, other: "Point") -> "Point":
        self._check(other)
        return Point(tuple(a - b for a, b in zip(self.coords, other.coords)), self.m)

    def __neg__(self) -> "Point":
        return Point(tuple(-a for a in self.coords), self.m)

    def scale(self, c: int) -> "Point":
        return Point(tuple(c * a for a in self.coords), self.m)

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.coords)


def quadrance(x: Point, y: Point) -> int:
    """Q(X, Y) = sum (x_i - y_i)^2 mod m."""
    x._check(y)
    return sum((a - b) * (a - b) for a, b in zip(x.coords, y.coords)) % x.m


def norm(x: Point) -> int:
    """||X|| = x_1^2 + ... + x_d^2 mod m."""
    return sum(a * a for a in x.coords) % x.m


def inner_product(x: Point, y: Point) -> int:
    x._check(y)
    return sum(a * b for a, b in zip(x.coords, y.coords)) % x.m


def point_index(x: Point) -> int:
    index = 0
    for c in x.coords:
        index = index * x.m + c
    return index


def point_at(index: int, m: int, d: int) -> Point:
    if not 0 <= index < m**d:
        raise ValueError(f"vertex index {index} out of range for Z_{m}^{d}")
    coords = []
    for _ in range(d):
        index, c = divmod(index, m)
        coords.append(c)
    return Point(tuple(reversed(coords)), m)


def iter_bits(bits: int) -> Iterator[int]:
    """Indices of the set bits of a bitset, ascending."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def lowest_bit(bits: int) -> Optional[int]:
    return (bits & -bits).bit_length() - 1 if bits else None


def bitset_from_mask(mask: np.ndarray) -> int:
    """Pack a boolean array (flattened in C order) into an int, bit i = element i."""
    return int.from_bytes(np.packbits(mask.ravel(), bitorder="little").tobytes(), "little")


def canonical_edge_values(m: int) -> FrozenSet[int]:
    """{0, ..., floor((m - 1) / 2)}."""
    return frozenset(range((m - 1) // 2 + 1))


def quadratic_residues(p: int) -> FrozenSet[int]:
    """Nonzero squares mod an odd prime p."""
    require_odd_prime(p)
    return frozenset(a * a % p for a in range(1, p))


@dataclass(frozen=True)
class GraphParams:
    """Parameters of a quadrance graph: modulus, dimension and edge-value set."""

    modulus: Modulus
    d: int
    edge_values: FrozenSet[int]

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        object.__setattr__(self, "edge_values", frozenset(v % self.modulus.m for v in self.edge_values))

    @classmethod
    def of(cls, m: int, d: int, edge_values: Optional[Iterable[int]] = None) -> "GraphParams":
        values = canonical_edge_values(m) if edge_values is None else frozenset(edge_values)
        return cls(Modulus(m), d, values)

    @classmethod
    def canonical(cls, m: int, d: int) -> "GraphParams":
        return cls.of(m, d)

    @classmethod
    def residue_graph(cls, p: int, d: int = 2) -> "GraphParams":
        return cls.of(p, d, quadratic_residues(p))

    @property
    def m(self) -> int:
        return self.modulus.m

    @property
    def vertex_count(self) -> int:
        return int(self.m**self.d)

    @property
    def is_canonical(self) -> bool:
        return self.edge_values == canonical_edge_values(self.m)

    def fingerprint(self) -> str:
        payload = f"{self.m}:{self.d}:{','.join(str(v) for v in sorted(self.edge_values))}"
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def row_cache_size(vertex_count: int, max_rows: int, budget_bytes: int) -> int:
    """Rows of vertex_count bits that fit in budget_bytes, at most max_rows and at least one."""
    return max(1, min(max_rows, budget_bytes // (vertex_count // 8 + 1)))


def norm_array(m: int, d: int) -> np.ndarray:
    """||X|| for every X in Z_m^d as an array of shape (m,) * d."""
    squares = np.arange(m, dtype=np.int64) ** 2 % m
    norms = squares
    for _ in range(d - 1):
        norms = (norms[..., np.newaxis] + squares) % m
    return norms


class QuadranceGraph:
    """G on Z_m^d with X ~ Y iff X != Y and Q(X, Y) is an edge value.

    Materialized graphs keep the connection-set indicator and hand out
    neighbour bitsets by translating it; the translated rows are memoised in a
    bounded LRU cache. Oracle-only graphs answer is_edge and nothing else.
    """

    def __init__(
        self,
        params: GraphParams,
        materialized: bool,
        bitset_cache_size: int = DEFAULT_BITSET_CACHE_SIZE,
        bitset_cache_bytes: int = DEFAULT_BITSET_CACHE_BYTES,
    ):
        self.params = params
        self.vertex_count = params.vertex_count
        self.materialized = materialized
        self.bitset_cache_size = bitset_cache_size
        self.bitset_cache_bytes = bitset_cache_bytes
        self.connection_indicator: Optional[np.ndarray] = None
        self.connection_bitset = 0
        self._row: Optional[Callable[[Tuple[int, ...]], int]] = None
        if materialized:
            indicator = np.isin(norm_array(params.m, params.d), sorted(params.edge_values))
            indicator[(0,) * params.d] = False
            indicator.setflags(write=False)
            self.connection_indicator = indicator
            self.connection_bitset = bitset_from_mask(indicator)
            self._row = functools.lru_cache(maxsize=row_cache_size(self.vertex_count, bitset_cache_size, bitset_cache_bytes))(self._translate)

    @property
    def m(self) -> int:
        return self.params.m

    @property
    def d(self) -> int:
        return self.params.d

    @property
    def full_mask(self) -> int:
        return (1 << self.vertex_count) - 1

    def _translate(self, coords: Tuple[int, ...]) -> int:
        assert self.connection_indicator is not None
        if not any(coords):
            return self.connection_bitset
        rolled = np.roll(self.connection_indicator, shift=coords, axis=tuple(range(self.d)))
        return bitset_from_mask(rolled)

    def contains(self, x: Point) -> bool:
        return x.m == self.m and x.d == self.d

    def check_point(self, x: Point) -> None:
        if not self.contains(x):
            raise DimensionMismatchError(f"point in Z_{x.m}^{x.d} is not a vertex of a graph on Z_{self.m}^{self.d}")

    def vertices(self) -> Iterator[Point]:
        for coords in itertools.product(range(self.m), repeat=self.d):
            yield Point(coords, self.m)

    def to_networkx(self) -> nx.Graph:
        """The graph as a networkx.Graph on vertex indices."""
        bitsets = [neighbor_bitset(self, x) for x in self.vertices()]
        graph = nx.Graph()
        graph.add_nodes_from(range(self.vertex_count))
        graph.add_edges_from((i, j) for i, row in enumerate(bitsets) for j in iter_bits(row >> (i + 1) << (i + 1)))
        return graph

    def __repr__(self) -> str:
        mode = "materialized" if self.materialized else "oracle"
        return f"QuadranceGraph(m={self.m}, d={self.d}, edge_values={sorted(self.params.edge_values)}, {mode})"


def build(
    params: GraphParams,
    materialize_limit: int = DEFAULT_MATERIALIZE_LIMIT,
    bitset_cache_size: int = DEFAULT_BITSET_CACHE_SIZE,
    bitset_cache_bytes: int = DEFAULT_BITSET_CACHE_BYTES,
) -> QuadranceGraph:
    """Construct a quadrance graph.

    Args:
        params: Modulus, dimension and edge-value set.
        materialize_limit: Largest vertex count for which bitset adjacency is kept.
        bitset_cache_size: Most translated neighbour rows memoised.
        bitset_cache_bytes: Memory budget for the memoised rows; caps the row count further.

    Returns:
        The graph, materialized when m^d <= materialize_limit.
    """
    if params.m**params.d > sys.maxsize:
        raise GraphSizeError(f"instance too large: {params.m}^{params.d} vertices cannot be indexed")
    materialized = params.vertex_count <= materialize_limit
    graph = QuadranceGraph(params, materialized, bitset_cache_size, bitset_cache_bytes)
    logging.info(f"Built {graph!r} with {graph.vertex_count} vertices")
    return graph


def is_edge(graph: QuadranceGraph, x: Point, y: Point) -> bool:
    graph.check_point(x)
    graph.check_point(y)
    return x != y and quadrance(x, y) in graph.params.edge_values


def neighbor_bitset(graph: QuadranceGraph, x: Point) -> int:
    """Bitset of the neighbours of x: bit i set iff vertex i is adjacent to x."""
    if graph._row is None:
        raise NotMaterializedError(f"not materialized: {graph!r}")
    graph.check_point(x)
    return graph._row(x.coords)


def neighbor_bitset_at(graph: QuadranceGraph, index: int) -> int:
    return neighbor_bitset(graph, point_at(index, graph.m, graph.d))


def adjacency_matrix(graph: QuadranceGraph) -> np.ndarray:
    """Dense 0/1 adjacency matrix (vertex_count x vertex_count), for small graphs."""
    if graph.connection_indicator is None:
        raise NotMaterializedError(f"not materialized: {graph!r}")
    axes = tuple(range(graph.d))
    rows = [np.roll(graph.connection_indicator, shift=x.coords, axis=axes).ravel() for x in graph.vertices()]
    return np.array(rows, dtype=np.int64)


def norm_distribution(m: int, d: int) -> Tuple[int, ...]:
    """#{X in Z_m^d : ||X|| = u} for every u, by convolving the one-dimensional table."""
    one = np.zeros(m, dtype=object)
    for x in range(m):
        one[x * x % m] += 1
    return _convolve_power(one, m, d)


def _convolve_power(one: np.ndarray, m: int, d: int) -> Tuple[int, ...]:
    counts = one.copy()
    for _ in range(d - 1):
        acc = np.zeros(m, dtype=object)
        for s in range(m):
            if counts[s]:
                acc += counts[s] * np.roll(one, s)
        counts = acc
    return tuple(int(c) for c in counts)


def degree(graph: QuadranceGraph) -> int:
    """Common degree of every vertex."""
    if graph.materialized:
        return graph.connection_bitset.bit_count()
    counts = norm_distribution(graph.m, graph.d)
    total = sum(counts[u] for u in graph.params.edge_values)
    return total - (1 if 0 in graph.params.edge_values else 0)


@dataclass(frozen=True)
class SphereTable:
    """N_d(u) = #{X in Z_p^d : ||X|| = u} for u = 0 .. p - 1."""

    p: int
    d: int
    counts: Tuple[int, ...]

    def __getitem__(self, u: int) -> int:
        return self.counts[u % self.p]

    @property
    def total(self) -> int:
        return sum(self.counts)

    def as_rows(self) -> List[Tuple[int, int]]:
        return list(enumerate(self.counts))


def sphere_table(p: int, d: int) -> SphereTable:
    """Sphere sizes from N_1(0) = 1, N_1(u) = 1 + (u / p), convolved d times."""
    require_odd_prime(p)
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    one = np.array([1] + [1 + legendre_symbol(u, p) for u in range(1, p)], dtype=object)
    return SphereTable(p, d, _convolve_power(one, p, d))


def brute_force_sphere_table(p: int, d: int) -> SphereTable:
    counts = [0] * p
    for coords in itertools.product(range(p), repeat=d):
        counts[sum(c * c for c in coords) % p] += 1
    return SphereTable(p, d, tuple(counts))


def degree_from_spheres(table: SphereTable, edge_values: Sequence[int]) -> int:
    """Sum of N_d(u) over the edge values, minus the origin when 0 is an edge value."""
    values = set(v % table.p for v in edge_values)
    return sum(table[u] for u in values) - (1 if 0 in values else 0)


def export_edge_list(graph: QuadranceGraph, path: str) -> int:
    """Write the graph as "i j" lines (vertex indices, i < j).

    Returns:
        Number of edges written.
    """
    if not graph.materialized:
        raise NotMaterializedError(f"not materialized: {graph!r}")
    nx_graph = graph.to_networkx()
    nx.write_edgelist(nx_graph, Path(path), data=False)
    logging.info(f"Exported {nx_graph.number_of_edges()} edges to {path}")
    return int(nx_graph.number_of_edges())
