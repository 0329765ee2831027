#!/usr/bin/env python3
"""n-existentially-closed checks for quadrance graphs.

A graph is n-e.c. when, for every n distinct vertices and every way of
splitting them into a joined part A and a non-joined part B, some other
vertex z is adjacent to all of A and none of B. Queries are encoded as a
tuple of points (ascending vertex index) plus an n-bit pattern where bit i
set means "joined to point i".
"""

import concurrent.futures
import itertools
import logging
import multiprocessing
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from qec.errors import GraphSizeError, NotMaterializedError
from qec.graph import GraphParams, Point, QuadranceGraph, build, is_edge, lowest_bit, neighbor_bitset, neighbor_bitset_at, point_at, point_index

EXHAUSTIVE_MAX_N = 4
RANGES_PER_WORKER = 4


@dataclass(frozen=True)
class EcQuery:
    """Points P_0..P_{n-1} and a join pattern over them."""

    points: Tuple[Point, ...]
    pattern: int

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def joined(self) -> Tuple[Point, ...]:
        return tuple(p for i, p in enumerate(self.points) if self.pattern >> i & 1)

    @property
    def non_joined(self) -> Tuple[Point, ...]:
        return tuple(p for i, p in enumerate(self.points) if not self.pattern >> i & 1)


@dataclass(frozen=True)
class EcCertificate(EcQuery):
    """A query for which no vertex is a witness."""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "points": [list(p.coords) for p in self.points],
            "indices": [point_index(p) for p in self.points],
            "pattern": self.pattern,
            "A": [list(p.coords) for p in self.joined],
            "B": [list(p.coords) for p in self.non_joined],
        }


@dataclass(frozen=True)
class CheckMode:
    """Exhaustive enumeration, or `count` seeded random point tuples."""

    kind: str = "exhaustive"
    count: int = 0
    seed: Optional[int] = None

    @classmethod
    def exhaustive(cls) -> "CheckMode":
        return cls("exhaustive")

    @classmethod
    def sampled(cls, count: int, seed: int) -> "CheckMode":
        if count < 1:
            raise ValueError(f"sample count must be >= 1, got {count}")
        return cls("sampled", count, seed)

    @property
    def is_exhaustive(self) -> bool:
        return self.kind == "exhaustive"


@dataclass
class EcReport:
    """Outcome of an n-e.c. check."""

    m: int
    d: int
    edge_values: Tuple[int, ...]
    fingerprint: str
    n: int
    mode: CheckMode
    verdict: str
    queries_checked: int
    elapsed: float = 0.0
    certificate: Optional[EcCertificate] = None
    failures: int = 0

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "m": self.m,
            "d": self.d,
            "edge_values": list(self.edge_values),
            "fingerprint": self.fingerprint,
            "n": self.n,
            "mode": self.mode.kind,
        }
        if not self.mode.is_exhaustive:
            data["samples"] = self.mode.count
            data["seed"] = self.mode.seed
        data["verdict"] = self.verdict
        if self.certificate is not None:
            data["certificate"] = self.certificate.to_dict()
        data["failures"] = self.failures
        data["queries_checked"] = self.queries_checked
        data["elapsed_ms"] = round(self.elapsed * 1000, 3) if include_timing else None
        return data


def _new_report(graph: QuadranceGraph, n: int, mode: CheckMode) -> EcReport:
    params = graph.params
    return EcReport(
        m=params.m,
        d=params.d,
        edge_values=tuple(sorted(params.edge_values)),
        fingerprint=params.fingerprint(),
        n=n,
        mode=mode,
        verdict="pass",
        queries_checked=0,
    )


def is_witness(graph: QuadranceGraph, joined: Iterable[Point], non_joined: Iterable[Point], z: Point) -> bool:
    """True iff z is outside A and B, adjacent to all of A and to none of B."""
    joined, non_joined = tuple(joined), tuple(non_joined)
    if z in joined or z in non_joined:
        return False
    return all(is_edge(graph, z, a) for a in joined) and not any(is_edge(graph, z, b) for b in non_joined)


def _cells(partial: List[int], rows: Sequence[int], full: int) -> List[int]:
    """Extend Venn cells by one row per point; index bit k set = inside row k."""
    for row in rows:
        outside = full ^ row
        partial = [c & outside for c in partial] + [c & row for c in partial]
    return partial


def find_witness_vertex(graph: QuadranceGraph, joined: Sequence[Point], non_joined: Sequence[Point]) -> Optional[Point]:
    """Lowest-index witness for (A, B), or None."""
    if graph.materialized:
        cell = graph.full_mask
        for a in joined:
            cell &= neighbor_bitset(graph, a)
        for b in non_joined:
            cell &= graph.full_mask ^ neighbor_bitset(graph, b)
        for x in itertools.chain(joined, non_joined):
            cell &= ~(1 << point_index(x))
        index = lowest_bit(cell)
        return None if index is None else point_at(index, graph.m, graph.d)
    return next((z for z in graph.vertices() if is_witness(graph, joined, non_joined, z)), None)


def venn_cell_counts(graph: QuadranceGraph, points: Sequence[Point]) -> List[int]:
    """Number of vertices outside `points` realising each of the 2^n join patterns."""
    rows = [neighbor_bitset(graph, x) for x in points]
    keep = graph.full_mask
    for x in points:
        keep &= ~(1 << point_index(x))
    return [cell.bit_count() for cell in _cells([keep], rows, graph.full_mask)]


def verify_certificate(graph: QuadranceGraph, certificate: EcQuery) -> bool:
    """Re-scan every vertex; True iff none is a witness for the certificate."""
    return not any(is_witness(graph, certificate.joined, certificate.non_joined, z) for z in graph.vertices())


@dataclass
class _RangeResult:
    checked: int = 0
    failures: List[Tuple[Tuple[int, ...], int]] = field(default_factory=list)


class _FailureFlag:
    """Lowest range index that has failed so far, shared across worker processes; later ranges may stop early."""

    def __init__(self, lowest: Optional[Any] = None) -> None:
        self._lowest = lowest if lowest is not None else multiprocessing.Value("q", -1)

    @property
    def lowest(self) -> Optional[int]:
        value = int(self._lowest.value)
        return None if value < 0 else value

    def record(self, range_index: int) -> None:
        with self._lowest.get_lock():
            if self._lowest.value < 0 or range_index < self._lowest.value:
                self._lowest.value = range_index

    def superseded(self, range_index: int) -> bool:
        lowest = self.lowest
        return lowest is not None and lowest < range_index


def _scan_cells(cells: List[int], keep: int, tuple_indices: Tuple[int, ...], result: _RangeResult, full_scan: bool) -> bool:
    """Record failing patterns; True when the scan of this range should stop."""
    for pattern, cell in enumerate(cells):
        result.checked += 1
        if not cell & keep:
            result.failures.append((tuple_indices, pattern))
            if not full_scan:
                return True
    return False


def _split(total: int, chunks: int) -> List[Tuple[int, int]]:
    chunks = max(1, min(chunks, total))
    bounds = np.linspace(0, total, chunks + 1).astype(int)
    return [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]


def _exhaustive_range(graph: QuadranceGraph, flag: _FailureFlag, range_index: int, full_scan: bool, n: int, lo: int, hi: int) -> _RangeResult:
    """Scan tuples (0, q_1 < ... < q_{n-1}) with q_1 in [lo, hi)."""
    result = _RangeResult()
    full = graph.full_mask
    origin_row = graph.connection_bitset
    vertex_count = graph.vertex_count
    if n == 1:
        _scan_cells(_cells([full], [origin_row], full), full ^ 1, (0,), result, full_scan)
        return result

    for q1 in range(lo, hi):
        if flag.superseded(range_index):
            break
        prefix = _cells([full], [origin_row, neighbor_bitset_at(graph, q1)], full)
        prefix_keep = full ^ 1 ^ (1 << q1)
        for rest in itertools.combinations(range(q1 + 1, vertex_count), n - 2):
            rows = [neighbor_bitset_at(graph, q) for q in rest]
            keep = prefix_keep
            for q in rest:
                keep &= ~(1 << q)
            if _scan_cells(_cells(prefix, rows, full), keep, (0, q1) + rest, result, full_scan):
                flag.record(range_index)
                return result
    return result


def _sampled_range(graph: QuadranceGraph, flag: _FailureFlag, range_index: int, full_scan: bool, samples: np.ndarray) -> _RangeResult:
    """Check every pattern for each sample row, translating each tuple so its first point is the origin."""
    result = _RangeResult()
    full = graph.full_mask
    m, d = graph.m, graph.d
    for sample in samples:
        if flag.superseded(range_index):
            break
        indices = tuple(int(i) for i in sample)
        points = [point_at(i, m, d) for i in indices]
        if graph.materialized:
            base = points[0]
            shifted = [x - base for x in points]
            rows = [neighbor_bitset(graph, x) for x in shifted]
            keep = full
            for x in shifted:
                keep &= ~(1 << point_index(x))
            stop = _scan_cells(_cells([full], rows, full), keep, indices, result, full_scan)
        else:
            stop = False
            for pattern in range(1 << len(points)):
                result.checked += 1
                query = EcQuery(tuple(points), pattern)
                if find_witness_vertex(graph, query.joined, query.non_joined) is None:
                    result.failures.append((indices, pattern))
                    if not full_scan:
                        stop = True
                        break
        if stop:
            flag.record(range_index)
            return result
    return result


_RANGE_SCANNERS: Dict[str, Callable[..., _RangeResult]] = {"exhaustive": _exhaustive_range, "sampled": _sampled_range}

# Per-process state of pool workers, set by _init_worker.
_worker_graph: Optional[QuadranceGraph] = None
_worker_flag: Optional[_FailureFlag] = None


def _init_worker(params: GraphParams, materialized: bool, cache_size: int, cache_bytes: int, lowest: Any) -> None:
    """Rebuild the graph inside a worker process from its parameters."""
    global _worker_graph, _worker_flag
    limit = params.vertex_count if materialized else params.vertex_count - 1
    _worker_graph = build(params, limit, cache_size, cache_bytes)
    _worker_flag = _FailureFlag(lowest)


def _scan_in_worker(kind: str, range_index: int, full_scan: bool, job: Tuple[Any, ...]) -> _RangeResult:
    assert _worker_graph is not None and _worker_flag is not None
    return _RANGE_SCANNERS[kind](_worker_graph, _worker_flag, range_index, full_scan, *job)


def draw_samples(vertex_count: int, n: int, count: int, seed: Optional[int]) -> np.ndarray:
    """`count` rows of n distinct vertex indices, each row ascending."""
    rng = np.random.default_rng(seed)
    samples = np.empty((count, n), dtype=np.int64)
    for row in range(count):
        samples[row] = np.sort(rng.choice(vertex_count, size=n, replace=False))
    return samples


def _run_ranges(graph: QuadranceGraph, kind: str, jobs: List[Tuple[Any, ...]], max_workers: int, full_scan: bool) -> List[_RangeResult]:
    """Scan every job; results come back in job order, stopping after the first failing job unless full_scan."""
    scan = _RANGE_SCANNERS[kind]
    if max_workers == 1 or len(jobs) == 1:
        flag = _FailureFlag()
        results = []
        for range_index, job in enumerate(jobs):
            results.append(scan(graph, flag, range_index, full_scan, *job))
            if results[-1].failures and not full_scan:
                break
        return results

    logging.debug(f"Checking {len(jobs)} ranges with {max_workers} worker processes")
    context = multiprocessing.get_context()
    lowest = context.Value("q", -1)
    initargs = (graph.params, graph.materialized, graph.bitset_cache_size, graph.bitset_cache_bytes, lowest)
    by_index: Dict[int, _RangeResult] = {}
    with concurrent.futures.ProcessPoolExecutor(max_workers=min(max_workers, len(jobs)), mp_context=context, initializer=_init_worker, initargs=initargs) as executor:
        future_to_index = {executor.submit(_scan_in_worker, kind, range_index, full_scan, job): range_index for range_index, job in enumerate(jobs)}
        for future in concurrent.futures.as_completed(future_to_index):
            if future.cancelled():
                continue
            range_index = future_to_index[future]
            by_index[range_index] = future.result()
            if by_index[range_index].failures and not full_scan:
                for pending, index in future_to_index.items():
                    if index > range_index:
                        pending.cancel()
    # Missing ranges all follow a failing one, which _merge stops at.
    return [by_index[i] for i in sorted(by_index)]


def _merge(report: EcReport, graph: QuadranceGraph, results: List[_RangeResult], full_scan: bool) -> EcReport:
    """Combine range results in range order; the first failing range decides the certificate."""
    for result in results:
        report.queries_checked += result.checked
        if not result.failures:
            continue
        if report.certificate is None:
            indices, pattern = result.failures[0]
            points = tuple(point_at(i, graph.m, graph.d) for i in indices)
            report.certificate = EcCertificate(points, pattern)
            report.verdict = "fail"
        report.failures += len(result.failures)
        if not full_scan:
            break
    return report


def check_ec(graph: QuadranceGraph, n: int, mode: Optional[CheckMode] = None, max_workers: int = 1, full_scan: bool = False) -> EcReport:
    """Decide whether the graph is n-e.c.

    Exhaustive mode fixes one point of every query at the origin (adjacency is
    translation invariant) and enumerates the remaining n - 1 points as strictly
    increasing vertex indices. Sampled mode checks all 2^n patterns on `count`
    seeded random n-sets. Ranges of work run in a process pool when
    max_workers > 1, each worker rebuilding the graph from its parameters. The
    report does not depend on max_workers.

    Args:
        graph: The graph to check.
        n: Size of A union B.
        mode: CheckMode.exhaustive() (default) or CheckMode.sampled(count, seed).
        max_workers: Number of worker processes; 1 runs in the calling process.
        full_scan: Keep scanning after the first failure and count all failures.

    Returns:
        The report; a fail verdict carries the first failing query in enumeration order.
    """
    mode = mode or CheckMode.exhaustive()
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if max_workers < 1:
        raise ValueError(f"max_workers must be >= 1, got {max_workers}")
    vertex_count = graph.vertex_count
    if vertex_count < n + 1:
        raise GraphSizeError(f"n={n} larger than vertex budget: graph has {vertex_count} vertices")

    report = _new_report(graph, n, mode)
    started = time.perf_counter()
    logging.info(f"Checking {n}-e.c. of {graph!r} ({mode.kind})")

    jobs: List[Tuple[Any, ...]]
    if mode.is_exhaustive:
        if not graph.materialized:
            raise NotMaterializedError(f"exhaustive check needs a materialized graph: {graph!r}")
        if n > EXHAUSTIVE_MAX_N:
            raise GraphSizeError(f"exhaustive check supports n <= {EXHAUSTIVE_MAX_N}, got {n}")
        ranges = [(0, 1)] if n == 1 else [(lo + 1, hi + 1) for lo, hi in _split(vertex_count - 1, max_workers * RANGES_PER_WORKER)]
        jobs = [(n, lo, hi) for lo, hi in ranges]
    else:
        samples = draw_samples(vertex_count, n, mode.count, mode.seed)
        jobs = [(samples[lo:hi],) for lo, hi in _split(mode.count, max_workers * RANGES_PER_WORKER)]

    _merge(report, graph, _run_ranges(graph, mode.kind, jobs, max_workers, full_scan), full_scan)
    report.elapsed = time.perf_counter() - started
    logging.info(f"{n}-e.c. check of {graph!r}: {report.verdict} after {report.queries_checked} queries")
    return report


def iter_queries(graph: QuadranceGraph, n: int) -> Iterator[EcQuery]:
    """Every (n-set, pattern) pair, n-sets in lexicographic index order."""
    vertices = list(graph.vertices())
    for combo in itertools.combinations(vertices, n):
        for pattern in range(1 << n):
            yield EcQuery(combo, pattern)


def naive_check_ec(graph: QuadranceGraph, n: int) -> EcReport:
    """Reference check: every n-set, every pattern, scanning every vertex with is_edge.

    A graph with fewer than n + 1 vertices fails: with n vertices every query
    fails and the first one is the certificate; with fewer there is no n-set at
    all and the report carries no certificate.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")

    report = _new_report(graph, n, CheckMode.exhaustive())
    started = time.perf_counter()
    if graph.vertex_count < n:
        report.verdict = "fail"
        report.elapsed = time.perf_counter() - started
        return report

    vertices = list(graph.vertices())
    for query in iter_queries(graph, n):
        report.queries_checked += 1
        if not any(is_witness(graph, query.joined, query.non_joined, z) for z in vertices):
            report.verdict = "fail"
            report.certificate = EcCertificate(query.points, query.pattern)
            report.failures = 1
            break
    report.elapsed = time.perf_counter() - started
    return report
