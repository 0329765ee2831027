#!/usr/bin/env python3
"""Tests for qec.checker."""

import concurrent.futures
import multiprocessing

import numpy as np
import pytest

from qec import checker
from qec.checker import (
    EXHAUSTIVE_MAX_N,
    CheckMode,
    EcCertificate,
    check_ec,
    draw_samples,
    find_witness_vertex,
    is_witness,
    iter_queries,
    naive_check_ec,
    venn_cell_counts,
    verify_certificate,
)
from qec.errors import GraphSizeError, NotMaterializedError
from qec.graph import GraphParams, Point, build, degree, point_at

ORACLE_CASES = [(3, 2), (5, 2), (7, 2), (5, 3)]


def P(coords, m):
    return Point(tuple(coords), m)


class TestIsWitness:
    """Test the witness predicate."""

    def test_member_of_a_is_not_a_witness(self, g72):
        """z in A is never a witness."""
        a = P((0, 0), 7)
        assert not is_witness(g72, [a], [], a)

    def test_empty_query(self, g72):
        """With A = B = {} every vertex is a witness."""
        assert is_witness(g72, [], [], P((3, 3), 7))

    def test_single_joined_point(self, g72):
        """Q((1, 0), (0, 0)) = 1 is an edge value."""
        assert is_witness(g72, [P((0, 0), 7)], [], P((1, 0), 7))
        assert not is_witness(g72, [], [P((0, 0), 7)], P((1, 0), 7))


class TestFindWitnessVertex:
    """Test the lowest-index witness search."""

    def test_lowest_neighbour(self, g72):
        """The lowest neighbour of the origin is (0, 1)."""
        assert find_witness_vertex(g72, [P((0, 0), 7)], []) == P((0, 1), 7)

    def test_oracle_agrees(self):
        """Oracle-only graphs scan vertices in index order with the same result."""
        params = GraphParams.canonical(7, 2)
        full, oracle = build(params), build(params, materialize_limit=10)
        for joined, non_joined in [([P((0, 0), 7)], [P((0, 1), 7)]), ([P((1, 1), 7), P((2, 5), 7)], []), ([], [P((4, 4), 7)])]:
            assert find_witness_vertex(full, joined, non_joined) == find_witness_vertex(oracle, joined, non_joined)

    def test_no_witness(self):
        """G_{3,1} is K_3: nothing is non-adjacent to 0 apart from 0 itself."""
        graph = build(GraphParams.canonical(3, 1))
        assert find_witness_vertex(graph, [], [P((0,), 3)]) is None


class TestVennCellCounts:
    """Test the 2^n cell sizes."""

    def test_single_point(self, g72):
        """n = 1: pattern 0 is the non-neighbours, pattern 1 the neighbours."""
        counts = venn_cell_counts(g72, [P((2, 3), 7)])
        assert counts == [49 - 1 - degree(g72), degree(g72)]

    def test_counts_partition_the_rest(self, g72):
        """Cells partition the vertices outside the points."""
        points = [P((0, 0), 7), P((1, 2), 7), P((5, 6), 7)]
        assert sum(venn_cell_counts(g72, points)) == 49 - 3

    def test_matches_definition(self, g72):
        """Each cell count equals the number of witnesses for its pattern."""
        points = [P((0, 0), 7), P((3, 4), 7)]
        counts = venn_cell_counts(g72, points)
        for pattern in range(4):
            joined = [x for i, x in enumerate(points) if pattern >> i & 1]
            non_joined = [x for i, x in enumerate(points) if not pattern >> i & 1]
            assert counts[pattern] == sum(1 for z in g72.vertices() if is_witness(g72, joined, non_joined, z))

    def test_all_cells_occupied_in_dimension_five(self, g75):
        """Three random points of G_{7,5} realise all eight patterns."""
        rng = np.random.default_rng(7)
        for _ in range(20):
            indices = rng.choice(g75.vertex_count, size=3, replace=False)
            counts = venn_cell_counts(g75, [point_at(int(i), 7, 5) for i in indices])
            assert min(counts) >= 1
            assert sum(counts) == 16807 - 3


class TestCheckMode:
    """Test check modes."""

    def test_default_is_exhaustive(self):
        """CheckMode() is exhaustive."""
        assert CheckMode().is_exhaustive
        assert not CheckMode.sampled(10, 1).is_exhaustive

    def test_sample_count(self):
        """Sample mode needs at least one sample."""
        with pytest.raises(ValueError, match="sample count"):
            CheckMode.sampled(0, 1)


class TestCheckEc:
    """Test check_ec."""

    def test_complete_graph_is_not_one_ec(self):
        """G_{3,1} = K_3 has no vertex outside {0} that avoids 0."""
        graph = build(GraphParams.canonical(3, 1))
        report = check_ec(graph, 1)
        assert report.verdict == "fail"
        assert report.certificate == EcCertificate((P((0,), 3),), 0)
        assert report.certificate.joined == ()
        assert report.certificate.non_joined == (P((0,), 3),)
        assert verify_certificate(graph, report.certificate)
        assert report.queries_checked == 1

    def test_full_scan_counts_every_failure(self):
        """--full-scan keeps going after the first failure."""
        graph = build(GraphParams.canonical(3, 1))
        report = check_ec(graph, 1, full_scan=True)
        assert report.verdict == "fail"
        assert report.failures == 1
        assert report.queries_checked == 2

    def test_full_scan_keeps_first_certificate(self):
        """Full and early scans agree on the first failing query."""
        graph = build(GraphParams.canonical(3, 2))
        early, full = check_ec(graph, 2), check_ec(graph, 2, full_scan=True)
        assert early.verdict == full.verdict
        assert early.certificate == full.certificate
        assert full.failures >= early.failures
        assert full.queries_checked == (graph.vertex_count - 1) * 4

    @pytest.mark.parametrize("m,d", ORACLE_CASES)
    @pytest.mark.parametrize("n", [1, 2])
    def test_agrees_with_naive_check(self, m, d, n):
        """Bitset checks agree with the brute-force definition."""
        graph = build(GraphParams.canonical(m, d))
        naive = naive_check_ec(graph, n)
        for workers in (1, 4):
            report = check_ec(graph, n, max_workers=workers)
            assert report.verdict == naive.verdict
            if not report.passed:
                assert verify_certificate(graph, report.certificate)

    @pytest.mark.parametrize("m,d", ORACLE_CASES)
    def test_monotone_in_n(self, m, d):
        """n-e.c. implies (n - 1)-e.c."""
        graph = build(GraphParams.canonical(m, d))
        if check_ec(graph, 2).passed:
            assert check_ec(graph, 1).passed

    def test_three_ec_sampled_dimension_five(self, g75):
        """G_{7,5} passes a seeded 3-e.c. sample."""
        report = check_ec(g75, 3, CheckMode.sampled(2000, 42))
        assert report.passed
        assert report.queries_checked == 2000 * 8
        assert report.certificate is None

    def test_exhaustive_three_ec_small(self):
        """Exhaustive n = 3 agrees with the naive oracle on G_{5,2}."""
        graph = build(GraphParams.canonical(5, 2))
        assert check_ec(graph, 3).verdict == naive_check_ec(graph, 3).verdict

    def test_worker_count_does_not_change_report(self):
        """Reports are identical for 1 and 8 workers."""
        graph = build(GraphParams.canonical(5, 3))
        for mode in (CheckMode.exhaustive(), CheckMode.sampled(300, 3)):
            one = check_ec(graph, 2, mode, max_workers=1).to_dict(include_timing=False)
            eight = check_ec(graph, 2, mode, max_workers=8).to_dict(include_timing=False)
            assert one == eight

    def test_failing_report_independent_of_workers(self):
        """A failing exhaustive check reports the same certificate and count for any worker count."""
        graph = build(GraphParams.canonical(3, 2))
        reports = [check_ec(graph, 3, max_workers=w).to_dict(include_timing=False) for w in (1, 2, 3, 8)]
        assert all(r == reports[0] for r in reports)

    def test_sampled_is_seeded(self, g72):
        """Same seed, same report."""
        first = check_ec(g72, 2, CheckMode.sampled(200, 11)).to_dict(include_timing=False)
        second = check_ec(g72, 2, CheckMode.sampled(200, 11)).to_dict(include_timing=False)
        assert first == second
        assert first["seed"] == 11 and first["samples"] == 200

    def test_sampled_oracle_matches_materialized(self):
        """Sampled checks give the same report with or without bitsets."""
        params = GraphParams.canonical(7, 3)
        mode = CheckMode.sampled(40, 5)
        full = check_ec(build(params), 2, mode).to_dict(include_timing=False)
        oracle = check_ec(build(params, materialize_limit=10), 2, mode).to_dict(include_timing=False)
        assert full == oracle

    def test_exhaustive_needs_bitsets(self):
        """Exhaustive mode on an oracle-only graph raises."""
        graph = build(GraphParams.canonical(7, 3), materialize_limit=10)
        with pytest.raises(NotMaterializedError):
            check_ec(graph, 1)

    def test_exhaustive_n_limit(self, g72):
        """Exhaustive mode is capped."""
        with pytest.raises(GraphSizeError):
            check_ec(g72, EXHAUSTIVE_MAX_N + 1)

    def test_n_larger_than_graph(self):
        """n + 1 vertices are needed."""
        graph = build(GraphParams.canonical(3, 1))
        with pytest.raises(GraphSizeError, match="vertex budget"):
            check_ec(graph, 3)

    def test_invalid_arguments(self, g72):
        """n and max_workers must be positive."""
        with pytest.raises(ValueError):
            check_ec(g72, 0)
        with pytest.raises(ValueError):
            check_ec(g72, 1, max_workers=0)


class TestReport:
    """Test report serialisation."""

    def test_exhaustive_keys(self, g72):
        """Exhaustive reports carry no sampling fields."""
        data = check_ec(g72, 1).to_dict()
        assert list(data)[:6] == ["m", "d", "edge_values", "fingerprint", "n", "mode"]
        assert data["mode"] == "exhaustive"
        assert "samples" not in data and "seed" not in data
        assert data["edge_values"] == [0, 1, 2, 3]
        assert isinstance(data["elapsed_ms"], float)

    def test_timing_can_be_dropped(self, g72):
        """include_timing=False serialises elapsed_ms as None."""
        assert check_ec(g72, 1).to_dict(include_timing=False)["elapsed_ms"] is None

    def test_certificate_dict(self):
        """Certificates list points, indices and the A/B split."""
        data = check_ec(build(GraphParams.canonical(3, 1)), 1).to_dict()
        assert data["certificate"] == {"points": [[0]], "indices": [0], "pattern": 0, "A": [], "B": [[0]]}


class TestNaiveCheck:
    """Test the reference checker."""

    def test_whole_graph_query_fails(self):
        """n = V leaves no room for a witness."""
        graph = build(GraphParams.canonical(3, 1))
        assert naive_check_ec(graph, 3).verdict == "fail"

    def test_too_many_points(self):
        """n > V fails with no certificate and nothing to check."""
        graph = build(GraphParams.canonical(3, 1))
        report = naive_check_ec(graph, 4)
        assert report.verdict == "fail"
        assert report.certificate is None
        assert report.queries_checked == 0

    def test_invalid_n(self):
        """n must be positive."""
        with pytest.raises(ValueError):
            naive_check_ec(build(GraphParams.canonical(3, 1)), 0)

    def test_iter_queries(self):
        """C(V, n) * 2^n queries."""
        graph = build(GraphParams.canonical(3, 1))
        assert len(list(iter_queries(graph, 2))) == 3 * 4


class TestDrawSamples:
    """Test sample drawing."""

    def test_rows_are_sorted_and_distinct(self):
        """Each row holds n distinct ascending indices."""
        samples = draw_samples(49, 3, 100, 1)
        assert samples.shape == (100, 3)
        assert all(len(set(row)) == 3 and list(row) == sorted(row) for row in samples.tolist())
        assert samples.min() >= 0 and samples.max() < 49

    def test_seeded(self):
        """Same seed, same samples."""
        assert (draw_samples(49, 2, 10, 5) == draw_samples(49, 2, 10, 5)).all()


class TestWorkerProcesses:
    """Test the process-pool path of check_ec."""

    def test_multiple_workers_use_a_process_pool(self, mocker):
        """max_workers > 1 hands ranges to worker processes; the report matches one worker."""
        graph = build(GraphParams.canonical(5, 2))
        pool = mocker.patch("concurrent.futures.ProcessPoolExecutor", wraps=concurrent.futures.ProcessPoolExecutor)
        many = check_ec(graph, 2, max_workers=2).to_dict(include_timing=False)
        assert pool.call_count == 1
        assert pool.call_args.kwargs["max_workers"] == 2
        assert pool.call_args.kwargs["initializer"] is checker._init_worker
        assert many == check_ec(graph, 2, max_workers=1).to_dict(include_timing=False)
        assert pool.call_count == 1

    def test_worker_rebuilds_graph(self, monkeypatch):
        """A worker's rebuilt graph scans a range exactly as the original does."""
        monkeypatch.setattr(checker, "_worker_graph", None)
        monkeypatch.setattr(checker, "_worker_flag", None)
        graph = build(GraphParams.canonical(5, 2), bitset_cache_size=100, bitset_cache_bytes=512)
        checker._init_worker(graph.params, True, 100, 512, None)
        rebuilt = checker._worker_graph
        assert rebuilt.materialized
        assert rebuilt.connection_bitset == graph.connection_bitset
        assert rebuilt._row.cache_info().maxsize == graph._row.cache_info().maxsize
        job = (3, 1, graph.vertex_count)
        in_worker = checker._scan_in_worker("exhaustive", 0, True, job)
        direct = checker._exhaustive_range(graph, checker._FailureFlag(), 0, True, *job)
        assert in_worker == direct

    def test_worker_keeps_oracle_graphs_oracle(self, monkeypatch):
        """Oracle-only graphs stay oracle-only in workers."""
        monkeypatch.setattr(checker, "_worker_graph", None)
        monkeypatch.setattr(checker, "_worker_flag", None)
        params = GraphParams.canonical(7, 3)
        checker._init_worker(params, False, 16384, 2**26, None)
        assert not checker._worker_graph.materialized
        samples = draw_samples(params.vertex_count, 2, 10, 4)
        oracle = build(params, materialize_limit=10)
        assert checker._scan_in_worker("sampled", 0, False, (samples,)) == checker._sampled_range(oracle, checker._FailureFlag(), 0, False, samples)

    def test_failing_check_across_processes(self):
        """Early exit in several processes still reports the first failure in order."""
        graph = build(GraphParams.canonical(3, 2))
        one = check_ec(graph, 3, max_workers=1).to_dict(include_timing=False)
        four = check_ec(graph, 3, max_workers=4).to_dict(include_timing=False)
        assert one["verdict"] == "fail"
        assert one == four


class TestFailureFlag:
    """Test the shared early-stop flag."""

    def test_keeps_lowest_failing_range(self):
        """Only the lowest failing range index is kept."""
        flag = checker._FailureFlag()
        assert flag.lowest is None
        flag.record(5)
        flag.record(7)
        flag.record(2)
        assert flag.lowest == 2

    def test_superseded(self):
        """Ranges after the lowest failure may stop; earlier ones may not."""
        flag = checker._FailureFlag()
        assert not flag.superseded(3)
        flag.record(3)
        assert flag.superseded(4)
        assert not flag.superseded(3)
        assert not flag.superseded(1)

    def test_shared_value(self):
        """Two flags over one shared value see each other's records."""
        lowest = multiprocessing.Value("q", -1)
        first, second = checker._FailureFlag(lowest), checker._FailureFlag(lowest)
        first.record(6)
        assert second.lowest == 6
