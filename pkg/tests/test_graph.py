import random

import numpy as np
import pytest
import scipy.sparse as sp

from oracles import (
    all_sources_summary,
    bfs_depths,
    containment_pairs,
    dictionary_tsv,
    random_toy_dictionary,
    reverse_map_edges,
)
from revdict.graph import (
    UNREACHED,
    MatrixKind,
    SparseBinaryMatrix,
    build_blm,
    build_flm,
    build_mblm,
    compute_stats,
    evolve,
    max_nonredundant_depth,
    write_stats_report,
)
from revdict.ingest import build_back_list, build_forward_list, load_dictionary
from revdict.textproc import LemmaRules, StopwordList

from conftest import FAM_TSV, TOY3_TSV

EMPTY_STOP = StopwordList.empty()
NO_RULES = LemmaRules(suffix_rules=(), exceptions={})


def lists_from_tsv(tsv: bytes):
    lexicon, fwd = build_forward_list([load_dictionary(tsv)], EMPTY_STOP, NO_RULES)
    return lexicon, fwd, build_back_list(fwd)


def lists_from_defs(defs: dict):
    return lists_from_tsv(dictionary_tsv(defs))


def named_entries(matrix, lexicon):
    return {(lexicon.word_of(r), lexicon.word_of(c)) for r, c in matrix.entries()}


def matrix_from_edges(n: int, edges: set[tuple[int, int]], kind=MatrixKind.BLM) -> SparseBinaryMatrix:
    """Matrix with propagation edge i -> j for each (i, j), both 0-based."""
    if edges:
        src, dst = zip(*edges)
        csr = sp.coo_matrix(
            (np.ones(len(edges), dtype=np.uint8), (np.array(dst), np.array(src))),
            shape=(n, n),
        ).tocsr()
    else:
        csr = sp.csr_matrix((n, n), dtype=np.uint8)
    return SparseBinaryMatrix(kind, csr)


def random_digraph(rng: random.Random, max_nodes: int = 200) -> tuple[int, set[tuple[int, int]]]:
    n = rng.randint(1, max_nodes)
    density = rng.choice([0.5, 1.0, 2.0, 4.0])
    m = int(n * density)
    edges = set()
    for _ in range(m):
        i, j = rng.randrange(n), rng.randrange(n)
        if i != j:
            edges.add((i, j))
    return n, edges


class TestBuildBlm:
    def test_toy3_entries_and_sparsity(self, empty_stop, no_rules):
        lexicon, fwd, back = lists_from_tsv(TOY3_TSV)
        blm = build_blm(fwd, back)
        assert named_entries(blm, lexicon) == {("a", "b"), ("b", "c"), ("c", "b")}
        assert blm.sparsity == pytest.approx(6 / 9)

    def test_fam_parent_column(self):
        from revdict.textproc import default_rules, default_stopwords

        lexicon, fwd = build_forward_list(
            [load_dictionary(FAM_TSV)], default_stopwords(), default_rules()
        )
        blm = build_blm(fwd, build_back_list(fwd))
        col = lexicon.id_of["parent"]
        rows = {lexicon.word_of(r) for r, c in blm.entries() if c == col}
        assert rows == {"father", "mother"}

    def test_empty_defs_zero_matrix(self):
        from revdict.ingest import ForwardLinkedList

        fwd = ForwardLinkedList(rows=((), (), ()))
        blm = build_blm(fwd, build_back_list(fwd))
        assert blm.nnz == 0

    def test_diagonal_dropped(self):
        lexicon, fwd, back = lists_from_defs({"x": ["x", "y"], "y": ["x"]})
        blm = build_blm(fwd, back)
        assert all(r != c for r, c in blm.entries())

    def test_oracle_containment(self):
        rng = random.Random(1234)
        for _ in range(20):
            defs = random_toy_dictionary(rng)
            lexicon, fwd, back = lists_from_defs(defs)
            blm = build_blm(fwd, back)
            expected = {(j, i) for j, i in containment_pairs(defs)}
            assert named_entries(blm, lexicon) == expected


class TestBuildFlm:
    def test_toy3_entries(self):
        lexicon, fwd, back = lists_from_tsv(TOY3_TSV)
        flm = build_flm(fwd)
        assert named_entries(flm, lexicon) == {("b", "a"), ("c", "b"), ("b", "c")}

    def test_transpose_duality_random(self):
        rng = random.Random(99)
        for _ in range(20):
            defs = random_toy_dictionary(rng)
            lexicon, fwd, back = lists_from_defs(defs)
            blm = build_blm(fwd, back)
            flm = build_flm(fwd)
            assert np.array_equal(flm.csr.toarray(), blm.csr.toarray().T)

    def test_fam_forward_propagation(self):
        from revdict.textproc import default_rules, default_stopwords

        lexicon, fwd = build_forward_list(
            [load_dictionary(FAM_TSV)], default_stopwords(), default_rules()
        )
        flm = build_flm(fwd)
        trace = evolve(flm, (lexicon.id_of["brother"],), 1)
        at_one = {lexicon.word_of(i + 1) for i in np.nonzero(trace.depths == 1)[0]}
        assert at_one == {"son", "father", "mother"}


class TestBuildMblm:
    def test_toy3_adds_forward_link(self):
        lexicon, fwd, back = lists_from_tsv(TOY3_TSV)
        blm = build_blm(fwd, back)
        mblm = build_mblm(blm, 2)
        assert named_entries(mblm, lexicon) - named_entries(blm, lexicon) == {("b", "a")}
        trace = evolve(mblm, (lexicon.id_of["a"],), 9)
        assert trace.depths.max() == 2
        assert (trace.depths >= 0).all()

    def test_strongly_connected_unchanged(self):
        lexicon, fwd, back = lists_from_defs({"x": ["y"], "y": ["z"], "z": ["x"]})
        blm = build_blm(fwd, back)
        mblm = build_mblm(blm)
        assert named_entries(mblm, lexicon) == named_entries(blm, lexicon)

    def test_depth_below_p_rejected(self):
        lexicon, fwd, back = lists_from_tsv(TOY3_TSV)
        blm = build_blm(fwd, back)
        with pytest.raises(ValueError, match="non-redundant"):
            build_mblm(blm, 1)

    def test_kind_marked(self):
        lexicon, fwd, back = lists_from_tsv(TOY3_TSV)
        mblm = build_mblm(build_blm(fwd, back))
        assert mblm.kind is MatrixKind.MBLM


class TestEvolve:
    def test_toy3_from_c(self):
        lexicon, fwd, back = lists_from_tsv(TOY3_TSV)
        blm = build_blm(fwd, back)
        trace = evolve(blm, (lexicon.id_of["c"],), 9)
        assert {lexicon.word_of(i + 1): int(d) for i, d in enumerate(trace.depths)} == {
            "c": 0,
            "b": 1,
            "a": 2,
        }

    def test_depth_zero_only_sources(self):
        lexicon, fwd, back = lists_from_tsv(TOY3_TSV)
        blm = build_blm(fwd, back)
        trace = evolve(blm, (2,), 0)
        assert trace.depth_of(2) == 0
        assert trace.depth_of(1) == UNREACHED
        assert trace.depth_of(3) == UNREACHED

    def test_fam_parent_to_brother(self):
        from revdict.textproc import default_rules, default_stopwords

        lexicon, fwd = build_forward_list(
            [load_dictionary(FAM_TSV)], default_stopwords(), default_rules()
        )
        blm = build_blm(fwd, build_back_list(fwd))
        trace = evolve(blm, (lexicon.id_of["parent"],), 9)
        assert trace.depth_of(lexicon.id_of["brother"]) == 2

    def test_multi_source_union(self):
        # 0-based edges; sources are the 1-based ids of nodes 0 and 3
        n, edges = 5, {(0, 1), (1, 2), (3, 4)}
        m = matrix_from_edges(n, edges)
        trace = evolve(m, (1, 4), 9)
        assert list(trace.depths) == [0, 1, 2, 0, 1]

    def test_invalid_sources(self):
        lexicon, fwd, back = lists_from_tsv(TOY3_TSV)
        blm = build_blm(fwd, back)
        with pytest.raises(ValueError):
            evolve(blm, (), 3)
        with pytest.raises(ValueError):
            evolve(blm, (0,), 3)
        with pytest.raises(ValueError):
            evolve(blm, (4,), 3)
        with pytest.raises(ValueError):
            evolve(blm, (1,), -1)

    def test_matches_naive_bfs_random(self):
        rng = random.Random(4242)
        for _ in range(30):
            n, edges = random_digraph(rng, max_nodes=60)
            matrix = matrix_from_edges(n, edges)
            adj = {i: set() for i in range(n)}
            for i, j in edges:
                adj[i].add(j)
            for src in range(n):
                expected = bfs_depths(adj, [src])
                trace = evolve(matrix, (src + 1,), n)
                for node in range(n):
                    want = expected.get(node, UNREACHED)
                    assert trace.depth_of(node + 1) == want

    def test_cap_respected_and_monotone(self):
        rng = random.Random(7)
        n, edges = random_digraph(rng, max_nodes=40)
        matrix = matrix_from_edges(n, edges)
        src = 1
        full = evolve(matrix, (src,), n)
        for cap in range(0, n + 1):
            capped = evolve(matrix, (src,), cap)
            for node in range(1, n + 1):
                d_full = full.depth_of(node)
                d_cap = capped.depth_of(node)
                if d_full != UNREACHED and d_full <= cap:
                    assert d_cap == d_full
                else:
                    assert d_cap == UNREACHED

    def test_asymmetry_on_toy3(self):
        lexicon, fwd, back = lists_from_tsv(TOY3_TSV)
        blm = build_blm(fwd, back)
        from_a = evolve(blm, (lexicon.id_of["a"],), 9)
        from_c = evolve(blm, (lexicon.id_of["c"],), 9)
        assert from_c.depth_of(lexicon.id_of["a"]) == 2
        assert from_a.depth_of(lexicon.id_of["c"]) == UNREACHED


class TestMaxNonredundantDepth:
    def test_toy3(self):
        lexicon, fwd, back = lists_from_tsv(TOY3_TSV)
        assert max_nonredundant_depth(build_blm(fwd, back)) == 2

    def test_zero_matrix(self):
        m = matrix_from_edges(4, set())
        assert max_nonredundant_depth(m) == 0

    def test_matches_naive_all_sources(self):
        rng = random.Random(31)
        for _ in range(15):
            defs = random_toy_dictionary(rng)
            lexicon, fwd, back = lists_from_defs(defs)
            blm = build_blm(fwd, back)
            adj = reverse_map_edges(defs)
            oracle = all_sources_summary(adj)
            assert max_nonredundant_depth(blm) == max(
                sat for _, sat, _ in oracle.values()
            )


class TestReachKernel:
    def test_against_naive_per_source(self):
        rng = random.Random(606)
        for _ in range(25):
            n, edges = random_digraph(rng, max_nodes=150)
            matrix = matrix_from_edges(n, edges)
            summary = matrix.reach_summary()
            adj = {i: set() for i in range(n)}
            for i, j in edges:
                adj[i].add(j)
            for src in range(n):
                depths = bfs_depths(adj, [src])
                assert summary.reached[src] == len(depths)
                assert summary.saturation[src] == max(depths.values())
                expected_full = max(depths.values()) if len(depths) == n else -1
                assert summary.full_coverage[src] == expected_full

    def test_single_node(self):
        m = matrix_from_edges(1, set())
        summary = m.reach_summary()
        assert summary.reached[0] == 1
        assert summary.saturation[0] == 0
        assert summary.full_coverage[0] == 0

    def test_batch_boundaries(self):
        # sizes straddling the 64-lane batch width
        for n in (63, 64, 65, 129):
            edges = {(i, i + 1) for i in range(n - 1)}
            m = matrix_from_edges(n, edges)
            summary = m.reach_summary()
            assert summary.reached[0] == n
            assert summary.full_coverage[0] == n - 1
            assert summary.saturation[n - 1] == 0


class TestComputeStats:
    def test_toy3_backlink_degrees(self):
        lexicon, fwd, back = lists_from_tsv(TOY3_TSV)
        stats = compute_stats(build_blm(fwd, back))
        assert dict(zip(lexicon.words, stats.backlink_degree)) == {"a": 0, "b": 2, "c": 1}
        assert stats.degree_max == 2
        assert stats.degree_mean == pytest.approx(1.0)

    def test_toy3_mblm_min_full_depth(self):
        lexicon, fwd, back = lists_from_tsv(TOY3_TSV)
        mblm = build_mblm(build_blm(fwd, back), 2)
        stats = compute_stats(mblm)
        assert dict(zip(lexicon.words, stats.min_full_depth)) == {"a": 2, "b": 1, "c": 2}

    def test_never_covering_word_gets_zero(self):
        lexicon, fwd, back = lists_from_tsv(TOY3_TSV)
        stats = compute_stats(build_blm(fwd, back))
        assert stats.min_full_depth[lexicon.id_of["a"] - 1] == 0

    def test_report_files(self, tmp_path):
        lexicon, fwd, back = lists_from_tsv(TOY3_TSV)
        stats = compute_stats(build_blm(fwd, back))
        paths = write_stats_report(stats, tmp_path)
        assert all(p.exists() for p in paths)
        text = paths[0].read_text()
        assert "max_nonredundant_depth\t2" in text
        hist = paths[2].read_text().splitlines()
        assert hist[0] == "backlink_degree\tword_count"


class TestMatrixInvariants:
    def test_diagonal_always_zero_random(self):
        rng = random.Random(11)
        for _ in range(10):
            defs = random_toy_dictionary(rng)
            lexicon, fwd, back = lists_from_defs(defs)
            for matrix in (
                build_blm(fwd, back),
                build_flm(fwd),
                build_mblm(build_blm(fwd, back)),
            ):
                assert not matrix.csr.diagonal().any()

    def test_constructor_rejects_nonzero_diagonal(self):
        csr = sp.csr_matrix(np.array([[1, 0], [0, 0]], dtype=np.uint8))
        with pytest.raises(ValueError, match="diagonal"):
            SparseBinaryMatrix(MatrixKind.BLM, csr)

    def test_constructor_rejects_rectangular(self):
        csr = sp.csr_matrix(np.zeros((2, 3), dtype=np.uint8))
        with pytest.raises(ValueError, match="square"):
            SparseBinaryMatrix(MatrixKind.BLM, csr)

    def test_equality(self):
        lexicon, fwd, back = lists_from_tsv(TOY3_TSV)
        a = build_blm(fwd, back)
        b = build_blm(fwd, back)
        assert a == b
        assert a != build_flm(fwd)
