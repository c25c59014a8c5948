"""Sparse binary connectivity matrices and graph traversal.

A matrix entry M[j, i] = 1 means there is a propagation edge i -> j, so a
column lists where a word's activation flows. For the back-linked matrix
that column holds exactly the words whose processed definitions contain
word i (the reverse map); the forward-linked matrix is its transpose; the
mixed matrix patches columns of words that cannot reach the whole graph
with their forward links.

All matrices are immutable after construction. Traversal state (first
activation depths, per-source coverage) is derived on demand and cached.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

import numpy as np
import scipy.sparse as sp

from ._kernels import multi_source_reach
from .ingest import BackLinkedList, ForwardLinkedList

__all__ = [
    "UNREACHED",
    "MatrixKind",
    "SparseBinaryMatrix",
    "ReachabilityTrace",
    "GraphStats",
    "build_blm",
    "build_flm",
    "build_mblm",
    "evolve",
    "max_nonredundant_depth",
    "compute_stats",
    "write_stats_report",
]

UNREACHED = -1


class MatrixKind(str, enum.Enum):
    BLM = "blm"
    FLM = "flm"
    MBLM = "mblm"


class ReachSummary(NamedTuple):
    """Per-source totals from the all-sources sweep (0-based node index)."""

    reached: np.ndarray        # nodes ever reached, source included
    saturation: np.ndarray     # last depth that activated anything new
    full_coverage: np.ndarray  # first depth covering the whole graph, -1 if never


class SparseBinaryMatrix:
    """Immutable 0/1 connectivity matrix in compressed sparse row layout.

    Row/column index k corresponds to word-id k+1. The diagonal is zero by
    construction and enforced here.
    """

    def __init__(self, kind: MatrixKind, csr: sp.csr_matrix):
        if csr.shape[0] != csr.shape[1]:
            raise ValueError(f"connectivity matrix must be square, got {csr.shape}")
        csr = csr.tocsr().astype(np.uint8)
        csr.sum_duplicates()
        if csr.nnz:
            csr.data.fill(1)
        if csr.diagonal().any():
            raise ValueError("connectivity matrix has nonzero diagonal entries")
        csr.sort_indices()
        self.kind = MatrixKind(kind)
        self.csr = csr
        self._out: tuple[np.ndarray, np.ndarray] | None = None
        self._reach: ReachSummary | None = None

    @property
    def n(self) -> int:
        return self.csr.shape[0]

    @property
    def nnz(self) -> int:
        return int(self.csr.nnz)

    @property
    def sparsity(self) -> float:
        if self.n == 0:
            return 1.0
        return 1.0 - self.nnz / (self.n * self.n)

    def out_adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR arrays (indptr, indices) of out-neighbours: row i lists the
        nodes j with an edge i -> j, i.e. the nonzero rows of column i."""
        if self._out is None:
            t = self.csr.T.tocsr()
            t.sort_indices()
            self._out = (
                np.ascontiguousarray(t.indptr, dtype=np.int64),
                np.ascontiguousarray(t.indices, dtype=np.int32),
            )
        return self._out

    def reach_summary(self) -> ReachSummary:
        if self._reach is None:
            indptr, indices = self.out_adjacency()
            self._reach = ReachSummary(*multi_source_reach(indptr, indices, self.n))
        return self._reach

    def entries(self) -> Iterator[tuple[int, int]]:
        """Nonzero positions as 1-based (row_id, col_id) pairs."""
        coo = self.csr.tocoo()
        for r, c in zip(coo.row, coo.col):
            yield int(r) + 1, int(c) + 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseBinaryMatrix):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.csr.shape == other.csr.shape
            and np.array_equal(self.csr.indptr, other.csr.indptr)
            and np.array_equal(self.csr.indices, other.csr.indices)
        )

    def __repr__(self) -> str:
        return f"SparseBinaryMatrix(kind={self.kind.value}, n={self.n}, nnz={self.nnz})"


@dataclass(frozen=True)
class ReachabilityTrace:
    """First-activation depths from a set of source words.

    ``depths[k]`` is the depth of word-id k+1, or UNREACHED (-1). Sources
    sit at depth 0; a finite depth never exceeds ``max_depth_run``.
    """

    sources: tuple[int, ...]
    depths: np.ndarray
    max_depth_run: int

    def depth_of(self, word_id: int) -> int:
        return int(self.depths[word_id - 1])

    def reached_ids(self) -> np.ndarray:
        return np.nonzero(self.depths >= 0)[0] + 1


def _coo(entries_r: Iterable[int], entries_c: Iterable[int], n: int) -> sp.csr_matrix:
    rows = np.fromiter(entries_r, dtype=np.int64)
    cols = np.fromiter(entries_c, dtype=np.int64)
    data = np.ones(len(rows), dtype=np.uint8)
    return sp.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()


def build_blm(fwd: ForwardLinkedList, back: BackLinkedList) -> SparseBinaryMatrix:
    """Back-linked matrix: entry (j, i) = 1 iff word i occurs in the
    processed definition of word j. Self-references are dropped."""
    n = len(fwd)
    if len(back) != n:
        raise ValueError("forward and back lists disagree on lexicon size")
    rows: list[int] = []
    cols: list[int] = []
    for i in range(1, n + 1):
        for j in back.refs(i):
            if j != i:
                rows.append(j - 1)
                cols.append(i - 1)
    return SparseBinaryMatrix(MatrixKind.BLM, _coo(rows, cols, n))


def build_flm(fwd: ForwardLinkedList) -> SparseBinaryMatrix:
    """Forward-linked matrix: entry (j, i) = 1 iff word j occurs in the
    processed definition of word i. Exact transpose of the back-linked
    matrix built from the same lists, constructed independently of it."""
    n = len(fwd)
    rows: list[int] = []
    cols: list[int] = []
    for i in range(1, n + 1):
        for j in set(fwd.defs(i)):
            if j != i:
                rows.append(j - 1)
                cols.append(i - 1)
    return SparseBinaryMatrix(MatrixKind.FLM, _coo(rows, cols, n))


def build_mblm(blm: SparseBinaryMatrix, p: int | None = None) -> SparseBinaryMatrix:
    """Mixed back-linked matrix: for every source that cannot reach the
    whole graph within p steps, add its forward links (its matrix row,
    transposed into its column). p defaults to the matrix's maximum
    non-redundant depth and may not be smaller than it, so "within p
    steps" and "ever" coincide.
    """
    n = blm.n
    summary = blm.reach_summary()
    p_min = int(summary.saturation.max(initial=0))
    if p is None:
        p = p_min
    elif p < p_min:
        raise ValueError(f"depth {p} is below the maximum non-redundant depth {p_min}")

    deficient = np.nonzero(summary.reached < n)[0]
    if deficient.size == 0:
        return SparseBinaryMatrix(MatrixKind.MBLM, blm.csr.copy())

    base = blm.csr.tocoo()
    extra_rows: list[np.ndarray] = []
    extra_cols: list[np.ndarray] = []
    indptr, indices = blm.csr.indptr, blm.csr.indices
    for i in deficient:
        row = indices[indptr[i]: indptr[i + 1]]
        if row.size:
            extra_rows.append(row.astype(np.int64))
            extra_cols.append(np.full(row.size, i, dtype=np.int64))
    rows = np.concatenate([base.row.astype(np.int64)] + extra_rows) if extra_rows else base.row
    cols = np.concatenate([base.col.astype(np.int64)] + extra_cols) if extra_cols else base.col
    data = np.ones(len(rows), dtype=np.uint8)
    mixed = sp.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()
    mixed.setdiag(0)
    mixed.eliminate_zeros()
    return SparseBinaryMatrix(MatrixKind.MBLM, mixed)


def _neighbors_of(indptr: np.ndarray, indices: np.ndarray, frontier: np.ndarray) -> np.ndarray:
    """Concatenated out-neighbour lists of the frontier nodes (with repeats)."""
    starts = indptr[frontier]
    counts = indptr[frontier + 1] - starts
    keep = counts > 0
    if not keep.all():
        starts = starts[keep]
        counts = counts[keep]
    if starts.size == 0:
        return np.empty(0, dtype=indices.dtype)
    total = int(counts.sum())
    deltas = np.ones(total, dtype=np.int64)
    deltas[0] = starts[0]
    if starts.size > 1:
        pos = np.cumsum(counts)[:-1]
        deltas[pos] = starts[1:] - starts[:-1] - counts[:-1] + 1
    return indices[np.cumsum(deltas)]


def evolve(matrix: SparseBinaryMatrix, sources: Iterable[int], n: int) -> ReachabilityTrace:
    """Propagate activation from the source words for n steps and record
    each word's first-activation depth.

    Edges run i -> j wherever matrix[j, i] = 1; the recorded depth is the
    shortest directed path length from any source, capped at n. Once a word
    activates its depth never changes. Propagation walks only the current
    frontier's out-edges, so total work is proportional to edges touched,
    not steps times matrix size.
    """
    size = matrix.n
    ids = sorted(set(int(s) for s in sources))
    if not ids:
        raise ValueError("sources must be non-empty")
    if ids[0] < 1 or ids[-1] > size:
        raise ValueError(f"source ids must lie in 1..{size}")
    if n < 0:
        raise ValueError("search depth must be non-negative")

    depths = np.full(size, UNREACHED, dtype=np.int32)
    frontier = np.asarray(ids, dtype=np.int64) - 1
    depths[frontier] = 0
    indptr, indices = matrix.out_adjacency()
    for t in range(1, n + 1):
        raw = _neighbors_of(indptr, indices, frontier)
        if raw.size == 0:
            break
        fresh = raw[depths[raw] < 0]
        if fresh.size == 0:
            break
        mask = np.zeros(size, dtype=bool)
        mask[fresh] = True
        frontier = np.nonzero(mask)[0]
        depths[frontier] = t
    return ReachabilityTrace(sources=tuple(ids), depths=depths, max_depth_run=n)


def max_nonredundant_depth(matrix: SparseBinaryMatrix) -> int:
    """Smallest depth p after which no source activates anything new: the
    maximum over sources of their saturation depth."""
    if matrix.n == 0:
        return 0
    return int(matrix.reach_summary().saturation.max(initial=0))


@dataclass(eq=False)
class GraphStats:
    """Connectivity diagnostics for one matrix.

    ``min_full_depth`` uses the reporting convention that 0 means the word
    never excites the entire graph; internal traversal code keeps the two
    cases distinct. ``backlink_degree`` is each word's out-degree in the
    propagation digraph (for a back-linked matrix: the number of words
    whose definitions contain it).
    """

    kind: MatrixKind
    n: int
    nnz: int
    sparsity: float
    min_full_depth: np.ndarray
    backlink_degree: np.ndarray
    degree_mean: float
    degree_std: float
    degree_max: int
    max_nonredundant_depth: int

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GraphStats):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.n == other.n
            and self.nnz == other.nnz
            and self.sparsity == other.sparsity
            and np.array_equal(self.min_full_depth, other.min_full_depth)
            and np.array_equal(self.backlink_degree, other.backlink_degree)
            and self.degree_mean == other.degree_mean
            and self.degree_std == other.degree_std
            and self.degree_max == other.degree_max
            and self.max_nonredundant_depth == other.max_nonredundant_depth
        )


def compute_stats(matrix: SparseBinaryMatrix) -> GraphStats:
    """Sparsity, per-word coverage depths, out-degree distribution, and the
    maximum non-redundant depth, in one pass over the matrix."""
    n = matrix.n
    summary = matrix.reach_summary()
    min_full = np.where(summary.full_coverage < 0, 0, summary.full_coverage).astype(np.int32)
    degrees = np.bincount(matrix.csr.indices, minlength=n).astype(np.int32) if matrix.nnz else np.zeros(n, np.int32)
    return GraphStats(
        kind=matrix.kind,
        n=n,
        nnz=matrix.nnz,
        sparsity=matrix.sparsity,
        min_full_depth=min_full,
        backlink_degree=degrees,
        degree_mean=float(degrees.mean()) if n else 0.0,
        degree_std=float(degrees.std()) if n else 0.0,
        degree_max=int(degrees.max(initial=0)),
        max_nonredundant_depth=int(summary.saturation.max(initial=0)),
    )


def _histogram_tsv(values: np.ndarray, path: Path, value_name: str) -> None:
    counts = np.bincount(values) if values.size else np.zeros(1, dtype=np.int64)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{value_name}\tword_count\n")
        for value, count in enumerate(counts):
            if count:
                fh.write(f"{value}\t{count}\n")


def write_stats_report(stats: GraphStats, out_dir: str | Path) -> list[Path]:
    """Emit a key/value report plus TSV histograms of the coverage-depth and
    out-degree distributions. Returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = out / f"stats_{stats.kind.value}.txt"
    never = int((stats.min_full_depth == 0).sum())
    zero_degree = int((stats.backlink_degree == 0).sum())
    with open(report, "w", encoding="utf-8") as fh:
        fh.write(f"kind\t{stats.kind.value}\n")
        fh.write(f"n\t{stats.n}\n")
        fh.write(f"nnz\t{stats.nnz}\n")
        fh.write(f"sparsity\t{stats.sparsity:.6f}\n")
        fh.write(f"max_nonredundant_depth\t{stats.max_nonredundant_depth}\n")
        fh.write(f"degree_mean\t{stats.degree_mean:.4f}\n")
        fh.write(f"degree_std\t{stats.degree_std:.4f}\n")
        fh.write(f"degree_max\t{stats.degree_max}\n")
        fh.write(f"words_without_full_coverage\t{never}\n")
        fh.write(f"words_with_zero_backlinks\t{zero_degree}\n")
    cov = out / f"coverage_depth_hist_{stats.kind.value}.tsv"
    _histogram_tsv(stats.min_full_depth.astype(np.int64), cov, "min_full_depth")
    deg = out / f"backlink_degree_hist_{stats.kind.value}.tsv"
    _histogram_tsv(stats.backlink_degree.astype(np.int64), deg, "backlink_degree")
    return [report, cov, deg]
