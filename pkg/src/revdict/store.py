"""Single-file persistence for a built index.

A bundle is one self-describing binary container: magic bytes, a format
version, then length-prefixed sections (lexicon table, frequency array,
stopwords, lemma rules, one CSR block per matrix, stats, manifest). All
integers are little-endian; array payloads are raw fixed-dtype bytes. The
full layout is documented in docs/index-format.md.

Saving writes to a temporary file in the target directory and renames it
into place, so a failed save never leaves a partial index behind.
"""

from __future__ import annotations

import io
import json
import os
import struct
import tempfile
from dataclasses import dataclass
from pathlib import Path
import numpy as np
import scipy.sparse as sp

from .graph import GraphStats, MatrixKind, SparseBinaryMatrix
from .ingest import Lexicon
from .textproc import LemmaRules, StopwordList

__all__ = [
    "FORMAT_VERSION",
    "IndexBundle",
    "StoreError",
    "BadMagicError",
    "UnsupportedVersionError",
    "CorruptBundleError",
    "save",
    "load",
]

FORMAT_VERSION = 1
_MAGIC = b"RDIX"

_KIND_CODES = {MatrixKind.BLM: 1, MatrixKind.FLM: 2, MatrixKind.MBLM: 3}
_CODE_KINDS = {v: k for k, v in _KIND_CODES.items()}

_FLAG_MWE = 0x01
_FLAG_ADDED = 0x02


class StoreError(Exception):
    """Base error for bundle I/O."""


class BadMagicError(StoreError):
    """File does not start with the bundle magic bytes."""


class UnsupportedVersionError(StoreError):
    """Bundle was written with a format version this code does not read."""


class CorruptBundleError(StoreError):
    """Bundle is truncated or a section fails validation."""


@dataclass(eq=False)
class IndexBundle:
    """Everything a query needs: lexicon, matrices, processing tables, stats.

    ``stats`` describes the back-linked matrix; ``depth_by_kind`` records the
    maximum non-redundant depth of every matrix present, which is what query
    depth defaults to.
    """

    lexicon: Lexicon
    matrices: dict[MatrixKind, SparseBinaryMatrix]
    stats: GraphStats
    depth_by_kind: dict[MatrixKind, int]
    stopwords: StopwordList
    rules: LemmaRules
    manifest: dict
    format_version: int = FORMAT_VERSION

    def default_kind(self) -> MatrixKind:
        return MatrixKind.MBLM if MatrixKind.MBLM in self.matrices else MatrixKind.BLM

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IndexBundle):
            return NotImplemented
        return (
            self.format_version == other.format_version
            and self.lexicon == other.lexicon
            and self.matrices == other.matrices
            and self.stats == other.stats
            and self.depth_by_kind == other.depth_by_kind
            and self.stopwords == other.stopwords
            and self.rules.suffix_rules == other.rules.suffix_rules
            and self.rules.exceptions == other.rules.exceptions
            and self.manifest == other.manifest
        )


def _section(tag: bytes, payload: bytes) -> bytes:
    return tag + struct.pack("<Q", len(payload)) + payload


def _lexicon_payload(lexicon: Lexicon) -> bytes:
    buf = io.BytesIO()
    buf.write(struct.pack("<I", len(lexicon.words)))
    for idx, word in enumerate(lexicon.words):
        raw = word.encode("utf-8")
        flags = 0
        if lexicon.is_mwe[idx]:
            flags |= _FLAG_MWE
        if lexicon.added_for_consistency[idx]:
            flags |= _FLAG_ADDED
        buf.write(struct.pack("<I", len(raw)))
        buf.write(raw)
        buf.write(struct.pack("<B", flags))
    return buf.getvalue()


def _matrix_payload(matrix: SparseBinaryMatrix) -> bytes:
    csr = matrix.csr
    indptr = np.ascontiguousarray(csr.indptr, dtype="<i8")
    indices = np.ascontiguousarray(csr.indices, dtype="<i4")
    head = struct.pack("<BIQ", _KIND_CODES[matrix.kind], matrix.n, matrix.nnz)
    return head + indptr.tobytes() + indices.tobytes()


def _stats_payload(stats: GraphStats, depth_by_kind: dict[MatrixKind, int]) -> bytes:
    meta = {
        "kind": stats.kind.value,
        "n": stats.n,
        "nnz": stats.nnz,
        "sparsity": stats.sparsity,
        "degree_mean": stats.degree_mean,
        "degree_std": stats.degree_std,
        "degree_max": stats.degree_max,
        "max_nonredundant_depth": stats.max_nonredundant_depth,
        "depth_by_kind": {k.value: v for k, v in depth_by_kind.items()},
    }
    raw = json.dumps(meta, sort_keys=True).encode("utf-8")
    arrays = (
        np.ascontiguousarray(stats.min_full_depth, dtype="<i4").tobytes()
        + np.ascontiguousarray(stats.backlink_degree, dtype="<i4").tobytes()
    )
    return struct.pack("<I", len(raw)) + raw + arrays


def save(bundle: IndexBundle, path: str | Path) -> None:
    """Write the bundle to one file, atomically."""
    path = Path(path)
    blob = io.BytesIO()
    blob.write(_MAGIC)
    blob.write(struct.pack("<I", bundle.format_version))
    blob.write(_section(b"LEXI", _lexicon_payload(bundle.lexicon)))
    nu = np.ascontiguousarray(bundle.lexicon.nu, dtype="<i8")
    blob.write(_section(b"NUFQ", struct.pack("<I", len(nu)) + nu.tobytes()))
    stop_json = json.dumps(sorted(bundle.stopwords.words)).encode("utf-8")
    blob.write(_section(b"STOP", stop_json))
    rules_json = json.dumps(
        {
            "suffix_rules": [list(rule) for rule in bundle.rules.suffix_rules],
            "exceptions": bundle.rules.exceptions,
        },
        sort_keys=True,
    ).encode("utf-8")
    blob.write(_section(b"RULY", rules_json))
    for kind in (MatrixKind.BLM, MatrixKind.FLM, MatrixKind.MBLM):
        if kind in bundle.matrices:
            blob.write(_section(b"MTRX", _matrix_payload(bundle.matrices[kind])))
    blob.write(_section(b"STAT", _stats_payload(bundle.stats, bundle.depth_by_kind)))
    blob.write(_section(b"MANI", json.dumps(bundle.manifest, sort_keys=True).encode("utf-8")))

    data = blob.getvalue()
    try:
        fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp_name, path)
        except BaseException:
            try:
                os.unlink(tmp_name)
            except OSError:
                pass
            raise
    except OSError as exc:
        raise StoreError(f"cannot write index bundle to {path}: {exc}") from exc


class _Reader:
    def __init__(self, data: bytes, name: str):
        self.data = data
        self.pos = 0
        self.name = name

    def take(self, count: int) -> bytes:
        if self.pos + count > len(self.data):
            raise CorruptBundleError(f"{self.name}: truncated (needed {count} bytes)")
        out = self.data[self.pos: self.pos + count]
        self.pos += count
        return out

    def unpack(self, fmt: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def array(self, dtype: str, count: int) -> np.ndarray:
        item = np.dtype(dtype).itemsize
        return np.frombuffer(self.take(item * count), dtype=dtype).copy()

    @property
    def exhausted(self) -> bool:
        return self.pos >= len(self.data)


def _parse_lexicon(payload: bytes, name: str) -> tuple[tuple[str, ...], np.ndarray, np.ndarray]:
    r = _Reader(payload, name)
    (count,) = r.unpack("<I")
    words: list[str] = []
    mwe = np.zeros(count, dtype=bool)
    added = np.zeros(count, dtype=bool)
    for idx in range(count):
        (length,) = r.unpack("<I")
        try:
            words.append(r.take(length).decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise CorruptBundleError(f"{name}: bad word encoding at index {idx}") from None
        (flags,) = r.unpack("<B")
        mwe[idx] = bool(flags & _FLAG_MWE)
        added[idx] = bool(flags & _FLAG_ADDED)
    if not r.exhausted:
        raise CorruptBundleError(f"{name}: trailing bytes in lexicon section")
    return tuple(words), mwe, added


def _parse_matrix(payload: bytes, name: str) -> SparseBinaryMatrix:
    r = _Reader(payload, name)
    code, n, nnz = r.unpack("<BIQ")
    if code not in _CODE_KINDS:
        raise CorruptBundleError(f"{name}: unknown matrix kind code {code}")
    indptr = r.array("<i8", n + 1)
    indices = r.array("<i4", nnz)
    if not r.exhausted:
        raise CorruptBundleError(f"{name}: trailing bytes in matrix section")
    if indptr[0] != 0 or indptr[-1] != nnz or np.any(np.diff(indptr) < 0):
        raise CorruptBundleError(f"{name}: invalid CSR row offsets")
    if nnz and (indices.min() < 0 or indices.max() >= n):
        raise CorruptBundleError(f"{name}: CSR column index out of range")
    csr = sp.csr_matrix(
        (np.ones(nnz, dtype=np.uint8), indices.astype(np.int32), indptr.astype(np.int64)),
        shape=(n, n),
    )
    return SparseBinaryMatrix(_CODE_KINDS[code], csr)


def _parse_stats(payload: bytes, name: str) -> tuple[GraphStats, dict[MatrixKind, int]]:
    r = _Reader(payload, name)
    (json_len,) = r.unpack("<I")
    try:
        meta = json.loads(r.take(json_len).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        raise CorruptBundleError(f"{name}: bad stats header") from None
    n = int(meta["n"])
    min_full = r.array("<i4", n)
    degrees = r.array("<i4", n)
    if not r.exhausted:
        raise CorruptBundleError(f"{name}: trailing bytes in stats section")
    stats = GraphStats(
        kind=MatrixKind(meta["kind"]),
        n=n,
        nnz=int(meta["nnz"]),
        sparsity=float(meta["sparsity"]),
        min_full_depth=min_full.astype(np.int32),
        backlink_degree=degrees.astype(np.int32),
        degree_mean=float(meta["degree_mean"]),
        degree_std=float(meta["degree_std"]),
        degree_max=int(meta["degree_max"]),
        max_nonredundant_depth=int(meta["max_nonredundant_depth"]),
    )
    depths = {MatrixKind(k): int(v) for k, v in meta["depth_by_kind"].items()}
    return stats, depths


def load(path: str | Path) -> IndexBundle:
    """Read and validate a bundle. Loading never rebuilds a matrix."""
    path = Path(path)
    name = str(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise StoreError(f"cannot read index bundle {path}: {exc}") from exc

    r = _Reader(data, name)
    if r.take(len(_MAGIC)) != _MAGIC:
        raise BadMagicError(f"{name}: not an index bundle (bad magic bytes)")
    (version,) = r.unpack("<I")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"{name}: format version {version}, this build reads {FORMAT_VERSION}"
        )

    sections: list[tuple[bytes, bytes]] = []
    while not r.exhausted:
        tag = r.take(4)
        (length,) = r.unpack("<Q")
        sections.append((tag, r.take(length)))

    words: tuple[str, ...] | None = None
    mwe = added = nu = None
    stopwords: StopwordList | None = None
    rules: LemmaRules | None = None
    matrices: dict[MatrixKind, SparseBinaryMatrix] = {}
    stats: GraphStats | None = None
    depth_by_kind: dict[MatrixKind, int] = {}
    manifest: dict | None = None

    for tag, payload in sections:
        if tag == b"LEXI":
            words, mwe, added = _parse_lexicon(payload, name)
        elif tag == b"NUFQ":
            pr = _Reader(payload, name)
            (count,) = pr.unpack("<I")
            nu = pr.array("<i8", count).astype(np.int64)
            if not pr.exhausted:
                raise CorruptBundleError(f"{name}: trailing bytes in frequency section")
        elif tag == b"STOP":
            try:
                stopwords = StopwordList(frozenset(json.loads(payload.decode("utf-8"))))
            except (UnicodeDecodeError, json.JSONDecodeError):
                raise CorruptBundleError(f"{name}: bad stopword section") from None
        elif tag == b"RULY":
            try:
                blob = json.loads(payload.decode("utf-8"))
                rules = LemmaRules(
                    suffix_rules=tuple(tuple(rule) for rule in blob["suffix_rules"]),
                    exceptions=dict(blob["exceptions"]),
                )
            except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError):
                raise CorruptBundleError(f"{name}: bad lemma-rule section") from None
        elif tag == b"MTRX":
            matrix = _parse_matrix(payload, name)
            matrices[matrix.kind] = matrix
        elif tag == b"STAT":
            stats, depth_by_kind = _parse_stats(payload, name)
        elif tag == b"MANI":
            try:
                manifest = json.loads(payload.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError):
                raise CorruptBundleError(f"{name}: bad manifest section") from None
        else:
            raise CorruptBundleError(f"{name}: unknown section tag {tag!r}")

    if words is None or nu is None or stopwords is None or rules is None or stats is None or manifest is None:
        raise CorruptBundleError(f"{name}: missing required section")
    if MatrixKind.BLM not in matrices:
        raise CorruptBundleError(f"{name}: bundle lacks the back-linked matrix")
    n = len(words)
    if len(nu) != n or stats.n != n or any(m.n != n for m in matrices.values()):
        raise CorruptBundleError(f"{name}: section sizes disagree on lexicon size")

    lexicon = Lexicon(
        words=words,
        id_of={w: i + 1 for i, w in enumerate(words)},
        is_mwe=mwe,
        added_for_consistency=added,
        nu=nu,
    )
    return IndexBundle(
        lexicon=lexicon,
        matrices=matrices,
        stats=stats,
        depth_by_kind=depth_by_kind,
        stopwords=stopwords,
        rules=rules,
        manifest=manifest,
        format_version=version,
    )
