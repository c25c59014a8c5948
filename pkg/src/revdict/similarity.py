"""Phrase-to-lexicon similarity scoring and the end-to-end query pipeline.

Every lexicon word W is scored against the input words {P_i} of a phrase:

    score(W) = sum_i (nu_i * d_i)^-1  /  sum_i nu_i^-1

where d_i is W's first-activation depth when propagation starts from P_i
alone, and nu_i is P_i's definition frequency (0 smoothed to 1 throughout,
so consistency-added words typed by a user cannot divide by zero). Terms
with unreachable W contribute nothing; hence unreachable-from-everywhere
words score exactly 0 and sink to the bottom of the ranking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .graph import MatrixKind, SparseBinaryMatrix, evolve
from .ingest import Lexicon
from .textproc import LemmaRules, StopwordList, extract_content_lemmas

if TYPE_CHECKING:  # pragma: no cover
    from .store import IndexBundle

__all__ = ["QueryPlan", "RankedOutput", "NoContentWordsError", "plan_query", "score", "query"]


class NoContentWordsError(ValueError):
    """The phrase yields no input word that resolves to the lexicon."""

    code = "NO_CONTENT_WORDS"


@dataclass(frozen=True)
class QueryPlan:
    """Resolved inputs for one query: distinct (word_id, nu) pairs in first-
    occurrence order, the search depth, and any unresolvable tokens."""

    input_words: tuple[tuple[int, int], ...]
    depth: int
    include_inputs: bool
    unknown_tokens: tuple[str, ...]


@dataclass(frozen=True)
class RankedOutput:
    """Words ordered by descending score; ties broken by higher frequency,
    then alphabetically (equivalently: ascending word-id).

    ``distances[i, k]`` is word-id k+1's first-activation depth from input i
    (-1 when unreached), kept so callers can explain each candidate.
    """

    word_ids: np.ndarray
    scores: np.ndarray
    input_ids: tuple[int, ...]
    input_nus: tuple[int, ...]
    depth: int
    include_inputs: bool
    distances: np.ndarray
    unknown_tokens: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.word_ids)

    def rank_of(self, word_id: int) -> int | None:
        """1-based rank of a word, or None if it is not in the output."""
        hits = np.nonzero(self.word_ids == word_id)[0]
        return int(hits[0]) + 1 if hits.size else None

    def distances_for(self, word_id: int) -> dict[int, int]:
        """Per-input first-activation depth of one word (-1 = unreached)."""
        col = self.distances[:, word_id - 1]
        return {pid: int(d) for pid, d in zip(self.input_ids, col)}

    def truncated(self, limit: int | None) -> "RankedOutput":
        if limit is None or limit >= len(self.word_ids):
            return self
        return RankedOutput(
            word_ids=self.word_ids[:limit],
            scores=self.scores[:limit],
            input_ids=self.input_ids,
            input_nus=self.input_nus,
            depth=self.depth,
            include_inputs=self.include_inputs,
            distances=self.distances,
            unknown_tokens=self.unknown_tokens,
        )

    def same_ranking(self, other: "RankedOutput") -> bool:
        return (
            np.array_equal(self.word_ids, other.word_ids)
            and np.array_equal(self.scores, other.scores)
        )


def plan_query(
    phrase: str,
    lexicon: Lexicon,
    stop: StopwordList,
    rules: LemmaRules,
    depth: int,
    include_inputs: bool = False,
) -> QueryPlan:
    """Extract the input words of a phrase and resolve them to the lexicon.

    The phrase goes through the same tokenize/stopword/lemmatize pipeline as
    definitions did. Lemmas missing from the lexicon are reported in
    ``unknown_tokens`` and excluded; duplicates collapse to one input word.
    Multi-word nodes are output-only and can never be matched as inputs.
    """
    if depth < 1:
        raise ValueError("query depth must be at least 1")

    def member(word: str) -> bool:
        wid = lexicon.lookup(word)
        return wid is not None and not bool(lexicon.is_mwe[wid - 1])

    lemmas = extract_content_lemmas(phrase, stop, rules, member)
    inputs: list[tuple[int, int]] = []
    unknown: list[str] = []
    seen_ids: set[int] = set()
    seen_unknown: set[str] = set()
    for lemma in lemmas:
        wid = lexicon.lookup(lemma)
        if wid is None or lexicon.is_mwe[wid - 1]:
            if lemma not in seen_unknown:
                seen_unknown.add(lemma)
                unknown.append(lemma)
            continue
        if wid not in seen_ids:
            seen_ids.add(wid)
            inputs.append((wid, lexicon.nu_of(wid)))
    if not inputs:
        raise NoContentWordsError(f"no content words resolvable from {phrase!r}")
    return QueryPlan(
        input_words=tuple(inputs),
        depth=depth,
        include_inputs=include_inputs,
        unknown_tokens=tuple(unknown),
    )


def score(plan: QueryPlan, matrix: SparseBinaryMatrix, lexicon: Lexicon) -> RankedOutput:
    """Score every lexicon word against the plan's input words.

    One propagation runs per input word. Input words themselves (depth 0)
    are excluded from the output unless the plan says otherwise, in which
    case each is scored as the maximum score among non-input words plus its
    own remaining terms, which floats the inputs to the top.
    """
    n = matrix.n
    k = len(plan.input_words)
    dist = np.empty((k, n), dtype=np.int32)
    for row, (wid, _) in enumerate(plan.input_words):
        dist[row] = evolve(matrix, (wid,), plan.depth).depths

    nus = np.array([max(nu, 1) for _, nu in plan.input_words], dtype=np.float64)
    inv_nu_sum = float((1.0 / nus).sum())
    dist_f = dist.astype(np.float64)
    with np.errstate(divide="ignore"):
        raw = 1.0 / (nus[:, None] * dist_f)
    contrib = np.where(dist > 0, raw, 0.0)
    scores = contrib.sum(axis=0) / inv_nu_sum

    input_pos = np.array([wid - 1 for wid, _ in plan.input_words], dtype=np.int64)
    keep = np.ones(n, dtype=bool)
    keep[input_pos] = False
    if plan.include_inputs:
        top = float(scores[keep].max()) if keep.any() else 0.0
        scores = scores.copy()
        scores[input_pos] += top
        kept = np.arange(n)
    else:
        kept = np.nonzero(keep)[0]

    order = np.lexsort((kept, -lexicon.nu[kept], -scores[kept]))
    return RankedOutput(
        word_ids=(kept[order] + 1).astype(np.int64),
        scores=scores[kept][order],
        input_ids=tuple(wid for wid, _ in plan.input_words),
        input_nus=tuple(nu for _, nu in plan.input_words),
        depth=plan.depth,
        include_inputs=plan.include_inputs,
        distances=dist,
        unknown_tokens=plan.unknown_tokens,
    )


def query(
    phrase: str,
    index: "IndexBundle",
    depth: int | None = None,
    limit: int | None = 20,
    kind: MatrixKind | str | None = None,
    include_inputs: bool = False,
) -> RankedOutput:
    """Full pipeline: plan, score over the chosen matrix, truncate.

    The matrix defaults to the mixed one when the bundle has it, else the
    back-linked one; the depth defaults to that matrix's maximum
    non-redundant depth (deeper searches cannot change the result).
    """
    resolved = index.default_kind() if kind is None else MatrixKind(kind)
    matrix = index.matrices[resolved]
    if depth is None:
        depth = max(1, index.depth_by_kind[resolved])
    plan = plan_query(
        phrase, index.lexicon, index.stopwords, index.rules, depth, include_inputs
    )
    return score(plan, matrix, index.lexicon).truncated(limit)
