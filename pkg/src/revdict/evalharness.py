"""Retrieval evaluation: target-word ranks, accuracy@k, and depth sweeps.

A test case is (target word, descriptive phrase). Each phrase is queried
against the index and the 1-based rank of the target in the full ranking is
recorded. Accuracy@k is the fraction of scored cases with rank <= k; the
median and standard deviation are computed only over ranks strictly below
100. Targets that never appear in the output (absent from the lexicon, or
excluded as input words) are scored as rank N; with ``corr`` enabled,
cases whose target is missing from the lexicon are dropped from all
denominators instead. Phrases that yield no content words are skipped and
counted.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .graph import MatrixKind
from .similarity import NoContentWordsError, query
from .store import IndexBundle

__all__ = [
    "TestCase",
    "CaseResult",
    "EvalReport",
    "load_cases",
    "evaluate",
    "chance_accuracy",
    "depth_sweep",
    "summarize_ranks",
]

ACCURACY_CUTOFFS = (1, 10, 100)
_MEDIAN_CUTOFF = 100


@dataclass(frozen=True)
class TestCase:
    target: str
    phrase: str

    def __post_init__(self) -> None:
        if not self.target or not self.phrase:
            raise ValueError("test cases need a non-empty target and phrase")


@dataclass(frozen=True)
class CaseResult:
    case: TestCase
    rank: int | None          # None when the case was skipped or dropped
    not_found: bool = False   # rank was assigned as N because the target never ranked
    skipped: bool = False     # query failed (no content words)
    dropped: bool = False     # corr mode: target outside the lexicon


@dataclass(frozen=True)
class EvalReport:
    results: tuple[CaseResult, ...]
    accuracy: dict[int, float]
    median_rank: float | None
    rank_std_population: float | None
    rank_std_sample: float | None
    case_count: int            # scored cases (denominator of the accuracies)
    skipped_count: int
    dropped_count: int
    depth: int
    lexicon_size: int
    kind: MatrixKind

    def ranks(self) -> tuple[int, ...]:
        return tuple(r.rank for r in self.results if r.rank is not None)

    def same_ranks(self, other: "EvalReport") -> bool:
        return self.ranks() == other.ranks()


def load_cases(path: str | Path) -> tuple[TestCase, ...]:
    """Read a TSV test set: ``target<TAB>phrase`` per line, '#' comments."""
    cases: list[TestCase] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            if "\t" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'target<TAB>phrase'")
            target, phrase = line.rstrip("\n").split("\t", 1)
            if not target.strip() or not phrase.strip():
                raise ValueError(f"{path}:{lineno}: empty target or phrase")
            cases.append(TestCase(target=target.strip().lower(), phrase=phrase.strip()))
    if not cases:
        raise ValueError(f"{path}: no test cases found")
    return tuple(cases)


def summarize_ranks(ranks: Sequence[int]) -> dict:
    """Accuracy@k plus median/std over sub-100 ranks for a finished rank list."""
    total = len(ranks)
    accuracy = {
        k: (sum(1 for r in ranks if r <= k) / total if total else 0.0)
        for k in ACCURACY_CUTOFFS
    }
    sub = [r for r in ranks if r < _MEDIAN_CUTOFF]
    median = float(statistics.median(sub)) if sub else None
    std_pop = float(statistics.pstdev(sub)) if sub else None
    std_sample = float(statistics.stdev(sub)) if len(sub) >= 2 else None
    return {
        "accuracy": accuracy,
        "median": median,
        "std_population": std_pop,
        "std_sample": std_sample,
    }


def evaluate(
    cases: Sequence[TestCase],
    index: IndexBundle,
    depth: int | None = None,
    corr: bool = False,
    kind: MatrixKind | str | None = None,
    include_inputs: bool = False,
) -> EvalReport:
    """Rank every case's target and aggregate the rank distribution."""
    if not cases:
        raise ValueError("no test cases to evaluate")
    resolved = index.default_kind() if kind is None else MatrixKind(kind)
    if depth is None:
        depth = max(1, index.depth_by_kind[resolved])
    n = len(index.lexicon)

    results: list[CaseResult] = []
    for case in cases:
        target_id = index.lexicon.lookup(case.target)
        if target_id is None and corr:
            results.append(CaseResult(case=case, rank=None, dropped=True))
            continue
        try:
            ranked = query(
                case.phrase,
                index,
                depth=depth,
                limit=None,
                kind=resolved,
                include_inputs=include_inputs,
            )
        except NoContentWordsError:
            results.append(CaseResult(case=case, rank=None, skipped=True))
            continue
        rank = ranked.rank_of(target_id) if target_id is not None else None
        if rank is None:
            results.append(CaseResult(case=case, rank=n, not_found=True))
        else:
            results.append(CaseResult(case=case, rank=rank))

    ranks = [r.rank for r in results if r.rank is not None]
    summary = summarize_ranks(ranks)
    return EvalReport(
        results=tuple(results),
        accuracy=summary["accuracy"],
        median_rank=summary["median"],
        rank_std_population=summary["std_population"],
        rank_std_sample=summary["std_sample"],
        case_count=len(ranks),
        skipped_count=sum(1 for r in results if r.skipped),
        dropped_count=sum(1 for r in results if r.dropped),
        depth=depth,
        lexicon_size=n,
        kind=resolved,
    )


def chance_accuracy(k: int, lexicon_size: int) -> float:
    """Expected accuracy@k when ranks are assigned uniformly at random: k/N."""
    if lexicon_size < 1:
        raise ValueError("lexicon size must be positive")
    if k < 1 or k > lexicon_size:
        raise ValueError(f"cutoff k={k} must lie in 1..{lexicon_size}")
    return k / lexicon_size


def depth_sweep(
    cases: Sequence[TestCase],
    index: IndexBundle,
    depths: Sequence[int],
    corr: bool = False,
    kind: MatrixKind | str | None = None,
    include_inputs: bool = False,
) -> tuple[dict[int, EvalReport], int | None]:
    """Evaluate at each depth (ascending) and report the first depth from
    which the per-case ranks never change again."""
    if not depths:
        raise ValueError("need at least one depth")
    if list(depths) != sorted(set(depths)):
        raise ValueError("depths must be strictly ascending")
    reports = {
        d: evaluate(cases, index, depth=d, corr=corr, kind=kind, include_inputs=include_inputs)
        for d in depths
    }
    stable_depth: int | None = None
    ordered = list(depths)
    for i, d in enumerate(ordered):
        if all(reports[d].same_ranks(reports[later]) for later in ordered[i + 1:]):
            stable_depth = d
            break
    return reports, stable_depth
