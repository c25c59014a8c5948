from __future__ import annotations

import sys
from datetime import datetime, timezone
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from revdict.graph import MatrixKind, build_blm, build_flm, build_mblm, compute_stats, max_nonredundant_depth
from revdict.ingest import build_back_list, build_forward_list, load_dictionary
from revdict.store import IndexBundle
from revdict.textproc import LemmaRules, StopwordList, default_rules, default_stopwords

TOY3_TSV = b"a\tb\nb\tc\nc\tb\n"

FAM_TSV = (
    b"brother\tson of my father and my mother\n"
    b"father\ta parent\n"
    b"mother\ta parent\n"
    b"son\ta child\n"
    b"parent\tsomebody who has a child\n"
    b"child\ta son\n"
)


@pytest.fixture(scope="session")
def empty_stop() -> StopwordList:
    return StopwordList.empty()


@pytest.fixture(scope="session")
def no_rules() -> LemmaRules:
    return LemmaRules(suffix_rules=(), exceptions={})


@pytest.fixture(scope="session")
def english_stop() -> StopwordList:
    return default_stopwords()


@pytest.fixture(scope="session")
def english_rules() -> LemmaRules:
    return default_rules()


def build_index(
    tsv: bytes,
    stop: StopwordList,
    rules: LemmaRules,
    with_mblm: bool = False,
    with_flm: bool = False,
    name: str = "fixture",
) -> IndexBundle:
    """Assemble a bundle in memory the same way the build command does."""
    lexicon, fwd = build_forward_list([load_dictionary(tsv, name=name)], stop, rules)
    back = build_back_list(fwd)
    blm = build_blm(fwd, back)
    stats = compute_stats(blm)
    matrices = {MatrixKind.BLM: blm}
    depths = {MatrixKind.BLM: stats.max_nonredundant_depth}
    if with_mblm:
        mblm = build_mblm(blm, stats.max_nonredundant_depth)
        matrices[MatrixKind.MBLM] = mblm
        depths[MatrixKind.MBLM] = max_nonredundant_depth(mblm)
    if with_flm:
        flm = build_flm(fwd)
        matrices[MatrixKind.FLM] = flm
        depths[MatrixKind.FLM] = max_nonredundant_depth(flm)
    manifest = {
        "sources": [name],
        "stopwords_sha256": "fixture",
        "exceptions_sha256": "fixture",
        "rules_sha256": "fixture",
        "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "tool_version": "test",
        "format_version": 1,
    }
    return IndexBundle(
        lexicon=lexicon,
        matrices=matrices,
        stats=stats,
        depth_by_kind=depths,
        stopwords=stop,
        rules=rules,
        manifest=manifest,
    )


@pytest.fixture(scope="session")
def toy3_index(empty_stop, no_rules) -> IndexBundle:
    return build_index(TOY3_TSV, empty_stop, no_rules, with_mblm=True, with_flm=True, name="toy3")


@pytest.fixture(scope="session")
def fam_index(english_stop, english_rules) -> IndexBundle:
    return build_index(FAM_TSV, english_stop, english_rules, name="fam")


# ---------------------------------------------------------------------------
# Acceptance criteria reporting: one pass/fail line per criterion at the end.
# ---------------------------------------------------------------------------

_ACCEPTANCE_RESULTS: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    if report.when == "call":
        if report.skipped:
            _ACCEPTANCE_RESULTS[report.nodeid] = "SKIP"
        else:
            _ACCEPTANCE_RESULTS[report.nodeid] = "PASS" if report.passed else "FAIL"
    elif report.when == "setup" and report.skipped:
        _ACCEPTANCE_RESULTS[report.nodeid] = "SKIP"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_ACCEPTANCE_RESULTS):
        name = nodeid.split("::")[-1]
        terminalreporter.write_line(f"{_ACCEPTANCE_RESULTS[nodeid]:4s}  {name}")
