"""Forward-dictionary ingestion: parse TSV dictionaries, pool and normalize
definitions, assign alphabetical word-ids, and emit the forward- and
back-linked lists the connectivity matrices are built from.

Multiple input dictionaries are fused by pooling all definition text per
headword before processing, so a token appearing in two dictionaries counts
twice toward its frequency. Definition tokens that match no headword are
appended to the lexicon (flagged ``added_for_consistency``) with empty
definitions of their own.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import BinaryIO, Sequence

import numpy as np

from .textproc import LemmaRules, StopwordList, extract_content_lemmas, lemmatize

__all__ = [
    "RawDictionary",
    "Lexicon",
    "ForwardLinkedList",
    "BackLinkedList",
    "DictionaryFormatError",
    "IngestError",
    "load_dictionary",
    "build_forward_list",
    "build_back_list",
    "register_mwe",
]


class DictionaryFormatError(ValueError):
    """Malformed dictionary input (bad line, empty file, undecodable bytes)."""


class IngestError(ValueError):
    """Ingestion produced no usable lexicon."""


@dataclass(frozen=True)
class RawDictionary:
    """Parsed forward dictionary: (headword, definition) pairs in file order.

    Headwords may repeat; each repetition is a separate sense that gets
    pooled during the build.
    """

    name: str
    entries: tuple[tuple[str, str], ...]

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(eq=False)
class Lexicon:
    """Word/id table with per-word flags and definition frequencies.

    Ids are 1-based and dense, assigned in strict alphabetical order of the
    lemma. Position ``k`` in every per-word array corresponds to id ``k+1``.
    ``nu`` counts how often each word occurs across all processed pooled
    definitions, multiplicity included.
    """

    words: tuple[str, ...]
    id_of: dict[str, int]
    is_mwe: np.ndarray
    added_for_consistency: np.ndarray
    nu: np.ndarray

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.id_of

    def lookup(self, word: str) -> int | None:
        return self.id_of.get(word)

    def word_of(self, word_id: int) -> str:
        return self.words[word_id - 1]

    def nu_of(self, word_id: int) -> int:
        return int(self.nu[word_id - 1])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Lexicon):
            return NotImplemented
        return (
            self.words == other.words
            and np.array_equal(self.is_mwe, other.is_mwe)
            and np.array_equal(self.added_for_consistency, other.added_for_consistency)
            and np.array_equal(self.nu, other.nu)
        )


@dataclass(eq=False)
class ForwardLinkedList:
    """Per-word processed definition tokens as word-ids, multiplicity kept."""

    rows: tuple[tuple[int, ...], ...]

    def defs(self, word_id: int) -> tuple[int, ...]:
        return self.rows[word_id - 1]

    def __len__(self) -> int:
        return len(self.rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ForwardLinkedList):
            return NotImplemented
        return self.rows == other.rows


@dataclass(eq=False)
class BackLinkedList:
    """Per-word ids of the words whose definitions contain it (deduplicated)."""

    rows: tuple[tuple[int, ...], ...]

    def refs(self, word_id: int) -> tuple[int, ...]:
        return self.rows[word_id - 1]

    def __len__(self) -> int:
        return len(self.rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BackLinkedList):
            return NotImplemented
        return self.rows == other.rows


def load_dictionary(source: BinaryIO | bytes, fmt: str = "tsv", name: str = "<stream>") -> RawDictionary:
    """Parse a forward dictionary from a byte stream.

    Format ``tsv``: one entry per line, ``headword<TAB>definition``; blank
    lines and lines starting with '#' are skipped. Raises
    DictionaryFormatError with a line number on malformed lines, and for
    files with no entries at all.
    """
    if fmt != "tsv":
        raise DictionaryFormatError(f"unsupported dictionary format: {fmt!r}")
    data = source if isinstance(source, bytes) else source.read()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DictionaryFormatError(f"{name}: not valid UTF-8: {exc}") from None
    entries: list[tuple[str, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" not in line:
            raise DictionaryFormatError(f"{name}:{lineno}: expected 'headword<TAB>definition'")
        headword, definition = line.split("\t", 1)
        headword = headword.strip()
        definition = definition.strip()
        if not headword:
            raise DictionaryFormatError(f"{name}:{lineno}: empty headword")
        if not definition:
            raise DictionaryFormatError(f"{name}:{lineno}: empty definition")
        entries.append((headword, definition))
    if not entries:
        raise DictionaryFormatError(f"{name}: no dictionary entries found")
    return RawDictionary(name=name, entries=tuple(entries))


def _normalize_headword(headword: str) -> str:
    # Underscores are a common multi-word separator (WordNet style).
    return " ".join(headword.lower().replace("_", " ").split())


def build_forward_list(
    dicts: Sequence[RawDictionary],
    stop: StopwordList,
    rules: LemmaRules,
) -> tuple[Lexicon, ForwardLinkedList]:
    """Build the lexicon and forward-linked list from one or more dictionaries.

    Headwords are lemmatized (validated against the raw headword set);
    functional-word headwords are deleted together with their definitions.
    All senses of a headword, across all dictionaries, are pooled into one
    cell and processed once. Multi-word headwords become output-only nodes:
    they keep their processed definitions but can never match a definition
    token, so they acquire no back-links.

    Definition tokens are validated against the growing lexicon; tokens that
    match no headword are appended with the ``added_for_consistency`` flag
    and empty definitions. Ids are assigned alphabetically at the end.
    """
    if not dicts or all(len(d) == 0 for d in dicts):
        raise IngestError("need at least one dictionary with at least one entry")

    # Pass 1: raw single-word headword set; lemma candidates validate against it.
    raw_heads: set[str] = set()
    for d in dicts:
        for headword, _ in d.entries:
            norm = _normalize_headword(headword)
            if " " in norm or norm in stop:
                continue
            raw_heads.add(norm)

    # Pass 2: pool definition text per final headword key.
    pooled: dict[str, list[str]] = {}
    mwe_keys: set[str] = set()
    for d in dicts:
        for headword, definition in d.entries:
            norm = _normalize_headword(headword)
            if " " in norm:
                key = norm
                mwe_keys.add(key)
            else:
                if norm in stop:
                    continue
                key = lemmatize(norm, rules, raw_heads.__contains__)
                if key in stop:
                    continue
            pooled.setdefault(key, []).append(definition)
    if not pooled:
        raise IngestError("empty lexicon after processing (all rows were functional words)")

    # Pass 3: process pooled definitions against the growing lexicon.
    known: set[str] = {key for key in pooled if key not in mwe_keys}
    added: set[str] = set()

    def member(word: str) -> bool:
        return word in known or word in added

    lemmas_of: dict[str, list[str]] = {}
    for key in sorted(pooled):
        lemmas = extract_content_lemmas(" ".join(pooled[key]), stop, rules, member)
        lemmas_of[key] = lemmas
        for lemma in lemmas:
            if not member(lemma):
                added.add(lemma)

    return _finalize(lemmas_of, mwe_keys, added)


def _finalize(
    lemmas_of: dict[str, list[str]],
    mwe_keys: set[str],
    added: set[str],
) -> tuple[Lexicon, ForwardLinkedList]:
    words = tuple(sorted(set(lemmas_of) | added))
    id_of = {word: idx + 1 for idx, word in enumerate(words)}
    n = len(words)

    rows = tuple(
        tuple(id_of[lemma] for lemma in lemmas_of.get(word, ()))
        for word in words
    )
    flat = [wid for row in rows for wid in row]
    nu = np.bincount(np.asarray(flat, dtype=np.int64) - 1, minlength=n) if flat else np.zeros(n, dtype=np.int64)

    lexicon = Lexicon(
        words=words,
        id_of=id_of,
        is_mwe=np.fromiter((w in mwe_keys for w in words), dtype=bool, count=n),
        added_for_consistency=np.fromiter((w in added for w in words), dtype=bool, count=n),
        nu=nu.astype(np.int64),
    )
    return lexicon, ForwardLinkedList(rows=rows)


def build_back_list(fwd: ForwardLinkedList) -> BackLinkedList:
    """Invert the forward-linked list: point each word at the words whose
    definitions contain it. Rows come out sorted and deduplicated."""
    n = len(fwd)
    refs: list[set[int]] = [set() for _ in range(n)]
    for i in range(1, n + 1):
        for j in fwd.defs(i):
            refs[j - 1].add(i)
    return BackLinkedList(rows=tuple(tuple(sorted(s)) for s in refs))


def register_mwe(
    lexicon: Lexicon,
    fwd: ForwardLinkedList,
    expression: str,
    definition: str,
    stop: StopwordList,
    rules: LemmaRules,
) -> tuple[Lexicon, ForwardLinkedList]:
    """Add a multi-word expression as an output-only node.

    The expression must contain whitespace (or underscores); it is stored as
    a single node whose processed definition populates the forward list, and
    since definition tokens never contain spaces it can never be referenced
    back. Registering an existing expression pools the definitions. Ids are
    reassigned alphabetically in the returned structures.
    """
    norm = _normalize_headword(expression)
    if " " not in norm:
        raise ValueError(
            f"{expression!r} is not a multi-word expression; use the normal ingestion path"
        )

    lemmas_of: dict[str, list[str]] = {
        word: [lexicon.words[wid - 1] for wid in fwd.defs(lexicon.id_of[word])]
        for word in lexicon.words
    }
    mwe_keys = {w for w, flag in zip(lexicon.words, lexicon.is_mwe) if flag}
    added = {w for w, flag in zip(lexicon.words, lexicon.added_for_consistency) if flag}
    known = {w for w in lexicon.words if w not in mwe_keys and w not in added}

    def member(word: str) -> bool:
        return word in known or word in added

    new_lemmas = extract_content_lemmas(definition, stop, rules, member)
    for lemma in new_lemmas:
        if not member(lemma):
            added.add(lemma)
            lemmas_of.setdefault(lemma, [])
    mwe_keys.add(norm)
    lemmas_of.setdefault(norm, []).extend(new_lemmas)

    return _finalize(lemmas_of, mwe_keys, added)
