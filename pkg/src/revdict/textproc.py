"""Text normalization: tokenize raw text, strip functional words, reduce to lemmas.

The whole pipeline is deliberately self-contained: the lemmatizer is a
suffix-detachment table (morphy style) validated against a caller-supplied
lexicon-membership predicate, so builds are reproducible without external
NLP runtimes. Stopwords, suffix rules, and irregular-form exceptions are
plain data files; defaults for English ship with the package.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

__all__ = [
    "StopwordList",
    "LemmaRules",
    "tokenize",
    "lemmatize",
    "extract_content_lemmas",
    "load_stopwords",
    "load_lemma_exceptions",
    "load_lemma_rules",
    "default_stopwords",
    "default_rules",
    "default_stopwords_path",
    "default_exceptions_path",
]

# Tokens are runs of ASCII letters/digits, optionally chained with inner
# apostrophes or hyphens ("don't", "mother-in-law"). Anything else is a
# separator. Leading/trailing '/- are never part of a token.
_TOKEN_RE = re.compile(r"[a-z0-9]+(?:['-][a-z0-9]+)*")

_DIGIT_RE = re.compile(r"[0-9]")

# Suffix-detachment rules tried in order: noun endings first, then verb,
# then adjective. A candidate is accepted only if the lexicon-membership
# predicate admits it; otherwise the next rule is tried.
DEFAULT_SUFFIX_RULES: tuple[tuple[str, str, str], ...] = (
    ("noun", "ses", "s"),
    ("noun", "ies", "y"),
    ("noun", "es", ""),
    ("noun", "s", ""),
    ("verb", "ies", "y"),
    ("verb", "ing", ""),
    ("verb", "ing", "e"),
    ("verb", "ed", ""),
    ("verb", "ed", "e"),
    ("verb", "es", ""),
    ("verb", "s", ""),
    ("adj", "er", ""),
    ("adj", "est", ""),
)


class StopwordFileError(ValueError):
    """Raised when a stopword file is unreadable or yields no words."""


@dataclass(frozen=True)
class StopwordList:
    """Set of functional words; membership is exact match after lowercasing."""

    words: frozenset[str]

    def __contains__(self, token: str) -> bool:
        return token.lower() in self.words

    def __len__(self) -> int:
        return len(self.words)

    @classmethod
    def empty(cls) -> "StopwordList":
        return cls(frozenset())


@dataclass(frozen=True)
class LemmaRules:
    """Ordered suffix-detachment rules plus an irregular-form exception map.

    Exceptions take priority over rules and are applied unconditionally.
    """

    suffix_rules: tuple[tuple[str, str, str], ...] = DEFAULT_SUFFIX_RULES
    exceptions: dict[str, str] = field(default_factory=dict)


def tokenize(text: str) -> list[str]:
    """Split text into lowercase tokens, discarding punctuation.

    A token is a maximal run of letters/digits possibly joined by single
    inner apostrophes or hyphens. Order is preserved; empty input gives
    an empty list.
    """
    if not text:
        return []
    return _TOKEN_RE.findall(text.replace("’", "'").lower())


def lemmatize(token: str, rules: LemmaRules, in_lexicon: Callable[[str], bool]) -> str:
    """Reduce a lowercase token to its base form.

    The exception map wins outright. Otherwise suffix rules are tried in
    order and the first candidate accepted by ``in_lexicon`` is returned;
    if nothing matches the token comes back unchanged. Never returns an
    empty string.
    """
    exc = rules.exceptions.get(token)
    if exc is not None:
        return exc
    for _pos, suffix, replacement in rules.suffix_rules:
        if len(token) > len(suffix) and token.endswith(suffix):
            candidate = token[: len(token) - len(suffix)] + replacement
            if candidate and candidate != token and in_lexicon(candidate):
                return candidate
    return token


def extract_content_lemmas(
    text: str,
    stop: StopwordList,
    rules: LemmaRules,
    in_lexicon: Callable[[str], bool],
) -> list[str]:
    """Tokenize, drop functional words, and lemmatize the survivors.

    Duplicates and order are preserved (frequency counting downstream
    needs multiplicity). Tokens containing digits are dropped. Hyphenated
    tokens are kept whole when the lexicon knows them, otherwise split at
    hyphens with each part processed on its own. No stopword ever appears
    in the output, even when lemmatization lands on one.
    """
    out: list[str] = []
    for token in tokenize(text):
        if _DIGIT_RE.search(token):
            continue
        if token in stop:
            continue
        if "-" in token:
            whole = lemmatize(token, rules, in_lexicon)
            if in_lexicon(whole):
                if whole not in stop:
                    out.append(whole)
                continue
            for part in token.split("-"):
                if not part or part in stop:
                    continue
                lemma = lemmatize(part, rules, in_lexicon)
                if lemma not in stop:
                    out.append(lemma)
            continue
        lemma = lemmatize(token, rules, in_lexicon)
        if lemma not in stop:
            out.append(lemma)
    return out


def load_stopwords(path: str | Path) -> StopwordList:
    """Load a stopword file: one word per line, '#' comments allowed."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.split("#", 1)[0].strip().lower()
            if word:
                words.add(word)
    if not words:
        raise StopwordFileError(f"stopword file {path} contains no words")
    return StopwordList(frozenset(words))


def load_lemma_exceptions(path: str | Path) -> dict[str, str]:
    """Load an exception file: TSV lines ``inflected<TAB>lemma``."""
    exceptions: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise ValueError(f"{path}:{lineno}: expected 'inflected<TAB>lemma'")
            exceptions[parts[0].lower()] = parts[1].lower()
    return exceptions


def load_lemma_rules(
    path: str | Path | None = None,
    exceptions_path: str | Path | None = None,
) -> LemmaRules:
    """Build LemmaRules from optional rule/exception files.

    The rule file is TSV ``pos<TAB>suffix<TAB>replacement`` (replacement may
    be empty); omitted, the built-in English table is used.
    """
    rules = DEFAULT_SUFFIX_RULES
    if path is not None:
        loaded: list[tuple[str, str, str]] = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                stripped = line.rstrip("\n")
                if not stripped.strip() or stripped.lstrip().startswith("#"):
                    continue
                parts = stripped.split("\t")
                if len(parts) != 3 or not parts[0] or not parts[1]:
                    raise ValueError(f"{path}:{lineno}: expected 'pos<TAB>suffix<TAB>replacement'")
                loaded.append((parts[0].lower(), parts[1].lower(), parts[2].lower()))
        if not loaded:
            raise ValueError(f"rule file {path} contains no rules")
        rules = tuple(loaded)
    exceptions = load_lemma_exceptions(exceptions_path) if exceptions_path else {}
    return LemmaRules(suffix_rules=rules, exceptions=exceptions)


def _data_path(name: str) -> Path:
    return Path(str(resources.files("revdict").joinpath("data", name)))


def default_stopwords_path() -> Path:
    return _data_path("stopwords_en.txt")


def default_exceptions_path() -> Path:
    return _data_path("lemma_exceptions_en.tsv")


def default_stopwords() -> StopwordList:
    """English functional-word list shipped with the package."""
    return load_stopwords(default_stopwords_path())


def default_rules() -> LemmaRules:
    """Built-in suffix table plus the shipped irregular-form exceptions."""
    return LemmaRules(
        suffix_rules=DEFAULT_SUFFIX_RULES,
        exceptions=load_lemma_exceptions(default_exceptions_path()),
    )
