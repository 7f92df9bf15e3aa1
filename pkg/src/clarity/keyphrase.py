"""RAKE keyphrase extraction over clarification questions."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources

from .corpus import tokenize

_ALNUM_RE = re.compile(r"[a-z0-9]")


@dataclass(frozen=True)
class Keyphrase:
    tokens: tuple[str, ...]
    score: float

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


def load_stopwords(path=None) -> frozenset[str]:
    """One lowercase word per line; defaults to the packaged list."""
    if path is None:
        raw = resources.files("clarity.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    words = frozenset(line.strip() for line in raw.splitlines() if line.strip())
    if not words:
        raise ValueError("stopword list is empty")
    return words


def is_word_token(token: str) -> bool:
    """Tokens without any alphanumeric character are treated as punctuation."""
    return bool(_ALNUM_RE.search(token))


def _candidates(tokens: list[str], stopwords: frozenset[str]) -> list[tuple[str, ...]]:
    """Maximal runs of non-stopword word tokens; stopwords/punctuation delimit."""
    runs: list[tuple[str, ...]] = []
    current: list[str] = []
    for token in tokens:
        if token in stopwords or not is_word_token(token):
            if current:
                runs.append(tuple(current))
                current = []
        else:
            current.append(token)
    if current:
        runs.append(tuple(current))
    return runs


def extract_keyphrases(text: str, stopwords: frozenset[str]) -> list[Keyphrase]:
    """RAKE: score words by degree/frequency over candidate runs, rank phrases.

    Returns the top ceil(T/3) distinct phrases (T = number of candidate runs),
    highest score first, ties by first occurrence.
    """
    runs = _candidates(tokenize(text), stopwords)
    if not runs:
        return []
    freq: Counter[str] = Counter()
    degree: Counter[str] = Counter()
    for run in runs:
        freq.update(run)
        for word in set(run):
            degree[word] += len(run)

    first_seen: dict[tuple[str, ...], int] = {}
    for i, run in enumerate(runs):
        first_seen.setdefault(run, i)
    scored = [
        (run, sum(degree[w] / freq[w] for w in run))
        for run in first_seen
    ]
    scored.sort(key=lambda item: (-item[1], first_seen[item[0]]))
    keep = math.ceil(len(runs) / 3)
    return [Keyphrase(tokens=run, score=score) for run, score in scored[:keep]]


def keyphrase_tokens(keyphrases: list[Keyphrase]) -> Counter[str]:
    """Multiset union of the tokens of all keyphrases."""
    counts: Counter[str] = Counter()
    for phrase in keyphrases:
        counts.update(phrase.tokens)
    return counts
