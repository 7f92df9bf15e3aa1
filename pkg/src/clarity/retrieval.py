"""Inverted index over training questions and BM25 retrieval."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .corpus import Question
from .keyphrase import is_word_token

K1 = 1.2
B = 0.75

INDEX_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ScoredHit:
    doc_id: int
    score: float
    label: int


class InvertedIndex:
    """Immutable BM25 index; only training-split documents are indexed."""

    def __init__(self, term_ids: dict[str, int], postings: list[tuple[np.ndarray, np.ndarray]],
                 doc_ids: np.ndarray, doc_lengths: np.ndarray, doc_labels: np.ndarray):
        self.term_ids = term_ids
        self.postings = postings  # term id -> (doc positions, term frequencies)
        self.doc_ids = doc_ids
        self.doc_lengths = doc_lengths
        self.doc_labels = doc_labels
        self.doc_count = int(len(doc_ids))
        self.avg_doc_length = float(sum(int(x) for x in doc_lengths) / self.doc_count)
        # k1 * (1 - b + b * len / avgdl), precomputed per document
        self._norm = K1 * (1.0 - B + B * self.doc_lengths.astype(np.float64)
                           / self.avg_doc_length)
        self._id_to_pos = {int(doc_id): pos for pos, doc_id in enumerate(doc_ids)}

    def __contains__(self, doc_id: int) -> bool:
        return doc_id in self._id_to_pos


def build_index(questions: list[Question]) -> InvertedIndex:
    """Index every question over its full token field."""
    if not questions:
        raise ValueError("cannot index an empty training set")
    docs = sorted(questions, key=lambda q: q.id)
    terms = sorted({tok for q in docs for tok in q.tokens})
    term_ids = {term: i for i, term in enumerate(terms)}

    raw_postings: list[list[tuple[int, int]]] = [[] for _ in terms]
    for pos, question in enumerate(docs):
        for token, tf in sorted(Counter(question.tokens).items()):
            raw_postings[term_ids[token]].append((pos, tf))

    postings = [
        (np.array([p for p, _ in plist], dtype=np.int64),
         np.array([tf for _, tf in plist], dtype=np.float64))
        for plist in raw_postings
    ]
    return InvertedIndex(
        term_ids=term_ids,
        postings=postings,
        doc_ids=np.array([q.id for q in docs], dtype=np.int64),
        doc_lengths=np.array([len(q.tokens) for q in docs], dtype=np.int64),
        doc_labels=np.array([q.label for q in docs], dtype=np.int64),
    )


def make_query(question: Question, stopwords: frozenset[str]) -> list[str]:
    """Query = title tokens then tag tokens, stopwords and punctuation removed."""
    return [tok for tok in question.title_tokens + question.tag_tokens
            if tok not in stopwords and is_word_token(tok)]


def idf(doc_count: int, doc_freq: int) -> float:
    return math.log(1.0 + (doc_count - doc_freq + 0.5) / (doc_freq + 0.5))


def search(index: InvertedIndex, query_tokens: list[str], k: int,
           exclude_id: int | None = None) -> list[ScoredHit]:
    """Top-k BM25 hits, descending score, ties by ascending doc id.

    Repeated query terms contribute once per occurrence; zero-score documents
    are never returned; exclude_id is the self-match guard.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    scores = np.zeros(index.doc_count, dtype=np.float64)
    touched = np.zeros(index.doc_count, dtype=bool)
    for token in query_tokens:
        term_id = index.term_ids.get(token)
        if term_id is None:
            continue
        positions, tf = index.postings[term_id]
        term_idf = idf(index.doc_count, len(positions))
        scores[positions] += term_idf * tf * (K1 + 1.0) / (tf + index._norm[positions])
        touched[positions] = True

    hits = [
        ScoredHit(doc_id=int(index.doc_ids[pos]), score=float(scores[pos]),
                  label=int(index.doc_labels[pos]))
        for pos in np.nonzero(touched)[0]
        if scores[pos] > 0.0 and int(index.doc_ids[pos]) != exclude_id
    ]
    hits.sort(key=lambda h: (-h.score, h.doc_id))
    return hits[:k]


# ---------------------------------------------------------------------------
# Persistence (round-trip stable: save -> load -> save is byte-identical)


def save_index(index: InvertedIndex, path) -> None:
    terms = sorted(index.term_ids, key=index.term_ids.get)
    payload = {
        "format_version": INDEX_FORMAT_VERSION,
        "k1": K1,
        "b": B,
        "terms": terms,
        "postings": [
            [[int(p), int(tf)] for p, tf in zip(positions, tfs)]
            for positions, tfs in index.postings
        ],
        "doc_ids": [int(x) for x in index.doc_ids],
        "doc_lengths": [int(x) for x in index.doc_lengths],
        "doc_labels": [int(x) for x in index.doc_labels],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def load_index(path) -> InvertedIndex:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    version = payload.get("format_version")
    if version != INDEX_FORMAT_VERSION:
        raise ValueError(f"unsupported index format version: {version!r}")
    term_ids = {term: i for i, term in enumerate(payload["terms"])}
    postings = [
        (np.array([p for p, _ in plist], dtype=np.int64),
         np.array([tf for _, tf in plist], dtype=np.float64))
        for plist in payload["postings"]
    ]
    return InvertedIndex(
        term_ids=term_ids,
        postings=postings,
        doc_ids=np.array(payload["doc_ids"], dtype=np.int64),
        doc_lengths=np.array(payload["doc_lengths"], dtype=np.int64),
        doc_labels=np.array(payload["doc_labels"], dtype=np.int64),
    )
