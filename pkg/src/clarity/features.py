"""Clarity features: question style, similar-question statistics, keyphrase scores,
and the TF-IDF n-gram bag-of-words representation for the baseline classifier."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy import sparse

from .corpus import UNCLEAR, Question, count_sentences
from .retrieval import ScoredHit

FEATURE_K_VALUES = (10, 20, 50)
CQ_TOP_K = 10  # clarification sets come from the top-10 unclear hits

FEATURE_NAMES: tuple[str, ...] = (
    "len",
    "contains_pre",
    "contains_quote",
    "contains_quest",
    "readability",
    "sim_sum",
    "sim_max",
    "sim_avg",
    *(name
      for k in FEATURE_K_VALUES
      for name in (f"len_sim_k{k}", f"len_unclear_k{k}", f"len_clear_k{k}",
                   f"majority_k{k}", f"ratio_k{k}", f"fraction_k{k}")),
    "cq_global",
    "cq_individual",
    "cq_weighted",
)

# doc id -> keyphrase-token multisets, one per clarification question
KeyphraseLookup = Callable[[int], list[Counter]]


def readability_cli(text: str) -> float:
    """Coleman-Liau index: 0.0588*L - 0.296*S - 15.8.

    L = letters (alphanumeric characters) per 100 words, S = sentences per 100
    words; words split on whitespace, sentences counted by the terminator rule.
    """
    words = text.split()
    if not words:
        raise ValueError("readability of an empty text is undefined")
    letters = sum(1 for ch in text if ch.isalnum())
    sentences = count_sentences(text)
    per_100 = 100.0 / len(words)
    return 0.0588 * (letters * per_100) - 0.296 * (sentences * per_100) - 15.8


def question_features(question: Question) -> dict[str, float]:
    """Group (i): properties of the question itself."""
    return {
        "len": float(len(question.tokens)),
        "contains_pre": float(question.contains_pre),
        "contains_quote": float(question.contains_quote),
        "contains_quest": 1.0 if "?" in question.tokens else 0.0,
        "readability": readability_cli(question.raw_text) if question.raw_text.split() else 0.0,
    }


def similarity_features(hits: list[ScoredHit]) -> dict[str, float]:
    """Group (ii): retrieval-score statistics and label distributions at each k."""
    scores = [hit.score for hit in hits]
    values = {
        "sim_sum": sum(scores) if scores else 0.0,
        "sim_max": max(scores) if scores else 0.0,
        "sim_avg": sum(scores) / len(scores) if scores else 0.0,
    }
    for k in FEATURE_K_VALUES:
        prefix = hits[:k]
        n = len(prefix)
        unclear = sum(1 for hit in prefix if hit.label == UNCLEAR)
        clear = n - unclear
        values[f"len_sim_k{k}"] = float(n)
        values[f"len_unclear_k{k}"] = float(unclear)
        values[f"len_clear_k{k}"] = float(clear)
        values[f"majority_k{k}"] = 1.0 if n and unclear >= clear else 0.0
        # zero unclear count: denominator clamped to 1 keeps the ratio finite
        values[f"ratio_k{k}"] = clear / max(unclear, 1)
        values[f"fraction_k{k}"] = clear / n if n else 0.0
    return values


def _cosine(a: Counter, b: Counter) -> float:
    dot = sum(count * b[token] for token, count in a.items())
    if dot == 0:
        return 0.0
    norm_a = math.sqrt(sum(c * c for c in a.values()))
    norm_b = math.sqrt(sum(c * c for c in b.values()))
    return dot / (norm_a * norm_b)


def clarification_entries(hits: list[ScoredHit],
                          keyphrases_of: KeyphraseLookup) -> list[tuple[ScoredHit, Counter]]:
    """One entry per clarification question of the top-10 unclear hits."""
    unclear_hits = [hit for hit in hits if hit.label == UNCLEAR][:CQ_TOP_K]
    return [(hit, counts) for hit in unclear_hits for counts in keyphrases_of(hit.doc_id)]


def clarity_scores(question: Question, hits: list[ScoredHit],
                   keyphrases_of: KeyphraseLookup) -> tuple[float, float, float]:
    """Keyphrase-overlap scores (global, individual, retrieval-weighted).

    The question vector counts each clarification keyphrase token's occurrences
    in the question's tokens; cosines of zero vectors are 0.
    """
    entries = clarification_entries(hits, keyphrases_of)
    if not entries:
        return 0.0, 0.0, 0.0
    keyphrase_vocab = set()
    for _, counts in entries:
        keyphrase_vocab.update(counts)
    token_counts = Counter(question.tokens)
    q_vector = Counter({tok: token_counts[tok] for tok in keyphrase_vocab
                        if token_counts[tok] > 0})
    if not q_vector:
        return 0.0, 0.0, 0.0

    global_vector: Counter = Counter()
    individual = 0.0
    weighted = 0.0
    for hit, counts in entries:
        global_vector.update(counts)
        cos = _cosine(q_vector, counts)
        individual += cos
        weighted += cos * hit.score
    return _cosine(q_vector, global_vector), individual, weighted


def compute_features(question: Question, hits: list[ScoredHit],
                     keyphrases_of: KeyphraseLookup) -> np.ndarray:
    """Full feature vector in FEATURE_NAMES order."""
    values = question_features(question)
    values.update(similarity_features(hits))
    cq_global, cq_individual, cq_weighted = clarity_scores(question, hits, keyphrases_of)
    values["cq_global"] = cq_global
    values["cq_individual"] = cq_individual
    values["cq_weighted"] = cq_weighted
    return np.array([values[name] for name in FEATURE_NAMES], dtype=np.float64)


def export_features_csv(path, ids: list[int], matrix: np.ndarray,
                        labels: list[int]) -> None:
    """Feature matrix dump: header of feature names, label in the last column."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(("id", *FEATURE_NAMES, "label")) + "\n")
        for qid, row, label in zip(ids, matrix, labels):
            fields = [str(qid), *(repr(float(v)) for v in row), str(int(label))]
            fh.write(",".join(fields) + "\n")


# ---------------------------------------------------------------------------
# Bag-of-words TF-IDF n-grams


@dataclass
class NgramVocabulary:
    """N-gram vocabulary built on the training split with a minimum df."""

    ngram_ids: dict[str, int]
    doc_freq: dict[str, int]
    doc_count: int
    n_max: int
    min_df: int = 3

    def __len__(self) -> int:
        return len(self.ngram_ids)

    def to_dict(self) -> dict:
        ordered = sorted(self.ngram_ids, key=self.ngram_ids.get)
        return {
            "ngrams": ordered,
            "doc_freq": [self.doc_freq[g] for g in ordered],
            "doc_count": self.doc_count,
            "n_max": self.n_max,
            "min_df": self.min_df,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NgramVocabulary":
        ngram_ids = {g: i for i, g in enumerate(data["ngrams"])}
        doc_freq = dict(zip(data["ngrams"], data["doc_freq"]))
        return cls(ngram_ids=ngram_ids, doc_freq=doc_freq,
                   doc_count=data["doc_count"], n_max=data["n_max"],
                   min_df=data["min_df"])


def iter_ngrams(tokens: list[str], n_max: int) -> Iterable[str]:
    for n in range(1, n_max + 1):
        for i in range(len(tokens) - n + 1):
            yield " ".join(tokens[i:i + n])


def build_ngram_vocabulary(questions: list[Question], n_max: int,
                           min_df: int = 3) -> NgramVocabulary:
    if not questions:
        raise ValueError("cannot build an n-gram vocabulary from an empty set")
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    doc_freq: Counter[str] = Counter()
    for question in questions:
        doc_freq.update(set(iter_ngrams(question.tokens, n_max)))
    retained = sorted(g for g, df in doc_freq.items() if df >= min_df)
    return NgramVocabulary(
        ngram_ids={g: i for i, g in enumerate(retained)},
        doc_freq={g: doc_freq[g] for g in retained},
        doc_count=len(questions),
        n_max=n_max,
        min_df=min_df,
    )


def bow_vector(tokens: list[str], vocab: NgramVocabulary) -> dict[int, float]:
    """tf * (ln((1+N)/(1+df)) + 1), scaled to unit Euclidean norm.

    Out-of-vocabulary n-grams are ignored; a question with no in-vocabulary
    n-grams yields the zero vector.
    """
    counts: Counter[str] = Counter(iter_ngrams(tokens, vocab.n_max))
    weights: dict[int, float] = {}
    for gram, tf in counts.items():
        gram_id = vocab.ngram_ids.get(gram)
        if gram_id is None:
            continue
        df = vocab.doc_freq[gram]
        weights[gram_id] = tf * (math.log((1.0 + vocab.doc_count) / (1.0 + df)) + 1.0)
    norm = math.sqrt(sum(w * w for w in weights.values()))
    if norm > 0:
        weights = {i: w / norm for i, w in weights.items()}
    return weights


def bow_matrix(questions: list[Question], vocab: NgramVocabulary) -> sparse.csr_matrix:
    data: list[float] = []
    indices: list[int] = []
    indptr = [0]
    for question in questions:
        weights = bow_vector(question.tokens, vocab)
        for gram_id in sorted(weights):
            indices.append(gram_id)
            data.append(weights[gram_id])
        indptr.append(len(indices))
    return sparse.csr_matrix((data, indices, indptr),
                             shape=(len(questions), len(vocab)))
