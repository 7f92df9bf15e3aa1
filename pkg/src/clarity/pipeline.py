"""CLI orchestration: ingest -> split -> index -> features -> train -> evaluate,
plus single-question classification and the HTTP service runner.

Artifacts are immutable; every command writes a fresh versioned directory under
the configured output root and embeds the configuration hash it was built from.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from collections import Counter
from dataclasses import dataclass, asdict, fields
from pathlib import Path

import numpy as np

from . import corpus as corpus_mod
from . import evaluation
from .corpus import UNCLEAR, CorpusSplit, Question
from .features import (FEATURE_NAMES, NgramVocabulary, bow_matrix,
                       build_ngram_vocabulary, compute_features,
                       export_features_csv)
from .keyphrase import extract_keyphrases, keyphrase_tokens, load_stopwords
from .models import (LogRegModel, Standardizer, ThresholdModel, lr_predict_proba,
                     lr_train, majority_baseline, random_labels, simq_majority,
                     standardize_apply, standardize_fit, threshold_fit)
from .retrieval import InvertedIndex, build_index, load_index, make_query, save_index, search

ARTIFACT_FORMAT_VERSION = 1

THRESHOLD_FEATURES = {
    "threshold-cqglobal": "cq_global",
    "threshold-cqindividual": "cq_individual",
    "threshold-cqweighted": "cq_weighted",
}

MODEL_NAMES = ("random", "majority", "simq-majority",
               "threshold-cqglobal", "threshold-cqindividual",
               "threshold-cqweighted", "simq-ml", "bow-lr-n1", "bow-lr-n3")


class PipelineError(Exception):
    """Internal pipeline failure (exit code 1)."""


class InputError(PipelineError):
    """Usage or input problem (exit code 2)."""


class LeakageError(PipelineError):
    """Train/test contamination detected (hard failure)."""


@dataclass
class PipelineConfig:
    posts_xml: str = ""
    comments_xml: str = ""
    history_xml: str = ""
    out_dir: str = "out"
    name: str = "community"
    seed: int = 13
    retrieval_depth: int = 50
    c_reg: float = 1.0
    ngram_n: int = 3
    min_df: int = 3
    stopword_path: str | None = None
    r_rounds: int = 10000
    host: str = "127.0.0.1"
    port: int = 8123
    ui_origin: str = "*"

    # fields that shape artifact content (serving/reporting knobs excluded)
    _HASH_FIELDS = ("posts_xml", "comments_xml", "history_xml", "name", "seed",
                    "retrieval_depth", "c_reg", "ngram_n", "min_df", "stopword_path")

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except FileNotFoundError as exc:
            raise InputError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"config file is not valid JSON: {path}: {exc}") from exc
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)

    def config_hash(self) -> str:
        payload = {name: getattr(self, name) for name in self._HASH_FIELDS}
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

    def meta(self) -> dict:
        # out_dir is where the artifact lives; echoing it would tie the bytes
        # to the run location and break relocatability
        echo = {k: v for k, v in self.to_dict().items() if k != "out_dir"}
        return {
            "format_version": ARTIFACT_FORMAT_VERSION,
            "config": echo,
            "config_hash": self.config_hash(),
            "seed": self.seed,
        }


# ---------------------------------------------------------------------------
# Artifact store helpers


def write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2, ensure_ascii=False)
        fh.write("\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def next_version_dir(root: Path) -> Path:
    root.mkdir(parents=True, exist_ok=True)
    existing = [int(p.name[1:]) for p in root.iterdir()
                if p.is_dir() and p.name.startswith("v") and p.name[1:].isdigit()]
    version = max(existing, default=0) + 1
    path = root / f"v{version:03d}"
    path.mkdir()
    return path


def latest_version_dir(root: Path) -> Path | None:
    if not root.is_dir():
        return None
    candidates = [p for p in root.iterdir()
                  if p.is_dir() and p.name.startswith("v") and p.name[1:].isdigit()]
    return max(candidates, key=lambda p: int(p.name[1:]), default=None)


def write_questions_jsonl(path, questions: list[Question]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for question in sorted(questions, key=lambda q: q.id):
            fh.write(json.dumps(question.to_dict(), sort_keys=True,
                                separators=(",", ":"), ensure_ascii=False) + "\n")


def read_questions_jsonl(path) -> list[Question]:
    questions = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                questions.append(Question.from_dict(json.loads(line)))
    return questions


@dataclass
class CorpusBundle:
    questions: list[Question]
    by_id: dict[int, Question]
    split: CorpusSplit
    meta: dict

    def subset(self, ids: list[int]) -> list[Question]:
        return [self.by_id[i] for i in ids]


def load_corpus(config: PipelineConfig) -> CorpusBundle:
    corpus_dir = latest_version_dir(Path(config.out_dir) / "corpus")
    if corpus_dir is None:
        raise InputError(f"no corpus artifacts under {config.out_dir}; run ingest first")
    questions = read_questions_jsonl(corpus_dir / "questions.jsonl")
    split = CorpusSplit.from_dict(read_json(corpus_dir / "splits.json"))
    meta = read_json(corpus_dir / "meta.json")
    return CorpusBundle(questions=questions,
                        by_id={q.id: q for q in questions},
                        split=split, meta=meta)


def check_leakage(split: CorpusSplit) -> None:
    train, dev, test = set(split.train), set(split.dev), set(split.test)
    overlap = (train & test) | (train & dev) | (dev & test)
    if overlap:
        raise LeakageError(
            f"split partitions overlap on {len(overlap)} question ids "
            f"(e.g. {sorted(overlap)[:5]}); refusing to evaluate")


# ---------------------------------------------------------------------------
# Shared feature machinery


class SqmFeaturizer:
    """Retrieval-backed feature computation against a fixed training index."""

    def __init__(self, index: InvertedIndex, by_id: dict[int, Question],
                 stopwords: frozenset[str], depth: int = 50):
        self.index = index
        self.by_id = by_id
        self.stopwords = stopwords
        self.depth = depth
        self._keyphrase_cache: dict[int, list[Counter]] = {}

    def keyphrases_of(self, doc_id: int) -> list[Counter]:
        cached = self._keyphrase_cache.get(doc_id)
        if cached is None:
            question = self.by_id[doc_id]
            cached = [keyphrase_tokens(extract_keyphrases(text, self.stopwords))
                      for text in question.clarification_texts]
            cached = [c for c in cached if c]
            self._keyphrase_cache[doc_id] = cached
        return cached

    def hits(self, question: Question):
        query = make_query(question, self.stopwords)
        if not query:
            return []
        return search(self.index, query, self.depth, exclude_id=question.id)

    def features(self, question: Question) -> np.ndarray:
        return compute_features(question, self.hits(question), self.keyphrases_of)

    def matrix(self, questions: list[Question]) -> np.ndarray:
        if not questions:
            return np.zeros((0, len(FEATURE_NAMES)))
        return np.vstack([self.features(q) for q in questions])


def shared_index_dir(config: PipelineConfig, bundle: CorpusBundle) -> Path:
    """Build (or reuse) the train-split index artifact for this config."""
    root = Path(config.out_dir) / "index"
    latest = latest_version_dir(root)
    if latest is not None:
        meta = read_json(latest / "meta.json")
        if meta.get("config_hash") == config.config_hash():
            return latest
    train_questions = bundle.subset(bundle.split.train)
    if not train_questions:
        raise InputError("training split is empty; cannot build an index")
    index = build_index(train_questions)
    out = next_version_dir(root)
    save_index(index, out / "index.json")
    write_json(out / "meta.json", config.meta())
    return out


# ---------------------------------------------------------------------------
# Commands


def cmd_ingest(config: PipelineConfig) -> Path:
    for label, path in (("posts", config.posts_xml), ("comments", config.comments_xml),
                        ("history", config.history_xml)):
        if not path or not Path(path).is_file():
            raise InputError(f"missing {label} dump file: {path!r}")
    parsed = corpus_mod.parse_dump(config.posts_xml, config.comments_xml,
                                   config.history_xml)
    candidates, discarded = corpus_mod.label_questions(parsed.posts, parsed.comments,
                                                       parsed.edits)
    questions, empty = corpus_mod.build_questions(candidates)
    if len(questions) < 10:
        raise InputError(f"only {len(questions)} labeled questions; need at least 10")
    split = corpus_mod.split_corpus([q.id for q in questions], config.seed)
    stats = corpus_mod.corpus_stats(questions, min_df=config.min_df)
    stats.update({
        "discarded": discarded,
        "empty_after_preprocess": empty,
        "skipped_rows": parsed.skipped,
        "community": config.name,
    })
    out = next_version_dir(Path(config.out_dir) / "corpus")
    write_questions_jsonl(out / "questions.jsonl", questions)
    write_json(out / "splits.json", split.to_dict())
    write_json(out / "stats.json", stats)
    write_json(out / "meta.json", config.meta())
    return out


def _train_lr_on_sqm(config: PipelineConfig, bundle: CorpusBundle,
                     featurizer: SqmFeaturizer) -> dict:
    train_questions = bundle.subset(bundle.split.train)
    matrix = featurizer.matrix(train_questions)
    labels = np.array([q.label for q in train_questions])
    standardizer = standardize_fit(matrix)
    model = lr_train(standardize_apply(standardizer, matrix), labels,
                     c_reg=config.c_reg, feature_names=FEATURE_NAMES)
    return {
        "feature_names": list(FEATURE_NAMES),
        "standardizer": {"mean": standardizer.mean.tolist(),
                         "std": standardizer.std.tolist()},
        "weights": model.weights.tolist(),
        "bias": model.bias,
        "c_reg": config.c_reg,
        "n_iterations": model.n_iterations,
        "converged": model.converged,
    }


def _train_threshold(config: PipelineConfig, bundle: CorpusBundle,
                     featurizer: SqmFeaturizer, feature_name: str) -> dict:
    dev_questions = bundle.subset(bundle.split.dev)
    if not dev_questions:
        raise InputError("dev split is empty; cannot fit a threshold")
    column = FEATURE_NAMES.index(feature_name)
    values = featurizer.matrix(dev_questions)[:, column]
    labels = [q.label for q in dev_questions]
    model = threshold_fit(values, labels, feature_name)
    return {
        "feature_name": feature_name,
        "gamma": repr(model.gamma),  # repr keeps +/-inf JSON-safe
        "dev_accuracy": model.dev_accuracy,
    }


def _train_bow(config: PipelineConfig, bundle: CorpusBundle, ngram_n: int,
               out: Path) -> dict:
    train_questions = bundle.subset(bundle.split.train)
    vocab = build_ngram_vocabulary(train_questions, n_max=ngram_n,
                                   min_df=config.min_df)
    matrix = bow_matrix(train_questions, vocab)
    labels = np.array([q.label for q in train_questions])
    model = lr_train(matrix, labels, c_reg=config.c_reg)
    write_json(out / "ngram_vocab.json", vocab.to_dict())
    return {
        "ngram_n": ngram_n,
        "weights": model.weights.tolist(),
        "bias": model.bias,
        "c_reg": config.c_reg,
        "n_iterations": model.n_iterations,
        "converged": model.converged,
    }


def cmd_train(config: PipelineConfig, model_name: str,
              export_features: bool = False) -> Path:
    if model_name not in MODEL_NAMES:
        raise InputError(f"unknown model {model_name!r}; choose from {MODEL_NAMES}")
    bundle = load_corpus(config)
    check_leakage(bundle.split)
    if bundle.meta.get("config_hash") != config.config_hash():
        raise InputError("corpus artifacts were built with a different configuration; "
                         "re-run ingest")
    out = next_version_dir(Path(config.out_dir) / "models" / model_name)
    payload = {
        "format_version": ARTIFACT_FORMAT_VERSION,
        "model": model_name,
        "config_hash": config.config_hash(),
        "seed": config.seed,
    }

    needs_index = model_name in ("simq-ml", "simq-majority", *THRESHOLD_FEATURES)
    if needs_index or export_features:
        index_dir = shared_index_dir(config, bundle)
        index = load_index(index_dir / "index.json")
        stopwords = load_stopwords(config.stopword_path)
        featurizer = SqmFeaturizer(index, bundle.by_id, stopwords,
                                   depth=config.retrieval_depth)
        payload["index_ref"] = str(index_dir.relative_to(config.out_dir))

    if model_name == "simq-ml":
        payload["kind"] = "simq-ml"
        payload["params"] = _train_lr_on_sqm(config, bundle, featurizer)
    elif model_name in THRESHOLD_FEATURES:
        payload["kind"] = "threshold"
        payload["params"] = _train_threshold(config, bundle, featurizer,
                                             THRESHOLD_FEATURES[model_name])
    elif model_name == "simq-majority":
        payload["kind"] = "simq-majority"
        payload["params"] = {"k": 10, "fallback": UNCLEAR}
    elif model_name in ("bow-lr-n1", "bow-lr-n3"):
        payload["kind"] = "bow-lr"
        ngram_n = 1 if model_name.endswith("n1") else 3
        payload["params"] = _train_bow(config, bundle, ngram_n, out)
    elif model_name == "majority":
        payload["kind"] = "majority"
        payload["params"] = {}
    elif model_name == "random":
        payload["kind"] = "random"
        payload["params"] = {"seed": config.seed}

    if export_features:
        train_questions = bundle.subset(bundle.split.train)
        export_features_csv(out / "features_train.csv",
                            [q.id for q in train_questions],
                            featurizer.matrix(train_questions),
                            [q.label for q in train_questions])

    write_json(out / "model.json", payload)
    return out


@dataclass
class LoadedModel:
    name: str
    kind: str
    payload: dict
    featurizer: SqmFeaturizer | None = None
    ngram_vocab: NgramVocabulary | None = None

    def lr_model(self) -> LogRegModel:
        params = self.payload["params"]
        return LogRegModel(weights=np.array(params["weights"], dtype=np.float64),
                           bias=float(params["bias"]),
                           c_reg=float(params["c_reg"]),
                           feature_names=tuple(params.get("feature_names", ())))


def load_model(config: PipelineConfig, model_name: str,
               bundle: CorpusBundle) -> LoadedModel:
    model_dir = latest_version_dir(Path(config.out_dir) / "models" / model_name)
    if model_dir is None:
        raise InputError(f"no trained artifact for model {model_name!r}; run train first")
    payload = read_json(model_dir / "model.json")
    if payload.get("format_version") != ARTIFACT_FORMAT_VERSION:
        raise InputError(f"unsupported model artifact version in {model_dir}")
    if payload.get("config_hash") != config.config_hash():
        raise InputError(f"model {model_name!r} was trained under a different "
                         "configuration (config hash mismatch)")
    loaded = LoadedModel(name=model_name, kind=payload["kind"], payload=payload)
    if "index_ref" in payload:
        index = load_index(Path(config.out_dir) / payload["index_ref"] / "index.json")
        stopwords = load_stopwords(config.stopword_path)
        loaded.featurizer = SqmFeaturizer(index, bundle.by_id, stopwords,
                                          depth=config.retrieval_depth)
    if loaded.kind == "bow-lr":
        loaded.ngram_vocab = NgramVocabulary.from_dict(
            read_json(model_dir / "ngram_vocab.json"))
    # validate dimensional consistency of linear models
    params = payload.get("params", {})
    if loaded.kind == "simq-ml":
        n = len(params["weights"])
        if n != len(params["feature_names"]) or n != len(params["standardizer"]["mean"]):
            raise InputError(f"model {model_name!r} artifact is dimensionally inconsistent")
    if loaded.kind == "bow-lr" and len(params["weights"]) != len(loaded.ngram_vocab):
        raise InputError(f"model {model_name!r} weight/vocabulary size mismatch")
    return loaded


def predict_with_model(loaded: LoadedModel, questions: list[Question],
                       config: PipelineConfig) -> tuple[np.ndarray, np.ndarray]:
    """Returns (labels, unclear-scores) for the given questions."""
    n = len(questions)
    params = loaded.payload.get("params", {})
    if loaded.kind == "majority":
        labels = np.full(n, majority_baseline(), dtype=np.int64)
        return labels, labels.astype(np.float64)
    if loaded.kind == "random":
        labels = random_labels(n, seed=params["seed"])
        return labels, labels.astype(np.float64)
    if loaded.kind == "bow-lr":
        matrix = bow_matrix(questions, loaded.ngram_vocab)
        model = loaded.lr_model()
        probs = lr_predict_proba(model, matrix)
        return (probs >= 0.5).astype(np.int64), probs

    featurizer = loaded.featurizer
    if loaded.kind == "simq-majority":
        labels = np.array([simq_majority(featurizer.hits(q), k=params["k"],
                                         fallback=params["fallback"])
                           for q in questions], dtype=np.int64)
        unclear_fraction = []
        for question in questions:
            prefix = featurizer.hits(question)[:params["k"]]
            unclear_fraction.append(
                sum(1 for h in prefix if h.label == UNCLEAR) / len(prefix)
                if prefix else 0.5)
        return labels, np.array(unclear_fraction, dtype=np.float64)
    if loaded.kind == "threshold":
        model = ThresholdModel(feature_name=params["feature_name"],
                               gamma=float(params["gamma"]))
        column = FEATURE_NAMES.index(params["feature_name"])
        values = featurizer.matrix(questions)[:, column]
        labels = np.array([model.predict(v) for v in values], dtype=np.int64)
        return labels, -values  # larger feature value means clearer
    if loaded.kind == "simq-ml":
        standardizer = Standardizer(
            mean=np.array(params["standardizer"]["mean"], dtype=np.float64),
            std=np.array(params["standardizer"]["std"], dtype=np.float64))
        matrix = standardize_apply(standardizer, featurizer.matrix(questions))
        probs = lr_predict_proba(loaded.lr_model(), matrix)
        return (probs >= 0.5).astype(np.int64), probs
    raise PipelineError(f"unhandled model kind {loaded.kind!r}")


def cmd_evaluate(config: PipelineConfig, model_names: list[str]) -> Path:
    bundle = load_corpus(config)
    check_leakage(bundle.split)
    test_questions = bundle.subset(bundle.split.test)
    if not test_questions:
        raise InputError("test split is empty")
    labels = np.array([q.label for q in test_questions], dtype=np.int64)
    both_classes = len(set(labels.tolist())) == 2

    results: dict[str, dict] = {}
    predictions: dict[str, np.ndarray] = {}
    scores: dict[str, np.ndarray] = {}
    coefficients: dict[str, list] = {}
    for name in model_names:
        loaded = load_model(config, name, bundle)
        preds, model_scores = predict_with_model(loaded, test_questions, config)
        predictions[name] = preds
        scores[name] = model_scores
        results[name] = evaluation.metrics_dict(
            preds, labels, model_scores if both_classes else None)
        if loaded.kind in ("simq-ml", "bow-lr"):
            model = loaded.lr_model()
            if loaded.kind == "bow-lr":
                vocab = loaded.ngram_vocab
                ordered = sorted(vocab.ngram_ids, key=vocab.ngram_ids.get)
                model.feature_names = tuple(ordered)
            top = evaluation.coefficient_report(model)
            # full dump for feature models, head/tail for n-gram models
            coefficients[name] = top if loaded.kind == "simq-ml" \
                else top[:25] + top[-25:]

    significance: dict[str, dict[str, float]] = {}
    pair_list = [(a, b) for i, a in enumerate(model_names)
                 for b in model_names[i + 1:]]
    for metric_name, metric_fn, source in (
            ("accuracy", evaluation.accuracy_metric, predictions),
            ("f1", evaluation.f1_metric, predictions),
            ("roc_auc", evaluation.auc_metric, scores)):
        if metric_name == "roc_auc" and not both_classes:
            continue
        for a, b in pair_list:
            key = f"{a} vs {b}"
            significance.setdefault(key, {})[metric_name] = evaluation.approx_randomization(
                source[a], source[b], labels, metric_fn,
                rounds=config.r_rounds, seed=config.seed)

    rows = []
    for i, name in enumerate(model_names):
        markers = {}
        if i > 0:
            prev = model_names[i - 1]
            key = f"{prev} vs {name}"
            for metric_name, p_value in significance.get(key, {}).items():
                current = results[name].get(metric_name)
                previous = results[prev].get(metric_name)
                if current is None or previous is None:
                    continue
                markers[metric_name] = evaluation.significance_marker(
                    p_value, improved=current >= previous)
        rows.append({"name": name, "metrics": results[name], "markers": markers})

    out = next_version_dir(Path(config.out_dir) / "reports")
    report = {
        "community": config.name,
        "config_hash": config.config_hash(),
        "n_test": len(test_questions),
        "metrics": results,
        "significance": significance,
        "significance_note": ("approximate randomization test applied to each "
                              "reported metric independently; markers compare "
                              "each row to the previous row"),
        "coefficients": coefficients,
        "r_rounds": config.r_rounds,
    }
    write_json(out / "report.json", report)
    with open(out / "report.txt", "w", encoding="utf-8") as fh:
        fh.write(f"community: {config.name}  n_test: {len(test_questions)}\n\n")
        fh.write(evaluation.render_results_table(rows))
    return out


# ---------------------------------------------------------------------------
# Single-question classification (shared by the CLI and the HTTP service)


class Predictor:
    """Immutable bundle of corpus + model artifacts answering live verdicts."""

    def __init__(self, config: PipelineConfig, model_name: str):
        self.config = config
        self.bundle = load_corpus(config)
        self.model = load_model(config, model_name, self.bundle)
        if self.model.featurizer is not None:
            self.featurizer = self.model.featurizer
        else:
            index_dir = shared_index_dir(config, self.bundle)
            index = load_index(index_dir / "index.json")
            self.featurizer = SqmFeaturizer(index, self.bundle.by_id,
                                            load_stopwords(config.stopword_path),
                                            depth=config.retrieval_depth)
        self.config_hash = config.config_hash()

    def classify(self, title: str, body: str, tags: list[str]) -> dict:
        if not (title or "").strip():
            raise InputError("title must be nonempty")
        pre = corpus_mod.preprocess(title, body or "", list(tags or []))
        if not pre.tokens:
            raise InputError("question is empty after preprocessing")
        question = Question(id=-1, tokens=pre.tokens, title_tokens=pre.title_tokens,
                            tag_tokens=pre.tag_tokens, label=UNCLEAR,
                            clarification_texts=[], contains_pre=pre.contains_pre,
                            contains_quote=pre.contains_quote, raw_text=pre.raw_text)
        hits = self.featurizer.hits(question)
        label, probability = self._verdict(question, hits)
        stopwords = self.featurizer.stopwords
        hints = []
        for hit in [h for h in hits if h.label == UNCLEAR][:10]:
            source = self.bundle.by_id[hit.doc_id]
            for text in source.clarification_texts:
                hints.append({
                    "clarification_text": text,
                    "keyphrases": [kp.text for kp in extract_keyphrases(text, stopwords)],
                    "retrieval_score": hit.score,
                })
        return {
            "label": "unclear" if label == UNCLEAR else "clear",
            "probability_unclear": float(probability),
            "similar": [{"question_id": h.doc_id, "score": h.score,
                         "label": "unclear" if h.label == UNCLEAR else "clear"}
                        for h in hits[:10]],
            "hints": hints,
        }

    def _verdict(self, question: Question, hits) -> tuple[int, float]:
        params = self.model.payload.get("params", {})
        kind = self.model.kind
        if kind == "majority":
            return UNCLEAR, 1.0
        if kind == "random":
            return int(random_labels(1, seed=params["seed"])[0]), 0.5
        if kind == "bow-lr":
            matrix = bow_matrix([question], self.model.ngram_vocab)
            prob = float(lr_predict_proba(self.model.lr_model(), matrix)[0])
            return int(prob >= 0.5), prob
        vector = compute_features(question, hits, self.featurizer.keyphrases_of)
        if kind == "simq-majority":
            prefix = hits[:params["k"]]
            frac = (sum(1 for h in prefix if h.label == UNCLEAR) / len(prefix)
                    if prefix else 0.5)
            return simq_majority(hits, k=params["k"], fallback=params["fallback"]), frac
        if kind == "threshold":
            value = vector[FEATURE_NAMES.index(params["feature_name"])]
            model = ThresholdModel(params["feature_name"], float(params["gamma"]))
            label = model.predict(value)
            return label, 1.0 if label == UNCLEAR else 0.0
        if kind == "simq-ml":
            standardizer = Standardizer(
                mean=np.array(params["standardizer"]["mean"], dtype=np.float64),
                std=np.array(params["standardizer"]["std"], dtype=np.float64))
            prob = float(lr_predict_proba(self.model.lr_model(),
                                          standardize_apply(standardizer, vector))[0])
            return int(prob >= 0.5), prob
        raise PipelineError(f"unhandled model kind {kind!r}")


def cmd_classify(config: PipelineConfig, model_name: str, input_path: str) -> dict:
    if input_path == "-":
        raw = sys.stdin.read()
    else:
        try:
            with open(input_path, encoding="utf-8") as fh:
                raw = fh.read()
        except FileNotFoundError as exc:
            raise InputError(f"input file not found: {input_path}") from exc
    try:
        request = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed input JSON: {exc}") from exc
    if not isinstance(request, dict) or "title" not in request:
        raise InputError("input JSON must be an object with a 'title' field")
    predictor = Predictor(config, model_name)
    return predictor.classify(request.get("title", ""), request.get("body", ""),
                              request.get("tags", []))


# ---------------------------------------------------------------------------
# CLI


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="path to the JSON config file")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out-dir", help="override the config output directory")
    parser.add_argument("--r-rounds", type=int, help="override randomization rounds")


def _resolve_config(args) -> PipelineConfig:
    config = PipelineConfig.from_file(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.out_dir is not None:
        config.out_dir = args.out_dir
    if getattr(args, "r_rounds", None) is not None:
        config.r_rounds = args.r_rounds
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clarity",
        description="Unclear-question detection pipeline and service.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="parse dumps, label, split, write corpus")
    _add_common(p_ingest)

    p_train = sub.add_parser("train", help="train a model on the corpus artifacts")
    _add_common(p_train)
    p_train.add_argument("--model", required=True)
    p_train.add_argument("--export-features", action="store_true",
                         help="also write the feature matrix CSV")

    p_eval = sub.add_parser("evaluate", help="evaluate trained models on the test split")
    _add_common(p_eval)
    p_eval.add_argument("--models", help="comma-separated model names "
                                         "(default: all trained)")

    p_classify = sub.add_parser("classify", help="classify one question JSON")
    _add_common(p_classify)
    p_classify.add_argument("--model", required=True)
    p_classify.add_argument("--input", required=True, help="question JSON path or -")

    p_serve = sub.add_parser("serve", help="run the HTTP classification service")
    _add_common(p_serve)
    p_serve.add_argument("--model", required=True)
    p_serve.add_argument("--host")
    p_serve.add_argument("--port", type=int)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _resolve_config(args)
        if args.command == "ingest":
            out = cmd_ingest(config)
            print(f"corpus written to {out}")
        elif args.command == "train":
            out = cmd_train(config, args.model, export_features=args.export_features)
            print(f"model artifact written to {out}")
        elif args.command == "evaluate":
            if args.models:
                names = [n.strip() for n in args.models.split(",") if n.strip()]
            else:
                model_root = Path(config.out_dir) / "models"
                names = sorted(p.name for p in model_root.iterdir()
                               if p.is_dir()) if model_root.is_dir() else []
            if not names:
                raise InputError("no trained models found; run train first")
            out = cmd_evaluate(config, names)
            print((out / "report.txt").read_text(encoding="utf-8"))
            print(f"report written to {out}")
        elif args.command == "classify":
            verdict = cmd_classify(config, args.model, args.input)
            print(json.dumps(verdict, indent=2, sort_keys=True, ensure_ascii=False))
        elif args.command == "serve":
            if args.host:
                config.host = args.host
            if args.port:
                config.port = args.port
            from .service import run_service
            run_service(config, args.model)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except LeakageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
