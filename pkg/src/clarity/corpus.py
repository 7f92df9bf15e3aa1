"""Data-dump ingestion: XML row parsing, clear/unclear labeling, text preprocessing, splits.

Input is the public archive dump layout (Posts.xml / Comments.xml / PostHistory.xml,
records as empty ``<row .../>`` elements carrying attributes). Output is a list of
labeled, tokenized questions plus corpus-level statistics.
"""

from __future__ import annotations

import random
import re
import statistics
import xml.etree.ElementTree as ET
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from html.parser import HTMLParser

CLEAR = 0
UNCLEAR = 1

POST_QUESTION = "question"
POST_ANSWER = "answer"
POST_OTHER = "other"

# History-type codes 4/5/6 are title/body/tags edits; everything else (initial
# revisions, close/reopen events, ...) is "other" and never counts as an edit
# in the labeling heuristic.
_EDIT_KINDS = {"4": "edit_title", "5": "edit_body", "6": "edit_tags"}

URL_TOKEN = "<url>"
UNK_TOKEN = "<unk>"
UNK_ID = 0

# Characters that survive preprocessing. Apostrophe, hyphen and underscore are
# word-internal; the other punctuation marks split and are emitted as tokens.
_SPLIT_PUNCT = set('.,;:!?"()')
_WORD_PUNCT = set("'-_")
_SENTINEL = "\x00"  # stands in for <url> while filtering/splitting

_URL_RE = re.compile(r"(?:[a-zA-Z][a-zA-Z0-9+.\-]*://\S+|www\.\S+)")
_URL_LITERAL_RE = re.compile(r"<url>", re.IGNORECASE)
_SENTENCE_BOUNDARY_RE = re.compile(r"(?<=[.!?])(?=\s|$)")
_WS_RE = re.compile(r"\s+")


class DumpParseError(Exception):
    """Malformed XML at the document level."""


@dataclass(frozen=True)
class RawPost:
    id: int
    post_type: str
    owner_user_id: int | None
    creation_date: datetime
    title: str | None
    body: str | None
    tags: list[str]
    accepted_answer_id: int | None


@dataclass(frozen=True)
class RawComment:
    post_id: int
    user_id: int | None
    creation_date: datetime
    text: str


@dataclass(frozen=True)
class RawEdit:
    post_id: int
    user_id: int | None
    creation_date: datetime
    kind: str  # edit_title | edit_body | edit_tags | other


@dataclass
class Question:
    """A labeled, preprocessed question: the unit of classification."""

    id: int
    tokens: list[str]
    title_tokens: list[str]
    tag_tokens: list[str]
    label: int
    clarification_texts: list[str]
    contains_pre: int = 0
    contains_quote: int = 0
    raw_text: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "tokens": self.tokens,
            "title_tokens": self.title_tokens,
            "tag_tokens": self.tag_tokens,
            "label": self.label,
            "clarification_texts": self.clarification_texts,
            "contains_pre": self.contains_pre,
            "contains_quote": self.contains_quote,
            "raw_text": self.raw_text,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Question":
        return cls(**data)


@dataclass(frozen=True)
class CorpusSplit:
    train: list[int]
    dev: list[int]
    test: list[int]
    seed: int

    def to_dict(self) -> dict:
        return {"train": self.train, "dev": self.dev, "test": self.test, "seed": self.seed}

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusSplit":
        return cls(train=list(data["train"]), dev=list(data["dev"]),
                   test=list(data["test"]), seed=data["seed"])


@dataclass
class Vocabulary:
    """Unigram vocabulary with a minimum document frequency; id 0 is <unk>."""

    term_ids: dict[str, int]
    doc_freq: dict[str, int]
    min_df: int = 3

    def id_of(self, term: str) -> int:
        return self.term_ids.get(term, UNK_ID)

    def __len__(self) -> int:
        return len(self.term_ids)


@dataclass
class ParseResult:
    posts: list[RawPost]
    comments: list[RawComment]
    edits: list[RawEdit]
    skipped: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class LabeledCandidate:
    post: RawPost
    label: int
    clarification_texts: list[str]


# ---------------------------------------------------------------------------
# XML parsing


def _byte_offset(path, line: int, column: int) -> int:
    """Byte offset of (line, column) in a file; lines are what the parser saw."""
    offset = 0
    try:
        with open(path, "rb") as fh:
            for _ in range(max(line - 1, 0)):
                chunk = fh.readline()
                if not chunk:
                    break
                offset += len(chunk)
    except (OSError, TypeError):
        return column
    return offset + column


def _iter_rows(path):
    try:
        for _, elem in ET.iterparse(path, events=("end",)):
            if elem.tag == "row":
                yield dict(elem.attrib)
            elem.clear()
    except ET.ParseError as exc:
        line, column = exc.position
        raise DumpParseError(
            f"{path}: malformed XML ({exc.msg}) at byte offset "
            f"{_byte_offset(path, line, column)}"
        ) from exc


def _parse_date(value: str) -> datetime:
    dt = datetime.fromisoformat(value)
    return dt if dt.tzinfo is not None else dt.replace(tzinfo=timezone.utc)


def _parse_tags(value: str | None) -> list[str]:
    if not value:
        return []
    if value.startswith("<"):
        return [t for t in value.strip("<>").split("><") if t]
    if "|" in value:
        return [t for t in value.split("|") if t]
    return [value]


def _opt_int(row: dict, key: str) -> int | None:
    value = row.get(key)
    return int(value) if value not in (None, "") else None


def _post_from_row(row: dict) -> RawPost:
    type_code = row["PostTypeId"]
    post_type = {"1": POST_QUESTION, "2": POST_ANSWER}.get(type_code, POST_OTHER)
    title = row.get("Title")
    if post_type == POST_QUESTION and not title:
        raise KeyError("Title")
    return RawPost(
        id=int(row["Id"]),
        post_type=post_type,
        owner_user_id=_opt_int(row, "OwnerUserId"),
        creation_date=_parse_date(row["CreationDate"]),
        title=title,
        body=row.get("Body"),
        tags=_parse_tags(row.get("Tags")),
        accepted_answer_id=_opt_int(row, "AcceptedAnswerId"),
    )


def _comment_from_row(row: dict) -> RawComment:
    return RawComment(
        post_id=int(row["PostId"]),
        user_id=_opt_int(row, "UserId"),
        creation_date=_parse_date(row["CreationDate"]),
        text=row["Text"],
    )


def _edit_from_row(row: dict) -> RawEdit:
    return RawEdit(
        post_id=int(row["PostId"]),
        user_id=_opt_int(row, "UserId"),
        creation_date=_parse_date(row["CreationDate"]),
        kind=_EDIT_KINDS.get(row["PostHistoryTypeId"], "other"),
    )


def parse_dump(posts_path, comments_path, history_path) -> ParseResult:
    """Stream-parse the three dump files; rows missing required attributes are
    skipped and counted, unknown attributes are ignored."""
    result = ParseResult(posts=[], comments=[], edits=[],
                         skipped={"posts": 0, "comments": 0, "history": 0})
    for row in _iter_rows(posts_path):
        try:
            result.posts.append(_post_from_row(row))
        except (KeyError, ValueError):
            result.skipped["posts"] += 1
    for row in _iter_rows(comments_path):
        try:
            result.comments.append(_comment_from_row(row))
        except (KeyError, ValueError):
            result.skipped["comments"] += 1
    for row in _iter_rows(history_path):
        try:
            result.edits.append(_edit_from_row(row))
        except (KeyError, ValueError):
            result.skipped["history"] += 1
    return result


# ---------------------------------------------------------------------------
# Sentence handling (shared with the readability feature)


def split_sentences(text: str) -> list[str]:
    """Split on . ! ? followed by whitespace or end-of-text."""
    return [part.strip() for part in _SENTENCE_BOUNDARY_RE.split(text) if part.strip()]


def count_sentences(text: str) -> int:
    return max(len(split_sentences(text)), 1)


def question_sentences(text: str) -> list[str]:
    """Sentences whose final non-whitespace character is '?'."""
    return [s for s in split_sentences(text) if s.endswith("?")]


# ---------------------------------------------------------------------------
# Labeling heuristic


def label_questions(posts: list[RawPost], comments: list[RawComment],
                    edits: list[RawEdit]) -> tuple[list[LabeledCandidate], int]:
    """Assign clear/unclear labels; returns (candidates, discarded count).

    Unclear: some other-user comment contains a question sentence, and the
    owner later responded with a comment or an edit. Clear: no comments, no
    edits, accepted answer present. Everything else is discarded.
    """
    comments_by_post: dict[int, list[RawComment]] = defaultdict(list)
    for comment in comments:
        comments_by_post[comment.post_id].append(comment)
    edits_by_post: dict[int, list[RawEdit]] = defaultdict(list)
    for edit in edits:
        if edit.kind != "other":
            edits_by_post[edit.post_id].append(edit)

    candidates: list[LabeledCandidate] = []
    discarded = 0
    for post in posts:
        if post.post_type != POST_QUESTION:
            continue
        if post.owner_user_id is None:
            discarded += 1
            continue
        post_comments = sorted(comments_by_post.get(post.id, ()),
                               key=lambda c: c.creation_date)
        post_edits = edits_by_post.get(post.id, [])

        clarifying = [
            (comment, question_sentences(comment.text))
            for comment in post_comments
            if comment.user_id is not None and comment.user_id != post.owner_user_id
        ]
        clarifying = [(comment, qs) for comment, qs in clarifying if qs]

        if clarifying:
            first = min(comment.creation_date for comment, _ in clarifying)
            owner_commented = any(
                c.user_id == post.owner_user_id and c.creation_date > first
                for c in post_comments
            )
            owner_edited = any(
                e.user_id == post.owner_user_id and e.creation_date > first
                for e in post_edits
            )
            if owner_commented or owner_edited:
                texts = [q for _, qs in clarifying for q in qs]
                candidates.append(LabeledCandidate(post, UNCLEAR, texts))
            else:
                discarded += 1
        elif not post_comments and not post_edits and post.accepted_answer_id is not None:
            candidates.append(LabeledCandidate(post, CLEAR, []))
        else:
            discarded += 1
    return candidates, discarded


# ---------------------------------------------------------------------------
# Preprocessing


class _HTMLTextExtractor(HTMLParser):
    """Collects text content; tags act as separators. Records pre/quote presence."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.parts: list[str] = []
        self.saw_pre = False
        self.saw_quote = False

    def handle_starttag(self, tag, attrs):
        if tag == "pre":
            self.saw_pre = True
        elif tag in ("blockquote", "quote"):
            self.saw_quote = True
        self.parts.append(" ")

    def handle_endtag(self, tag):
        self.parts.append(" ")

    def handle_data(self, data):
        self.parts.append(data)

    def text(self) -> str:
        return "".join(self.parts)


def strip_html(markup: str) -> tuple[str, bool, bool]:
    """Drop tags (contents of pre/code retained), decode entities, record flags."""
    extractor = _HTMLTextExtractor()
    extractor.feed(markup)
    extractor.close()
    return extractor.text(), extractor.saw_pre, extractor.saw_quote


def _filter_chars(text: str) -> str:
    out = []
    for ch in text:
        if ch == _SENTINEL or ch.isspace() or "a" <= ch <= "z" or "0" <= ch <= "9" \
                or ch in _SPLIT_PUNCT or ch in _WORD_PUNCT:
            out.append(ch)
        else:
            out.append(" ")
    return "".join(out)


def _split_tokens(text: str) -> list[str]:
    tokens: list[str] = []
    for chunk in text.split():
        buf = ""
        for ch in chunk:
            if ch in _SPLIT_PUNCT or ch == _SENTINEL:
                if buf:
                    tokens.append(buf)
                    buf = ""
                tokens.append(URL_TOKEN if ch == _SENTINEL else ch)
            else:
                buf += ch
        if buf:
            tokens.append(buf)
    return tokens


def tokenize(text: str) -> list[str]:
    """Lowercase, replace URLs with <url>, drop disallowed characters, split.

    Punctuation marks . , ; : ! ? " ( ) are emitted as their own tokens;
    apostrophes, hyphens and underscores stay inside words.
    """
    text = _URL_LITERAL_RE.sub(_SENTINEL, text)
    text = _URL_RE.sub(_SENTINEL, text)
    text = text.lower()
    return _split_tokens(_filter_chars(text))


@dataclass
class PreprocessedText:
    tokens: list[str]
    title_tokens: list[str]
    tag_tokens: list[str]
    contains_pre: int
    contains_quote: int
    raw_text: str


def preprocess(title: str, body_html: str, tags: list[str]) -> PreprocessedText:
    """Title, body and tags combined, in that order, into one token field."""
    body_html = _URL_LITERAL_RE.sub(_SENTINEL, body_html or "")
    body_text, saw_pre, saw_quote = strip_html(body_html)
    title_tokens = tokenize(title or "")
    body_tokens = tokenize(body_text)
    tag_tokens = [tok for tag in tags for tok in tokenize(tag)]
    raw = _WS_RE.sub(" ", f"{title or ''} {body_text}").replace(_SENTINEL, URL_TOKEN).strip()
    return PreprocessedText(
        tokens=title_tokens + body_tokens + tag_tokens,
        title_tokens=title_tokens,
        tag_tokens=tag_tokens,
        contains_pre=int(saw_pre),
        contains_quote=int(saw_quote),
        raw_text=raw,
    )


def build_questions(candidates: list[LabeledCandidate]) -> tuple[list[Question], int]:
    """Apply preprocessing; questions left with no tokens are dropped and counted."""
    questions: list[Question] = []
    empty = 0
    for cand in candidates:
        pre = preprocess(cand.post.title or "", cand.post.body or "", cand.post.tags)
        if not pre.tokens:
            empty += 1
            continue
        questions.append(Question(
            id=cand.post.id,
            tokens=pre.tokens,
            title_tokens=pre.title_tokens,
            tag_tokens=pre.tag_tokens,
            label=cand.label,
            clarification_texts=list(cand.clarification_texts),
            contains_pre=pre.contains_pre,
            contains_quote=pre.contains_quote,
            raw_text=pre.raw_text,
        ))
    return questions, empty


# ---------------------------------------------------------------------------
# Vocabulary and splits


def build_vocabulary(questions: list[Question], min_df: int = 3) -> Vocabulary:
    if not questions:
        raise ValueError("cannot build a vocabulary from an empty question set")
    doc_freq: Counter[str] = Counter()
    for question in questions:
        doc_freq.update(set(question.tokens))
    retained = sorted(term for term, df in doc_freq.items() if df >= min_df)
    # id 0 is reserved for <unk>
    term_ids = {term: i + 1 for i, term in enumerate(retained)}
    return Vocabulary(term_ids=term_ids,
                      doc_freq={t: doc_freq[t] for t in retained},
                      min_df=min_df)


def split_corpus(question_ids: list[int], seed: int) -> CorpusSplit:
    """80/20 train+dev/test, then 20% of the remainder as dev. Unstratified."""
    ids = sorted(question_ids)
    if len(ids) < 10:
        raise ValueError(f"need at least 10 questions to split, got {len(ids)}")
    rng = random.Random(seed)
    rng.shuffle(ids)
    n_test = round(0.2 * len(ids))
    test = ids[:n_test]
    rest = ids[n_test:]
    n_dev = round(0.2 * len(rest))
    dev = rest[:n_dev]
    train = rest[n_dev:]
    return CorpusSplit(train=sorted(train), dev=sorted(dev), test=sorted(test), seed=seed)


def corpus_stats(questions: list[Question], min_df: int = 3) -> dict:
    """Mirror of the dataset-statistics table: N, median length, |V|, |V*|, shares."""
    if not questions:
        raise ValueError("no questions")
    doc_freq: Counter[str] = Counter()
    for question in questions:
        doc_freq.update(set(question.tokens))
    n = len(questions)
    n_clear = sum(1 for q in questions if q.label == CLEAR)
    return {
        "n_questions": n,
        "median_length": float(statistics.median(len(q.tokens) for q in questions)),
        "vocab_size": len(doc_freq),
        "vocab_size_min_df": sum(1 for df in doc_freq.values() if df >= min_df),
        "clear_share": n_clear / n,
        "unclear_share": (n - n_clear) / n,
    }
