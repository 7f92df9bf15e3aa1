"""Synthetic CQA community generator emitting the data-dump XML layout.

Stands in for a real community dump where the public archives are not
reachable. The generated community mirrors the class balance of a small real
community and carries learnable clarity signal end to end: per-topic label
propensities, length differences between classes, detail vocabulary that
unclear questions tend to omit, and templated clarification questions asking
about the missing details. Everything is deterministic given the seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import quoteattr

_CONSONANTS = "bcdfghjklmnpqrstvwz"
_VOWELS = "aeiou"

_CLARIFICATION_TEMPLATES = (
    "Which {aspect} are you using?",
    "What {aspect} do you have?",
    "Did you check the {aspect}?",
    "Is the {detail} involved here?",
    "Have you tried the {detail}?",
)

_OWNER_REPLIES = (
    "Good point, I am on the {detail} now, updated above.",
    "Added the {detail} information to the question.",
    "Thanks, it is the {detail}, edited accordingly.",
)


@dataclass
class SynthConfig:
    n_questions: int = 28000
    clear_share: float = 0.18
    discard_share: float = 0.08
    n_topics: int = 45
    seed: int = 7


@dataclass
class _Topic:
    name_tokens: list[str]
    tags: list[str]
    vocab: list[str]
    aspects: list[tuple[str, list[str]]]  # (aspect phrase, detail words)
    clear_propensity: float


def _word(rng: random.Random, syllables: int) -> str:
    return "".join(rng.choice(_CONSONANTS) + rng.choice(_VOWELS)
                   for _ in range(syllables))


def _unique_words(rng: random.Random, count: int, syllables: int,
                  taken: set[str]) -> list[str]:
    words = []
    while len(words) < count:
        word = _word(rng, syllables)
        if word not in taken:
            taken.add(word)
            words.append(word)
    return words


def _zipf_choice(rng: random.Random, words: list[str]) -> str:
    # weight ~ 1/rank via inverse-CDF on the harmonic distribution
    n = len(words)
    u = rng.random()
    index = min(int(n ** u) - 1, n - 1)
    return words[max(index, 0)]


class _CommunityBuilder:
    def __init__(self, config: SynthConfig):
        self.config = config
        self.rng = random.Random(config.seed)
        taken: set[str] = set()
        self.global_vocab = _unique_words(self.rng, 2500, 3, taken)
        self.filler = _unique_words(self.rng, 40, 2, taken)
        self.topics = [self._make_topic(taken) for _ in range(config.n_topics)]
        self.posts: list[dict] = []
        self.comments: list[dict] = []
        self.history: list[dict] = []
        self._next_id = 1
        self._next_user = 1000
        self._tick = 0

    def _make_topic(self, taken: set[str]) -> _Topic:
        rng = self.rng
        name_tokens = _unique_words(rng, 2, 3, taken)
        tags = _unique_words(rng, 3, 3, taken)
        vocab = _unique_words(rng, 40, 3, taken)
        aspects = []
        for _ in range(3):
            phrase = " ".join(_unique_words(rng, rng.randint(1, 2), 3, taken))
            details = _unique_words(rng, 4, 3, taken)
            aspects.append((phrase, details))
        # mean matches the target clear share, with real spread across topics
        a = 1.4
        b = a * (1.0 - self.config.clear_share) / self.config.clear_share
        propensity = min(max(rng.betavariate(a, b), 0.02), 0.85)
        return _Topic(name_tokens=name_tokens, tags=tags, vocab=vocab,
                      aspects=aspects, clear_propensity=propensity)

    # -- id and time bookkeeping

    def _post_id(self) -> int:
        value = self._next_id
        self._next_id += 1
        return value

    def _user_id(self) -> int:
        value = self._next_user
        self._next_user += 1
        return value

    def _when(self) -> str:
        self._tick += 1
        minutes = self._tick
        day = 1 + minutes // 1440
        hour = (minutes % 1440) // 60
        minute = minutes % 60
        month = 1 + (day - 1) // 28
        day = 1 + (day - 1) % 28
        return f"2017-{month:02d}-{day:02d}T{hour:02d}:{minute:02d}:00.000"

    # -- text assembly

    def _sentence(self, topic: _Topic, include: list[str], terminal: str) -> str:
        rng = self.rng
        length = rng.randint(6, 12)
        words = []
        for _ in range(length):
            roll = rng.random()
            if roll < 0.45:
                words.append(rng.choice(topic.vocab))
            elif roll < 0.8:
                words.append(_zipf_choice(rng, self.global_vocab))
            else:
                words.append(rng.choice(self.filler))
        for extra in include:
            words.insert(rng.randrange(len(words) + 1), extra)
        return " ".join(words) + terminal


    def _body(self, topic: _Topic, label_clear: bool) -> str:
        rng = self.rng
        n_sentences = rng.randint(3, 6) if label_clear else rng.randint(4, 7)
        include_detail = rng.random() < (0.6 if label_clear else 0.3)
        include_aspect = rng.random() < (0.4 if label_clear else 0.2)
        inserts: list[list[str]] = [[] for _ in range(n_sentences)]
        if include_detail:
            aspect, details = rng.choice(topic.aspects)
            inserts[rng.randrange(n_sentences)].append(rng.choice(details))
        if include_aspect:
            aspect, _ = rng.choice(topic.aspects)
            inserts[rng.randrange(n_sentences)].append(aspect)
        sentences = []
        for i in range(n_sentences):
            terminal = "."
            if i == n_sentences - 1:
                asks = rng.random() < (0.85 if label_clear else 0.65)
                terminal = "?" if asks else "."
            sentences.append(self._sentence(topic, inserts[i], terminal))
        body = "<p>" + " ".join(sentences) + "</p>"
        if rng.random() < (0.25 if label_clear else 0.12):
            code = " ".join(rng.choice(topic.vocab) for _ in range(4))
            body += f"<pre>{code}</pre>"
        if rng.random() < 0.1:
            quoted = self._sentence(topic, [], ".")
            body += f"<blockquote>{quoted}</blockquote>"
        return body

    def _title(self, topic: _Topic, label_clear: bool) -> str:
        rng = self.rng
        words = list(topic.name_tokens)
        words += [rng.choice(topic.vocab) for _ in range(rng.randint(2, 4))]
        if label_clear and rng.random() < 0.35:
            _, details = rng.choice(topic.aspects)
            words.append(rng.choice(details))
        return " ".join(words)

    # -- record emission

    def _add_post(self, **attrs) -> int:
        post_id = self._post_id()
        self.posts.append({"Id": str(post_id), **attrs})
        return post_id

    def _add_question(self, topic: _Topic, label_clear: bool,
                      owner: int) -> int:
        qid = self._add_post(
            PostTypeId="1",
            OwnerUserId=str(owner),
            CreationDate=self._when(),
            Title=self._title(topic, label_clear),
            Body=self._body(topic, label_clear),
            Tags="".join(f"<{t}>" for t in topic.tags),
        )
        self.history.append({"Id": str(self._post_id()), "PostId": str(qid),
                             "UserId": str(owner), "CreationDate": self._when(),
                             "PostHistoryTypeId": "2"})
        return qid

    def _add_answer(self, question_id: int, topic: _Topic) -> int:
        return self._add_post(
            PostTypeId="2",
            OwnerUserId=str(self._user_id()),
            CreationDate=self._when(),
            Body="<p>" + self._sentence(topic, [], ".") + "</p>",
        )

    def _accept_answer(self, question_index: int, answer_id: int) -> None:
        self.posts[question_index]["AcceptedAnswerId"] = str(answer_id)

    def _add_comment(self, post_id: int, user: int, text: str) -> None:
        self.comments.append({"Id": str(self._post_id()), "PostId": str(post_id),
                              "UserId": str(user), "CreationDate": self._when(),
                              "Text": text})

    def _add_edit(self, post_id: int, user: int, kind: str = "5") -> None:
        self.history.append({"Id": str(self._post_id()), "PostId": str(post_id),
                             "UserId": str(user), "CreationDate": self._when(),
                             "PostHistoryTypeId": kind})

    def _clarification_text(self, topic: _Topic) -> tuple[str, str]:
        rng = self.rng
        aspect, details = rng.choice(topic.aspects)
        detail = rng.choice(details)
        template = rng.choice(_CLARIFICATION_TEMPLATES)
        return template.format(aspect=aspect, detail=detail), detail

    def make_clear(self, topic: _Topic) -> None:
        owner = self._user_id()
        question_index = len(self.posts)
        qid = self._add_question(topic, True, owner)
        answer_id = self._add_answer(qid, topic)
        self._accept_answer(question_index, answer_id)

    def make_unclear(self, topic: _Topic) -> None:
        rng = self.rng
        owner = self._user_id()
        qid = self._add_question(topic, False, owner)
        n_clarifications = 1 if rng.random() < 0.7 else 2
        detail = ""
        for _ in range(n_clarifications):
            text, detail = self._clarification_text(topic)
            self._add_comment(qid, self._user_id(), text)
        reply = rng.choice(_OWNER_REPLIES).format(detail=detail)
        if rng.random() < 0.5:
            self._add_comment(qid, owner, reply)
        else:
            self._add_edit(qid, owner)
        if rng.random() < 0.5:
            self._add_answer(qid, topic)

    def make_discarded(self, topic: _Topic) -> None:
        rng = self.rng
        owner = self._user_id()
        shape = rng.randrange(4)
        question_index = len(self.posts)
        qid = self._add_question(topic, rng.random() < 0.5, owner)
        if shape == 0:
            # clarification question, owner never responds
            text, _ = self._clarification_text(topic)
            self._add_comment(qid, self._user_id(), text)
        elif shape == 1:
            # only the owner muses in the comments
            self._add_comment(qid, owner, "Anyone? Should I add more details?")
        elif shape == 2:
            # answered but never accepted, no conversation
            self._add_answer(qid, topic)
        else:
            # accepted answer but the question was edited
            answer_id = self._add_answer(qid, topic)
            self._accept_answer(question_index, answer_id)
            self._add_edit(qid, owner)

    def build(self) -> None:
        rng = self.rng
        config = self.config
        n_discard = int(config.n_questions * config.discard_share)
        n_labeled = config.n_questions - n_discard
        makers = []
        for _ in range(n_labeled):
            topic = rng.choice(self.topics)
            if rng.random() < topic.clear_propensity:
                makers.append((self.make_clear, topic))
            else:
                makers.append((self.make_unclear, topic))
        for _ in range(n_discard):
            makers.append((self.make_discarded, rng.choice(self.topics)))
        rng.shuffle(makers)
        for maker, topic in makers:
            maker(topic)


def _write_rows(path: Path, root: str, rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write('<?xml version="1.0" encoding="utf-8"?>\n')
        fh.write(f"<{root}>\n")
        for row in rows:
            attrs = " ".join(f"{key}={quoteattr(value)}" for key, value in row.items())
            fh.write(f"  <row {attrs} />\n")
        fh.write(f"</{root}>\n")


def generate_dump(config: SynthConfig, out_dir) -> dict[str, Path]:
    """Write Posts.xml / Comments.xml / PostHistory.xml; returns their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    builder = _CommunityBuilder(config)
    builder.build()
    paths = {
        "posts": out / "Posts.xml",
        "comments": out / "Comments.xml",
        "history": out / "PostHistory.xml",
    }
    _write_rows(paths["posts"], "posts", builder.posts)
    _write_rows(paths["comments"], "comments", builder.comments)
    _write_rows(paths["history"], "posthistory", builder.history)
    return paths
