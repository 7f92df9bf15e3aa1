import string
from datetime import datetime, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clarity import corpus
from clarity.corpus import (CLEAR, UNCLEAR, DumpParseError, RawComment, RawEdit,
                            RawPost, build_questions, build_vocabulary,
                            label_questions, parse_dump, preprocess,
                            question_sentences, split_corpus, split_sentences,
                            tokenize)

from .conftest import MINIDUMP


def ts(hour, day=1):
    return datetime(2017, 1, day, hour, tzinfo=timezone.utc)


def post(pid, owner=1, title="A question title", body="<p>body text here</p>",
         tags=("tag",), accepted=None, post_type="question", created=None):
    return RawPost(id=pid, post_type=post_type, owner_user_id=owner,
                   creation_date=created or ts(0), title=title, body=body,
                   tags=list(tags), accepted_answer_id=accepted)


def comment(pid, user, text, when):
    return RawComment(post_id=pid, user_id=user, creation_date=when, text=text)


def edit(pid, user, when, kind="edit_body"):
    return RawEdit(post_id=pid, user_id=user, creation_date=when, kind=kind)


# ---------------------------------------------------------------------------
# parse_dump


def test_parse_dump_post_types(tmp_path):
    posts = tmp_path / "Posts.xml"
    posts.write_text(
        '<?xml version="1.0"?><posts>'
        '<row Id="1" PostTypeId="1" CreationDate="2017-01-01T00:00:00" '
        'Title="T" OwnerUserId="5" Mystery="ignored" />'
        '<row Id="2" PostTypeId="2" CreationDate="2017-01-01T00:00:00" />'
        '<row Id="3" PostTypeId="7" CreationDate="2017-01-01T00:00:00" />'
        "</posts>")
    empty = tmp_path / "empty.xml"
    empty.write_text("<x></x>")
    result = parse_dump(posts, empty, empty)
    assert [p.post_type for p in result.posts] == ["question", "answer", "other"]
    assert result.skipped == {"posts": 0, "comments": 0, "history": 0}
    assert len(result.posts) == 3


def test_parse_dump_skips_incomplete_rows_and_decodes_entities(tmp_path):
    comments = tmp_path / "Comments.xml"
    comments.write_text(
        '<?xml version="1.0"?><comments>'
        '<row PostId="1" UserId="2" CreationDate="2017-01-01T00:00:00" '
        'Text="a &amp;lt; b?" />'
        '<row PostId="1" CreationDate="2017-01-01T00:00:00" />'  # Text missing
        "</comments>")
    empty = tmp_path / "empty.xml"
    empty.write_text("<x></x>")
    result = parse_dump(empty, comments, empty)
    assert len(result.comments) == 1
    assert result.comments[0].text == "a &lt; b?"  # XML layer decoded once
    assert result.skipped["comments"] == 1


def test_parse_dump_malformed_xml_reports_byte_offset(tmp_path):
    bad = tmp_path / "Posts.xml"
    bad.write_text("<posts><row Id='1' </posts>")
    empty = tmp_path / "empty.xml"
    empty.write_text("<x></x>")
    with pytest.raises(DumpParseError, match="byte offset"):
        parse_dump(bad, empty, empty)


def test_parse_dump_question_without_title_is_skipped(tmp_path):
    posts = tmp_path / "Posts.xml"
    posts.write_text(
        '<posts><row Id="1" PostTypeId="1" CreationDate="2017-01-01T00:00:00" /></posts>')
    empty = tmp_path / "empty.xml"
    empty.write_text("<x></x>")
    result = parse_dump(posts, empty, empty)
    assert result.posts == []
    assert result.skipped["posts"] == 1


def test_parse_dump_tag_formats(tmp_path):
    posts = tmp_path / "Posts.xml"
    posts.write_text(
        '<posts>'
        '<row Id="1" PostTypeId="1" CreationDate="2017-01-01T00:00:00" Title="T" '
        'Tags="&lt;xml&gt;&lt;operating-system&gt;" />'
        '<row Id="2" PostTypeId="1" CreationDate="2017-01-01T00:00:00" Title="T" '
        'Tags="|xml|utf8|" />'
        "</posts>")
    empty = tmp_path / "empty.xml"
    empty.write_text("<x></x>")
    result = parse_dump(posts, empty, empty)
    assert result.posts[0].tags == ["xml", "operating-system"]
    assert result.posts[1].tags == ["xml", "utf8"]


# ---------------------------------------------------------------------------
# sentence splitting


def test_split_sentences_terminator_rule():
    assert split_sentences("One. Two! Three? trailing") == ["One.", "Two!", "Three?", "trailing"]
    # a terminator not followed by whitespace does not split
    assert split_sentences("a.b.c? d") == ["a.b.c?", "d"]


def test_question_sentences():
    assert question_sentences("What operating system? Please check.") == \
        ["What operating system?"]
    assert question_sentences("No questions here.") == []
    assert question_sentences("Trailing question?") == ["Trailing question?"]


# ---------------------------------------------------------------------------
# labeling heuristic


def test_unclear_via_owner_edit():
    q = post(1, owner=10)
    c = comment(1, 20, "What operating system?", ts(1))
    e = edit(1, 10, ts(2))
    candidates, discarded = label_questions([q], [c], [e])
    assert discarded == 0
    assert len(candidates) == 1
    assert candidates[0].label == UNCLEAR
    assert candidates[0].clarification_texts == ["What operating system?"]


def test_unclear_via_owner_comment():
    q = post(1, owner=10)
    cs = [comment(1, 20, "Which version do you run?", ts(1)),
          comment(1, 10, "Added the version, thanks.", ts(2))]
    candidates, _ = label_questions([q], cs, [])
    assert candidates[0].label == UNCLEAR


def test_clear_requires_accepted_answer_and_silence():
    assert label_questions([post(1, accepted=42)], [], [])[0][0].label == CLEAR
    # no accepted answer -> discarded
    candidates, discarded = label_questions([post(1)], [], [])
    assert candidates == [] and discarded == 1
    # an edit disqualifies clear
    candidates, discarded = label_questions([post(1, accepted=42)], [],
                                            [edit(1, 1, ts(1))])
    assert candidates == [] and discarded == 1


def test_owner_question_comment_is_discarded():
    q = post(1, owner=10, accepted=42)
    c = comment(1, 10, "Does anyone know?", ts(1))
    candidates, discarded = label_questions([q], [c], [])
    assert candidates == [] and discarded == 1


def test_no_owner_response_is_discarded():
    q = post(1, owner=10)
    c = comment(1, 20, "What hardware is this?", ts(1))
    candidates, discarded = label_questions([q], [c], [])
    assert candidates == [] and discarded == 1


def test_owner_response_must_be_after_first_clarification():
    q = post(1, owner=10)
    cs = [comment(1, 10, "Some early remark.", ts(0, day=1)),
          comment(1, 20, "What hardware is this?", ts(5))]
    candidates, discarded = label_questions([q], cs, [])
    assert candidates == [] and discarded == 1


def test_non_owner_edit_is_not_a_response():
    q = post(1, owner=10)
    c = comment(1, 20, "What hardware is this?", ts(1))
    e = edit(1, 99, ts(2))
    candidates, discarded = label_questions([q], [c], [e])
    assert candidates == [] and discarded == 1


def test_initial_revisions_do_not_disqualify_clear():
    q = post(1, accepted=42)
    history = [edit(1, 1, ts(0), kind="other")]
    candidates, _ = label_questions([q], [], history)
    assert candidates[0].label == CLEAR


def test_question_without_owner_is_discarded():
    q = post(1, owner=None)
    candidates, discarded = label_questions([q], [], [])
    assert candidates == [] and discarded == 1


def test_anonymous_comment_does_not_qualify():
    q = post(1, owner=10)
    c = comment(1, None, "What hardware is this?", ts(1))
    candidates, discarded = label_questions([q], [c], [])
    assert candidates == [] and discarded == 1


def test_every_question_gets_exactly_one_outcome():
    parsed = parse_dump(MINIDUMP / "Posts.xml", MINIDUMP / "Comments.xml",
                        MINIDUMP / "PostHistory.xml")
    candidates, discarded = label_questions(parsed.posts, parsed.comments, parsed.edits)
    n_questions = sum(1 for p in parsed.posts if p.post_type == "question")
    assert len(candidates) + discarded == n_questions
    assert len(candidates) <= n_questions
    for cand in candidates:
        if cand.label == CLEAR:
            assert cand.clarification_texts == []
        else:
            assert len(cand.clarification_texts) >= 1


# ---------------------------------------------------------------------------
# preprocessing


def test_preprocess_url_replacement():
    pre = preprocess("A", "<p>see https://x.y/z now!</p>", ["t"])
    assert pre.tokens == ["a", "see", "<url>", "now", "!", "t"]


def test_preprocess_lowercase_punct_token():
    assert preprocess("Hi?", "", []).tokens == ["hi", "?"]


def test_preprocess_pre_block_flag_and_filter():
    pre = preprocess("", "<pre>x=1</pre>", [])
    assert pre.contains_pre == 1
    assert pre.contains_quote == 0
    assert pre.tokens == ["x", "1"]


def test_preprocess_quote_flag():
    assert preprocess("", "<blockquote>quoted</blockquote>", []).contains_quote == 1


def test_preprocess_field_order_and_tags():
    pre = preprocess("Title Word", "<p>body</p>", ["operating-system", "c++"])
    assert pre.tokens == ["title", "word", "body", "operating-system", "c"]
    assert pre.title_tokens == ["title", "word"]
    assert pre.tag_tokens == ["operating-system", "c"]


def test_preprocess_apostrophe_stays_inside_token():
    assert preprocess("It's fine", "", []).tokens == ["it's", "fine"]


def test_preprocess_keeps_code_and_quote_contents():
    pre = preprocess("", "<blockquote>keep me</blockquote><code>x y</code>", [])
    assert pre.tokens == ["keep", "me", "x", "y"]


@given(st.text(alphabet=string.ascii_letters + string.digits + " .,;:!?'\"()-_<>/&",
               min_size=0, max_size=200))
@settings(max_examples=200, deadline=None)
def test_preprocess_idempotent_on_detokenized_output(text):
    first = tokenize(text)
    again = tokenize(" ".join(first))
    assert first == again


def test_empty_questions_are_dropped_with_count():
    cand = corpus.LabeledCandidate(post(1, title="...", body="", tags=[]), CLEAR, [])
    questions, empty = build_questions([cand])
    # "..." yields three period tokens, so this one survives; a truly empty one:
    cand2 = corpus.LabeledCandidate(post(2, title="%%%", body="", tags=[]), CLEAR, [])
    questions2, empty2 = build_questions([cand2])
    assert len(questions) == 1 and empty == 0
    assert questions2 == [] and empty2 == 1


# ---------------------------------------------------------------------------
# vocabulary


def _question_with(qid, tokens):
    return corpus.Question(id=qid, tokens=list(tokens), title_tokens=[],
                           tag_tokens=[], label=CLEAR, clarification_texts=[])


def test_vocabulary_min_df_boundary():
    questions = [_question_with(i, ["common", f"rare{i}"]) for i in range(3)]
    questions.append(_question_with(3, ["twice"]))
    questions.append(_question_with(4, ["twice"]))
    vocab = build_vocabulary(questions)
    assert "common" in vocab.term_ids       # df = 3
    assert "twice" not in vocab.term_ids    # df = 2
    assert vocab.id_of("twice") == corpus.UNK_ID
    assert vocab.id_of("common") > 0


def test_vocabulary_matches_brute_force_df_count():
    docs = [["a", "b", "c"], ["a", "b"], ["a", "b"], ["a", "d"], ["d", "e", "a"]]
    questions = [_question_with(i, toks) for i, toks in enumerate(docs)]
    brute = {}
    for toks in docs:
        for term in set(toks):
            brute[term] = brute.get(term, 0) + 1
    expected = {t for t, df in brute.items() if df >= 3}
    vocab = build_vocabulary(questions)
    assert set(vocab.term_ids) == expected
    assert vocab.doc_freq == {t: brute[t] for t in expected}


def test_vocabulary_empty_training_split_errors():
    with pytest.raises(ValueError):
        build_vocabulary([])


# ---------------------------------------------------------------------------
# splits


def test_split_sizes_100():
    split = split_corpus(list(range(100)), seed=7)
    assert len(split.test) == 20
    assert len(split.dev) == 16
    assert len(split.train) == 64


def test_split_deterministic():
    ids = list(range(50))
    assert split_corpus(ids, 3) == split_corpus(ids, 3)


def test_split_different_seeds_differ():
    ids = list(range(100))
    assert set(split_corpus(ids, 1).test) != set(split_corpus(ids, 2).test)


def test_split_requires_ten_questions():
    with pytest.raises(ValueError):
        split_corpus(list(range(9)), seed=0)


@given(st.integers(min_value=10, max_value=400), st.integers())
@settings(max_examples=50, deadline=None)
def test_split_partitions_the_corpus(n, seed):
    ids = list(range(n))
    split = split_corpus(ids, seed)
    parts = [set(split.train), set(split.dev), set(split.test)]
    assert parts[0] | parts[1] | parts[2] == set(ids)
    assert not (parts[0] & parts[1] or parts[0] & parts[2] or parts[1] & parts[2])
    assert len(split.test) == round(0.2 * n)
    assert len(split.dev) == round(0.2 * (n - len(split.test)))
