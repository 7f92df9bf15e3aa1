import json
from pathlib import Path

import pytest

from clarity.corpus import Question
from clarity.keyphrase import load_stopwords
from clarity.pipeline import PipelineConfig

FIXTURES = Path(__file__).parent / "fixtures"
MINIDUMP = FIXTURES / "minidump"


def make_question(qid, tokens, label=0, clarifications=(), title_tokens=None,
                  tag_tokens=None, **kwargs):
    return Question(
        id=qid,
        tokens=list(tokens),
        title_tokens=list(title_tokens if title_tokens is not None else tokens),
        tag_tokens=list(tag_tokens or []),
        label=label,
        clarification_texts=list(clarifications),
        **kwargs,
    )


@pytest.fixture(scope="session")
def stopwords():
    return load_stopwords()


@pytest.fixture
def minidump_config(tmp_path):
    return PipelineConfig(
        posts_xml=str(MINIDUMP / "Posts.xml"),
        comments_xml=str(MINIDUMP / "Comments.xml"),
        history_xml=str(MINIDUMP / "PostHistory.xml"),
        out_dir=str(tmp_path / "out"),
        name="minidump",
        seed=13,
        r_rounds=200,
    )


def write_config(config: PipelineConfig, path: Path) -> Path:
    path.write_text(json.dumps(config.to_dict(), indent=2), encoding="utf-8")
    return path
