"""Unclear-question detection for community Q&A sites.

Builds labeled clear/unclear corpora from data dumps, retrieves similar
questions with BM25, derives clarity features from their clarification
questions, trains classifiers, and serves live verdicts with hints.
"""

__version__ = "0.1.0"
