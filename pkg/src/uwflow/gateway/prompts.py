"""Prompt assembly: pure templating over versioned fixture text.

The few-shot exemplar is prepended verbatim and retrieved guideline chunks
are inlined. Wording lives in fixture files so golden tests can pin the
assembled output byte for byte.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from ..knowledge import GuidelineChunk
from ..submission import Submission


@lru_cache(maxsize=None)
def _fixture_text(name: str) -> str:
    return resources.files("uwflow.fixtures").joinpath(name).read_text("utf-8")


def render_submission(submission: Submission) -> str:
    lines = [
        f"submission_id: {submission.submission_id}",
        f"line_of_business: {submission.line_of_business}",
        f"tier: {submission.tier.value}",
    ]
    for key in sorted(submission.structured_fields):
        lines.append(f"{key}: {submission.structured_fields[key]}")
    for doc in submission.documents:
        lines.append(f"--- document {doc.doc_id} ({doc.doc_type}) ---")
        lines.append(doc.text)
    return "\n".join(lines)


def render_guidelines(chunks: list[GuidelineChunk]) -> str:
    parts = []
    for chunk in chunks:
        parts.append(f"[{chunk.chunk_id}] {chunk.section_label}\n{chunk.body}")
    return "\n\n".join(parts)


def assemble_agent_prompt(submission: Submission, chunks: list[GuidelineChunk]) -> str:
    template = _fixture_text("prompt_agent.txt")
    return template.format(
        exemplar=_fixture_text("exemplar_agent.txt"),
        guidelines=render_guidelines(chunks),
        submission=render_submission(submission),
    )


def assemble_critic_prompt(
    submission: Submission, chunks: list[GuidelineChunk], draft_json: str
) -> str:
    template = _fixture_text("prompt_critic.txt")
    return template.format(
        guidelines=render_guidelines(chunks),
        submission=render_submission(submission),
        draft=draft_json,
    )


def assemble_revision_prompt(
    submission: Submission,
    chunks: list[GuidelineChunk],
    draft_json: str,
    critique_json: str,
) -> str:
    template = _fixture_text("prompt_revision.txt")
    return template.format(
        guidelines=render_guidelines(chunks),
        submission=render_submission(submission),
        draft=draft_json,
        critique=critique_json,
    )


def assemble_chat_prompt(submission: Submission, draft_json: str, question: str) -> str:
    template = _fixture_text("prompt_chat.txt")
    return template.format(
        submission=render_submission(submission),
        draft=draft_json,
        question=question,
    )
