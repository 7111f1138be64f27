"""Read-only knowledge tools: guideline retrieval, citations, tool registry.

The registry admits only read-only tools (the mutability enum has a single
variant), every invocation is written to the audit ledger, and citation
resolution reproduces the exact quoted text or reports the mismatch.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from importlib import resources
from typing import Any, Callable, Protocol

from .submission import Submission

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


class ToolMutability(str, Enum):
    """Single-variant by design: a write tool is unrepresentable."""

    READ_ONLY = "read_only"


class DuplicateName(ValueError):
    pass


class UnknownTool(KeyError):
    pass


class EmptyStore(ValueError):
    pass


class ResolveError(Exception):
    """Base for citation resolution failures."""


class UnknownTarget(ResolveError):
    pass


class SpanOutOfRange(ResolveError):
    pass


class QuoteMismatch(ResolveError):
    """Cited span exists but its text differs from the quote: evidence of a
    fabricated citation."""

    def __init__(self, message: str, actual: str = "", quoted: str = ""):
        super().__init__(message)
        self.actual = actual
        self.quoted = quoted


class CitationKind(str, Enum):
    SUBMISSION_SPAN = "submission_span"
    GUIDELINE_CHUNK = "guideline_chunk"
    TOOL_RESULT = "tool_result"


@dataclass(frozen=True)
class Citation:
    """A pointer to evidence. Resolving it must reproduce ``quoted_text``."""

    kind: CitationKind
    target_id: str
    span: tuple[int, int] | None = None
    quoted_text: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "target_id": self.target_id,
            "span": list(self.span) if self.span is not None else None,
            "quoted_text": self.quoted_text,
        }


@dataclass(frozen=True)
class GuidelineChunk:
    """One pre-chunked section of the underwriting manual."""

    chunk_id: str
    section_label: str
    body: str

    @property
    def lexical_terms(self) -> frozenset[str]:
        return frozenset(tokenize(self.section_label)) | frozenset(tokenize(self.body))


class Scorer(Protocol):
    def score(self, query: str, chunk: GuidelineChunk) -> float: ...


class LexicalScorer:
    """Deterministic default: fraction of query terms present in the chunk."""

    def score(self, query: str, chunk: GuidelineChunk) -> float:
        terms = set(tokenize(query))
        if not terms:
            return 0.0
        return len(terms & chunk.lexical_terms) / len(terms)


class HashedEmbeddingScorer:
    """Embedding-style backend: cosine similarity of hashed bag-of-words
    vectors. Deterministic, dependency-free stand-in behind the same
    interface as any dense-vector scorer."""

    def __init__(self, dim: int = 128):
        self.dim = dim

    def _embed(self, text: str) -> list[float]:
        vec = [0.0] * self.dim
        for tok in tokenize(text):
            digest = hashlib.sha256(tok.encode("utf-8")).digest()
            slot = int.from_bytes(digest[:4], "big") % self.dim
            sign = 1.0 if digest[4] % 2 == 0 else -1.0
            vec[slot] += sign
        return vec

    def score(self, query: str, chunk: GuidelineChunk) -> float:
        q = self._embed(query)
        c = self._embed(chunk.section_label + " " + chunk.body)
        dot = sum(a * b for a, b in zip(q, c))
        nq = math.sqrt(sum(a * a for a in q))
        nc = math.sqrt(sum(a * a for a in c))
        if nq == 0 or nc == 0:
            return 0.0
        return dot / (nq * nc)


class RetrievalStore:
    """Immutable guideline corpus with a pluggable scoring backend."""

    def __init__(self, chunks: list[GuidelineChunk], scorer: Scorer | None = None):
        seen: set[str] = set()
        for chunk in chunks:
            if chunk.chunk_id in seen:
                raise DuplicateName(f"duplicate chunk_id {chunk.chunk_id!r}")
            if not chunk.section_label:
                raise ValueError(f"chunk {chunk.chunk_id!r} has an empty section_label")
            seen.add(chunk.chunk_id)
        self._chunks = tuple(chunks)
        self._by_id = {c.chunk_id: c for c in chunks}
        self.scorer: Scorer = scorer or LexicalScorer()

    def __len__(self) -> int:
        return len(self._chunks)

    @property
    def chunks(self) -> tuple[GuidelineChunk, ...]:
        return self._chunks

    def get(self, chunk_id: str) -> GuidelineChunk | None:
        return self._by_id.get(chunk_id)

    @classmethod
    def from_json(cls, payload: list[dict[str, Any]], scorer: Scorer | None = None) -> "RetrievalStore":
        chunks = [
            GuidelineChunk(str(e["chunk_id"]), str(e["section_label"]), str(e["body"]))
            for e in payload
        ]
        return cls(chunks, scorer=scorer)

    @classmethod
    def from_fixture(cls, scorer: Scorer | None = None) -> "RetrievalStore":
        """Load the synthetic guideline corpus shipped with the package."""
        raw = resources.files("uwflow.fixtures").joinpath("guideline_corpus.json").read_text("utf-8")
        return cls.from_json(json.loads(raw), scorer=scorer)


def retrieve_guidelines(
    query: str, store: RetrievalStore, k: int
) -> list[tuple[GuidelineChunk, float]]:
    """Top-k chunks by score, descending; ties broken by chunk_id ascending.

    ``k`` larger than the corpus returns every chunk, still ranked.
    """
    if len(store) == 0:
        raise EmptyStore("retrieval store holds no chunks")
    if k < 1:
        raise ValueError("k must be positive")
    scored = [(chunk, store.scorer.score(query, chunk)) for chunk in store.chunks]
    scored.sort(key=lambda pair: (-pair[1], pair[0].chunk_id))
    return scored[:k]


def resolve_citation(
    citation: Citation,
    submission: Submission | None,
    store: RetrievalStore | None,
    tool_results: dict[str, str] | None = None,
) -> str:
    """Return the exact text at the cited location.

    Raises:
        UnknownTarget: the cited document/chunk/tool result does not exist.
        SpanOutOfRange: byte offsets fall outside the target text.
        QuoteMismatch: the location exists but its text is not ``quoted_text``.
    """
    if citation.kind is CitationKind.SUBMISSION_SPAN:
        doc = submission.document(citation.target_id) if submission else None
        if doc is None:
            raise UnknownTarget(f"no document {citation.target_id!r} in submission")
        source = doc.text
    elif citation.kind is CitationKind.GUIDELINE_CHUNK:
        chunk = store.get(citation.target_id) if store else None
        if chunk is None:
            raise UnknownTarget(f"no guideline chunk {citation.target_id!r}")
        source = chunk.body
    else:
        if not tool_results or citation.target_id not in tool_results:
            raise UnknownTarget(f"no tool result {citation.target_id!r}")
        source = tool_results[citation.target_id]

    if citation.span is None:
        text = source
    else:
        start, end = citation.span
        raw = source.encode("utf-8")
        if start < 0 or end > len(raw) or start > end:
            raise SpanOutOfRange(
                f"span ({start}, {end}) outside target {citation.target_id!r}"
            )
        try:
            text = raw[start:end].decode("utf-8")
        except UnicodeDecodeError:
            raise SpanOutOfRange(
                f"span ({start}, {end}) splits a UTF-8 sequence in {citation.target_id!r}"
            ) from None
    if citation.quoted_text and text != citation.quoted_text:
        raise QuoteMismatch(
            f"quote does not match text at {citation.target_id!r}",
            actual=text,
            quoted=citation.quoted_text,
        )
    return text


@dataclass(frozen=True)
class ToolSpec:
    """Declaration of a registry tool. Mutability admits only READ_ONLY."""

    name: str
    description: str
    input_schema: dict[str, Any] = field(default_factory=dict)
    output_schema: dict[str, Any] = field(default_factory=dict)
    mutability: ToolMutability = ToolMutability.READ_ONLY


class ToolRegistry:
    """Registry of read-only tools. Invocations are auto-logged to the ledger.

    The public surface exposes registration, lookup, and invocation only;
    nothing here can mutate submissions, the guideline corpus, or any
    system of record.
    """

    def __init__(self, ledger=None):
        self._tools: dict[str, tuple[ToolSpec, Callable[[dict[str, Any]], Any]]] = {}
        self._ledger = ledger
        self._invocations = 0

    def register(self, spec: ToolSpec, impl: Callable[[dict[str, Any]], Any]) -> "ToolRegistry":
        if spec.name in self._tools:
            raise DuplicateName(f"tool {spec.name!r} already registered")
        self._tools[spec.name] = (spec, impl)
        if self._ledger is not None:
            self._ledger.append(
                "ToolCall",
                {
                    "action": "register",
                    "tool": spec.name,
                    "description": spec.description,
                    "mutability": spec.mutability.value,
                },
                case_id="system",
            )
        return self

    def names(self) -> list[str]:
        return sorted(self._tools)

    def spec(self, name: str) -> ToolSpec:
        if name not in self._tools:
            raise UnknownTool(name)
        return self._tools[name][0]

    def invoke(self, name: str, inputs: dict[str, Any], case_id: str = "system") -> tuple[Any, str]:
        """Run a tool; returns (result, invocation_id).

        The invocation id is citable as a ``tool_result`` citation target.
        """
        if name not in self._tools:
            raise UnknownTool(name)
        _, impl = self._tools[name]
        result = impl(inputs)
        self._invocations += 1
        invocation_id = f"tool:{name}:{self._invocations}"
        if self._ledger is not None:
            self._ledger.append(
                "ToolCall",
                {
                    "action": "invoke",
                    "tool": name,
                    "invocation_id": invocation_id,
                    "inputs": inputs,
                    "outputs": result,
                    "timestamp": datetime.now(timezone.utc).isoformat(),
                },
                case_id=case_id,
            )
        return result, invocation_id


def build_default_registry(store: RetrievalStore, ledger=None) -> ToolRegistry:
    """Registry with the stock fixture-backed tools.

    ``guideline_search`` wraps the retrieval store; ``location_risk`` and
    ``account_history`` are deterministic fixture stubs standing in for
    external read-only data providers.
    """
    registry = ToolRegistry(ledger)

    def guideline_search(inputs: dict[str, Any]) -> list[dict[str, Any]]:
        results = retrieve_guidelines(str(inputs["query"]), store, int(inputs.get("k", 3)))
        return [
            {"chunk_id": c.chunk_id, "section_label": c.section_label, "score": round(s, 6)}
            for c, s in results
        ]

    def location_risk(inputs: dict[str, Any]) -> dict[str, Any]:
        zone = str(inputs.get("postal_code", ""))[-1:]
        level = {"0": "low", "1": "low", "2": "moderate", "3": "moderate"}.get(zone, "standard")
        return {"postal_code": inputs.get("postal_code", ""), "hazard_level": level}

    def account_history(inputs: dict[str, Any]) -> dict[str, Any]:
        account = str(inputs.get("account_id", ""))
        claims = sum(ord(ch) for ch in account) % 3
        return {"account_id": account, "prior_claims": claims, "years_on_book": 3}

    registry.register(
        ToolSpec(
            "guideline_search",
            "Rank underwriting-manual sections against a query",
            {"query": "string", "k": "integer"},
            {"results": "array"},
        ),
        guideline_search,
    )
    registry.register(
        ToolSpec(
            "location_risk",
            "Fixture-backed location hazard lookup",
            {"postal_code": "string"},
            {"hazard_level": "string"},
        ),
        location_risk,
    )
    registry.register(
        ToolSpec(
            "account_history",
            "Fixture-backed prior-account lookup",
            {"account_id": "string"},
            {"prior_claims": "integer"},
        ),
        account_history,
    )
    return registry
