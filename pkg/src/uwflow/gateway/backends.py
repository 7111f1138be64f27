"""Agent and critic backends plus the gateway operations that call them.

Two backends ship: a deterministic fixture-replay backend for tests and
simulation, and a thin JSON-over-HTTP adapter for a remote model service.
Role separation is enforced at construction and again at call time: a
critic-role backend can never serve a draft request.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from typing import Any, Callable, Protocol

from ..knowledge import GuidelineChunk
from ..submission import Submission
from . import prompts
from .schema import (
    CritiqueReport,
    DraftDecision,
    REQUIRED_REASONING_LABELS,
    SchemaViolation,
    Verdict,
    validate_critique,
    validate_output,
)


class BackendRole(str, Enum):
    AGENT = "agent"
    CRITIC = "critic"


class BackendUnavailable(RuntimeError):
    """Backend could not produce output at all (network, process, fixture)."""


class NonConvergent(RuntimeError):
    """Output failed schema validation on every allowed attempt."""

    def __init__(self, message: str, violations: list[SchemaViolation]):
        super().__init__(message)
        self.violations = violations


class RoleMismatch(TypeError):
    """A backend was wired into an operation reserved for the other role."""


_DEFAULT_TEMPERATURES = {BackendRole.AGENT: 0.2, BackendRole.CRITIC: 0.0}


@dataclass(frozen=True)
class BackendConfig:
    role: BackendRole
    temperature: float | None = None
    endpoint: str | None = None
    model_name: str = "scripted"
    max_context_tokens: int = 100_000

    def __post_init__(self):
        if self.temperature is None:
            object.__setattr__(self, "temperature", _DEFAULT_TEMPERATURES[self.role])
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")
        if self.max_context_tokens < 1:
            raise ValueError("max_context_tokens must be positive")


@dataclass(frozen=True)
class BackendResponse:
    text: str
    input_tokens: int
    output_tokens: int


class Backend(Protocol):
    config: BackendConfig

    def complete(self, prompt: str, max_tokens: int = 4096) -> BackendResponse: ...


# Callback invoked once per generation attempt: (attempt number starting at 1,
# parse error or None, raw backend response).
AttemptHook = Callable[[int, SchemaViolation | None, BackendResponse], None]

_SCENARIO_RE = re.compile(r"^scenario: (\S+)$", re.MULTILINE)


class FixtureBackend:
    """Deterministic replay backend keyed by the scenario id embedded in the
    submission's structured fields (and therefore in the prompt).

    Identical (fixture, seed) pairs produce byte-identical outputs; the seed
    exists only to satisfy the backend construction contract.
    """

    def __init__(self, config: BackendConfig, scenarios: dict[str, Any] | None = None,
                 seed: int = 0):
        self.config = config
        self.seed = seed
        if scenarios is None:
            raw = resources.files("uwflow.fixtures").joinpath("gateway_scenarios.json").read_text("utf-8")
            scenarios = json.loads(raw)
        self._scenarios = scenarios
        self._calls: dict[tuple[str, str], int] = {}

    def _scenario_id(self, prompt: str) -> str:
        match = _SCENARIO_RE.search(prompt)
        return match.group(1) if match else "clean-renewal"

    def _kind(self, prompt: str) -> str:
        if "Underwriter question:" in prompt:
            return "chat"
        if "Internal critique:" in prompt:
            return "revision"
        if self.config.role is BackendRole.CRITIC:
            return "critique"
        return "draft"

    def complete(self, prompt: str, max_tokens: int = 4096) -> BackendResponse:
        scenario_id = self._scenario_id(prompt)
        scenario = self._scenarios.get(scenario_id)
        if scenario is None:
            raise BackendUnavailable(f"no fixture scenario {scenario_id!r}")
        kind = self._kind(prompt)
        key = (scenario_id, kind)
        call_no = self._calls.get(key, 0)
        self._calls[key] = call_no + 1

        attempts_key = f"{kind}_attempts"
        if attempts_key in scenario:
            attempts = scenario[attempts_key]
            payload = attempts[min(call_no, len(attempts) - 1)]
        elif kind in scenario:
            payload = scenario[kind]
        elif kind == "chat":
            payload = "The recommendation rests on the cited submission spans and guideline sections listed in the draft."
        else:
            raise BackendUnavailable(f"scenario {scenario_id!r} has no {kind!r} output")

        text = payload if isinstance(payload, str) else json.dumps(payload, sort_keys=True)
        return BackendResponse(
            text=text,
            input_tokens=len(prompt) // 4,
            output_tokens=len(text) // 4,
        )


class RemoteBackend:
    """JSON-over-HTTP adapter: {role, prompt, temperature, max_tokens} in,
    {text, input_tokens, output_tokens} out. No streaming."""

    def __init__(self, config: BackendConfig, credential_env: str | None = None,
                 timeout: float = 60.0):
        if not config.endpoint:
            raise ValueError("remote backend requires an endpoint")
        self.config = config
        self.credential_env = credential_env
        self.timeout = timeout

    def complete(self, prompt: str, max_tokens: int = 4096) -> BackendResponse:
        import httpx

        headers = {}
        if self.credential_env:
            token = os.environ.get(self.credential_env, "")
            if token:
                headers["Authorization"] = f"Bearer {token}"
        try:
            response = httpx.post(
                self.config.endpoint,
                json={
                    "role": self.config.role.value,
                    "prompt": prompt,
                    "temperature": self.config.temperature,
                    "max_tokens": max_tokens,
                },
                headers=headers,
                timeout=self.timeout,
            )
            response.raise_for_status()
            body = response.json()
            return BackendResponse(
                text=str(body["text"]),
                input_tokens=int(body.get("input_tokens", 0)),
                output_tokens=int(body.get("output_tokens", 0)),
            )
        except Exception as exc:
            raise BackendUnavailable(f"remote backend failed: {exc}") from exc


def _generate(backend: Backend, prompt: str, parse: Callable[[str], Any],
              on_attempt: AttemptHook | None, retries: int = 1) -> Any:
    """Run one generation with up to ``retries`` re-asks on schema failure."""
    violations: list[SchemaViolation] = []
    for attempt in range(1, retries + 2):
        response = backend.complete(prompt)
        try:
            result = parse(response.text)
        except SchemaViolation as exc:
            violations.append(exc)
            if on_attempt:
                on_attempt(attempt, exc, response)
            continue
        if on_attempt:
            on_attempt(attempt, None, response)
        return result
    raise NonConvergent(
        f"output failed validation on {len(violations)} attempts", violations
    )


def _require_role(backend: Backend, role: BackendRole, op: str) -> None:
    if backend.config.role is not role:
        raise RoleMismatch(f"{op} requires a {role.value}-role backend, got {backend.config.role.value}")


def generate_draft(
    submission: Submission,
    retrieved_guidelines: list[GuidelineChunk],
    backend: Backend,
    on_attempt: AttemptHook | None = None,
) -> DraftDecision:
    """Produce a schema-valid draft whose reasoning chain carries the three
    labeled steps (risk factor extraction, guideline compliance check,
    preliminary premium computation)."""
    _require_role(backend, BackendRole.AGENT, "generate_draft")
    prompt = prompts.assemble_agent_prompt(submission, retrieved_guidelines)

    def parse(text: str) -> DraftDecision:
        result = validate_output(text)
        if not isinstance(result, DraftDecision):
            raise SchemaViolation("WrongShape", "agent returned a critique, not a draft")
        labels = {step.label for step in result.reasoning_chain}
        missing = [lbl for lbl in REQUIRED_REASONING_LABELS if lbl not in labels]
        if missing:
            raise SchemaViolation(
                "MissingReasoningSteps", f"reasoning_chain lacks labeled steps: {missing}"
            )
        return result

    return _generate(backend, prompt, parse, on_attempt)


def generate_critique(
    draft: DraftDecision,
    submission: Submission,
    retrieved_guidelines: list[GuidelineChunk],
    backend: Backend,
    on_attempt: AttemptHook | None = None,
) -> CritiqueReport:
    """Critique a schema-valid draft; every flag must target a claim or
    reasoning step present in that draft."""
    _require_role(backend, BackendRole.CRITIC, "generate_critique")
    prompt = prompts.assemble_critic_prompt(submission, retrieved_guidelines, draft.to_json())

    def parse(text: str) -> CritiqueReport:
        result = validate_output(text)
        if not isinstance(result, CritiqueReport):
            raise SchemaViolation("WrongShape", "critic returned a draft, not a critique")
        return validate_critique(result.to_dict(), draft=draft)

    return _generate(backend, prompt, parse, on_attempt)


def revise_draft(
    draft: DraftDecision,
    critique: CritiqueReport,
    submission: Submission,
    retrieved_guidelines: list[GuidelineChunk],
    backend: Backend,
    on_attempt: AttemptHook | None = None,
) -> DraftDecision:
    """Revise a draft against a critique with issues found."""
    if critique.verdict is not Verdict.ISSUES_FOUND:
        raise ValueError("revise_draft requires a critique with issues found")
    _require_role(backend, BackendRole.AGENT, "revise_draft")
    prompt = prompts.assemble_revision_prompt(
        submission, retrieved_guidelines, draft.to_json(), critique.to_json()
    )

    def parse(text: str) -> DraftDecision:
        result = validate_output(text)
        if not isinstance(result, DraftDecision):
            raise SchemaViolation("WrongShape", "agent returned a critique, not a draft")
        return result

    return _generate(backend, prompt, parse, on_attempt)


class AgentGateway:
    """Pairs an agent backend with a critic backend, enforcing role fit at
    construction so the wrong role cannot reach the wrong operation."""

    def __init__(self, agent_backend: Backend, critic_backend: Backend):
        _require_role(agent_backend, BackendRole.AGENT, "AgentGateway(agent_backend=...)")
        _require_role(critic_backend, BackendRole.CRITIC, "AgentGateway(critic_backend=...)")
        self.agent_backend = agent_backend
        self.critic_backend = critic_backend

    def generate_draft(self, submission, retrieved_guidelines, on_attempt=None) -> DraftDecision:
        return generate_draft(submission, retrieved_guidelines, self.agent_backend, on_attempt)

    def generate_critique(self, draft, submission, retrieved_guidelines, on_attempt=None) -> CritiqueReport:
        return generate_critique(draft, submission, retrieved_guidelines, self.critic_backend, on_attempt)

    def revise_draft(self, draft, critique, submission, retrieved_guidelines, on_attempt=None) -> DraftDecision:
        return revise_draft(draft, critique, submission, retrieved_guidelines, self.agent_backend, on_attempt)

    def chat(self, submission: Submission, draft_json: str, question: str) -> BackendResponse:
        prompt = prompts.assemble_chat_prompt(submission, draft_json, question)
        return self.agent_backend.complete(prompt)


def fixture_gateway(scenarios: dict[str, Any] | None = None, seed: int = 0) -> AgentGateway:
    """Gateway over the shipped scenario fixtures for both roles."""
    return AgentGateway(
        FixtureBackend(BackendConfig(role=BackendRole.AGENT), scenarios, seed),
        FixtureBackend(BackendConfig(role=BackendRole.CRITIC), scenarios, seed),
    )
