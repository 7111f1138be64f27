"""Uniform interface to the primary agent and critic agent."""

from .schema import (
    BindingActionField,
    CritiqueFlag,
    CritiqueReport,
    DraftDecision,
    FlagCategory,
    FlagSeverity,
    ReasoningStep,
    Recommendation,
    SchemaViolation,
    SupportedClaim,
    Verdict,
    critique_report_json_schema,
    draft_decision_json_schema,
    validate_critique,
    validate_draft,
    validate_output,
)
from .backends import (
    AgentGateway,
    Backend,
    BackendConfig,
    BackendResponse,
    BackendRole,
    BackendUnavailable,
    FixtureBackend,
    NonConvergent,
    RemoteBackend,
    RoleMismatch,
    fixture_gateway,
    generate_critique,
    generate_draft,
    revise_draft,
)
from .prompts import assemble_agent_prompt, assemble_chat_prompt, assemble_critic_prompt

__all__ = [
    "AgentGateway",
    "Backend",
    "BackendConfig",
    "BackendResponse",
    "BackendRole",
    "BackendUnavailable",
    "BindingActionField",
    "CritiqueFlag",
    "CritiqueReport",
    "DraftDecision",
    "FixtureBackend",
    "FlagCategory",
    "FlagSeverity",
    "NonConvergent",
    "ReasoningStep",
    "Recommendation",
    "RemoteBackend",
    "RoleMismatch",
    "SchemaViolation",
    "SupportedClaim",
    "Verdict",
    "assemble_agent_prompt",
    "assemble_chat_prompt",
    "assemble_critic_prompt",
    "critique_report_json_schema",
    "draft_decision_json_schema",
    "fixture_gateway",
    "generate_critique",
    "generate_draft",
    "revise_draft",
    "validate_critique",
    "validate_draft",
    "validate_output",
]
