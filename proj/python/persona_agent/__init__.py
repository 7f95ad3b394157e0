"""Python bindings for the persona agent core."""

from ._persona import (
    ConfigError,
    Degenerate,
    DomainSyntaxError,
    InsufficientTrials,
    OutOfRange,
    ParseError,
    PersonaError,
    Session,
    SessionClosed,
    ValidationError,
    ZeroTotalVariance,
    build_generation_request,
    cronbach_alpha,
    describe_personality,
    generate_emotion_rule,
    mann_whitney_u,
    occurrence_matrix,
    plan,
    run_scripted,
    shipped_domain,
)

__all__ = [
    "ConfigError",
    "Degenerate",
    "DomainSyntaxError",
    "InsufficientTrials",
    "OutOfRange",
    "ParseError",
    "PersonaError",
    "Session",
    "SessionClosed",
    "ValidationError",
    "ZeroTotalVariance",
    "build_generation_request",
    "cronbach_alpha",
    "describe_personality",
    "generate_emotion_rule",
    "mann_whitney_u",
    "occurrence_matrix",
    "plan",
    "run_scripted",
    "shipped_domain",
]
