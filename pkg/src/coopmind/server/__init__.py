"""Realtime cooperative game service and the scripted proxy client."""

from .proxy import ProxyResult, layout_from_wire, run_proxy_session, state_from_wire
from .service import ServerConfig, SessionStore, create_app, validate_episode_log
from .session import (
    AGENT_STYLES,
    DEFAULT_LAYOUT_ORDER,
    DuplicateParticipantError,
    EpisodeLog,
    EpisodeOverError,
    GROUP_NONE,
    GROUP_RANDOM,
    GROUP_TOM,
    GROUPS,
    GameSession,
    InvalidActionError,
    OutOfRangeAnswerError,
    QUESTIONNAIRE_ITEMS,
    SessionConfig,
    SessionError,
    UnknownEpisodeError,
    UnknownSessionError,
    WrongPhaseError,
    build_episode_plan,
    default_agent_policy,
)

__all__ = [
    "AGENT_STYLES",
    "DEFAULT_LAYOUT_ORDER",
    "DuplicateParticipantError",
    "EpisodeLog",
    "EpisodeOverError",
    "GROUPS",
    "GROUP_NONE",
    "GROUP_RANDOM",
    "GROUP_TOM",
    "GameSession",
    "InvalidActionError",
    "OutOfRangeAnswerError",
    "ProxyResult",
    "QUESTIONNAIRE_ITEMS",
    "ServerConfig",
    "SessionConfig",
    "SessionError",
    "SessionStore",
    "UnknownEpisodeError",
    "UnknownSessionError",
    "WrongPhaseError",
    "build_episode_plan",
    "create_app",
    "default_agent_policy",
    "layout_from_wire",
    "run_proxy_session",
    "state_from_wire",
    "validate_episode_log",
]
