"""Synthesis environment: actions, cache, proposers, transitions."""

from rxnlead.environment.actions import (
    STOP,
    Action,
    ActionSpace,
    ReactionAction,
    StopAction,
)
from rxnlead.environment.cache import ReactionCache
from rxnlead.environment.env import (
    EnvState,
    ReactionEnv,
    StepResult,
)
from rxnlead.environment.proposers import (
    HeuristicProposer,
    Proposal,
    ProposerRequest,
    ProposerResponse,
    RemoteProposer,
    TemplateDescriptor,
    objective_target,
    validate_response,
)

__all__ = [
    "STOP",
    "Action",
    "ActionSpace",
    "ReactionAction",
    "StopAction",
    "ReactionCache",
    "EnvState",
    "ReactionEnv",
    "StepResult",
    "HeuristicProposer",
    "Proposal",
    "ProposerRequest",
    "ProposerResponse",
    "RemoteProposer",
    "TemplateDescriptor",
    "objective_target",
    "validate_response",
]
