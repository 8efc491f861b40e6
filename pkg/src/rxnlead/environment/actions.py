"""Action and action-space types for the reaction MDP.

An ActionSpace is an ordered candidate list: validated reactions first,
in proposer order, then the stop action. An empty candidate list marks
a dead end (no template matched), which ends the episode with the
current molecule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class ReactionAction:
    """One validated (template, building blocks) pair and its product.

    Building blocks and the product are stored as canonical SMILES so
    actions serialize cleanly into the cache.
    """

    template_id: str
    blocks: tuple[str, ...]
    product: str


@dataclass(frozen=True)
class StopAction:
    """Submit the current molecule for evaluation."""


STOP = StopAction()

Action = Union[ReactionAction, StopAction]


@dataclass(frozen=True)
class ActionSpace:
    candidates: tuple[Action, ...]

    def __post_init__(self) -> None:
        if not self.candidates:
            return
        *reactions, last = self.candidates
        if not isinstance(last, StopAction):
            raise ValueError("non-terminal action space must end with stop")
        if not all(isinstance(a, ReactionAction) for a in reactions):
            raise ValueError("reactions must precede the stop action")

    @property
    def is_terminal(self) -> bool:
        return not self.candidates

    @property
    def reactions(self) -> tuple[ReactionAction, ...]:
        return tuple(a for a in self.candidates
                     if isinstance(a, ReactionAction))

    def __len__(self) -> int:
        return len(self.candidates)
