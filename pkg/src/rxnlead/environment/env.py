"""Synthesis environment: states, action spaces and transitions.

States carry the current molecule, the step depth, and the pathway of
templated reactions taken so far. Action spaces come from the cache
when possible; a miss triggers template matching, a proposer call, and
execution validation of every proposal before the space is stored.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from rxnlead.chemtools import all_tool_reports
from rxnlead.environment.actions import (
    STOP,
    Action,
    ActionSpace,
    ReactionAction,
    StopAction,
)
from rxnlead.environment.cache import ReactionCache
from rxnlead.environment.proposers import ProposerRequest, TemplateDescriptor
from rxnlead.errors import InvalidActionError, RxnleadError
from rxnlead.molgraph import Molecule, mol_from_smiles
from rxnlead.reactions import (
    TemplateLibrary,
    apply_template,
    assemble_reactants,
    match_templates,
)

log = logging.getLogger("rxnlead.environment")

DEFAULT_T_MAX = 5
DEFAULT_K_MAX = 10

PathwayStep = tuple[str, tuple[str, ...], str]


@dataclass(frozen=True)
class EnvState:
    """One point in an optimization episode."""

    molecule: Molecule
    depth: int
    pathway: tuple[PathwayStep, ...]

    @property
    def smiles(self) -> str:
        return self.molecule.canonical_smiles


@dataclass(frozen=True)
class StepResult:
    state: EnvState
    terminal: bool


class ReactionEnv:
    """Template-grounded molecule editing environment.

    Episodes start from a lead molecule and apply up to t_max reaction
    actions; Stop (or an empty action space) ends the episode. The
    oracle is never consulted here; reward evaluation happens outside,
    on terminal molecules only.
    """

    def __init__(self, library: TemplateLibrary, proposer, objective: str,
                 task_id: str, cache: ReactionCache,
                 k_max: int = DEFAULT_K_MAX,
                 t_max: int = DEFAULT_T_MAX) -> None:
        self.library = library
        self.proposer = proposer
        self.objective = objective
        self.task_id = task_id
        self.cache = cache
        self.k_max = k_max
        self.t_max = t_max
        self.proposer_calls = 0

    def initial_state(self, lead: Molecule) -> EnvState:
        return EnvState(lead, 0, ())

    def action_space(self, state: EnvState) -> ActionSpace:
        """Candidate actions for a state, cached by canonical SMILES."""
        cached = self.cache.lookup(state.smiles)
        if cached is not None:
            return cached
        space = self._build_space(state.molecule)
        return self.cache.store(state.smiles, space)

    def _build_space(self, mol: Molecule) -> ActionSpace:
        matched = match_templates(mol, self.library)
        if not matched:
            return ActionSpace(())
        request = ProposerRequest(
            task_id=self.task_id,
            smiles=mol.canonical_smiles,
            objective=self.objective,
            templates=tuple(
                TemplateDescriptor.from_template(t) for t in matched),
            tools=all_tool_reports(mol),
        )
        self.proposer_calls += 1
        response = self.proposer.propose(request)

        by_id = {t.id: t for t in matched}
        actions: list[ReactionAction] = []
        seen_products: set[str] = set()
        for proposal in response.proposals:
            if len(actions) == self.k_max:
                break
            template = by_id.get(proposal.template_id)
            if template is None:
                log.info("proposal dropped: template %r not matched",
                         proposal.template_id)
                continue
            try:
                blocks = [mol_from_smiles(b) for b in proposal.blocks]
            except RxnleadError as exc:
                log.info("proposal dropped (%s): bad block (%s)",
                         proposal.template_id, exc)
                continue
            reactants = assemble_reactants(template, mol, blocks)
            if reactants is None:
                log.info("proposal dropped (%s): molecule does not fit "
                         "any open slot", proposal.template_id)
                continue
            try:
                product = apply_template(template, reactants)
            except RxnleadError as exc:
                log.info("proposal dropped (%s): template failed (%s)",
                         proposal.template_id, exc)
                continue
            psmiles = product.canonical_smiles
            if psmiles in seen_products:
                continue
            seen_products.add(psmiles)
            actions.append(ReactionAction(
                template_id=template.id,
                blocks=proposal.blocks,
                product=psmiles,
            ))
        return ActionSpace(tuple(actions) + (STOP,))

    def step(self, state: EnvState, action: Action,
             space: ActionSpace | None = None) -> StepResult:
        """Apply one action; terminal when stopping or at depth t_max.

        Raises:
            InvalidActionError: action is not in the state's space.
        """
        if space is None:
            space = self.action_space(state)
        if action not in space.candidates:
            raise InvalidActionError(
                f"action {action!r} not available at {state.smiles}")
        if isinstance(action, StopAction):
            return StepResult(state, True)
        nxt = EnvState(
            molecule=mol_from_smiles(action.product),
            depth=state.depth + 1,
            pathway=state.pathway + (
                (action.template_id, action.blocks, action.product),),
        )
        return StepResult(nxt, nxt.depth >= self.t_max)
