"""Group-relative policy optimization over the reaction environment.

Training samples groups of trajectories per lead molecule under a
frozen behavior snapshot, standardizes terminal rewards within each
group into advantages broadcast to every step, and updates the policy
with a clipped surrogate objective regularized by KL distance to a
reference policy plus an entropy bonus. Rewards are terminal-only and
episodes are undiscounted.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from rxnlead.environment.env import EnvState, ReactionEnv
from rxnlead.errors import BudgetExhaustedError, ConfigError, NonFiniteLossError
from rxnlead.molgraph import Molecule
from rxnlead.oracles import Oracle, OracleMeter, evaluate
from rxnlead.policy import (
    Featurizer,
    Policy,
    PolicyParams,
    grad_from_logit_grad,
    init_params,
    score_candidates,
)


@dataclass(frozen=True)
class GrpoConfig:
    """Training hyperparameters; defaults follow the benchmark recipe."""

    learning_rate: float = 1e-5
    clip_epsilon: float = 0.2
    kl_coef: float = 0.02
    entropy_coef: float = 0.01
    discount: float = 1.0
    group_size: int = 10
    molecules_per_batch: int = 30
    micro_batch_size: int = 20
    training_steps: int = 25
    ref_sync_interval: int = 50
    std_guard: float = 1e-8
    epochs: int = 1

    def __post_init__(self) -> None:
        if not 0.0 < self.clip_epsilon < 1.0:
            raise ConfigError("clip_epsilon must be in (0, 1)")
        if self.discount != 1.0:
            raise ConfigError("discount is fixed at 1.0 (episodic reward)")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if self.kl_coef < 0 or self.entropy_coef < 0:
            raise ConfigError("loss coefficients must be non-negative")
        if min(self.group_size, self.molecules_per_batch,
               self.micro_batch_size, self.ref_sync_interval,
               self.epochs) < 1:
            raise ConfigError("batch and interval sizes must be >= 1")
        if self.training_steps < 0:
            raise ConfigError("training_steps must be >= 0")
        if self.std_guard <= 0:
            raise ConfigError("std_guard must be positive")


@dataclass
class StepRecord:
    """One policy decision: features, mask, choice, behavior log-prob."""

    features: np.ndarray
    mask: np.ndarray
    slot: int
    behavior_logp: float
    advantage: float = 0.0


@dataclass
class Trajectory:
    steps: list[StepRecord]
    reward: float
    terminal_state: EnvState


@dataclass
class GroupRollout:
    lead_smiles: str
    trajectories: list[Trajectory]
    rewards: np.ndarray
    advantages: np.ndarray
    truncated: bool


def compute_advantages(rewards, std_guard: float = 1e-8) -> np.ndarray:
    """Group-standardized advantages: (r - mean) / max(pop std, guard).

    A zero-variance group yields exactly zero advantages.
    """
    r = np.asarray(rewards, dtype=float)
    if r.size == 0:
        return np.zeros(0)
    if np.all(r == r[0]):
        return np.zeros_like(r)
    return (r - r.mean()) / max(r.std(), std_guard)


def rollout_group(env: ReactionEnv, policy: Policy, lead: Molecule,
                  group_size: int, rng: np.random.Generator,
                  meter: OracleMeter, oracle: Oracle,
                  std_guard: float = 1e-8) -> GroupRollout:
    """Sample a group of trajectories from one lead; one terminal
    oracle call each. Budget exhaustion truncates the group."""
    trajectories: list[Trajectory] = []
    truncated = False
    for _ in range(group_size):
        steps: list[StepRecord] = []
        state = env.initial_state(lead)
        while True:
            space = env.action_space(state)
            if space.is_terminal:
                break
            slot, logp, X, mask = policy.sample(state, space, rng)
            steps.append(StepRecord(X, mask, slot, logp))
            result = env.step(state, space.candidates[slot], space)
            state = result.state
            if result.terminal:
                break
        try:
            reward = evaluate(meter, oracle, state.molecule)
        except BudgetExhaustedError:
            truncated = True
            break
        trajectories.append(Trajectory(steps, reward, state))
    rewards = np.array([t.reward for t in trajectories])
    advantages = compute_advantages(rewards, std_guard)
    for trajectory, advantage in zip(trajectories, advantages):
        for step in trajectory.steps:
            step.advantage = float(advantage)
    return GroupRollout(lead.canonical_smiles, trajectories, rewards,
                        advantages, truncated)


def grpo_loss(params: PolicyParams, ref_params: PolicyParams,
              records: list[StepRecord],
              config: GrpoConfig) -> tuple[float, np.ndarray, dict]:
    """Clipped-surrogate loss with KL and entropy terms, plus its
    analytic gradient and per-term diagnostics.

    The returned loss is the negated objective (for minimization),
    averaged over the given records.
    """
    if not records:
        raise ValueError("grpo_loss needs at least one record")
    n = len(records)
    grad = np.zeros(params.theta.size)
    loss = 0.0
    sums = {"surrogate": 0.0, "kl": 0.0, "entropy": 0.0, "ratio": 0.0}
    eps = config.clip_epsilon
    for i, rec in enumerate(records):
        Xv = rec.features[rec.mask]
        z = score_candidates(params, Xv)
        m = z.max()
        logp = z - (m + np.log(np.exp(z - m).sum()))
        p = np.exp(logp)
        zr = score_candidates(ref_params, Xv)
        mr = zr.max()
        logq = zr - (mr + np.log(np.exp(zr - mr).sum()))

        ci = int(rec.mask[:rec.slot].sum())
        with np.errstate(over="ignore"):
            ratio = np.exp(logp[ci] - rec.behavior_logp)
        advantage = rec.advantage
        unclipped = ratio * advantage
        clipped = np.clip(ratio, 1.0 - eps, 1.0 + eps) * advantage
        surrogate = min(unclipped, clipped)
        kl = float((p * (logp - logq)).sum())
        entropy = float(-(p * logp).sum())
        objective = (surrogate - config.kl_coef * kl
                     + config.entropy_coef * entropy)
        if not np.isfinite(objective):
            raise NonFiniteLossError(
                f"non-finite loss at record {i}: surrogate={surrogate}, "
                f"kl={kl}, entropy={entropy}")
        loss += -objective / n

        dz = np.zeros(len(Xv))
        if unclipped <= clipped:
            dlogp = -p.copy()
            dlogp[ci] += 1.0
            dz += unclipped * dlogp
        dz -= config.kl_coef * p * ((logp - logq) - kl)
        dz += config.entropy_coef * (-p * (logp + entropy))
        grad += grad_from_logit_grad(params, Xv, -dz / n)

        sums["surrogate"] += surrogate
        sums["kl"] += kl
        sums["entropy"] += entropy
        sums["ratio"] += float(ratio)
    if not np.all(np.isfinite(grad)):
        raise NonFiniteLossError("non-finite gradient over micro-batch")
    diag = {k: v / n for k, v in sums.items()}
    return loss, grad, diag


def accumulate_loss(params: PolicyParams, ref_params: PolicyParams,
                    records: list[StepRecord],
                    config: GrpoConfig) -> tuple[float, np.ndarray, dict]:
    """Full-batch loss/gradient via size-weighted micro-batch passes."""
    total = len(records)
    size = config.micro_batch_size
    loss = 0.0
    grad = np.zeros(params.theta.size)
    diag = {"surrogate": 0.0, "kl": 0.0, "entropy": 0.0, "ratio": 0.0}
    for start in range(0, total, size):
        chunk = records[start: start + size]
        weight = len(chunk) / total
        chunk_loss, chunk_grad, chunk_diag = grpo_loss(
            params, ref_params, chunk, config)
        loss += chunk_loss * weight
        grad += chunk_grad * weight
        for key in diag:
            diag[key] += chunk_diag[key] * weight
    return loss, grad, diag


def _batch_leads(leads: list[Molecule], batch_size: int,
                 rng: np.random.Generator) -> list[Molecule]:
    order = rng.permutation(len(leads))
    picks = [leads[i] for i in order]
    while len(picks) < batch_size:
        picks.extend(leads[i] for i in rng.permutation(len(leads)))
    return picks[:batch_size]


def train(env: ReactionEnv, featurizer: Featurizer, leads: list[Molecule],
          oracle: Oracle, meter: OracleMeter, config: GrpoConfig,
          rng: np.random.Generator, hidden: int = 0,
          initial: PolicyParams | None = None
          ) -> tuple[PolicyParams, list[dict]]:
    """Run the training loop; returns final parameters and step logs.

    Budget exhaustion stops training gracefully after the affected
    step. The first log entry echoes the configuration.
    """
    if not leads:
        raise ValueError("lead set must be non-empty")
    width = env.k_max + 1
    params = (initial if initial is not None
              else init_params(featurizer.dim, hidden, rng))
    ref = params
    logs: list[dict] = [{"event": "config", **asdict(config)}]
    for step in range(config.training_steps):
        theta_old = params
        behavior = Policy(featurizer, theta_old, width)
        groups: list[GroupRollout] = []
        exhausted = False
        for lead in _batch_leads(leads, config.molecules_per_batch, rng):
            if meter.remaining == 0:
                exhausted = True
                break
            group = rollout_group(env, behavior, lead, config.group_size,
                                  rng, meter, oracle, config.std_guard)
            groups.append(group)
            if group.truncated:
                exhausted = True
                break
        records = [s for g in groups
                   for t in g.trajectories for s in t.steps]
        rewards = np.concatenate([g.rewards for g in groups]) \
            if groups else np.zeros(0)
        entry = {
            "event": "step", "step": step,
            "trajectories": int(rewards.size),
            "mean_reward": float(rewards.mean()) if rewards.size else None,
            "records": len(records),
            "budget_used": meter.used,
            "cache_hits": env.cache.hits,
            "cache_misses": env.cache.misses,
            "ref_version": ref.version,
            "truncated": exhausted,
        }
        if records:
            for _ in range(config.epochs):
                loss, grad, diag = accumulate_loss(params, ref, records,
                                                   config)
                params = params.updated(
                    params.theta - config.learning_rate * grad)
            entry.update({"loss": float(loss), **diag})
        if (step + 1) % config.ref_sync_interval == 0:
            ref = params
        logs.append(entry)
        if exhausted:
            break
    return params, logs


def greedy_rollout(env: ReactionEnv, policy: Policy,
                   lead: Molecule) -> EnvState:
    """Deterministic rollout taking the argmax action at every step."""
    state = env.initial_state(lead)
    while True:
        space = env.action_space(state)
        if space.is_terminal:
            return state
        slot = policy.greedy(state, space)
        result = env.step(state, space.candidates[slot], space)
        state = result.state
        if result.terminal:
            return state


@dataclass
class EvalResult:
    lead_smiles: str
    terminal_state: EnvState
    score: float


def evaluate_policy(env: ReactionEnv, policy: Policy,
                    leads: list[Molecule], oracle: Oracle,
                    meter: OracleMeter) -> list[EvalResult]:
    """Greedy evaluation of each lead; stops early if the budget runs
    out, never exceeding the meter."""
    results: list[EvalResult] = []
    for lead in leads:
        terminal = greedy_rollout(env, policy, lead)
        try:
            score = evaluate(meter, oracle, terminal.molecule)
        except BudgetExhaustedError:
            break
        results.append(EvalResult(lead.canonical_smiles, terminal, score))
    return results
