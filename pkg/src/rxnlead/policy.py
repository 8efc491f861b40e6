"""Trainable action scorer: featurization, masked softmax, gradients.

Each candidate action is mapped to a fixed-length feature vector and
scored by a shared-weight model (linear by default, optionally one
tanh hidden layer). Scores fill a fixed number of slots; unfilled
slots are masked to exactly zero probability and contribute exactly
zero gradient. Scoring depends only on candidate content, never on
slot position, so the distribution is permutation-equivariant.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace

import numpy as np

from rxnlead.chemtools import site_counts
from rxnlead.environment.actions import Action, ActionSpace, StopAction
from rxnlead.environment.env import EnvState
from rxnlead.environment.proposers import objective_target
from rxnlead.errors import CheckpointMismatchError
from rxnlead.fingerprints import Fingerprint, morgan_fingerprint, tanimoto
from rxnlead.molgraph import Molecule, mol_from_smiles

DEFAULT_FP_BLOCK = 32
DEFAULT_TID_BLOCK = 16
N_SITE_KINDS = 5
WEIGHT_SCALE = 100.0


def _stable_bucket(text: str, width: int) -> int:
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "big") % width


@dataclass
class _MolDescriptors:
    weight: float
    ring_count: int
    aromatic_count: int
    sites: tuple[int, ...]
    fingerprint: Fingerprint


class Featurizer:
    """Maps (state, action) pairs to fixed-length feature vectors.

    Layout: hashed product-fingerprint block | delta descriptors
    (weight, ring count, aromatic rings, five site kinds, similarity
    to the objective target when one is named) | hashed template-id
    block | stop indicator. Stop actions carry all-zero chemistry
    blocks and indicator 1. Vectors depend only on the state molecule,
    the action contents, and the objective.
    """

    def __init__(self, objective: str = "",
                 fp_block: int = DEFAULT_FP_BLOCK,
                 tid_block: int = DEFAULT_TID_BLOCK) -> None:
        self.objective = objective
        self.fp_block = fp_block
        self.tid_block = tid_block
        self.target = objective_target(objective)
        self._target_fp = (morgan_fingerprint(self.target)
                           if self.target is not None else None)
        self._descriptors: dict[str, _MolDescriptors] = {}
        self._action_memo: dict[tuple[str, str], np.ndarray] = {}

    @property
    def dim(self) -> int:
        # fp block + (weight, rings, aromatic, 5 sites, similarity)
        # + template block + stop indicator
        return self.fp_block + 4 + N_SITE_KINDS + self.tid_block + 1

    def _describe(self, smiles: str) -> _MolDescriptors:
        desc = self._descriptors.get(smiles)
        if desc is None:
            mol = mol_from_smiles(smiles)
            desc = _MolDescriptors(
                weight=mol.molecular_weight,
                ring_count=mol.ring_info.count,
                aromatic_count=mol.ring_info.aromatic_count,
                sites=site_counts(mol),
                fingerprint=morgan_fingerprint(mol),
            )
            self._descriptors[smiles] = desc
        return desc

    def action_features(self, state_mol: Molecule, action: Action) -> np.ndarray:
        """Feature vector for one candidate; read-only and memoized."""
        state_smiles = state_mol.canonical_smiles
        if isinstance(action, StopAction):
            key = (state_smiles, "")
        else:
            key = (state_smiles, action.template_id + "|" + action.product)
        vec = self._action_memo.get(key)
        if vec is not None:
            return vec

        vec = np.zeros(self.dim)
        if isinstance(action, StopAction):
            vec[-1] = 1.0
        else:
            state = self._describe(state_smiles)
            product = self._describe(action.product)
            for bit in product.fingerprint.bits:
                vec[bit % self.fp_block] = 1.0
            base = self.fp_block
            vec[base] = (product.weight - state.weight) / WEIGHT_SCALE
            vec[base + 1] = product.ring_count - state.ring_count
            vec[base + 2] = product.aromatic_count - state.aromatic_count
            for i in range(N_SITE_KINDS):
                vec[base + 3 + i] = product.sites[i] - state.sites[i]
            if self._target_fp is not None:
                vec[base + 3 + N_SITE_KINDS] = (
                    tanimoto(product.fingerprint, self._target_fp)
                    - tanimoto(state.fingerprint, self._target_fp))
            tid_base = base + 4 + N_SITE_KINDS
            vec[tid_base + _stable_bucket(action.template_id,
                                          self.tid_block)] = 1.0
        vec.setflags(write=False)
        self._action_memo[key] = vec
        return vec

    def space_features(self, state: EnvState, space: ActionSpace,
                       width: int) -> tuple[np.ndarray, np.ndarray]:
        """Feature matrix and validity mask padded to a fixed slot count."""
        n = len(space)
        if n > width:
            raise ValueError(
                f"action space has {n} candidates but only {width} slots")
        X = np.zeros((width, self.dim))
        for i, action in enumerate(space.candidates):
            X[i] = self.action_features(state.molecule, action)
        mask = np.zeros(width, dtype=bool)
        mask[:n] = True
        return X, mask


# --- parameters ---

def param_count(feature_dim: int, hidden: int) -> int:
    if hidden == 0:
        return feature_dim + 1
    return hidden * feature_dim + hidden + hidden + 1


@dataclass(frozen=True)
class PolicyParams:
    """Flat parameter vector plus the architecture that interprets it."""

    feature_dim: int
    hidden: int
    theta: np.ndarray
    version: int = 0

    def __post_init__(self) -> None:
        expected = param_count(self.feature_dim, self.hidden)
        if self.theta.shape != (expected,):
            raise ValueError(
                f"theta has shape {self.theta.shape}, "
                f"expected ({expected},)")
        if not np.all(np.isfinite(self.theta)):
            raise ValueError("policy parameters must be finite")
        self.theta.setflags(write=False)

    def updated(self, new_theta: np.ndarray) -> "PolicyParams":
        return replace(self, theta=new_theta.copy(),
                       version=self.version + 1)


def init_params(feature_dim: int, hidden: int = 0,
                rng: np.random.Generator | None = None,
                scale: float = 0.01) -> PolicyParams:
    n = param_count(feature_dim, hidden)
    if rng is None:
        theta = np.zeros(n)
    else:
        theta = rng.normal(0.0, scale, size=n)
    return PolicyParams(feature_dim, hidden, theta)


def _unpack(params: PolicyParams):
    d, h, t = params.feature_dim, params.hidden, params.theta
    if h == 0:
        return t[:d], t[d]
    w1 = t[: h * d].reshape(h, d)
    b1 = t[h * d: h * d + h]
    w2 = t[h * d + h: h * d + 2 * h]
    b2 = t[-1]
    return w1, b1, w2, b2


def score_candidates(params: PolicyParams, X: np.ndarray) -> np.ndarray:
    """Per-candidate logits for the rows of X."""
    if params.hidden == 0:
        w, b = _unpack(params)
        return X @ w + b
    w1, b1, w2, b2 = _unpack(params)
    return np.tanh(X @ w1.T + b1) @ w2 + b2


def grad_from_logit_grad(params: PolicyParams, X: np.ndarray,
                         dz: np.ndarray) -> np.ndarray:
    """d(loss)/d(theta) given d(loss)/d(logit) per candidate row."""
    if params.hidden == 0:
        return np.concatenate([X.T @ dz, [dz.sum()]])
    w1, b1, w2, _ = _unpack(params)
    hpre = X @ w1.T + b1
    h = np.tanh(hpre)
    dh = np.outer(dz, w2) * (1.0 - h * h)
    return np.concatenate([
        (dh.T @ X).ravel(), dh.sum(axis=0), h.T @ dz, [dz.sum()]])


# --- masked distribution ---

@dataclass(frozen=True)
class SlotDistribution:
    """Probabilities over fixed slots; masked slots are exactly zero."""

    probs: np.ndarray
    log_probs: np.ndarray  # -inf on masked slots
    mask: np.ndarray

    def log_prob(self, slot: int) -> float:
        return float(self.log_probs[slot])

    @property
    def n_valid(self) -> int:
        return int(self.mask.sum())


def masked_log_softmax(logits: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Log-probabilities over valid slots; -inf elsewhere."""
    z = logits[mask]
    m = z.max()
    logsum = m + np.log(np.exp(z - m).sum())
    out = np.full(logits.shape, -np.inf)
    out[mask] = z - logsum
    return out


def action_distribution(params: PolicyParams, X: np.ndarray,
                        mask: np.ndarray) -> SlotDistribution:
    logits = np.zeros(mask.shape)
    logits[mask] = score_candidates(params, X[mask])
    log_probs = masked_log_softmax(logits, mask)
    probs = np.zeros(mask.shape)
    probs[mask] = np.exp(log_probs[mask])
    return SlotDistribution(probs, log_probs, mask)


def sample_slot(dist: SlotDistribution,
                rng: np.random.Generator) -> tuple[int, float]:
    """Categorical draw; returns (slot, log-probability)."""
    slot = int(rng.choice(dist.probs.shape[0], p=dist.probs))
    return slot, dist.log_prob(slot)


def greedy_slot(dist: SlotDistribution) -> int:
    """Highest-probability slot; ties break toward the lower slot."""
    return int(np.argmax(dist.probs))


def log_prob_grad(params: PolicyParams, X: np.ndarray, mask: np.ndarray,
                  slot: int) -> np.ndarray:
    """Analytic gradient of log pi(slot) w.r.t. the flat parameters."""
    if not mask[slot]:
        raise ValueError(f"slot {slot} is masked")
    dist = action_distribution(params, X, mask)
    dz = -dist.probs[mask]
    valid_index = int(mask[:slot].sum())
    dz[valid_index] += 1.0
    return grad_from_logit_grad(params, X[mask], dz)


# --- policy facade ---

class Policy:
    """Featurizer + parameters bound to a fixed slot width."""

    def __init__(self, featurizer: Featurizer, params: PolicyParams,
                 width: int) -> None:
        if params.feature_dim != featurizer.dim:
            raise ValueError(
                f"params expect {params.feature_dim} features, "
                f"featurizer produces {featurizer.dim}")
        self.featurizer = featurizer
        self.params = params
        self.width = width

    def features(self, state: EnvState,
                 space: ActionSpace) -> tuple[np.ndarray, np.ndarray]:
        return self.featurizer.space_features(state, space, self.width)

    def distribution(self, state: EnvState,
                     space: ActionSpace) -> SlotDistribution:
        X, mask = self.features(state, space)
        return action_distribution(self.params, X, mask)

    def sample(self, state: EnvState, space: ActionSpace,
               rng: np.random.Generator):
        """Returns (slot, log-prob, features, mask) for one draw."""
        X, mask = self.features(state, space)
        dist = action_distribution(self.params, X, mask)
        slot, logp = sample_slot(dist, rng)
        return slot, logp, X, mask

    def greedy(self, state: EnvState, space: ActionSpace) -> int:
        return greedy_slot(self.distribution(state, space))


# --- checkpoints ---

def save_checkpoint(path, params: PolicyParams) -> None:
    """Versioned binary checkpoint with a dimensions header."""
    np.savez(path,
             theta=params.theta,
             feature_dim=np.array(params.feature_dim),
             hidden=np.array(params.hidden),
             version=np.array(params.version))


def load_checkpoint(path, expect_feature_dim: int | None = None,
                    expect_hidden: int | None = None) -> PolicyParams:
    """Load a checkpoint, refusing on any dimension mismatch."""
    with np.load(path) as data:
        try:
            theta = data["theta"]
            feature_dim = int(data["feature_dim"])
            hidden = int(data["hidden"])
            version = int(data["version"])
        except KeyError as exc:
            raise CheckpointMismatchError(
                f"checkpoint {path} is missing field {exc}") from exc
    if expect_feature_dim is not None and feature_dim != expect_feature_dim:
        raise CheckpointMismatchError(
            f"checkpoint {path} has feature_dim {feature_dim}, "
            f"expected {expect_feature_dim}")
    if expect_hidden is not None and hidden != expect_hidden:
        raise CheckpointMismatchError(
            f"checkpoint {path} has hidden {hidden}, "
            f"expected {expect_hidden}")
    if theta.shape != (param_count(feature_dim, hidden),):
        raise CheckpointMismatchError(
            f"checkpoint {path} theta shape {theta.shape} does not fit "
            f"feature_dim {feature_dim}, hidden {hidden}")
    return PolicyParams(feature_dim, hidden, theta, version=version)
