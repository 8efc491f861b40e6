"""Estimator-style facade over training and greedy optimization.

LeadOptimizer follows the scikit-learn contract: construction only
stores settings, `fit` trains the policy on a list of lead SMILES
under the oracle budget, and `predict`/`transform` greedily optimize
new leads without spending any oracle calls.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from rxnlead.environment import HeuristicProposer, ReactionCache, ReactionEnv
from rxnlead.grpo import GrpoConfig, greedy_rollout, train
from rxnlead.oracles import OracleMeter, build_oracle
from rxnlead.policy import Featurizer, Policy
from rxnlead.reactions import TemplateLibrary
from rxnlead.validation import parse_molecules, read_smiles_lines


class LeadOptimizer(BaseEstimator):
    """Policy-gradient lead optimizer over reaction-template actions.

    Parameters mirror the run-config fields. `oracle_spec` is the
    oracle description dict; `grpo_params` overrides training
    hyperparameters; `proposer` optionally injects a ready proposer
    (otherwise a deterministic one is built from `blocks_path`).
    """

    def __init__(self, templates_path=None, blocks_path=None,
                 oracle_spec=None, objective="", task_id="task",
                 seed=0, budget_train=7500, k_max=10, t_max=5,
                 hidden=0, fp_block=32, tid_block=16,
                 cache_path=None, grpo_params=None, proposer=None):
        self.templates_path = templates_path
        self.blocks_path = blocks_path
        self.oracle_spec = oracle_spec
        self.objective = objective
        self.task_id = task_id
        self.seed = seed
        self.budget_train = budget_train
        self.k_max = k_max
        self.t_max = t_max
        self.hidden = hidden
        self.fp_block = fp_block
        self.tid_block = tid_block
        self.cache_path = cache_path
        self.grpo_params = grpo_params
        self.proposer = proposer

    def _make_env(self):
        library = TemplateLibrary.load(self.templates_path)
        if self.proposer is not None:
            proposer = self.proposer
        else:
            proposer = HeuristicProposer(
                read_smiles_lines(self.blocks_path, "building blocks"),
                k_max=self.k_max)
        cache = ReactionCache(self.task_id, library.digest, self.cache_path)
        env = ReactionEnv(library, proposer, self.objective, self.task_id,
                          cache, k_max=self.k_max, t_max=self.t_max)
        return library, env

    def fit(self, X, y=None):
        """Train on lead SMILES strings X; y is ignored."""
        leads = parse_molecules(list(X), "lead")
        oracle = build_oracle(self.oracle_spec)
        self.library_, self.env_ = self._make_env()
        self.featurizer_ = Featurizer(self.objective, self.fp_block,
                                      self.tid_block)
        self.meter_ = OracleMeter(budget=self.budget_train)
        config = GrpoConfig(**(self.grpo_params or {}))
        rng = np.random.default_rng(self.seed)
        self.params_, self.train_log_ = train(
            self.env_, self.featurizer_, leads, oracle, self.meter_,
            config, rng, hidden=self.hidden)
        self.policy_ = Policy(self.featurizer_, self.params_,
                              self.k_max + 1)
        return self

    def predict(self, X):
        """Greedily optimize each lead; returns terminal SMILES.

        Spends zero oracle calls: action selection is argmax under the
        trained policy.
        """
        check_is_fitted(self, "params_")
        leads = parse_molecules(list(X), "lead")
        out = [greedy_rollout(self.env_, self.policy_, lead).smiles
               for lead in leads]
        return np.asarray(out, dtype=object)

    def transform(self, X):
        return self.predict(X)

    def optimize_with_pathways(self, X):
        """Like predict, but returns the full terminal states."""
        check_is_fitted(self, "params_")
        leads = parse_molecules(list(X), "lead")
        return [greedy_rollout(self.env_, self.policy_, lead)
                for lead in leads]

    def score(self, X, y=None):
        """Mean oracle score of the optimized terminal molecules.

        Spends one oracle call per lead.
        """
        check_is_fitted(self, "params_")
        oracle = build_oracle(self.oracle_spec)
        states = self.optimize_with_pathways(X)
        meter = OracleMeter(budget=len(states))
        return float(np.mean([
            meter.evaluate(oracle, s.molecule) for s in states]))
