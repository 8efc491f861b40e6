"""Scoring functions with strict call budgeting.

Every oracle maps a molecule to a score in [0, 1]. The optimization
loop only ever scores terminal molecules, and every scored molecule
passes through an OracleMeter that enforces the call budget and keeps
an append-only log from which all evaluation metrics can be recomputed
offline.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

from rxnlead.errors import BudgetExhaustedError, OracleSpecError
from rxnlead.fingerprints import Fingerprint, morgan_fingerprint, tanimoto
from rxnlead.molgraph import Molecule, mol_from_smiles

Oracle = Callable[[Molecule], float]


def _clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


def _similarity_oracle(params: dict) -> Oracle:
    target = params.get("target")
    if not isinstance(target, str) or not target:
        raise OracleSpecError("similarity oracle needs a target SMILES")
    try:
        ref = morgan_fingerprint(mol_from_smiles(target))
    except Exception as exc:
        raise OracleSpecError(f"similarity target does not parse: {exc}") from exc

    def score(m: Molecule) -> float:
        return _clamp(tanimoto(morgan_fingerprint(m), ref))

    return score


def _dissimilarity_oracle(params: dict) -> Oracle:
    inner = _similarity_oracle(params)
    return lambda m: _clamp(1.0 - inner(m))


def _ring_count_oracle(params: dict) -> Oracle:
    goal = params.get("goal")
    if not isinstance(goal, int) or goal < 0:
        raise OracleSpecError("ring-count oracle needs a non-negative integer goal")
    rate = params.get("rate", 1.0)
    if not (isinstance(rate, (int, float)) and rate > 0):
        raise OracleSpecError("ring-count decay rate must be positive")

    def score(m: Molecule) -> float:
        return _clamp(math.exp(-rate * abs(m.ring_info.count - goal)))

    return score


def _weight_window_oracle(params: dict) -> Oracle:
    lo = params.get("lo")
    hi = params.get("hi")
    if not (isinstance(lo, (int, float)) and isinstance(hi, (int, float)) and lo < hi):
        raise OracleSpecError("weight window needs lo < hi")
    falloff = params.get("falloff", 100.0)
    if not (isinstance(falloff, (int, float)) and falloff > 0):
        raise OracleSpecError("weight window falloff must be positive")

    def score(m: Molecule) -> float:
        w = m.molecular_weight
        if lo <= w <= hi:
            return 1.0
        dist = (lo - w) if w < lo else (w - hi)
        return _clamp(1.0 - dist / falloff)

    return score


def _composite_oracle(params: dict) -> Oracle:
    components = params.get("components")
    if not isinstance(components, list) or not components:
        raise OracleSpecError("composite oracle needs a component list")
    parts: list[tuple[float, Oracle]] = []
    for entry in components:
        if not isinstance(entry, dict):
            raise OracleSpecError("composite component must be an object")
        weight = entry.get("weight", 1.0)
        if not (isinstance(weight, (int, float)) and weight > 0):
            raise OracleSpecError("composite component weights must be positive")
        parts.append((float(weight), build_oracle(entry)))
    total = sum(w for w, _ in parts)

    def score(m: Molecule) -> float:
        # weighted geometric mean; any zero component zeroes the product
        acc = 0.0
        for w, comp in parts:
            s = comp(m)
            if s <= 0.0:
                return 0.0
            acc += (w / total) * math.log(s)
        return _clamp(math.exp(acc))

    return score


_BUILDERS = {
    "similarity": _similarity_oracle,
    "dissimilarity": _dissimilarity_oracle,
    "ring_count": _ring_count_oracle,
    "weight_window": _weight_window_oracle,
    "composite": _composite_oracle,
}


def build_oracle(spec: dict) -> Oracle:
    """Compile an oracle spec into a pure scoring function.

    The spec is a dict with a ``kind`` field naming one of:

    - ``similarity``: Tanimoto similarity to ``target`` (a SMILES).
    - ``dissimilarity``: 1 - similarity to ``target``.
    - ``ring_count``: exp(-rate * |ring count - goal|).
    - ``weight_window``: 1.0 inside [lo, hi] daltons, linear falloff
      to 0 over ``falloff`` daltons outside.
    - ``composite``: weighted geometric mean of nested components.

    Raises:
        OracleSpecError: unknown kind or invalid parameters.
    """
    if not isinstance(spec, dict):
        raise OracleSpecError("oracle spec must be an object")
    kind = spec.get("kind")
    builder = _BUILDERS.get(kind)
    if builder is None:
        raise OracleSpecError(
            f"unknown oracle kind {kind!r}; expected one of {sorted(_BUILDERS)}")
    return builder(spec)


@dataclass
class OracleMeter:
    """Budgeted call counter with an append-only score log."""

    budget: int
    used: int = 0
    log: list[tuple[int, str, float]] = field(default_factory=list)

    def evaluate(self, oracle: Oracle, m: Molecule) -> float:
        """Score one molecule, consuming one unit of budget.

        Raises:
            BudgetExhaustedError: the budget is already fully used;
                the failed attempt does not consume budget.
        """
        if self.used >= self.budget:
            raise BudgetExhaustedError(
                f"oracle budget of {self.budget} calls exhausted")
        score = oracle(m)
        if not (0.0 <= score <= 1.0):
            raise OracleSpecError(f"oracle returned {score} outside [0, 1]")
        self.used += 1
        self.log.append((self.used, m.canonical_smiles, score))
        return score

    @property
    def remaining(self) -> int:
        return self.budget - self.used

    def dump_log(self, path) -> None:
        """Write the call log as line-delimited records.

        The header row carries the budget so metrics derived from the
        log can be recomputed without the originating config.
        """
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps({"budget": self.budget, "used": self.used},
                                sort_keys=True) + "\n")
            for index, smiles, score in self.log:
                fh.write(json.dumps(
                    {"call": index, "smiles": smiles, "score": score},
                    sort_keys=True) + "\n")


def load_oracle_log(path) -> tuple[int, list[tuple[int, str, float]]]:
    """Read back a dump_log file: (budget, records)."""
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        records = [
            (rec["call"], rec["smiles"], rec["score"])
            for rec in (json.loads(line) for line in fh if line.strip())
        ]
    return header["budget"], records


def evaluate(meter: OracleMeter, oracle: Oracle, m: Molecule) -> float:
    """Functional form of OracleMeter.evaluate."""
    return meter.evaluate(oracle, m)
