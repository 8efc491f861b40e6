"""Benchmark metrics over oracle logs.

All metrics consume score histories in the OracleMeter log shape,
``(call index, canonical SMILES, score)``, so every reported number can
be recomputed offline from the exported logs alone.
"""

from __future__ import annotations

import bisect
import json

from rxnlead.errors import EmptyHistoryError, TooFewMoleculesError
from rxnlead.fingerprints import morgan_fingerprint, tanimoto
from rxnlead.molgraph import Molecule, mol_from_smiles

History = list[tuple[int, str, float]]


def _best_by_molecule(history: History) -> dict[str, float]:
    best: dict[str, float] = {}
    for _, smiles, score in history:
        prev = best.get(smiles)
        if prev is None or score > prev:
            best[smiles] = score
    return best


def top_k(history: History, k: int) -> float:
    """Mean of the k best per-molecule scores.

    Duplicate molecules keep only their best score. Histories with
    fewer than k distinct molecules average what is available.

    Raises:
        EmptyHistoryError: no records.
    """
    if not history:
        raise EmptyHistoryError("top_k over an empty history")
    if k < 1:
        raise ValueError("k must be positive")
    scores = sorted(_best_by_molecule(history).values(), reverse=True)[:k]
    return sum(scores) / len(scores)


def running_top_k(history: History, k: int) -> list[float]:
    """The top_k value after each call, in call order."""
    if not history:
        raise EmptyHistoryError("running_top_k over an empty history")
    best: dict[str, float] = {}
    ordered: list[float] = []  # ascending best scores across molecules
    curve: list[float] = []
    for _, smiles, score in history:
        prev = best.get(smiles)
        if prev is None:
            best[smiles] = score
            bisect.insort(ordered, score)
        elif score > prev:
            best[smiles] = score
            del ordered[bisect.bisect_left(ordered, prev)]
            bisect.insort(ordered, score)
        tail = ordered[-k:]
        curve.append(sum(tail) / len(tail))
    return curve


def auc_top_k(history: History, k: int, budget: int) -> float:
    """Area under the running top_k curve, normalized by the budget.

    The curve is sampled once per call; after the final call it is
    extended flat to the budget. A constant curve therefore integrates
    to exactly its value.

    Raises:
        EmptyHistoryError: no records.
    """
    if not history:
        raise EmptyHistoryError("auc_top_k over an empty history")
    n = len(history)
    if budget < n:
        raise ValueError(f"budget {budget} smaller than history length {n}")
    curve = running_top_k(history, k)
    return (sum(curve) + curve[-1] * (budget - n)) / budget


def internal_diversity(molecules: list[Molecule], radius: int = 2,
                       width: int = 2048) -> float:
    """1 minus the mean pairwise Tanimoto similarity.

    Raises:
        TooFewMoleculesError: fewer than two molecules.
    """
    if len(molecules) < 2:
        raise TooFewMoleculesError(
            f"internal diversity needs >= 2 molecules, got {len(molecules)}")
    fps = [morgan_fingerprint(m, radius=radius, width=width) for m in molecules]
    total = 0.0
    pairs = 0
    for i in range(len(fps)):
        for j in range(i + 1, len(fps)):
            total += tanimoto(fps[i], fps[j])
            pairs += 1
    return 1.0 - total / pairs


def metrics_report(history: History, budget: int, k: int = 10,
                   diversity_pool: int = 100) -> dict:
    """Assemble the standard metrics block from one oracle log.

    ``internal_diversity`` is computed over the ``diversity_pool``
    best-scoring distinct molecules and reported as None when fewer
    than two exist.
    """
    best = _best_by_molecule(history)
    pool = sorted(best.items(), key=lambda kv: (-kv[1], kv[0]))[:diversity_pool]
    if len(pool) >= 2:
        diversity = internal_diversity([mol_from_smiles(s) for s, _ in pool])
    else:
        diversity = None
    return {
        "k": k,
        "budget": budget,
        "calls_used": len(history),
        "unique_molecules": len(best),
        "top_k": top_k(history, k),
        "auc_top_k": auc_top_k(history, k, budget),
        "internal_diversity": diversity,
        "diversity_pool": min(diversity_pool, len(pool)),
    }


def dump_report(report: dict, path) -> None:
    """Write a metrics report as deterministic JSON."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, sort_keys=True, indent=2)
        fh.write("\n")


def dump_curve(history: History, k: int, path) -> None:
    """Write the per-call running top_k curve for plotting."""
    curve = running_top_k(history, k)
    with open(path, "w", encoding="utf-8") as fh:
        for (call, _, _), value in zip(history, curve):
            fh.write(json.dumps({"call": call, "top_k": value}) + "\n")
