"""Run configuration: one JSON file drives a full optimization run."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from rxnlead.errors import ConfigError
from rxnlead.grpo import GrpoConfig
from rxnlead.validation import require_file

PROPOSER_MODES = ("heuristic", "remote")

_ORACLE_OBJECTIVES = {
    "similarity": "maximize similarity target={target}",
    "dissimilarity": "move away from the reference structure",
    "ring_count": "adjust the ring count toward {rings} rings",
    "weight_window": "bring molecular weight into the target window",
    "composite": "optimize the composite objective",
}


@dataclass(frozen=True)
class RunConfig:
    """Validated settings for optimize/eval runs."""

    task_id: str
    templates_path: str
    blocks_path: str
    leads_train_path: str
    leads_eval_path: str
    output_dir: str
    oracle: dict
    seed: int
    budget_train: int
    budget_eval: int
    grpo: GrpoConfig = field(default_factory=GrpoConfig)
    proposer_mode: str = "heuristic"
    proposer_endpoint: str | None = None
    proposer_timeout: float = 60.0
    cache_path: str | None = None
    objective: str = ""
    k_max: int = 10
    t_max: int = 5
    hidden: int = 0
    fp_block: int = 32
    tid_block: int = 16

    def __post_init__(self) -> None:
        if not self.task_id:
            raise ConfigError("task_id must be non-empty")
        if self.proposer_mode not in PROPOSER_MODES:
            raise ConfigError(
                f"proposer_mode must be one of {PROPOSER_MODES}")
        if self.proposer_mode == "remote" and not self.proposer_endpoint:
            raise ConfigError("remote proposer needs an endpoint")
        if self.budget_train < 0 or self.budget_eval < 0:
            raise ConfigError("budgets must be non-negative")
        if min(self.k_max, self.t_max) < 1:
            raise ConfigError("k_max and t_max must be >= 1")
        if min(self.fp_block, self.tid_block) < 1:
            raise ConfigError("feature block widths must be >= 1")
        if self.hidden < 0:
            raise ConfigError("hidden width must be >= 0")
        if not isinstance(self.oracle, dict) or "kind" not in self.oracle:
            raise ConfigError("oracle spec must be an object with a kind")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError("seed must be an integer")

    @property
    def resolved_objective(self) -> str:
        """Objective text handed to the proposer and featurizer."""
        if self.objective:
            return self.objective
        template = _ORACLE_OBJECTIVES.get(self.oracle.get("kind"), "")
        try:
            return template.format(**self.oracle)
        except (KeyError, IndexError):
            return template

    @property
    def resolved_cache_path(self) -> str:
        if self.cache_path is not None:
            return self.cache_path
        return str(Path(self.output_dir) / "cache.jsonl")

    def check_files(self) -> None:
        require_file(self.templates_path, "templates")
        require_file(self.blocks_path, "building blocks")
        require_file(self.leads_train_path, "training leads")
        require_file(self.leads_eval_path, "evaluation leads")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["grpo"] = asdict(self.grpo)
        return out


_TOP_LEVEL_KEYS = {
    "task_id", "templates_path", "blocks_path", "leads_train_path",
    "leads_eval_path", "output_dir", "oracle", "seed", "budget",
    "grpo", "proposer", "cache_path", "objective", "k_max", "t_max",
    "policy",
}

_REQUIRED_KEYS = {
    "task_id", "templates_path", "blocks_path", "leads_train_path",
    "leads_eval_path", "output_dir", "oracle", "seed", "budget",
}


def config_from_dict(raw: dict) -> RunConfig:
    """Build a RunConfig from parsed JSON, rejecting unknown keys."""
    if not isinstance(raw, dict):
        raise ConfigError("run config must be a JSON object")
    unknown = set(raw) - _TOP_LEVEL_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = _REQUIRED_KEYS - set(raw)
    if missing:
        raise ConfigError(f"missing config keys: {sorted(missing)}")

    budget = raw["budget"]
    if (not isinstance(budget, dict)
            or not {"train", "eval"} <= set(budget)):
        raise ConfigError("budget must carry train and eval counts")
    extra = set(budget) - {"train", "eval", "total"}
    if extra:
        raise ConfigError(f"unknown budget keys: {sorted(extra)}")
    train, ev = budget["train"], budget["eval"]
    if not all(isinstance(b, int) and not isinstance(b, bool)
               and b >= 0 for b in (train, ev)):
        raise ConfigError("budget counts must be non-negative integers")
    if "total" in budget and budget["total"] != train + ev:
        raise ConfigError(
            f"budget total {budget['total']} != train {train} + eval {ev}")

    try:
        grpo = GrpoConfig(**raw.get("grpo", {}))
    except TypeError as exc:
        raise ConfigError(f"bad grpo settings: {exc}") from exc

    proposer = raw.get("proposer", {"mode": "heuristic"})
    if not isinstance(proposer, dict) or "mode" not in proposer:
        raise ConfigError("proposer must be an object with a mode")
    if set(proposer) - {"mode", "endpoint", "timeout"}:
        raise ConfigError("unknown proposer keys")

    policy = raw.get("policy", {})
    if set(policy) - {"hidden", "fp_block", "tid_block"}:
        raise ConfigError("unknown policy keys")

    return RunConfig(
        task_id=raw["task_id"],
        templates_path=raw["templates_path"],
        blocks_path=raw["blocks_path"],
        leads_train_path=raw["leads_train_path"],
        leads_eval_path=raw["leads_eval_path"],
        output_dir=raw["output_dir"],
        oracle=raw["oracle"],
        seed=raw["seed"],
        budget_train=train,
        budget_eval=ev,
        grpo=grpo,
        proposer_mode=proposer["mode"],
        proposer_endpoint=proposer.get("endpoint"),
        proposer_timeout=proposer.get("timeout", 60.0),
        cache_path=raw.get("cache_path"),
        objective=raw.get("objective", ""),
        k_max=raw.get("k_max", 10),
        t_max=raw.get("t_max", 5),
        hidden=policy.get("hidden", 0),
        fp_block=policy.get("fp_block", 32),
        tid_block=policy.get("tid_block", 16),
    )


def _rebase(base: Path, value: str | None) -> str | None:
    if value is None:
        return None
    p = Path(value)
    return value if p.is_absolute() else str(base / p)


def load_run_config(path) -> RunConfig:
    """Parse and validate a run-config file.

    Relative paths inside the file resolve against the file's own
    directory, so a config travels with its fixture files.
    """
    p = require_file(path, "run config")
    try:
        raw = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
    config = config_from_dict(raw)
    base = p.parent
    config = replace(
        config,
        templates_path=_rebase(base, config.templates_path),
        blocks_path=_rebase(base, config.blocks_path),
        leads_train_path=_rebase(base, config.leads_train_path),
        leads_eval_path=_rebase(base, config.leads_eval_path),
        output_dir=_rebase(base, config.output_dir),
        cache_path=_rebase(base, config.cache_path),
    )
    config.check_files()
    return config
