"""Command-line entry points.

Subcommands:

- ``optimize``: train a policy under the training budget, evaluate
  held-out leads greedily under the eval budget, and write all run
  artifacts (checkpoint, logs, metrics report, pathway file).
- ``eval``: evaluate held-out leads with an existing checkpoint.
- ``replay``: re-run every step of a pathway file and verify it.
- ``cache stats``: summarize a persisted action-space cache.
- ``metrics``: recompute the metrics report from an oracle log alone.

Exit codes: 0 success, 2 configuration or file error, 3 oracle budget
exhausted before the requested work could finish, 4 pathway replay
mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from rxnlead.config import RunConfig, load_run_config
from rxnlead.environment import (
    HeuristicProposer,
    ReactionCache,
    ReactionEnv,
    RemoteProposer,
)
from rxnlead.errors import (
    BudgetExhaustedError,
    ConfigError,
    ReplayMismatchError,
    RxnleadError,
)
from rxnlead.evalmetrics import dump_curve, dump_report, metrics_report
from rxnlead.grpo import evaluate_policy, train
from rxnlead.oracles import OracleMeter, build_oracle, load_oracle_log
from rxnlead.pathways import (
    PathwayRecord,
    export_pathways,
    load_pathways,
    verify_record,
)
from rxnlead.policy import Featurizer, Policy, load_checkpoint, save_checkpoint
from rxnlead.reactions import TemplateLibrary
from rxnlead.validation import read_molecules, read_smiles_lines, require_file

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_REPLAY = 4

PATHWAY_EXPORT_COUNT = 10


def _build_runtime(config: RunConfig):
    """Shared setup for optimize and eval: library, env, featurizer,
    oracle."""
    library = TemplateLibrary.load(config.templates_path)
    if config.proposer_mode == "remote":
        proposer = RemoteProposer(config.proposer_endpoint,
                                  timeout=config.proposer_timeout,
                                  k_max=config.k_max)
    else:
        proposer = HeuristicProposer(
            read_smiles_lines(config.blocks_path, "building blocks"),
            k_max=config.k_max)
    cache = ReactionCache(config.task_id, library.digest,
                          config.resolved_cache_path)
    env = ReactionEnv(library, proposer, config.resolved_objective,
                      config.task_id, cache,
                      k_max=config.k_max, t_max=config.t_max)
    featurizer = Featurizer(config.resolved_objective,
                            config.fp_block, config.tid_block)
    oracle = build_oracle(config.oracle)
    return library, env, featurizer, oracle


def _dump_jsonl(entries: list[dict], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for entry in entries:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")


def _evaluate_and_report(config: RunConfig, library, env, featurizer,
                         oracle, params, out: Path) -> None:
    """Greedy evaluation pass plus every derived artifact."""
    leads_eval = read_molecules(config.leads_eval_path, "evaluation lead")
    eval_meter = OracleMeter(budget=config.budget_eval)
    policy = Policy(featurizer, params, config.k_max + 1)
    results = evaluate_policy(env, policy, leads_eval, oracle, eval_meter)
    eval_meter.dump_log(out / "oracle_eval.jsonl")
    if not eval_meter.log:
        raise BudgetExhaustedError(
            "evaluation budget spent before any lead was scored")
    report = metrics_report(eval_meter.log, config.budget_eval)
    report["seed"] = config.seed
    report["task_id"] = config.task_id
    dump_report(report, out / "metrics.json")
    dump_curve(eval_meter.log, report["k"], out / "curve_eval.jsonl")
    ranked = sorted(results, key=lambda r: (-r.score, r.terminal_state.smiles,
                                            r.lead_smiles))
    records = [
        PathwayRecord(r.lead_smiles, r.terminal_state.pathway,
                      r.terminal_state.smiles, r.score)
        for r in ranked[:PATHWAY_EXPORT_COUNT]
    ]
    export_pathways(library, records, out / "pathways.jsonl")


def run_optimize(config: RunConfig) -> int:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    library, env, featurizer, oracle = _build_runtime(config)
    try:
        leads_train = read_molecules(config.leads_train_path, "training lead")
        rng = np.random.default_rng(config.seed)
        train_meter = OracleMeter(budget=config.budget_train)
        params, logs = train(env, featurizer, leads_train, oracle,
                             train_meter, config.grpo, rng,
                             hidden=config.hidden)
        save_checkpoint(out / "checkpoint.npz", params)
        _dump_jsonl(logs, out / "train_log.jsonl")
        train_meter.dump_log(out / "oracle_train.jsonl")
        _evaluate_and_report(config, library, env, featurizer, oracle,
                             params, out)
    finally:
        env.cache.close()
    print(f"run complete: artifacts in {out}")
    return EXIT_OK


def run_eval(config: RunConfig, checkpoint_path: str) -> int:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    library, env, featurizer, oracle = _build_runtime(config)
    try:
        params = load_checkpoint(require_file(checkpoint_path, "checkpoint"),
                                 expect_feature_dim=featurizer.dim,
                                 expect_hidden=config.hidden)
        _evaluate_and_report(config, library, env, featurizer, oracle,
                             params, out)
    finally:
        env.cache.close()
    print(f"eval complete: artifacts in {out}")
    return EXIT_OK


def run_replay(pathways_path: str, templates_path: str) -> int:
    library = TemplateLibrary.load(require_file(templates_path, "templates"))
    records = load_pathways(require_file(pathways_path, "pathway file"))
    for record in records:
        verify_record(library, record)
    print(f"replayed {len(records)} pathways, all verified")
    return EXIT_OK


def run_cache_stats(cache_path: str) -> int:
    path = require_file(cache_path, "cache file")
    n_entries = 0
    n_actions = 0
    header = None
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
        try:
            header = json.loads(first)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path} is not a cache file: {exc}") from exc
        if not (isinstance(header, dict) and "task_id" in header
                and "library_digest" in header):
            raise ConfigError(f"{path} is missing the cache header")
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            n_entries += 1
            n_actions += len(record.get("reactions", []))
    stats = {
        "task_id": header["task_id"],
        "library_digest": header["library_digest"],
        "entries": n_entries,
        "reaction_actions": n_actions,
        "bytes": path.stat().st_size,
    }
    print(json.dumps(stats, indent=2, sort_keys=True))
    return EXIT_OK


def run_metrics(log_path: str, k: int, pool: int, out_path: str | None,
                budget: int | None = None) -> int:
    logged_budget, records = load_oracle_log(
        require_file(log_path, "oracle log"))
    if budget is None:
        budget = logged_budget
    if budget < len(records):
        raise ConfigError(f"budget {budget} smaller than the "
                          f"{len(records)} logged calls")
    report = metrics_report(records, budget, k=k, diversity_pool=pool)
    if out_path is not None:
        dump_report(report, out_path)
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rxnlead",
        description="Synthesis-constrained lead optimization over "
                    "reaction templates.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_opt = sub.add_parser("optimize",
                           help="train a policy and evaluate held-out leads")
    p_opt.add_argument("--config", required=True,
                       help="run configuration JSON file")

    p_eval = sub.add_parser("eval",
                            help="evaluate held-out leads with a checkpoint")
    p_eval.add_argument("--config", required=True)
    p_eval.add_argument("--checkpoint", required=True)

    p_replay = sub.add_parser("replay",
                              help="verify a pathway file step by step")
    p_replay.add_argument("--pathways", required=True)
    p_replay.add_argument("--templates", required=True)

    p_cache = sub.add_parser("cache", help="cache utilities")
    cache_sub = p_cache.add_subparsers(dest="cache_command", required=True)
    p_stats = cache_sub.add_parser("stats",
                                   help="summarize a persisted cache file")
    p_stats.add_argument("--path", required=True)

    p_metrics = sub.add_parser(
        "metrics", help="recompute the metrics report from an oracle log")
    p_metrics.add_argument("--oracle-log", required=True)
    p_metrics.add_argument("--budget", type=int, default=None,
                           help="override the budget recorded in the log")
    p_metrics.add_argument("--k", type=int, default=10)
    p_metrics.add_argument("--pool", type=int, default=100)
    p_metrics.add_argument("--out", default=None,
                           help="also write the report to this file")
    return parser


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "optimize":
        return run_optimize(load_run_config(args.config))
    if args.command == "eval":
        return run_eval(load_run_config(args.config), args.checkpoint)
    if args.command == "replay":
        return run_replay(args.pathways, args.templates)
    if args.command == "cache":
        return run_cache_stats(args.path)
    if args.command == "metrics":
        return run_metrics(args.oracle_log, args.k, args.pool, args.out,
                           budget=args.budget)
    raise ConfigError(f"unknown command {args.command!r}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExhaustedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ReplayMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REPLAY
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RxnleadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
