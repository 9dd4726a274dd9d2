"""Batch command-line front end.

Subcommands:

* ``score``: JSONL records in, JSONL reward vectors out.
* ``solve``: CSV matrix in, min-norm simplex weights as JSON out.
* ``advantages``: grouped-rewards CSV in, per-sample advantages plus
  per-group weights/residuals as JSON out.
* ``simulate``: JSON experiment config in, trace CSV plus summary JSON
  out.
* ``compare``: run both engines over several seeds and emit aggregate
  statistics (no verdict).

Exit codes: 0 ok, 1 invalid input (including per-record failures in
batch mode), 2 I/O failure. All numeric output is printed with 9
significant digits, and every command is deterministic given its inputs
and seeds.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
from typing import Optional, Sequence

import numpy as np

from .advantage import (
    AdvantageParams,
    GroupedRewardMatrix,
    GrpoParams,
    grpo_advantages,
    pfab_advantages,
)
from .minnorm import SolverParams, StandardizedDeltas, min_norm_weights
from .parsing import TimeSegment
from .rewards import InvalidRecordError, RewardConfig, TaskRecord, score_record
from .simulator import (
    ENGINES,
    EnvConfig,
    TrainConfig,
    build_env,
    run_experiment,
    summarize,
)

EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_IO_FAILURE = 2


class CliInputError(Exception):
    """Invalid input or flags; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; the contract reserves
    # 2 for I/O failures, so re-route bad flags to exit code 1
    def error(self, message):
        raise CliInputError(message)


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _round_floats(obj):
    """Round every float to 9 significant digits for byte-stable output."""
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_round_floats(obj), indent=2) + "\n"


def _write_output(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------- score


def _parse_score_line(line: str, defaults: RewardConfig) -> tuple[TaskRecord, RewardConfig]:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise InvalidRecordError(f"not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise InvalidRecordError("record must be a JSON object")

    record_id = raw.get("id")
    try:
        known = {
            "id",
            "group_id",
            "task",
            "response_text",
            "gt_segments",
            "gt_answer",
            "l_max",
            "l_buffer",
        }
        unknown = set(raw) - known
        if unknown:
            raise InvalidRecordError(f"unknown fields: {sorted(unknown)}", record_id)
        for required in ("id", "group_id", "task", "response_text"):
            if required not in raw:
                raise InvalidRecordError(f"missing field {required!r}", record_id)

        segments = None
        if raw.get("gt_segments") is not None:
            try:
                segments = tuple(
                    TimeSegment(float(s), float(e)) for s, e in raw["gt_segments"]
                )
            except (TypeError, ValueError) as exc:
                raise InvalidRecordError(f"bad gt_segments: {exc}", record_id)

        record = TaskRecord(
            record_id=str(raw["id"]),
            group_id=int(raw["group_id"]),
            task=str(raw["task"]),
            response_text=str(raw["response_text"]),
            gt_segments=segments,
            gt_answer=raw.get("gt_answer"),
        )
        cfg = RewardConfig(
            l_max=int(raw.get("l_max", defaults.l_max)),
            l_buffer=int(raw.get("l_buffer", defaults.l_buffer)),
        )
    except InvalidRecordError:
        raise
    except (TypeError, ValueError) as exc:
        raise InvalidRecordError(str(exc), record_id)
    return record, cfg


def cmd_score(args) -> int:
    defaults = RewardConfig(l_max=args.l_max, l_buffer=args.l_buffer)
    try:
        with open(args.input) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_IO_FAILURE

    out = io.StringIO()
    had_error = False
    for line in lines:
        if not line.strip():
            continue
        try:
            record, cfg = _parse_score_line(line, defaults)
            scored = score_record(record, cfg)
            payload = {
                "id": scored.record_id,
                "group_id": scored.group_id,
                "rewards": scored.reward.components,
                "task_kind": scored.reward.task_kind,
                "diagnostics": scored.diagnostics,
            }
        except InvalidRecordError as exc:
            had_error = True
            payload = {"id": exc.record_id, "error": str(exc)}
        out.write(json.dumps(_round_floats(payload)) + "\n")

    _write_output(out.getvalue(), args.output)
    return EXIT_INVALID_INPUT if had_error else EXIT_OK


# ---------------------------------------------------------------- solve


def _read_plain_matrix(path: str) -> np.ndarray:
    with open(path) as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise CliInputError("matrix CSV is empty")
    width = len(rows[0])
    data = []
    for i, row in enumerate(rows):
        if len(row) != width:
            raise CliInputError(f"row {i + 1} has {len(row)} cells, expected {width}")
        parsed = []
        for j, cell in enumerate(row):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise CliInputError(
                    f"non-numeric cell at row {i + 1}, column {j + 1}: {cell!r}"
                )
        data.append(parsed)
    return np.array(data)


def cmd_solve(args) -> int:
    try:
        matrix = _read_plain_matrix(args.matrix)
    except OSError as exc:
        print(f"error: cannot read {args.matrix}: {exc}", file=sys.stderr)
        return EXIT_IO_FAILURE

    m = matrix.shape[1]
    params = SolverParams(max_iter=args.max_iter, tol=args.tol)
    if args.raw:
        d_hat = StandardizedDeltas(
            matrix=matrix, columns=tuple(range(m)), n_objectives=m
        )
        valid = tuple(range(m))
    else:
        centered = matrix - matrix.mean(axis=0)
        sigma = centered.std(axis=0)
        valid = tuple(int(j) for j in np.flatnonzero(sigma > args.tau))
        if valid:
            d_hat = StandardizedDeltas(
                matrix=centered[:, valid] / sigma[list(valid)],
                columns=valid,
                n_objectives=m,
            )

    if not valid:
        # every column filtered: uniform fallback, nothing to solve
        result = {
            "alpha": [1.0 / m] * m,
            "residual": 0.0,
            "iterations": 0,
            "converged": True,
        }
    else:
        solution = min_norm_weights(d_hat, params)
        result = {
            "alpha": solution.weights.tolist(),
            "residual": solution.residual,
            "iterations": solution.iterations,
            "converged": solution.converged,
        }
    _write_output(_dump_json(result), args.output)
    return EXIT_OK


# ----------------------------------------------------------- advantages


def _read_grouped_csv(path: str) -> GroupedRewardMatrix:
    with open(path) as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise CliInputError("rewards CSV is empty")
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "group_id" or len(header) < 2:
        raise CliInputError('rewards CSV must start with a "group_id,<objectives...>" header')
    names = tuple(header[1:])
    groups, rewards = [], []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise CliInputError(f"row {i} has {len(row)} cells, expected {len(header)}")
        try:
            groups.append(int(row[0]))
        except ValueError:
            raise CliInputError(f"non-integer group id at row {i}: {row[0]!r}")
        parsed = []
        for j, cell in enumerate(row[1:], start=2):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise CliInputError(f"non-numeric cell at row {i}, column {j}: {cell!r}")
        rewards.append(parsed)
    if not rewards:
        raise CliInputError("rewards CSV has a header but no data rows")
    return GroupedRewardMatrix(
        rewards=np.array(rewards), groups=np.array(groups), objective_names=names
    )


def cmd_advantages(args) -> int:
    try:
        matrix = _read_grouped_csv(args.matrix)
    except OSError as exc:
        print(f"error: cannot read {args.matrix}: {exc}", file=sys.stderr)
        return EXIT_IO_FAILURE

    if args.engine == "pfab":
        adv = pfab_advantages(
            matrix,
            AdvantageParams(tau=args.tau, eps=args.eps),
            SolverParams(max_iter=args.max_iter, tol=args.tol),
        )
    else:
        weights = None
        if args.weights is not None:
            try:
                weights = np.array([float(w) for w in args.weights.split(",")])
            except ValueError:
                raise CliInputError(f"bad --weights value: {args.weights!r}")
            if weights.size != matrix.n_objectives:
                raise CliInputError(
                    f"--weights has {weights.size} entries, expected {matrix.n_objectives}"
                )
        adv = grpo_advantages(matrix, GrpoParams(weights=weights, eps=args.eps))

    group_payload = {}
    for gid in sorted(adv.group_weights):
        entry = {
            "alpha": adv.group_weights[gid].weights.tolist(),
            "residual": adv.group_residuals.get(gid),
        }
        notes = adv.diagnostics.get(gid)
        if notes:
            entry["notes"] = list(notes)
        group_payload[str(gid)] = entry

    result = {
        "engine": args.engine,
        "objectives": list(matrix.objective_names),
        "advantages": adv.values.tolist(),
        "groups": group_payload,
    }
    _write_output(_dump_json(result), args.output)
    return EXIT_OK


# ------------------------------------------------------------- simulate


_ENV_FIELDS = {"preset", "prompts", "candidates", "seed"}
_TRAIN_FIELDS = {
    "steps",
    "seed",
    "group_size",
    "clip_eps",
    "kl_beta",
    "learning_rate",
    "engine",
    "grpo_weights",
    "max_grad_norm",
}


def _load_experiment_config(path: str, seed_override: Optional[int]):
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise CliInputError("experiment config must be a JSON object")
    unknown = set(raw) - {"env", "train", "output_dir"}
    if unknown:
        raise CliInputError(f"invalid config field: {sorted(unknown)[0]}")

    env_raw = raw.get("env", {})
    unknown = set(env_raw) - _ENV_FIELDS
    if unknown:
        raise CliInputError(f"invalid config field: env.{sorted(unknown)[0]}")
    train_raw = raw.get("train", {})
    unknown = set(train_raw) - _TRAIN_FIELDS
    if unknown:
        raise CliInputError(f"invalid config field: train.{sorted(unknown)[0]}")

    try:
        env_cfg = EnvConfig(
            preset=env_raw.get("preset", "anticorrelated"),
            prompts=int(env_raw.get("prompts", 4)),
            candidates=int(env_raw.get("candidates", 8)),
        )
        env_seed = int(env_raw.get("seed", 0))
        grpo_weights = train_raw.get("grpo_weights")
        if grpo_weights is not None:
            grpo_weights = tuple(float(w) for w in grpo_weights)
        train_cfg = TrainConfig(
            steps=int(train_raw.get("steps", 100)),
            seed=int(train_raw.get("seed", 0)) if seed_override is None else seed_override,
            group_size=int(train_raw.get("group_size", 8)),
            clip_eps=float(train_raw.get("clip_eps", 0.2)),
            kl_beta=float(train_raw.get("kl_beta", 0.04)),
            learning_rate=float(train_raw.get("learning_rate", 0.05)),
            engine=str(train_raw.get("engine", "pfab")),
            grpo_weights=grpo_weights,
            max_grad_norm=float(train_raw.get("max_grad_norm", 1.0)),
        )
    except ValueError as exc:
        raise CliInputError(str(exc))
    return env_cfg, env_seed, train_cfg, raw.get("output_dir", ".")


def _trace_csv(trace, names) -> str:
    out = io.StringIO()
    header = (
        ["step", "engine"]
        + [f"mean_r_{n}" for n in names]
        + ["min_obj_mean", "residual_mean"]
        + [f"alpha_{n}" for n in names]
        + ["kl", "loss"]
    )
    out.write(",".join(header) + "\n")
    for r in trace.records:
        cells = (
            [str(r.step), trace.engine]
            + [_fmt(v) for v in r.mean_rewards]
            + [_fmt(r.min_obj_mean), _fmt(r.residual_mean)]
            + [_fmt(v) for v in r.alpha_mean]
            + [_fmt(r.kl), _fmt(r.loss)]
        )
        out.write(",".join(cells) + "\n")
    return out.getvalue()


def cmd_simulate(args) -> int:
    try:
        env_cfg, env_seed, train_cfg, output_dir = _load_experiment_config(
            args.config, args.seed
        )
    except OSError as exc:
        print(f"error: cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_IO_FAILURE
    except json.JSONDecodeError as exc:
        raise CliInputError(f"config is not valid JSON: {exc}")

    if args.output is not None:
        output_dir = args.output
    engines = list(ENGINES) if args.engine == "both" else [args.engine or train_cfg.engine]

    env = build_env(env_cfg, env_seed)
    os.makedirs(output_dir, exist_ok=True)
    for engine in engines:
        cfg = dataclasses.replace(train_cfg, engine=engine)
        trace = run_experiment(cfg, env)
        trace_path = os.path.join(output_dir, f"trace_{engine}.csv")
        summary_path = os.path.join(output_dir, f"summary_{engine}.json")
        with open(trace_path, "w") as fh:
            fh.write(_trace_csv(trace, env.objective_names))
        with open(summary_path, "w") as fh:
            fh.write(_dump_json(summarize(trace, env)))
        if not args.quiet:
            print(f"wrote {trace_path} and {summary_path}")
    return EXIT_OK


def cmd_compare(args) -> int:
    try:
        env_cfg, env_seed, train_cfg, _ = _load_experiment_config(args.config, args.seed)
    except OSError as exc:
        print(f"error: cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_IO_FAILURE
    except json.JSONDecodeError as exc:
        raise CliInputError(f"config is not valid JSON: {exc}")
    if args.seeds < 1:
        raise CliInputError("--seeds must be at least 1")

    env = build_env(env_cfg, env_seed)
    seeds = [train_cfg.seed + i for i in range(args.seeds)]
    metrics = (
        "min_objective_mean",
        "summed_mean_reward",
        "residual_mean_last_10pct",
        "front_step_fraction",
        "max_alpha_gap_from_uniform",
    )
    report = {"config": args.config, "seeds": seeds, "engines": {}}
    for engine in ENGINES:
        per_seed = []
        for seed in seeds:
            cfg = dataclasses.replace(train_cfg, engine=engine, seed=seed)
            trace = run_experiment(cfg, env)
            per_seed.append(summarize(trace, env))
        aggregate = {}
        for metric in metrics:
            values = np.array([s[metric] for s in per_seed], dtype=float)
            aggregate[metric] = {
                "mean": float(values.mean()),
                "std": float(values.std()),
            }
        report["engines"][engine] = {"per_seed": per_seed, "aggregate": aggregate}

    _write_output(_dump_json(report), args.output)
    return EXIT_OK


# ----------------------------------------------------------------- main


def build_parser() -> _Parser:
    parser = _Parser(
        prog="pfab",
        description="Reward scoring, min-norm weight solving, grouped "
        "advantage computation, and bandit training experiments.",
    )
    parser.add_argument("--seed", type=int, default=None, help="override the train seed")
    parser.add_argument("--output", default=None, help="output path (default: stdout)")
    parser.add_argument("--quiet", action="store_true", help="suppress progress messages")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score JSONL records with the reward suite")
    p.add_argument("input", help="input JSONL path")
    p.add_argument("--l-max", type=int, default=8192, dest="l_max")
    p.add_argument("--l-buffer", type=int, default=1024, dest="l_buffer")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("solve", help="min-norm weights for a CSV matrix")
    p.add_argument("matrix", help="headerless CSV, rows = samples, columns = objectives")
    p.add_argument("--max-iter", type=int, default=50, dest="max_iter")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--tau", type=float, default=1e-6, help="column validity threshold")
    p.add_argument("--raw", action="store_true", help="skip centering and standardization")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("advantages", help="per-sample advantages for a grouped CSV")
    p.add_argument("matrix", help='CSV with "group_id,<objectives...>" header')
    p.add_argument("--engine", choices=ENGINES, default="pfab")
    p.add_argument("--weights", default=None, help="comma-separated static weights (grpo)")
    p.add_argument("--tau", type=float, default=1e-6)
    p.add_argument("--eps", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=50, dest="max_iter")
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_advantages)

    p = sub.add_parser("simulate", help="run a bandit training experiment")
    p.add_argument("config", help="experiment config JSON path")
    p.add_argument("--engine", choices=ENGINES + ("both",), default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="aggregate both engines over several seeds")
    p.add_argument("config", help="experiment config JSON path")
    p.add_argument("--seeds", type=int, default=5, help="number of train seeds")
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (CliInputError, InvalidRecordError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO_FAILURE


def console_main() -> None:
    sys.exit(main())
