"""promo-gym command line: ingest -> build -> train -> eval, plus render
and export-metrics. Every run is pinned by a manifest and a seed; exit
codes are 0 success, 2 bad input or config, 1 internal error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import binning, ingest, metrics, promoenv, rendering, tables
from .errors import EmptyInput, PromoGymError, SchemaError
from .frozen_lake import make_frozen_lake
from .learner import evaluate_greedy, qtable_from_json, qtable_to_json, train
from .manifest import RunManifest, load_manifest
from .tables import TabularEnv


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="promo-gym",
        description="Tabular Q-learning over retail promotional-forecasting MDPs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_manifest(cmd: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(cmd, help=help_text)
        p.add_argument("--manifest", required=True, help="run manifest JSON")
        p.add_argument("--out", help="override the manifest's output directory")
        return p

    with_manifest("ingest", "parse inputs into the unified daily series and bins")

    p = with_manifest("build", "compile the environment's transition table")
    p.add_argument("--slippery", type=_parse_bool_flag, metavar="true|false",
                   help="override frozen-lake slip mode")
    p.add_argument("--allow-empty-promos", action="store_true",
                   help="permit a promotion-free week (goals stay empty)")

    p = with_manifest("train", "train the agent and emit metrics")
    p.add_argument("--seed", type=int, help="override the learner seed")
    p.add_argument("--episodes", type=int, help="override the episode count")

    p = with_manifest("eval", "evaluate a trained q-table greedily")
    p.add_argument("--q-table", help="q-table file (default: <out>/q_table.json)")
    p.add_argument("--seed", type=int, help="override the evaluation seed")
    p.add_argument("--episodes", type=int, default=100,
                   help="evaluation episode count (default 100)")

    p = sub.add_parser("render", help="print an episode trace as text frames")
    p.add_argument("--trace", required=True, help="trace CSV file")
    p.add_argument("--table", required=True, help="transition-table JSON file")

    with_manifest("export-metrics", "recompute metrics CSVs from saved traces")
    return parser


def _parse_bool_flag(text: str) -> bool:
    lowered = text.strip().casefold()
    if lowered in {"true", "1", "yes"}:
        return True
    if lowered in {"false", "0", "no"}:
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "render":
            return cmd_render(Path(args.trace), Path(args.table))
        manifest = load_manifest(args.manifest)
        if args.out:
            manifest.out_dir = Path(args.out)
        if args.command == "ingest":
            return cmd_ingest(manifest)
        if args.command == "build":
            if args.slippery is not None:
                manifest.environment.slippery = args.slippery
            if args.allow_empty_promos:
                manifest.environment.allow_empty_promos = True
            return cmd_build(manifest)
        if args.command == "train":
            _apply_learner_overrides(manifest, args)
            return cmd_train(manifest)
        if args.command == "eval":
            _apply_learner_overrides(manifest, args)
            q_path = Path(args.q_table) if args.q_table else (
                manifest.out_dir / "q_table.json"
            )
            return cmd_eval(manifest, q_path, args.episodes)
        if args.command == "export-metrics":
            return cmd_export_metrics(manifest)
        raise AssertionError(f"unhandled command {args.command}")
    except PromoGymError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _apply_learner_overrides(manifest: RunManifest, args) -> None:
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if args.command == "train" and args.episodes is not None:
        overrides["episodes"] = args.episodes
    if overrides:
        manifest.learner = dataclasses.replace(manifest.learner, **overrides)


# --- subcommands ---------------------------------------------------------------


def cmd_ingest(manifest: RunManifest) -> int:
    """Parse inputs, unify, fit bins; writes the series CSV and bin model."""
    manifest.require_inputs("holiday_calendar")
    inputs = manifest.inputs
    if inputs.rx_transactions is None and inputs.online_transactions is None:
        raise EmptyInput("manifest names no transactions input (rx or online)")

    promos = []
    if inputs.promo_plan is not None:
        promos = ingest.parse_promo_plan(inputs.promo_plan)
        print(f"promo_plan: {len(promos)} records")
    online = []
    if inputs.online_transactions is not None:
        online = ingest.parse_transactions(inputs.online_transactions, "online")
        print(f"online_transactions: {len(online)} records")
    rx = []
    if inputs.rx_transactions is not None:
        rx = ingest.parse_transactions(inputs.rx_transactions, "rx")
        print(f"rx_transactions: {len(rx)} records")
    holidays = ingest.parse_holidays(inputs.holiday_calendar)
    print(f"holiday_calendar: {len(holidays)} dates")
    zip_map = None
    if inputs.zip_store_map is not None:
        zip_map = ingest.parse_zip_store_map(inputs.zip_store_map)

    series = ingest.unify(online, rx, promos, holidays, zip_map)
    model = binning.fit_bins([rec.units_sold for rec in series])

    out = _ensure_out(manifest)
    series_path = out / "daily_series.csv"
    model_path = out / "binning_model.json"
    ingest.write_daily_series(series_path, series)
    _write_text(model_path, binning.model_to_json(model))
    print(f"daily series: {len(series)} records -> {series_path}")
    print(f"bin boundaries: {model.boundaries} (fitted on {model.fitted_on}) "
          f"-> {model_path}")
    return 0


def cmd_build(manifest: RunManifest) -> int:
    """Build (or validate) the transition table and write it to out/."""
    env_choice = manifest.environment
    out = _ensure_out(manifest)

    if env_choice.kind == "frozen-lake":
        table = make_frozen_lake(slippery=env_choice.slippery)
    elif env_choice.kind == "table":
        if env_choice.table_path is None:
            raise EmptyInput("environment kind 'table' needs table_path")
        table = tables.deserialize(
            Path(env_choice.table_path).read_text(encoding="utf-8")
        )
    else:
        spec = _resolve_grid_spec(manifest)
        _write_text(out / "grid_spec.json", promoenv.spec_to_json(spec))
        table = promoenv.build_promo_mdp(spec)

    violations = tables.validate(table)
    if violations:
        raise SchemaError("built table failed validation: " + "; ".join(violations))
    table_path = out / "table.json"
    _write_text(table_path, tables.serialize(table))
    print(f"table: {table.n_states} states x {table.n_actions} actions, "
          f"validation clean -> {table_path}")
    return 0


def _resolve_grid_spec(manifest: RunManifest) -> promoenv.PromoGridSpec:
    env_choice = manifest.environment
    if env_choice.grid_spec is not None:
        return env_choice.grid_spec
    if env_choice.grid_spec_path is not None:
        return promoenv.spec_from_json(
            Path(env_choice.grid_spec_path).read_text(encoding="utf-8")
        )
    # derive from ingest outputs
    series_path = manifest.out_dir / "daily_series.csv"
    model_path = manifest.out_dir / "binning_model.json"
    for path in (series_path, model_path):
        if not path.exists():
            raise EmptyInput(f"{path} missing; run `promo-gym ingest` first "
                             "or give the manifest an explicit grid_spec")
    if env_choice.target_week is None:
        raise EmptyInput("deriving a promo grid needs environment.target_week")
    manifest.require_inputs("promo_plan")
    series = ingest.read_daily_series(series_path)
    model = binning.model_from_json(model_path.read_text(encoding="utf-8"))
    promos = ingest.parse_promo_plan(manifest.inputs.promo_plan)
    return promoenv.derive_spec_from_data(
        series, model, promos, env_choice.target_week,
        allow_empty_promos=env_choice.allow_empty_promos,
    )


def cmd_train(manifest: RunManifest) -> int:
    """Train per the manifest's learner config; emit q-table and metrics."""
    table = _load_run_table(manifest)
    env = TabularEnv(table)
    q, traces = train(env, manifest.learner)

    out = _ensure_out(manifest)
    q_path = out / "q_table.json"
    _write_text(q_path, qtable_to_json(q))
    print(f"trained {manifest.learner.episodes} episodes "
          f"(seed {manifest.learner.seed}) -> {q_path}")

    series = metrics.compute_metrics(traces)
    if manifest.emit.metrics:
        metrics.write_mean_cumulative_csv(out / "mean_cumulative.csv", series)
        metrics.write_episodic_csv(out / "episodic.csv", series)
        print(f"metrics -> {out / 'mean_cumulative.csv'}, {out / 'episodic.csv'}")
    if manifest.emit.traces:
        trace_dir = out / "traces"
        trace_dir.mkdir(parents=True, exist_ok=True)
        for i, trace in enumerate(traces):
            metrics.write_trace_csv(trace_dir / f"episode_{i:05d}.csv", trace)
        print(f"traces -> {trace_dir} ({len(traces)} files)")
    if manifest.emit.plots:
        metrics.write_line_chart_svg(
            out / "mean_cumulative.svg",
            [(float(s), v) for s, v in series.mean_cumulative],
            "Mean cumulative reward", "step", "mean cumulative reward",
        )
        metrics.write_line_chart_svg(
            out / "episodic.svg",
            [(float(e), v) for e, v in series.episodic],
            "Episodic reward", "episode", "total reward",
        )
        print(f"plots -> {out / 'mean_cumulative.svg'}, {out / 'episodic.svg'}")

    report = evaluate_greedy(env, q, episodes=100,
                             max_steps=manifest.learner.max_steps_per_episode,
                             seed=manifest.learner.seed)
    print(f"greedy success rate: {report['success_rate']:.3f}  "
          f"mean total reward: {report['mean_total_reward']:.3f}")
    return 0


def cmd_eval(manifest: RunManifest, q_path: Path, episodes: int) -> int:
    """Greedy evaluation of a trained q-table; writes eval_report.json."""
    if episodes < 0:
        raise EmptyInput(f"episode count must be >= 0, got {episodes}")
    table = _load_run_table(manifest)
    env = TabularEnv(table)
    if not q_path.exists():
        raise EmptyInput(f"q-table not found: {q_path} (run `promo-gym train`)")
    q = qtable_from_json(q_path.read_text(encoding="utf-8"))
    report = evaluate_greedy(env, q, episodes=episodes,
                             max_steps=manifest.learner.max_steps_per_episode,
                             seed=manifest.learner.seed)
    out = _ensure_out(manifest)
    report_path = out / "eval_report.json"
    _write_text(report_path, json.dumps(report, indent=1))
    for key, value in report.items():
        print(f"{key}: {value}")
    print(f"report -> {report_path}")
    return 0


def cmd_render(trace_path: Path, table_path: Path) -> int:
    """Print an episode's frames over its table's grid."""
    for path in (trace_path, table_path):
        if not path.exists():
            raise EmptyInput(f"file not found: {path}")
    trace = metrics.read_trace_csv(trace_path)
    table = tables.deserialize(table_path.read_text(encoding="utf-8"))
    print(rendering.render_trace(trace, table))
    return 0


def cmd_export_metrics(manifest: RunManifest) -> int:
    """Recompute the metrics CSVs from trace files saved by train."""
    trace_dir = manifest.out_dir / "traces"
    trace_files = sorted(trace_dir.glob("episode_*.csv")) if trace_dir.exists() else []
    if not trace_files:
        raise EmptyInput(f"no trace files under {trace_dir}; train with "
                         "emit.traces enabled first")
    traces = [metrics.read_trace_csv(path) for path in trace_files]
    series = metrics.compute_metrics(traces)
    out = _ensure_out(manifest)
    metrics.write_mean_cumulative_csv(out / "mean_cumulative.csv", series)
    metrics.write_episodic_csv(out / "episodic.csv", series)
    print(f"metrics over {len(traces)} traces -> {out / 'mean_cumulative.csv'}, "
          f"{out / 'episodic.csv'}")
    if manifest.emit.plots:
        metrics.write_line_chart_svg(
            out / "mean_cumulative.svg",
            [(float(s), v) for s, v in series.mean_cumulative],
            "Mean cumulative reward", "step", "mean cumulative reward",
        )
    return 0


# --- helpers ---------------------------------------------------------------------


def _load_run_table(manifest: RunManifest) -> tables.TransitionTable:
    if manifest.environment.kind == "table":
        path = manifest.environment.table_path
        if path is None:
            raise EmptyInput("environment kind 'table' needs table_path")
    else:
        path = manifest.out_dir / "table.json"
        if not path.exists():
            raise EmptyInput(f"{path} missing; run `promo-gym build` first")
    return tables.deserialize(Path(path).read_text(encoding="utf-8"))


def _ensure_out(manifest: RunManifest) -> Path:
    out = Path(manifest.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_text(path: Path, text: str) -> None:
    path.write_text(text + ("" if text.endswith("\n") else "\n"), encoding="utf-8")


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
