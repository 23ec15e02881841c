"""Command line front end tying calibration, tables, simulation and serving together."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

from . import __version__
from .arrivals import (
    ArrivalModel,
    calibrate,
    model_hash,
    read_delivery_log,
    read_variety_totals,
    read_model,
    write_model,
)
from .domain import TYPE_I, TYPE_II, PressType
from .simulator import (
    ScenarioSpec,
    aggregate_csv,
    build_scenario,
    build_tables,
    consistent_grid,
    episode_csv,
    inconsistency_grid,
    reference_model,
    run_grid,
    simulate_episode,
)
from .valuetable import ValueTable, build_table, read_table, write_table

PRESS_NAMES = {"I": TYPE_I, "II": TYPE_II}
GRIDS = ("consistent", "inconsistent", "inconsistent-full")


@dataclass(frozen=True)
class RunConfig:
    """Everything a command run needs, resolvable from JSON plus flag overrides."""

    deliveries: str | None = None
    variety_totals: str | None = None
    model: str | None = None
    tables: tuple[str, ...] = ()
    out: str = "."
    scenario: ScenarioSpec = field(default_factory=ScenarioSpec)
    grid: str = "consistent"
    episodes: int = 4
    seed: int = 0
    fleet: tuple[str, ...] = ("I", "I", "I", "I", "II", "II")
    policies: tuple[str, ...] = ("dp", "greedy")
    host: str = "127.0.0.1"
    port: int = 8000
    ui: str | None = None

    def __post_init__(self):
        if not self.fleet:
            raise ValueError("fleet must not be empty")
        for name in self.fleet:
            if name not in PRESS_NAMES:
                raise ValueError(f"unknown press type {name!r} (expected one of {sorted(PRESS_NAMES)})")
        if self.grid not in GRIDS:
            raise ValueError(f"unknown grid {self.grid!r} (expected one of {GRIDS})")
        if self.episodes < 1:
            raise ValueError("episodes must be positive")
        if not self.policies:
            raise ValueError("policies must not be empty")

    def press_fleet(self) -> tuple[PressType, ...]:
        return tuple(PRESS_NAMES[name] for name in self.fleet)


def load_config(path: str | Path) -> RunConfig:
    raw = json.loads(Path(path).read_text())
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    known = RunConfig.__dataclass_fields__
    unknown = set(raw) - set(known)
    if unknown:
        raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
    if "scenario" in raw:
        raw["scenario"] = ScenarioSpec(**raw["scenario"])
    for key in ("tables", "fleet", "policies"):
        if key in raw:
            raw[key] = tuple(raw[key])
    return RunConfig(**raw)


def _provenance(command: str, cfg: RunConfig, extra: Mapping[str, str] = {}) -> str:
    lines = [f"# pressplan {__version__}", f"# command: {command}"]
    lines += [f"# {k}: {v}" for k, v in extra.items()]
    lines.append(f"# seed: {cfg.seed}")
    return "\n".join(lines) + "\n"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    print(f"wrote {path}")


def _load_model(cfg: RunConfig) -> ArrivalModel:
    if cfg.model is None:
        return build_scenario(cfg.scenario, reference_model())
    return read_model(cfg.model)


def _load_tables(cfg: RunConfig, model: ArrivalModel) -> dict[PressType, ValueTable]:
    if not cfg.tables:
        return build_tables(model)
    tables = {}
    for path in cfg.tables:
        table = read_table(path)
        table.ensure_model(model)
        tables[table.press_type] = table
    missing = [pt.name for pt in set(cfg.press_fleet()) if pt not in tables]
    if missing:
        raise ValueError(f"no value table loaded for press type(s) {missing}")
    return tables


def cmd_calibrate(cfg: RunConfig) -> int:
    if cfg.deliveries is None or cfg.variety_totals is None:
        raise ValueError("calibrate needs both a delivery log and a variety totals file")
    log = read_delivery_log(cfg.deliveries)
    totals = read_variety_totals(cfg.variety_totals)
    model = calibrate(totals, log)
    out = Path(cfg.out) / "arrival_model.txt"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_model(model, out)
    print(f"wrote {out}")
    print(f"model hash {model_hash(model)}")
    return 0


def cmd_build_tables(cfg: RunConfig) -> int:
    model = _load_model(cfg)
    for press_type in (TYPE_I, TYPE_II):
        table = build_table(press_type, model)
        out = Path(cfg.out) / f"value_table_{press_type.name}.txt"
        out.parent.mkdir(parents=True, exist_ok=True)
        write_table(table, out)
        print(f"wrote {out}")
        print(f"type {press_type.name}: V*(0, empty) = {table.expected_day_value():.4f}")
    return 0


def cmd_simulate(cfg: RunConfig) -> int:
    model = _load_model(cfg)
    tables = _load_tables(cfg, model) if "dp" in cfg.policies else None
    fleet = cfg.press_fleet()
    sid = cfg.scenario.scenario_id if cfg.model is None else f"model:{model_hash(model)[:12]}"
    results = []
    for ep in range(cfg.episodes):
        for policy in cfg.policies:
            results.append(
                simulate_episode(model, fleet, policy, tables, seed=[cfg.seed, ep], scenario_id=sid)
            )
    header = _provenance(
        "simulate", cfg, {"model": model_hash(model), "episodes": str(cfg.episodes)}
    )
    _write(Path(cfg.out) / "episodes.csv", header + episode_csv(results, runtimes=False))
    return 0


def cmd_evaluate(cfg: RunConfig) -> int:
    reference = _load_model(cfg) if cfg.model else reference_model()
    cells = {
        "consistent": consistent_grid,
        "inconsistent": inconsistency_grid,
        "inconsistent-full": lambda: inconsistency_grid(full=True),
    }[cfg.grid]()
    results = run_grid(
        cells,
        reference,
        episodes=cfg.episodes,
        base_seed=cfg.seed,
        fleet=cfg.press_fleet(),
        policies=cfg.policies,
    )
    extra = {
        "reference": model_hash(reference),
        "grid": cfg.grid,
        "episodes": str(cfg.episodes),
    }
    header = _provenance("evaluate", cfg, extra)
    _write(Path(cfg.out) / "grid_episodes.csv", header + episode_csv(results, runtimes=False))
    _write(Path(cfg.out) / "grid_aggregate.csv", header + aggregate_csv(results))
    for policy in cfg.policies:
        rows = [r for r in results if r.policy == policy]
        mean = sum(r.payoff for r in rows) / len(rows)
        print(f"{policy}: {len(rows)} episodes, mean payoff {mean:.2f}")
    return 0


def cmd_serve(cfg: RunConfig) -> int:
    import uvicorn

    from .service import create_app

    if cfg.ui is not None and not Path(cfg.ui).is_dir():
        raise ValueError(f"ui directory {cfg.ui!r} does not exist")
    app = create_app(_load_model(cfg) if cfg.model else None, static_dir=cfg.ui)
    uvicorn.run(app, host=cfg.host, port=cfg.port)
    return 0


COMMANDS = {
    "calibrate": cmd_calibrate,
    "build-tables": cmd_build_tables,
    "simulate": cmd_simulate,
    "evaluate": cmd_evaluate,
    "serve": cmd_serve,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pressplan",
        description="Assign grape deliveries to winery presses: calibrate, plan, simulate, serve.",
    )
    parser.add_argument("--version", action="version", version=f"pressplan {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--seed", type=int, help="base seed override")
        p.add_argument("--out", help="output directory override")

    p = sub.add_parser("calibrate", help="fit an arrival model from delivery logs")
    common(p)
    p.add_argument("--deliveries", help="delivery log CSV")
    p.add_argument("--totals", help="per-variety season totals CSV")

    p = sub.add_parser("build-tables", help="run backward induction for both press types")
    common(p)
    p.add_argument("--model", help="arrival model artifact")

    p = sub.add_parser("simulate", help="run seeded episodes for one scenario")
    common(p)
    p.add_argument("--model", help="arrival model artifact (default: scenario from config)")
    p.add_argument("--episodes", type=int, help="episodes per policy")

    p = sub.add_parser("evaluate", help="run a paired policy-comparison grid")
    common(p)
    p.add_argument("--grid", choices=GRIDS, help="which scenario grid to run")
    p.add_argument("--episodes", type=int, help="episodes per cell and policy")

    p = sub.add_parser("serve", help="serve the interactive session API")
    common(p)
    p.add_argument("--model", help="reference arrival model artifact")
    p.add_argument("--port", type=int, help="listen port")
    p.add_argument("--ui", help="static web client directory to serve at /")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    overrides = {}
    for key in ("seed", "out", "episodes", "grid", "model", "deliveries", "port", "ui"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "totals", None) is not None:
        overrides["variety_totals"] = args.totals
    return replace(cfg, **overrides) if overrides else cfg


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
