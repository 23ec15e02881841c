"""Decision support for assigning grape deliveries to winery presses.

The package splits into layers: `domain` holds the press/truck mechanics,
`arrivals` models and calibrates the delivery process, `valuetable` runs
the backward induction, `engine` turns tables into per-interval fleet
decisions, `simulator` evaluates policies on synthetic days, and
`service`/`cli` expose the whole thing to people and scripts.
"""

from .arrivals import (
    ArrivalModel,
    calibrate,
    model_hash,
    presence_probability,
    read_delivery_log,
    read_model,
    read_variety_totals,
    sample_interval_arrivals,
    validate_day_model,
    write_model,
)
from .domain import (
    DEFAULT_PRICES,
    HORIZON,
    TYPE_I,
    TYPE_II,
    Control,
    PressState,
    PressType,
    Truck,
    empty_press,
    gamma,
    payoff,
    reachable_states,
    transition,
)
from .engine import (
    WORKFLOW_CAP,
    FillDecision,
    LossLedger,
    QueueState,
    StrategyRow,
    decision_rows,
    fill_decisions,
    run_model,
    strategy_text,
)
from .simulator import (
    DEFAULT_FLEET,
    EpisodeResult,
    GridCell,
    ScenarioSpec,
    aggregate_csv,
    baseline_greedy,
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

__version__ = "0.1.0"

__all__ = [
    "ArrivalModel",
    "Control",
    "DEFAULT_FLEET",
    "DEFAULT_PRICES",
    "EpisodeResult",
    "FillDecision",
    "GridCell",
    "HORIZON",
    "LossLedger",
    "PressState",
    "PressType",
    "QueueState",
    "ScenarioSpec",
    "StrategyRow",
    "Truck",
    "TYPE_I",
    "TYPE_II",
    "ValueTable",
    "WORKFLOW_CAP",
    "aggregate_csv",
    "baseline_greedy",
    "build_scenario",
    "build_table",
    "build_tables",
    "calibrate",
    "consistent_grid",
    "decision_rows",
    "empty_press",
    "episode_csv",
    "fill_decisions",
    "gamma",
    "inconsistency_grid",
    "model_hash",
    "payoff",
    "presence_probability",
    "reachable_states",
    "read_delivery_log",
    "read_model",
    "read_table",
    "read_variety_totals",
    "reference_model",
    "run_grid",
    "run_model",
    "sample_interval_arrivals",
    "simulate_episode",
    "strategy_text",
    "transition",
    "validate_day_model",
    "write_model",
    "write_table",
]
