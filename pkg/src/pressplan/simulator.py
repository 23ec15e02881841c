"""Scenario generation, day-long episode simulation, policy comparison.

Test scenarios manipulate one aspect of the delivery process at a time,
holding the other two at their reference (real-data) settings:

  - variety dominance: which varieties are over-represented (16 profiles);
  - frequency shape: how deliveries spread over the day (two peaks, four
    peaks, uniform, or the reference profile), always mass-preserving;
  - intensity: total delivery volume scaled by 0.5, 1, or 1.5.

Episodes run the full 34-interval day: sample arrivals, let a policy
assign trucks, age the queue.  The dynamic-programming policy and the
FIFO-greedy baseline are compared on bitwise-identical arrival streams,
including deliberately inconsistent cells where the value tables were
built from a different model than the one generating the queue.
"""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .arrivals import ArrivalModel, sample_interval_arrivals
from .domain import (
    HORIZON,
    NO_FILL,
    TYPE_I,
    TYPE_II,
    Control,
    PressState,
    PressType,
    Truck,
    empty_press,
    gamma,
    payoff,
    transition,
)
from .engine import (
    WORKFLOW_CAP,
    LossLedger,
    QueueState,
    StrategyRow,
    age_queue,
    empty_queue,
    run_model,
)
from .valuetable import ValueTable, build_table

#: Table 2 of the study design: variety marginals, digits = dominating varieties.
VARIETY_PROFILES: dict[str, tuple[float, float, float, float]] = {
    "v1": (0.7, 0.1, 0.1, 0.1),
    "v12": (0.4, 0.4, 0.1, 0.1),
    "v123": (0.3, 0.3, 0.3, 0.1),
    "v124": (0.3, 0.3, 0.1, 0.3),
    "v13": (0.4, 0.1, 0.4, 0.1),
    "v134": (0.3, 0.1, 0.3, 0.3),
    "v14": (0.4, 0.1, 0.1, 0.4),
    "v2": (0.1, 0.7, 0.1, 0.1),
    "v23": (0.1, 0.4, 0.4, 0.1),
    "v234": (0.1, 0.3, 0.3, 0.3),
    "v24": (0.1, 0.4, 0.1, 0.4),
    "v3": (0.1, 0.1, 0.7, 0.1),
    "v34": (0.1, 0.1, 0.4, 0.4),
    "v4": (0.1, 0.1, 0.1, 0.7),
    "vU": (0.25, 0.25, 0.25, 0.25),
    "vR": (0.06, 0.0, 0.2, 0.74),
}

FREQUENCY_SHAPES = ("fP2", "fP4", "fU", "fR")
INTENSITY_SCALES = (0.5, 1.0, 1.5)

#: Deliveries arrive on the first 32 of the 34 intervals.
DELIVERY_INTERVALS = HORIZON - 2

#: Reference per-interval intensities (a stated convention standing in for
#: the unpublished real Tuesday profile): morning ramp-up with short dips,
#: a late-morning plateau, and a slow decline into the night shift.
REFERENCE_LAMBDA = (
    2.0, 3.5, 4.5, 2.5, 4.5, 5.0, 5.5, 3.0, 5.5, 6.0, 6.0, 5.5, 5.5, 5.0,
    5.0, 5.0, 5.0, 4.5, 4.5, 4.0, 4.0, 4.0, 3.5, 2.0, 3.5, 3.0, 2.5, 2.0,
    1.5, 1.5, 1.0, 0.5, 0.0, 0.0,
)

REFERENCE_P_WEIGHT = (0.20, 0.30, 0.25, 0.15, 0.10)

DEFAULT_FLEET: tuple[PressType, ...] = (TYPE_I,) * 4 + (TYPE_II,) * 2


def reference_model() -> ArrivalModel:
    """The calibration stand-in all scenarios are derived from."""
    return ArrivalModel(
        horizon=HORIZON,
        lam=REFERENCE_LAMBDA,
        p_variety=VARIETY_PROFILES["vR"],
        p_weight=REFERENCE_P_WEIGHT,
    )


@dataclass(frozen=True)
class ScenarioSpec:
    """One test scenario: variety profile, frequency shape, intensity scale."""

    variety_profile: str = "vR"
    frequency_shape: str = "fR"
    intensity_scale: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.variety_profile not in VARIETY_PROFILES:
            raise ValueError(f"unknown variety profile {self.variety_profile!r}")
        if self.frequency_shape not in FREQUENCY_SHAPES:
            raise ValueError(f"unknown frequency shape {self.frequency_shape!r}")
        if self.intensity_scale <= 0:
            raise ValueError("intensity scale must be positive")

    @property
    def scenario_id(self) -> str:
        scale = f"{self.intensity_scale:g}"
        return f"{self.variety_profile}_{self.frequency_shape}_i{scale}"


def _peak_profile(total: float, centers: Sequence[float]) -> list[float]:
    """Symmetric triangular bumps of equal mass at the given window centers.

    Each bump spans six intervals weighted 1:2:3:3:2:1 around its center;
    the bumps together carry exactly `total` expected deliveries.
    """
    lam = [0.0] * HORIZON
    weights = (1, 2, 3, 3, 2, 1)
    mass = total / len(centers)
    for center in centers:
        start = int(center) - 2
        for k, w in enumerate(weights):
            idx = start + k
            if 0 <= idx < DELIVERY_INTERVALS:
                lam[idx] += mass * w / sum(weights)
    return lam


def build_scenario(spec: ScenarioSpec, reference: ArrivalModel) -> ArrivalModel:
    """Derive a scenario's arrival model from the reference model."""
    total = sum(reference.lam)
    if spec.frequency_shape == "fR":
        lam = list(reference.lam)
    elif spec.frequency_shape == "fU":
        lam = [total / DELIVERY_INTERVALS] * DELIVERY_INTERVALS + [0.0, 0.0]
    elif spec.frequency_shape == "fP2":
        lam = _peak_profile(total, [DELIVERY_INTERVALS / 3, 2 * DELIVERY_INTERVALS / 3])
    elif spec.frequency_shape == "fP4":
        lam = _peak_profile(total, [DELIVERY_INTERVALS * q / 5 for q in (1, 2, 3, 4)])
    else:  # unreachable: ScenarioSpec validates
        raise ValueError(f"unknown frequency shape {spec.frequency_shape!r}")
    lam = [x * spec.intensity_scale for x in lam]
    return ArrivalModel(
        horizon=reference.horizon,
        lam=tuple(lam),
        p_variety=VARIETY_PROFILES[spec.variety_profile],
        p_weight=reference.p_weight,
    )


def build_tables(model: ArrivalModel, fleet: Sequence[PressType] = DEFAULT_FLEET) -> dict[PressType, ValueTable]:
    return {pt: build_table(pt, model) for pt in dict.fromkeys(fleet)}


# --- policies --------------------------------------------------------------------


def baseline_greedy(
    presses: Sequence[PressState], queue: QueueState, t: int, cap: int = WORKFLOW_CAP
) -> list[StrategyRow]:
    """FIFO stand-in for manual assignment: no lookahead, no value table.

    Repeatedly takes the oldest truck with load left and pours as much as
    fits into the first compatible press (empty or same variety, spare
    space and interval budget permitting).
    """
    rows: list[StrategyRow] = []
    load = {tr.truck_id: tr.load_remaining for tr in queue.trucks}
    fill: dict[int, tuple[int, int]] = {}  # press idx -> (variety, tonnes added)
    cap_left = cap
    progress = True
    while progress and cap_left > 0:
        progress = False
        for tr in queue.trucks:  # oldest first
            if load[tr.truck_id] == 0:
                continue
            for idx, press in enumerate(presses):
                if press.is_processing:
                    continue
                variety, added = fill.get(idx, (press.variety, press.load))
                if variety not in (0, tr.variety):
                    continue
                spare = press.press_type.capacity - added
                take = min(load[tr.truck_id], spare, cap_left)
                take -= take % 5
                if take <= 0:
                    continue
                rows.append(StrategyRow(idx, tr.truck_id, tr.arrival, tr.variety, take))
                fill[idx] = (tr.variety, added + take)
                load[tr.truck_id] -= take
                cap_left -= take
                progress = True
                break
            if progress:
                break
    return rows


def make_dp_policy(tables: Mapping[PressType, ValueTable], cap: int = WORKFLOW_CAP) -> Callable:
    """Policy wrapper around the decision engine, for simulate_episode."""

    def dp(presses, queue, t, rng):
        return list(run_model(presses, queue, t, tables, rng, cap).rows)

    dp.__name__ = "dp"
    return dp


# --- episode execution -------------------------------------------------------------


def apply_rows(
    presses: Sequence[PressState],
    queue: QueueState,
    t: int,
    rows: Sequence[StrategyRow],
    prices: tuple[float, ...] = (1.0, 2.0, 3.0, 4.0),
    cap: int = WORKFLOW_CAP,
) -> tuple[tuple[PressState, ...], QueueState, float]:
    """Execute assignment rows, enforcing every feasibility rule.

    This is the single execution path all policies go through: it checks
    the interval budget, truck identity/variety/quantity, and per-press
    feasibility, then advances presses one interval and returns income.
    """
    if sum(r.tonnes for r in rows) > cap:
        raise ValueError(f"assignments move more than {cap} t in one interval")
    trucks = {tr.truck_id: tr for tr in queue.trucks}
    load = {tr.truck_id: tr.load_remaining for tr in queue.trucks}
    per_press: dict[int, tuple[int, int]] = {}
    for r in rows:
        if r.truck_id not in trucks:
            raise ValueError(f"unknown truck {r.truck_id}")
        tr = trucks[r.truck_id]
        if not 0 <= r.press_id < len(presses):
            raise ValueError(f"unknown press {r.press_id}")
        if r.variety != tr.variety or r.arrival != tr.arrival:
            raise ValueError(f"row does not match truck {r.truck_id}")
        if r.tonnes <= 0 or r.tonnes % 5 != 0 or r.tonnes > load[r.truck_id]:
            raise ValueError(f"cannot take {r.tonnes} t from truck {r.truck_id}")
        load[r.truck_id] -= r.tonnes
        variety, tonnes = per_press.get(r.press_id, (r.variety, 0))
        if variety != r.variety:
            raise ValueError(f"press {r.press_id} given mixed varieties in one interval")
        per_press[r.press_id] = (variety, tonnes + r.tonnes)

    income = 0.0
    new_presses = []
    for idx, press in enumerate(presses):
        variety, tonnes = per_press.get(idx, (0, 0))
        control = Control(variety, tonnes) if tonnes else NO_FILL
        if control not in gamma(t, press):
            raise ValueError(f"control {control} infeasible for press {idx} in state {press.key()}")
        income += payoff(t, press, control, prices)
        new_presses.append(transition(t, press, control))
    new_queue = QueueState(
        trucks=tuple(
            Truck(tr.truck_id, tr.variety, load[tr.truck_id], tr.arrival, tr.degraded)
            for tr in queue.trucks
            if load[tr.truck_id] > 0
        ),
        current_t=queue.current_t,
    )
    return tuple(new_presses), new_queue, income


@dataclass(frozen=True)
class EpisodeResult:
    """Outcome of one simulated day under one policy."""

    scenario_id: str
    policy: str
    seed: int
    payoff: float
    losses: LossLedger
    log: tuple[tuple[int, tuple[StrategyRow, ...]], ...]
    tonnes_delivered: int
    tonnes_pressed: int
    tonnes_rejected: int
    tonnes_left: int
    runtime_ms: float = field(compare=False, default=0.0)


def simulate_episode(
    model: ArrivalModel,
    fleet: Sequence[PressType],
    policy: str | Callable,
    tables: Mapping[PressType, ValueTable] | None,
    seed,
    scenario_id: str = "",
    cap: int = WORKFLOW_CAP,
) -> EpisodeResult:
    """Run one full day: sample arrivals, let the policy assign, age the queue.

    Arrival and tie-breaking randomness come from separate streams derived
    from the seed, so two policies given the same seed face bitwise
    identical delivery realizations.
    """
    if policy == "dp":
        if tables is None:
            raise ValueError("dp policy needs value tables")
        step = make_dp_policy(tables, cap)
        policy_id = "dp"
    elif policy == "greedy":
        step = lambda presses, queue, t, rng: baseline_greedy(presses, queue, t, cap)
        policy_id = "greedy"
    elif callable(policy):
        step = policy
        policy_id = getattr(policy, "__name__", "custom")
    else:
        raise ValueError(f"unknown policy {policy!r}")

    arrival_rng = np.random.default_rng([seed, 0] if np.isscalar(seed) else list(seed) + [0])
    policy_rng = np.random.default_rng([seed, 1] if np.isscalar(seed) else list(seed) + [1])

    started = _time.perf_counter()
    presses: tuple[PressState, ...] = tuple(empty_press(pt) for pt in fleet)
    queue = empty_queue(0)
    ledger = LossLedger()
    total_income = 0.0
    delivered = pressed = 0
    log = []
    next_id = 1
    for t in range(model.horizon):
        trucks = list(queue.trucks)
        for v, l in sample_interval_arrivals(model, t, arrival_rng):
            trucks.append(Truck(next_id, v, l, arrival=t))
            delivered += l
            next_id += 1
        queue = QueueState(tuple(trucks), t)
        rows = tuple(step(presses, queue, t, policy_rng))
        presses, queue, income = apply_rows(presses, queue, t, rows, cap=cap)
        total_income += income
        pressed += sum(r.tonnes for r in rows)
        log.append((t, rows))
        queue, charge = age_queue(queue, model.horizon)
        ledger = ledger + charge
    return EpisodeResult(
        scenario_id=scenario_id,
        policy=policy_id,
        seed=int(seed) if np.isscalar(seed) else int(seed[-1]),
        payoff=total_income,
        losses=ledger,
        log=tuple(log),
        tonnes_delivered=delivered,
        tonnes_pressed=pressed,
        tonnes_rejected=int(ledger.rejection),
        tonnes_left=sum(tr.load_remaining for tr in queue.trucks),
        runtime_ms=(_time.perf_counter() - started) * 1000.0,
    )


# --- evaluation grids ----------------------------------------------------------------


def consistent_grid() -> list[ScenarioSpec]:
    """The 21 one-aspect-at-a-time scenarios (16 variety + 3 frequency + 2 intensity)."""
    specs = [ScenarioSpec(variety_profile=v) for v in VARIETY_PROFILES]
    specs += [ScenarioSpec(frequency_shape=f) for f in FREQUENCY_SHAPES if f != "fR"]
    specs += [ScenarioSpec(intensity_scale=i) for i in INTENSITY_SCALES if i != 1.0]
    return specs


@dataclass(frozen=True)
class GridCell:
    """A sampled scenario paired with the scenario the tables expect."""

    sample: ScenarioSpec
    expected: ScenarioSpec

    @property
    def cell_id(self) -> str:
        if self.sample == self.expected:
            return self.sample.scenario_id
        return f"{self.sample.scenario_id}~expect:{self.expected.scenario_id}"


def inconsistency_grid(full: bool = False) -> list[GridCell]:
    """Mismatched (actual, expected) cells, one aspect off at a time.

    The full grid pairs every ordered combination within each aspect
    (240 + 12 + 6 = 258 cells); the reduced default keeps the reference
    as the sampled scenario and mismatches the expectation (33 cells).
    """
    cells = []
    varieties = list(VARIETY_PROFILES)
    for sv in varieties if full else ["vR"]:
        for ev in varieties:
            if sv != ev:
                cells.append(
                    GridCell(ScenarioSpec(variety_profile=sv), ScenarioSpec(variety_profile=ev))
                )
    for sf in FREQUENCY_SHAPES:
        for ef in FREQUENCY_SHAPES:
            if sf != ef:
                cells.append(
                    GridCell(ScenarioSpec(frequency_shape=sf), ScenarioSpec(frequency_shape=ef))
                )
    for si in INTENSITY_SCALES:
        for ei in INTENSITY_SCALES:
            if si != ei:
                cells.append(
                    GridCell(ScenarioSpec(intensity_scale=si), ScenarioSpec(intensity_scale=ei))
                )
    return cells


def run_grid(
    cells: Sequence[GridCell | ScenarioSpec],
    reference: ArrivalModel | None = None,
    episodes: int = 4,
    base_seed: int = 0,
    fleet: Sequence[PressType] = DEFAULT_FLEET,
    policies: Sequence[str] = ("dp", "greedy"),
) -> list[EpisodeResult]:
    """Paired evaluation over grid cells; every policy sees the same queues.

    Value tables are built once per distinct expected scenario.  Episode
    seeds derive deterministically from (base_seed, cell index, episode).
    """
    reference = reference or reference_model()
    norm_cells = [c if isinstance(c, GridCell) else GridCell(c, c) for c in cells]
    tables_cache: dict[ScenarioSpec, dict] = {}
    models_cache: dict[ScenarioSpec, ArrivalModel] = {}
    results = []
    for ci, cell in enumerate(norm_cells):
        strip = lambda s: ScenarioSpec(s.variety_profile, s.frequency_shape, s.intensity_scale)
        sample_spec, expected_spec = strip(cell.sample), strip(cell.expected)
        if sample_spec not in models_cache:
            models_cache[sample_spec] = build_scenario(sample_spec, reference)
        if expected_spec not in tables_cache:
            expected_model = models_cache.setdefault(
                expected_spec, build_scenario(expected_spec, reference)
            )
            tables_cache[expected_spec] = build_tables(expected_model, fleet)
        sample_model = models_cache[sample_spec]
        tables = tables_cache[expected_spec]
        for ep in range(episodes):
            for policy in policies:
                results.append(
                    simulate_episode(
                        sample_model,
                        fleet,
                        policy,
                        tables if policy == "dp" else None,
                        seed=[base_seed, ci, ep],
                        scenario_id=cell.cell_id,
                    )
                )
    return results


# --- result CSVs ----------------------------------------------------------------------


def episode_csv(results: Sequence[EpisodeResult], runtimes: bool = True) -> str:
    """One row per episode.  With runtimes=False the timing column is left
    blank so reruns with the same seeds produce identical bytes."""
    lines = ["scenario_id,policy,seed,payoff,degradation_loss,rejection_loss,leftover_loss,runtime_ms"]
    for r in results:
        ms = f"{r.runtime_ms:.3f}" if runtimes else ""
        lines.append(
            f"{r.scenario_id},{r.policy},{r.seed},{r.payoff!r},{r.losses.degradation!r},"
            f"{r.losses.rejection!r},{r.losses.leftover!r},{ms}"
        )
    return "\n".join(lines) + "\n"


def aggregate_csv(results: Sequence[EpisodeResult]) -> str:
    """Per-cell means for each policy plus the relative payoff advantage."""
    cells: dict[str, dict[str, list[EpisodeResult]]] = {}
    for r in results:
        cells.setdefault(r.scenario_id, {}).setdefault(r.policy, []).append(r)
    lines = [
        "scenario_id,episodes,payoff_dp,payoff_greedy,advantage_pct,"
        "degradation_dp,degradation_greedy,rejection_dp,rejection_greedy,leftover_dp,leftover_greedy"
    ]
    for cell_id in sorted(cells):
        by_policy = cells[cell_id]
        dp = by_policy.get("dp", [])
        greedy = by_policy.get("greedy", [])
        mean = lambda rs, f: sum(f(r) for r in rs) / len(rs) if rs else float("nan")
        p_dp = mean(dp, lambda r: r.payoff)
        p_gr = mean(greedy, lambda r: r.payoff)
        adv = (p_dp - p_gr) / p_gr * 100.0 if greedy and p_gr else float("nan")
        lines.append(
            f"{cell_id},{max(len(dp), len(greedy))},{p_dp!r},{p_gr!r},{adv:.4f},"
            f"{mean(dp, lambda r: r.losses.degradation)!r},{mean(greedy, lambda r: r.losses.degradation)!r},"
            f"{mean(dp, lambda r: r.losses.rejection)!r},{mean(greedy, lambda r: r.losses.rejection)!r},"
            f"{mean(dp, lambda r: r.losses.leftover)!r},{mean(greedy, lambda r: r.losses.leftover)!r}"
        )
    return "\n".join(lines) + "\n"
