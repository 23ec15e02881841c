"""Real-time decision engine for a fleet of presses sharing one truck queue.

Each half-hour interval the engine enumerates joint fill decisions (one
control per press), scores them by immediate payoff plus the per-press
value-table continuation minus imminent queue deterioration, and realizes
one of the maximizers by consuming queued trucks oldest first, splitting
and combining loads as needed.  Aging the queue afterwards applies the
authoritative deterioration charges:

  - waiting 4 intervals degrades a load to the cheapest variety, costing
    (v - 1) * tonnes once;
  - waiting 8 intervals gets the truck sent away, costing its tonnage;
  - anything still queued at close of day forfeits its value v * tonnes.

The joint search is exact: presses in identical (type, state) condition
are interchangeable, so allocations are enumerated as canonical multisets
per press class, with branch-and-bound on an optimistic score bound.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .domain import (
    HORIZON,
    NO_FILL,
    VARIETIES,
    Control,
    PressState,
    PressType,
    Truck,
    gamma,
    payoff,
    transition,
)
from .valuetable import ValueTable, lookup

#: At most this many tonnes may be moved into presses per interval.
WORKFLOW_CAP = 75

_TIE_EPS = 1e-9


@dataclass(frozen=True)
class QueueState:
    """Trucks waiting to unload, ordered oldest first, plus the clock."""

    trucks: tuple[Truck, ...]
    current_t: int

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "trucks", tuple(sorted(self.trucks, key=lambda tr: (tr.arrival, tr.truck_id)))
        )
        for tr in self.trucks:
            age = self.current_t - tr.arrival
            if age < 0:
                raise ValueError(f"truck {tr.truck_id} arrives in the future")
            if age >= 8:
                raise ValueError(f"truck {tr.truck_id} is {age} intervals old; it should have been rejected")
            if age >= 4 and not tr.degraded:
                raise ValueError(f"truck {tr.truck_id} aged past 4 intervals without degrading")

    def availability(self) -> dict[int, int]:
        """Total queued tonnes per (effective) variety."""
        avail = {v: 0 for v in VARIETIES}
        for tr in self.trucks:
            avail[tr.variety] += tr.load_remaining
        return avail


def empty_queue(t: int = 0) -> QueueState:
    return QueueState(trucks=(), current_t=t)


@dataclass(frozen=True)
class LossLedger:
    """Cumulative deterioration costs, in the same units as press payoffs."""

    degradation: float = 0.0
    rejection: float = 0.0
    leftover: float = 0.0

    def __post_init__(self) -> None:
        if self.degradation < 0 or self.rejection < 0 or self.leftover < 0:
            raise ValueError("loss components cannot be negative")

    def __add__(self, other: "LossLedger") -> "LossLedger":
        return LossLedger(
            self.degradation + other.degradation,
            self.rejection + other.rejection,
            self.leftover + other.leftover,
        )

    @property
    def total(self) -> float:
        return self.degradation + self.rejection + self.leftover


@dataclass(frozen=True)
class StrategyRow:
    """One truck-to-press assignment realized within an interval."""

    press_id: int
    truck_id: int
    arrival: int
    variety: int
    tonnes: int


@dataclass(frozen=True)
class FillDecision:
    """A joint allocation (one control per press) and its score."""

    controls: tuple[Control, ...]
    score: float


def age_queue(queue: QueueState, horizon: int = HORIZON) -> tuple[QueueState, LossLedger]:
    """Advance the queue clock by one interval and charge deteriorations.

    Trucks crossing age 4 degrade to variety 1; trucks crossing age 8 are
    removed.  When the clock reaches the horizon the day is over and every
    truck still waiting forfeits its (post-degradation) value.
    """
    t_next = queue.current_t + 1
    degradation = 0.0
    rejection = 0.0
    leftover = 0.0
    kept: list[Truck] = []
    for tr in queue.trucks:
        age = t_next - tr.arrival
        if age >= 8:
            rejection += tr.load_remaining
            continue
        if age >= 4 and not tr.degraded:
            degradation += (tr.variety - 1) * tr.load_remaining
            tr = replace(tr, variety=1, degraded=True)
        kept.append(tr)
    if t_next >= horizon:
        leftover = float(sum(tr.variety * tr.load_remaining for tr in kept))
    new_queue = QueueState(trucks=tuple(kept), current_t=t_next)
    return new_queue, LossLedger(degradation, rejection, leftover)


def loss(queue: QueueState, t: int) -> float:
    """One-step-lookahead deterioration cost of leaving `queue` as is.

    Charges trucks that will cross the degradation threshold at t+1 at
    (v - 1) * tonnes and those that will cross the rejection threshold at
    their full tonnage.  The authoritative charge happens later in
    age_queue; this is the scoring term of the decision search.
    """
    total = 0.0
    for tr in queue.trucks:
        age = t - tr.arrival
        if age == 3:
            total += (tr.variety - 1) * tr.load_remaining
        elif age == 7:
            total += tr.load_remaining
    return total


def _check_tables(
    presses: Sequence[PressState], tables: Mapping[PressType, ValueTable]
) -> tuple[float, ...]:
    hashes = set()
    prices = None
    for p in presses:
        if p.press_type not in tables:
            raise ValueError(f"no value table for press type {p.press_type.name}")
        table = tables[p.press_type]
        hashes.add(table.model_hash)
        if prices is None:
            prices = table.prices
        elif table.prices != prices:
            raise ValueError("value tables disagree on prices")
    if len(hashes) > 1:
        raise ValueError(f"value tables were built from different arrival models: {sorted(hashes)}")
    return prices if prices is not None else (1.0, 2.0, 3.0, 4.0)


def _variety_loss_curves(queue: QueueState, t: int, avail: dict[int, int]) -> dict[int, list[float]]:
    """loss restricted to variety v after consuming 5u tonnes oldest-first.

    curves[v][u] is the imminent deterioration charge of what remains of
    variety v when the u oldest 5 t units have been unloaded.
    """
    curves: dict[int, list[float]] = {}
    for v in VARIETIES:
        trucks = [tr for tr in queue.trucks if tr.variety == v]
        curve = []
        for u in range(avail[v] // 5 + 1):
            rem = 5 * u
            charge = 0.0
            for tr in trucks:
                take = min(rem, tr.load_remaining)
                rem -= take
                left = tr.load_remaining - take
                if left:
                    age = t - tr.arrival
                    if age == 3:
                        charge += (tr.variety - 1) * left
                    elif age == 7:
                        charge += left
            curve.append(charge)
        curves[v] = curve
    return curves


def fill_decisions(
    presses: Sequence[PressState],
    queue: QueueState,
    t: int,
    tables: Mapping[PressType, ValueTable],
    cap: int = WORKFLOW_CAP,
) -> list[FillDecision]:
    """All score-maximizing joint allocations at interval `t`.

    Scores are immediate payoff plus next-interval table value summed over
    presses, minus the imminent deterioration of the queue remainder.
    Decisions differing only by permuting presses in identical condition
    are collapsed to one canonical representative.
    """
    prices = _check_tables(presses, tables)
    avail = queue.availability()
    curves = _variety_loss_curves(queue, t, avail)

    # group interchangeable presses and enumerate their scored options
    by_class: dict[tuple, list[int]] = {}
    for idx, p in enumerate(presses):
        by_class.setdefault((p.press_type, p.key()), []).append(idx)

    classes = []  # (press indices, options sorted by delta desc)
    base_value = 0.0
    for (_, _), indices in sorted(by_class.items(), key=lambda kv: kv[1][0]):
        state = presses[indices[0]]
        table = tables[state.press_type]
        hold = lookup(table, t + 1, transition(t, state, NO_FILL))
        base_value += hold * len(indices)
        options = [(0.0, NO_FILL)]
        for ctrl in gamma(t, state):
            if ctrl.is_no_fill or ctrl.tonnes > avail[ctrl.variety] or ctrl.tonnes > cap:
                continue
            gain = payoff(t, state, ctrl, prices) + lookup(table, t + 1, transition(t, state, ctrl))
            options.append((gain - hold, ctrl))
        options.sort(key=lambda o: (-o[0], o[1].variety, o[1].tonnes))
        classes.append((indices, options))
    classes.sort(key=lambda c: -c[1][0][0])

    # optimistic per-class and savings bounds for pruning
    suffix_best = [
        [max(d for d, _ in options[r:]) for r in range(len(options))] for _, options in classes
    ]
    tail_bound = [0.0] * (len(classes) + 1)
    for i in range(len(classes) - 1, -1, -1):
        tail_bound[i] = tail_bound[i + 1] + len(classes[i][0]) * max(0.0, suffix_best[i][0])
    max_saving = {v: curves[v][0] - min(curves[v]) for v in VARIETIES}

    best = -float("inf")
    found: list[tuple[float, list[list[Control]]]] = []
    consumed = {v: 0 for v in VARIETIES}
    picks: list[list[Control]] = [[] for _ in classes]

    def leaf_score(delta_sum: float) -> float:
        return base_value + delta_sum - sum(curves[v][consumed[v] // 5] for v in VARIETIES)

    def bound(ci: int, rank: int, slots_left: int, delta_sum: float) -> float:
        b = delta_sum + tail_bound[ci + 1] if ci < len(classes) else delta_sum
        if ci < len(classes):
            b += slots_left * max(0.0, suffix_best[ci][rank])
        b += sum(max_saving[v] for v in VARIETIES)
        return base_value + b

    def dfs(ci: int, slot: int, min_rank: int, cap_left: int, delta_sum: float) -> None:
        nonlocal best
        if ci == len(classes):
            score = leaf_score(delta_sum)
            if score > best + _TIE_EPS:
                best = score
                found.clear()
            if score >= best - _TIE_EPS:
                found.append((score, [list(p) for p in picks]))
            return
        indices, options = classes[ci]
        if slot == len(indices):
            dfs(ci + 1, 0, 0, cap_left, delta_sum)
            return
        if bound(ci, min_rank, len(indices) - slot, delta_sum) < best - _TIE_EPS:
            return
        for rank in range(min_rank, len(options)):
            delta, ctrl = options[rank]
            if not ctrl.is_no_fill:
                if ctrl.tonnes > cap_left or consumed[ctrl.variety] + ctrl.tonnes > avail[ctrl.variety]:
                    continue
                consumed[ctrl.variety] += ctrl.tonnes
                picks[ci].append(ctrl)
                dfs(ci, slot + 1, rank, cap_left - ctrl.tonnes, delta_sum + delta)
                picks[ci].pop()
                consumed[ctrl.variety] -= ctrl.tonnes
            else:
                picks[ci].append(ctrl)
                dfs(ci, slot + 1, rank, cap_left, delta_sum + delta)
                picks[ci].pop()

    dfs(0, 0, 0, cap, 0.0)

    decisions = []
    for score, class_picks in found:
        if score < best - _TIE_EPS:
            continue
        controls = [NO_FILL] * len(presses)
        for (indices, _), chosen in zip(classes, class_picks):
            for press_idx, ctrl in zip(indices, chosen):
                controls[press_idx] = ctrl
        decisions.append(FillDecision(controls=tuple(controls), score=score))
    decisions.sort(key=lambda d: tuple((c.variety, c.tonnes) for c in d.controls))
    return decisions


def score_decision(
    presses: Sequence[PressState],
    queue: QueueState,
    t: int,
    tables: Mapping[PressType, ValueTable],
    controls: Sequence[Control],
    cap: int = WORKFLOW_CAP,
) -> float:
    """Recompute a decision's score from first principles (for verification).

    Applies the controls literally: checks feasibility, consumes the queue
    oldest first, and evaluates payoff + continuation - loss on the result.
    """
    prices = _check_tables(presses, tables)
    if len(controls) != len(presses):
        raise ValueError("one control per press required")
    if sum(c.tonnes for c in controls) > cap:
        raise ValueError(f"decision moves more than {cap} t in one interval")
    remaining = {tr.truck_id: tr.load_remaining for tr in queue.trucks}
    total = 0.0
    for state, ctrl in zip(presses, controls):
        if ctrl not in gamma(t, state):
            raise ValueError(f"control {ctrl} infeasible for press {state.key()}")
        total += payoff(t, state, ctrl, prices)
        total += lookup(tables[state.press_type], t + 1, transition(t, state, ctrl))
        need = ctrl.tonnes
        for tr in queue.trucks:
            if need == 0:
                break
            if tr.variety != ctrl.variety or remaining[tr.truck_id] == 0:
                continue
            take = min(need, remaining[tr.truck_id])
            remaining[tr.truck_id] -= take
            need -= take
        if need:
            raise ValueError(f"queue cannot supply {ctrl.tonnes} t of variety {ctrl.variety}")
    after = QueueState(
        trucks=tuple(
            replace(tr, load_remaining=remaining[tr.truck_id])
            for tr in queue.trucks
            if remaining[tr.truck_id] > 0
        ),
        current_t=queue.current_t,
    )
    return total - loss(after, t)


@dataclass(frozen=True)
class RunResult:
    """Outcome of executing one interval's chosen decision."""

    rows: tuple[StrategyRow, ...]
    queue: QueueState
    presses: tuple[PressState, ...]
    decision: FillDecision
    income: float


def decision_rows(queue: QueueState, controls: Sequence[Control]) -> list[StrategyRow]:
    """Translate per-press controls into truck-level strategy rows.

    Consumes trucks of the needed variety oldest first, splitting a truck
    when only part of its load fits and combining several trucks when a
    single press takes more than one truckload.
    """
    remaining = {tr.truck_id: tr.load_remaining for tr in queue.trucks}
    rows: list[StrategyRow] = []
    for press_id, ctrl in enumerate(controls):
        need = ctrl.tonnes
        for tr in queue.trucks:
            if need == 0:
                break
            if tr.variety != ctrl.variety or remaining[tr.truck_id] == 0:
                continue
            take = min(need, remaining[tr.truck_id])
            remaining[tr.truck_id] -= take
            need -= take
            rows.append(StrategyRow(press_id, tr.truck_id, tr.arrival, ctrl.variety, take))
        if need:  # callers screen options against availability first
            raise RuntimeError(f"allocation underfilled by {need} t of variety {ctrl.variety}")
    return rows


def run_model(
    presses: Sequence[PressState],
    queue: QueueState,
    t: int,
    tables: Mapping[PressType, ValueTable],
    rng: np.random.Generator,
    cap: int = WORKFLOW_CAP,
) -> RunResult:
    """Pick one maximizer uniformly at random (seeded) and realize it."""
    decisions = fill_decisions(presses, queue, t, tables, cap)
    chosen = decisions[int(rng.integers(len(decisions)))]
    prices = _check_tables(presses, tables)

    rows = decision_rows(queue, chosen.controls)
    remaining = {tr.truck_id: tr.load_remaining for tr in queue.trucks}
    for r in rows:
        remaining[r.truck_id] -= r.tonnes
    income = 0.0
    new_presses = []
    for state, ctrl in zip(presses, chosen.controls):
        income += payoff(t, state, ctrl, prices)
        new_presses.append(transition(t, state, ctrl))
    new_queue = QueueState(
        trucks=tuple(
            replace(tr, load_remaining=remaining[tr.truck_id])
            for tr in queue.trucks
            if remaining[tr.truck_id] > 0
        ),
        current_t=queue.current_t,
    )
    return RunResult(
        rows=tuple(rows),
        queue=new_queue,
        presses=tuple(new_presses),
        decision=chosen,
        income=income,
    )


def strategy_text(t: int, rows: Sequence[StrategyRow]) -> str:
    """Tabular text export of one interval's realized assignments."""
    lines = ["interval press_id truck_id arrival variety tonnes"]
    for r in rows:
        lines.append(f"{t} {r.press_id} {r.truck_id} {r.arrival} {r.variety} {r.tonnes}")
    return "\n".join(lines) + "\n"
