"""Backward induction of the optimal expected-payoff table for one press.

The table answers, for every interval and every reachable press state,
"what is the best expected payoff from here to close of day if deliveries
behave like the calibrated model".  It treats the press in isolation and
optimises over whole truck types; the interaction effects of a real fleet
(splitting loads, the per-interval workflow cap, queue deterioration) are
resolved later by the one-step optimiser that consumes these tables.

The expectation over which truck types show up is computed exactly: the
per-type presence indicators are independent Bernoullis, so the expected
best available option follows from ranking the candidates by value and
walking down the ranking (each rank is chosen when it is present and all
better-valued candidates are not).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .arrivals import ArrivalModel, model_hash, presence_probability
from .domain import (
    DEFAULT_PRICES,
    NO_FILL,
    PressState,
    PressType,
    iter_type_controls,
    payoff,
    reachable_states,
    transition,
)

StateKey = tuple[int, int, int]


def rank_expectation(q0: float, options: Iterable[tuple[float, float]]) -> float:
    """E[value of the best available option], fallback q0 always available.

    `options` are (value, presence probability) pairs with independent
    presence.  Options not strictly better than q0 are ignored; the rest
    are taken in descending value order, each contributing value * P(it
    is the best one present).
    """
    ranked = sorted((o for o in options if o[0] > q0), key=lambda o: -o[0])
    expect = 0.0
    none_better = 1.0
    for q, pi in ranked:
        expect += q * pi * none_better
        none_better *= 1.0 - pi
    return expect + q0 * none_better


def candidate_options(
    t: int,
    state: PressState,
    next_slice: Mapping[StateKey, float],
    model: ArrivalModel,
    prices: tuple[float, ...] = DEFAULT_PRICES,
) -> tuple[float, list[tuple[float, float, StateKey]]]:
    """Fallback value q0 and per-truck-type (value, presence, successor) list.

    The list enumerates every truck type that fits the press, valued by
    immediate payoff plus continuation; feasibility screening against q0
    happens in rank_expectation.
    """
    try:
        q0 = payoff(t, state, NO_FILL, prices) + next_slice[transition(t, state, NO_FILL).key()]
        options = []
        for tt, ctrl in iter_type_controls(state):
            succ = transition(t, state, ctrl).key()
            q = payoff(t, state, ctrl, prices) + next_slice[succ]
            options.append((q, presence_probability(model, t, tt.index), succ))
        return q0, options
    except KeyError as exc:
        raise ValueError(f"next slice is missing successor state {exc.args[0]}") from exc


def bellman_step(
    t: int,
    state: PressState,
    next_slice: Mapping[StateKey, float],
    model: ArrivalModel,
    prices: tuple[float, ...] = DEFAULT_PRICES,
) -> float:
    """One backward-induction update: expected best payoff at (t, state)."""
    q0, options = candidate_options(t, state, next_slice, model, prices)
    return rank_expectation(q0, [(q, pi) for q, pi, _ in options])


@dataclass
class ValueTable:
    """Finished table for one press type, pinned to the model that built it."""

    press_type: PressType
    horizon: int
    model_hash: str
    prices: tuple[float, ...]
    values: dict[tuple[int, StateKey], float] = field(repr=False)

    def value(self, t: int, state: PressState) -> float:
        return lookup(self, t, state)

    def slice_at(self, t: int) -> dict[StateKey, float]:
        out = {key: v for (tt, key), v in self.values.items() if tt == t}
        if not out:
            raise ValueError(f"table has no slice at t={t}")
        return out

    def ensure_model(self, model: ArrivalModel) -> None:
        """Guard against pairing this table with a different arrival model."""
        have = model_hash(model)
        if have != self.model_hash:
            raise ValueError(
                f"value table was built for a different arrival model "
                f"(table has {self.model_hash}, model is {have})"
            )

    def expected_day_value(self) -> float:
        return self.values[(0, (0, 0, 0))]


def build_table(
    press_type: PressType, model: ArrivalModel, prices: tuple[float, ...] = DEFAULT_PRICES
) -> ValueTable:
    """Fill every slice from the zero terminal boundary back to t = 0."""
    states = reachable_states(press_type)
    T = model.horizon
    values: dict[tuple[int, StateKey], float] = {(T, s.key()): 0.0 for s in states}
    for t in range(T - 1, -1, -1):
        next_slice = {s.key(): values[(t + 1, s.key())] for s in states}
        for s in states:
            values[(t, s.key())] = bellman_step(t, s, next_slice, model, prices)
    return ValueTable(
        press_type=press_type,
        horizon=T,
        model_hash=model_hash(model),
        prices=tuple(float(p) for p in prices),
        values=values,
    )


def lookup(table: ValueTable, t: int, state: PressState) -> float:
    """Stored expected payoff at (t, state); t may be any slice 0..T."""
    if not 0 <= t <= table.horizon:
        raise ValueError(f"t={t} outside 0..{table.horizon}")
    key = (t, state.key())
    if key not in table.values:
        raise ValueError(f"state {state.key()} not in table: wrong press type or corrupted table")
    return table.values[key]


# --- artifact format -----------------------------------------------------------


def serialize_table(table: ValueTable) -> str:
    """Text artifact: header then one `t variety load remaining value` row each.

    Values are printed with repr, preserving full double precision on
    round trip (well past the 12 significant digits the format promises).
    """
    lines = [
        "format: value-table/1",
        f"capacity: {table.press_type.capacity}",
        f"processing_intervals: {table.press_type.processing_intervals}",
        f"horizon: {table.horizon}",
        f"model_hash: {table.model_hash}",
        "prices: " + " ".join(repr(p) for p in table.prices),
        "rows:",
    ]
    for (t, (v, l, r)), val in sorted(table.values.items()):
        lines.append(f"{t} {v} {l} {r} {val!r}")
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> ValueTable:
    """Inverse of serialize_table; checks shape and completeness."""
    header: dict[str, str] = {}
    values: dict[tuple[int, StateKey], float] = {}
    in_rows = False
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if not in_rows:
            key, _, value = line.partition(":")
            if key.strip() == "rows":
                in_rows = True
                continue
            header[key.strip()] = value.strip()
        else:
            t, v, l, r, val = line.split()
            values[(int(t), (int(v), int(l), int(r)))] = float(val)
    if header.get("format") != "value-table/1":
        raise ValueError(f"unrecognized table format {header.get('format')!r}")
    press_type = PressType(int(header["capacity"]), int(header["processing_intervals"]))
    table = ValueTable(
        press_type=press_type,
        horizon=int(header["horizon"]),
        model_hash=header["model_hash"],
        prices=tuple(float(x) for x in header["prices"].split()),
        values=values,
    )
    expected = {(t, s.key()) for t in range(table.horizon + 1) for s in reachable_states(press_type)}
    if set(values) != expected:
        raise ValueError("table rows do not cover the reachable state set")
    return table


def write_table(table: ValueTable, path: str | Path) -> None:
    Path(path).write_text(serialize_table(table))


def read_table(path: str | Path) -> ValueTable:
    return parse_table(Path(path).read_text())


def table_fingerprint(table: ValueTable) -> str:
    """Hash of the serialized artifact, for change detection in logs."""
    return hashlib.sha256(serialize_table(table).encode()).hexdigest()
