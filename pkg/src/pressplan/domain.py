"""Core model of a single pressing tank and the deliveries that feed it.

A press holds at most one grape variety at a time.  Loads are quantised to
5 t steps.  Once a press is filled to capacity it processes for a fixed
number of half-hour intervals, during which it cannot be touched; the
moment a fill completes, the full capacity is paid out at the variety's
unit price.  After processing the press is empty again.

All values here are immutable and all operations are pure functions,
so they can be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

VARIETIES = (1, 2, 3, 4)
LOAD_CLASSES = (5, 10, 15, 20, 25)
LOAD_STEP = 5
HORIZON = 34  # half-hour intervals per operating day, 08:30-01:30

#: Unit price per tonne for each variety; variety id doubles as the price.
DEFAULT_PRICES = (1.0, 2.0, 3.0, 4.0)


@dataclass(frozen=True)
class PressType:
    """Invariant parameters of a press: capacity and total processing time.

    `capacity` is in tonnes (a multiple of 5) and `processing_intervals`
    counts half-hour intervals.  The winery fleet uses exactly TYPE_I
    (25 t, 2 h) and TYPE_II (50 t, 4 h); other combinations are accepted
    for reduced test instances.
    """

    capacity: int
    processing_intervals: int

    def __post_init__(self) -> None:
        if self.capacity <= 0 or self.capacity % LOAD_STEP != 0:
            raise ValueError(f"capacity must be a positive multiple of {LOAD_STEP}")
        if self.processing_intervals < 1:
            raise ValueError("processing_intervals must be >= 1")

    @property
    def name(self) -> str:
        if self == TYPE_I:
            return "I"
        if self == TYPE_II:
            return "II"
        return f"custom({self.capacity}t,{self.processing_intervals})"


TYPE_I = PressType(capacity=25, processing_intervals=4)
TYPE_II = PressType(capacity=50, processing_intervals=8)


@dataclass(frozen=True)
class PressState:
    """Observable state of one press.

    variety == 0 and load == 0 together mean the press is empty.
    remaining > 0 means the press is mid-cycle with that many intervals
    left; a press only processes when completely full.
    """

    variety: int
    load: int
    remaining: int
    press_type: PressType

    def __post_init__(self) -> None:
        if (self.variety == 0) != (self.load == 0):
            raise ValueError("variety 0 iff load 0")
        if self.variety not in (0,) + VARIETIES:
            raise ValueError(f"unknown variety {self.variety}")
        if self.load < 0 or self.load % LOAD_STEP != 0 or self.load > self.press_type.capacity:
            raise ValueError(f"load {self.load} invalid for capacity {self.press_type.capacity}")
        if self.remaining < 0 or self.remaining > self.press_type.processing_intervals:
            raise ValueError(f"remaining {self.remaining} out of range")
        if self.remaining > 0 and self.load != self.press_type.capacity:
            raise ValueError("a press only processes when full")

    @property
    def is_empty(self) -> bool:
        return self.load == 0

    @property
    def is_processing(self) -> bool:
        return self.remaining > 0

    @property
    def spare(self) -> int:
        return self.press_type.capacity - self.load

    def key(self) -> tuple[int, int, int]:
        return (self.variety, self.load, self.remaining)


def empty_press(press_type: PressType) -> PressState:
    return PressState(variety=0, load=0, remaining=0, press_type=press_type)


@dataclass(frozen=True)
class TruckType:
    """One of the N = 20 (variety, load class) delivery designations.

    Types are numbered 1..20 ordered by variety then load:
    index = (variety - 1) * 5 + load / 5.
    """

    index: int
    variety: int
    load: int


def truck_types() -> tuple[TruckType, ...]:
    """The full cross product of varieties and load classes, in index order."""
    types = []
    for v in VARIETIES:
        for l in LOAD_CLASSES:
            types.append(TruckType(index=(v - 1) * len(LOAD_CLASSES) + l // LOAD_STEP, variety=v, load=l))
    return tuple(types)


TRUCK_TYPES = truck_types()


def type_index(variety: int, load: int) -> int:
    """Index of the (variety, load) truck type, 1-based."""
    if variety not in VARIETIES or load not in LOAD_CLASSES:
        raise ValueError(f"no truck type for variety {variety}, load {load}")
    return (variety - 1) * len(LOAD_CLASSES) + load // LOAD_STEP


@dataclass(frozen=True)
class Truck:
    """A concrete queued delivery.

    `load_remaining` shrinks as splits are unloaded; `degraded` marks a
    load whose quality dropped to the cheapest variety after waiting too
    long (its variety is then 1 permanently).
    """

    truck_id: int
    variety: int
    load_remaining: int
    arrival: int
    degraded: bool = False

    def __post_init__(self) -> None:
        if self.variety not in VARIETIES:
            raise ValueError(f"unknown variety {self.variety}")
        if self.load_remaining < 0 or self.load_remaining > max(LOAD_CLASSES):
            raise ValueError(f"load_remaining {self.load_remaining} out of range")
        if self.load_remaining % LOAD_STEP != 0:
            raise ValueError("load_remaining must be a multiple of 5")
        if self.degraded and self.variety != 1:
            raise ValueError("degraded trucks carry variety 1")


@dataclass(frozen=True)
class Control:
    """Either the symbolic no-fill decision or a (variety, tonnes) addition."""

    variety: int
    tonnes: int

    def __post_init__(self) -> None:
        if self.variety == 0 and self.tonnes == 0:
            return  # symbolic no-fill
        if self.variety not in VARIETIES:
            raise ValueError(f"unknown variety {self.variety}")
        if self.tonnes <= 0 or self.tonnes % LOAD_STEP != 0:
            raise ValueError("fill tonnage must be a positive multiple of 5")

    @property
    def is_no_fill(self) -> bool:
        return self.tonnes == 0


NO_FILL = Control(variety=0, tonnes=0)


def gamma(t: int, state: PressState) -> frozenset[Control]:
    """Feasible controls for one press at interval `t`.

    A blocked (processing) press admits only the no-fill control.  An empty
    press accepts any variety and any 5 t multiple up to capacity.  A
    partially filled press accepts only its current variety, up to the
    spare space.  Controls are amounts per press; matching amounts to the
    actual queued trucks happens downstream.
    """
    if state.is_processing:
        return frozenset((NO_FILL,))
    controls = [NO_FILL]
    if state.is_empty:
        for v in VARIETIES:
            for tonnes in range(LOAD_STEP, state.press_type.capacity + 1, LOAD_STEP):
                controls.append(Control(v, tonnes))
    else:
        for tonnes in range(LOAD_STEP, state.spare + 1, LOAD_STEP):
            controls.append(Control(state.variety, tonnes))
    return frozenset(controls)


def starts_cycle(state: PressState, control: Control) -> bool:
    """True when applying `control` fills an idle press exactly to capacity."""
    if control.is_no_fill or state.is_processing:
        return False
    return state.load + control.tonnes == state.press_type.capacity


def transition(t: int, state: PressState, control: Control) -> PressState:
    """Apply a feasible control, then advance the press by one interval.

    Filling to capacity starts a cycle (`remaining` becomes the full
    processing time; it does not tick in the same interval).  A processing
    press ticks down by one; on reaching zero it resets to empty so the
    next cycle can begin.
    """
    if control not in gamma(t, state):
        raise ValueError(f"control {control} infeasible for state {state.key()}")
    if state.is_processing:
        remaining = state.remaining - 1
        if remaining == 0:
            return empty_press(state.press_type)
        return PressState(state.variety, state.load, remaining, state.press_type)
    if control.is_no_fill:
        return state
    load = state.load + control.tonnes
    if load == state.press_type.capacity:
        return PressState(control.variety, load, state.press_type.processing_intervals, state.press_type)
    return PressState(control.variety, load, 0, state.press_type)


def payoff(t: int, state: PressState, control: Control, prices: tuple[float, ...] = DEFAULT_PRICES) -> float:
    """Income booked when `control` starts a cycle on `state`, else 0.

    A completed fill pays the variety's unit price times the full capacity.
    """
    if control not in gamma(t, state):
        raise ValueError(f"control {control} infeasible for state {state.key()}")
    if starts_cycle(state, control):
        return prices[control.variety - 1] * state.press_type.capacity
    return 0.0


def reachable_states(press_type: PressType) -> list[PressState]:
    """Every press state reachable from empty under repeated transitions.

    Empty, partial fills (load strictly below capacity), and processing
    states with each possible countdown.  A full-but-idle press never
    occurs: completing a fill starts the cycle immediately.
    """
    states = [empty_press(press_type)]
    for v in VARIETIES:
        for load in range(LOAD_STEP, press_type.capacity, LOAD_STEP):
            states.append(PressState(v, load, 0, press_type))
    for v in VARIETIES:
        for remaining in range(1, press_type.processing_intervals + 1):
            states.append(PressState(v, press_type.capacity, remaining, press_type))
    return states


def iter_type_controls(state: PressState) -> Iterator[tuple[TruckType, Control]]:
    """Feasible whole-truck-type controls for `state` (no-fill excluded).

    The value table optimises over whole truck types: a type fits when the
    press is empty or carries the same variety, and its load does not
    exceed the spare space.
    """
    if state.is_processing:
        return
    for tt in TRUCK_TYPES:
        if not state.is_empty and tt.variety != state.variety:
            continue
        if tt.load > state.spare:
            continue
        yield tt, Control(tt.variety, tt.load)
