"""Stochastic model of grape deliveries and its calibration from CSV logs.

Deliveries arrive over an operating day of 34 half-hour intervals running
08:30 to 01:30 the next morning.  Counts per interval are Poisson with a
per-interval intensity; each delivery independently carries one of four
varieties and one of five 5 t weight classes.  Thinning the Poisson stream
by the type probability p_i makes the per-type presence indicators exact
independent Bernoullis with

    P(type i present in interval t) = 1 - exp(-lambda_t * p_i),

which is what the value-table computation consumes.
"""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass
from datetime import date, datetime, time, timedelta
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .domain import HORIZON, LOAD_CLASSES, LOAD_STEP, VARIETIES

#: Operating day opens at 08:30; the last interval closes at 01:30.
DAY_START_MINUTE = 8 * 60 + 30
DAY_CLOSE_MINUTE = 1 * 60 + 30
INTERVAL_MINUTES = 30

_PROB_TOL = 1e-9


@dataclass(frozen=True)
class ArrivalModel:
    """Calibrated delivery process: intensities plus type marginals.

    `lam[t]` is the expected number of deliveries in interval t; variety
    and weight class are drawn independently of the count and of each
    other.  Instances are immutable; all sampling takes an explicit
    generator so parallel simulations never share state.
    """

    horizon: int
    lam: tuple[float, ...]
    p_variety: tuple[float, float, float, float]
    p_weight: tuple[float, float, float, float, float]

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError("horizon must be positive")
        if len(self.lam) != self.horizon:
            raise ValueError(f"expected {self.horizon} intensities, got {len(self.lam)}")
        if any(x < 0 for x in self.lam):
            raise ValueError("intensities must be nonnegative")
        for name, probs in (("p_variety", self.p_variety), ("p_weight", self.p_weight)):
            if any(p < 0 for p in probs):
                raise ValueError(f"{name} entries must be nonnegative")
            if abs(sum(probs) - 1.0) > _PROB_TOL:
                raise ValueError(f"{name} must sum to 1, got {sum(probs)!r}")


def validate_day_model(model: ArrivalModel) -> None:
    """Check the production-shape conventions of a full operating day.

    Reduced test instances may use any horizon and intensity profile; a
    model meant for the real day must span 34 intervals and be quiet on
    the last two (trucks stop arriving an hour before close).
    """
    if model.horizon != HORIZON:
        raise ValueError(f"day model must have horizon {HORIZON}, got {model.horizon}")
    if model.lam[-1] != 0.0 or model.lam[-2] != 0.0:
        raise ValueError("day model must have zero intensity on the last two intervals")


def type_probability(model: ArrivalModel, i: int) -> float:
    """Marginal probability that a delivery is of truck type `i` (1..20)."""
    if not 1 <= i <= 20:
        raise ValueError(f"type index {i} out of range")
    v = (i - 1) // len(LOAD_CLASSES)
    l = (i - 1) % len(LOAD_CLASSES)
    return model.p_variety[v] * model.p_weight[l]


def presence_probability(model: ArrivalModel, t: int, i: int) -> float:
    """P(at least one type-`i` delivery arrives in interval `t`)."""
    return 1.0 - math.exp(-model.lam[t] * type_probability(model, i))


def type_probability_vector(model: ArrivalModel) -> np.ndarray:
    """All 20 type probabilities in index order, as one array."""
    return np.outer(model.p_variety, model.p_weight).ravel()


# --- historical logs ---------------------------------------------------------


@dataclass(frozen=True)
class Delivery:
    """One logged arrival: timestamp, load in tonnes, variety if recorded."""

    at: datetime
    tonnes: float
    variety: int | None = None


def minute_of_day(ts: datetime) -> float:
    return ts.hour * 60 + ts.minute + ts.second / 60.0


def interval_of(ts: datetime) -> int:
    """Half-hour interval index 0..33 for a timestamp, or raise.

    Bins are right-open: [08:30 + 30k, 08:30 + 30(k+1)).  Times from
    midnight up to (not including) 01:30 belong to the previous operating
    day's tail; anything in the closed gap [01:30, 08:30) is outside the
    operating window.
    """
    m = minute_of_day(ts)
    if m >= DAY_START_MINUTE:
        offset = m - DAY_START_MINUTE
    elif m < DAY_CLOSE_MINUTE:
        offset = m + (24 * 60 - DAY_START_MINUTE)
    else:
        raise ValueError(f"{ts.isoformat()} outside the 08:30-01:30 operating window")
    return int(offset // INTERVAL_MINUTES)


def operating_day(ts: datetime) -> date:
    """Calendar date of the operating day a timestamp belongs to."""
    if minute_of_day(ts) < DAY_START_MINUTE:
        return (ts - timedelta(days=1)).date()
    return ts.date()


class DeliveryLog:
    """Timestamped deliveries, validated at ingestion and grouped by day.

    Loads must be positive and every timestamp must fall inside the
    operating window; multi-day logs are the normal case and split into
    per-operating-day runs for calibration and diagnostics.
    """

    def __init__(self, deliveries: Iterable[Delivery]):
        rows = sorted(deliveries, key=lambda d: d.at)
        if not rows:
            raise ValueError("empty delivery log")
        for d in rows:
            if d.tonnes <= 0:
                raise ValueError(f"nonpositive load {d.tonnes} at {d.at.isoformat()}")
            interval_of(d.at)  # raises when outside the window
            if d.variety is not None and d.variety not in VARIETIES:
                raise ValueError(f"unknown variety {d.variety} at {d.at.isoformat()}")
        self.deliveries: tuple[Delivery, ...] = tuple(rows)

    def __len__(self) -> int:
        return len(self.deliveries)

    def days(self) -> dict[date, list[Delivery]]:
        by_day: dict[date, list[Delivery]] = {}
        for d in self.deliveries:
            by_day.setdefault(operating_day(d.at), []).append(d)
        return by_day


def read_delivery_log(path: str | Path) -> DeliveryLog:
    """Load a `timestamp,load_tonnes[,variety]` CSV with ISO-8601 timestamps."""
    deliveries = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            variety = row.get("variety")
            deliveries.append(
                Delivery(
                    at=datetime.fromisoformat(row["timestamp"]),
                    tonnes=float(row["load_tonnes"]),
                    variety=int(variety) if variety not in (None, "") else None,
                )
            )
    return DeliveryLog(deliveries)


def read_variety_totals(path: str | Path) -> list[tuple[date, int, float]]:
    """Load a `date,variety,total_tonnes` CSV of per-day harvest totals."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append((date.fromisoformat(row["date"]), int(row["variety"]), float(row["total_tonnes"])))
    if not rows:
        raise ValueError(f"no rows in {path}")
    return rows


def discretize_load(tonnes: float) -> int:
    """Weight class of a raw load: 5 * ceil(w / 5), exact multiples stay put."""
    if tonnes <= 0:
        raise ValueError(f"nonpositive load {tonnes}")
    cls = LOAD_STEP * math.ceil(tonnes / LOAD_STEP)
    if cls > max(LOAD_CLASSES):
        raise ValueError(f"load {tonnes} t exceeds the largest {max(LOAD_CLASSES)} t class")
    return cls


def calibrate(
    variety_totals: Iterable[tuple[date, int, float]],
    deliveries: DeliveryLog,
    horizon: int = HORIZON,
) -> ArrivalModel:
    """Fit the arrival model from the two historical datasets.

    Variety marginals come from tonnage shares in the per-day totals;
    weight-class marginals and per-interval intensities come from the
    timestamped log (plain per-bin mean count across operating days).
    Intensity observed in the final hour (00:30-01:30) is folded into
    the 00:00-00:30 bin, keeping total daily volume while honouring the
    convention that deliveries stop two intervals before close.
    """
    per_variety = [0.0] * len(VARIETIES)
    for _, variety, tonnes in variety_totals:
        if variety not in VARIETIES:
            raise ValueError(f"unknown variety {variety} in totals")
        if tonnes < 0:
            raise ValueError("negative tonnage in totals")
        per_variety[variety - 1] += tonnes
    total = sum(per_variety)
    if total <= 0:
        raise ValueError("variety totals sum to zero")
    p_variety = tuple(x / total for x in per_variety)

    class_counts = {cls: 0 for cls in LOAD_CLASSES}
    for d in deliveries.deliveries:
        class_counts[discretize_load(d.tonnes)] += 1
    n = len(deliveries)
    p_weight = tuple(class_counts[cls] / n for cls in LOAD_CLASSES)

    days = deliveries.days()
    counts = np.zeros(horizon)
    for day_rows in days.values():
        for d in day_rows:
            idx = interval_of(d.at)
            if idx >= horizon:
                raise ValueError(f"{d.at.isoformat()} falls past the {horizon}-interval horizon")
            counts[idx] += 1
    lam = counts / len(days)
    # fold any final-hour stragglers into the preceding bin
    lam[horizon - 3] += lam[horizon - 2] + lam[horizon - 1]
    lam[horizon - 2] = 0.0
    lam[horizon - 1] = 0.0
    return ArrivalModel(horizon=horizon, lam=tuple(float(x) for x in lam), p_variety=p_variety, p_weight=p_weight)


@dataclass(frozen=True)
class WeekdayStats:
    """Per-weekday summary of a timestamped log."""

    weekday: str
    days: int
    deliveries: int
    first: time
    last: time
    mean_gap_minutes: float | None


_WEEKDAYS = ("Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday")


def log_diagnostics(deliveries: DeliveryLog) -> dict[str, WeekdayStats]:
    """Earliest/latest arrival and mean inter-arrival gap per weekday.

    First/last are taken in operating-day order, so a 00:17 arrival counts
    as later than 23:50 of the same shift.  Gaps pool all consecutive
    pairs across days of the same weekday; a weekday whose days each saw
    a single delivery reports no gap.
    """
    out: dict[str, WeekdayStats] = {}
    by_weekday: dict[int, list[list[Delivery]]] = {}
    for day, rows in deliveries.days().items():
        by_weekday.setdefault(day.weekday(), []).append(rows)
    for wd, day_lists in sorted(by_weekday.items()):
        def shift_minute(d: Delivery) -> float:
            m = minute_of_day(d.at)
            return m if m >= DAY_START_MINUTE else m + 24 * 60

        firsts = [min(rows, key=shift_minute) for rows in day_lists]
        lasts = [max(rows, key=shift_minute) for rows in day_lists]
        gaps: list[float] = []
        for rows in day_lists:
            ordered = sorted(rows, key=shift_minute)
            for a, b in zip(ordered, ordered[1:]):
                gaps.append(shift_minute(b) - shift_minute(a))
        out[_WEEKDAYS[wd]] = WeekdayStats(
            weekday=_WEEKDAYS[wd],
            days=len(day_lists),
            deliveries=sum(len(rows) for rows in day_lists),
            first=min(d.at for d in firsts).time().replace(microsecond=0),
            last=max(lasts, key=shift_minute).at.time().replace(microsecond=0),
            mean_gap_minutes=sum(gaps) / len(gaps) if gaps else None,
        )
    return out


# --- sampling ----------------------------------------------------------------


def sample_interval_arrivals(model: ArrivalModel, t: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Draw one interval's deliveries as (variety, load-class) pairs.

    Count is Poisson(lambda_t); types are i.i.d. from the product of the
    variety and weight marginals.  Deterministic given the generator state.
    """
    count = int(rng.poisson(model.lam[t]))
    if count == 0:
        return []
    probs = type_probability_vector(model)
    picks = rng.choice(len(probs), size=count, p=probs)
    out = []
    for k in picks:
        v = int(k) // len(LOAD_CLASSES) + 1
        l = (int(k) % len(LOAD_CLASSES) + 1) * LOAD_STEP
        out.append((v, l))
    return out


# --- serialization -----------------------------------------------------------


def _format_floats(values: Sequence[float]) -> str:
    return " ".join(repr(float(v)) for v in values)


def _model_body(model: ArrivalModel) -> str:
    return (
        "format: arrival-model/1\n"
        f"horizon: {model.horizon}\n"
        f"lambda: {_format_floats(model.lam)}\n"
        f"p_variety: {_format_floats(model.p_variety)}\n"
        f"p_weight: {_format_floats(model.p_weight)}\n"
    )


def model_hash(model: ArrivalModel) -> str:
    """Content hash used to pair value tables with the model they assume."""
    return hashlib.sha256(_model_body(model).encode()).hexdigest()


def serialize_model(model: ArrivalModel) -> str:
    return _model_body(model) + f"hash: {model_hash(model)}\n"


def write_model(model: ArrivalModel, path) -> None:
    Path(path).write_text(serialize_model(model))


def read_model(path) -> ArrivalModel:
    return parse_model(Path(path).read_text())


def parse_model(text: str) -> ArrivalModel:
    """Inverse of serialize_model; verifies the embedded content hash."""
    fields: dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        key, _, value = line.partition(":")
        fields[key.strip()] = value.strip()
    if fields.get("format") != "arrival-model/1":
        raise ValueError(f"unrecognized model format {fields.get('format')!r}")
    model = ArrivalModel(
        horizon=int(fields["horizon"]),
        lam=tuple(float(x) for x in fields["lambda"].split()),
        p_variety=tuple(float(x) for x in fields["p_variety"].split()),
        p_weight=tuple(float(x) for x in fields["p_weight"].split()),
    )
    if fields.get("hash") != model_hash(model):
        raise ValueError("model file hash mismatch: content was edited or truncated")
    return model
