"""Independent reference implementations used to pin expected test values.

Everything here recomputes results by brute force (simulation or exhaustive
enumeration) without touching the closed-form or dynamic-programming code
under test, so agreement is meaningful.
"""

from __future__ import annotations

import itertools

import numpy as np

from pressplan.arrivals import ArrivalModel, presence_probability, type_probability_vector
from pressplan.domain import (
    LOAD_CLASSES,
    LOAD_STEP,
    NO_FILL,
    PressType,
    iter_type_controls,
    payoff,
    reachable_states,
    transition,
)


def mc_presence_frequencies(model: ArrivalModel, t: int, n: int, seed: int) -> np.ndarray:
    """Empirical per-type presence frequencies over n simulated intervals.

    Simulates the arrival process directly: Poisson counts thinned into
    i.i.d. categorical types, then checks which of the 20 types showed up
    at least once.  Returns a length-20 frequency vector.
    """
    rng = np.random.default_rng(seed)
    probs = type_probability_vector(model)
    counts = rng.poisson(model.lam[t], size=n)
    total = int(counts.sum())
    if total == 0:
        return np.zeros(len(probs))
    types = rng.choice(len(probs), size=total, p=probs)
    sample_ids = np.repeat(np.arange(n), counts)
    # presence = number of distinct (interval, type) pairs per type
    keys = np.unique(sample_ids * len(probs) + types)
    present = np.bincount(keys % len(probs), minlength=len(probs))
    return present / n


def binomial_3se(p: np.ndarray, n: int) -> np.ndarray:
    """Three-standard-error band for an empirical frequency of p over n trials."""
    return 3.0 * np.sqrt(np.maximum(p * (1.0 - p), 1e-12) / n)


def rank_expectation_bruteforce(q0: float, qs: list[float], pis: list[float]) -> float:
    """E[max over present options] by summing over all 2^k presence outcomes.

    Option i is available with probability pis[i] independently; the
    no-arrival fallback q0 is always available.
    """
    total = 0.0
    for mask in itertools.product((0, 1), repeat=len(qs)):
        prob = 1.0
        best = q0
        for present, q, pi in zip(mask, qs, pis):
            prob *= pi if present else 1.0 - pi
            if present and q > best:
                best = q
        total += prob * best
    return total


def bruteforce_fill_decisions(presses, queue, t, tables, cap=75):
    """Best joint allocation by trying every per-press control combination.

    Relies only on gamma and the independent rescoring path; returns the
    maximal score and every maximizing control tuple (no canonicalization).
    Exponential in fleet size; keep the fleet small.
    """
    from pressplan.domain import gamma
    from pressplan.engine import score_decision

    per_press = []
    avail = queue.availability()
    for s in presses:
        opts = [c for c in gamma(t, s) if c.tonnes <= avail.get(c.variety, 0) or c.is_no_fill]
        opts.sort(key=lambda c: (c.variety, c.tonnes))
        per_press.append(opts)
    best = -float("inf")
    winners = []
    for combo in itertools.product(*per_press):
        try:
            score = score_decision(presses, queue, t, tables, combo, cap)
        except ValueError:
            continue
        if score > best + 1e-9:
            best = score
            winners = [combo]
        elif score >= best - 1e-9:
            winners.append(combo)
    return best, winners


def expectimax_table(
    press_type: PressType, model: ArrivalModel, prices: tuple[float, ...] = (1.0, 2.0, 3.0, 4.0)
) -> dict[tuple[int, tuple[int, int, int]], float]:
    """Optimal single-press value table by explicit expectimax.

    For every interval and state, enumerates every subset of truck types
    with nonzero presence probability, solves the max over feasible
    controls for each subset, and weights by the subset's probability.
    Exponential in the number of active types; only for tiny instances.
    """
    states = reachable_states(press_type)
    T = model.horizon
    values: dict[tuple[int, tuple[int, int, int]], float] = {(T, s.key()): 0.0 for s in states}

    def q_value(t, s, ctrl):
        return payoff(t, s, ctrl, prices) + values[(t + 1, transition(t, s, ctrl).key())]

    for t in range(T - 1, -1, -1):
        options = []  # (presence prob, variety, load) for active types
        for i in range(1, 21):
            pi = presence_probability(model, t, i)
            if pi > 0.0:
                v = (i - 1) // len(LOAD_CLASSES) + 1
                l = ((i - 1) % len(LOAD_CLASSES) + 1) * LOAD_STEP
                options.append((pi, v, l))
        for s in states:
            ctrl_for = {(tt.variety, tt.load): ctrl for tt, ctrl in iter_type_controls(s)}
            total = 0.0
            for mask in itertools.product((0, 1), repeat=len(options)):
                prob = 1.0
                best = q_value(t, s, NO_FILL)
                for present, (pi, v, l) in zip(mask, options):
                    prob *= pi if present else 1.0 - pi
                    if present and (v, l) in ctrl_for:
                        best = max(best, q_value(t, s, ctrl_for[(v, l)]))
                if prob > 0.0:
                    total += prob * best
            values[(t, s.key())] = total
    return values
