/** Hand-built payloads matching the service's JSON shapes. */

import type { Hint, PressView, Results, SessionState, TruckView } from "../src/types.js";

export function makePress(over: Partial<PressView> = {}): PressView {
  return {
    press_id: 0,
    type: "I",
    capacity: 25,
    variety: 0,
    load: 0,
    spare: 25,
    remaining_intervals: 0,
    processing: false,
    ...over,
  };
}

export function makeTruck(over: Partial<TruckView> = {}): TruckView {
  return {
    truck_id: 1,
    variety: 2,
    load_remaining: 20,
    arrival: 0,
    age: 0,
    degraded: false,
    intervals_to_degradation: 4,
    intervals_to_rejection: 8,
    ...over,
  };
}

export function makeSession(over: Partial<SessionState> = {}): SessionState {
  return {
    session_id: "s0001",
    mode: "manual",
    seed: 0,
    scenario_id: "vR_fR_i1",
    interval: 0,
    horizon: 34,
    finished: false,
    payoff: 0,
    losses: { degradation: 0, rejection: 0, leftover: 0, total: 0 },
    cap_remaining: 75,
    presses: [makePress(), makePress({ press_id: 1, type: "II", capacity: 50, spare: 50 })],
    queue: [makeTruck()],
    assignments: [],
    ...over,
  };
}

export function makeHint(over: Partial<Hint> = {}): Hint {
  return {
    interval: 0,
    score: 123.4,
    alternatives: 7,
    assignments: [{ press_id: 0, truck_id: 1, variety: 2, tonnes: 20 }],
    ...over,
  };
}

export function makeResults(over: Partial<Results> = {}): Results {
  return {
    scenario_id: "vR_fR_i1",
    policy: "manual",
    seed: 0,
    payoff: 1520,
    losses: { degradation: 12, rejection: 30, leftover: 5, total: 47 },
    tonnes_delivered: 640,
    tonnes_pressed: 600,
    tonnes_rejected: 30,
    tonnes_left: 10,
    intervals: [],
    ...over,
  };
}
