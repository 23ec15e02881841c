/** Payload shapes mirroring the service's JSON schema. */

export interface PressView {
  press_id: number;
  type: string;
  capacity: number;
  variety: number;
  load: number;
  spare: number;
  remaining_intervals: number;
  processing: boolean;
}

export interface TruckView {
  truck_id: number;
  variety: number;
  load_remaining: number;
  arrival: number;
  age: number;
  degraded: boolean;
  intervals_to_degradation: number | null;
  intervals_to_rejection: number;
}

export interface Losses {
  degradation: number;
  rejection: number;
  leftover: number;
  total: number;
}

export interface AssignmentRow {
  press_id: number;
  truck_id: number;
  variety: number;
  tonnes: number;
}

export interface SessionState {
  session_id: string;
  mode: "manual" | "assisted";
  seed: number;
  scenario_id: string;
  interval: number;
  horizon: number;
  finished: boolean;
  payoff: number;
  losses: Losses;
  cap_remaining: number;
  presses: PressView[];
  queue: TruckView[];
  assignments: AssignmentRow[];
}

export interface Hint {
  interval: number;
  score: number;
  alternatives: number;
  assignments: AssignmentRow[];
}

export interface Results {
  scenario_id: string;
  policy: string;
  seed: number;
  payoff: number;
  losses: Losses;
  tonnes_delivered: number;
  tonnes_pressed: number;
  tonnes_rejected: number;
  tonnes_left: number;
  intervals: { interval: number; assignments: number }[];
}

export interface ServiceError {
  code: string;
  rule: string;
  message: string;
}

export interface ScenarioChoice {
  variety_profile?: string;
  frequency_shape?: string;
  intensity_scale?: number;
}

export interface CreateSessionRequest {
  scenario: ScenarioChoice;
  mode: "manual" | "assisted";
  seed: number;
}

export interface CreateSessionResponse {
  session_id: string;
  state: SessionState;
}
