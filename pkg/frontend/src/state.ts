/** Client-side view state.
 *
 * The service is the single authority on rules; this store only tracks
 * what the user is pointing at plus the latest server responses.  The one
 * computation it performs, tonnesOptions, is an optimistic display aid and
 * never overrides a server verdict.
 */

import type { Hint, Results, ServiceError, SessionState } from "./types.js";

export interface Selection {
  truckId: number | null;
  pressId: number | null;
}

export interface ViewState {
  session: SessionState | null;
  selection: Selection;
  hint: Hint | null;
  lastError: ServiceError | null;
  results: Results | null;
  busy: boolean;
}

export type Listener = (state: ViewState) => void;

export class Store {
  private state: ViewState = {
    session: null,
    selection: { truckId: null, pressId: null },
    hint: null,
    lastError: null,
    results: null,
    busy: false,
  };
  private listeners: Listener[] = [];

  subscribe(fn: Listener): void {
    this.listeners.push(fn);
  }

  get view(): ViewState {
    return this.state;
  }

  private emit(): void {
    for (const fn of this.listeners) fn(this.state);
  }

  setBusy(busy: boolean): void {
    this.state = { ...this.state, busy };
    this.emit();
  }

  /** Back to the setup screen, keeping nothing from the old session. */
  reset(): void {
    this.state = {
      session: null,
      selection: { truckId: null, pressId: null },
      hint: null,
      lastError: null,
      results: null,
      busy: false,
    };
    this.emit();
  }

  /** Install a fresh server snapshot, dropping anything it invalidates. */
  setSession(session: SessionState): void {
    let { hint, selection } = this.state;
    if (hint && hint.interval !== session.interval) hint = null;
    if (
      selection.truckId !== null &&
      !session.queue.some((t) => t.truck_id === selection.truckId)
    ) {
      selection = { ...selection, truckId: null };
    }
    if (
      selection.pressId !== null &&
      !session.presses.some((p) => p.press_id === selection.pressId)
    ) {
      selection = { ...selection, pressId: null };
    }
    this.state = { ...this.state, session, hint, selection, lastError: null, busy: false };
    this.emit();
  }

  setError(err: ServiceError): void {
    this.state = { ...this.state, lastError: err, busy: false };
    this.emit();
  }

  setHint(hint: Hint): void {
    this.state = { ...this.state, hint, lastError: null, busy: false };
    this.emit();
  }

  clearHint(): void {
    this.state = { ...this.state, hint: null };
    this.emit();
  }

  setResults(results: Results): void {
    this.state = { ...this.state, results, lastError: null, busy: false };
    this.emit();
  }

  toggleTruck(truckId: number): void {
    const current = this.state.selection.truckId;
    const next = current === truckId ? null : truckId;
    this.state = { ...this.state, selection: { ...this.state.selection, truckId: next } };
    this.emit();
  }

  togglePress(pressId: number): void {
    const current = this.state.selection.pressId;
    const next = current === pressId ? null : pressId;
    this.state = { ...this.state, selection: { ...this.state.selection, pressId: next } };
    this.emit();
  }

  clearSelection(): void {
    this.state = { ...this.state, selection: { truckId: null, pressId: null } };
    this.emit();
  }

  /**
   * Feasible-looking tonnages for the current selection, in 5 t steps.
   *
   * Clamped to what the truck still carries, the press still has room for
   * and the interval's remaining workflow capacity.  The server re-checks
   * every move, so this is a convenience filter rather than a rule.
   */
  tonnesOptions(): number[] {
    const { session, selection } = this.state;
    if (!session || selection.truckId === null || selection.pressId === null) return [];
    const truck = session.queue.find((t) => t.truck_id === selection.truckId);
    const press = session.presses.find((p) => p.press_id === selection.pressId);
    if (!truck || !press || press.processing) return [];
    const cap = Math.min(truck.load_remaining, press.spare, session.cap_remaining);
    const options: number[] = [];
    for (let t = 5; t <= cap; t += 5) options.push(t);
    return options;
  }
}
