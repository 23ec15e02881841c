/** Wiring: one store, one client, one delegated click handler.
 *
 * Every user action maps to exactly one service call.  The server is the
 * rule authority, so after any rejection we re-fetch the session state and
 * show the refusal verbatim next to the refreshed board.
 */

import { ApiError, Client } from "./api.js";
import { Store } from "./state.js";
import { renderApp } from "./render.js";
import type { ServiceError } from "./types.js";

function asServiceError(err: unknown): ServiceError {
  if (err instanceof ApiError) {
    return { code: err.code, rule: err.rule, message: err.message };
  }
  return { code: "network", rule: "", message: String(err) };
}

export function mount(container: HTMLElement, client: Client): Store {
  const store = new Store();
  store.subscribe((state) => {
    container.replaceChildren(renderApp(state, store.tonnesOptions()));
  });

  const sessionId = () => store.view.session?.session_id ?? null;

  /** Run one service call; on rejection, refresh the board then show why. */
  async function attempt(call: () => Promise<void>): Promise<void> {
    store.setBusy(true);
    try {
      await call();
    } catch (err) {
      const id = sessionId();
      if (id) {
        try {
          store.setSession(await client.state(id));
        } catch {
          // session may be gone entirely; the error banner still explains
        }
      }
      store.setError(asServiceError(err));
    }
  }

  async function start(): Promise<void> {
    const select = (name: string) =>
      container.querySelector<HTMLSelectElement>(`select[name="${name}"]`)!.value;
    const seedInput = container.querySelector<HTMLInputElement>('input[name="seed"]')!;
    await attempt(async () => {
      const state = await client.createSession({
        scenario: {
          variety_profile: select("variety_profile"),
          frequency_shape: select("frequency_shape"),
          intensity_scale: Number(select("intensity_scale")),
        },
        mode: select("mode") as "manual" | "assisted",
        seed: Number(seedInput.value) || 0,
      });
      store.setSession(state);
    });
  }

  async function assign(tonnes: number): Promise<void> {
    const { truckId, pressId } = store.view.selection;
    const id = sessionId();
    if (id === null || truckId === null || pressId === null) return;
    await attempt(async () => {
      store.setSession(await client.assign(id, { press_id: pressId, truck_id: truckId, tonnes }));
    });
  }

  async function applyHint(): Promise<void> {
    const id = sessionId();
    const hint = store.view.hint;
    if (id === null || !hint) return;
    await attempt(async () => {
      let state = store.view.session!;
      for (const row of hint.assignments) {
        state = await client.assign(id, {
          press_id: row.press_id,
          truck_id: row.truck_id,
          tonnes: row.tonnes,
        });
      }
      store.setSession(state);
      store.clearHint();
    });
  }

  async function advance(): Promise<void> {
    const id = sessionId();
    if (id === null) return;
    await attempt(async () => {
      const state = await client.advance(id);
      store.setSession(state);
      if (state.finished) store.setResults(await client.results(id));
    });
  }

  container.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
    if (!target || store.view.busy) return;
    switch (target.dataset.action) {
      case "start":
        void start();
        break;
      case "select-truck":
        store.toggleTruck(Number(target.dataset.truck));
        break;
      case "select-press":
        store.togglePress(Number(target.dataset.press));
        break;
      case "assign":
        void assign(Number(target.dataset.tonnes));
        break;
      case "hint": {
        const id = sessionId();
        if (id !== null) void attempt(async () => store.setHint(await client.hint(id)));
        break;
      }
      case "apply-hint":
        void applyHint();
        break;
      case "advance":
        void advance();
        break;
      case "new-session":
        store.reset();
        break;
    }
  });

  store.reset(); // first paint
  return store;
}

// browser entry point; tests import mount() with their own container/client
if (typeof document !== "undefined" && document.getElementById("app")) {
  mount(document.getElementById("app")!, new Client());
}
