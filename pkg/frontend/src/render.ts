/** Pure DOM builders.
 *
 * Every function takes plain data and returns detached elements; event
 * handling happens via data-action attributes and delegation in main.ts,
 * so these stay trivially testable.
 */

import type { ViewState } from "./state.js";
import type {
  Hint,
  PressView,
  Results,
  ServiceError,
  SessionState,
  TruckView,
} from "./types.js";

export const VARIETY_PROFILES = [
  "vR", "vU", "v1", "v2", "v3", "v4", "v12", "v13", "v14",
  "v23", "v24", "v34", "v123", "v124", "v134", "v234",
];
export const FREQUENCY_SHAPES = ["fR", "fU", "fP2", "fP4"];
export const INTENSITY_SCALES = [0.5, 1, 1.5];

// the operating day starts at 08:30 and runs in half-hour intervals
export function clockLabel(interval: number): string {
  const minute = 510 + 30 * interval;
  const h = Math.floor(minute / 60) % 24;
  const m = minute % 60;
  return `${String(h).padStart(2, "0")}:${String(m).padStart(2, "0")}`;
}

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function chip(variety: number): HTMLElement {
  return el("span", `chip variety-${variety}`, `v${variety}`);
}

/** Tonnes a hint would route into each press / out of each truck. */
function hintTonnes(hint: Hint | null): { press: Map<number, number>; truck: Map<number, number> } {
  const press = new Map<number, number>();
  const truck = new Map<number, number>();
  for (const row of hint?.assignments ?? []) {
    press.set(row.press_id, (press.get(row.press_id) ?? 0) + row.tonnes);
    truck.set(row.truck_id, (truck.get(row.truck_id) ?? 0) + row.tonnes);
  }
  return { press, truck };
}

export function renderHeader(s: SessionState): HTMLElement {
  const header = el("header", "status");
  const when = s.finished
    ? "day over"
    : `interval ${s.interval + 1} of ${s.horizon} (${clockLabel(s.interval)})`;
  header.appendChild(el("span", "clock", when));
  header.appendChild(el("span", "payoff", `payoff ${s.payoff.toFixed(0)}`));
  const losses = el("span", "losses", `losses ${s.losses.total.toFixed(0)}`);
  losses.title =
    `degradation ${s.losses.degradation.toFixed(0)}, ` +
    `rejection ${s.losses.rejection.toFixed(0)}, ` +
    `leftover ${s.losses.leftover.toFixed(0)}`;
  header.appendChild(losses);
  header.appendChild(el("span", "cap", `${s.cap_remaining} t workflow left`));
  header.appendChild(el("span", "scenario", `${s.scenario_id} · ${s.mode} · seed ${s.seed}`));
  return header;
}

export function renderError(err: ServiceError): HTMLElement {
  const banner = el("div", "error-banner");
  banner.appendChild(el("strong", "error-code", err.code));
  banner.appendChild(el("span", "error-rule", err.rule));
  banner.appendChild(el("span", "error-message", err.message));
  return banner;
}

export function renderPress(p: PressView, selected: boolean, hinted: number): HTMLElement {
  const card = el("div", "card press" + (selected ? " selected" : ""));
  card.dataset.action = "select-press";
  card.dataset.press = String(p.press_id);
  const title = el("div", "card-title", `press ${p.press_id} · type ${p.type}`);
  card.appendChild(title);

  const bar = el("div", "bar");
  const fill = el("div", "fill" + (p.processing ? " processing" : ""));
  fill.style.width = `${(100 * p.load) / p.capacity}%`;
  bar.appendChild(fill);
  card.appendChild(bar);

  const line = el("div", "card-line");
  if (p.load > 0) line.appendChild(chip(p.variety));
  line.appendChild(el("span", "load", `${p.load} / ${p.capacity} t`));
  card.appendChild(line);

  if (p.processing) {
    card.classList.add("busy");
    card.appendChild(
      el("div", "countdown", `pressing, ${p.remaining_intervals} intervals left`),
    );
  } else if (p.load > 0) {
    card.appendChild(el("div", "countdown", `${p.spare} t to a full cycle`));
  }
  if (hinted > 0) card.appendChild(el("span", "hint-badge", `+${hinted} t`));
  return card;
}

export function renderTruck(t: TruckView, selected: boolean, hinted: number): HTMLElement {
  const classes = ["card", "truck"];
  if (selected) classes.push("selected");
  if (t.age === 0) classes.push("arrived");
  if (t.degraded) classes.push("degraded");
  const card = el("div", classes.join(" "));
  card.dataset.action = "select-truck";
  card.dataset.truck = String(t.truck_id);

  const title = el("div", "card-title");
  title.appendChild(chip(t.variety));
  title.appendChild(el("span", undefined, ` truck ${t.truck_id} · ${t.load_remaining} t`));
  card.appendChild(title);

  const ages = el("div", "card-line", `waiting ${t.age} intervals`);
  card.appendChild(ages);
  if (t.degraded) {
    card.appendChild(el("div", "countdown", `degraded, rejected in ${t.intervals_to_rejection}`));
  } else if (t.intervals_to_degradation !== null) {
    card.appendChild(el("div", "countdown", `degrades in ${t.intervals_to_degradation}`));
  }
  if (hinted > 0) card.appendChild(el("span", "hint-badge", `-${hinted} t`));
  return card;
}

function renderControls(state: ViewState, options: number[]): HTMLElement {
  const s = state.session!;
  const controls = el("div", "controls");

  if (options.length > 0) {
    const picker = el("div", "tonnes-picker");
    picker.appendChild(el("span", undefined, "send "));
    for (const t of options) {
      const btn = el("button", "tonnes", `${t} t`);
      btn.dataset.action = "assign";
      btn.dataset.tonnes = String(t);
      picker.appendChild(btn);
    }
    controls.appendChild(picker);
  } else if (state.selection.truckId !== null || state.selection.pressId !== null) {
    controls.appendChild(el("span", "pick-more", "pick a truck and an idle press"));
  }

  if (s.mode === "assisted") {
    const hintBtn = el("button", "hint", "hint");
    hintBtn.dataset.action = "hint";
    controls.appendChild(hintBtn);
    if (state.hint) {
      const apply = el(
        "button",
        "apply-hint",
        state.hint.assignments.length > 0
          ? `apply hint (${state.hint.assignments.length} moves)`
          : "hint: hold everything",
      );
      apply.dataset.action = "apply-hint";
      if (state.hint.assignments.length === 0) apply.setAttribute("disabled", "");
      controls.appendChild(apply);
      controls.appendChild(
        el(
          "span",
          "hint-score",
          `expected value ${state.hint.score.toFixed(1)}, ${state.hint.alternatives} options scored`,
        ),
      );
    }
  }

  const next = el("button", "advance", "next interval");
  next.dataset.action = "advance";
  if (state.busy) next.setAttribute("disabled", "");
  controls.appendChild(next);
  return controls;
}

export function renderResults(r: Results): HTMLElement {
  const panel = el("div", "results");
  panel.appendChild(el("h2", undefined, "day finished"));
  const table = el("dl");
  const add = (k: string, v: string) => {
    table.appendChild(el("dt", undefined, k));
    table.appendChild(el("dd", undefined, v));
  };
  add("scenario", r.scenario_id);
  add("policy", r.policy);
  add("payoff", r.payoff.toFixed(0));
  add("losses", r.losses.total.toFixed(0));
  add("delivered", `${r.tonnes_delivered.toFixed(0)} t`);
  add("pressed", `${r.tonnes_pressed.toFixed(0)} t`);
  add("rejected", `${r.tonnes_rejected.toFixed(0)} t`);
  add("left in queue", `${r.tonnes_left.toFixed(0)} t`);
  panel.appendChild(table);
  const again = el("button", "new-session", "play another day");
  again.dataset.action = "new-session";
  panel.appendChild(again);
  return panel;
}

export function renderSetup(): HTMLElement {
  const panel = el("div", "setup");
  panel.appendChild(el("h2", undefined, "start a day"));

  const mkSelect = (name: string, label: string, options: (string | number)[]) => {
    const wrap = el("label", "field", `${label} `);
    const select = document.createElement("select");
    select.name = name;
    for (const o of options) {
      const opt = document.createElement("option");
      opt.value = String(o);
      opt.textContent = String(o);
      select.appendChild(opt);
    }
    wrap.appendChild(select);
    return wrap;
  };

  panel.appendChild(mkSelect("variety_profile", "varieties", VARIETY_PROFILES));
  panel.appendChild(mkSelect("frequency_shape", "arrival shape", FREQUENCY_SHAPES));
  panel.appendChild(mkSelect("intensity_scale", "intensity", INTENSITY_SCALES));
  panel.appendChild(mkSelect("mode", "mode", ["manual", "assisted"]));

  const seed = el("label", "field", "seed ");
  const input = document.createElement("input");
  input.type = "number";
  input.name = "seed";
  input.value = "0";
  seed.appendChild(input);
  panel.appendChild(seed);

  const start = el("button", "start", "start");
  start.dataset.action = "start";
  panel.appendChild(start);
  return panel;
}

/** Top-level render: one call maps the whole view state to a DOM tree. */
export function renderApp(state: ViewState, tonnesOptions: number[]): HTMLElement {
  const root = el("div", "app");
  if (!state.session) {
    root.appendChild(renderSetup());
    if (state.lastError) root.appendChild(renderError(state.lastError));
    return root;
  }
  const s = state.session;
  root.appendChild(renderHeader(s));
  if (state.lastError) root.appendChild(renderError(state.lastError));

  if (s.finished) {
    if (state.results) root.appendChild(renderResults(state.results));
    else root.appendChild(el("div", "results", "tallying the day..."));
    return root;
  }

  const hinted = hintTonnes(state.hint);
  const presses = el("section", "presses");
  presses.appendChild(el("h2", undefined, "presses"));
  for (const p of s.presses) {
    presses.appendChild(
      renderPress(p, state.selection.pressId === p.press_id, hinted.press.get(p.press_id) ?? 0),
    );
  }
  root.appendChild(presses);

  const queue = el("section", "queue");
  queue.appendChild(el("h2", undefined, `queue (${s.queue.length} trucks)`));
  if (s.queue.length === 0) queue.appendChild(el("p", "empty", "no trucks waiting"));
  for (const t of s.queue) {
    queue.appendChild(
      renderTruck(t, state.selection.truckId === t.truck_id, hinted.truck.get(t.truck_id) ?? 0),
    );
  }
  root.appendChild(queue);

  root.appendChild(renderControls(state, tonnesOptions));
  return root;
}
