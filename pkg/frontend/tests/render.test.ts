// @vitest-environment happy-dom
import { describe, expect, it } from "vitest";

import { clockLabel, renderApp } from "../src/render.js";
import type { ViewState } from "../src/state.js";
import { makeHint, makePress, makeResults, makeSession, makeTruck } from "./fixtures.js";

function view(over: Partial<ViewState> = {}): ViewState {
  return {
    session: null,
    selection: { truckId: null, pressId: null },
    hint: null,
    lastError: null,
    results: null,
    busy: false,
    ...over,
  };
}

describe("clockLabel", () => {
  it("starts the day at 08:30 and wraps past midnight", () => {
    expect(clockLabel(0)).toBe("08:30");
    expect(clockLabel(1)).toBe("09:00");
    expect(clockLabel(31)).toBe("00:00");
    expect(clockLabel(33)).toBe("01:00");
  });
});

describe("setup screen", () => {
  it("offers scenario knobs and a start action before any session", () => {
    const root = renderApp(view(), []);
    expect(root.querySelector('[data-action="start"]')).not.toBeNull();
    const profiles = root.querySelectorAll('select[name="variety_profile"] option');
    expect(profiles.length).toBe(16);
    expect(root.querySelectorAll('select[name="mode"] option').length).toBe(2);
    expect(root.querySelector('input[name="seed"]')).not.toBeNull();
  });
});

describe("board", () => {
  it("shows the interval clock, payoff and workflow headroom", () => {
    const session = makeSession({ interval: 3, payoff: 250, cap_remaining: 40 });
    const root = renderApp(view({ session }), []);
    expect(root.querySelector(".clock")?.textContent).toBe("interval 4 of 34 (10:00)");
    expect(root.querySelector(".payoff")?.textContent).toBe("payoff 250");
    expect(root.querySelector(".cap")?.textContent).toBe("40 t workflow left");
  });

  it("draws press fill bars and a countdown while pressing", () => {
    const session = makeSession({
      presses: [
        makePress({ load: 15, spare: 10, variety: 3 }),
        makePress({
          press_id: 1,
          load: 25,
          spare: 0,
          variety: 2,
          processing: true,
          remaining_intervals: 3,
        }),
      ],
    });
    const root = renderApp(view({ session }), []);
    const cards = root.querySelectorAll(".press");
    expect(cards.length).toBe(2);
    expect((cards[0].querySelector(".fill") as HTMLElement).style.width).toBe("60%");
    expect(cards[0].textContent).toContain("10 t to a full cycle");
    expect(cards[1].textContent).toContain("pressing, 3 intervals left");
    expect(cards[1].classList.contains("busy")).toBe(true);
  });

  it("marks fresh arrivals and spells out deterioration countdowns", () => {
    const session = makeSession({
      queue: [
        makeTruck({ truck_id: 1, age: 0 }),
        makeTruck({ truck_id: 2, age: 2, intervals_to_degradation: 2, intervals_to_rejection: 6 }),
        makeTruck({
          truck_id: 3,
          age: 5,
          degraded: true,
          variety: 1,
          intervals_to_degradation: null,
          intervals_to_rejection: 3,
        }),
      ],
    });
    const root = renderApp(view({ session }), []);
    const cards = root.querySelectorAll(".truck");
    expect(cards[0].classList.contains("arrived")).toBe(true);
    expect(cards[1].classList.contains("arrived")).toBe(false);
    expect(cards[1].textContent).toContain("degrades in 2");
    expect(cards[2].classList.contains("degraded")).toBe(true);
    expect(cards[2].textContent).toContain("degraded, rejected in 3");
  });

  it("highlights the current selection", () => {
    const session = makeSession();
    const root = renderApp(view({ session, selection: { truckId: 1, pressId: 0 } }), []);
    expect(root.querySelector('.truck[data-truck="1"]')?.classList.contains("selected")).toBe(true);
    expect(root.querySelector('.press[data-press="0"]')?.classList.contains("selected")).toBe(true);
    expect(root.querySelector('.press[data-press="1"]')?.classList.contains("selected")).toBe(
      false,
    );
  });

  it("renders one assign button per offered tonnage, all in 5 t steps", () => {
    const session = makeSession();
    const root = renderApp(view({ session, selection: { truckId: 1, pressId: 0 } }), [5, 10, 15]);
    const buttons = [...root.querySelectorAll<HTMLElement>('[data-action="assign"]')];
    expect(buttons.map((b) => b.dataset.tonnes)).toEqual(["5", "10", "15"]);
    for (const b of buttons) expect(Number(b.dataset.tonnes) % 5).toBe(0);
  });
});

describe("error banner", () => {
  it("repeats the service refusal verbatim", () => {
    const lastError = {
      code: "cap-exceeded",
      rule: "at most 75 t may be assigned per interval",
      message: "assigning 10 t would take the interval to 80 t",
    };
    const root = renderApp(view({ session: makeSession(), lastError }), []);
    const banner = root.querySelector(".error-banner")!;
    expect(banner.querySelector(".error-code")?.textContent).toBe(lastError.code);
    expect(banner.querySelector(".error-rule")?.textContent).toBe(lastError.rule);
    expect(banner.querySelector(".error-message")?.textContent).toBe(lastError.message);
  });
});

describe("hints", () => {
  it("keeps hint controls off the manual board", () => {
    const root = renderApp(view({ session: makeSession({ mode: "manual" }) }), []);
    expect(root.querySelector('[data-action="hint"]')).toBeNull();
  });

  it("badges the presses and trucks a hint would touch", () => {
    const session = makeSession({
      mode: "assisted",
      queue: [makeTruck({ truck_id: 1 }), makeTruck({ truck_id: 2, variety: 3 })],
    });
    const hint = makeHint({
      assignments: [
        { press_id: 0, truck_id: 1, variety: 2, tonnes: 20 },
        { press_id: 0, truck_id: 2, variety: 2, tonnes: 5 },
      ],
    });
    const root = renderApp(view({ session, hint }), []);
    expect(root.querySelector('.press[data-press="0"] .hint-badge')?.textContent).toBe("+25 t");
    expect(root.querySelector('.truck[data-truck="1"] .hint-badge')?.textContent).toBe("-20 t");
    expect(root.querySelector('.truck[data-truck="2"] .hint-badge')?.textContent).toBe("-5 t");
    expect(root.querySelector('.press[data-press="1"] .hint-badge')).toBeNull();
    const apply = root.querySelector('[data-action="apply-hint"]');
    expect(apply?.textContent).toContain("2 moves");
  });

  it("disables applying a hint that recommends holding everything", () => {
    const session = makeSession({ mode: "assisted" });
    const hint = makeHint({ assignments: [] });
    const root = renderApp(view({ session, hint }), []);
    const apply = root.querySelector('[data-action="apply-hint"]')!;
    expect(apply.hasAttribute("disabled")).toBe(true);
  });
});

describe("end of day", () => {
  it("swaps the board for the results panel once finished", () => {
    const session = makeSession({ interval: 34, finished: true });
    const root = renderApp(view({ session, results: makeResults() }), []);
    expect(root.querySelector(".press")).toBeNull();
    const panel = root.querySelector(".results")!;
    expect(panel.textContent).toContain("1520");
    expect(panel.textContent).toContain("600 t");
    expect(panel.querySelector('[data-action="new-session"]')).not.toBeNull();
    expect(root.querySelector(".clock")?.textContent).toBe("day over");
  });
});
