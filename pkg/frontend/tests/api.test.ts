import { describe, expect, it } from "vitest";

import { ApiError, Client } from "../src/api.js";
import { makeSession } from "./fixtures.js";

interface Call {
  url: string;
  method: string;
  body?: unknown;
}

/** Fetch stand-in that records every call and replays canned responses. */
function stub(responses: { status: number; payload: unknown }[]) {
  const calls: Call[] = [];
  const fetchImpl = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({
      url,
      method: init?.method ?? "GET",
      body: init?.body ? JSON.parse(init.body as string) : undefined,
    });
    const next = responses.shift()!;
    return {
      ok: next.status < 400,
      status: next.status,
      json: async () => next.payload,
    } as Response;
  };
  return { calls, fetchImpl };
}

describe("Client", () => {
  it("creates sessions with the documented path and body, unwrapping the state", async () => {
    const session = makeSession();
    const wrapper = { session_id: session.session_id, state: session };
    const { calls, fetchImpl } = stub([{ status: 201, payload: wrapper }]);
    const client = new Client("", fetchImpl);
    const got = await client.createSession({
      scenario: { variety_profile: "vR" },
      mode: "assisted",
      seed: 7,
    });
    expect(got).toEqual(session);
    expect(calls).toEqual([
      {
        url: "/sessions",
        method: "POST",
        body: { scenario: { variety_profile: "vR" }, mode: "assisted", seed: 7 },
      },
    ]);
  });

  it("hits each session endpoint with its id in the path", async () => {
    const session = makeSession();
    const { calls, fetchImpl } = stub([
      { status: 200, payload: session },
      { status: 201, payload: session },
      { status: 200, payload: { interval: 0, score: 1, alternatives: 1, assignments: [] } },
      { status: 200, payload: session },
      { status: 200, payload: {} },
    ]);
    const client = new Client("http://box:8000/", fetchImpl);
    await client.state("s0042");
    await client.assign("s0042", { press_id: 1, truck_id: 9, tonnes: 15 });
    await client.hint("s0042");
    await client.advance("s0042");
    await client.results("s0042");
    expect(calls.map((c) => [c.method, c.url])).toEqual([
      ["GET", "http://box:8000/sessions/s0042/state"],
      ["POST", "http://box:8000/sessions/s0042/assignments"],
      ["GET", "http://box:8000/sessions/s0042/hint"],
      ["POST", "http://box:8000/sessions/s0042/advance"],
      ["GET", "http://box:8000/sessions/s0042/results"],
    ]);
    expect(calls[1].body).toEqual({ press_id: 1, truck_id: 9, tonnes: 15 });
    expect(calls[3].body).toBeUndefined();
  });

  it("turns refusals into ApiError carrying code, rule and message", async () => {
    const refusal = {
      code: "variety-mismatch",
      rule: "a press holds a single variety per cycle",
      message: "press 0 holds variety 1, truck 3 carries variety 2",
    };
    const { fetchImpl } = stub([{ status: 409, payload: refusal }]);
    const client = new Client("", fetchImpl);
    const err = await client
      .assign("s0001", { press_id: 0, truck_id: 3, tonnes: 5 })
      .then(() => null, (e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    const apiErr = err as ApiError;
    expect(apiErr.status).toBe(409);
    expect(apiErr.code).toBe("variety-mismatch");
    expect(apiErr.rule).toBe(refusal.rule);
    expect(apiErr.message).toBe(refusal.message);
  });
});
