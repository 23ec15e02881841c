/** Thin typed wrapper over the planning service's HTTP interface. */

import type {
  AssignmentRow,
  CreateSessionRequest,
  CreateSessionResponse,
  Hint,
  Results,
  ServiceError,
  SessionState,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly rule: string;

  constructor(status: number, body: ServiceError) {
    super(body.message);
    this.status = status;
    this.code = body.code;
    this.rule = body.rule;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class Client {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(base = "", fetchImpl: FetchLike = (i, init) => fetch(i, init)) {
    // trailing slash would double up when paths are appended
    this.base = base.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchImpl(this.base + path, init);
    const payload = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, payload as ServiceError);
    }
    return payload as T;
  }

  // the create endpoint alone wraps its payload; the state repeats the id
  async createSession(req: CreateSessionRequest): Promise<SessionState> {
    const resp = await this.request<CreateSessionResponse>("POST", "/sessions", req);
    return resp.state;
  }

  state(sessionId: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${sessionId}/state`);
  }

  assign(sessionId: string, row: Omit<AssignmentRow, "variety">): Promise<SessionState> {
    return this.request("POST", `/sessions/${sessionId}/assignments`, row);
  }

  hint(sessionId: string): Promise<Hint> {
    return this.request("GET", `/sessions/${sessionId}/hint`);
  }

  advance(sessionId: string): Promise<SessionState> {
    return this.request("POST", `/sessions/${sessionId}/advance`);
  }

  results(sessionId: string): Promise<Results> {
    return this.request("GET", `/sessions/${sessionId}/results`);
  }
}
