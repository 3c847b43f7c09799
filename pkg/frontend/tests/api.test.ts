import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, isRevisionConflict, PROTOCOL_VERSION } from "../src/api.js";

interface Recorded {
  input: string;
  init: RequestInit | undefined;
}

function stubFetch(status: number, body: unknown, contentType = "application/json") {
  const calls: Recorded[] = [];
  const fetchFn = async (input: string, init?: RequestInit): Promise<Response> => {
    calls.push({ input, init });
    const text = typeof body === "string" ? body : JSON.stringify(body);
    return new Response(text, { status, headers: { "content-type": contentType } });
  };
  return { calls, fetchFn };
}

describe("api client", () => {
  it("stamps the protocol version and bearer token on requests", async () => {
    const { calls, fetchFn } = stubFetch(200, { revision: 4, state: {} });
    const client = new ApiClient("http://svc", fetchFn);
    client.setToken("tok-1");
    await client.snapshot("p1");
    expect(calls[0].input).toBe("http://svc/api/projects/p1/snapshot");
    const headers = calls[0].init?.headers as Record<string, string>;
    expect(headers["X-Protocol-Version"]).toBe(PROTOCOL_VERSION);
    expect(headers["Authorization"]).toBe("Bearer tok-1");
  });

  it("keeps the session token from a login response", async () => {
    const { calls, fetchFn } = stubFetch(200, { token: "tok-2", expires_at: 1, subject: "a" });
    const client = new ApiClient("", fetchFn);
    await client.login("a", "Alice");
    await client.listProjects().catch(() => undefined);
    const headers = calls[1].init?.headers as Record<string, string>;
    expect(headers["Authorization"]).toBe("Bearer tok-2");
  });

  it("surfaces the error envelope as a typed ApiError", async () => {
    const { fetchFn } = stubFetch(409, {
      error: "RevisionConflict",
      message: "expected 3, actual 4",
      detail: { expected: 3, actual: 4 },
    });
    const client = new ApiClient("", fetchFn);
    const failure = await client.commit("p1", 3, { kind: "move_block" }).catch((err) => err);
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure.code).toBe("RevisionConflict");
    expect(failure.status).toBe(409);
    expect(failure.detail).toEqual({ expected: 3, actual: 4 });
    expect(isRevisionConflict(failure)).toBe(true);
    expect(isRevisionConflict(new Error("boom"))).toBe(false);
  });

  it("falls back to the status code when the failure body is not an envelope", async () => {
    const { fetchFn } = stubFetch(502, "bad gateway", "text/plain");
    const client = new ApiClient("", fetchFn);
    const failure = await client.listProjects().catch((err) => err);
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure.code).toBe("Http502");
    expect(failure.status).toBe(502);
  });
});
