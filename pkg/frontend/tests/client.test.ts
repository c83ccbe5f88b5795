import { describe, expect, it } from "vitest";
import { ApiClient, ApiError } from "../src/api/client.js";
import { Boundary } from "../src/api/types.js";

const boundary: Boundary = {
  vertices: [
    [20, 20],
    [200, 20],
    [200, 180],
    [20, 180],
  ],
  door: [
    [90, 20],
    [94, 20],
  ],
  resolution: 256,
};

type Call = { url: string; init?: RequestInit };

function fakeFetch(
  responder: (url: string, init?: RequestInit) => { status: number; body: unknown },
  calls?: Call[],
): typeof fetch {
  return (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    calls?.push({ url, init });
    const { status, body } = responder(url, init);
    return new Response(status === 204 ? null : JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });
  }) as typeof fetch;
}

describe("ApiClient", () => {
  it("prefixes every request with the API root", async () => {
    const calls: Call[] = [];
    const client = new ApiClient(
      "http://h:1",
      fakeFetch(() => ({ status: 201, body: { session_id: "s1", boundary } }), calls),
    );
    await client.createSession(boundary);
    expect(calls[0].url).toBe("http://h:1/api/v1/sessions");
    expect(calls[0].init?.method).toBe("POST");
  });

  it("surfaces structured service errors as ApiError", async () => {
    const client = new ApiClient(
      "",
      fakeFetch(() => ({
        status: 404,
        body: { error: { code: "unknown_session", message: "no session x" } },
      })),
    );
    await expect(client.transfer("x", "r")).rejects.toMatchObject({
      status: 404,
      code: "unknown_session",
    });
  });

  it("rejects malformed response payloads instead of passing them on", async () => {
    const client = new ApiClient(
      "",
      fakeFetch(() => ({ status: 200, body: { candidates: [{ record_id: 3 }] } })),
    );
    await expect(client.retrieve("s", {}, 5)).rejects.toThrow();
  });

  it("validates k locally before sending anything", async () => {
    let sent = 0;
    const client = new ApiClient(
      "",
      fakeFetch(() => {
        sent += 1;
        return { status: 200, body: { candidates: [] } };
      }),
    );
    await expect(client.retrieve("s", {}, 0)).rejects.toBeInstanceOf(ApiError);
    await expect(client.retrieve("s", {}, 101)).rejects.toBeInstanceOf(ApiError);
    await expect(client.retrieve("s", {}, 2.5)).rejects.toBeInstanceOf(ApiError);
    expect(sent).toBe(0);
  });

  it("refuses to send an invalid boundary", async () => {
    let sent = 0;
    const client = new ApiClient(
      "",
      fakeFetch(() => {
        sent += 1;
        return { status: 201, body: { session_id: "s", boundary } };
      }),
    );
    const bad = { ...boundary, vertices: boundary.vertices.slice(0, 2) };
    await expect(client.createSession(bad as Boundary)).rejects.toThrow();
    expect(sent).toBe(0);
  });

  it("serializes requests: the next starts after the previous settles", async () => {
    const order: string[] = [];
    const client = new ApiClient("", (async (input: RequestInfo | URL) => {
      const url = String(input);
      order.push(`start ${url}`);
      await new Promise((r) => setTimeout(r, url.includes("retrieve") ? 30 : 5));
      order.push(`end ${url}`);
      const body = url.includes("retrieve")
        ? { candidates: [] }
        : { graph: { nodes: [], edges: [] } };
      return new Response(JSON.stringify(body), { status: 200 });
    }) as typeof fetch);
    await Promise.all([
      client.retrieve("s", {}, 3),
      client.edit("s", { op: "delete_edge", a: 0, b: 1 }),
    ]);
    expect(order).toEqual([
      "start /api/v1/sessions/s/retrieve",
      "end /api/v1/sessions/s/retrieve",
      "start /api/v1/sessions/s/edit",
      "end /api/v1/sessions/s/edit",
    ]);
  });

  it("keeps serving after a failed request in the queue", async () => {
    let n = 0;
    const client = new ApiClient(
      "",
      fakeFetch(() => {
        n += 1;
        if (n === 1) {
          return { status: 409, body: { error: { code: "no_graph", message: "m" } } };
        }
        return { status: 200, body: { graph: { nodes: [], edges: [] } } };
      }),
    );
    await expect(
      client.edit("s", { op: "add_edge", a: 0, b: 1 }),
    ).rejects.toBeInstanceOf(ApiError);
    const graph = await client.edit("s", { op: "add_edge", a: 0, b: 1 });
    expect(graph).toEqual({ nodes: [], edges: [] });
  });
});
