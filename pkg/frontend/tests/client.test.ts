import { describe, expect, it } from "vitest";

import { canonicalJson } from "../src/canonical.js";
import { ApiClient } from "../src/client.js";
import { loadFixture } from "./fixtures.js";

interface Call {
  url: string;
  init?: RequestInit;
}

/** A fetch stub that replays a queue: Error entries reject (network failure),
 * everything else resolves.
 */
function stub(queue: Array<Response | Error>) {
  const calls: Call[] = [];
  const fn = (async (url: string | URL | Request, init?: RequestInit) => {
    calls.push({ url: String(url), init });
    const next = queue.shift();
    if (!next) throw new Error("stub queue exhausted");
    if (next instanceof Error) throw next;
    return next;
  }) as typeof fetch;
  return { fn, calls };
}

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function client(queue: Array<Response | Error>) {
  const { fn, calls } = stub(queue);
  // no delay between retries in tests
  return { api: new ApiClient("http://test", fn, 2, 0), calls };
}

describe("ApiClient", () => {
  it("opens a session and returns its id", async () => {
    const { api, calls } = client([json(200, { session_id: "s1", annotator: "alice" })]);
    expect(await api.openSession("alice")).toBe("s1");
    expect(calls[0]!.url).toBe("http://test/sessions");
    expect(calls[0]!.init?.body).toBe('{"annotator":"alice"}');
  });

  it("surfaces error details when a session is refused", async () => {
    const { api } = client([json(422, { detail: "empty annotator name" })]);
    await expect(api.openSession("  ")).rejects.toThrow(/empty annotator name/);
  });

  it("parses the two shapes of next-item responses", async () => {
    const labeled = loadFixture("mixed");
    const { api, calls } = client([
      json(200, { done: false, paragraph_id: "P0/1", version: 2, labeled }),
      json(200, { done: true }),
    ]);
    const first = await api.nextItem("s1");
    expect(first).toMatchObject({ done: false, item: { paragraph_id: "P0/1", version: 2 } });
    expect(await api.nextItem("s1")).toEqual({ done: true });
    expect(calls[0]!.url).toBe("http://test/items/next?session_id=s1");
  });

  it("sends the canonical submission body byte for byte", async () => {
    const labeled = loadFixture("mixed");
    const { api, calls } = client([json(200, { paragraph_id: "P0/1", version: 1 })]);
    const outcome = await api.putItem("P0/1", "s1", 0, labeled);
    expect(outcome).toEqual({ kind: "ok", version: 1 });
    expect(calls[0]!.url).toBe("http://test/items/P0/1");
    expect(calls[0]!.init?.method).toBe("PUT");
    expect(calls[0]!.init?.body).toBe(
      canonicalJson({ base_version: 0, labeled, session_id: "s1" }),
    );
  });

  it("maps a 409 to a conflict outcome", async () => {
    const { api } = client([
      json(409, { detail: { current_version: 3, base_version: 1 } }),
    ]);
    const outcome = await api.putItem("P0/1", "s1", 1, loadFixture("mixed"));
    expect(outcome).toEqual({ kind: "conflict", currentVersion: 3, baseVersion: 1 });
  });

  it("maps a 422 violation report to an invalid outcome", async () => {
    const violations = [
      { rule: "reference_span_length", message: "reference span exceeds one sentence", span_index: 0 },
    ];
    const { api } = client([json(422, { detail: { violations } })]);
    const outcome = await api.putItem("P0/1", "s1", 0, loadFixture("mixed"));
    expect(outcome).toMatchObject({ kind: "invalid", violations });
  });

  it("maps a 422 with a plain message to an invalid outcome too", async () => {
    const { api } = client([json(422, { detail: "malformed correction: missing field 'text'" })]);
    const outcome = await api.putItem("P0/1", "s1", 0, loadFixture("mixed"));
    expect(outcome).toMatchObject({ kind: "invalid", violations: [] });
    if (outcome.kind === "invalid") expect(outcome.detail).toMatch(/malformed/);
  });

  it("maps other statuses to http_error", async () => {
    const { api } = client([json(500, { detail: "boom" })]);
    const outcome = await api.putItem("P0/1", "s1", 0, loadFixture("mixed"));
    expect(outcome).toMatchObject({ kind: "http_error", status: 500 });
  });

  it("retries a dropped connection and succeeds", async () => {
    const { api, calls } = client([
      new Error("socket hang up"),
      json(200, { ok: true, paragraphs: 3 }),
    ]);
    expect(await api.health()).toEqual({ ok: true, paragraphs: 3 });
    expect(calls).toHaveLength(2);
  });

  it("gives up after exhausting retries", async () => {
    const { api, calls } = client([
      new Error("down"),
      new Error("down"),
      new Error("down"),
    ]);
    await expect(api.health()).rejects.toThrow(/down/);
    expect(calls).toHaveLength(3);
  });

  it("fetches the export as text", async () => {
    const { api, calls } = client([new Response("{}\n", { status: 200 })]);
    expect(await api.exportAll("alice")).toBe("{}\n");
    expect(calls[0]!.url).toBe("http://test/export?annotator=alice");
  });
});
