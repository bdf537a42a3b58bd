/** HTTP client for the correction service.
 *
 * The UI talks to the backend exclusively through these calls.  Submission
 * outcomes are data, not exceptions: conflict and validation rejection are
 * expected states the UI must render, so putItem returns a tagged union and
 * only genuine transport failures throw (after retrying).
 */

import { canonicalJson } from "./canonical.js";
import { ItemPayload, LabeledParagraphJson, Violation } from "./types.js";

export type PutOutcome =
  | { kind: "ok"; version: number }
  | { kind: "conflict"; currentVersion: number; baseVersion: number }
  | { kind: "invalid"; violations: Violation[]; detail: string }
  | { kind: "http_error"; status: number; detail: string };

export type NextOutcome = { done: true } | { done: false; item: ItemPayload };

type FetchFn = typeof globalThis.fetch;

function encodePath(pid: string): string {
  // paragraph ids contain "/" (paper id / paragraph index); keep the slashes,
  // escape everything else
  return pid.split("/").map(encodeURIComponent).join("/");
}

function detailText(body: unknown): string {
  if (body && typeof body === "object" && "detail" in body) {
    const detail = (body as { detail: unknown }).detail;
    return typeof detail === "string" ? detail : JSON.stringify(detail);
  }
  return JSON.stringify(body);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchFn = globalThis.fetch,
    private readonly retries: number = 2,
    private readonly retryDelayMs: number = 250,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let lastError: unknown;
    for (let attempt = 0; attempt <= this.retries; attempt++) {
      try {
        return await this.fetchFn(this.baseUrl + path, init);
      } catch (error) {
        // network failure (server restart, dropped connection): retry
        lastError = error;
        if (attempt < this.retries && this.retryDelayMs > 0) {
          await new Promise((resolve) => setTimeout(resolve, this.retryDelayMs));
        }
      }
    }
    throw lastError;
  }

  private async requestJson(path: string, init?: RequestInit): Promise<unknown> {
    const response = await this.request(path, init);
    const body: unknown = await response.json();
    if (!response.ok) {
      throw new Error(`${init?.method ?? "GET"} ${path}: ${response.status} ${detailText(body)}`);
    }
    return body;
  }

  async health(): Promise<{ ok: boolean; paragraphs: number }> {
    return (await this.requestJson("/health")) as { ok: boolean; paragraphs: number };
  }

  async openSession(annotator: string): Promise<string> {
    const body = (await this.requestJson("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: canonicalJson({ annotator }),
    })) as { session_id: string };
    return body.session_id;
  }

  async nextItem(sessionId: string): Promise<NextOutcome> {
    const body = (await this.requestJson(
      `/items/next?session_id=${encodeURIComponent(sessionId)}`,
    )) as {
      done: boolean;
      paragraph_id?: string;
      version?: number;
      labeled?: LabeledParagraphJson;
    };
    if (body.done) return { done: true };
    return {
      done: false,
      item: {
        paragraph_id: body.paragraph_id!,
        version: body.version!,
        labeled: body.labeled!,
      },
    };
  }

  async getItem(pid: string): Promise<ItemPayload> {
    return (await this.requestJson(`/items/${encodePath(pid)}`)) as ItemPayload;
  }

  async putItem(
    pid: string,
    sessionId: string,
    baseVersion: number,
    labeled: LabeledParagraphJson,
  ): Promise<PutOutcome> {
    const response = await this.request(`/items/${encodePath(pid)}`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: canonicalJson({ base_version: baseVersion, labeled, session_id: sessionId }),
    });
    const body: unknown = await response.json();
    if (response.ok) {
      return { kind: "ok", version: (body as { version: number }).version };
    }
    if (response.status === 409) {
      const detail = (body as { detail: { current_version: number; base_version: number } })
        .detail;
      return {
        kind: "conflict",
        currentVersion: detail.current_version,
        baseVersion: detail.base_version,
      };
    }
    if (response.status === 422) {
      const detail = (body as { detail: unknown }).detail;
      if (detail && typeof detail === "object" && "violations" in detail) {
        return {
          kind: "invalid",
          violations: (detail as { violations: Violation[] }).violations,
          detail: "schema violations",
        };
      }
      return { kind: "invalid", violations: [], detail: detailText(body) };
    }
    return { kind: "http_error", status: response.status, detail: detailText(body) };
  }

  async exportAll(annotator?: string): Promise<string> {
    const query = annotator ? `?annotator=${encodeURIComponent(annotator)}` : "";
    const response = await this.request(`/export${query}`);
    if (!response.ok) throw new Error(`GET /export: ${response.status}`);
    return await response.text();
  }

  async agreement(a: string, b: string): Promise<Record<string, number>> {
    return (await this.requestJson(
      `/agreement?a=${encodeURIComponent(a)}&b=${encodeURIComponent(b)}`,
    )) as Record<string, number>;
  }
}
