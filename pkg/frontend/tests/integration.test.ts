/** End-to-end tests against the real backend.
 *
 * Setup spawns the correction service over a small generated corpus; the
 * tests themselves talk to it exclusively through ApiClient, exactly like
 * the browser UI.  The filesystem is only touched here in setup, to build
 * the corpus and to pick fixture paragraphs with known shapes.
 */

import { ChildProcess, spawn, spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { canonicalJson } from "../src/canonical.js";
import { ApiClient } from "../src/client.js";
import { applyEdit, isDirty, makeState, snapEnd } from "../src/state.js";
import { DISCOURSE_LABELS, DiscourseLabel, LabeledParagraphJson } from "../src/types.js";

const PORT = 8300 + (process.pid % 600);
const BASE = `http://127.0.0.1:${PORT}`;

const GEN_SCRIPT = `
import os, sys
from rwkit import dataio
from rwkit.synth import SynthConfig, make_labeled_corpus

out = sys.argv[1]
os.makedirs(out, exist_ok=True)
corpus = make_labeled_corpus(SynthConfig(seed=33, n_paragraphs=10))
rows = [dataio.labeled_to_dict(lp) for lp in corpus]
for name in ("labeled.jsonl", "paragraphs.jsonl"):
    with open(os.path.join(out, name), "w") as fh:
        for d in rows:
            fh.write(dataio.canonical_json(d) + "\\n")
`;

let workDir: string;
let server: ChildProcess | undefined;
let serverLog = "";
let rows: LabeledParagraphJson[] = [];

function pidOf(lp: LabeledParagraphJson): string {
  return `${lp.paper_id}/${lp.index}`;
}

function sentenceOfSpan(lp: LabeledParagraphJson, start: number): number {
  return lp.sentences.findIndex(([s, e]) => s <= start && start < e);
}

/** A paragraph holding a reference span in a non-final sentence: the one
 * shape where stretching the span right must cross a sentence boundary.
 */
function refSpanFixture(skip: Set<string>): { pid: string; span: number; sentence: number } {
  for (const lp of rows) {
    if (skip.has(pidOf(lp))) continue;
    for (let i = 0; i < lp.spans.length; i++) {
      const span = lp.spans[i]!;
      if (span.type !== "reference") continue;
      const si = sentenceOfSpan(lp, span.start);
      if (si >= 0 && si < lp.sentences.length - 1) {
        return { pid: pidOf(lp), span: i, sentence: si };
      }
    }
  }
  throw new Error("corpus has no reference span in a non-final sentence");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "review-ui-"));
  const dataDir = join(workDir, "data");
  const gen = spawnSync("python3", ["-c", GEN_SCRIPT, dataDir], { encoding: "utf-8" });
  if (gen.status !== 0) throw new Error(`corpus generation failed: ${gen.stderr}`);
  rows = readFileSync(join(dataDir, "labeled.jsonl"), "utf-8")
    .trim()
    .split("\n")
    .map((line) => JSON.parse(line) as LabeledParagraphJson);

  server = spawn(
    "python3",
    [
      "-m",
      "rwkit.cli",
      "serve",
      "--data",
      dataDir,
      "--store",
      join(workDir, "corrections"),
      "--host",
      "127.0.0.1",
      "--port",
      String(PORT),
    ],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  server.stdout?.on("data", (chunk: Buffer) => (serverLog += chunk.toString()));
  server.stderr?.on("data", (chunk: Buffer) => (serverLog += chunk.toString()));

  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const response = await fetch(`${BASE}/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 300));
  }
  throw new Error(`service never came up on ${BASE}\n${serverLog}`);
}, 120_000);

afterAll(() => {
  server?.kill("SIGTERM");
  if (workDir) rmSync(workDir, { recursive: true, force: true });
});

describe("review UI against the live service", () => {
  const api = new ApiClient(BASE);
  const used = new Set<string>();

  it("round-trips an untouched paragraph byte-identically", { timeout: 30_000 }, async () => {
    const session = await api.openSession("alice");
    const next = await api.nextItem(session);
    if (next.done) throw new Error("empty corpus");
    const state = makeState(next.item.paragraph_id, next.item.version, next.item.labeled);
    used.add(state.paragraphId);
    expect(isDirty(state)).toBe(false);

    const outcome = await api.putItem(state.paragraphId, session, 0, state.buffer);
    expect(outcome).toEqual({ kind: "ok", version: 1 });

    // the export line is the server's own serialization of what it stored;
    // our canonical bytes must appear in it verbatim
    const exported = await api.exportAll();
    const line = exported
      .trim()
      .split("\n")
      .find((l) => (JSON.parse(l) as { paragraph_id: string }).paragraph_id === state.paragraphId);
    expect(line).toBeDefined();
    expect(line!).toContain('"labeled":' + canonicalJson(state.buffer));
  });

  it(
    "blocks an illegal boundary move client-side, and the server rejects it when forced",
    { timeout: 30_000 },
    async () => {
      const fixture = refSpanFixture(used);
      used.add(fixture.pid);
      const item = await api.getItem(fixture.pid);
      const state = makeState(item.paragraph_id, item.version, item.labeled);

      // drag the reference span's end into the following sentence
      const sentenceEnd = state.buffer.sentences[fixture.sentence]![1];
      const target = sentenceEnd + 2;
      expect(snapEnd(state.buffer, target)).toBeGreaterThan(sentenceEnd);
      const result = applyEdit(state, {
        kind: "move_span_edge",
        span: fixture.span,
        edge: "end",
        pos: target,
      });
      if (result.ok) throw new Error("edit should have been blocked");
      expect(result.violations.map((v) => v.rule)).toContain("reference_span_length");

      // force the same mutation past the client and submit it raw
      const session = await api.openSession("mallory");
      const forced = structuredClone(state.buffer);
      const span = forced.spans[fixture.span]!;
      span.end = snapEnd(forced, target);
      span.citations = forced.citation_marks
        .filter((m) => m.start >= span.start && m.end <= span.end)
        .map((m) => ({ ...m, type: span.type }));
      const outcome = await api.putItem(fixture.pid, session, item.version, forced);
      expect(outcome.kind).toBe("invalid");
      if (outcome.kind === "invalid") {
        expect(outcome.violations.map((v) => v.rule)).toContain("reference_span_length");
      }

      // the rejected write left no trace
      const after = await api.getItem(fixture.pid);
      expect(after.version).toBe(item.version);
    },
  );

  it("stores a valid correction and exports it verbatim", { timeout: 30_000 }, async () => {
    const lp = rows.find((r) => !used.has(pidOf(r)));
    if (!lp) throw new Error("corpus exhausted");
    const pid = pidOf(lp);
    used.add(pid);

    const session = await api.openSession("alice");
    const item = await api.getItem(pid);
    const state = makeState(item.paragraph_id, item.version, item.labeled);
    const newLabel = DISCOURSE_LABELS.find(
      (label) => label !== state.buffer.sentence_labels[0],
    ) as DiscourseLabel;
    const edited = applyEdit(state, { kind: "relabel_sentence", sentence: 0, label: newLabel });
    if (!edited.ok) throw new Error(`relabel blocked: ${edited.reason}`);

    const outcome = await api.putItem(pid, session, item.version, edited.state.buffer);
    expect(outcome).toEqual({ kind: "ok", version: 1 });

    const exported = await api.exportAll("alice");
    const line = exported
      .trim()
      .split("\n")
      .find((l) => (JSON.parse(l) as { paragraph_id: string }).paragraph_id === pid);
    expect(line).toBeDefined();
    expect(line!).toContain('"labeled":' + canonicalJson(edited.state.buffer));
    const stored = JSON.parse(line!) as { labeled: LabeledParagraphJson };
    expect(stored.labeled.sentence_labels[0]).toBe(newLabel);

    // submitting against the stale base now conflicts instead of overwriting
    const stale = await api.putItem(pid, session, item.version, edited.state.buffer);
    expect(stale).toEqual({ kind: "conflict", currentVersion: 1, baseVersion: 0 });
  });
});
