/**
 * Boots the real judging service for the UI tests and seeds two sessions:
 *
 *   "kb"      6 items / 3 evaluators - driven by the keyboard test
 *   "seventy" 250 items judged so aggregates land on 140 good / 60 bad /
 *             50 same, i.e. a 70% win rate
 *
 * The service is the Python package's own `gsb serve` command; tests talk
 * to it over real HTTP so the event log on disk is the source of truth.
 */

import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync, mkdirSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import type { GlobalSetupContext } from "vitest/node";

const PORT = 8731;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | undefined;

async function waitForServer(timeoutMs = 20_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`${BASE}/v1/sessions/__probe__/summary`);
      if (res.status === 404) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  throw new Error("judging service did not come up in time");
}

async function createSession(body: unknown): Promise<void> {
  const res = await fetch(`${BASE}/v1/sessions`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!res.ok) throw new Error(`session setup failed: ${res.status} ${await res.text()}`);
}

interface QueueItem {
  done: boolean;
  item_id?: string;
  left_image_url?: string;
}

/** Judge every assignment of `evaluator` so each item lands on its wanted outcome. */
async function judgeQueue(
  session: string,
  evaluator: string,
  wanted: (itemIndex: number) => "good" | "bad" | "same",
): Promise<void> {
  for (;;) {
    const queueRes = await fetch(
      `${BASE}/v1/sessions/${session}/queue?evaluator=${evaluator}&dimension=aesthetic`,
    );
    const queue = (await queueRes.json()) as QueueItem;
    if (queue.done) return;
    const index = Number(queue.item_id!.slice(1));
    const leftFile = queue.left_image_url!.split("/").pop() ?? "";
    const aIsLeft = leftFile.startsWith("a");
    const want = wanted(index);
    const choice =
      want === "same" ? "same" : want === "good" ? (aIsLeft ? "left" : "right") : aIsLeft ? "right" : "left";
    const res = await fetch(`${BASE}/v1/sessions/${session}/judgments`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ evaluator, item_id: queue.item_id, dimension: "aesthetic", choice }),
    });
    if (!res.ok) throw new Error(`seeding judgment failed: ${res.status}`);
  }
}

export default async function setup({ provide }: GlobalSetupContext): Promise<() => void> {
  const workDir = mkdtempSync(join(tmpdir(), "gsb-ui-test-"));
  const logPath = join(workDir, "events.jsonl");
  const imagesDir = join(workDir, "images");
  mkdirSync(imagesDir);
  for (let k = 0; k < 6; k++) {
    writeFileSync(join(imagesDir, `a${k}.png`), `left-${k}`);
    writeFileSync(join(imagesDir, `b${k}.png`), `right-${k}`);
  }

  server = spawn(
    "python3",
    ["-m", "roomforge", "gsb", "serve", "--log", logPath, "--images", imagesDir, "--port", String(PORT)],
    { stdio: ["ignore", "inherit", "inherit"] },
  );
  await waitForServer();

  await createSession({
    session_id: "kb",
    prompts: Array.from({ length: 6 }, (_, k) => ({ id: `p${k}`, text: `prompt ${k}` })),
    images_a: Array.from({ length: 6 }, (_, k) => `a${k}.png`),
    images_b: Array.from({ length: 6 }, (_, k) => `b${k}.png`),
    evaluators: ["e1", "e2", "e3"],
    seed: 5,
    dimensions: ["aesthetic"],
    min_per_item: 3,
  });

  const n = 250;
  await createSession({
    session_id: "seventy",
    prompts: Array.from({ length: n }, (_, k) => ({ id: `p${String(k).padStart(4, "0")}`, text: `prompt ${k}` })),
    images_a: Array.from({ length: n }, (_, k) => `a${k}.png`),
    images_b: Array.from({ length: n }, (_, k) => `b${k}.png`),
    evaluators: ["s1", "s2", "s3"],
    seed: 70,
    dimensions: ["aesthetic"],
    min_per_item: 3,
  });
  const wanted = (index: number): "good" | "bad" | "same" =>
    index < 140 ? "good" : index < 200 ? "bad" : "same";
  for (const evaluator of ["s1", "s2", "s3"]) {
    await judgeQueue("seventy", evaluator, wanted);
  }

  provide("serverUrl", BASE);
  provide("logPath", logPath);

  return () => {
    server?.kill("SIGTERM");
  };
}

declare module "vitest" {
  export interface ProvidedContext {
    serverUrl: string;
    logPath: string;
  }
}
