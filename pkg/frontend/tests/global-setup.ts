/** Builds a small family-words index and serves it with the real backend,
 * so the integration tests exercise the UI against live HTTP responses.
 * The chosen port is written to tests/.service.json for the tests to read.
 */

import { ChildProcess, execFileSync, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const FAM_TSV = [
  "brother\tson of my father and my mother",
  "father\ta parent",
  "mother\ta parent",
  "son\ta child",
  "parent\tsomebody who has a child",
  "child\ta son",
].join("\n");

const PYTHON = process.env.PYTHON ?? "python3";
const here = dirname(fileURLToPath(import.meta.url));

let service: ChildProcess | null = null;

async function waitForHealth(base: string, timeoutMs = 45_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${base}/api/health`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error(`service at ${base} did not become healthy in ${timeoutMs} ms`);
}

export default async function setup(): Promise<() => Promise<void>> {
  const dir = mkdtempSync(join(tmpdir(), "revdict-ui-"));
  const dictPath = join(dir, "fam.tsv");
  const indexPath = join(dir, "fam.idx");
  writeFileSync(dictPath, FAM_TSV + "\n", "utf-8");
  execFileSync(PYTHON, ["-m", "revdict", "build", "--dict", dictPath, "--out", indexPath], {
    stdio: "inherit",
  });

  const port = 8900 + (process.pid % 800);
  const base = `http://127.0.0.1:${port}`;
  service = spawn(
    PYTHON,
    ["-m", "revdict", "serve", "--index", indexPath, "--host", "127.0.0.1", "--port", String(port)],
    { stdio: "ignore" },
  );
  await waitForHealth(base);
  writeFileSync(join(here, ".service.json"), JSON.stringify({ base }), "utf-8");

  return async () => {
    if (service && !service.killed) {
      service.kill("SIGTERM");
    }
  };
}
