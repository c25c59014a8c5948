import { FetchLike, QueryResponse } from "../src/api.js";

export function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export function famResponse(words: [string, number][], overrides: Partial<QueryResponse> = {}): QueryResponse {
  return {
    inputs: [
      { word: "son", nu: 2 },
      { word: "parent", nu: 2 },
    ],
    unknown_tokens: [],
    results: words.map(([word, score]) => ({
      word,
      score,
      distances: { son: 1, parent: 2 },
    })),
    depth_used: 3,
    matrix: "blm",
    timing_ms: 0.5,
    ...overrides,
  };
}

export interface RecordedCall {
  url: string;
  body: Record<string, unknown> | null;
}

/** Scriptable fetch: each call shifts the next queued responder. */
export function scriptedFetch(
  queue: Array<(call: RecordedCall) => Promise<Response> | Response>,
  calls: RecordedCall[] = [],
): { fetchFn: FetchLike; calls: RecordedCall[] } {
  const fetchFn: FetchLike = async (url, init) => {
    const call: RecordedCall = {
      url,
      body: init?.body ? JSON.parse(String(init.body)) : null,
    };
    calls.push(call);
    const responder = queue.shift();
    if (!responder) throw new Error(`unexpected fetch: ${url}`);
    return responder(call);
  };
  return { fetchFn, calls };
}

export function deferred<T>(): { promise: Promise<T>; resolve: (v: T) => void } {
  let resolve!: (v: T) => void;
  const promise = new Promise<T>((r) => {
    resolve = r;
  });
  return { promise, resolve };
}

export async function flushMicrotasks(rounds = 10): Promise<void> {
  for (let i = 0; i < rounds; i += 1) {
    await Promise.resolve();
  }
}
