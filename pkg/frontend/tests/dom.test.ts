// @vitest-environment happy-dom
import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { SearchController } from "../src/controller.js";
import { createView } from "../src/view.js";
import { famResponse, flushMicrotasks, jsonResponse, scriptedFetch } from "./helpers.js";

function mount(queue: Parameters<typeof scriptedFetch>[0]) {
  const { fetchFn, calls } = scriptedFetch(queue);
  let view: ReturnType<typeof createView> | null = null;
  const controller = new SearchController(new ApiClient("", fetchFn), (s) => view?.update(s), 0);
  view = createView(document, controller);
  document.body.innerHTML = "";
  document.body.appendChild(view.root);
  return { controller, view, calls };
}

function type(phrase: string): void {
  const input = document.getElementById("phrase") as HTMLInputElement;
  input.value = phrase;
  input.dispatchEvent(new Event("input", { bubbles: true }));
}

function listedWords(): string[] {
  return Array.from(document.querySelectorAll("#results .result-word")).map(
    (node) => node.textContent ?? "",
  );
}

describe("rendering", () => {
  it("paints results in exactly the response order", async () => {
    mount([
      () => jsonResponse(200, famResponse([["brother", 0.75], ["father", 0.67], ["mother", 0.67]])),
    ]);
    type("son of my parents");
    await flushMicrotasks();
    expect(listedWords()).toEqual(["brother", "father", "mother"]);
  });

  it("clicking a candidate reveals per-input distances and frequencies", async () => {
    mount([() => jsonResponse(200, famResponse([["brother", 0.75]]))]);
    type("son of my parents");
    await flushMicrotasks();
    const detail = document.getElementById("detail") as HTMLElement;
    expect(detail.hidden).toBe(true);
    (document.querySelector("#results .result") as HTMLElement).click();
    await flushMicrotasks();
    expect(detail.hidden).toBe(false);
    const cells = Array.from(detail.querySelectorAll("td")).map((c) => c.textContent);
    // one row per input word: word, frequency, distance
    expect(cells).toEqual(["son", "2", "1", "parent", "2", "2"]);
  });

  it("shows the add-content-words hint instead of a list", async () => {
    mount([() => jsonResponse(422, { code: "NO_CONTENT_WORDS", detail: "none" })]);
    type("the of");
    await flushMicrotasks();
    const hint = document.getElementById("hint") as HTMLElement;
    expect(hint.hidden).toBe(false);
    expect(hint.textContent).toBe("add content words");
    expect(listedWords()).toEqual([]);
  });

  it("network failure shows the retry banner", async () => {
    mount([() => Promise.reject(new Error("refused"))]);
    type("son");
    await flushMicrotasks();
    const banner = document.getElementById("error") as HTMLElement;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("refused");
  });

  it("status line reports inputs with frequencies and unknown tokens", async () => {
    mount([
      () =>
        jsonResponse(
          200,
          famResponse([["brother", 0.75]], { unknown_tokens: ["xylophone"] }),
        ),
    ]);
    type("son of my parents xylophone");
    await flushMicrotasks();
    const status = document.getElementById("status") as HTMLElement;
    expect(status.textContent).toContain("son (ν=2)");
    expect(status.textContent).toContain("unknown: xylophone");
  });
});
