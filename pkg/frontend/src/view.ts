/** DOM rendering. The results list is painted in exactly the order the
 * service returned it; there is no client-side re-sorting. */

import { QueryResponse, ResultEntry } from "./api.js";
import { SearchController, UiState } from "./controller.js";

export interface View {
  root: HTMLElement;
  update(state: UiState): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderDetail(doc: Document, panel: HTMLElement, entry: ResultEntry, response: QueryResponse): void {
  panel.innerHTML = "";
  panel.appendChild(el(doc, "h3", "detail-word", entry.word));
  panel.appendChild(el(doc, "p", "detail-score", `score ${entry.score.toFixed(6)}`));
  const table = el(doc, "table", "detail-table");
  const head = el(doc, "tr");
  for (const caption of ["input", "frequency", "distance"]) {
    head.appendChild(el(doc, "th", undefined, caption));
  }
  table.appendChild(head);
  for (const input of response.inputs) {
    const row = el(doc, "tr");
    row.appendChild(el(doc, "td", "detail-input", input.word));
    row.appendChild(el(doc, "td", "detail-nu", String(input.nu)));
    const d = entry.distances[input.word];
    row.appendChild(el(doc, "td", "detail-distance", d === null || d === undefined ? "unreached" : String(d)));
    table.appendChild(row);
  }
  panel.appendChild(table);
}

export function createView(doc: Document, controller: SearchController): View {
  const root = el(doc, "div", "revdict");

  const heading = el(doc, "h1", undefined, "reverse dictionary");
  const tagline = el(
    doc,
    "p",
    "tagline",
    "describe the word you are after; candidates update as you type",
  );

  const phrase = el(doc, "input", "phrase-input");
  phrase.type = "text";
  phrase.placeholder = "son of my parents";
  phrase.id = "phrase";
  phrase.addEventListener("input", () => controller.setPhrase(phrase.value));

  const controls = el(doc, "div", "controls");

  const depthLabel = el(doc, "label", "control", "depth ");
  const depth = el(doc, "input");
  depth.type = "range";
  depth.id = "depth";
  depth.min = "1";
  depth.disabled = true;
  const depthValue = el(doc, "span", "depth-value", "auto");
  depth.addEventListener("input", () => controller.setDepth(Number(depth.value)));
  depthLabel.appendChild(depth);
  depthLabel.appendChild(depthValue);

  const includeLabel = el(doc, "label", "control");
  const include = el(doc, "input");
  include.type = "checkbox";
  include.id = "include-inputs";
  include.addEventListener("change", () => controller.setIncludeInputs(include.checked));
  includeLabel.appendChild(include);
  includeLabel.appendChild(doc.createTextNode(" include input words"));

  const limitLabel = el(doc, "label", "control", "limit ");
  const limit = el(doc, "select");
  limit.id = "limit";
  for (const value of [10, 20, 50, 100]) {
    const option = el(doc, "option", undefined, String(value));
    option.value = String(value);
    if (value === 20) option.selected = true;
    limit.appendChild(option);
  }
  limit.addEventListener("change", () => controller.setLimit(Number(limit.value)));
  limitLabel.appendChild(limit);

  controls.appendChild(depthLabel);
  controls.appendChild(includeLabel);
  controls.appendChild(limitLabel);

  const hint = el(doc, "p", "hint");
  hint.id = "hint";
  hint.hidden = true;

  const error = el(doc, "div", "error-banner");
  error.id = "error";
  error.hidden = true;
  const errorText = el(doc, "span", "error-text");
  const retry = el(doc, "button", "retry", "retry");
  retry.addEventListener("click", () => controller.retry());
  error.appendChild(errorText);
  error.appendChild(retry);

  const status = el(doc, "p", "status");
  status.id = "status";

  const results = el(doc, "ol", "results");
  results.id = "results";

  const detail = el(doc, "div", "detail");
  detail.id = "detail";
  detail.hidden = true;

  for (const node of [heading, tagline, phrase, controls, hint, error, status, results, detail]) {
    root.appendChild(node);
  }

  function update(state: UiState): void {
    if (state.maxDepth !== null) {
      depth.disabled = false;
      depth.max = String(state.maxDepth);
      if (depth.value === "" || state.depth === null) {
        depth.value = String(state.maxDepth);
      }
    }
    depthValue.textContent = state.depth === null ? "auto" : String(state.depth);

    hint.hidden = state.hint === null;
    hint.textContent = state.hint ?? "";

    error.hidden = state.error === null;
    errorText.textContent = state.error ?? "";

    const response = state.response;
    if (!response) {
      status.textContent = state.loading ? "searching..." : "";
      results.innerHTML = "";
      detail.hidden = true;
      return;
    }

    const inputs = response.inputs.map((i) => `${i.word} (ν=${i.nu})`).join(", ");
    const unknown = response.unknown_tokens.length
      ? `; unknown: ${response.unknown_tokens.join(", ")}`
      : "";
    status.textContent =
      `inputs: ${inputs}${unknown} — depth ${response.depth_used}, ` +
      `${response.timing_ms.toFixed(1)} ms` +
      (state.loading ? " (updating...)" : "");

    results.innerHTML = "";
    for (const entry of response.results) {
      const item = el(doc, "li", "result");
      const wordSpan = el(doc, "span", "result-word", entry.word);
      const scoreSpan = el(doc, "span", "result-score", entry.score.toFixed(4));
      item.appendChild(wordSpan);
      item.appendChild(scoreSpan);
      if (entry.word === state.selected) item.classList.add("selected");
      item.addEventListener("click", () =>
        controller.select(state.selected === entry.word ? null : entry.word),
      );
      results.appendChild(item);
    }

    const selectedEntry = response.results.find((r) => r.word === state.selected);
    if (selectedEntry) {
      detail.hidden = false;
      renderDetail(doc, detail, selectedEntry, response);
    } else {
      detail.hidden = true;
      detail.innerHTML = "";
    }
  }

  return { root, update };
}
