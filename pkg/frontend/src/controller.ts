/** UI state machine: debounced queries, latest-wins response handling.
 *
 * Every issued request carries a sequence number; a response only lands if
 * its number still matches the latest issued one, so editing while a slow
 * request is in flight can never paint stale results. Control changes
 * (depth, include-inputs, limit) re-query immediately without the typing
 * debounce.
 */

import { ApiClient, ApiError, QueryResponse } from "./api.js";

export const DEBOUNCE_MS = 250;

export interface UiState {
  phrase: string;
  loading: boolean;
  response: QueryResponse | null;
  /** word whose per-input contributions are expanded in the detail panel */
  selected: string | null;
  /** inline guidance, e.g. when the phrase has no content words */
  hint: string | null;
  /** network/service failure banner; retry() re-issues the last query */
  error: string | null;
  depth: number | null;
  maxDepth: number | null;
  includeInputs: boolean;
  limit: number;
}

export class SearchController {
  readonly state: UiState = {
    phrase: "",
    loading: false,
    response: null,
    selected: null,
    hint: null,
    error: null,
    depth: null,
    maxDepth: null,
    includeInputs: false,
    limit: 20,
  };

  private seq = 0;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (state: UiState) => void,
    private readonly debounceMs: number = DEBOUNCE_MS,
  ) {}

  /** Fetch index metadata; caps the depth control at the index's maximum
   * non-redundant depth (deeper searches cannot change anything). */
  async init(): Promise<void> {
    try {
      const meta = await this.api.meta();
      this.state.maxDepth = meta.max_nonredundant_depth[meta.default_matrix] ?? null;
      this.emit();
    } catch {
      this.state.error = "service unreachable";
      this.emit();
    }
  }

  setPhrase(phrase: string): void {
    this.state.phrase = phrase;
    this.state.hint = null;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    if (!phrase.trim()) {
      this.seq += 1; // invalidate anything in flight
      this.state.response = null;
      this.state.selected = null;
      this.state.loading = false;
      this.emit();
      return;
    }
    if (this.debounceMs <= 0) {
      this.issue();
      this.emit();
      return;
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      this.issue();
      this.emit();
    }, this.debounceMs);
    this.emit();
  }

  setDepth(depth: number | null): void {
    if (depth !== null) {
      if (this.state.maxDepth !== null && depth > this.state.maxDepth) depth = this.state.maxDepth;
      if (depth < 1) depth = 1;
    }
    this.state.depth = depth;
    this.requery();
  }

  setIncludeInputs(value: boolean): void {
    this.state.includeInputs = value;
    this.requery();
  }

  setLimit(limit: number): void {
    this.state.limit = limit;
    this.requery();
  }

  select(word: string | null): void {
    this.state.selected = word;
    this.emit();
  }

  retry(): void {
    this.state.error = null;
    this.requery();
  }

  /** Issue immediately (controls bypass the typing debounce). */
  private requery(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    if (this.state.phrase.trim()) {
      this.issue();
    }
    this.emit();
  }

  private issue(): void {
    const mySeq = ++this.seq;
    this.state.loading = true;
    this.api
      .query({
        phrase: this.state.phrase,
        limit: this.state.limit,
        depth: this.state.depth,
        include_inputs: this.state.includeInputs,
      })
      .then((response) => {
        if (mySeq !== this.seq) return; // stale: a newer request was issued
        this.state.loading = false;
        this.state.response = response;
        this.state.hint = null;
        this.state.error = null;
        if (this.state.selected && !response.results.some((r) => r.word === this.state.selected)) {
          this.state.selected = null;
        }
        this.emit();
      })
      .catch((err: unknown) => {
        if (mySeq !== this.seq) return;
        this.state.loading = false;
        if (err instanceof ApiError && err.code === "NO_CONTENT_WORDS") {
          this.state.hint = "add content words";
          this.state.response = null;
          this.state.selected = null;
        } else {
          this.state.error = err instanceof Error ? err.message : "request failed";
        }
        this.emit();
      });
  }

  private emit(): void {
    this.onChange(this.state);
  }
}
