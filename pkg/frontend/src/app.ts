import { classify } from "./api.js";
import { renderHint } from "./highlight.js";
import type { ClassifyResponse } from "./types.js";

export interface AppConfig {
  serviceUrl: string;
  debounceMs?: number;
}

export interface DraftState {
  title: string;
  body: string;
  tags: string[];
  verdict: ClassifyResponse | null;
  error: string | null;
  inFlight: boolean;
}

export interface App {
  state: DraftState;
  onDraftChange(): void;
  /** Resolves once the in-flight request (if any) settles; for tests. */
  settled(): Promise<void>;
}

const DEFAULT_DEBOUNCE_MS = 500;

/**
 * Wire the formulation assistant into `root`.
 *
 * Edits are debounced; a response is rendered only if its request id is the
 * latest issued one (stale responses are discarded and superseded requests
 * aborted). Errors show a nonblocking banner and keep the last verdict.
 */
export function createApp(root: HTMLElement, config: AppConfig): App {
  const doc = root.ownerDocument;
  const debounceMs = config.debounceMs ?? DEFAULT_DEBOUNCE_MS;

  root.innerHTML = `
    <h1>Ask a question</h1>
    <label>Title <input id="draft-title" type="text" autocomplete="off"></label>
    <label>Body <textarea id="draft-body" rows="8"></textarea></label>
    <label>Tags <input id="draft-tags" type="text" placeholder="comma, separated"></label>
    <div id="error-banner" class="banner banner-error" hidden></div>
    <div id="verdict-banner" class="banner" hidden></div>
    <section id="hints" hidden>
      <h2>Clarifications asked on similar questions</h2>
      <div id="hint-list"></div>
    </section>
  `;
  const titleInput = root.querySelector<HTMLInputElement>("#draft-title")!;
  const bodyInput = root.querySelector<HTMLTextAreaElement>("#draft-body")!;
  const tagsInput = root.querySelector<HTMLInputElement>("#draft-tags")!;
  const errorBanner = root.querySelector<HTMLElement>("#error-banner")!;
  const verdictBanner = root.querySelector<HTMLElement>("#verdict-banner")!;
  const hintsSection = root.querySelector<HTMLElement>("#hints")!;
  const hintList = root.querySelector<HTMLElement>("#hint-list")!;

  const state: DraftState = {
    title: "",
    body: "",
    tags: [],
    verdict: null,
    error: null,
    inFlight: false,
  };

  let debounceTimer: ReturnType<typeof setTimeout> | null = null;
  let latestRequestId = 0;
  let controller: AbortController | null = null;
  let pending: Promise<void> = Promise.resolve();

  function readDraft(): void {
    state.title = titleInput.value;
    state.body = bodyInput.value;
    state.tags = tagsInput.value
      .split(",")
      .map((t) => t.trim().toLowerCase())
      .filter((t) => t.length > 0);
  }

  function render(): void {
    errorBanner.hidden = state.error === null;
    errorBanner.textContent = state.error ?? "";
    if (state.verdict === null) {
      verdictBanner.hidden = true;
      hintsSection.hidden = true;
      return;
    }
    const verdict = state.verdict;
    verdictBanner.hidden = false;
    const unclear = verdict.label === "unclear";
    verdictBanner.className = `banner ${unclear ? "banner-warning" : "banner-ok"}`;
    const percent = (verdict.probability_unclear * 100).toFixed(0);
    verdictBanner.textContent = unclear
      ? `This question looks unclear (${percent}% unclear). ` +
        "Consider adding the details asked below."
      : `This question looks clear (${percent}% unclear).`;
    hintList.replaceChildren();
    for (const hint of verdict.hints) {
      hintList.appendChild(renderHint(hint, doc));
    }
    hintsSection.hidden = verdict.hints.length === 0;
  }

  function issueRequest(): void {
    debounceTimer = null;
    readDraft();
    if (state.title.trim() === "") {
      return; // mirrors the server's 400 on empty titles
    }
    const requestId = ++latestRequestId;
    controller?.abort();
    controller = new AbortController();
    state.inFlight = true;
    pending = classify(
      config.serviceUrl,
      { title: state.title, body: state.body, tags: state.tags },
      controller.signal
    )
      .then((verdict) => {
        if (requestId !== latestRequestId) return; // stale
        state.verdict = verdict;
        state.error = null;
      })
      .catch((err: unknown) => {
        if (requestId !== latestRequestId) return;
        if (err instanceof DOMException && err.name === "AbortError") return;
        state.error = `Clarity check unavailable: ${String(err)}`;
      })
      .then(() => {
        if (requestId !== latestRequestId) return;
        state.inFlight = false;
        render();
      });
  }

  function onDraftChange(): void {
    if (debounceTimer !== null) {
      clearTimeout(debounceTimer);
    }
    debounceTimer = setTimeout(issueRequest, debounceMs);
  }

  for (const element of [titleInput, bodyInput, tagsInput]) {
    element.addEventListener("input", onDraftChange);
  }

  return {
    state,
    onDraftChange,
    settled: () => pending,
  };
}
