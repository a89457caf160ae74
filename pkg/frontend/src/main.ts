import "./style.css";
import { renderStats, renderWords, buildTooltip } from "./render";
import { Store, type ViewState } from "./state";
import type { AnnotatedDocument } from "./types";

const store = new Store();

function el<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

const textInput = el<HTMLTextAreaElement>("text");
const backendSelect = el<HTMLSelectElement>("backend");
const annotateButton = el<HTMLButtonElement>("annotate");
const statusNote = el<HTMLSpanElement>("status");
const themeToggle = el<HTMLInputElement>("theme-toggle");
const runsToggle = el<HTMLInputElement>("runs-toggle");
const errorBox = el<HTMLDivElement>("error");
const errorText = el<HTMLSpanElement>("error-text");
const retryButton = el<HTMLButtonElement>("retry");
const wordsHost = el<HTMLElement>("words-host");
const statsHost = el<HTMLElement>("stats-host");

const tooltip = document.createElement("div");
tooltip.id = "tooltip";
tooltip.hidden = true;
document.body.appendChild(tooltip);

function hideTooltip(): void {
  tooltip.hidden = true;
}

function showTooltip(target: HTMLElement, doc: AnnotatedDocument): void {
  const index = Number(target.getAttribute("data-word"));
  const word = doc.words[index];
  if (!word) return;
  tooltip.replaceChildren(buildTooltip(doc, word));
  const rect = target.getBoundingClientRect();
  tooltip.style.left = `${Math.max(4, rect.left)}px`;
  tooltip.style.top = `${rect.bottom + 6}px`;
  tooltip.hidden = false;
}

wordsHost.addEventListener("mouseover", (event) => {
  const doc = store.getState().document;
  const target = (event.target as HTMLElement).closest<HTMLElement>("span[data-word]");
  if (doc && target) showTooltip(target, doc);
});
wordsHost.addEventListener("mouseout", hideTooltip);

function syncBackends(state: ViewState): void {
  const current = Array.from(backendSelect.options).map((o) => o.value);
  const wanted = state.backends.map((b) => b.id);
  if (current.join("\n") !== wanted.join("\n")) {
    backendSelect.replaceChildren(
      ...state.backends.map((b) => {
        const option = document.createElement("option");
        option.value = b.id;
        option.textContent = b.description ? `${b.id} (${b.description})` : b.id;
        return option;
      }),
    );
  }
  backendSelect.value = state.backendId;
}

// Re-render the heat map only when its inputs changed; typing in the
// textarea must not churn the annotated view.
let rendered: { doc: AnnotatedDocument; theme: string; showRuns: boolean } | null = null;

function syncWords(state: ViewState): void {
  if (!state.document) return;
  if (
    rendered &&
    rendered.doc === state.document &&
    rendered.theme === state.theme &&
    rendered.showRuns === state.showRuns
  ) {
    return;
  }
  hideTooltip();
  wordsHost.replaceChildren(renderWords(state.document, state.theme, state.showRuns));
  statsHost.replaceChildren(renderStats(state.document));
  rendered = { doc: state.document, theme: state.theme, showRuns: state.showRuns };
}

function sync(state: ViewState): void {
  if (textInput.value !== state.text) textInput.value = state.text;
  syncBackends(state);
  annotateButton.disabled = state.pending;
  statusNote.hidden = !state.pending;
  themeToggle.checked = state.theme === "dark";
  runsToggle.checked = state.showRuns;
  document.body.classList.toggle("dark", state.theme === "dark");
  if (state.error) {
    errorText.textContent = `${state.error.code}: ${state.error.message}`;
    retryButton.hidden = !state.error.retryable;
    errorBox.hidden = false;
  } else {
    errorBox.hidden = true;
  }
  syncWords(state);
}

textInput.addEventListener("input", () => store.setText(textInput.value));
textInput.addEventListener("keydown", (event) => {
  if ((event.ctrlKey || event.metaKey) && event.key === "Enter") {
    event.preventDefault();
    void store.submit();
  }
});
backendSelect.addEventListener("change", () => store.setBackend(backendSelect.value));
annotateButton.addEventListener("click", () => void store.submit());
retryButton.addEventListener("click", () => void store.retry());
themeToggle.addEventListener("change", () => store.toggleTheme());
runsToggle.addEventListener("change", () => store.toggleRuns());

store.subscribe(sync);
sync(store.getState());
void store.init();
