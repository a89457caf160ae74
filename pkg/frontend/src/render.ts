import { bucketBackground, foregroundFor, type ThemeName } from "./palette";
import type { AnnotatedDocument, Position, Word } from "./types";

// Pure DOM builders. Every number shown here is the payload value
// stringified as-is; nothing is derived or recomputed client-side.
// Text always enters the tree through createTextNode/textContent, so
// pasted markup stays inert.

export function runWords(doc: AnnotatedDocument): Set<number> {
  const covered = new Set<number>();
  for (const run of doc.runs) {
    for (let w = run.start_word; w <= run.end_word; w++) covered.add(w);
  }
  return covered;
}

function unit(base: number): string {
  if (base === 2) return "bits";
  if (Math.abs(base - Math.E) < 1e-12) return "nats";
  return `log${base} units`;
}

function label(piece: string): string {
  return piece.trim() || JSON.stringify(piece);
}

/**
 * Render the document as one span per word, tinted by bucket. Characters
 * outside any word span (a trailing newline, say) are kept as plain text
 * nodes so the visible text always equals the document text.
 */
export function renderWords(
  doc: AnnotatedDocument,
  theme: ThemeName,
  showRuns: boolean,
): HTMLDivElement {
  const container = document.createElement("div");
  container.className = "glitter";
  const inRun = runWords(doc);
  let cursor = 0;
  for (const word of doc.words) {
    const [start, end] = word.span;
    if (start > cursor) {
      container.appendChild(document.createTextNode(doc.text.slice(cursor, start)));
    }
    const span = document.createElement("span");
    span.className = showRuns && inRun.has(word.index) ? "w fr" : "w";
    span.setAttribute("data-word", String(word.index));
    const background = bucketBackground(theme, word.bucket);
    span.style.backgroundColor = background;
    span.style.color = foregroundFor(background);
    span.textContent = doc.text.slice(start, end);
    container.appendChild(span);
    cursor = end;
  }
  if (cursor < doc.text.length) {
    container.appendChild(document.createTextNode(doc.text.slice(cursor)));
  }
  return container;
}

function line(parent: HTMLElement, className: string, text: string): void {
  const div = document.createElement("div");
  div.className = className;
  div.textContent = text;
  parent.appendChild(div);
}

function appendPositionTip(parent: HTMLElement, pos: Position, baseUnit: string): void {
  if (pos.flags.unscored) {
    line(parent, "tip-token", `token ${label(pos.piece)}: unscored (no preceding context)`);
    return;
  }
  const rank = pos.rank === null ? "rank unknown" : `rank ${pos.rank}`;
  const capped = pos.flags.capped ? " (capped)" : "";
  line(parent, "tip-token", `token ${label(pos.piece)}: ${pos.surprisal} ${baseUnit}${capped}, ${rank}`);
  const list = document.createElement("ol");
  list.className = "tip-candidates";
  for (const cand of pos.top) {
    const item = document.createElement("li");
    item.textContent = `${label(cand.piece)}  p=${cand.probability}`;
    list.appendChild(item);
  }
  parent.appendChild(list);
}

/** Tooltip contents for one word, built entirely from the held document. */
export function buildTooltip(doc: AnnotatedDocument, word: Word): HTMLDivElement {
  const tip = document.createElement("div");
  tip.className = "tip";
  const [start, end] = word.span;
  line(tip, "tip-word", label(doc.text.slice(start, end)));
  if (word.probability === null) {
    line(tip, "tip-head", "unscored");
  } else {
    const capped = word.capped ? " (capped)" : "";
    line(tip, "tip-head", `surprisal ${word.surprisal} ${unit(doc.base)}${capped}, p=${word.probability}`);
  }
  const suffix = runWords(doc).has(word.index) ? ", formulaic run" : "";
  line(tip, "tip-bucket", `bucket ${word.bucket} of 15${suffix}`);
  for (const pos of doc.positions.slice(word.tokens[0], word.tokens[1])) {
    appendPositionTip(tip, pos, unit(doc.base));
  }
  return tip;
}

/** Document statistics, verbatim from the payload. */
export function renderStats(doc: AnnotatedDocument): HTMLDListElement {
  const dl = document.createElement("dl");
  dl.className = "stats";
  const rows: Array<[string, string]> = [
    ["tokens", String(doc.stats.token_count)],
    ["words", String(doc.stats.word_count)],
    ["scored words", String(doc.stats.scored_words)],
    ["mean surprisal", doc.stats.mean_surprisal === null ? "n/a" : `${doc.stats.mean_surprisal} ${unit(doc.base)}`],
    ["perplexity", doc.stats.perplexity === null ? "n/a" : String(doc.stats.perplexity)],
    ["formulaic runs", String(doc.runs.length)],
    ["formulaic coverage", String(doc.stats.formulaic_coverage)],
    ["backend", doc.provenance.backend_id],
    ["model", doc.provenance.model_id],
  ];
  for (const [term, value] of rows) {
    const dt = document.createElement("dt");
    dt.textContent = term;
    const dd = document.createElement("dd");
    dd.textContent = value;
    dl.appendChild(dt);
    dl.appendChild(dd);
  }
  return dl;
}
