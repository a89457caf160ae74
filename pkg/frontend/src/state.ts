import { annotate, fetchBackends, ServiceError } from "./api";
import type { ThemeName } from "./palette";
import type { AnnotatedDocument, BackendInfo } from "./types";

export interface InlineError {
  code: string;
  message: string;
  retryable: boolean;
}

export interface ViewState {
  text: string;
  backendId: string;
  backends: BackendInfo[];
  document: AnnotatedDocument | null;
  theme: ThemeName;
  showRuns: boolean;
  pending: boolean;
  error: InlineError | null;
}

export type Listener = (state: ViewState) => void;

function isAbort(err: unknown): boolean {
  return err instanceof DOMException && err.name === "AbortError";
}

/**
 * Holds everything the page displays. Presentation toggles never touch
 * the network: the document is kept as delivered and re-rendered.
 */
export class Store {
  private state: ViewState = {
    text: "",
    backendId: "",
    backends: [],
    document: null,
    theme: "light",
    showRuns: true,
    pending: false,
    error: null,
  };

  private listeners: Listener[] = [];
  private controller: AbortController | null = null;

  constructor(private readonly baseUrl = "") {}

  getState(): ViewState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private update(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  /** Populate the backend picker; called once at load. */
  async init(): Promise<void> {
    try {
      const backends = await fetchBackends(this.baseUrl);
      this.update({
        backends,
        backendId: this.state.backendId || (backends[0]?.id ?? ""),
      });
    } catch (err) {
      this.update({ error: describeFailure(err) });
    }
  }

  setText(text: string): void {
    this.update({ text });
  }

  setBackend(backendId: string): void {
    this.update({ backendId });
  }

  toggleTheme(): void {
    this.update({ theme: this.state.theme === "light" ? "dark" : "light" });
  }

  toggleRuns(): void {
    this.update({ showRuns: !this.state.showRuns });
  }

  /**
   * Annotate the current text. Empty text is rejected locally without a
   * request. A newer submission aborts the one in flight, and on any
   * failure the input text and the previous document survive untouched.
   */
  async submit(): Promise<void> {
    const { text, backendId } = this.state;
    if (text === "") {
      this.update({
        error: { code: "empty_text", message: "nothing to annotate yet", retryable: false },
      });
      return;
    }
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    this.update({ pending: true, error: null });
    try {
      const document = await annotate(text, backendId, {
        baseUrl: this.baseUrl,
        signal: controller.signal,
      });
      if (this.controller !== controller) return; // superseded
      this.controller = null;
      this.update({ document, pending: false, error: null });
    } catch (err) {
      if (isAbort(err) || this.controller !== controller) return;
      this.controller = null;
      this.update({ pending: false, error: describeFailure(err) });
    }
  }

  retry(): Promise<void> {
    return this.submit();
  }
}

function describeFailure(err: unknown): InlineError {
  if (err instanceof ServiceError) {
    return { code: err.code, message: err.message, retryable: false };
  }
  const message = err instanceof Error ? err.message : String(err);
  return { code: "network", message: `service unreachable: ${message}`, retryable: true };
}
