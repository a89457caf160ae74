import type { AnnotatedDocument, BackendInfo } from "./types";

export const API_PREFIX = "/api/v1";

/** An error response the service produced deliberately: {code, message}. */
export class ServiceError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) return;
  let code = `http_${response.status}`;
  let message = response.statusText || "request failed";
  try {
    const body = await response.json();
    if (typeof body.code === "string" && typeof body.message === "string") {
      code = body.code;
      message = body.message;
    }
  } catch {
    // non-JSON error body; keep the status-derived code
  }
  throw new ServiceError(code, message, response.status);
}

export async function fetchBackends(baseUrl = ""): Promise<BackendInfo[]> {
  const response = await fetch(`${baseUrl}${API_PREFIX}/backends`);
  await raiseForStatus(response);
  const body = await response.json();
  return body.backends as BackendInfo[];
}

export interface AnnotateOptions {
  baseUrl?: string;
  signal?: AbortSignal;
}

export async function annotate(
  text: string,
  backend: string,
  options: AnnotateOptions = {},
): Promise<AnnotatedDocument> {
  const response = await fetch(`${options.baseUrl ?? ""}${API_PREFIX}/glitter`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ text, backend }),
    signal: options.signal,
  });
  await raiseForStatus(response);
  return (await response.json()) as AnnotatedDocument;
}
