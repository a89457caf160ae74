import { readFileSync } from "node:fs";
import { resolve } from "node:path";
import type { AnnotatedDocument } from "../src/types";

// Fixtures are real service payloads captured from the annotation CLI,
// which emits the exact bytes the HTTP endpoint serves.
export function loadFixture(name: string): AnnotatedDocument {
  const path = resolve(process.cwd(), "tests", "fixtures", name);
  return JSON.parse(readFileSync(path, "utf8")) as AnnotatedDocument;
}

export function jsonResponse(body: unknown, status = 200): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    statusText: "",
    json: async () => structuredClone(body),
  } as unknown as Response;
}

export function nonJsonResponse(status: number, statusText = ""): Response {
  return {
    ok: false,
    status,
    statusText,
    json: async () => {
      throw new SyntaxError("not json");
    },
  } as unknown as Response;
}
