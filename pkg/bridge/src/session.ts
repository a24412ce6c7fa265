/**
 * One bridge session: handshake first, then line-delimited JSON
 * request/response. Protocol errors never terminate the session; they are
 * answered with {"id", "error"} so the client can decide what to do.
 */

import { EmbeddingBackend, EmbedRole } from "./backend";

interface EmbedRequest {
  id: string;
  role: EmbedRole;
  text: string;
}

interface OkResponse {
  id: string;
  vector: number[];
}

interface ErrorResponse {
  id: string | null;
  error: string;
}

export type BridgeResponse = OkResponse | ErrorResponse;

export class BridgeSession {
  private backend: EmbeddingBackend;
  private seen = new Set<string>();
  requestCount = 0;

  constructor(backend: EmbeddingBackend) {
    this.backend = backend;
  }

  handshake(): string {
    return JSON.stringify({ provider: this.backend.id, dim: this.backend.dim });
  }

  private validate(payload: unknown): EmbedRequest | ErrorResponse {
    if (typeof payload !== "object" || payload === null || Array.isArray(payload)) {
      return { id: null, error: "request must be a JSON object" };
    }
    const req = payload as Record<string, unknown>;
    const id = req.id;
    if (typeof id !== "string" || id.length === 0) {
      return { id: null, error: "missing request id" };
    }
    if (req.role !== "name" && req.role !== "context") {
      return { id, error: `role must be "name" or "context"` };
    }
    if (typeof req.text !== "string") {
      return { id, error: "text must be a string" };
    }
    return { id, role: req.role, text: req.text };
  }

  private async answer(payload: unknown): Promise<BridgeResponse> {
    const checked = this.validate(payload);
    if ("error" in checked) {
      return checked;
    }
    if (this.seen.has(checked.id)) {
      return { id: checked.id, error: `duplicate request id ${checked.id}` };
    }
    this.seen.add(checked.id);
    this.requestCount += 1;
    try {
      const vector = await this.backend.embed(checked.text, checked.role);
      if (!vector.every(Number.isFinite)) {
        return { id: checked.id, error: "backend produced non-finite values" };
      }
      return { id: checked.id, vector };
    } catch (err) {
      return { id: checked.id, error: `embedding failed: ${String(err)}` };
    }
  }

  /** Handle one input line; returns the response line(s) to write. */
  async handleLine(line: string): Promise<string> {
    const trimmed = line.trim();
    if (!trimmed) {
      return "";
    }
    let payload: unknown;
    try {
      payload = JSON.parse(trimmed);
    } catch (err) {
      return JSON.stringify({ id: null, error: `malformed JSON: ${String(err)}` });
    }
    if (Array.isArray(payload)) {
      // optional batching: an array of requests answers with an array
      const answers = [];
      for (const item of payload) {
        answers.push(await this.answer(item));
      }
      return JSON.stringify(answers);
    }
    const response = await this.answer(payload);
    return JSON.stringify(response);
  }
}
