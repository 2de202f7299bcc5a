/** Thin HTTP client for the backend protocol. */

import { OperationRequest, ServerError, WireNode, isWireNode } from "./types";

export class ApiError extends Error {
  constructor(readonly code: string, readonly detail: string, readonly status: number) {
    super(`${code}: ${detail}`);
  }
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  async getUi(): Promise<WireNode> {
    const response = await this.fetchFn(`${this.baseUrl}/ui`);
    return this.decodeTree(response);
  }

  async postOperation(request: OperationRequest): Promise<WireNode> {
    const response = await this.fetchFn(`${this.baseUrl}/operation`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    });
    return this.decodeTree(response);
  }

  private async decodeTree(response: Response): Promise<WireNode> {
    const body = await response.json();
    if (!response.ok) {
      const error = body as ServerError;
      throw new ApiError(
        error.error ?? "ServerError",
        error.detail ?? response.statusText,
        response.status,
      );
    }
    if (!isWireNode(body)) {
      throw new ApiError("SchemaError", "response is not a widget tree", response.status);
    }
    return body;
  }
}
