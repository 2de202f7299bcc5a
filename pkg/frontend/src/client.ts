/**
 * Client controller: wires rendering, the context store and event
 * handling together.  Local actions (`update`, `context`) run strictly
 * before `call` actions; at most one operation request is in flight, with
 * later calls queued in order.
 */

import { ApiClient, ApiError } from "./api";
import { ClientContext } from "./context";
import { RenderRegistry, applyAttribute, renderTree } from "./render";
import { SubstitutionError, splitTuple, substituteContext, termText } from "./terms";
import { WireHandler, WireNode } from "./types";

export class UiClient {
  readonly context = new ClientContext();
  private registry: RenderRegistry | null = null;
  private inFlight = false;
  private queue: string[] = [];

  constructor(
    private readonly api: ApiClient,
    private readonly host: HTMLElement,
  ) {}

  async start(): Promise<void> {
    try {
      this.applyTree(await this.api.getUi());
    } catch (error) {
      this.showError(error);
    }
  }

  private applyTree(tree: WireNode): void {
    this.registry = renderTree(tree, this.host, (node, event, view) =>
      this.onEvent(node, event, view),
    );
  }

  onEvent(node: WireNode, event: string, view: HTMLElement): void {
    const handlers = node.when.filter((w) => w.event === event);
    const local = handlers.filter((w) => w.action === "update" || w.action === "context");
    const calls = handlers.filter((w) => w.action === "call");
    for (const handler of handlers) {
      if (handler.action !== "update" && handler.action !== "context" && handler.action !== "call") {
        console.error(`unknown action '${handler.action}' on ${node.id}, skipping`);
      }
    }
    for (const handler of local) {
      if (handler.action === "update") this.applyUpdate(handler);
      else this.applyContext(handler, view);
    }
    for (const handler of calls) {
      this.submitCall(handler.operand);
    }
  }

  private applyUpdate(handler: WireHandler): void {
    const [target, key, value] = splitTuple(handler.operand);
    const widget = this.registry?.get(target);
    if (!widget || key === undefined || value === undefined) {
      console.error(`update target '${handler.operand}' not rendered, skipping`);
      return;
    }
    widget.attributes.set(key, value);
    applyAttribute(widget.node.type, widget.view, key, value);
  }

  private applyContext(handler: WireHandler, view: HTMLElement): void {
    const [key, valueExpr] = splitTuple(handler.operand);
    if (key === undefined || valueExpr === undefined) {
      console.error(`malformed context operand '${handler.operand}', skipping`);
      return;
    }
    const value =
      valueExpr === "_value"
        ? view.querySelector("input")?.value ?? (view as HTMLInputElement).value ?? ""
        : termText(valueExpr);
    this.context.set(termText(key), value);
  }

  private submitCall(operand: string): void {
    let operation: string;
    try {
      operation = substituteContext(operand, this.context);
    } catch (error) {
      if (error instanceof SubstitutionError) {
        this.showError(error); // validation failed locally: nothing is posted
        return;
      }
      throw error;
    }
    this.queue.push(operation);
    void this.pump();
  }

  private async pump(): Promise<void> {
    if (this.inFlight) return;
    const operation = this.queue.shift();
    if (operation === undefined) return;
    this.inFlight = true;
    try {
      const tree = await this.api.postOperation({
        operation,
        context: this.context.toList(),
      });
      this.context.clear();
      this.clearError();
      this.applyTree(tree);
    } catch (error) {
      this.showError(error); // context is kept for a retry
    } finally {
      this.inFlight = false;
      void this.pump();
    }
  }

  private showError(error: unknown): void {
    const detail =
      error instanceof ApiError || error instanceof SubstitutionError
        ? error.message
        : String(error);
    let box = this.host.parentElement?.querySelector<HTMLElement>(".cg-client-error") ?? null;
    if (!box) {
      box = document.createElement("div");
      box.className = "cg-client-error cg-message-error";
      box.setAttribute("role", "alert");
      (this.host.parentElement ?? this.host).appendChild(box);
    }
    box.textContent = detail;
  }

  private clearError(): void {
    this.host.parentElement?.querySelector(".cg-client-error")?.remove();
  }
}
