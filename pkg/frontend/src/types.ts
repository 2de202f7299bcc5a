/** Wire schema for the UI tree served by the backend. */

export interface WireAttribute {
  key: string;
  value: string;
}

export interface WireHandler {
  event: string;
  action: "call" | "update" | "context" | string;
  operand: string;
}

export interface WireNode {
  id: string;
  type: string;
  attributes: WireAttribute[];
  when: WireHandler[];
  children: WireNode[];
}

export interface OperationRequest {
  operation: string;
  context: { key: string; value: string }[];
}

export interface ServerError {
  error: string;
  detail: string;
}

export const WIDGET_TYPES = [
  "window",
  "container",
  "menu_bar",
  "label",
  "button",
  "dropdown_menu",
  "dropdown_menu_item",
  "textfield",
  "modal",
  "message",
] as const;

export function isWireNode(value: unknown): value is WireNode {
  if (typeof value !== "object" || value === null) return false;
  const node = value as WireNode;
  return (
    typeof node.id === "string" &&
    typeof node.type === "string" &&
    Array.isArray(node.attributes) &&
    Array.isArray(node.when) &&
    Array.isArray(node.children) &&
    node.children.every(isWireNode)
  );
}
