/**
 * DOM renderer.  Every response re-renders the whole tree: the server
 * regenerates the complete UI state per update, so diffing buys nothing.
 * Each node becomes exactly one element, registered by id so `update`
 * actions can patch attributes locally.
 */

import { termText } from "./terms";
import { WireHandler, WireNode } from "./types";

export type EventDispatcher = (node: WireNode, event: string, view: HTMLElement) => void;

export interface RenderedWidget {
  node: WireNode;
  view: HTMLElement;
  attributes: Map<string, string>;
}

export class RenderRegistry {
  readonly widgets = new Map<string, RenderedWidget>();

  get(id: string): RenderedWidget | undefined {
    return this.widgets.get(id);
  }
}

const KNOWN_ATTRIBUTES: Record<string, string[]> = {
  window: ["flex_direction", "class", "order"],
  container: ["flex_direction", "class", "order", "width"],
  menu_bar: ["title", "icon", "class", "order"],
  label: ["label", "class", "order"],
  button: ["label", "icon", "class", "order", "disabled"],
  dropdown_menu: ["selected", "class", "order"],
  dropdown_menu_item: ["label", "class", "order"],
  textfield: ["placeholder", "width", "class", "order"],
  modal: ["title", "visibility", "class", "order"],
  message: ["title", "message", "type", "class", "order"],
};

const EVENT_NAMES: Record<string, string> = {
  click: "click",
  input: "input",
  change: "change",
};

export function renderTree(
  tree: WireNode,
  host: HTMLElement,
  dispatch: EventDispatcher,
): RenderRegistry {
  const registry = new RenderRegistry();
  host.replaceChildren();
  for (const child of tree.children) {
    host.appendChild(renderNode(child, registry, dispatch));
  }
  return registry;
}

function renderNode(
  node: WireNode,
  registry: RenderRegistry,
  dispatch: EventDispatcher,
): HTMLElement {
  const view = createView(node);
  view.classList.add(`cg-${node.type}`);
  view.dataset.id = node.id;

  const attributes = new Map<string, string>();
  for (const { key, value } of node.attributes) {
    if (key === "class") {
      view.classList.add(termText(value));
      continue;
    }
    if (!(KNOWN_ATTRIBUTES[node.type] ?? []).includes(key)) {
      console.warn(`ignoring unknown attribute '${key}' on ${node.type} ${node.id}`);
      continue;
    }
    attributes.set(key, value);
  }
  applyAttributes(node.type, view, attributes);

  for (const event of new Set(node.when.map((w: WireHandler) => w.event))) {
    const domEvent = EVENT_NAMES[event];
    if (!domEvent) {
      console.warn(`ignoring unknown event '${event}' on ${node.id}`);
      continue;
    }
    const target = eventTarget(node.type, view);
    target.addEventListener(domEvent, () => dispatch(node, event, view));
  }

  registry.widgets.set(node.id, { node, view, attributes });

  const childHost = childContainer(node.type, view);
  for (const child of node.children) {
    childHost.appendChild(renderNode(child, registry, dispatch));
  }
  return view;
}

function createView(node: WireNode): HTMLElement {
  switch (node.type) {
    case "window":
      return document.createElement("section");
    case "container":
      return document.createElement("div");
    case "menu_bar": {
      const bar = document.createElement("header");
      bar.appendChild(element("span", "cg-menu-title"));
      return bar;
    }
    case "label":
      return document.createElement("span");
    case "button":
    case "dropdown_menu_item":
      return document.createElement("button");
    case "dropdown_menu": {
      const menu = document.createElement("div");
      const heading = element("button", "cg-dropdown-heading");
      heading.textContent = "–"; // placeholder dash until `selected` arrives
      menu.appendChild(heading);
      menu.appendChild(element("div", "cg-dropdown-items"));
      return menu;
    }
    case "textfield": {
      const wrap = document.createElement("div");
      wrap.appendChild(document.createElement("input"));
      return wrap;
    }
    case "modal": {
      const modal = document.createElement("div");
      modal.appendChild(element("div", "cg-modal-title"));
      modal.appendChild(element("div", "cg-modal-body"));
      return modal;
    }
    case "message": {
      const box = document.createElement("div");
      box.setAttribute("role", "alert");
      box.appendChild(element("strong", "cg-message-title"));
      box.appendChild(element("div", "cg-message-text"));
      return box;
    }
    default:
      console.warn(`unknown widget type '${node.type}', rendering as group`);
      return document.createElement("div");
  }
}

function element(tag: string, className: string): HTMLElement {
  const el = document.createElement(tag);
  el.className = className;
  return el;
}

function childContainer(type: string, view: HTMLElement): HTMLElement {
  if (type === "dropdown_menu") {
    return view.querySelector<HTMLElement>(".cg-dropdown-items")!;
  }
  if (type === "modal") {
    return view.querySelector<HTMLElement>(".cg-modal-body")!;
  }
  return view;
}

function eventTarget(type: string, view: HTMLElement): HTMLElement {
  if (type === "textfield") return view.querySelector("input")!;
  return view;
}

export function applyAttributes(
  type: string,
  view: HTMLElement,
  attributes: Map<string, string>,
): void {
  for (const [key, value] of attributes) {
    applyAttribute(type, view, key, value);
  }
}

export function applyAttribute(
  type: string,
  view: HTMLElement,
  key: string,
  value: string,
): void {
  const text = termText(value);
  switch (key) {
    case "label":
      (type === "button" || type === "dropdown_menu_item" || type === "label") &&
        (view.textContent = text);
      break;
    case "title":
      if (type === "menu_bar") setText(view, ".cg-menu-title", text);
      else if (type === "modal") setText(view, ".cg-modal-title", text);
      else setText(view, ".cg-message-title", text);
      break;
    case "message":
      setText(view, ".cg-message-text", text);
      break;
    case "selected":
      setText(view, ".cg-dropdown-heading", text || "–");
      break;
    case "placeholder":
      view.querySelector("input")?.setAttribute("placeholder", text);
      break;
    case "visibility":
      view.style.display = text === "shown" ? "" : "none";
      break;
    case "flex_direction":
      view.style.display = "flex";
      view.style.flexDirection = text;
      break;
    case "width":
      view.style.width = /^\d+$/.test(text) ? `${text}px` : text;
      break;
    case "order":
      view.style.order = text;
      break;
    case "disabled":
      if (text === "true") view.setAttribute("disabled", "");
      else view.removeAttribute("disabled");
      break;
    case "type":
      view.classList.add(`cg-message-${text}`);
      break;
    case "icon":
      view.dataset.icon = text;
      break;
  }
}

function setText(view: HTMLElement, selector: string, text: string): void {
  const target = view.querySelector<HTMLElement>(selector);
  if (target) target.textContent = text;
}
