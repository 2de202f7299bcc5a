import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api";
import { UiClient } from "../src/client";
import { WireNode } from "../src/types";

function node(partial: Partial<WireNode> & { id: string; type: string }): WireNode {
  return { attributes: [], when: [], children: [], ...partial };
}

function root(...children: WireNode[]): WireNode {
  return { id: "root", type: "root", attributes: [], when: [], children };
}

/** The add-person fragment: a name field plus an add-dog button. */
function personForm(extra: WireNode[] = []): WireNode {
  return root(
    node({
      id: "w",
      type: "window",
      children: [
        node({
          id: "name_field",
          type: "textfield",
          when: [{ event: "input", action: "context", operand: "(name,_value)" }],
        }),
        node({
          id: "add_dog_btn",
          type: "button",
          attributes: [{ key: "label", value: '"Add dog person"' }],
          when: [
            {
              event: "click",
              action: "call",
              operand: "add_atom(person(_context_value(name,str),dog))",
            },
          ],
        }),
        ...extra,
      ],
    }),
  );
}

interface Recorded {
  url: string;
  body?: { operation: string; context: { key: string; value: string }[] };
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function makeFetch(responder: (record: Recorded) => unknown | Promise<unknown>) {
  const requests: Recorded[] = [];
  const fetchFn = vi.fn(async (url: RequestInfo | URL, init?: RequestInit) => {
    const record: Recorded = { url: String(url) };
    if (init?.body) record.body = JSON.parse(String(init.body));
    requests.push(record);
    const result = await responder(record);
    return result instanceof Response ? result : jsonResponse(result);
  });
  return { fetchFn: fetchFn as unknown as typeof fetch, requests };
}

let host: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="page"><div id="app"></div></div>';
  host = document.getElementById("app")!;
});

function typeInto(input: HTMLInputElement, text: string): void {
  for (let i = 1; i <= text.length; i++) {
    input.value = text.slice(0, i);
    input.dispatchEvent(new Event("input", { bubbles: true }));
  }
}

describe("context round-trip", () => {
  it('typing Ana and clicking add-dog posts add_atom(person("Ana",dog))', async () => {
    const { fetchFn, requests } = makeFetch((record) => {
      if (!record.body) return personForm();
      return personForm([
        node({
          id: 'person_btn("Ana")',
          type: "button",
          attributes: [{ key: "label", value: '"Ana"' }],
        }),
      ]);
    });
    const client = new UiClient(new ApiClient("http://test", fetchFn), host);
    await client.start();

    typeInto(host.querySelector("input")!, "Ana");
    expect(client.context.get("name")).toBe("Ana");

    host.querySelector<HTMLElement>('[data-id="add_dog_btn"]')!.click();
    await vi.waitFor(() => expect(requests.length).toBe(2));

    expect(requests[1].body!.operation).toBe('add_atom(person("Ana",dog))');
    expect(requests[1].body!.context).toEqual([{ key: "name", value: "Ana" }]);
    // the store is cleared after the round-trip and the new tree shows Ana
    await vi.waitFor(() => expect(client.context.size).toBe(0));
    expect(host.textContent).toContain("Ana");
  });

  it("keeps the context when the server rejects the operation", async () => {
    const { fetchFn } = makeFetch((record) => {
      if (!record.body) return personForm();
      return jsonResponse({ error: "UnknownOperation", detail: "nope" }, 400);
    });
    const client = new UiClient(new ApiClient("http://test", fetchFn), host);
    await client.start();

    typeInto(host.querySelector("input")!, "Ana");
    host.querySelector<HTMLElement>('[data-id="add_dog_btn"]')!.click();
    await vi.waitFor(() =>
      expect(document.querySelector(".cg-client-error")?.textContent).toContain("nope"),
    );
    expect(client.context.get("name")).toBe("Ana");
  });

  it("shows a validation error and does not post when a key is missing", async () => {
    const { fetchFn, requests } = makeFetch(() => personForm());
    const client = new UiClient(new ApiClient("http://test", fetchFn), host);
    await client.start();

    host.querySelector<HTMLElement>('[data-id="add_dog_btn"]')!.click();
    await vi.waitFor(() =>
      expect(document.querySelector(".cg-client-error")).not.toBeNull(),
    );
    expect(requests.length).toBe(1); // only the initial GET
  });
});

describe("action ordering", () => {
  it("applies update actions before the call request is issued", async () => {
    const tree = root(
      node({
        id: "w",
        type: "window",
        children: [
          node({
            id: "modal",
            type: "modal",
            attributes: [{ key: "visibility", value: "hidden" }],
          }),
          node({
            id: "both_btn",
            type: "button",
            when: [
              { event: "click", action: "update", operand: "(modal,visibility,shown)" },
              { event: "click", action: "call", operand: "next_solution" },
            ],
          }),
        ],
      }),
    );
    const visibleAtPost: string[] = [];
    const { fetchFn, requests } = makeFetch((record) => {
      if (record.body) {
        visibleAtPost.push(
          host.querySelector<HTMLElement>('[data-id="modal"]')!.style.display,
        );
      }
      return tree;
    });
    const client = new UiClient(new ApiClient("http://test", fetchFn), host);
    await client.start();

    const modal = host.querySelector<HTMLElement>('[data-id="modal"]')!;
    expect(modal.style.display).toBe("none");
    host.querySelector<HTMLElement>('[data-id="both_btn"]')!.click();
    // the local update is observable synchronously, before any response
    expect(modal.style.display).toBe("");
    await vi.waitFor(() => expect(requests.length).toBe(2));
    expect(visibleAtPost).toEqual([""]);
    expect(requests[1].body!.operation).toBe("next_solution");
  });
});

describe("request queueing", () => {
  it("allows only one in-flight POST and preserves order", async () => {
    const tree = root(
      node({
        id: "next",
        type: "button",
        when: [{ event: "click", action: "call", operand: "next_solution" }],
      }),
    );
    let release: (() => void) | null = null;
    let active = 0;
    let maxActive = 0;
    const { fetchFn, requests } = makeFetch(async (record) => {
      if (!record.body) return tree;
      active += 1;
      maxActive = Math.max(maxActive, active);
      await new Promise<void>((resolve) => {
        release = resolve;
      });
      active -= 1;
      return tree;
    });
    const client = new UiClient(new ApiClient("http://test", fetchFn), host);
    await client.start();

    const button = host.querySelector<HTMLElement>('[data-id="next"]')!;
    button.click();
    button.click();
    button.click();
    await vi.waitFor(() => expect(release).not.toBeNull());
    expect(requests.filter((r) => r.body).length).toBe(1);
    while (requests.filter((r) => r.body).length < 3) {
      const current = release!;
      release = null;
      current();
      await vi.waitFor(
        () => expect(release !== null || requests.filter((r) => r.body).length === 3).toBe(true),
      );
    }
    release?.();
    expect(maxActive).toBe(1);
  });
});
