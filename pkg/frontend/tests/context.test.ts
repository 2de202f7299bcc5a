import { describe, expect, it } from "vitest";

import { ClientContext } from "../src/context";

describe("ClientContext", () => {
  it("stores and returns values", () => {
    const ctx = new ClientContext();
    ctx.set("name", "Ana");
    expect(ctx.get("name")).toBe("Ana");
    expect(ctx.has("name")).toBe(true);
    expect(ctx.size).toBe(1);
  });

  it("later writes replace earlier ones", () => {
    const ctx = new ClientContext();
    ctx.set("name", "An");
    ctx.set("name", "Ana");
    expect(ctx.get("name")).toBe("Ana");
    expect(ctx.size).toBe(1);
  });

  it("clears completely", () => {
    const ctx = new ClientContext();
    ctx.set("a", "1");
    ctx.set("b", "2");
    ctx.clear();
    expect(ctx.size).toBe(0);
    expect(ctx.get("a")).toBeUndefined();
  });

  it("serializes to the request shape", () => {
    const ctx = new ClientContext();
    ctx.set("name", "Ana");
    expect(ctx.toList()).toEqual([{ key: "name", value: "Ana" }]);
  });
});
