/**
 * Lightweight textual handling of symbolic terms: just enough to unquote
 * display strings, split tuples, and substitute `_context_value(...)`
 * placeholders inside operand strings.  Full term parsing lives on the
 * server; the client treats operands as opaque text otherwise.
 */

import { ClientContext } from "./context";

export class SubstitutionError extends Error {
  constructor(readonly key: string, message: string) {
    super(message);
  }
}

/** Render a plain string as a quoted term argument. */
export function quoteString(text: string): string {
  const escaped = text
    .replace(/\\/g, "\\\\")
    .replace(/"/g, '\\"')
    .replace(/\n/g, "\\n");
  return `"${escaped}"`;
}

/** Display text for an attribute value: quoted strings lose their quotes. */
export function termText(rendered: string): string {
  if (rendered.length >= 2 && rendered.startsWith('"') && rendered.endsWith('"')) {
    return rendered
      .slice(1, -1)
      .replace(/\\n/g, "\n")
      .replace(/\\"/g, '"')
      .replace(/\\\\/g, "\\");
  }
  return rendered;
}

/** Split `(a,b,c)` at top-level commas, respecting nesting and strings. */
export function splitTuple(rendered: string): string[] {
  let text = rendered.trim();
  if (text.startsWith("(") && text.endsWith(")")) text = text.slice(1, -1);
  const parts: string[] = [];
  let depth = 0;
  let inString = false;
  let start = 0;
  for (let i = 0; i < text.length; i++) {
    const ch = text[i];
    if (inString) {
      if (ch === "\\") i++;
      else if (ch === '"') inString = false;
    } else if (ch === '"') inString = true;
    else if (ch === "(") depth++;
    else if (ch === ")") depth--;
    else if (ch === "," && depth === 0) {
      parts.push(text.slice(start, i).trim());
      start = i + 1;
    }
  }
  const last = text.slice(start).trim();
  if (last.length > 0 || parts.length > 0) parts.push(last);
  return parts.filter((p) => p.length > 0);
}

const PLACEHOLDER = "_context_value";

function resolveOne(args: string[], context: ClientContext): string {
  if (args.length < 1 || args.length > 3) {
    throw new SubstitutionError("", `${PLACEHOLDER} takes 1 to 3 arguments`);
  }
  const key = termText(args[0]);
  const type = args.length >= 2 ? args[1] : "str";
  if (type !== "str" && type !== "int" && type !== "const") {
    throw new SubstitutionError(key, `unknown context type '${type}'`);
  }
  const raw = context.get(key);
  if (raw === undefined) {
    if (args.length === 3) return args[2];
    throw new SubstitutionError(key, `no value entered for '${key}'`);
  }
  if (type === "str") return quoteString(raw);
  if (type === "int") {
    if (!/^-?\d+$/.test(raw.trim())) {
      throw new SubstitutionError(key, `'${raw}' is not an integer`);
    }
    return String(parseInt(raw.trim(), 10));
  }
  return raw.trim();
}

/**
 * Replace every `_context_value(K[,T[,D]])` occurrence in an operand
 * string using the context store's typing rules.  Occurrences inside
 * quoted strings are left alone.
 */
export function substituteContext(operand: string, context: ClientContext): string {
  let out = "";
  let i = 0;
  let inString = false;
  while (i < operand.length) {
    const ch = operand[i];
    if (inString) {
      out += ch;
      if (ch === "\\" && i + 1 < operand.length) {
        out += operand[i + 1];
        i++;
      } else if (ch === '"') inString = false;
      i++;
      continue;
    }
    if (ch === '"') {
      inString = true;
      out += ch;
      i++;
      continue;
    }
    if (operand.startsWith(PLACEHOLDER + "(", i)) {
      const open = i + PLACEHOLDER.length;
      let depth = 0;
      let j = open;
      let quoted = false;
      for (; j < operand.length; j++) {
        const cj = operand[j];
        if (quoted) {
          if (cj === "\\") j++;
          else if (cj === '"') quoted = false;
        } else if (cj === '"') quoted = true;
        else if (cj === "(") depth++;
        else if (cj === ")") {
          depth--;
          if (depth === 0) break;
        }
      }
      if (j >= operand.length) {
        throw new SubstitutionError("", `unbalanced ${PLACEHOLDER} in '${operand}'`);
      }
      const args = splitTuple(operand.slice(open, j + 1));
      out += resolveOne(args, context);
      i = j + 1;
      continue;
    }
    out += ch;
    i++;
  }
  return out;
}
