/** Client-side syntax check mirroring the service's dialect grammar for
 * ground atoms: lowercase functor, optional parenthesized ground terms,
 * term nesting at most two levels deep. */

const NAME = /^[a-z][A-Za-z0-9_]*/;
const MAX_TERM_DEPTH = 2;

class Cursor {
  pos = 0;
  constructor(readonly text: string) {}

  peek(): string {
    return this.text[this.pos] ?? "";
  }

  skipSpace(): void {
    while (/\s/.test(this.peek())) this.pos++;
  }

  fail(expected: string): never {
    throw new Error(`column ${this.pos + 1}: expected ${expected}`);
  }
}

function parseName(c: Cursor): string {
  c.skipSpace();
  if (/^[A-Z_]/.test(c.peek())) c.fail("a ground term, not a variable");
  const match = NAME.exec(c.text.slice(c.pos));
  if (!match) c.fail("a lowercase name");
  c.pos += match[0].length;
  return match[0];
}

function parseTerm(c: Cursor, depth: number): string {
  const name = parseName(c);
  c.skipSpace();
  if (c.peek() !== "(") return name;
  if (depth >= MAX_TERM_DEPTH) c.fail(`term nesting at most ${MAX_TERM_DEPTH}`);
  c.pos++;
  const args = [parseTerm(c, depth + 1)];
  c.skipSpace();
  while (c.peek() === ",") {
    c.pos++;
    args.push(parseTerm(c, depth + 1));
    c.skipSpace();
  }
  if (c.peek() !== ")") c.fail("')'");
  c.pos++;
  return `${name}(${args.join(", ")})`;
}

/** Returns the canonical rendering, or throws with a column diagnostic. */
export function parseGroundAtom(text: string): string {
  const c = new Cursor(text);
  const atom = parseTerm(c, 0);
  c.skipSpace();
  if (c.pos !== c.text.length) c.fail("end of input");
  return atom;
}

export function isGroundAtom(text: string): boolean {
  try {
    parseGroundAtom(text);
    return true;
  } catch {
    return false;
  }
}
