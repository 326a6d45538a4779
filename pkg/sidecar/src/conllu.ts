// CoNLL-U rendering (UD v2 ten-column layout).

import type { DepToken } from "./attach.js";
import { ANNOTATOR_VERSION } from "./lexicon.js";

export function renderBlock(sentId: string, tokens: DepToken[]): string {
  const lines = [`# sent_id = ${sentId}`, `# annotator = ${ANNOTATOR_VERSION}`];
  for (const t of tokens) {
    lines.push(
      [t.index, t.form, t.lemma, t.upos, "_", "_", t.head, t.deprel, "_", "_"].join("\t")
    );
  }
  return lines.join("\n") + "\n\n";
}

export function renderFailure(sentId: string, reason: string): string {
  const safe = reason.replace(/\s+/g, " ").slice(0, 200);
  return `# sent_id = ${sentId}\n# parse_failed = ${safe}\n\n`;
}

/** Structural sanity: one root, heads in range, all tokens reachable. */
export function validateTree(tokens: DepToken[]): void {
  const n = tokens.length;
  const roots = tokens.filter((t) => t.head === 0);
  if (roots.length !== 1) {
    throw new Error(`expected one root, found ${roots.length}`);
  }
  const children = new Map<number, number[]>();
  for (const t of tokens) {
    if (t.head < 0 || t.head > n || t.head === t.index) {
      throw new Error(`bad head ${t.head} for token ${t.index}`);
    }
    const siblings = children.get(t.head) ?? [];
    siblings.push(t.index);
    children.set(t.head, siblings);
  }
  const seen = new Set<number>();
  const stack = [roots[0].index];
  while (stack.length > 0) {
    const idx = stack.pop()!;
    if (seen.has(idx)) continue;
    seen.add(idx);
    stack.push(...(children.get(idx) ?? []));
  }
  if (seen.size !== n) {
    throw new Error(`cycle: only ${seen.size} of ${n} tokens reachable`);
  }
}
