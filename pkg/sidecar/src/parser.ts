// The full annotation pipeline for one sentence, plus the startup
// self-check that stands in for a model-load gate.

import { attach, type DepToken } from "./attach.js";
import { renderBlock, validateTree } from "./conllu.js";
import { tagSentence } from "./tagger.js";

export function parseSentence(text: string): DepToken[] {
  const tagged = tagSentence(text);
  const tokens = attach(tagged);
  validateTree(tokens);
  return tokens;
}

export function parseToBlock(sentId: string, text: string): string {
  return renderBlock(sentId, parseSentence(text));
}

const GOLDEN_TEXT = "SAP launched Joule for Consultants";
const GOLDEN_HEADS = [2, 0, 2, 5, 3];
const GOLDEN_DEPRELS = ["nsubj", "root", "obj", "case", "nmod"];

/** Refuses to start if the pinned golden parse ever regresses. */
export function selfCheck(): void {
  const tokens = parseSentence(GOLDEN_TEXT);
  const heads = tokens.map((t) => t.head);
  const deprels = tokens.map((t) => t.deprel);
  if (
    heads.join(",") !== GOLDEN_HEADS.join(",") ||
    deprels.join(",") !== GOLDEN_DEPRELS.join(",")
  ) {
    throw new Error(
      `golden parse regressed: heads=${heads.join(",")} deprels=${deprels.join(",")}`
    );
  }
}
