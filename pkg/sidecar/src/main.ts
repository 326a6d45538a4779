#!/usr/bin/env node
// Line protocol: one {"sent_id", "text"} JSON object per stdin line,
// CoNLL-U blocks on stdout in input order. Sentences the annotator cannot
// handle come back as a comment-only block the consumer skips; malformed
// request lines are reported on stderr and skipped.

import { createInterface } from "node:readline";

import { renderFailure } from "./conllu.js";
import { parseToBlock, selfCheck } from "./parser.js";

function handleLine(line: string): string | null {
  let request: unknown;
  try {
    request = JSON.parse(line);
  } catch (err) {
    process.stderr.write(`skipping malformed request line: ${String(err)}\n`);
    return null;
  }
  const record = request as { sent_id?: unknown; text?: unknown };
  if (typeof record.sent_id !== "string" || typeof record.text !== "string") {
    process.stderr.write("skipping request without sent_id/text strings\n");
    return null;
  }
  try {
    return parseToBlock(record.sent_id, record.text);
  } catch (err) {
    return renderFailure(record.sent_id, String(err));
  }
}

export function main(): void {
  try {
    selfCheck();
  } catch (err) {
    process.stderr.write(`annotator self-check failed: ${String(err)}\n`);
    process.exit(1);
  }
  const rl = createInterface({ input: process.stdin, terminal: false });
  rl.on("line", (line) => {
    if (!line.trim()) return;
    const block = handleLine(line);
    if (block !== null) process.stdout.write(block);
  });
  rl.on("close", () => {
    process.exit(0);
  });
}

main();
