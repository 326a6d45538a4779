// Heuristic head attachment over tagged tokens, producing a valid basic UD
// tree: exactly one root, every other token attached, no cycles (non-head
// tokens hop straight to a phrase head; phrase heads chain backward to the
// root).

import type { Tagged } from "./tagger.js";

export interface DepToken extends Tagged {
  index: number; // 1-based
  head: number; // 0 = root
  deprel: string;
}

const NOMINAL = new Set(["NOUN", "PROPN"]);
const HEADISH = new Set(["NOUN", "PROPN", "PRON"]);

interface Work {
  head: number | null; // 0-based head, -1 for root
  deprel: string;
}

function chunkHeads(tags: Tagged[]): { heads: number[]; compound: Map<number, number> } {
  const heads: number[] = [];
  const compound = new Map<number, number>();
  let i = 0;
  while (i < tags.length) {
    if (NOMINAL.has(tags[i].upos)) {
      let j = i;
      while (j + 1 < tags.length && NOMINAL.has(tags[j + 1].upos)) j += 1;
      for (let k = i; k < j; k += 1) compound.set(k, j);
      heads.push(j);
      i = j + 1;
    } else if (tags[i].upos === "PRON") {
      heads.push(i);
      i += 1;
    } else if (
      tags[i].upos === "NUM" &&
      !(i + 1 < tags.length && NOMINAL.has(tags[i + 1].upos))
    ) {
      heads.push(i); // bare numeral acts as a nominal head
      i += 1;
    } else {
      i += 1;
    }
  }
  return { heads, compound };
}

function pickRoot(tags: Tagged[], heads: number[]): { root: number; passive: boolean } {
  const firstVerb = tags.findIndex((t) => t.upos === "VERB");
  if (firstVerb !== -1) {
    const passive =
      /(?:ed|en)$/.test(tags[firstVerb].form.toLowerCase()) &&
      tags.slice(0, firstVerb).some((t) => t.upos === "AUX" && t.lemma === "be");
    return { root: firstVerb, passive };
  }
  const firstAux = tags.findIndex((t) => t.upos === "AUX");
  if (firstAux !== -1) {
    for (let i = firstAux + 1; i < tags.length; i += 1) {
      if (tags[i].upos === "ADJ" || heads.includes(i)) {
        return { root: i, passive: false };
      }
    }
  }
  if (heads.length > 0) return { root: heads[0], passive: false };
  return { root: 0, passive: false };
}

export function attach(tags: Tagged[]): DepToken[] {
  if (tags.length === 0) {
    throw new Error("no tokens to attach");
  }
  const n = tags.length;
  const work: Work[] = tags.map(() => ({ head: null, deprel: "dep" }));
  const { heads, compound } = chunkHeads(tags);
  const { root, passive } = pickRoot(tags, heads);
  const rootIsVerb = tags[root].upos === "VERB";

  const set = (i: number, head: number, deprel: string) => {
    if (i !== root && work[i].head === null) {
      work[i] = { head, deprel };
    }
  };

  for (const [member, head] of compound) set(member, head, "compound");

  // Coordination between phrase heads with no verb in between.
  const phraseHead = (i: number) => heads.includes(i) || tags[i].upos === "ADJ";
  for (let c = 0; c < n; c += 1) {
    if (tags[c].upos !== "CCONJ") continue;
    let p = -1;
    for (let i = c - 1; i >= 0; i -= 1) {
      if (phraseHead(i)) {
        p = i;
        break;
      }
    }
    let q = -1;
    for (let i = c + 1; i < n; i += 1) {
      if (tags[i].upos === "VERB") break;
      if (phraseHead(i)) {
        q = i;
        break;
      }
    }
    if (p !== -1 && q !== -1 && q !== root) {
      set(q, p, "conj");
      set(c, q, "cc");
    }
  }

  // Adpositions mark the next phrase head.
  for (let k = 0; k < n; k += 1) {
    if (tags[k].upos !== "ADP") continue;
    for (let i = k + 1; i < n; i += 1) {
      if (phraseHead(i) && i !== root) {
        set(k, i, "case");
        break;
      }
    }
  }
  const caseMarked = new Set(
    work.flatMap((w, i) => (w.deprel === "case" && w.head !== null ? [w.head] : []))
  );

  // Determiners, numerals, and adjectives modify the next nominal head.
  for (let d = 0; d < n; d += 1) {
    const upos = tags[d].upos;
    if (upos !== "DET" && upos !== "ADJ" && upos !== "NUM") continue;
    if (work[d].head !== null || d === root) continue;
    const rel = upos === "DET" ? "det" : upos === "NUM" ? "nummod" : "amod";
    for (let i = d + 1; i < n; i += 1) {
      if (heads.includes(i) && i !== root) {
        set(d, i, rel);
        break;
      }
      if (tags[i].upos === "VERB" || tags[i].upos === "PUNCT") break;
    }
    if (work[d].head === null && upos === "ADJ" && d > root && rootIsVerb) {
      set(d, root, "xcomp"); // predicative complement: "flagged as incompatible"
    }
  }

  // Phrase-head grammatical relations around the root.
  let subjDone = false;
  let objDone = false;
  const attachableHeads = heads.filter((h) => h !== root && work[h].head === null);
  for (const h of attachableHeads) {
    if (h < root) {
      if (!subjDone && !caseMarked.has(h)) {
        set(h, root, passive ? "nsubj:pass" : "nsubj");
        subjDone = true;
      } else if (caseMarked.has(h)) {
        const prev = [...heads].reverse().find((p) => p < h && work[p]?.deprel !== "conj");
        set(h, prev !== undefined && prev !== h ? prev : root, prev !== undefined ? "nmod" : "obl");
      } else {
        set(h, root, "dep");
      }
    } else {
      if (caseMarked.has(h)) {
        const prev = heads.filter((p) => p > root && p < h && work[p]?.deprel !== "conj").pop();
        if (prev !== undefined) set(h, prev, "nmod");
        else set(h, root, "obl");
      } else if (!objDone && rootIsVerb) {
        set(h, root, "obj");
        objDone = true;
      } else {
        set(h, root, "dep");
      }
    }
  }

  // Auxiliaries, negation, adverbs, punctuation, stragglers.
  for (let i = 0; i < n; i += 1) {
    if (i === root || work[i].head !== null) continue;
    const upos = tags[i].upos;
    if (upos === "AUX") {
      if (!rootIsVerb) set(i, root, "cop");
      else if (passive && tags[i].lemma === "be") set(i, root, "aux:pass");
      else set(i, root, "aux");
    } else if (upos === "PART" || upos === "ADV") {
      set(i, root, "advmod");
    } else if (upos === "PUNCT") {
      set(i, root, "punct");
    } else {
      set(i, root, "dep");
    }
  }

  return tags.map((t, i) => ({
    ...t,
    index: i + 1,
    head: i === root ? 0 : (work[i].head ?? root) + 1,
    deprel: i === root ? "root" : work[i].deprel,
  }));
}
