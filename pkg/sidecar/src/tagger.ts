// Tokenization, part-of-speech tagging, and lemmatization.

import {
  ADJECTIVES,
  ADPOSITIONS,
  ADVERBS,
  AUXILIARIES,
  CONJUNCTIONS,
  DETERMINERS,
  NEGATIONS,
  PRONOUNS,
  VERB_LEMMAS,
  auxLemma,
} from "./lexicon.js";

export interface Tagged {
  form: string;
  lemma: string;
  upos: string;
}

const PUNCT_CHARS = new Set([...".,;:!?()[]{}\"'«»„“”‘’…"]);
const DOUBLED = /(bb|dd|gg|mm|nn|pp|rr|tt|ll)$/;

function isPunct(form: string): boolean {
  return [...form].every((ch) => PUNCT_CHARS.has(ch));
}

/** Whitespace split, then peel leading/trailing punctuation into own tokens. */
export function tokenize(text: string): string[] {
  const out: string[] = [];
  for (const raw of text.split(/\s+/)) {
    if (!raw) continue;
    let core = raw;
    const lead: string[] = [];
    const tail: string[] = [];
    while (core.length > 1 && PUNCT_CHARS.has(core[0])) {
      lead.push(core[0]);
      core = core.slice(1);
    }
    while (core.length > 1 && PUNCT_CHARS.has(core[core.length - 1])) {
      tail.unshift(core[core.length - 1]);
      core = core.slice(0, -1);
    }
    out.push(...lead, core, ...tail);
  }
  return out;
}

function verbLemmaFromSuffix(lower: string): string {
  // Only called for -ed forms not in the table.
  let stem = lower.slice(0, -2);
  if (DOUBLED.test(stem)) return stem.slice(0, -1);
  if (stem.endsWith("i")) return stem.slice(0, -1) + "y";
  return stem;
}

export function tagToken(form: string, sentenceInitial: boolean): Tagged {
  const lower = form.toLowerCase();
  if (isPunct(form)) return { form, lemma: form, upos: "PUNCT" };
  if (/^#+$/.test(form)) return { form, lemma: form, upos: "SYM" };
  if (/^\d+([.,]\d+)*$/.test(form)) return { form, lemma: form, upos: "NUM" };
  if (DETERMINERS.has(lower)) return { form, lemma: lower, upos: "DET" };
  if (AUXILIARIES.has(lower)) return { form, lemma: auxLemma(lower), upos: "AUX" };
  if (ADPOSITIONS.has(lower)) return { form, lemma: lower, upos: "ADP" };
  if (CONJUNCTIONS.has(lower)) return { form, lemma: lower, upos: "CCONJ" };
  if (NEGATIONS.has(lower)) return { form, lemma: "not", upos: "PART" };
  if (PRONOUNS.has(lower)) return { form, lemma: lower, upos: "PRON" };
  if (ADVERBS.has(lower)) return { form, lemma: lower, upos: "ADV" };
  const capitalized = form[0] !== lower[0];
  // Mid-sentence capitalization wins over open-class readings: "Release
  // notes" in a heading is a name, not the verb "release".
  if (capitalized && !sentenceInitial) return { form, lemma: form, upos: "PROPN" };
  const verbLemma = VERB_LEMMAS[lower];
  if (verbLemma) return { form, lemma: verbLemma, upos: "VERB" };
  if (ADJECTIVES.has(lower)) return { form, lemma: lower, upos: "ADJ" };
  if (/(able|ible)$/.test(lower) && lower.length > 5) {
    return { form, lemma: lower, upos: "ADJ" };
  }
  if (/^[a-z]/.test(lower) && lower.endsWith("ed") && lower.length >= 5) {
    // Regular past forms outside the table still read as verbs.
    return { form, lemma: verbLemmaFromSuffix(lower), upos: "VERB" };
  }
  if (capitalized) return { form, lemma: form, upos: "PROPN" };
  return { form, lemma: lower, upos: "NOUN" };
}

export function tagSentence(text: string): Tagged[] {
  const forms = tokenize(text);
  return forms.map((form, i) => tagToken(form, i === 0));
}
