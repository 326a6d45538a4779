// Closed-class word lists and the verb form table for the rule annotator.
// The annotator's behavior is pinned by this module; ANNOTATOR_VERSION is
// echoed into every output block so downstream artifacts record which
// lexicon produced them.

export const ANNOTATOR_VERSION = "rule-ud/0.1.0";

export const DETERMINERS = new Set([
  "the", "a", "an", "this", "that", "these", "those", "each", "every",
  "some", "any", "no", "another", "such",
]);

export const ADPOSITIONS = new Set([
  "of", "in", "on", "for", "with", "by", "to", "from", "at", "as", "into",
  "after", "before", "under", "over", "about", "between", "during",
  "through", "against", "without", "within", "via", "across", "toward",
  "towards", "per", "since", "until",
]);

export const AUXILIARIES = new Set([
  "is", "are", "was", "were", "be", "been", "being", "am",
  "do", "does", "did",
  "has", "have", "had",
  "will", "would", "can", "could", "shall", "should", "may", "might", "must",
]);

const BE_FORMS = new Set(["is", "are", "was", "were", "be", "been", "being", "am"]);
const DO_FORMS = new Set(["do", "does", "did"]);
const HAVE_FORMS = new Set(["has", "have", "had"]);

export function auxLemma(lower: string): string {
  if (BE_FORMS.has(lower)) return "be";
  if (DO_FORMS.has(lower)) return "do";
  if (HAVE_FORMS.has(lower)) return "have";
  return lower;
}

export function isBeForm(lower: string): boolean {
  return BE_FORMS.has(lower);
}

export const CONJUNCTIONS = new Set(["and", "or", "but", "nor"]);

export const PRONOUNS = new Set([
  "it", "he", "she", "they", "we", "i", "you", "him", "her", "us", "them",
  "its", "his", "their", "our", "your", "my", "itself", "themselves",
  "something", "everything", "nothing", "anyone", "everyone",
  "what", "which", "who", "whom", "whose",
]);

export const NEGATIONS = new Set(["not", "n't", "never"]);

export const ADVERBS = new Set([
  "also", "often", "always", "now", "then", "here", "there", "very",
  "already", "currently", "directly", "only", "still", "again",
  "automatically", "manually", "successfully", "together",
  "how", "when", "where", "why",
]);

export const ADJECTIVES = new Set([
  "incompatible", "compatible", "obsolete", "custom", "new", "old",
  "legacy", "stable", "internal", "external", "critical", "faulty",
  "deprecated", "available", "responsible", "large", "small", "modern",
  "invalid", "valid", "mandatory", "optional", "ready", "slow", "fast",
  "empty", "active", "inactive",
]);

// Explicit verb form -> lemma map; covers regular inflection families the
// suffix fallback cannot safely lemmatize plus common irregulars.
export const VERB_LEMMAS: Record<string, string> = {
  launch: "launch", launches: "launch", launched: "launch", launching: "launch",
  refactor: "refactor", refactors: "refactor", refactored: "refactor",
  flag: "flag", flags: "flag", flagged: "flag",
  store: "store", stores: "store", stored: "store",
  reference: "reference", references: "reference", referenced: "reference",
  update: "update", updates: "update", updated: "update",
  replace: "replace", replaces: "replace", replaced: "replace",
  use: "use", uses: "use", used: "use",
  run: "run", runs: "run", ran: "run",
  require: "require", requires: "require", required: "require",
  provide: "provide", provides: "provide", provided: "provide",
  support: "support", supports: "support", supported: "support",
  contain: "contain", contains: "contain", contained: "contain",
  write: "write", writes: "write", wrote: "write", written: "write",
  crash: "crash", crashes: "crash", crashed: "crash",
  fail: "fail", fails: "fail", failed: "fail",
  release: "release", releases: "release", released: "release",
  acquire: "acquire", acquires: "acquire", acquired: "acquire",
  migrate: "migrate", migrates: "migrate", migrated: "migrate",
  validate: "validate", validates: "validate", validated: "validate",
  feed: "feed", feeds: "feed", fed: "feed",
  describe: "describe", describes: "describe", described: "describe",
  hold: "hold", holds: "hold", held: "hold",
  create: "create", creates: "create", created: "create",
  generate: "generate", generates: "generate", generated: "generate",
  handle: "handle", handles: "handle", handled: "handle",
  connect: "connect", connects: "connect", connected: "connect",
  depend: "depend", depends: "depend", depended: "depend",
  expose: "expose", exposes: "expose", exposed: "expose",
  load: "load", loads: "load", loaded: "load",
  build: "build", builds: "build", built: "build",
  extend: "extend", extends: "extend", extended: "extend",
  implement: "implement", implements: "implement", implemented: "implement",
  call: "call", calls: "call", called: "call",
  trigger: "trigger", triggers: "trigger", triggered: "trigger",
  return: "return", returns: "return", returned: "return",
  produce: "produce", produces: "produce", produced: "produce",
  consume: "consume", consumes: "consume", consumed: "consume",
  send: "send", sends: "send", sent: "send",
  receive: "receive", receives: "receive", received: "receive",
  convert: "convert", converts: "convert", converted: "convert",
  remove: "remove", removes: "remove", removed: "remove",
  add: "add", adds: "add", added: "add",
  delete: "delete", deletes: "delete", deleted: "delete",
  deploy: "deploy", deploys: "deploy", deployed: "deploy",
  install: "install", installs: "install", installed: "install",
  configure: "configure", configures: "configure", configured: "configure",
  rename: "rename", renames: "rename", renamed: "rename",
  link: "link", links: "link", linked: "link",
  import: "import", imports: "import", imported: "import",
  export: "export", exports: "export", exported: "export",
  adapt: "adapt", adapts: "adapt", adapted: "adapt",
  check: "check", checks: "check", checked: "check",
  perform: "perform", performs: "perform", performed: "perform",
};
