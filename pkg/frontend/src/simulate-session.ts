/**
 * Headless driver for the same session code the browser uses: load an
 * export, enter labels and agreement judgments, save the label file.
 *
 * Usage:
 *   node simulate-session.js export.json coder-id out.json \
 *     --label 0="World Cup" --agreement 0=strong [...]
 */

import { readFileSync, writeFileSync } from "node:fs";

import { createSession, serializeLabelFile, setAgreement, setLabel } from "./session.js";
import { AGREEMENT_CATEGORIES, AgreementCategory, parseTopicExport } from "./types.js";

function fail(message: string): never {
  console.error(`simulate-session: ${message}`);
  process.exit(2);
}

function parsePair(value: string): [number, string] {
  const eq = value.indexOf("=");
  if (eq < 0) fail(`expected TOPIC=VALUE, got ${value}`);
  return [Number.parseInt(value.slice(0, eq), 10), value.slice(eq + 1)];
}

const [exportPath, coderId, outPath, ...rest] = process.argv.slice(2);
if (!exportPath || !coderId || !outPath) {
  fail("usage: simulate-session.js EXPORT CODER OUT [--label T=TEXT] [--agreement T=CAT]");
}

const parsed = parseTopicExport(readFileSync(exportPath, "utf-8"));
if (!parsed.ok) fail(parsed.error);

const session = createSession(coderId, parsed.data);
for (let i = 0; i < rest.length; i += 2) {
  const flag = rest[i];
  const value = rest[i + 1];
  if (value === undefined) fail(`missing value after ${flag}`);
  const [topicId, text] = parsePair(value);
  if (flag === "--label") {
    setLabel(session, topicId, text);
  } else if (flag === "--agreement") {
    if (!(AGREEMENT_CATEGORIES as readonly string[]).includes(text)) {
      fail(`unknown agreement category ${text}`);
    }
    setAgreement(session, topicId, text as AgreementCategory);
  } else {
    fail(`unknown flag ${flag}`);
  }
}

writeFileSync(outPath, serializeLabelFile(session), "utf-8");
