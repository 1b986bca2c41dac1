/**
 * Pure labeling-session logic, shared by the browser UI, the node
 * simulation script, and the tests.  The session never mutates the topic
 * export; the label file is its only output.
 */

import {
  AgreementCategory,
  LabelFile,
  LABEL_FILE_VERSION,
  TopicCard,
  TopicExport,
  parseLabelFile,
} from "./types.js";

export interface SessionEntry {
  label: string;
  agreement: AgreementCategory | null;
}

export interface LabelSession {
  coderId: string;
  /** topic ids in queue order (export order) */
  queue: number[];
  entries: Map<number, SessionEntry>;
}

export const INITIAL_EVENTS_SHOWN = 5;

export function createSession(coderId: string, exported: TopicExport): LabelSession {
  if (!coderId.trim()) {
    throw new Error("coder id must not be empty");
  }
  return {
    coderId: coderId.trim(),
    queue: exported.topics.map((t) => t.topic_id),
    entries: new Map(),
  };
}

export function setLabel(session: LabelSession, topicId: number, label: string): void {
  if (!session.queue.includes(topicId)) {
    throw new Error(`topic ${topicId} is not in this session`);
  }
  const text = label.trim();
  const existing = session.entries.get(topicId);
  if (!text) {
    session.entries.delete(topicId);
    return;
  }
  session.entries.set(topicId, {
    label: text,
    agreement: existing?.agreement ?? null,
  });
}

export function setAgreement(
  session: LabelSession,
  topicId: number,
  category: AgreementCategory | null,
): void {
  const existing = session.entries.get(topicId);
  if (!existing) {
    throw new Error(`topic ${topicId} has no label yet`);
  }
  existing.agreement = category;
}

export function progress(session: LabelSession): { labeled: number; total: number } {
  return { labeled: session.entries.size, total: session.queue.length };
}

/** The events shown on a card: the first five, or everything once expanded. */
export function visibleEvents(card: TopicCard, expanded: boolean) {
  return expanded ? card.events : card.events.slice(0, INITIAL_EVENTS_SHOWN);
}

/**
 * Serialize the session's labels byte-stably: entries sorted by topic id,
 * fixed key order, two-space indent, trailing newline.
 */
export function serializeLabelFile(session: LabelSession): string {
  const labels = [...session.entries.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([topicId, entry]) => ({
      topic_id: topicId,
      label: entry.label,
      agreement: entry.agreement,
    }));
  const payload: LabelFile = {
    coder_id: session.coderId,
    labels,
    version: LABEL_FILE_VERSION,
  };
  return JSON.stringify(payload, null, 2) + "\n";
}

/** Rebuild a session from a saved label file (resume support). */
export function restoreSession(text: string, exported: TopicExport): LabelSession {
  const parsed = parseLabelFile(text);
  if (!parsed.ok) {
    throw new Error(parsed.error);
  }
  const session = createSession(parsed.data.coder_id, exported);
  for (const entry of parsed.data.labels) {
    if (!session.queue.includes(entry.topic_id)) {
      continue; // label for a topic not in this export; leave it out
    }
    session.entries.set(entry.topic_id, {
      label: entry.label,
      agreement: entry.agreement,
    });
  }
  return session;
}
