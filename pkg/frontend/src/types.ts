/**
 * Schemas for the two file formats this app touches: the read-only topic
 * export produced by the pipeline, and the per-coder label file it writes.
 */

import { z } from "zod";

export const EXPORT_VERSION = 1;
export const LABEL_FILE_VERSION = 1;

export const AGREEMENT_CATEGORIES = ["strong", "partial", "weak_none"] as const;
export type AgreementCategory = (typeof AGREEMENT_CATEGORIES)[number];

export const TopicCardSchema = z.object({
  topic_id: z.number().int().nonnegative(),
  features: z.object({
    event_count: z.number(),
    prominence: z.number(),
    magnitude: z.number(),
    deviance: z.number(),
  }),
  top_core_articles: z.array(z.object({ article: z.string(), count: z.number() })),
  top_articles: z.array(z.object({ article: z.string(), weight: z.number() })),
  events: z.array(z.object({ date: z.string(), description: z.string() })),
});

export const TopicExportSchema = z.object({
  version: z.number(),
  topics: z.array(TopicCardSchema),
});

export type TopicCard = z.infer<typeof TopicCardSchema>;
export type TopicExport = z.infer<typeof TopicExportSchema>;

export const LabelEntrySchema = z.object({
  topic_id: z.number().int().nonnegative(),
  label: z.string(),
  agreement: z.enum(AGREEMENT_CATEGORIES).nullable(),
});

export const LabelFileSchema = z.object({
  coder_id: z.string().min(1),
  labels: z.array(LabelEntrySchema),
  version: z.number(),
});

export type LabelEntry = z.infer<typeof LabelEntrySchema>;
export type LabelFile = z.infer<typeof LabelFileSchema>;

export type ParseOutcome<T> =
  | { ok: true; data: T }
  | { ok: false; error: string };

/** Parse and validate a topic export; mismatches name the version found. */
export function parseTopicExport(text: string): ParseOutcome<TopicExport> {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    return { ok: false, error: `not valid JSON: ${(err as Error).message}` };
  }
  const version =
    typeof raw === "object" && raw !== null && "version" in raw
      ? (raw as { version: unknown }).version
      : "missing";
  if (version !== EXPORT_VERSION) {
    return {
      ok: false,
      error: `unsupported export version ${String(version)} (this app reads version ${EXPORT_VERSION})`,
    };
  }
  const result = TopicExportSchema.safeParse(raw);
  if (!result.success) {
    const first = result.error.issues[0];
    return {
      ok: false,
      error: `export schema mismatch at ${first?.path.join(".") ?? "?"}: ${first?.message ?? "invalid"} (version ${String(version)})`,
    };
  }
  return { ok: true, data: result.data };
}

export function parseLabelFile(text: string): ParseOutcome<LabelFile> {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    return { ok: false, error: `not valid JSON: ${(err as Error).message}` };
  }
  const result = LabelFileSchema.safeParse(raw);
  if (!result.success) {
    const first = result.error.issues[0];
    return {
      ok: false,
      error: `label file schema mismatch at ${first?.path.join(".") ?? "?"}: ${first?.message ?? "invalid"}`,
    };
  }
  return { ok: true, data: result.data };
}
