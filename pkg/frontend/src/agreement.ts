/**
 * Two-coder agreement tallying, mirroring the pipeline's summary verb so
 * coders can preview the breakdown in the browser.
 */

import { AgreementCategory, LabelFile } from "./types.js";

export const BUCKETS = [
  "unanimous_strong",
  "strong_partial",
  "unanimous_partial",
  "weak_none",
] as const;
export type Bucket = (typeof BUCKETS)[number];

export function bucketOf(a: AgreementCategory, b: AgreementCategory): Bucket {
  const pair = new Set([a, b]);
  if (pair.size === 1 && pair.has("strong")) return "unanimous_strong";
  if (pair.has("strong") && pair.has("partial")) return "strong_partial";
  if (pair.size === 1 && pair.has("partial")) return "unanimous_partial";
  return "weak_none";
}

export interface AgreementTally {
  counts: Record<Bucket, number>;
  percentages: Record<Bucket, number>;
  topicsIncluded: number;
  excluded: { topicId: number; reason: string }[];
}

export function tallyAgreement(a: LabelFile, b: LabelFile): AgreementTally {
  const counts: Record<Bucket, number> = {
    unanimous_strong: 0,
    strong_partial: 0,
    unanimous_partial: 0,
    weak_none: 0,
  };
  const excluded: { topicId: number; reason: string }[] = [];
  const byTopicA = new Map(a.labels.map((l) => [l.topic_id, l]));
  const byTopicB = new Map(b.labels.map((l) => [l.topic_id, l]));
  const allTopics = [...new Set([...byTopicA.keys(), ...byTopicB.keys()])].sort(
    (x, y) => x - y,
  );
  for (const topicId of allTopics) {
    const la = byTopicA.get(topicId);
    const lb = byTopicB.get(topicId);
    if (!la || !lb) {
      excluded.push({ topicId, reason: "labeled by only one coder" });
      continue;
    }
    if (la.agreement === null || lb.agreement === null) {
      excluded.push({ topicId, reason: "missing agreement judgment" });
      continue;
    }
    counts[bucketOf(la.agreement, lb.agreement)] += 1;
  }
  const included = BUCKETS.reduce((total, bucket) => total + counts[bucket], 0);
  const percentages = Object.fromEntries(
    BUCKETS.map((bucket) => [
      bucket,
      included ? (100 * counts[bucket]) / included : 0,
    ]),
  ) as Record<Bucket, number>;
  return { counts, percentages, topicsIncluded: included, excluded };
}
