import { describe, expect, it } from "vitest";

import { bucketOf, tallyAgreement } from "../src/agreement.js";
import { AgreementCategory, LabelFile } from "../src/types.js";

function file(coder: string, rows: [number, AgreementCategory | null][]): LabelFile {
  return {
    coder_id: coder,
    labels: rows.map(([topic_id, agreement]) => ({
      topic_id,
      label: `label ${topic_id}`,
      agreement,
    })),
    version: 1,
  };
}

describe("bucketOf", () => {
  it("maps the category pairs onto the four buckets", () => {
    expect(bucketOf("strong", "strong")).toBe("unanimous_strong");
    expect(bucketOf("strong", "partial")).toBe("strong_partial");
    expect(bucketOf("partial", "strong")).toBe("strong_partial");
    expect(bucketOf("partial", "partial")).toBe("unanimous_partial");
    expect(bucketOf("weak_none", "strong")).toBe("weak_none");
    expect(bucketOf("weak_none", "weak_none")).toBe("weak_none");
  });
});

describe("tallyAgreement", () => {
  it("matches a hand tally", () => {
    const a = file("a", [
      [0, "strong"],
      [1, "strong"],
      [2, "partial"],
      [3, "weak_none"],
    ]);
    const b = file("b", [
      [0, "strong"],
      [1, "partial"],
      [2, "partial"],
      [3, "strong"],
    ]);
    const tally = tallyAgreement(a, b);
    expect(tally.counts).toEqual({
      unanimous_strong: 1,
      strong_partial: 1,
      unanimous_partial: 1,
      weak_none: 1,
    });
    expect(tally.percentages.unanimous_strong).toBeCloseTo(25.0, 10);
    expect(tally.topicsIncluded).toBe(4);
  });

  it("excludes one-sided and unjudged topics", () => {
    const a = file("a", [
      [0, "strong"],
      [1, null],
      [2, "strong"],
    ]);
    const b = file("b", [
      [0, "strong"],
      [1, "strong"],
    ]);
    const tally = tallyAgreement(a, b);
    expect(tally.topicsIncluded).toBe(1);
    expect(tally.excluded).toEqual([
      { topicId: 1, reason: "missing agreement judgment" },
      { topicId: 2, reason: "labeled by only one coder" },
    ]);
  });

  it("handles the empty case", () => {
    const tally = tallyAgreement(file("a", []), file("b", []));
    expect(tally.topicsIncluded).toBe(0);
    expect(tally.percentages.unanimous_strong).toBe(0);
  });
});
