import { describe, expect, it } from "vitest";

import {
  applyKey,
  draftViolations,
  EMPTY_DRAFT,
  isComplete,
  isSendable,
} from "../src/judgment.js";
import { describeAgreement, formatScore } from "../src/format.js";

describe("draft validation", () => {
  it("accepts every in-range judgment", () => {
    for (const faithfulness of [0, 1]) {
      for (let fluency = 1; fluency <= 5; fluency += 1) {
        const draft = { faithfulness, fluency };
        expect(draftViolations(draft)).toEqual([]);
        expect(isSendable(draft)).toBe(true);
      }
    }
  });

  it("flags out-of-range fluency", () => {
    for (const fluency of [0, 6, 9, -1, 3.5]) {
      const draft = { faithfulness: 1, fluency };
      expect(draftViolations(draft)).toHaveLength(1);
      expect(draftViolations(draft)[0]).toContain("fluency");
      expect(isSendable(draft)).toBe(false);
    }
  });

  it("flags non-binary faithfulness", () => {
    const draft = { faithfulness: 2, fluency: 3 };
    expect(draftViolations(draft)).toHaveLength(1);
    expect(draftViolations(draft)[0]).toContain("faithfulness");
    expect(isSendable(draft)).toBe(false);
  });

  it("treats unset fields as not-yet-violations but incomplete", () => {
    expect(draftViolations(EMPTY_DRAFT)).toEqual([]);
    expect(isComplete(EMPTY_DRAFT)).toBe(false);
    expect(isSendable(EMPTY_DRAFT)).toBe(false);
    expect(isComplete({ faithfulness: 1, fluency: null })).toBe(false);
    expect(isComplete({ faithfulness: null, fluency: 4 })).toBe(false);
    expect(isComplete({ faithfulness: 0, fluency: 1 })).toBe(true);
  });
});

describe("keyboard shortcuts", () => {
  it("answers faithfulness first when 0/1 are pressed", () => {
    expect(applyKey(EMPTY_DRAFT, "0")).toEqual({ faithfulness: 0, fluency: null });
    expect(applyKey(EMPTY_DRAFT, "1")).toEqual({ faithfulness: 1, fluency: null });
  });

  it("routes 1-5 to fluency once faithfulness is answered", () => {
    const afterFaithful = { faithfulness: 1, fluency: null };
    expect(applyKey(afterFaithful, "1")).toEqual({ faithfulness: 1, fluency: 1 });
    expect(applyKey(afterFaithful, "5")).toEqual({ faithfulness: 1, fluency: 5 });
    expect(applyKey({ faithfulness: 0, fluency: 3 }, "2")).toEqual({
      faithfulness: 0,
      fluency: 2,
    });
  });

  it("routes 2-5 to fluency even while faithfulness is unset", () => {
    expect(applyKey(EMPTY_DRAFT, "4")).toEqual({ faithfulness: null, fluency: 4 });
  });

  it("lets 0 revise faithfulness at any time", () => {
    expect(applyKey({ faithfulness: 1, fluency: 5 }, "0")).toEqual({
      faithfulness: 0,
      fluency: 5,
    });
  });

  it("ignores keys outside both ranges", () => {
    for (const key of ["6", "7", "8", "9", "a", "Escape", " ", "F1", "11"]) {
      expect(applyKey({ faithfulness: 1, fluency: 2 }, key)).toBeNull();
    }
  });
});

describe("score formatting", () => {
  it("renders service numbers at two decimals", () => {
    expect(formatScore(1)).toBe("1.00");
    expect(formatScore(1 / 3)).toBe("0.33");
    expect(formatScore(-0.05)).toBe("-0.05");
    expect(formatScore(0.666666)).toBe("0.67");
  });

  it("describes an agreement report with its kappa and counts", () => {
    const text = describeAgreement({
      kappa: 1 / 3,
      mean_observed_agreement: 2 / 3,
      expected_agreement: 0.5,
      n_items: 4,
      n_raters: 3,
      split: "test",
      aspect: "faithfulness",
    });
    expect(text).toContain("kappa = 0.33");
    expect(text).toContain("faithfulness");
    expect(text).toContain("4 items");
    expect(text).toContain("3 raters");
    expect(text).toContain("0.67");
    expect(text).toContain("0.50");
  });
});
