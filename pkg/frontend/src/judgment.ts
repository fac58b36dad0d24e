/**
 * Client-side judgment validation and keyboard shortcuts.
 *
 * Validation mirrors the service's rules so an invalid draft is unsendable
 * before any request goes out: faithfulness is binary, fluency an integer on
 * the 1-5 Likert scale.
 */

import type { JudgmentDraft } from "./types.js";

export const EMPTY_DRAFT: JudgmentDraft = { faithfulness: null, fluency: null };

export function draftViolations(draft: JudgmentDraft): string[] {
  const violations: string[] = [];
  if (draft.faithfulness !== null && draft.faithfulness !== 0 && draft.faithfulness !== 1) {
    violations.push(`faithfulness must be 0 or 1, got ${draft.faithfulness}`);
  }
  if (
    draft.fluency !== null &&
    (!Number.isInteger(draft.fluency) || draft.fluency < 1 || draft.fluency > 5)
  ) {
    violations.push(`fluency must be an integer in [1, 5], got ${draft.fluency}`);
  }
  return violations;
}

export function isComplete(draft: JudgmentDraft): boolean {
  return draft.faithfulness !== null && draft.fluency !== null;
}

export function isSendable(draft: JudgmentDraft): boolean {
  return isComplete(draft) && draftViolations(draft).length === 0;
}

/**
 * Digit-key shortcuts: 0/1 answer faithfulness, 1-5 answer fluency.
 *
 * The two ranges share the "1" key, so it fills faithfulness first: while
 * faithfulness is unset, 1 marks the summary faithful; once faithfulness is
 * answered, 1-5 set the fluency rating. 0 always means unfaithful (it is
 * never a valid fluency), so faithfulness can be revised at any time.
 *
 * Returns the updated draft, or null when the key is not a shortcut.
 */
export function applyKey(draft: JudgmentDraft, key: string): JudgmentDraft | null {
  if (key === "0") {
    return { ...draft, faithfulness: 0 };
  }
  if (key === "1" && draft.faithfulness === null) {
    return { ...draft, faithfulness: 1 };
  }
  if (/^[1-5]$/.test(key)) {
    return { ...draft, fluency: Number(key) };
  }
  return null;
}
