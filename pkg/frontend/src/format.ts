/**
 * Display formatting for service-reported numbers.
 *
 * The UI never computes metrics locally; these helpers only round what the
 * service returned to the precision shown on screen.
 */

import type { AgreementPayload } from "./types.js";

export const SCORE_DECIMALS = 2;

export function formatScore(value: number): string {
  return value.toFixed(SCORE_DECIMALS);
}

export function describeAgreement(report: AgreementPayload): string {
  return (
    `Fleiss kappa = ${formatScore(report.kappa)} for ${report.aspect} on ${report.split} ` +
    `(${report.n_items} items, ${report.n_raters} raters; ` +
    `observed agreement ${formatScore(report.mean_observed_agreement)}, ` +
    `expected ${formatScore(report.expected_agreement)})`
  );
}
