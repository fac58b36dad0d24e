"""Tests for quality verification: completeness, Fleiss' kappa, and human
label handling."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mtsumm.metrics import rouge_l
from mtsumm.model import Table
from mtsumm.quality import (
    HumanLabel,
    aggregate_labels,
    build_reference_sequence,
    completeness,
    fleiss_kappa,
    read_labels_jsonl,
    write_labels_jsonl,
)


class TestReferenceSequence:
    def test_semester_example(self, semester_table):
        query = ("What is the semester in which most students registered? "
                 "Show both the name and the ID.")
        assert build_reference_sequence(query, semester_table) == (
            "What is the semester in which most students registered? "
            "Show both the name and the ID., summer 2010, 2"
        )

    def test_empty_table_is_query_alone(self):
        table = Table.make("result", ["a"], [])
        assert build_reference_sequence("Who?", table) == "Who?"

    def test_cells_row_major(self):
        table = Table.make("result", ["x", "y"], [["1", "2"], ["3", "4"]])
        assert build_reference_sequence("q", table) == "q, 1, 2, 3, 4"


class TestCompleteness:
    def test_equals_rouge_recall(self, semester_table):
        query = "Which semester had the most registrations?"
        summary = "The semester summer 2010, with ID 2, had the most."
        ref = build_reference_sequence(query, semester_table)
        assert completeness(summary, query, semester_table) == (
            rouge_l(summary, ref).recall
        )

    def test_near_superset_summary_scores_high(self, semester_table):
        query = "most students registered"
        summary = ("In the semester with most students registered, "
                   "summer 2010, id 2, seven enrolled.")
        assert completeness(summary, query, semester_table) >= 0.95

    def test_empty_summary_is_zero(self, semester_table):
        assert completeness("", "q", semester_table) == 0.0


class TestFleissKappa:
    # Hand-worked 4-item, 3-rater case: per-item agreeing pairs are
    # 3,1,1,3 of 3 possible, so observed = 8/12 = 2/3. Category totals
    # are 6 a's and 6 b's of 12, so expected = 0.5^2 + 0.5^2 = 0.5.
    # kappa = (2/3 - 1/2) / (1 - 1/2) = 1/3.
    HAND_MATRIX = [
        ("a", "a", "a"),
        ("a", "a", "b"),
        ("b", "b", "a"),
        ("b", "b", "b"),
    ]

    def test_hand_worked_case(self):
        report = fleiss_kappa(self.HAND_MATRIX)
        assert report.kappa == pytest.approx(1.0 / 3.0, abs=1e-9)
        assert report.mean_observed_agreement == pytest.approx(2.0 / 3.0)
        assert report.expected_agreement == pytest.approx(0.5)
        assert report.n_items == 4
        assert report.n_raters == 3

    def test_unanimous_single_category(self):
        # Expected agreement hits 1.0; the convention is kappa = 1.0
        # rather than 0/0.
        report = fleiss_kappa([("yes", "yes")] * 5)
        assert report.kappa == 1.0

    def test_unanimous_two_categories(self):
        report = fleiss_kappa([("a", "a", "a"), ("b", "b", "b")])
        assert report.kappa == pytest.approx(1.0)
        assert report.mean_observed_agreement == pytest.approx(1.0)

    def test_random_ratings_near_zero(self):
        rng = random.Random(7)
        ratings = [
            tuple(rng.choice("ab") for _ in range(3)) for _ in range(1000)
        ]
        report = fleiss_kappa(ratings)
        assert abs(report.kappa) < 0.1

    def test_empty_matrix_rejected(self):
        with pytest.raises(ValueError, match="no items"):
            fleiss_kappa([])

    def test_ragged_matrix_rejected(self):
        with pytest.raises(ValueError, match="ragged"):
            fleiss_kappa([("a", "b"), ("a",)])

    def test_single_rater_rejected(self):
        with pytest.raises(ValueError, match="at least 2 raters"):
            fleiss_kappa([("a",), ("b",)])

    @settings(deadline=None)
    @given(
        st.lists(
            st.lists(st.sampled_from("abc"), min_size=3, max_size=3),
            min_size=2,
            max_size=12,
        ),
        st.randoms(use_true_random=False),
    )
    def test_permutation_invariance(self, ratings, rng):
        # Kappa must not depend on item order or on which rater said what.
        base = fleiss_kappa(ratings).kappa
        shuffled_items = list(ratings)
        rng.shuffle(shuffled_items)
        assert fleiss_kappa(shuffled_items).kappa == pytest.approx(base)
        shuffled_raters = []
        for row in ratings:
            row = list(row)
            rng.shuffle(row)
            shuffled_raters.append(row)
        assert fleiss_kappa(shuffled_raters).kappa == pytest.approx(base)


def make_label(example_id="fx-001", annotator_id="ann-1", faithfulness=1,
               fluency=5, **kwargs):
    return HumanLabel(example_id=example_id, annotator_id=annotator_id,
                      faithfulness=faithfulness, fluency=fluency, **kwargs)


class TestHumanLabel:
    def test_valid_label_has_no_violations(self):
        assert make_label().violations() == []

    def test_faithfulness_out_of_range(self):
        issues = make_label(faithfulness=2).violations()
        assert any("faithfulness" in v for v in issues)

    def test_fluency_out_of_range(self):
        issues = make_label(fluency=6).violations()
        assert any("fluency" in v for v in issues)

    def test_fluency_must_be_integer(self):
        issues = make_label(fluency=3.5).violations()
        assert any("fluency" in v for v in issues)

    def test_round_trip_with_correction(self):
        label = make_label(corrected_summary="Fixed.", timestamp="t0")
        assert HumanLabel.from_dict(label.to_dict()) == label

    def test_omits_absent_correction(self):
        assert "corrected_summary" not in make_label().to_dict()


class TestAggregateLabels:
    def test_mixed_faithfulness(self):
        labels = [
            make_label(annotator_id="a", faithfulness=1),
            make_label(annotator_id="b", faithfulness=1),
            make_label(annotator_id="c", faithfulness=0),
        ]
        summary = aggregate_labels(labels)
        assert summary.per_example_faithfulness == (("fx-001", 2.0 / 3.0),)
        assert summary.corpus_faithfulness == pytest.approx(2.0 / 3.0)

    def test_fluency_mean(self):
        labels = [
            make_label(annotator_id="a", fluency=5),
            make_label(annotator_id="b", fluency=5),
            make_label(annotator_id="c", fluency=4),
        ]
        summary = aggregate_labels(labels)
        assert summary.per_example_fluency == (("fx-001", 14.0 / 3.0),)

    def test_corpus_mean_is_over_examples_not_labels(self):
        # fx-001 has two labels, fx-002 one; each example weighs equally.
        labels = [
            make_label("fx-001", "a", fluency=1),
            make_label("fx-001", "b", fluency=1),
            make_label("fx-002", "a", fluency=4),
        ]
        summary = aggregate_labels(labels)
        assert summary.corpus_fluency == pytest.approx((1.0 + 4.0) / 2.0)

    def test_empty_input(self):
        summary = aggregate_labels([])
        assert summary.corpus_faithfulness == 0.0
        assert summary.per_example_fluency == ()


class TestLabelsJsonl:
    def test_round_trip(self, tmp_path):
        labels = [
            make_label("fx-001", "a", 1, 5, timestamp="2024-01-01T00:00:00"),
            make_label("fx-002", "b", 0, 2, corrected_summary="Better."),
        ]
        path = tmp_path / "labels.jsonl"
        write_labels_jsonl(labels, path)
        assert read_labels_jsonl(path) == labels
