import numpy as np
import pytest

from srclang.evaluation import (
    EvalReport,
    evaluate,
    evaluate_with_errors,
    parse_report,
    render_report,
)
from srclang.grammar import Grammar, Production
from srclang.maxent import MaxentModel
from srclang.preprocess import Token, TokenKind


def report_from(confusion, languages=None):
    confusion = np.asarray(confusion)
    if languages is None:
        languages = tuple(f"l{j}" for j in range(confusion.shape[0]))
    return EvalReport(tuple(languages), confusion)


def tiny_model():
    """Two languages, one perfectly discriminative word each."""
    grammar = Grammar(
        [
            Production((Token(TokenKind.ALPHA, "alpine"),), 1.0),
            Production((Token(TokenKind.ALPHA, "boreal"),), 1.0),
        ]
    )
    weights = np.array([[4.0, -4.0], [-4.0, 4.0]])
    return MaxentModel(("a", "b"), grammar, weights, sigma=10.0)


class TestMetrics:
    def test_perfect_classifier_scores_one_everywhere(self):
        report = report_from(np.diag([5, 3, 8]))
        for language in report.languages:
            s = report.scores[language]
            assert (s.precision, s.recall, s.f) == (1.0, 1.0, 1.0)
        assert report.macro_f == 1.0

    def test_single_misclassification_hand_counts(self):
        # Two samples per language; one 'l0' sample predicted as 'l1'.
        report = report_from([[1, 1], [0, 2]])
        a, b = report.scores["l0"], report.scores["l1"]
        assert a.precision == pytest.approx(1 / 2)
        assert a.recall == pytest.approx(1.0)
        assert a.f == pytest.approx(2 / 3)
        assert b.precision == pytest.approx(1.0)
        assert b.recall == pytest.approx(2 / 3)
        assert b.f == pytest.approx(4 / 5)

    def test_everything_predicted_as_one_language(self):
        report = report_from([[4, 0], [6, 0]])
        assert report.scores["l0"].recall == pytest.approx(4 / 10)
        assert report.scores["l1"].recall == 0.0  # nothing predicted as l1

    def test_row_sums_are_per_language_counts(self):
        confusion = np.array([[3, 1, 0], [0, 5, 2], [1, 0, 4]])
        report = report_from(confusion)
        for j, language in enumerate(report.languages):
            assert report.scores[language].test_files == confusion[j].sum()
        assert report.total_files == confusion.sum()

    def test_accuracy_is_diagonal_share(self):
        report = report_from([[3, 1], [1, 5]])
        assert report.accuracy == pytest.approx(8 / 10)

    def test_swapping_ratio_definitions_leaves_f_unchanged(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            n = int(rng.integers(2, 6))
            confusion = rng.integers(0, 20, size=(n, n))
            report = report_from(confusion)
            labeled = confusion.sum(axis=1)
            predicted = confusion.sum(axis=0)
            for j, language in enumerate(report.languages):
                correct = confusion[j, j]
                swapped_p = correct / predicted[j] if predicted[j] else 0.0
                swapped_r = correct / labeled[j] if labeled[j] else 0.0
                swapped_f = (
                    2 * swapped_p * swapped_r / (swapped_p + swapped_r)
                    if swapped_p + swapped_r > 0
                    else 0.0
                )
                assert report.scores[language].f == pytest.approx(swapped_f, abs=1e-12)

    def test_macro_average_skips_languages_without_test_files(self):
        report = report_from([[4, 0, 0], [0, 6, 0], [0, 0, 0]])
        assert report.macro_f == pytest.approx(1.0)

    def test_zero_over_zero_cells_are_zero(self):
        report = report_from([[0, 0], [0, 4]])
        assert report.scores["l0"].precision == 0.0
        assert report.scores["l0"].recall == 0.0
        assert report.scores["l0"].f == 0.0


class TestEvaluateOperation:
    def test_perfect_on_crafted_samples(self):
        model = tiny_model()
        samples = [
            (b"the alpine way", "a"),
            (b"alpine again", "a"),
            (b"boreal woods", "b"),
        ]
        report = evaluate(model, samples)
        assert report.accuracy == 1.0
        np.testing.assert_array_equal(report.confusion, [[2, 0], [0, 1]])

    def test_misclassified_listing(self):
        model = tiny_model()
        samples = [(b"alpine", "a"), (b"alpine but labeled b", "b")]
        report, missed = evaluate_with_errors(model, samples, ["one", "two"])
        assert report.accuracy == 0.5
        assert missed == [("two", "b", "a")]

    def test_empty_test_set_is_an_error(self):
        with pytest.raises(ValueError):
            evaluate(tiny_model(), [])

    def test_unknown_label_is_an_error_listing_offenders(self):
        with pytest.raises(ValueError, match="zz"):
            evaluate(tiny_model(), [(b"alpine", "zz")])


class TestRendering:
    def test_text_table_shape(self):
        text = render_report(report_from([[10, 0], [1, 9]], ("go", "tcl")))
        lines = text.splitlines()
        assert lines[0].split() == ["Language", "Precision", "Recall", "F", "Files"]
        assert any(line.startswith("go") for line in lines)
        assert any(line.startswith("Average") for line in lines)
        assert "Confusion" in text
        assert "note:" in text

    def test_average_row_three_decimals(self):
        text = render_report(report_from([[99, 1], [1, 99]]))
        average = next(l for l in text.splitlines() if l.startswith("Average"))
        assert "0.990" in average

    def test_single_language_average_equals_row(self):
        text = render_report(report_from([[7]], ("solo",)))
        rows = [l for l in text.splitlines() if l.startswith(("solo", "Average"))]
        assert "1.000" in rows[0] and "1.000" in rows[1]

    def test_zero_over_zero_marked_with_asterisk(self):
        text = render_report(report_from([[0, 0], [0, 4]]))
        row = next(l for l in text.splitlines() if l.startswith("l0"))
        assert "0.000*" in row

    def test_json_round_trip(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            n = int(rng.integers(1, 5))
            report = report_from(rng.integers(0, 30, size=(n, n)))
            assert parse_report(render_report(report, "json")) == report

    def test_unknown_format_rejected(self):
        with pytest.raises(ValueError):
            render_report(report_from([[1]]), "yaml")
