"""Confusion counts, metric formulas, aggregation, report exports."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from packscope.errors import (
    EmptyInputError,
    EmptyMatrixError,
    FormatError,
    InvalidParamsError,
    NonBinaryValueError,
    ScoreOutOfRangeError,
)
from packscope.evaluation import (
    METRIC_FIELDS,
    ConfusionMatrix,
    Metrics,
    aggregate_runs,
    compute_metrics,
    confidence_report,
    confusion_from_predictions,
    epoch_log_append,
    read_epoch_log,
    read_predictions_csv,
    write_confidence_csv,
    write_metrics_csv,
    write_predictions_csv,
)
from packscope.rng import Xorshift64Star

matrices = st.tuples(
    st.integers(0, 500), st.integers(0, 500), st.integers(0, 500), st.integers(0, 500)
).filter(lambda t: sum(t) > 0)


class TestConfusion:
    def test_basic_partition(self):
        cm = confusion_from_predictions([(1, 1), (0, 0)])
        assert (cm.tp, cm.fp, cm.tn, cm.fn) == (1, 0, 1, 0)

    def test_single_miss(self):
        cm = confusion_from_predictions([(1, 0)])
        assert (cm.tp, cm.fp, cm.tn, cm.fn) == (0, 0, 0, 1)

    def test_matches_tally_oracle(self):
        rng = Xorshift64Star(2025)
        rows = [(rng.randrange(2), rng.randrange(2)) for _ in range(1000)]
        cm = confusion_from_predictions(rows)
        want = {
            "tp": sum(1 for y, p in rows if y == 1 and p == 1),
            "fp": sum(1 for y, p in rows if y == 0 and p == 1),
            "tn": sum(1 for y, p in rows if y == 0 and p == 0),
            "fn": sum(1 for y, p in rows if y == 1 and p == 0),
        }
        assert (cm.tp, cm.fp, cm.tn, cm.fn) == tuple(want.values())
        assert cm.total == 1000

    def test_rejects_empty(self):
        with pytest.raises(EmptyInputError):
            confusion_from_predictions([])

    def test_rejects_non_binary(self):
        with pytest.raises(NonBinaryValueError):
            confusion_from_predictions([(1, 2)])

    def test_rejects_negative_counts(self):
        with pytest.raises(InvalidParamsError):
            ConfusionMatrix(tp=-1, fp=0, tn=0, fn=0)

    def test_permutation_invariance(self):
        rng = Xorshift64Star(7)
        rows = [(rng.randrange(2), rng.randrange(2)) for _ in range(50)]
        base = compute_metrics(confusion_from_predictions(rows))
        perm = list(rows)
        rng.shuffle(perm)
        assert compute_metrics(confusion_from_predictions(perm)) == base


class TestMetrics:
    def test_reference_matrix_golden(self):
        # Frozen reference matrix; rounds to 96.8 / 97.3 / 96.2 / 96.8 percent.
        m = compute_metrics(ConfusionMatrix(tp=1360, fp=38, tn=1375, fn=53))
        assert abs(m.accuracy - 0.968) <= 0.0005
        assert abs(m.precision - 0.973) <= 0.0005
        assert abs(m.recall - 0.962) <= 0.0005
        assert abs(m.f1 - 0.968) <= 0.0005
        assert m.undefined == frozenset()

    def test_perfect_classifier(self):
        m = compute_metrics(ConfusionMatrix(tp=50, fp=0, tn=50, fn=0))
        assert m.accuracy == m.precision == m.recall == m.f1 == 1.0
        assert m.fpr == m.fnr == 0.0

    def test_zero_denominator_flags(self):
        m = compute_metrics(ConfusionMatrix(tp=0, fp=0, tn=10, fn=5))
        assert m.precision == 0.0
        assert "precision" in m.undefined
        assert m.recall == 0.0 and "recall" not in m.undefined
        assert m.fnr == 1.0

    def test_empty_matrix_rejected(self):
        with pytest.raises(EmptyMatrixError):
            compute_metrics(ConfusionMatrix(0, 0, 0, 0))

    @given(matrices)
    @settings(max_examples=200, deadline=None)
    def test_formula_identities(self, counts):
        tp, fp, tn, fn = counts
        m = compute_metrics(ConfusionMatrix(tp, fp, tn, fn))
        assert m.accuracy == pytest.approx((tp + tn) / (tp + fp + tn + fn))
        if tp + fn > 0:
            assert m.fnr == pytest.approx(1.0 - m.recall)
        if tn + fp > 0:
            assert m.fpr == pytest.approx(1.0 - tn / (tn + fp))
        for value in m.values().values():
            assert 0.0 <= value <= 1.0

    @given(matrices)
    @settings(max_examples=200, deadline=None)
    def test_f1_harmonic_bound(self, counts):
        tp, fp, tn, fn = counts
        m = compute_metrics(ConfusionMatrix(tp, fp, tn, fn))
        if m.precision > 0 and m.recall > 0:
            lo = min(m.precision, m.recall)
            hi = max(m.precision, m.recall)
            assert lo - 1e-12 <= m.f1 <= hi + 1e-12


def metrics_like(**over):
    base = dict(accuracy=0.9, precision=0.9, recall=0.9, f1=0.9, fpr=0.1, fnr=0.1)
    base.update(over)
    return Metrics(**base)


class TestAggregate:
    def test_equal_runs_zero_spread(self):
        rep = aggregate_runs([metrics_like()] * 4)
        assert rep.mean["accuracy"] == pytest.approx(0.9)
        assert rep.std["accuracy"] == 0.0
        assert rep.ci95["accuracy"] == 0.0

    def test_two_point_formula(self):
        rep = aggregate_runs([metrics_like(accuracy=0.96), metrics_like(accuracy=0.97)])
        assert rep.mean["accuracy"] == pytest.approx(0.965)
        assert rep.std["accuracy"] == pytest.approx(0.0070711, abs=1e-7)
        assert rep.ci95["accuracy"] == pytest.approx(1.96 * rep.std["accuracy"] / math.sqrt(2))

    def test_matches_recomputation_oracle(self):
        rng = Xorshift64Star(99)
        runs = [
            metrics_like(**{f: rng.next_float() for f in METRIC_FIELDS}) for _ in range(5)
        ]
        rep = aggregate_runs(runs)
        for f in METRIC_FIELDS:
            vals = [getattr(r, f) for r in runs]
            mean = sum(vals) / 5
            var = sum((v - mean) ** 2 for v in vals) / 4
            assert abs(rep.mean[f] - mean) < 1e-12
            assert abs(rep.std[f] - math.sqrt(var)) < 1e-12

    def test_single_run(self):
        rep = aggregate_runs([metrics_like(accuracy=0.5)])
        assert rep.mean["accuracy"] == 0.5
        assert rep.std["accuracy"] == 0.0

    def test_rejects_empty(self):
        with pytest.raises(EmptyInputError):
            aggregate_runs([])


class TestConfidenceReport:
    def test_single_row_example(self):
        buckets = confidence_report([(1, 0.95)], edges=(0.8, 0.9, 1.0))
        assert buckets == [(0.8, 0.9, 0, 0), (0.9, 1.0, 1, 0)]

    def test_empty_rows(self):
        buckets = confidence_report([])
        assert len(buckets) == 10
        assert all(c == 0 and w == 0 for _, _, c, w in buckets)

    def test_last_bucket_closed(self):
        buckets = confidence_report([(1, 1.0), (0, 1.0)])
        assert buckets[-1] == (0.9, 1.0, 1, 1)

    def test_totals_match_tally_oracle(self):
        rng = Xorshift64Star(500)
        rows = [(rng.randrange(2), rng.next_float()) for _ in range(500)]
        buckets = confidence_report(rows)
        assert sum(c + w for _, _, c, w in buckets) == 500
        # independent per-row pass
        want = [[0, 0] for _ in range(10)]
        for label, score in rows:
            b = min(int(score * 10), 9)
            correct = (score >= 0.5) == (label == 1)
            want[b][0 if correct else 1] += 1
        assert [(c, w) for _, _, c, w in buckets] == [tuple(x) for x in want]

    def test_out_of_span_scores_dropped(self):
        buckets = confidence_report([(1, 0.05), (1, 0.95)], edges=(0.5, 1.0))
        assert buckets == [(0.5, 1.0, 1, 0)]

    def test_rejects_bad_scores(self):
        with pytest.raises(ScoreOutOfRangeError):
            confidence_report([(1, 1.5)])

    def test_rejects_bad_edges(self):
        with pytest.raises(InvalidParamsError):
            confidence_report([], edges=(0.5,))
        with pytest.raises(InvalidParamsError):
            confidence_report([], edges=(0.5, 0.4))

    def test_csv_export(self, tmp_path):
        p = tmp_path / "conf.csv"
        write_confidence_csv(p, confidence_report([(1, 0.95), (0, 0.2)]))
        lines = p.read_text().splitlines()
        assert lines[0] == "bucket_lo,bucket_hi,correct,incorrect"
        assert len(lines) == 11
        assert lines[-1] == "0.9,1,1,0"


class TestPredictionsCSV:
    def test_round_trip(self, tmp_path):
        p = tmp_path / "pred.csv"
        ids = ["a", "b", "c"]
        labels = [1, 0, 1]
        preds = [1, 0, 0]
        scores = [0.987654321, 0.25, 0.5]
        write_predictions_csv(p, ids, labels, preds, scores)
        rids, rlabels, rpreds, rscores = read_predictions_csv(p)
        assert rids == ids
        assert rlabels.tolist() == labels
        assert rpreds.tolist() == preds
        assert np.allclose(rscores, scores, rtol=1e-8)

    def test_header_and_format(self, tmp_path):
        p = tmp_path / "pred.csv"
        write_predictions_csv(p, ["x"], [1], [1], [0.123456789123])
        lines = p.read_text().splitlines()
        assert lines[0] == "id,label,pred,score"
        assert lines[1] == "x,1,1,0.123456789"

    def test_rejects_missing_header(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("nope\n")
        with pytest.raises(FormatError):
            read_predictions_csv(p)


class TestMetricsCSV:
    def test_rows_and_aggregate_line(self, tmp_path):
        p = tmp_path / "metrics.csv"
        rep = aggregate_runs([metrics_like(accuracy=0.96), metrics_like(accuracy=0.98)])
        write_metrics_csv(p, "forest", rep)
        lines = p.read_text().splitlines()
        assert lines[0] == "model,run,accuracy,precision,recall,f1,fpr,fnr"
        assert lines[1].startswith("forest,1,0.960000,")
        assert lines[2].startswith("forest,2,0.980000,")
        assert lines[3].startswith("forest,MEAN±STD,0.970000±0.014142,")
        assert len(lines) == 4


class TestEpochLog:
    def test_appends_after_single_header(self, tmp_path):
        p = tmp_path / "epochs.csv"
        epoch_log_append(p, run=1, epoch=0, split="train", loss=0.7, accuracy=0.5, f1=0.4)
        epoch_log_append(p, run=1, epoch=0, split="val", loss=0.72, accuracy=0.48, f1=0.39)
        lines = p.read_text().splitlines()
        assert lines[0] == "run,epoch,split,loss,accuracy,f1"
        assert len(lines) == 3

    def test_round_trip(self, tmp_path):
        p = tmp_path / "epochs.csv"
        rows = [
            (1, 0, "train", 0.69, 0.52, 0.5),
            (1, 0, "val", 0.71, 0.5, 0.47),
            (2, 1, "train", 0.42, 0.81, 0.8),
        ]
        for r in rows:
            epoch_log_append(p, *r)
        assert read_epoch_log(p) == rows

    def test_ten_epoch_run_has_twenty_rows(self, tmp_path):
        p = tmp_path / "epochs.csv"
        for epoch in range(10):
            epoch_log_append(p, 1, epoch, "train", 0.5, 0.9, 0.9)
            epoch_log_append(p, 1, epoch, "val", 0.55, 0.88, 0.88)
        assert len(read_epoch_log(p)) == 20

    def test_rejects_unknown_split(self, tmp_path):
        with pytest.raises(InvalidParamsError):
            epoch_log_append(tmp_path / "e.csv", 1, 0, "test", 0.5, 0.5, 0.5)

    def test_rejects_missing_header(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("wrong\n")
        with pytest.raises(FormatError):
            read_epoch_log(p)
