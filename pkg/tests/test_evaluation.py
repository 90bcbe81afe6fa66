import json
import math

import numpy as np
import pytest

from procspc.core import ChartSeries, ControlLimits
from procspc.errors import EmptyInput, LengthMismatch, TooFewPoints
from procspc.evaluation import (
    EvalRow,
    build_rows,
    evaluate_chart,
    metrics,
    replay,
    spc_decision_accuracy,
    split_chronological,
)
from procspc.forecaster import ModelConfig
from synth import LIMITS, START, drift_chart, stable_chart


def chart(n, y=None):
    ds = START + np.arange(n) * 3600
    return ChartSeries("E", "G", LIMITS, ds, np.full(n, 100.0) if y is None else y)


class TestSplit:
    @pytest.mark.parametrize("n,train,test", [(10, 8, 2), (5, 4, 1), (11, 9, 2), (100, 80, 20)])
    def test_sizes(self, n, train, test):
        tr, te = split_chronological(chart(n))
        assert (len(tr), len(te)) == (train, test)
        assert tr.ds[-1] < te.ds[0]

    def test_fraction_rounding_guard(self):
        tr, te = split_chronological(chart(10), 0.7)
        assert len(tr) == 7

    def test_too_few(self):
        with pytest.raises(TooFewPoints):
            split_chronological(chart(4))


class TestMetrics:
    def test_perfect(self):
        m = metrics([1, 2, 3], [1, 2, 3])
        assert (m.mse, m.rmse, m.r2) == (0.0, 0.0, 1.0)

    def test_mean_predictor(self):
        a = np.array([3.1, 4.7, 1.2, 9.9])
        assert metrics(a, np.full(4, a.mean())).r2 == 0.0

    def test_hand_computed(self):
        # residuals -1, 0, 1 -> SS_res = 2, mse = 2/3; SS_tot about mean 2 is also 2
        m = metrics([1, 2, 3], [2, 2, 2])
        assert m.mse == pytest.approx(2 / 3, rel=1e-15)
        assert m.rmse == pytest.approx(0.816496580927726, rel=1e-12)
        assert m.r2 == 0.0

    def test_constant_actuals(self):
        assert metrics([5, 5], [5, 5]).r2 == 1.0
        m = metrics([5, 5], [5, 6])
        assert m.r2 == -math.inf and not m.r2_defined

    def test_errors(self):
        with pytest.raises(LengthMismatch):
            metrics([1, 2], [1])
        with pytest.raises(EmptyInput):
            metrics([], [])


def _row(actual, predicted):
    return EvalRow(0, 0.0, 0.0, actual, predicted)


def test_accuracy_examples():
    assert spc_decision_accuracy([_row("Pass", "Pass"), _row("Pass", "Critical (Tool Stop) - Above USL")]) == 0.5
    assert spc_decision_accuracy([_row("Pass", "Pass")]) == 1.0
    assert spc_decision_accuracy([
        _row("At Risk (Technician Review) - Above UCL", "At Risk (Technician Review) - Below LCL")
    ]) == 0.0
    with pytest.raises(EmptyInput):
        spc_decision_accuracy([])


def test_build_rows_labels():
    rows = build_rows([1, 2], [100, 125], [115, 79], LIMITS)
    assert rows[0].decision == "Pass"
    assert rows[0].prophet_decision == "At Risk (Technician Review) - Above UCL"
    assert rows[1].decision == "Critical (Tool Stop) - Above USL"
    assert rows[1].prophet_decision == "Critical (Tool Stop) - Below LSL"


class TestEvaluateChart:
    def test_stable_chart_full_accuracy(self):
        s = stable_chart(0)
        # oracle: every actual and predicted value sits inside [lcl, ucl]
        r = evaluate_chart(s)
        assert all(LIMITS.lcl <= row.y <= LIMITS.ucl and LIMITS.lcl <= row.yhat <= LIMITS.ucl for row in r.rows)
        assert r.spc_accuracy == 1.0
        assert r.n_train == 400 and r.n_test == len(r.rows) == 100
        assert r.rmse ** 2 == pytest.approx(r.mse, rel=1e-12)

    def test_constant_series_exact_prediction(self):
        r = evaluate_chart(chart(20))
        assert r.rmse == 0.0 and r.r2 == 1.0

    def test_constant_test_actuals_imperfect_forecast_is_undefined(self):
        y = np.concatenate([100 + 0.5 * np.arange(16), np.full(4, 100.0)])
        r = evaluate_chart(chart(20, y), ModelConfig(seasonalities=()))
        assert r.rmse > 0
        assert r.r2 == -math.inf
        assert r.to_dict()["r2"] == "undefined"
        json.dumps(r.to_dict(), allow_nan=False)

    def test_too_few(self):
        with pytest.raises(TooFewPoints):
            evaluate_chart(chart(4))

    def test_deterministic(self):
        s = stable_chart(7, n=200)
        a, b = evaluate_chart(s), evaluate_chart(s)
        assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())
        assert a.to_csv() == b.to_csv()

    def test_csv_header(self):
        text = evaluate_chart(stable_chart(8, n=50)).to_csv()
        assert text.splitlines()[0] == "ds,y,yhat,decision,prophetDecision"


class TestReplay:
    def test_stable_chart_raises_no_alarms(self):
        s = stable_chart(1, n=120, span_days=20)
        res = replay(s, min_train=60, refit_stride=5)
        # oracle: direct zone scan of the generated data
        assert np.all((s.y >= LIMITS.lcl) & (s.y <= LIMITS.ucl))
        assert res.alarms.first_actual_alarm is None
        assert res.alarms.first_predicted_alarm is None
        assert res.alarms.events == []

    def test_noiseless_ramp_alarm_not_late(self):
        n = 120
        ds = START + np.arange(n) * 3600
        y = 100 + (LIMITS.ucl - 100) / 80.0 * np.arange(n)  # crosses ucl right after sample 80
        s = ChartSeries("RAMP", "G", LIMITS, ds, y)
        log = replay(s, min_train=50).alarms
        assert log.first_actual_alarm == 81
        assert log.first_predicted_alarm is not None and log.first_predicted_alarm <= 81
        assert log.alarm_lead >= 0

    def test_stride_n_fits_once(self):
        s = stable_chart(2, n=60, span_days=5)
        res = replay(s, min_train=10, refit_stride=len(s))
        assert res.alarms.n_fits == 1 and len(res.steps) == 50

    def test_stride_count(self):
        s = stable_chart(2, n=60, span_days=5)
        assert replay(s, min_train=10, refit_stride=7).alarms.n_fits == math.ceil(50 / 7)

    def test_one_step_uses_only_past(self):
        s = stable_chart(3, n=40, span_days=5)
        res = replay(s, ModelConfig(seasonalities=()), min_train=20, refit_stride=1)
        from procspc.forecaster import fit, predict
        expected = predict(fit(s.slice(0, 25), ModelConfig(seasonalities=())), [int(s.ds[25])])[0]
        assert res.steps[5][0] == expected

    @pytest.mark.parametrize("n,min_train", [(10, 10), (10, 4)])
    def test_too_few(self, n, min_train):
        with pytest.raises(TooFewPoints):
            replay(stable_chart(0, n=n, span_days=2), min_train=min_train)

    def test_alarm_log_json(self):
        log = replay(drift_chart(0), min_train=30).alarms.to_dict()
        text = json.dumps(log)
        assert json.loads(text)["alarm_lead_samples"] == log["alarm_lead_samples"]
        assert log["events"] and log["events"][0]["index"] >= 30
