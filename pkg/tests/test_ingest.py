import csv
import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from procspc.core import ChartSeries, ControlLimits
from procspc.errors import HeaderError, TimestampParseError
from procspc.ingest import RawRow, check_limit_consistency, load_csv, parse_timestamp, write_csv

HEADER = ["ChartID", "date", "Average", "Usl", "Ucl", "Target", "Lcl", "Lsl", "Group"]


def days_from_civil(y, m, d):
    """Independent proleptic-Gregorian day count (H. Hinnant's algorithm)."""
    y -= m <= 2
    era = (y if y >= 0 else y - 399) // 400
    yoe = y - era * 400
    doy = (153 * (m + (-3 if m > 2 else 9)) + 2) // 5 + d - 1
    doe = yoe * 365 + yoe // 4 - yoe // 100 + doy
    return era * 146097 + doe - 719468


def write(tmp_path, rows, header=HEADER, name="in.csv"):
    path = tmp_path / name
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


def row(chart, date, avg, usl=120, ucl=110, target=100, lcl=90, lsl=80, group="THK"):
    return [chart, date, avg, usl, ucl, target, lcl, lsl, group]


class TestParseTimestamp:
    def test_epoch_origin(self):
        assert parse_timestamp("1/1/70 12:00 AM") == 0

    def test_iso_against_civil_oracle(self):
        expected = days_from_civil(2025, 4, 2) * 86400 + 11 * 3600 + 35 * 60 + 26
        assert expected == 1743593726
        assert parse_timestamp("2025-04-02 11:35:26") == expected

    def test_short_year_pm_format(self):
        expected = days_from_civil(2025, 4, 2) * 86400 + 23 * 3600 + 35 * 60
        assert parse_timestamp("4/2/25 11:35 PM") == expected

    @pytest.mark.parametrize("yy,year", [("68", 2068), ("69", 1969), ("99", 1999), ("00", 2000)])
    def test_two_digit_year_pivot(self, yy, year):
        assert parse_timestamp(f"1/1/{yy} 12:00 AM") == days_from_civil(year, 1, 1) * 86400

    @pytest.mark.parametrize("text", ["13/1/25 9:00 AM", "", "yesterday", "2025-02-30 00:00:00"])
    def test_bad_text(self, text):
        with pytest.raises(TimestampParseError) as err:
            parse_timestamp(text)
        assert err.value.text == text


class TestLoadCsv:
    def test_missing_average_dropped(self, tmp_path):
        path = write(tmp_path, [
            row("A", "4/1/25 9:00 AM", 100),
            row("A", "4/1/25 10:00 AM", ""),
            row("A", "4/1/25 11:00 AM", 101),
        ])
        (s,), (rep,) = load_csv(path)
        assert len(s) == 2
        assert (rep.rows_read, rep.rows_dropped, rep.rows_deduped, rep.rows_kept) == (3, 1, 0, 2)

    def test_duplicate_timestamp_keeps_first(self, tmp_path):
        path = write(tmp_path, [row("A", "4/1/25 9:00 AM", 5), row("A", "4/1/25 9:00 AM", 7)])
        (s,), (rep,) = load_csv(path)
        assert list(s.y) == [5.0]
        assert rep.rows_deduped == 1

    def test_grouping_by_chart(self, tmp_path):
        rows = [row("A", f"4/{d}/25 9:00 AM", 100 + d) for d in range(1, 5)]
        rows += [row("B", f"4/{d}/25 9:00 AM", 50) for d in range(1, 3)]
        random.Random(0).shuffle(rows)
        series, reports = load_csv(write(tmp_path, rows))
        sizes = {s.chart_id: len(s) for s in series}
        assert sizes == {"A": 4, "B": 2}

    def test_header_case_and_order_insensitive(self, tmp_path):
        header = ["group", "LSL", "lcl", "TARGET", "ucl", "usl", "average", "DATE", "chartid"]
        path = write(tmp_path, [["G", 80, 90, 100, 110, 120, 99.5, "4/1/25 9:00 AM", "A"]], header=header)
        (s,), _ = load_csv(path)
        assert s.limits == ControlLimits(80, 90, 100, 110, 120)
        assert s.group == "G" and s.y[0] == 99.5

    def test_header_error_lists_missing(self, tmp_path):
        path = write(tmp_path, [], header=["ChartID", "date", "Average"])
        with pytest.raises(HeaderError) as err:
            load_csv(path)
        assert err.value.missing == ["Usl", "Ucl", "Target", "Lcl", "Lsl", "Group"]

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_csv(tmp_path / "nope.csv")

    def test_empty_chart_skipped_not_fatal(self, tmp_path):
        path = write(tmp_path, [row("A", "4/1/25 9:00 AM", 1), row("B", "4/1/25 9:00 AM", "")])
        series, reports = load_csv(path)
        assert [s.chart_id for s in series] == ["A"]
        rep_b = [r for r in reports if r.chart_id == "B"][0]
        assert rep_b.rows_dropped == 1 and any("skipped" in w for w in rep_b.warnings)

    def test_latest_row_limits_win_with_warning(self, tmp_path):
        path = write(tmp_path, [
            row("A", "4/2/25 9:00 AM", 100, ucl=112),
            row("A", "4/1/25 9:00 AM", 100, ucl=110),
        ])
        (s,), (rep,) = load_csv(path)
        assert s.limits.ucl == 112
        assert len(rep.warnings) == 1 and "Ucl" in rep.warnings[0] and "A" in rep.warnings[0]

    def test_bad_limit_order_skips_chart(self, tmp_path):
        path = write(tmp_path, [row("A", "4/1/25 9:00 AM", 100, lcl=115)])
        series, (rep,) = load_csv(path)
        assert series == [] and "lcl>target" in rep.warnings[0]

    def test_unparseable_date_counts_as_dropped(self, tmp_path):
        path = write(tmp_path, [row("A", "13/1/25 9:00 AM", 1), row("A", "4/1/25 9:00 AM", 2)])
        (s,), (rep,) = load_csv(path)
        assert len(s) == 1 and rep.rows_dropped == 1

    def test_report_is_json_serialisable(self, tmp_path):
        _, reports = load_csv(write(tmp_path, [row("A", "4/1/25 9:00 AM", 1)]))
        doc = json.loads(json.dumps([r.to_dict() for r in reports]))
        assert set(doc[0]) >= {"chart_id", "rows_read", "rows_dropped", "rows_deduped", "warnings"}


class TestLimitConsistency:
    def _raw(self, ucl):
        return RawRow("A", "4/1/25 9:00 AM", "1", "120", str(ucl), "100", "90", "80", "G")

    def test_constant(self):
        assert check_limit_consistency("A", [self._raw(110), self._raw(110)]) == []

    def test_change_names_chart_and_column(self):
        (w,) = check_limit_consistency("A", [self._raw(110), self._raw(112)])
        assert "A" in w and "Ucl" in w

    def test_empty(self):
        assert check_limit_consistency("A", []) == []


def test_round_trip_export_is_idempotent(tmp_path):
    rng = np.random.default_rng(3)
    lim = ControlLimits(1.5, 2.25, 3.0, 3.75, 4.5)
    original = [
        ChartSeries("A-1", "THK", lim, np.cumsum(rng.integers(60, 9000, 40)) + 1_700_000_000, rng.normal(3, 0.3, 40)),
        ChartSeries("B 2", "PMD", lim, np.cumsum(rng.integers(60, 9000, 10)) + 1_700_000_000, rng.normal(3, 0.3, 10)),
    ]
    write_csv(original, tmp_path / "a.csv")
    first, _ = load_csv(tmp_path / "a.csv")
    write_csv(first, tmp_path / "b.csv")
    second, _ = load_csv(tmp_path / "b.csv")
    assert first == original
    assert second == first
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


@settings(max_examples=40, deadline=None)
@given(
    entries=st.lists(
        st.tuples(st.integers(0, 500), st.floats(-1e6, 1e6, allow_nan=False), st.booleans()),
        min_size=1, max_size=60,
    ),
    seed=st.integers(0, 2**16),
)
def test_shuffled_input_sorted_and_accounted(tmp_path_factory, entries, seed):
    tmp = tmp_path_factory.mktemp("shuf")
    rows = []
    for minute, value, missing in entries:
        date = f"2025-04-01 {minute // 60:02d}:{minute % 60:02d}:00"
        rows.append(row("A", date, "" if missing else repr(value)))
    random.Random(seed).shuffle(rows)
    series, (rep,) = load_csv(write(tmp, rows))
    assert rep.rows_read == rep.rows_kept + rep.rows_dropped + rep.rows_deduped == len(rows)
    if series:
        assert np.all(np.diff(series[0].ds) > 0)
        assert len(series[0]) == rep.rows_kept
    else:
        assert rep.rows_kept == 0
