"""Command-line interface.

Subcommands: ingest, fit, predict, evaluate, replay, plot.  Settings are
resolved as command-line flags > config file > defaults; the config file is
``--config PATH`` or the ``PROCSPC_CONFIG`` environment variable and holds
``key = value`` lines using the long flag names (``n-changepoints = 10``).

Exit codes: 0 ok, 2 Critical forecast with ``--fail-on critical``, 3 any
non-Pass forecast with ``--fail-on at_risk``, 64 usage error, 65 data error,
74 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import ChartSeries, ControlLimits, format_timestamp
from .errors import DataError, IoError, MalformedModelError
from .evaluation import evaluate_chart_detailed, replay
from .forecaster import ModelConfig, deserialize_model, fit, median_gap, predict, serialize_model
from .ingest import load_csv
from .plot import PlotSpec, chart_filename, render_chart, render_decomposition
from .spc import classify, decision_label

logger = logging.getLogger("procspc")

EX_OK = 0
EX_CRITICAL = 2
EX_AT_RISK = 3
EX_USAGE = 64
EX_DATAERR = 65
EX_IOERR = 74

MODEL_FORMAT = "procspc-chart-model"
CONFIG_ENV = "PROCSPC_CONFIG"

# flag name -> (type, default)
SETTINGS = {
    "input": (str, None),
    "charts": (str, None),
    "model-dir": (str, None),
    "report-dir": (str, None),
    "out-dir": (str, None),
    "train-fraction": (float, 0.8),
    "n-changepoints": (int, 25),
    "changepoint-range": (float, 0.8),
    "weekly-order": (int, 3),
    "yearly-order": (int, 10),
    "trend-penalty": (float, 1.0),
    "seasonal-penalty": (float, 0.01),
    "interval-width": (float, 0.8),
    "fail-on": (str, "never"),
    "jobs": (int, 1),
    "min-train": (int, 20),
    "refit-stride": (int, 1),
    "horizon": (int, 1),
    "width": (int, 1200),
    "height": (int, 700),
}
BOOL_FLAGS = ("no-interval", "no-zones")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    input_csv: str | None
    chart_filter: list[str] | None
    model_dir: str | None
    report_dir: str | None
    out_dir: str | None
    model_config: ModelConfig
    train_fraction: float = 0.8
    fail_on: str = "never"
    jobs: int = 1
    min_train: int = 20
    refit_stride: int = 1
    horizon: int = 1
    plot_spec: PlotSpec = field(default_factory=PlotSpec)


def read_config_file(path: str) -> dict[str, str]:
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("_", "-").lower()
        if key not in SETTINGS and key not in BOOL_FLAGS:
            raise UsageError(f"{path}:{lineno}: unknown setting {key!r}")
        values[key] = value
    return values


def _truthy(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes", "on")


def resolve_settings(args: argparse.Namespace) -> RunConfig:
    config_path = args.config or os.environ.get(CONFIG_ENV)
    file_values = read_config_file(config_path) if config_path else {}
    merged = {}
    for key, (kind, default) in SETTINGS.items():
        flag_value = getattr(args, key.replace("-", "_"), None)
        if flag_value is not None:
            merged[key] = flag_value
        elif key in file_values:
            try:
                merged[key] = kind(file_values[key])
            except ValueError:
                raise UsageError(f"config value for {key} is not a valid {kind.__name__}") from None
        else:
            merged[key] = default
    for key in BOOL_FLAGS:
        merged[key] = bool(getattr(args, key.replace("-", "_"), False)) or _truthy(file_values.get(key, "0"))

    if merged["fail-on"] not in ("never", "critical", "at_risk"):
        raise UsageError("--fail-on must be one of never, critical, at_risk")
    if not 0 < merged["train-fraction"] < 1:
        raise UsageError("--train-fraction must lie in (0, 1)")
    for key in ("jobs", "horizon", "refit-stride"):
        if merged[key] < 1:
            raise UsageError(f"--{key} must be >= 1")
    try:
        model_config = ModelConfig(
            n_changepoints=merged["n-changepoints"],
            changepoint_range=merged["changepoint-range"],
            trend_penalty=merged["trend-penalty"],
            seasonal_penalty=merged["seasonal-penalty"],
            interval_width=merged["interval-width"],
        ).with_orders(weekly=merged["weekly-order"], yearly=merged["yearly-order"])
        plot_spec = PlotSpec(merged["width"], merged["height"],
                             show_interval=not merged["no-interval"], zone_shading=not merged["no-zones"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    charts = merged["charts"]
    return RunConfig(
        input_csv=merged["input"],
        chart_filter=[c.strip() for c in charts.split(",") if c.strip()] if charts else None,
        model_dir=merged["model-dir"],
        report_dir=merged["report-dir"],
        out_dir=merged["out-dir"],
        model_config=model_config,
        train_fraction=merged["train-fraction"],
        fail_on=merged["fail-on"],
        jobs=merged["jobs"],
        min_train=merged["min-train"],
        refit_stride=merged["refit-stride"],
        horizon=merged["horizon"],
        plot_spec=plot_spec,
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"key=value settings file (default: ${CONFIG_ENV})")
    for key, (kind, default) in SETTINGS.items():
        common.add_argument(f"--{key}", type=kind, default=None,
                            help=f"default: {default}" if default is not None else None)
    for key in BOOL_FLAGS:
        common.add_argument(f"--{key}", action="store_true", default=None)

    parser = _Parser(prog="procspc", description="Proactive SPC forecasting engine")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    helps = {
        "ingest": "load and clean a CSV export; print the cleaning report",
        "fit": "fit one model per chart and write model files",
        "predict": "forecast the next value(s) of each fitted chart and print SPC decisions",
        "evaluate": "80/20 chronological evaluation with MSE, RMSE, R2 and SPC decision accuracy",
        "replay": "one-step-ahead replay with alarm lead times",
        "plot": "render control-chart and component SVGs",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


# -- helpers ---------------------------------------------------------------

def _require(value, flag):
    if not value:
        raise UsageError(f"{flag} is required for this command")
    return value


def _ensure_dir(path):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create directory {path}: {exc}") from exc


def _write_text(path, text):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=False) + "\n"


def _load_series(run: RunConfig) -> list[ChartSeries]:
    path = _require(run.input_csv, "--input")
    try:
        series_list, _ = load_csv(path)
    except FileNotFoundError as exc:
        raise IoError(f"input file not found: {path}") from exc
    except OSError as exc:
        raise IoError(str(exc)) from exc
    if run.chart_filter:
        wanted = set(run.chart_filter)
        series_list = [s for s in series_list if s.chart_id in wanted]
        missing = wanted - {s.chart_id for s in series_list}
        if missing:
            logger.warning("charts not found in input: %s", ", ".join(sorted(missing)))
    return series_list


def _map_charts(run: RunConfig, func, items):
    """Apply ``func`` to every item, collecting (item, result, error) in input order."""
    def safe(item):
        try:
            return item, func(item), None
        except DataError as exc:
            return item, None, exc

    if run.jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=run.jobs) as pool:
            return list(pool.map(safe, items))
    return [safe(item) for item in items]


def _skip_report(results) -> list[dict]:
    return [
        {"chart_id": getattr(item, "chart_id", str(item)), "error": type(err).__name__, "message": str(err)}
        for item, _, err in results if err is not None
    ]


def _finish(skipped: list[dict], code: int = EX_OK) -> int:
    if skipped:
        sys.stderr.write(_dump({"skipped": skipped}))
        if code == EX_OK:
            return EX_DATAERR
    return code


def chart_model_document(series: ChartSeries, model) -> dict:
    return {
        "format": MODEL_FORMAT,
        "chart": {
            "chart_id": series.chart_id,
            "group": series.group,
            "limits": series.limits.as_dict(),
            "n_points": len(series),
            "last_ds": int(series.ds[-1]),
            "median_gap": median_gap(series.ds),
        },
        "model": serialize_model(model),
    }


def read_chart_model(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedModelError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise MalformedModelError(f"{path}: not a procspc chart model file")
    try:
        chart = doc["chart"]
        limits = ControlLimits(**{k: float(v) for k, v in chart["limits"].items()})
        info = {"chart_id": str(chart["chart_id"]), "group": str(chart["group"]), "limits": limits,
                "last_ds": int(chart["last_ds"]), "median_gap": int(chart["median_gap"])}
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedModelError(f"{path}: bad chart section ({exc})") from exc
    return info, deserialize_model(doc["model"])


def forecast_steps(last_ds: int, gap: int, horizon: int) -> list[int]:
    return [last_ds + gap * h for h in range(1, horizon + 1)]


# -- commands --------------------------------------------------------------

def cmd_ingest(run: RunConfig) -> int:
    path = _require(run.input_csv, "--input")
    try:
        _, reports = load_csv(path)
    except FileNotFoundError as exc:
        raise IoError(f"input file not found: {path}") from exc
    if run.chart_filter:
        reports = [r for r in reports if r.chart_id in set(run.chart_filter)]
    sys.stdout.write(_dump([r.to_dict() for r in reports]))
    return EX_OK


def cmd_fit(run: RunConfig) -> int:
    model_dir = _require(run.model_dir, "--model-dir")
    series_list = _load_series(run)
    _ensure_dir(model_dir)

    def work(series):
        model = fit(series, run.model_config)
        path = os.path.join(model_dir, chart_filename(series.chart_id, ".json"))
        _write_text(path, _dump(chart_model_document(series, model)))
        return path

    results = _map_charts(run, work, series_list)
    for series, path, err in results:
        if err is None:
            sys.stdout.write(f"{series.chart_id},{len(series)},{path}\n")
    return _finish(_skip_report(results))


def cmd_predict(run: RunConfig) -> int:
    model_dir = _require(run.model_dir, "--model-dir")
    try:
        files = sorted(f for f in os.listdir(model_dir) if f.endswith(".json"))
    except OSError as exc:
        raise IoError(f"cannot list {model_dir}: {exc}") from exc
    entries = [read_chart_model(os.path.join(model_dir, f)) for f in files]
    if run.chart_filter:
        entries = [e for e in entries if e[0]["chart_id"] in set(run.chart_filter)]
    if not entries:
        raise DataError(f"no chart models found in {model_dir}")

    worst = 0
    for info, model in entries:
        steps = forecast_steps(info["last_ds"], info["median_gap"], run.horizon)
        for fc in predict(model, steps):
            zone = classify(fc.yhat, info["limits"])
            worst = max(worst, zone.severity)
            sys.stdout.write(
                f"{info['chart_id']},{format_timestamp(fc.ds)},{fc.yhat!r},{fc.yhat_lower!r},"
                f"{fc.yhat_upper!r},{decision_label(zone)}\n"
            )
    if run.fail_on == "critical" and worst >= 2:
        return EX_CRITICAL
    if run.fail_on == "at_risk" and worst >= 1:
        return EX_AT_RISK
    return EX_OK


def cmd_evaluate(run: RunConfig) -> int:
    report_dir = _require(run.report_dir, "--report-dir")
    series_list = _load_series(run)
    _ensure_dir(report_dir)

    def work(series):
        report, model, train, test = evaluate_chart_detailed(series, run.model_config, run.train_fraction)
        base = os.path.join(report_dir, chart_filename(series.chart_id, ""))
        _write_text(base + ".json", _dump(report.to_dict()))
        _write_text(base + ".csv", report.to_csv())
        render_chart(series, predict(model, test.ds), series.limits, run.plot_spec, base + ".svg")
        return report

    results = _map_charts(run, work, series_list)
    summary = [
        {k: v for k, v in report.to_dict().items() if k != "rows"}
        for _, report, err in results if err is None
    ]
    _write_text(os.path.join(report_dir, "summary.json"), _dump(summary))
    sys.stdout.write(_dump(summary))
    return _finish(_skip_report(results))


def cmd_replay(run: RunConfig) -> int:
    series_list = _load_series(run)
    if run.report_dir:
        _ensure_dir(run.report_dir)

    def work(series):
        log = replay(series, run.model_config, run.min_train, run.refit_stride).alarms.to_dict()
        if run.report_dir:
            path = os.path.join(run.report_dir, chart_filename(series.chart_id, "_replay.json"))
            _write_text(path, _dump(log))
        return log

    results = _map_charts(run, work, series_list)
    sys.stdout.write(_dump([log for _, log, err in results if err is None]))
    return _finish(_skip_report(results))


def cmd_plot(run: RunConfig) -> int:
    out_dir = _require(run.out_dir, "--out-dir")
    series_list = _load_series(run)
    _ensure_dir(out_dir)

    def work(series):
        if run.model_dir:
            path = os.path.join(run.model_dir, chart_filename(series.chart_id, ".json"))
            if not os.path.exists(path):
                raise DataError(f"no model file for chart {series.chart_id} in {run.model_dir}")
            _, model = read_chart_model(path)
        else:
            model = fit(series, run.model_config)
        steps = forecast_steps(int(series.ds[-1]), median_gap(series.ds), run.horizon)
        forecasts = predict(model, steps)
        base = os.path.join(out_dir, chart_filename(series.chart_id, ""))
        render_chart(series, forecasts, series.limits, run.plot_spec, base + ".svg")
        render_decomposition(model, np.concatenate([series.ds, steps]), base + "_components.svg",
                             run.plot_spec, title=series.chart_id)
        return base + ".svg"

    results = _map_charts(run, work, series_list)
    for series, path, err in results:
        if err is None:
            sys.stdout.write(f"{series.chart_id},{path}\n")
    return _finish(_skip_report(results))


COMMANDS = {
    "ingest": cmd_ingest,
    "fit": cmd_fit,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "replay": cmd_replay,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help or a usage error
        return exc.code if isinstance(exc.code, int) else EX_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        run = resolve_settings(args)
        return COMMANDS[args.command](run)
    except UsageError as exc:
        sys.stderr.write(f"procspc: usage error: {exc}\n")
        return EX_USAGE
    except (DataError, MalformedModelError) as exc:
        sys.stderr.write(_dump({"error": type(exc).__name__, "message": str(exc)}))
        return EX_DATAERR
    except OSError as exc:
        sys.stderr.write(f"procspc: I/O error: {exc}\n")
        return EX_IOERR


if __name__ == "__main__":
    sys.exit(main())
