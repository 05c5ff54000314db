#!/usr/bin/env python3
"""Render percentile-band figures from an experiment results CSV.

Reads the summary CSV written by the experiment runner (columns
``experiment,method,param_name,param_value,metric,p25,p50,p75``) and writes
one figure per (experiment, metric) pair: the median as a line and the
25th-75th percentile range as a shaded band, single-scale in red and
multiscale in blue.  Bias-ratio axes are shown as percentages.

Usage:
    plots.py --in results.csv --out-dir figs --format svg [--log-x]

Exit codes: 0 on success (including an empty CSV, which renders nothing and
warns), 1 when the CSV is malformed (the message names the first bad row).
"""

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

HEADER = ["experiment", "method", "param_name", "param_value", "metric",
          "p25", "p50", "p75"]
METHOD_COLORS = {"single": "red", "multi": "blue"}
METHOD_LABELS = {"single": "single-scale", "multi": "multiscale"}
METRICS = ("mse", "bias_ratio")
METRIC_LABELS = {"mse": "MSE", "bias_ratio": "bias ratio (%)"}


def parse_rows(path):
    """Parse and validate the results CSV; raises ValueError naming the
    first malformed row (1-based file line)."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].split(",") != HEADER:
        raise ValueError("row 1: expected header " + ",".join(HEADER))
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(HEADER):
            raise ValueError(f"row {line_no}: expected {len(HEADER)} fields")
        experiment, method, param_name, value, metric, p25, p50, p75 = parts
        if method not in METHOD_COLORS:
            raise ValueError(f"row {line_no}: unknown method {method!r}")
        if metric not in METRICS:
            raise ValueError(f"row {line_no}: unknown metric {metric!r}")
        try:
            value, p25, p50, p75 = (float(v) for v in (value, p25, p50, p75))
        except ValueError:
            raise ValueError(f"row {line_no}: non-numeric field") from None
        if not p25 <= p50 <= p75:
            raise ValueError(f"row {line_no}: percentiles out of order")
        rows.append(
            dict(experiment=experiment, method=method, param_name=param_name,
                 param_value=value, metric=metric, p25=p25, p50=p50, p75=p75)
        )
    return rows


def build_figure(rows, experiment, metric, log_x=False):
    """Build the two-series percentile-band figure for one metric."""
    scale = 100.0 if metric == "bias_ratio" else 1.0
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for method in ("single", "multi"):
        series = sorted(
            (r for r in rows if r["method"] == method),
            key=lambda r: r["param_value"],
        )
        if not series:
            continue
        x = [r["param_value"] for r in series]
        color = METHOD_COLORS[method]
        ax.fill_between(
            x,
            [r["p25"] * scale for r in series],
            [r["p75"] * scale for r in series],
            color=color,
            alpha=0.25,
            linewidth=0,
        )
        ax.plot(
            x,
            [r["p50"] * scale for r in series],
            color=color,
            marker="o",
            label=METHOD_LABELS[method],
        )
    if log_x:
        ax.set_xscale("log")
    ax.set_xlabel(rows[0]["param_name"])
    ax.set_ylabel(METRIC_LABELS[metric])
    ax.set_title(experiment)
    ax.legend()
    fig.tight_layout()
    return fig


def render(input_path, out_dir, fmt="svg", log_x=False):
    """Render one figure per (experiment, metric); returns written paths."""
    rows = parse_rows(input_path)
    out_dir = Path(out_dir)
    if not rows:
        print("warning: no data rows, nothing to render", file=sys.stderr)
        return []
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    pairs = sorted({(r["experiment"], r["metric"]) for r in rows})
    for experiment, metric in pairs:
        group = [
            r for r in rows
            if r["experiment"] == experiment and r["metric"] == metric
        ]
        fig = build_figure(group, experiment, metric, log_x=log_x)
        path = out_dir / f"{experiment}_{metric}.{fmt}"
        fig.savefig(path)
        plt.close(fig)
        written.append(str(path))
    return written


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="Render percentile-band figures from a results CSV."
    )
    parser.add_argument("--in", dest="input", required=True, help="results CSV")
    parser.add_argument("--out-dir", required=True, help="output directory")
    parser.add_argument("--format", choices=("svg", "png"), default="svg")
    parser.add_argument("--log-x", action="store_true",
                        help="logarithmic x axis (for SNR sweeps)")
    args = parser.parse_args(argv)
    try:
        written = render(args.input, args.out_dir, args.format, args.log_x)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
