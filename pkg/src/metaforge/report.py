"""File renderings of comparison reports and iteration histories.

The CLI report path writes a CSV next to a PNG figure for each artifact:
`score` gets a matched-vs-total bar chart, `run-scenario` gets the
token/latency profile across iterations. matplotlib is imported lazily so
library users who never render figures don't pay for it.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

from .evaluation import ComparisonReport
from .pipeline import IterationRecord


def write_report_csv(report: ComparisonReport, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["category", "matched", "total", "missing", "extra"])
        for label, score in report.categories():
            writer.writerow([
                label, score.matched, score.total,
                ";".join(score.missing), ";".join(score.extra),
            ])


def write_history_csv(records: Sequence[IterationRecord], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["step", "requirements", "prompt_tokens", "completion_tokens",
                         "tokens", "wall_seconds"])
        for record in records:
            writer.writerow([
                record.step, record.requirement_count, record.prompt_tokens,
                record.completion_tokens, record.tokens, f"{record.wall_seconds:.3f}",
            ])


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_report_figure(report: ComparisonReport, path: str | Path) -> None:
    """Grouped bar chart of matched vs total per category."""
    plt = _pyplot()
    labels = [label for label, _ in report.categories()]
    matched = [score.matched for _, score in report.categories()]
    totals = [score.total for _, score in report.categories()]

    fig, ax = plt.subplots(figsize=(7, 4))
    positions = range(len(labels))
    ax.bar([p - 0.2 for p in positions], totals, width=0.4, label="reference total", color="#b0c4d8")
    ax.bar([p + 0.2 for p in positions], matched, width=0.4, label="matched", color="#2a6f97")
    for p, (m, t) in enumerate(zip(matched, totals)):
        ax.annotate(f"{m}/{t}", (p, max(m, t)), textcoords="offset points",
                    xytext=(0, 4), ha="center", fontsize=9)
    ax.set_xticks(list(positions))
    ax.set_xticklabels(labels, rotation=15, ha="right")
    ax.set_ylabel("elements")
    ax.set_title("candidate vs reference")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_history_figure(records: Sequence[IterationRecord], path: str | Path) -> None:
    """Tokens per iteration as bars with wall time on a twin axis."""
    plt = _pyplot()
    labels = [f"{i}:{r.step}" for i, r in enumerate(records)]
    tokens = [r.tokens for r in records]
    seconds = [r.wall_seconds for r in records]

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(range(len(records)), tokens, width=0.6, color="#2a6f97", label="tokens")
    ax.set_xticks(range(len(records)))
    ax.set_xticklabels(labels, rotation=15, ha="right")
    ax.set_ylabel("tokens")
    twin = ax.twinx()
    twin.plot(range(len(records)), seconds, color="#c1121f", marker="o", label="wall seconds")
    twin.set_ylabel("seconds")
    ax.set_title("iteration cost")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report_outputs(report: ComparisonReport, directory: str | Path) -> tuple[Path, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = directory / "report.csv"
    fig_path = directory / "report.png"
    write_report_csv(report, csv_path)
    render_report_figure(report, fig_path)
    return csv_path, fig_path


def write_history_outputs(records: Sequence[IterationRecord], directory: str | Path) -> tuple[Path, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = directory / "history.csv"
    fig_path = directory / "history.png"
    write_history_csv(records, csv_path)
    render_history_figure(records, fig_path)
    return csv_path, fig_path
