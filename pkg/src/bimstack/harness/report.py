"""Aggregation and rendering of harness results.

A report directory holds results.json, two CSV files, two plain-text tables,
two PNG charts, and one transcript per repetition.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .runner import CaseResult


@dataclass(frozen=True)
class CaseSummary:
    case_id: str
    repetitions: int
    steps: float
    tool_calls: float
    tool_success_rate: float
    rule_pass_rate: float
    schema_pass_rate: float
    expect_mismatches: int
    wall_clock_sec: float
    tokens_total: float | None

    def to_json(self) -> dict:
        d = {
            "case": self.case_id,
            "repetitions": self.repetitions,
            "steps": self.steps,
            "toolCalls": self.tool_calls,
            "toolSuccessRate": self.tool_success_rate,
            "rulePassRate": self.rule_pass_rate,
            "schemaPassRate": self.schema_pass_rate,
            "expectMismatches": self.expect_mismatches,
            "wallClockSec": self.wall_clock_sec,
        }
        if self.tokens_total is not None:
            d["tokensTotal"] = self.tokens_total
        return d


def _mean(values: list[float]) -> float:
    return round(sum(values) / len(values), 3)


def summarize(result: CaseResult) -> CaseSummary:
    reps = result.repetitions
    if not reps:
        raise ValueError("cannot summarize a case with no repetitions")
    tokens = [r.metrics.tokens_total for r in reps]
    return CaseSummary(
        case_id=result.case.id,
        repetitions=len(reps),
        steps=_mean([r.metrics.steps for r in reps]),
        tool_calls=_mean([r.metrics.tool_calls for r in reps]),
        tool_success_rate=_mean([r.metrics.tool_success_rate for r in reps]),
        rule_pass_rate=_mean([r.metrics.rule_pass_rate for r in reps]),
        schema_pass_rate=_mean([r.metrics.schema_pass_rate for r in reps]),
        expect_mismatches=sum(r.expect_mismatches for r in reps),
        wall_clock_sec=_mean([r.wall_clock_sec for r in reps]),
        tokens_total=None if any(t is None for t in tokens) else _mean(tokens),
    )


# --- tables -------------------------------------------------------------------


def _render_table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*headers), fmt.format(*("-" * w for w in widths))]
    lines += [fmt.format(*row) for row in rows]
    return "\n".join(lines) + "\n"


def agent_table(summaries: list[CaseSummary]) -> str:
    headers = ["Case", "Reps", "Steps", "Tool Calls", "Tool-Success Rate (%)", "Tokens"]
    rows = [
        [
            s.case_id,
            str(s.repetitions),
            f"{s.steps:.3f}",
            f"{s.tool_calls:.3f}",
            f"{s.tool_success_rate:.3f}",
            "-" if s.tokens_total is None else f"{s.tokens_total:.0f}",
        ]
        for s in summaries
    ]
    return _render_table(headers, rows)


def model_table(summaries: list[CaseSummary]) -> str:
    headers = ["Case", "Model Success (%)", "IFC Schema (%)"]
    rows = [
        [s.case_id, f"{s.rule_pass_rate:.3f}", f"{s.schema_pass_rate:.3f}"]
        for s in summaries
    ]
    return _render_table(headers, rows)


# --- CSV ----------------------------------------------------------------------


def _write_csv(path: Path, headers: list[str], rows: list[list]) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(headers)
        writer.writerows(rows)


def write_agent_csv(path: Path, summaries: list[CaseSummary]) -> None:
    _write_csv(
        path,
        ["case", "repetitions", "steps", "tool_calls", "tool_success_rate", "tokens_total"],
        [
            [s.case_id, s.repetitions, s.steps, s.tool_calls, s.tool_success_rate,
             "" if s.tokens_total is None else s.tokens_total]
            for s in summaries
        ],
    )


def write_model_csv(path: Path, summaries: list[CaseSummary]) -> None:
    _write_csv(
        path,
        ["case", "rule_pass_rate", "schema_pass_rate", "expect_mismatches"],
        [[s.case_id, s.rule_pass_rate, s.schema_pass_rate, s.expect_mismatches] for s in summaries],
    )


# --- figures --------------------------------------------------------------------


def _bar_chart(path: Path, title: str, labels: list[str], series: dict[str, list[float]], ylim=None) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(max(6, 1.8 * len(labels)), 4))
    width = 0.8 / max(len(series), 1)
    for i, (name, values) in enumerate(series.items()):
        offsets = [j + i * width for j in range(len(labels))]
        ax.bar(offsets, values, width, label=name)
    ax.set_xticks([j + width * (len(series) - 1) / 2 for j in range(len(labels))])
    ax.set_xticklabels(labels, rotation=20, ha="right")
    ax.set_title(title)
    if ylim:
        ax.set_ylim(*ylim)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_figures(out_dir: Path, summaries: list[CaseSummary]) -> list[Path]:
    labels = [s.case_id for s in summaries]
    agent_png = out_dir / "agent_metrics.png"
    model_png = out_dir / "model_metrics.png"
    _bar_chart(
        agent_png,
        "Agent metrics per case",
        labels,
        {
            "steps": [s.steps for s in summaries],
            "tool calls": [s.tool_calls for s in summaries],
            "tool-success rate (%)": [s.tool_success_rate for s in summaries],
        },
    )
    _bar_chart(
        model_png,
        "Model quality per case",
        labels,
        {
            "model success (%)": [s.rule_pass_rate for s in summaries],
            "schema pass (%)": [s.schema_pass_rate for s in summaries],
        },
        ylim=(0, 105),
    )
    return [agent_png, model_png]


# --- directory ----------------------------------------------------------------


def save_report(out_dir: str | Path, results: list[CaseResult]) -> dict:
    """Write the full report directory and return the summary payload."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summaries = [summarize(r) for r in results]

    payload = {
        "cases": [r.to_json() for r in results],
        "summary": [s.to_json() for s in summaries],
    }
    (out / "results.json").write_text(json.dumps(payload, indent=2) + "\n", "utf-8")
    (out / "agent_metrics.txt").write_text(agent_table(summaries), "utf-8")
    (out / "model_metrics.txt").write_text(model_table(summaries), "utf-8")
    write_agent_csv(out / "agent_metrics.csv", summaries)
    write_model_csv(out / "model_metrics.csv", summaries)
    write_figures(out, summaries)

    transcripts = out / "transcripts"
    transcripts.mkdir(exist_ok=True)
    for result in results:
        for i, rep in enumerate(result.repetitions):
            name = f"{result.case.id}-rep{i}.json"
            (transcripts / name).write_text(json.dumps(rep.to_json(), indent=2) + "\n", "utf-8")
    return payload
