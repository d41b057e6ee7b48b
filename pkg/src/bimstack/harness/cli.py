"""Command line front end for the evaluation harness."""

from __future__ import annotations

import sys
from pathlib import Path
from urllib.parse import quote

import click
import requests

from ..ifc.spf import SpfParseError, parse_spf
from .client import HarnessError
from .report import agent_table, model_table, save_report, summarize
from .runner import check_rules, load_case, run_case


@click.group()
def harness() -> None:
    """Run scripted or live-agent evaluation cases against an MCP server."""


@harness.command()
@click.option("--case", "case_paths", multiple=True, required=True, type=click.Path(exists=True), help="Case file (repeatable).")
@click.option("--reps", default=5, show_default=True, help="Repetitions per case.")
@click.option("--agent", type=click.Choice(["scripted", "llm"]), default="scripted", show_default=True)
@click.option("--out", "out_dir", type=click.Path(), default=None, help="Report directory (tables, CSV, figures, transcripts).")
@click.option("--mcp-url", envvar="MCP_URL", required=True, help="MCP server base URL [env MCP_URL].")
@click.option("--store-url", envvar="STORE_URL", required=True, help="Object store base URL [env STORE_URL].")
@click.option("--parallel", is_flag=True, help="Run repetitions concurrently.")
def run(case_paths, reps, agent, out_dir, mcp_url, store_url, parallel) -> None:
    """Run cases and print the metric tables."""
    try:
        cases = [load_case(p) for p in case_paths]
        results = [
            run_case(c, mcp_url, store_url, repetitions=reps, agent=agent, parallel=parallel)
            for c in cases
        ]
    except HarnessError as exc:
        raise click.ClickException(str(exc)) from exc

    summaries = [summarize(r) for r in results]
    click.echo(agent_table(summaries))
    click.echo(model_table(summaries))
    if out_dir:
        save_report(out_dir, results)
        click.echo(f"report written to {out_dir}")

    clean = all(s.rule_pass_rate == 100.0 for s in summaries) and all(
        s.expect_mismatches == 0 for s in summaries
    )
    if not clean:
        sys.exit(1)


def _fetch_model(model: str, store_url: str | None) -> bytes:
    """Accept either a local file path or a bucket/key@versionId store ref."""
    path = Path(model)
    if path.exists():
        return path.read_bytes()
    if "@" in model and "/" in model.split("@", 1)[0]:
        if not store_url:
            raise click.ClickException("a store ref needs --store-url or STORE_URL")
        loc, version_id = model.rsplit("@", 1)
        bucket, key = loc.split("/", 1)
        url = (
            f"{store_url.rstrip('/')}/viewer/download?bucket={quote(bucket, safe='')}"
            f"&key={quote(key, safe='')}&versionId={quote(version_id, safe='')}"
        )
        resp = requests.get(url, timeout=120)
        if resp.status_code != 200:
            raise click.ClickException(f"download failed: HTTP {resp.status_code}")
        return resp.content
    raise click.ClickException(f"no such file and not a bucket/key@versionId ref: {model}")


@harness.command()
@click.option("--model", required=True, help="Local model file, or bucket/key@versionId.")
@click.option("--case", "case_path", required=True, type=click.Path(exists=True))
@click.option("--store-url", envvar="STORE_URL", default=None, help="Object store base URL [env STORE_URL].")
def check(model, case_path, store_url) -> None:
    """Evaluate one case's rules against an existing model."""
    case = load_case(case_path)
    data = _fetch_model(model, store_url)
    try:
        parsed = parse_spf(data.decode("utf-8"))
    except (SpfParseError, UnicodeDecodeError) as exc:
        raise click.ClickException(f"cannot parse model: {exc}") from exc

    outcomes = check_rules(parsed, case.rules)
    for rule, outcome in zip(case.rules, outcomes):
        mark = "PASS" if outcome["passed"] else "FAIL"
        click.echo(f"{mark}  {rule.check} {rule.selector!r}: {outcome['detail']}")
    if not all(o["passed"] for o in outcomes):
        sys.exit(1)


main = harness

if __name__ == "__main__":
    harness()
