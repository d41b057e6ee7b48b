"""Scenario harness: cases with selector rules, scripted or LLM agents."""

from .client import HarnessError, McpClient
from .runner import (
    CaseResult,
    RepetitionResult,
    RunMetrics,
    TestCase,
    bundled_case_paths,
    check_rules,
    load_case,
    run_case,
)

__all__ = [
    "HarnessError",
    "McpClient",
    "CaseResult",
    "RepetitionResult",
    "RunMetrics",
    "TestCase",
    "bundled_case_paths",
    "check_rules",
    "load_case",
    "run_case",
]
