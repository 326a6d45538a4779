"""Wall-clock and dollar estimates for LLM-based graph construction.

Stages run sequentially: API calls, result parse/insert, then a one-time
post-processing pass. Worker counts divide each stage's wall time; token
prices are config inputs, never hardcoded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import EngineError

DEFAULT_POST_PROCESSING_SECONDS = 300.0

SECONDS_PER_DAY = 86_400.0
SECONDS_PER_HOUR = 3_600.0


class CostModelError(EngineError):
    pass


@dataclass(frozen=True)
class CostModel:
    calls: int
    latency_per_call: float
    parse_insert_per_call: float = 0.0
    workers: int = 1
    price_per_1k_input_tokens: float = 0.0
    price_per_1k_output_tokens: float = 0.0
    avg_input_tokens: float = 0.0
    avg_output_tokens: float = 0.0
    post_processing_seconds: float = DEFAULT_POST_PROCESSING_SECONDS

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise CostModelError("workers must be >= 1")
        numeric = (
            self.calls,
            self.latency_per_call,
            self.parse_insert_per_call,
            self.price_per_1k_input_tokens,
            self.price_per_1k_output_tokens,
            self.avg_input_tokens,
            self.avg_output_tokens,
            self.post_processing_seconds,
        )
        if any(v < 0 for v in numeric):
            raise CostModelError("cost model fields must be non-negative")

    @classmethod
    def load(cls, path: str) -> "CostModel":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CostModelError(f"cannot load cost model {path}: {exc}") from exc
        try:
            return cls(**data)
        except TypeError as exc:
            raise CostModelError(f"bad cost model fields: {exc}") from exc


def estimate(model: CostModel) -> dict:
    api_seconds = model.calls * model.latency_per_call
    parse_seconds = model.calls * model.parse_insert_per_call
    api_wall = api_seconds / model.workers
    parse_wall = parse_seconds / model.workers
    total_wall = api_wall + parse_wall + model.post_processing_seconds
    dollars = model.calls * (
        model.avg_input_tokens / 1000.0 * model.price_per_1k_input_tokens
        + model.avg_output_tokens / 1000.0 * model.price_per_1k_output_tokens
    )
    return {
        "api_seconds": api_seconds,
        "api_wall_seconds": api_wall,
        "parse_seconds": parse_seconds,
        "parse_wall_seconds": parse_wall,
        "post_processing_seconds": model.post_processing_seconds,
        "total_wall_seconds": total_wall,
        "dollars": dollars,
    }


def as_days(seconds: float) -> float:
    return round(seconds / SECONDS_PER_DAY, 1)


def as_hours(seconds: float) -> float:
    return round(seconds / SECONDS_PER_HOUR, 1)


def _humanize(seconds: float) -> str:
    if seconds >= SECONDS_PER_DAY:
        return f"~{as_days(seconds)} days"
    if seconds >= SECONDS_PER_HOUR:
        return f"~{as_hours(seconds)} hours"
    return f"~{round(seconds / 60.0, 1)} minutes"


def format_table(model: CostModel) -> str:
    """Render the estimate as an aligned text table."""
    est = estimate(model)
    w = model.workers
    rows = [
        ("Processing Step", "Workload", "No Parallel", f"{w} Workers in Parallel"),
        (
            "API Calls",
            f"{model.calls:,} x {model.latency_per_call} s = {est['api_seconds']:,.0f} s",
            _humanize(est["api_seconds"]),
            _humanize(est["api_seconds"] / w),
        ),
        (
            "Result Parse and Insert",
            f"{model.calls:,} x {model.parse_insert_per_call} s = {est['parse_seconds']:,.0f} s",
            _humanize(est["parse_seconds"]),
            _humanize(est["parse_seconds"] / w),
        ),
        (
            "Graph Post-processing",
            f"One time {_humanize(model.post_processing_seconds)}",
            _humanize(model.post_processing_seconds),
            _humanize(model.post_processing_seconds),
        ),
        (
            "Total",
            "",
            _humanize(
                est["api_seconds"] + est["parse_seconds"] + model.post_processing_seconds
            ),
            _humanize(est["total_wall_seconds"]),
        ),
    ]
    widths = [max(len(row[i]) for row in rows) for i in range(4)]
    lines = [
        "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
        for row in rows
    ]
    if est["dollars"] > 0:
        lines.append(f"Estimated API spend: ${est['dollars']:,.2f}")
    return "\n".join(lines)
