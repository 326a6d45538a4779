"""Aggregation of externally produced coverage judgments.

Each judged item carries a discrete score: 0 (no coverage), 0.5 (partial),
or 1 (full). Producing the judgments is out of scope; this module only turns
a score file into the distribution percentages and their weighted average.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EngineError

VALID_SCORES = (0.0, 0.5, 1.0)


class EmptyInput(EngineError):
    pass


class ScoreFileError(EngineError):
    pass


@dataclass(frozen=True)
class JudgmentRecord:
    item_id: str
    score: float

    def __post_init__(self) -> None:
        if self.score not in VALID_SCORES:
            raise ScoreFileError(
                f"score for {self.item_id!r} must be one of {VALID_SCORES}, "
                f"got {self.score}"
            )


def weighted_average(pct_partial: float, pct_full: float) -> float:
    """Weighted score, in percent, from partial/full coverage percentages."""
    return 0.5 * pct_partial + 1.0 * pct_full


def weighted_coverage(records: list[JudgmentRecord]) -> dict:
    if not records:
        raise EmptyInput("no judgment records to aggregate")
    n = len(records)
    none = sum(1 for r in records if r.score == 0.0)
    partial = sum(1 for r in records if r.score == 0.5)
    full = sum(1 for r in records if r.score == 1.0)
    pct_none = 100.0 * none / n
    pct_partial = 100.0 * partial / n
    pct_full = 100.0 * full / n
    return {
        "pct_none": pct_none,
        "pct_partial": pct_partial,
        "pct_full": pct_full,
        "weighted_avg": weighted_average(pct_partial, pct_full),
    }


def read_score_file(path: str) -> list[JudgmentRecord]:
    """Read one "item_id<TAB>score" record per line."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ScoreFileError(f"cannot read scores from {path}: {exc}") from exc
    records: list[JudgmentRecord] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ScoreFileError(f"{path}:{lineno}: expected item_id<TAB>score")
        try:
            score = float(parts[1])
        except ValueError as exc:
            raise ScoreFileError(f"{path}:{lineno}: non-numeric score {parts[1]!r}") from exc
        records.append(JudgmentRecord(item_id=parts[0], score=score))
    return records
