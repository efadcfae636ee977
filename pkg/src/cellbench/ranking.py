"""Leaderboards from per-case F1 and runtime under five ranking schemes.

Teams are scored on two metrics per case (F1, effective runtime). The
primary scheme ranks teams per case and metric, averages the ranks, and
normalizes by the number of teams; the alternates aggregate first or count
significant pairwise wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.stats import rankdata

RuntimeMode = Literal["subtract_floor", "hard_cap"]
Scheme = Literal[
    "rank_then_mean",
    "rank_then_median",
    "mean_then_rank",
    "median_then_rank",
    "test_based",
]

SCHEMES: tuple[str, ...] = (
    "rank_then_mean",
    "rank_then_median",
    "mean_then_rank",
    "median_then_rank",
    "test_based",
)

TOLERANCE_BASE_SECONDS = 10.0
TOLERANCE_BASE_PIXELS = 1_000_000

DEFAULT_ALPHA = 0.05

# below this many shared cases no one-sided pair test is accepted
MIN_TEST_CASES = 6


@dataclass(frozen=True)
class RunRecord:
    """One team's result on one case."""

    team_id: str
    case_id: str
    f1: float
    runtime_seconds: float = 0.0
    pixel_count: int = TOLERANCE_BASE_PIXELS

    def __post_init__(self):
        if self.runtime_seconds < 0:
            raise ValueError("runtime_seconds must be >= 0")
        if self.pixel_count < 1:
            raise ValueError("pixel_count must be >= 1")


def tolerance_seconds(pixel_count: int) -> float:
    """Per-image runtime allowance: 10 s per million pixels, minimum 10 s."""
    if pixel_count < 1:
        raise ValueError("pixel_count must be >= 1")
    if pixel_count <= TOLERANCE_BASE_PIXELS:
        return TOLERANCE_BASE_SECONDS
    return pixel_count / TOLERANCE_BASE_PIXELS * TOLERANCE_BASE_SECONDS


def effective_runtime(record: RunRecord, mode: RuntimeMode = "subtract_floor") -> float:
    """Runtime after applying the tolerance.

    ``subtract_floor`` subtracts the tolerance and floors at zero, so
    sub-tolerance differences collapse to ties. ``hard_cap`` keeps the raw
    runtime when within tolerance and returns +inf (worst possible) when the
    limit is exceeded.
    """
    tol = tolerance_seconds(record.pixel_count)
    if mode == "subtract_floor":
        return max(record.runtime_seconds - tol, 0.0)
    if mode == "hard_cap":
        return record.runtime_seconds if record.runtime_seconds <= tol else math.inf
    raise ValueError(f"unknown runtime mode: {mode}")


@dataclass
class RankingTable:
    """Per-case, per-team metric matrices.

    ``f1_matrix`` and ``runtime_matrix`` are (teams, cases); entries flagged
    in ``missing_mask`` are ignored except for the worst-rank convention.
    Runtime values are used exactly as stored; apply ``effective_runtime``
    when building the table if tolerance handling is wanted.
    """

    teams: list[str]
    cases: list[str]
    f1_matrix: np.ndarray
    runtime_matrix: np.ndarray
    missing_mask: np.ndarray

    def __post_init__(self):
        k, n = len(self.teams), len(self.cases)
        for name in ("f1_matrix", "runtime_matrix", "missing_mask"):
            m = np.asarray(getattr(self, name))
            if m.shape != (k, n):
                raise ValueError(f"{name} must have shape ({k}, {n}), got {m.shape}")
        self.f1_matrix = np.asarray(self.f1_matrix, np.float64)
        self.runtime_matrix = np.asarray(self.runtime_matrix, np.float64)
        self.missing_mask = np.asarray(self.missing_mask, bool)

    @classmethod
    def from_records(
        cls, records: list[RunRecord], runtime_mode: RuntimeMode | None = "subtract_floor"
    ) -> "RankingTable":
        """Assemble a table from run records.

        ``runtime_mode=None`` stores raw runtimes; otherwise effective
        runtimes are stored. (team, case) combinations without a record are
        flagged missing.
        """
        teams = sorted({r.team_id for r in records})
        cases = sorted({r.case_id for r in records})
        ti = {t: i for i, t in enumerate(teams)}
        ci = {c: i for i, c in enumerate(cases)}
        k, n = len(teams), len(cases)
        f1 = np.zeros((k, n))
        rt = np.zeros((k, n))
        missing = np.ones((k, n), bool)
        for r in records:
            i, j = ti[r.team_id], ci[r.case_id]
            f1[i, j] = r.f1
            rt[i, j] = r.runtime_seconds if runtime_mode is None else effective_runtime(r, runtime_mode)
            missing[i, j] = False
        return cls(teams=teams, cases=cases, f1_matrix=f1, runtime_matrix=rt, missing_mask=missing)

    def resample_cases(self, case_indices) -> "RankingTable":
        """Table restricted to (possibly repeated) case indices."""
        idx = np.asarray(case_indices, np.intp)
        return RankingTable(
            teams=self.teams,
            cases=[self.cases[i] for i in idx],
            f1_matrix=self.f1_matrix[:, idx],
            runtime_matrix=self.runtime_matrix[:, idx],
            missing_mask=self.missing_mask[:, idx],
        )


@dataclass
class LeaderBoard:
    """Final scores and competition ranks for one scheme."""

    scheme: str
    scores: dict[str, float]
    ranks: dict[str, int]
    metadata: dict = field(default_factory=dict)


def competition_ranks(teams: list[str], scores: np.ndarray, higher_better: bool = False) -> dict[str, int]:
    """Competition ("1224") ranking: ties share a rank, next rank skips."""
    scores = np.asarray(scores, np.float64)
    ranks = rankdata(-scores if higher_better else scores, method="min")
    return {t: int(r) for t, r in zip(teams, ranks)}


def per_case_ranks(table: RankingTable) -> np.ndarray:
    """Fractional per-case ranks, (teams, 2N).

    Column 2j ranks case j by F1 descending, column 2j+1 by runtime
    ascending. Ties get the average rank; missing entries are ranked as the
    worst value (tied among themselves), so each column still sums to
    K(K+1)/2.
    """
    k, n = len(table.teams), len(table.cases)
    if k < 2:
        raise ValueError("ranking requires at least 2 teams")
    if n < 1:
        raise ValueError("ranking requires at least 1 case")
    f1 = np.where(table.missing_mask, -np.inf, table.f1_matrix)
    rt = np.where(table.missing_mask, np.inf, table.runtime_matrix)
    f1_ranks = rankdata(-f1, method="average", axis=0)
    rt_ranks = rankdata(rt, method="average", axis=0)
    out = np.empty((k, 2 * n))
    out[:, 0::2] = f1_ranks
    out[:, 1::2] = rt_ranks
    return out


def rank_then_aggregate(table: RankingTable, agg: Literal["mean", "median"] = "mean") -> LeaderBoard:
    """Rank per case and metric, aggregate the 2N ranks, normalize by K."""
    ranks = per_case_ranks(table)
    k = len(table.teams)
    if agg == "mean":
        agg_ranks = ranks.mean(axis=1)
    elif agg == "median":
        agg_ranks = np.median(ranks, axis=1)
    else:
        raise ValueError(f"unknown aggregation: {agg}")
    scores = agg_ranks / k
    return LeaderBoard(
        scheme=f"rank_then_{agg}",
        scores={t: float(s) for t, s in zip(table.teams, scores)},
        ranks=competition_ranks(table.teams, scores),
        metadata={"aggregation": agg},
    )


def aggregate_then_rank(table: RankingTable, agg: Literal["mean", "median"] = "mean") -> LeaderBoard:
    """Aggregate each metric across cases first, then rank the aggregates.

    The two per-metric ranks are averaged into the final score. Missing
    cases are excluded from a team's aggregate.
    """
    if len(table.teams) < 2:
        raise ValueError("ranking requires at least 2 teams")
    if len(table.cases) < 1:
        raise ValueError("ranking requires at least 1 case")
    if agg not in ("mean", "median"):
        raise ValueError(f"unknown aggregation: {agg}")
    f1 = np.ma.masked_array(table.f1_matrix, table.missing_mask)
    rt = np.ma.masked_array(table.runtime_matrix, table.missing_mask)
    if agg == "mean":
        f1_agg = f1.mean(axis=1)
        rt_agg = rt.mean(axis=1)
    else:
        f1_agg = np.ma.median(f1, axis=1)
        rt_agg = np.ma.median(rt, axis=1)
    f1_agg = f1_agg.filled(-np.inf)
    rt_agg = rt_agg.filled(np.inf)
    f1_rank = rankdata(-f1_agg, method="average")
    rt_rank = rankdata(rt_agg, method="average")
    scores = (f1_rank + rt_rank) / 2.0
    return LeaderBoard(
        scheme=f"{agg}_then_rank",
        scores={t: float(s) for t, s in zip(table.teams, scores)},
        ranks=competition_ranks(table.teams, scores),
        metadata={"aggregation": agg},
    )


def test_based_rank(table: RankingTable, alpha: float = DEFAULT_ALPHA) -> LeaderBoard:
    """Rank by the number of significant one-sided pairwise wins on F1.

    Each ordered pair is compared with a one-sided Wilcoxon signed rank test
    on paired per-case F1; a win counts when p < alpha. Equal win counts
    share a rank.
    """
    from .stats import wilcoxon_one_sided_p  # local import avoids cycle

    k = len(table.teams)
    if k < 2:
        raise ValueError("ranking requires at least 2 teams")
    wins = np.zeros(k, np.int64)
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            shared = ~table.missing_mask[i] & ~table.missing_mask[j]
            if int(shared.sum()) < MIN_TEST_CASES:
                raise ValueError(
                    f"insufficient shared cases between {table.teams[i]} and "
                    f"{table.teams[j]} ({int(shared.sum())} < {MIN_TEST_CASES})"
                )
            diffs = table.f1_matrix[i, shared] - table.f1_matrix[j, shared]
            if not np.any(diffs != 0):
                continue  # identical scores: not significant
            if wilcoxon_one_sided_p(diffs) < alpha:
                wins[i] += 1
    return LeaderBoard(
        scheme="test_based",
        scores={t: float(wv) for t, wv in zip(table.teams, wins)},
        ranks=competition_ranks(table.teams, wins.astype(np.float64), higher_better=True),
        metadata={"alpha": alpha},
    )


def build_leaderboard(table: RankingTable, scheme: Scheme, alpha: float = DEFAULT_ALPHA) -> LeaderBoard:
    """Dispatch to one of the five ranking schemes."""
    if scheme == "rank_then_mean":
        return rank_then_aggregate(table, "mean")
    if scheme == "rank_then_median":
        return rank_then_aggregate(table, "median")
    if scheme == "mean_then_rank":
        return aggregate_then_rank(table, "mean")
    if scheme == "median_then_rank":
        return aggregate_then_rank(table, "median")
    if scheme == "test_based":
        return test_based_rank(table, alpha)
    raise ValueError(f"unknown scheme: {scheme}")
