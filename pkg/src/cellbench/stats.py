"""Bootstrap rank stability, Kendall's tau, and Wilcoxon significance tests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ranking import DEFAULT_ALPHA, RankingTable, Scheme, build_leaderboard

DEFAULT_REPLICATES = 1000

# exact Wilcoxon null up to this many nonzero differences, normal beyond
EXACT_WILCOXON_MAX_N = 25


@dataclass(frozen=True)
class BootstrapConfig:
    replicates: int = DEFAULT_REPLICATES
    seed: int = 0

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")


@dataclass
class StabilityReport:
    """Rank distributions across bootstrap replicates (blob-plot ready)."""

    teams: list[str]
    rank_frequency: dict[str, dict[int, float]]
    median_rank: dict[str, float]
    ci95: dict[str, tuple[float, float]]
    kendall_taus: list[float]
    metadata: dict = field(default_factory=dict)


@dataclass
class SignificanceMatrix:
    """One-sided pairwise p-values; entry (i, j) tests 'i beats j'.

    The diagonal and all-tied pairs are NaN (undefined, not significant).
    """

    teams: list[str]
    p_values: np.ndarray
    alpha: float = DEFAULT_ALPHA

    def significant(self, i: int, j: int) -> bool:
        p = self.p_values[i, j]
        return bool(np.isfinite(p) and p < self.alpha)


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, np.float64)
    sorted_vals = values[order]
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def kendall_tau(rank_a, rank_b) -> float:
    """Kendall's tau-b between two (possibly tied) rankings of K items.

    Returns 1 for identical order, -1 for inverted order, NaN when either
    side is fully tied (zero denominator).
    """
    a = np.asarray(rank_a, np.float64)
    b = np.asarray(rank_b, np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("rankings must be 1D and cover the same items")
    n = a.size
    if n < 2:
        raise ValueError("rankings must cover at least 2 items")
    sa = np.sign(a[:, None] - a[None, :])
    sb = np.sign(b[:, None] - b[None, :])
    prod = sa * sb
    iu = np.triu_indices(n, k=1)
    concordant = int((prod[iu] > 0).sum())
    discordant = int((prod[iu] < 0).sum())
    pairs = n * (n - 1) // 2

    def tie_pairs(r):
        _, counts = np.unique(r, return_counts=True)
        return int((counts * (counts - 1) // 2).sum())

    denom = math.sqrt((pairs - tie_pairs(a)) * (pairs - tie_pairs(b)))
    if denom == 0:
        return math.nan
    return (concordant - discordant) / denom


def wilcoxon_one_sided_p(diffs) -> float:
    """One-sided Wilcoxon signed rank p-value, P(W+ >= observed).

    Zero differences are dropped; |differences| are ranked with average
    ranks. Exact by dynamic programming over the (doubled, hence integer)
    rank multiset for n <= 25; normal approximation with tie and continuity
    corrections beyond.
    """
    d = np.asarray(diffs, np.float64)
    d = d[d != 0]
    n = d.size
    if n == 0:
        raise ValueError("all differences are zero")
    ranks = _average_ranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    if n <= EXACT_WILCOXON_MAX_N:
        # subset-sum counts over doubled ranks (exact integers)
        scaled = np.rint(2.0 * ranks).astype(np.int64)
        total = int(scaled.sum())
        counts = np.zeros(total + 1, np.float64)
        counts[0] = 1.0
        for s in scaled:
            counts[s:] += counts[: total + 1 - s].copy()
        observed = int(np.rint(2.0 * w_plus))
        return float(counts[observed:].sum() / 2.0**n)
    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    var -= float((tie_counts**3 - tie_counts).sum()) / 48.0
    z = (w_plus - mean - 0.5) / math.sqrt(var)
    p = 0.5 * math.erfc(z / math.sqrt(2.0))
    return min(max(p, math.ulp(0.0)), 1.0)


def significance_matrix(table: RankingTable, alpha: float = DEFAULT_ALPHA) -> SignificanceMatrix:
    """All ordered pairwise one-sided tests on paired per-case F1."""
    k = len(table.teams)
    if k < 2:
        raise ValueError("significance analysis requires at least 2 teams")
    p = np.full((k, k), np.nan)
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            shared = ~table.missing_mask[i] & ~table.missing_mask[j]
            if not shared.any():
                raise ValueError(
                    f"insufficient paired cases between {table.teams[i]} and {table.teams[j]}"
                )
            diffs = table.f1_matrix[i, shared] - table.f1_matrix[j, shared]
            if np.any(diffs != 0):
                p[i, j] = wilcoxon_one_sided_p(diffs)
    return SignificanceMatrix(teams=list(table.teams), p_values=p, alpha=alpha)


def bootstrap_ranking_stability(
    table: RankingTable,
    cfg: BootstrapConfig = BootstrapConfig(),
    scheme: Scheme = "rank_then_mean",
    alpha: float = DEFAULT_ALPHA,
) -> StabilityReport:
    """Rank distribution over case-resampled replicates.

    Every replicate draws N case ids with replacement (the same cases for
    all teams), recomputes the full two-metric leaderboard under ``scheme``,
    and compares its ranking against the full-data ranking with Kendall's
    tau-b. Replicate r uses the r-th spawn of the seed sequence, so results
    are reproducible regardless of execution order.
    """
    teams = list(table.teams)
    k = len(teams)
    n = len(table.cases)
    if n < 1 or k < 2:
        raise ValueError("bootstrap requires at least 2 teams and 1 case")
    full_board = build_leaderboard(table, scheme, alpha)
    full_ranks = np.array([full_board.ranks[t] for t in teams], np.float64)
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.replicates)
    all_ranks = np.empty((cfg.replicates, k), np.float64)
    taus = []
    for r in range(cfg.replicates):
        rng = np.random.default_rng(streams[r])
        idx = rng.integers(0, n, size=n)
        board = build_leaderboard(table.resample_cases(idx), scheme, alpha)
        ranks = np.array([board.ranks[t] for t in teams], np.float64)
        all_ranks[r] = ranks
        taus.append(kendall_tau(ranks, full_ranks))
    rank_frequency = {}
    for ti, t in enumerate(teams):
        values, counts = np.unique(all_ranks[:, ti].astype(np.int64), return_counts=True)
        rank_frequency[t] = {int(v): float(c / cfg.replicates) for v, c in zip(values, counts)}
    median_rank = {t: float(np.percentile(all_ranks[:, ti], 50)) for ti, t in enumerate(teams)}
    ci95 = {
        t: (
            float(np.percentile(all_ranks[:, ti], 2.5)),
            float(np.percentile(all_ranks[:, ti], 97.5)),
        )
        for ti, t in enumerate(teams)
    }
    return StabilityReport(
        teams=teams,
        rank_frequency=rank_frequency,
        median_rank=median_rank,
        ci95=ci95,
        kendall_taus=taus,
        metadata={
            "scheme": scheme,
            "replicates": cfg.replicates,
            "seed": cfg.seed,
            "alpha": alpha,
            "resampled": "cases",
            "recomputed_metrics": "f1_and_runtime",
        },
    )
