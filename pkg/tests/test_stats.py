import json
import math

import numpy as np
import pytest

from cellbench import ranking, stats

from oracles import brute_wilcoxon_one_sided
from test_ranking import dominant_table, table_from


class TestKendallTau:
    def test_identical_order(self):
        assert stats.kendall_tau([1, 2, 3], [1, 2, 3]) == 1.0

    def test_inverted_order(self):
        assert stats.kendall_tau([1, 2, 3], [3, 2, 1]) == -1.0

    def test_single_adjacent_swap(self):
        assert stats.kendall_tau([1, 2, 3], [2, 1, 3]) == pytest.approx(1 / 3, abs=0)

    def test_all_tied_side_undefined(self):
        assert math.isnan(stats.kendall_tau([1, 2, 3], [2, 2, 2]))

    def test_self_and_reverse_for_random_permutations(self, rng):
        for _ in range(10):
            a = rng.permutation(int(rng.integers(2, 12))) + 1
            assert stats.kendall_tau(a, a) == 1.0
            assert stats.kendall_tau(a, a.max() + 1 - a) == -1.0

    def test_matches_scipy_tau_b(self, rng):
        from scipy.stats import kendalltau

        for _ in range(20):
            n = int(rng.integers(3, 10))
            a = rng.integers(1, 5, n)
            b = rng.integers(1, 5, n)
            if len(set(a.tolist())) == 1 or len(set(b.tolist())) == 1:
                continue
            expected = kendalltau(a, b, variant="b").statistic
            assert stats.kendall_tau(a, b) == pytest.approx(expected)


class TestWilcoxon:
    def test_all_positive_five(self):
        assert stats.wilcoxon_one_sided_p([1, 2, 3, 4, 5]) == 1 / 32

    def test_single_difference(self):
        assert stats.wilcoxon_one_sided_p([1.0]) == 0.5

    def test_two_differences(self):
        assert stats.wilcoxon_one_sided_p([1, 2]) == 0.25

    def test_zero_differences_dropped(self):
        assert stats.wilcoxon_one_sided_p([0.0, 1, 2, 0.0]) == 0.25

    def test_all_zero_rejected(self):
        with pytest.raises(ValueError, match="zero"):
            stats.wilcoxon_one_sided_p([0.0, 0.0])

    def test_exact_matches_bruteforce_up_to_n12(self, rng):
        for n in range(1, 13):
            for _ in range(4):
                diffs = rng.normal(size=n)
                # inject ties in |diffs| half the time
                if n >= 3 and rng.random() < 0.5:
                    diffs[1] = -diffs[0]
                    diffs[2] = diffs[0]
                p = stats.wilcoxon_one_sided_p(diffs)
                assert p == pytest.approx(brute_wilcoxon_one_sided(diffs), abs=1e-12)

    def test_normal_approximation_is_sane_for_large_n(self, rng):
        diffs = rng.normal(loc=0.5, size=60)
        p = stats.wilcoxon_one_sided_p(diffs)
        assert 0 < p <= 1
        # strongly positive shift: small p
        assert p < 0.01

    def test_one_sided_exclusivity(self, rng):
        for _ in range(10):
            diffs = rng.normal(size=9)
            if not np.any(diffs != 0):
                continue
            p_fwd = stats.wilcoxon_one_sided_p(diffs)
            p_rev = stats.wilcoxon_one_sided_p(-diffs)
            assert not (p_fwd < 0.05 and p_rev < 0.05)


class TestSignificanceMatrix:
    def test_diagonal_undefined(self):
        table = dominant_table(n_teams=3, n_cases=10)
        sig = stats.significance_matrix(table)
        assert np.all(np.isnan(np.diag(sig.p_values)))

    def test_unanimous_winner_exact_p(self):
        f1 = np.zeros((2, 10))
        f1[0] = np.linspace(0.8, 0.9, 10)
        f1[1] = np.linspace(0.3, 0.4, 10)
        table = table_from(f1, np.ones((2, 10)), teams=["A", "B"])
        sig = stats.significance_matrix(table)
        assert sig.p_values[0, 1] == 2.0**-10
        assert sig.p_values[1, 0] == 1.0
        assert sig.significant(0, 1) and not sig.significant(1, 0)

    def test_identical_teams_not_significant(self):
        f1 = np.tile(np.linspace(0.2, 0.9, 8), (2, 1))
        table = table_from(f1, np.ones((2, 8)), teams=["A", "B"])
        sig = stats.significance_matrix(table)
        assert math.isnan(sig.p_values[0, 1])
        assert not sig.significant(0, 1)

    def test_exclusivity_property(self, rng):
        table = table_from(rng.random((4, 12)), np.ones((4, 12)))
        sig = stats.significance_matrix(table, alpha=0.05)
        for i in range(4):
            for j in range(4):
                if i != j and sig.significant(i, j):
                    assert not sig.significant(j, i)


class TestBootstrap:
    def test_dominant_team_always_first(self):
        table = dominant_table(n_teams=5, n_cases=20)
        report = stats.bootstrap_ranking_stability(
            table, stats.BootstrapConfig(replicates=100, seed=11)
        )
        assert report.rank_frequency["T0"] == {1: 1.0}
        assert report.median_rank["T0"] == 1.0
        assert report.ci95["T0"] == (1.0, 1.0)

    def test_single_replicate_deterministic(self):
        table = dominant_table()
        cfg = stats.BootstrapConfig(replicates=1, seed=99)
        a = stats.bootstrap_ranking_stability(table, cfg)
        b = stats.bootstrap_ranking_stability(table, cfg)
        assert a.rank_frequency == b.rank_frequency
        assert a.kendall_taus == b.kendall_taus

    def test_identical_replicate_rankings_give_tau_one(self):
        table = dominant_table(n_teams=4, n_cases=1)  # one case: every resample identical
        report = stats.bootstrap_ranking_stability(
            table, stats.BootstrapConfig(replicates=25, seed=0)
        )
        assert all(t == 1.0 for t in report.kendall_taus)

    def test_rank_frequencies_sum_to_one(self, rng):
        table = table_from(rng.random((6, 15)), rng.random((6, 15)))
        report = stats.bootstrap_ranking_stability(
            table, stats.BootstrapConfig(replicates=60, seed=5)
        )
        for team, freqs in report.rank_frequency.items():
            assert sum(freqs.values()) == pytest.approx(1.0, abs=1e-12)

    def test_report_json_stable_across_runs(self):
        table = dominant_table(n_teams=4, n_cases=9)
        cfg = stats.BootstrapConfig(replicates=50, seed=42)

        def dump():
            r = stats.bootstrap_ranking_stability(table, cfg)
            return json.dumps(
                {
                    "freq": {t: {str(k): v for k, v in f.items()} for t, f in r.rank_frequency.items()},
                    "median": r.median_rank,
                    "ci": {t: list(v) for t, v in r.ci95.items()},
                    "taus": r.kendall_taus,
                },
                sort_keys=True,
            )

        assert dump() == dump()

    def test_rejects_empty_config(self):
        with pytest.raises(ValueError):
            stats.BootstrapConfig(replicates=0)

    def test_well_separated_teams_give_high_tau(self, rng):
        # 28 teams whose per-case noise is far below the inter-team gaps:
        # resampled rankings barely move, so kendall tau stays near 1
        k, n = 28, 50
        means = np.linspace(0.95, 0.3, k)
        f1 = means[:, None] + rng.normal(0, 0.003, (k, n))
        rt = np.linspace(1, 28, k)[:, None] + rng.normal(0, 0.01, (k, n))
        table = table_from(f1, rt)
        report = stats.bootstrap_ranking_stability(
            table, stats.BootstrapConfig(replicates=100, seed=8)
        )
        assert float(np.mean(report.kendall_taus)) > 0.9
