"""Daily-count distributions, standardized pooling, box-allocation nulls."""
import numpy as np
import pytest
from scipy import stats

from wordburst.dense import (
    daily_count_distribution,
    matched_poisson_null,
    pool_rescaled,
    poisson_null_ensemble,
    rescaled_values,
    sigma_scaling,
    write_xtilde_csv,
)
from wordburst.matrix import WordDayMatrix, merge_matrices

from conftest import build_matrix, burst_matrix


class TestDailyCountDistribution:
    def test_three_day_example(self):
        d = daily_count_distribution({0: 2, 2: 1}, k=3, horizon=3)
        np.testing.assert_allclose(d.probs, [1 / 3, 1 / 3, 1 / 3])
        assert d.mean == pytest.approx(1.0)
        assert not d.degenerate

    def test_constant_series_is_degenerate(self):
        d = daily_count_distribution({0: 2, 1: 2, 2: 2}, k=6, horizon=3)
        assert d.degenerate
        assert d.std == 0.0

    def test_total_mismatch_rejected(self):
        with pytest.raises(ValueError):
            daily_count_distribution({0: 2}, k=3, horizon=3)

    def test_mass_conservation(self):
        rng = np.random.default_rng(1)
        counts = rng.multinomial(777, np.full(100, 0.01))
        d = daily_count_distribution(counts, k=777, horizon=100)
        assert np.dot(d.support, d.probs) * 100 == pytest.approx(777.0)

    def test_box_allocation_spread(self):
        # multinomial day variance is k*(1/T)*(1-1/T); at k=1000, T=214
        # the standard deviation is about 2.156
        k, horizon = 1000, 214
        target = np.sqrt(k / horizon * (1 - 1 / horizon))
        assert target == pytest.approx(2.156, abs=1e-3)
        m = poisson_null_ensemble(k, horizon, 400, seed=9)
        stds = [daily_count_distribution(m.series(w), k, horizon).std for w in m.words()]
        assert np.mean(stds) == pytest.approx(target, rel=0.01)


class TestRescaledPooling:
    def test_day_at_the_mean_maps_to_zero(self):
        horizon = 4
        series = {0: 2, 1: 2, 2: 3, 3: 1}  # k=8, mean 2; days 0,1 sit at the mean
        xt = rescaled_values(series, k=8, horizon=horizon)
        assert xt[0] == pytest.approx(0.0)
        assert xt[1] == pytest.approx(0.0)

    def test_degenerate_word_returns_none(self):
        assert rescaled_values({0: 2, 1: 2}, k=4, horizon=2) is None

    def test_null_pool_is_standardized(self):
        m = poisson_null_ensemble(1500, 214, 500, seed=12)
        pooled = pool_rescaled(m, 1000, 2000)
        assert pooled.word_count == 500
        assert pooled.skipped_words == 0
        centers = pooled.bin_centers
        w = np.diff(pooled.bin_edges)
        mean = np.sum(centers * pooled.density * w)
        var = np.sum(centers**2 * pooled.density * w) - mean**2
        assert abs(mean) < 0.05
        assert abs(var - 1.0) < 0.1

    def test_density_normalized_over_bins(self):
        m = poisson_null_ensemble(1200, 214, 100, seed=13)
        pooled = pool_rescaled(m, 1000, 2000)
        assert np.sum(pooled.density * np.diff(pooled.bin_edges)) == pytest.approx(1.0, rel=1e-9)

    def test_bursty_words_fatten_the_right_tail(self):
        horizon, seed = 214, 14
        ks = [1000 + 17 * i for i in range(120)]
        bursty = burst_matrix(ks, horizon, n_days=10, seed=seed)
        null = matched_poisson_null(bursty, 1000, 2000, seed=seed)
        tail_b = pool_rescaled(bursty, 1000, 2000).tail_mass(4.0)
        tail_n = pool_rescaled(null, 1000, 2000).tail_mass(4.0)
        assert tail_b > 2 * max(tail_n, 1e-12)

    def test_extreme_concentration_is_clipped_and_counted(self):
        m = build_matrix({"spike": {0: 1000, 1: 1}}, horizon=214)
        pooled = pool_rescaled(m, 900, 1100)
        assert pooled.clipped_count > 0

    def test_empty_range(self):
        m = build_matrix({"w": {0: 3}}, horizon=5)
        pooled = pool_rescaled(m, 1000, 2000)
        assert pooled.word_count == 0
        assert np.all(pooled.density == 0)


class TestPoissonNullEnsemble:
    def test_single_event_lands_once(self):
        m = poisson_null_ensemble(1, 214, 50, seed=3)
        for w in m.words():
            assert sum(m.series(w).values()) == 1

    def test_exact_totals(self):
        m = poisson_null_ensemble(1000, 214, 30, seed=4)
        assert all(m.total(w) == 1000 for w in m.words())

    def test_reproducible_bit_for_bit(self):
        a = poisson_null_ensemble(500, 214, 40, seed=77)
        b = poisson_null_ensemble(500, 214, 40, seed=77)
        assert a.counts == b.counts
        c = poisson_null_ensemble(500, 214, 40, seed=78)
        assert a.counts != c.counts

    def test_day_counts_match_binomial_oracle(self):
        k, horizon, n_words = 1000, 214, 500
        m = poisson_null_ensemble(k, horizon, n_words, seed=5)
        xs = np.concatenate([m.daily_counts(w) for w in sorted(m.words())])
        observed = np.bincount(xs)
        law = stats.binom(k, 1 / horizon)
        # group cells so every expected count is >= 5
        edges, exp_p = [], []
        lo = 0
        acc = 0.0
        for x in range(observed.size + 20):
            acc += law.pmf(x)
            if acc * xs.size >= 5:
                edges.append((lo, x))
                exp_p.append(acc)
                lo, acc = x + 1, 0.0
        exp_p.append(1 - sum(exp_p))
        edges.append((lo, None))
        obs = []
        for a, b in edges:
            if b is None:
                obs.append(np.sum(observed[a:]) + (xs >= observed.size).sum())
            else:
                obs.append(np.sum(observed[a : b + 1]))
        chi2, p = stats.chisquare(obs, np.array(exp_p) * xs.size)
        assert p > 0.01


class TestMatchedNull:
    def test_same_total_multiset(self):
        bursty = burst_matrix([1000, 1500, 1700], 214, n_days=10, seed=6)
        null = matched_poisson_null(bursty, 1000, 2000, seed=6)
        assert sorted(null.total(w) for w in null.words()) == [1000, 1500, 1700]
        assert null.vocabulary_size == 3


class TestSigmaScaling:
    def build_null_by_k(self, ks, n_words, seed):
        parts = [
            poisson_null_ensemble(k, 214, n_words, seed + i, name_prefix=f"n{i}_")
            for i, k in enumerate(ks)
        ]
        return merge_matrices(parts)

    def test_null_exponents(self):
        m = self.build_null_by_k([100, 300, 1000, 3000], 80, seed=21)
        table = sigma_scaling(m)
        assert table.exponent_rel == pytest.approx(-0.5, abs=0.05)
        assert table.exponent_abs == pytest.approx(+0.5, abs=0.05)

    def test_doubling_k_shrinks_relative_spread_by_root_two(self):
        m = self.build_null_by_k([200, 400, 2000, 4000], 150, seed=22)
        table = sigma_scaling(m)
        r = {row.k: row.sigma_rel for row in table.rows}
        assert r[400] / r[200] == pytest.approx(1 / np.sqrt(2), rel=0.03)
        assert r[4000] / r[2000] == pytest.approx(1 / np.sqrt(2), rel=0.03)

    def test_needs_a_decade(self):
        m = self.build_null_by_k([100, 200, 300], 20, seed=23)
        with pytest.raises(ValueError):
            sigma_scaling(m)


class TestCsv:
    def test_shared_grid_required(self, tmp_path):
        m = poisson_null_ensemble(1200, 214, 50, seed=31)
        a = pool_rescaled(m, 1000, 2000)
        b = pool_rescaled(m, 1000, 2000, bin_width=0.5)
        with pytest.raises(ValueError):
            write_xtilde_csv(tmp_path / "x.csv", a, b)

    def test_written_columns(self, tmp_path):
        m = poisson_null_ensemble(1200, 214, 50, seed=32)
        pooled = pool_rescaled(m, 1000, 2000)
        path = tmp_path / "xtilde.csv"
        write_xtilde_csv(path, pooled, pooled)
        header = path.read_text(encoding="utf-8").splitlines()[0]
        assert header == "xtilde,density_empirical,density_null"
