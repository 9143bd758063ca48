"""Sampler distribution checks and variation operator contracts."""

import numpy as np
import pytest
from scipy import stats

from ealab.variation import (
    ParameterError,
    RandomSource,
    crossover_biased,
    flip_positions,
    mutate_flip,
    random_bitstring,
    sample_binomial,
    sample_binomial_positive,
)

PMF_GRID = [(n, p) for n in (1, 4, 10, 100) for p in (0.01, 0.1, 0.5)]


def _chisq_pvalue(draws: np.ndarray, n: int, pmf: np.ndarray, support: np.ndarray) -> float:
    counts = np.bincount(draws, minlength=n + 1).astype(float)[support]
    expected = pmf * draws.size
    # merge bins with tiny expectation into the tail so the chi-square
    # approximation is sound
    keep = expected >= 5.0
    if not np.all(keep):
        counts = np.append(counts[keep], counts[~keep].sum())
        expected = np.append(expected[keep], expected[~keep].sum())
    if expected.size < 2:
        return 1.0
    res = stats.chisquare(counts, expected)
    return float(res.pvalue)


class TestRandomSource:
    def test_same_seed_same_stream(self):
        a, b = RandomSource(987654321), RandomSource(987654321)
        assert [a.next_u64() for _ in range(64)] == [b.next_u64() for _ in range(64)]
        assert [a.u01() for _ in range(16)] == [b.u01() for _ in range(16)]

    def test_different_seeds_differ(self):
        a, b = RandomSource(1), RandomSource(2)
        assert [a.next_u64() for _ in range(4)] != [b.next_u64() for _ in range(4)]

    def test_seed_domain(self):
        with pytest.raises(ParameterError):
            RandomSource(-1)
        with pytest.raises(ParameterError):
            RandomSource(2 ** 64)
        RandomSource(2 ** 64 - 1)

    def test_u01_range(self):
        rng = RandomSource(5)
        xs = [rng.u01() for _ in range(10000)]
        assert all(0.0 <= x < 1.0 for x in xs)

    def test_randbelow_covers_range(self):
        rng = RandomSource(6)
        xs = [rng.randbelow(7) for _ in range(5000)]
        assert set(xs) == set(range(7))


class TestSampleBinomial:
    def test_domain_errors(self):
        rng = RandomSource(0)
        for bad_n, bad_p in ((0, 0.5), (5, 0.0), (5, 1.0), (5, -0.1), (5, 1.5)):
            with pytest.raises(ParameterError):
                sample_binomial(bad_n, bad_p, rng)
            with pytest.raises(ParameterError):
                sample_binomial_positive(bad_n, bad_p, rng)

    def test_single_trial_frequency(self):
        # n=1: outcomes in {0,1} with P[1] = p
        rng = RandomSource(11)
        p = 0.3
        draws = sample_binomial(1, p, rng, size=200_000)
        assert set(np.unique(draws)) <= {0, 1}
        freq = draws.mean()
        se = np.sqrt(p * (1 - p) / draws.size)
        assert abs(freq - p) < 5 * se

    def test_zero_probability_matches_exact(self):
        # P[0] = (1-p)^n ~ 0.3677 at n=1000, p=1/1000
        rng = RandomSource(12)
        n, p = 1000, 1e-3
        draws = sample_binomial(n, p, rng, size=10 ** 6)
        p0 = (1 - p) ** n
        freq = np.mean(draws == 0)
        se = np.sqrt(p0 * (1 - p0) / draws.size)
        assert abs(p0 - 0.36769542) < 1e-7  # frozen from (1-1/1000)**1000
        assert abs(freq - p0) < 5 * se

    def test_exact_pmf_small_case(self):
        # n=4, p=0.5: pmf {1,4,6,4,1}/16 over 1e6 draws
        rng = RandomSource(13)
        draws = sample_binomial(4, 0.5, rng, size=10 ** 6)
        support = np.arange(5)
        pmf = np.array([1, 4, 6, 4, 1]) / 16.0
        assert _chisq_pvalue(draws, 4, pmf, support) > 0.001

    @pytest.mark.parametrize("n,p", PMF_GRID)
    def test_pmf_grid(self, n, p):
        rng = RandomSource(1000 + 7 * n + int(1000 * p))
        draws = sample_binomial(n, p, rng, size=10 ** 6)
        support = np.arange(n + 1)
        pmf = stats.binom.pmf(support, n, p)
        assert _chisq_pvalue(draws, n, pmf, support) > 0.001


class TestSampleBinomialPositive:
    def test_single_trial_always_one(self):
        rng = RandomSource(21)
        assert all(sample_binomial_positive(1, p, rng) == 1 for p in (0.01, 0.5, 0.99))

    def test_never_zero(self):
        rng = RandomSource(22)
        draws = sample_binomial_positive(10, 0.3, rng, size=10 ** 6)
        assert draws.min() >= 1

    def test_one_probability(self):
        # P[1 | > 0] = n p (1-p)^(n-1) / (1-(1-p)^n) ~ 0.5821 at n=1000, p=1/1000
        rng = RandomSource(23)
        n, p = 1000, 1e-3
        draws = sample_binomial_positive(n, p, rng, size=10 ** 6)
        ref = n * p * (1 - p) ** (n - 1) / (1 - (1 - p) ** n)
        assert abs(ref - 0.58209841) < 1e-7  # frozen from the formula
        freq = np.mean(draws == 1)
        se = np.sqrt(ref * (1 - ref) / draws.size)
        assert abs(freq - ref) < 5 * se

    @pytest.mark.parametrize("n,p", PMF_GRID)
    def test_pmf_grid(self, n, p):
        rng = RandomSource(2000 + 7 * n + int(1000 * p))
        draws = sample_binomial_positive(n, p, rng, size=10 ** 6)
        assert draws.min() >= 1
        support = np.arange(1, n + 1)
        pmf = stats.binom.pmf(support, n, p) / (1 - (1 - p) ** n)
        assert _chisq_pvalue(draws, n, pmf, support) > 0.001


class TestMutateFlip:
    def test_identity_and_full_flip(self):
        rng = RandomSource(31)
        x = np.array([0, 1, 1, 0, 1], np.uint8)
        assert np.array_equal(mutate_flip(x, 0, rng), x)
        zeros = np.zeros(5, np.uint8)
        assert np.array_equal(mutate_flip(zeros, 5, rng), np.ones(5, np.uint8))

    def test_hamming_distance_exact(self):
        rng = RandomSource(32)
        for _ in range(10 ** 4):
            n = rng.randbelow(40) + 1
            x = random_bitstring(n, rng)
            ell = rng.randbelow(n + 1)
            y = mutate_flip(x, ell, rng)
            assert int(np.sum(x != y)) == ell

    def test_input_unmodified(self):
        rng = RandomSource(33)
        x = random_bitstring(50, rng)
        before = x.copy()
        mutate_flip(x, 7, rng)
        assert np.array_equal(x, before)

    def test_ell_out_of_range(self):
        rng = RandomSource(34)
        x = random_bitstring(5, rng)
        with pytest.raises(ParameterError):
            mutate_flip(x, 6, rng)
        with pytest.raises(ParameterError):
            mutate_flip(x, -1, rng)

    def test_positions_uniform(self):
        # each position is flipped with probability ell/n
        rng = RandomSource(35)
        n, ell, trials = 12, 3, 60_000
        counts = np.zeros(n)
        for _ in range(trials):
            counts[flip_positions(n, ell, rng)] += 1
        expected = trials * ell / n
        se = np.sqrt(trials * (ell / n) * (1 - ell / n))
        assert np.all(np.abs(counts - expected) < 5.5 * se)


class TestCrossoverBiased:
    def test_identical_parents(self):
        rng = RandomSource(41)
        a = random_bitstring(30, rng)
        for c in (0.0, 0.25, 1.0):
            assert np.array_equal(crossover_biased(a, a, c, rng), a)

    def test_degenerate_bias(self):
        rng = RandomSource(42)
        a = random_bitstring(30, rng)
        b = 1 - a
        assert np.array_equal(crossover_biased(a, b, 0.0, rng), a)
        assert np.array_equal(crossover_biased(a, b, 1.0, rng), b)

    def test_length_mismatch(self):
        rng = RandomSource(43)
        with pytest.raises(ParameterError):
            crossover_biased(np.zeros(3, np.uint8), np.zeros(4, np.uint8), 0.5, rng)

    def test_parent_reproduction_probability(self):
        # for parents at Hamming distance d and c = 1/2, the offspring equals
        # a parent with probability 2/2^d (enumerating the d free positions)
        rng = RandomSource(44)
        n, d, trials = 16, 3, 40_000
        a = random_bitstring(n, rng)
        b = a.copy()
        b[:d] ^= 1
        hits = 0
        for _ in range(trials):
            y = crossover_biased(a, b, 0.5, rng)
            if np.array_equal(y, a) or np.array_equal(y, b):
                hits += 1
        ref = 2.0 / 2 ** d
        se = np.sqrt(ref * (1 - ref) / trials)
        assert abs(hits / trials - ref) < 5 * se

    def test_per_position_bias(self):
        rng = RandomSource(45)
        n, c, trials = 40, 0.2, 20_000
        a = np.zeros(n, np.uint8)
        b = np.ones(n, np.uint8)
        taken = np.zeros(n)
        for _ in range(trials):
            taken += crossover_biased(a, b, c, rng)
        se = np.sqrt(trials * c * (1 - c))
        assert np.all(np.abs(taken - trials * c) < 5.5 * se)


def test_operators_deterministic_given_state():
    seed = 321
    r1, r2 = RandomSource(seed), RandomSource(seed)
    x = random_bitstring(64, r1)
    y = random_bitstring(64, r2)
    assert np.array_equal(x, y)
    assert sample_binomial(100, 0.03, r1) == sample_binomial(100, 0.03, r2)
    assert sample_binomial_positive(100, 0.03, r1) == sample_binomial_positive(100, 0.03, r2)
    assert np.array_equal(mutate_flip(x, 9, r1), mutate_flip(y, 9, r2))
    assert np.array_equal(
        crossover_biased(x, 1 - x, 0.3, r1), crossover_biased(y, 1 - y, 0.3, r2)
    )
