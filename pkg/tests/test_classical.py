"""Sources, entropies, typical sets, and the classical rate experiment."""

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kxchain.classical import (
    BLOCK_CAP,
    bernoulli,
    block_entropy,
    brudno_experiment,
    classical_gacs,
    delta_weight,
    delta_weight_total,
    ks_rate,
    markov,
    plugin_semimeasure,
    shannon_entropy,
    source_from_spec,
    typical_set,
    word_bits,
)
from kxchain.complexity import PLAIN, dovetail

QUARTER = bernoulli([Fraction(1, 4), Fraction(3, 4)])
FAIR = bernoulli([Fraction(1, 2), Fraction(1, 2)])
FLIP10 = markov(
    [Fraction(1, 2), Fraction(1, 2)],
    [[Fraction(9, 10), Fraction(1, 10)], [Fraction(1, 10), Fraction(9, 10)]],
    require_stationary=True,
)
H_QUARTER = 0.8112781244591328  # -(1/4) log2(1/4) - (3/4) log2(3/4)
H_FLIP = 0.4689955935892812  # -(0.1) log2(0.1) - (0.9) log2(0.9)


# ---------------------------------------------------------------------------
# word probabilities


def test_fair_coin_words_are_uniform():
    for word in ("0", "1", "0110", "111111"):
        assert FAIR.word_probability(word) == Fraction(1, 1 << len(word))


def test_quarter_word_pinned():
    assert QUARTER.word_probability("011") == Fraction(9, 64)


def test_symbol_out_of_alphabet():
    with pytest.raises(ValueError):
        QUARTER.word_probability("02")


def test_empty_word_has_full_measure():
    assert QUARTER.word_probability("") == 1
    assert FLIP10.word_probability(()) == 1


@pytest.mark.parametrize("source", [QUARTER, FLIP10], ids=["bernoulli", "markov"])
def test_compatibility_exhaustive(source):
    # Summing out the last symbol recovers the prefix measure, for every
    # word up to length 8.
    p = source.alphabet
    for n in range(1, 9):
        for idx in range(p ** (n - 1)):
            prefix = tuple((idx // p**j) % p for j in range(n - 1))
            total = sum(source.word_probability(prefix + (a,)) for a in range(p))
            assert total == source.word_probability(prefix)


@pytest.mark.parametrize("source", [QUARTER, FLIP10], ids=["bernoulli", "markov"])
def test_invariance_exhaustive(source):
    # For stationary sources, summing out the first symbol recovers the
    # suffix measure.
    p = source.alphabet
    assert source.is_stationary()
    for n in range(1, 9):
        for idx in range(p ** (n - 1)):
            suffix = tuple((idx // p**j) % p for j in range(n - 1))
            total = sum(source.word_probability((a,) + suffix) for a in range(p))
            assert total == source.word_probability(suffix)


# ---------------------------------------------------------------------------
# construction and specs


def test_markov_requires_square_rows():
    with pytest.raises(ValueError):
        markov([1, 0], [[1, 0]])


def test_markov_stationarity_enforced():
    with pytest.raises(ValueError):
        markov([Fraction(3, 4), Fraction(1, 4)], [[Fraction(1, 2)] * 2] * 2, require_stationary=True)
    markov([Fraction(1, 2), Fraction(1, 2)], [[Fraction(1, 2)] * 2] * 2, require_stationary=True)


def test_negative_probability_rejected():
    with pytest.raises(ValueError):
        bernoulli([Fraction(3, 2), Fraction(-1, 2)])


def test_unnormalised_rejected():
    with pytest.raises(ValueError):
        bernoulli([0.5, 0.6])


def test_source_from_spec_fraction_strings():
    source, seed = source_from_spec(
        {"kind": "bernoulli", "alphabet": 2, "probabilities": ["1/4", "3/4"], "seed": 7}
    )
    assert source.probs == (Fraction(1, 4), Fraction(3, 4))
    assert seed == 7


def test_source_from_spec_markov():
    source, seed = source_from_spec(
        {
            "kind": "markov",
            "probabilities": {
                "initial": ["1/2", "1/2"],
                "transition": [["9/10", "1/10"], ["1/10", "9/10"]],
            },
            "stationary": True,
        }
    )
    assert source.kind == "markov"
    assert seed is None


def test_source_from_spec_rejections():
    with pytest.raises(ValueError):
        source_from_spec({"kind": "gaussian", "probabilities": [1.0]})
    with pytest.raises(ValueError):
        source_from_spec({"kind": "bernoulli", "alphabet": 3, "probabilities": [0.5, 0.5]})


# ---------------------------------------------------------------------------
# entropies


def test_shannon_entropy_pinned():
    assert shannon_entropy([Fraction(1, 2), Fraction(1, 2)]) == 1.0
    assert shannon_entropy([1, 0]) == 0.0
    assert shannon_entropy([Fraction(1, 4), Fraction(3, 4)]) == pytest.approx(H_QUARTER, abs=1e-12)


def test_shannon_entropy_rejections():
    with pytest.raises(ValueError):
        shannon_entropy([-0.5, 1.5])
    with pytest.raises(ValueError):
        shannon_entropy([0.3, 0.3])


def test_bernoulli_block_entropy_is_linear():
    for n in (1, 5, 12):
        assert block_entropy(QUARTER, n) == pytest.approx(n * H_QUARTER, abs=1e-9)


def test_markov_block_entropy_matches_chain_rule():
    # For a stationary chain H_n = H(pi) + (n-1) sum_i pi_i H(row_i); here
    # H(pi) = 1 and the row entropy is H(0.1).
    for n in (1, 2, 7, 12):
        assert block_entropy(FLIP10, n) == pytest.approx(1 + (n - 1) * H_FLIP, abs=1e-9)


def test_block_entropy_per_site_nonincreasing():
    for source in (QUARTER, FLIP10):
        ratios = [block_entropy(source, n) / n for n in range(1, 13)]
        for a, b in zip(ratios, ratios[1:]):
            assert b <= a + 1e-12


def test_block_entropy_cap():
    with pytest.raises(ValueError):
        block_entropy(FAIR, 23)  # 2^23 > BLOCK_CAP
    assert BLOCK_CAP == 1 << 22


# ---------------------------------------------------------------------------
# rate estimation


def test_ks_rate_bernoulli_flat():
    report = ks_rate(QUARTER, 10)
    for ratio in report.ratios:
        assert ratio == pytest.approx(H_QUARTER, abs=1e-9)
    assert report.estimate == pytest.approx(H_QUARTER, abs=1e-9)


def test_ks_rate_markov_sequences():
    report = ks_rate(FLIP10, 12)
    # H_n/n decreases toward the rate but is still far at n = 12 ...
    for a, b in zip(report.ratios, report.ratios[1:]):
        assert b < a
    assert report.ratios[-1] > H_FLIP
    assert report.min_ratio == report.ratios[-1]
    # ... while the increments lock onto it from n = 2 on.
    for diff in report.differences[1:]:
        assert diff == pytest.approx(H_FLIP, abs=1e-9)
    assert report.estimate == pytest.approx(H_FLIP, abs=1e-9)


def test_ks_rate_deterministic_source_is_zero():
    swap = markov([Fraction(1, 2), Fraction(1, 2)], [[0, 1], [1, 0]])
    report = ks_rate(swap, 8)
    assert abs(report.estimate) < 1e-12
    # Every block carries exactly the one bit of the initial state.
    for n, ratio in enumerate(report.ratios, start=1):
        assert ratio == pytest.approx(1.0 / n, abs=1e-12)


# ---------------------------------------------------------------------------
# typical sets


def test_fair_coin_everything_is_typical():
    report = typical_set(FAIR, 10, 0.05)
    assert report.count == 1 << 10
    assert report.measure == 1
    assert report.cardinality_bound_ok


def test_typical_set_pinned_quarter_n12():
    # Words with k ones have probability 3^k / 4^12, so membership requires
    # 12(h - 0.1) <= 24 - k log2(3) <= 12(h + 0.1), i.e. 8.24 <= k <= 9.76;
    # only k = 9 qualifies: C(12, 9) = 220 words of mass 220 * 3^9 / 4^12.
    report = typical_set(QUARTER, 12, 0.1)
    assert report.count == 220
    assert report.measure == Fraction(220 * 3**9, 4**12)
    assert report.cardinality_bound_ok


def test_typical_set_matches_brute_force():
    n, eps = 12, 0.1
    h = shannon_entropy(QUARTER.probs)
    count = 0
    measure = Fraction(0)
    for idx in range(1 << n):
        word = format(idx, f"0{n}b")
        nu = QUARTER.word_probability(word)
        logp = math.log2(nu.numerator) - math.log2(nu.denominator)
        if -n * (h + eps) <= logp <= -n * (h - eps):
            count += 1
            measure += nu
    report = typical_set(QUARTER, n, eps)
    assert (report.count, report.measure) == (count, measure)


def test_typical_measure_monotone_in_eps():
    sizes = [typical_set(QUARTER, 12, eps).measure for eps in (0.05, 0.1, 0.2, 0.4)]
    assert sizes == sorted(sizes)


def test_typical_set_large_n_exact_binomial():
    report = typical_set(QUARTER, 2000, 0.1)
    assert report.measure >= Fraction(99, 100)
    assert report.measure <= 1
    assert report.cardinality_bound_ok
    assert report.log2_count <= report.log2_cardinality_cap


def test_typical_members_satisfy_probability_window():
    # The Markov source takes the enumeration path and materialises members.
    report = typical_set(FLIP10, 10, 0.3)
    assert report.members is not None and len(report.members) == report.count
    n, h, eps = report.n, report.entropy_rate, report.eps
    for word in report.members:
        nu = FLIP10.word_probability(word)
        assert 2 ** (-n * (h + eps)) <= float(nu) <= 2 ** (-n * (h - eps))


def test_typical_set_rejections():
    with pytest.raises(ValueError):
        typical_set(QUARTER, 0, 0.1)
    with pytest.raises(ValueError):
        typical_set(QUARTER, 5, 0.0)
    with pytest.raises(ValueError):
        typical_set(FLIP10, 23, 0.1)


# ---------------------------------------------------------------------------
# Gacs average code length


def test_gacs_concentrated_source():
    sure = bernoulli([0, 1])  # emits only "111..."
    mass = {"1" * 5: Fraction(1, 8)}
    assert classical_gacs(sure, 5, mass) == pytest.approx(3.0, abs=1e-12)


def test_gacs_floor_for_missing_words():
    # Binary words of length 4: floor is 4 + 2 ceil(log2 4) + 8 = 16 bits.
    assert classical_gacs(QUARTER, 4, {}) == pytest.approx(16.0, abs=1e-12)
    # A larger constant shifts the floor one-for-one.
    assert classical_gacs(QUARTER, 4, {}, c_lit=10) == pytest.approx(18.0, abs=1e-12)


def test_gacs_plugin_identity():
    # With mu = delta(n) nu / sum(delta) the average collapses to
    # H_n + log2(n log2^2 n) + log2(sum delta) exactly.
    total = delta_weight_total()
    for source in (QUARTER, FLIP10):
        for n in (4, 10):
            lhs = classical_gacs(source, n, plugin_semimeasure(source, n))
            rhs = block_entropy(source, n) + math.log2(n * math.log2(n) ** 2) + math.log2(total)
            assert lhs == pytest.approx(rhs, abs=1e-9)


def test_gacs_rate_bound_with_measured_constant():
    # Finite form of the rate comparison: G/n >= H_n/n - (log2 c + log2(n log2^2 n))/n
    # with the constant c measured from the plug-in construction (c = 1/sum delta).
    c = 1 / delta_weight_total()
    for n in (4, 8, 12):
        g = classical_gacs(QUARTER, n, plugin_semimeasure(QUARTER, n))
        h_n = block_entropy(QUARTER, n)
        assert g / n >= h_n / n - (math.log2(c) + math.log2(n * math.log2(n) ** 2)) / n - 1e-12


def test_delta_weights():
    assert delta_weight(2) == 0.5
    assert delta_weight(4) == 1.0 / 16
    with pytest.raises(ValueError):
        delta_weight(1)
    total = delta_weight_total()
    assert total > sum(delta_weight(k) for k in range(2, 1000))
    assert total < 1.1


# ---------------------------------------------------------------------------
# word rendering


def test_word_bits_binary_identity():
    assert word_bits("011", 2) == "011"


def test_word_bits_wider_alphabet():
    assert word_bits("012", 3) == "000110"
    assert word_bits((3,), 4) == "11"


@given(st.lists(st.integers(0, 1), max_size=16))
def test_word_bits_length(symbols):
    assert len(word_bits(tuple(symbols), 2)) == len(symbols)


# ---------------------------------------------------------------------------
# the rate experiment


def test_brudno_fair_coin_quick():
    report = brudno_experiment(FAIR, 10_000, 5, seed=42)
    assert report.mean_rate == pytest.approx(1.0, abs=0.05)
    assert report.found == 5


def test_brudno_quarter_quick():
    report = brudno_experiment(QUARTER, 10_000, 5, seed=42)
    assert report.mean_rate == pytest.approx(H_QUARTER, abs=0.05)


def test_brudno_constant_source():
    constant = bernoulli([1, 0])
    report = brudno_experiment(constant, 10_000, 3, seed=0)
    assert report.mean_rate is not None and report.mean_rate <= 0.02


def test_brudno_trials_are_order_independent():
    small = brudno_experiment(QUARTER, 500, 3, seed=9)
    large = brudno_experiment(QUARTER, 500, 6, seed=9)
    assert large.rows[:3] == small.rows


def test_brudno_is_reproducible():
    a = brudno_experiment(FLIP10, 300, 4, seed=5)
    b = brudno_experiment(FLIP10, 300, 4, seed=5)
    assert a == b


def test_brudno_search_cache_backend():
    cache = dovetail(PLAIN, [(4, 100)])
    constant = bernoulli([1, 0])
    # The word "0" has the recorded witness "000", so every trial scores 3 bits.
    report = brudno_experiment(constant, 1, 3, backend="search-cache", cache=cache)
    assert report.found == 3
    assert all(row.rate == 3.0 for row in report.rows)
    # Fair-coin words of length 2 never appear as outputs in this tiny cache.
    missing = brudno_experiment(FAIR, 2, 3, backend="search-cache", cache=cache)
    assert missing.found == 0 and missing.mean_rate is None


def test_brudno_rejections():
    with pytest.raises(ValueError):
        brudno_experiment(FAIR, 10, 2, backend="zip")
    with pytest.raises(ValueError):
        brudno_experiment(FAIR, 10, 2, backend="search-cache")


def test_brudno_csv_rows():
    report = brudno_experiment(FAIR, 100, 2, seed=1)
    rows = report.csv_rows()
    assert len(rows) == 2
    n, trial, rate, h, backend = rows[0]
    assert (n, trial, h, backend) == (100, 0, 1.0, "compressor")
    assert rate > 0
