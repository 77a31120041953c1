"""Acceptance suite: twelve numbered criteria, one test and one PASS/FAIL
line each.

Each test gathers its sub-checks into a `problems` list and concludes with a
single printed line, so a run with ``-s`` (or the verbose test names alone)
reads as a checklist.  Tolerances and runtime budgets are pinned in the test
bodies; nothing here is tuned at runtime.
"""

import json
import math
import time
from fractions import Fraction

import numpy as np

from kxchain.classical import bernoulli, brudno_experiment, ks_rate, markov, typical_set
from kxchain.cli import dispatch
from kxchain.complexity import (
    PLAIN,
    PREFIX,
    c_upper,
    count_below,
    dovetail,
    k_upper,
    kraft_total,
    m_lower,
    structural_antichain,
)
from kxchain.langvm import (
    Halted,
    OutOfBudget,
    godel_instruction,
    godel_program,
    parse_program,
    program_from_number,
    run,
)
from kxchain.quantum import (
    af_entropy_estimate,
    af_purification_check,
    build_mu_hat,
    gacs_pair,
    lower_bound_check,
    quantum_brudno_experiment,
    random_density,
    typical_projection,
)
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
ADD_VM = str(REPO / "programs" / "add.vm")
TIGHT_LOOP_VM = str(REPO / "programs" / "tight_loop.vm")

QUARTER = np.diag([0.25, 0.75])
H_QUARTER = -(0.25 * math.log2(0.25) + 0.75 * math.log2(0.75))
H_FLIP = 0.4689955935892812  # -(0.1) log2(0.1) - (0.9) log2(0.9)


def check(problems: list, ok: bool, label: str) -> None:
    if not ok:
        problems.append(label)


def conclude(number: int, description: str, problems: list) -> None:
    verdict = "PASS" if not problems else "FAIL"
    print(f"{verdict} criterion {number}: {description}")
    assert not problems, f"criterion {number}: " + "; ".join(problems)


def read_program(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_program(fh.read())


def test_criterion_01_tight_loop_numbering_round_trip():
    started = time.perf_counter()
    problems = []
    program = read_program(TIGHT_LOOP_VM)
    numbers = [godel_instruction(i) for i in program.instructions]
    check(problems, numbers == [21, 46], f"instruction numbers {numbers} != [21, 46]")
    total = godel_program(program)
    check(problems, total == 2**21 * 3**46 - 1, "program number != 2^21 * 3^46 - 1")
    check(problems, program_from_number(total) == program, "decode(number) != program")
    elapsed = time.perf_counter() - started
    check(problems, elapsed < 1.0, f"took {elapsed:.2f}s >= 1s")
    conclude(1, "two-line loop numbers to 2^21*3^46-1 and round-trips", problems)


def test_criterion_02_interpreter_addition_and_divergence():
    started = time.perf_counter()
    problems = []
    adder = read_program(ADD_VM)
    bad = sum(
        1
        for x in range(26)
        for y in range(26)
        if run(adder, (x, y)) != Halted(x + y, run(adder, (x, y)).steps)
    )
    check(problems, bad == 0, f"{bad}/625 addition cases wrong")
    outcome = run(read_program(TIGHT_LOOP_VM), (), budget=10**6)
    check(
        problems,
        isinstance(outcome, OutOfBudget) and outcome.steps == 10**6,
        "loop halted (or wrong step count) within 10^6 steps",
    )
    elapsed = time.perf_counter() - started
    check(problems, elapsed < 10.0, f"took {elapsed:.2f}s >= 10s")
    conclude(2, "adder returns x+y on all 625 cases; loop exhausts 10^6 steps", problems)


def test_criterion_03_kraft_and_counting_on_the_deep_prefix_search():
    started = time.perf_counter()
    problems = []
    cache = dovetail(PREFIX, [(20, 100000)], jobs=8)
    total = kraft_total(cache)
    check(problems, isinstance(total, Fraction), "kraft sum is not exact")
    check(problems, total <= 1, f"kraft sum {total} > 1")
    check(
        problems,
        total.denominator & (total.denominator - 1) == 0,
        f"kraft sum {total} is not dyadic",
    )
    check(problems, structural_antichain(cache), "halting programs are not an antichain")
    for c in range(1, 17):
        n_below = count_below(cache, c)
        check(problems, n_below < 2**c, f"count_below({c}) = {n_below} >= 2^{c}")
    elapsed = time.perf_counter() - started
    check(problems, elapsed < 600.0, f"took {elapsed:.2f}s >= 10min")
    conclude(3, "kraft sum <= 1 exactly, antichain holds, counts beat 2^c", problems)


def test_criterion_04_estimates_monotone_under_budget_growth():
    problems = []
    schedules = [(12, 100), (16, 150), (20, 200)]
    for mode, upper in ((PLAIN, c_upper), (PREFIX, k_upper)):
        caches = [dovetail(mode, [s]) for s in schedules]
        for small, big in zip(caches, caches[1:]):
            for target in small.min_length_by_output():
                lo, hi = upper(big, target).value, upper(small, target).value
                check(
                    problems,
                    lo is not None and lo <= hi,
                    f"{mode} upper bound for {target!r} rose: {hi} -> {lo}",
                )
                if mode == PREFIX:
                    check(
                        problems,
                        m_lower(big, target) >= m_lower(small, target),
                        f"mass lower bound for {target!r} dropped",
                    )
    conclude(4, "upper bounds never rise, mass never falls, across 3 nested budgets", problems)


def test_criterion_05_block_entropy_rates_for_three_sources():
    problems = []
    fair = ks_rate(bernoulli([Fraction(1, 2), Fraction(1, 2)]), 12)
    check(problems, list(fair.ratios) == [1.0] * 12, "fair-coin H_n/n != 1.000000 exactly")
    quarter = ks_rate(bernoulli([Fraction(1, 4), Fraction(3, 4)]), 12)
    check(
        problems,
        abs(quarter.estimate - H_QUARTER) <= 1e-9,
        f"(1/4,3/4) rate {quarter.estimate} misses {H_QUARTER} by > 1e-9",
    )
    flip = ks_rate(
        markov(
            [Fraction(1, 2), Fraction(1, 2)],
            [[Fraction(9, 10), Fraction(1, 10)], [Fraction(1, 10), Fraction(9, 10)]],
            require_stationary=True,
        ),
        12,
    )
    check(
        problems,
        all(b <= a for a, b in zip(flip.ratios, flip.ratios[1:])),
        "flip-0.1 H_n/n is not non-increasing",
    )
    check(
        problems,
        abs(flip.estimate - 0.468996) <= 1e-3,
        f"flip-0.1 rate estimate {flip.estimate} misses 0.468996 by > 1e-3",
    )
    conclude(5, "fair rate exactly 1; (1/4,3/4) and flip-0.1 rates hit targets", problems)


def test_criterion_06_compressor_rates_track_entropy():
    started = time.perf_counter()
    problems = []
    cases = [
        (bernoulli([Fraction(1, 2), Fraction(1, 2)]), 1.0, "fair"),
        (bernoulli([Fraction(1, 4), Fraction(3, 4)]), H_QUARTER, "quarter"),
    ]
    for source, h, name in cases:
        report = brudno_experiment(source, 10**4, 20, backend="compressor", seed=0)
        check(problems, report.trials == 20 and report.found == 20, f"{name}: trials missing")
        check(
            problems,
            report.mean_rate is not None and abs(report.mean_rate - h) <= 0.05,
            f"{name}: mean rate {report.mean_rate} misses {h} by > 0.05",
        )
    elapsed = time.perf_counter() - started
    check(problems, elapsed < 60.0, f"took {elapsed:.2f}s >= 1min")
    conclude(6, "mean compressor rate within 0.05 bits of h for both coins", problems)


def test_criterion_07_refinement_entropy_identity():
    started = time.perf_counter()
    problems = []
    rng = np.random.default_rng(7)
    for trial in range(10):
        site = random_density(rng, 2)
        report = af_entropy_estimate(site, n_max=6)
        for n, value in zip(range(1, 7), report.entropies):
            gap = abs(value - (n * report.site_entropy + n))
            check(
                problems,
                gap <= 1e-7,
                f"state {trial}, n={n}: refinement identity off by {gap:.2e}",
            )
    elapsed = time.perf_counter() - started
    check(problems, elapsed < 60.0, f"took {elapsed:.2f}s >= 1min")
    conclude(7, "S(rho[Z^(n)]) = n S(site) + n to 1e-7 for 10 states, n <= 6", problems)


def test_criterion_08_purification_marginals_share_spectra():
    problems = []
    rng = np.random.default_rng(8)
    states = []
    for n in (1, 2, 3):
        site = random_density(rng, 2)
        chain = site
        for _ in range(n - 1):
            chain = np.kron(chain, site)
        states.append((n, chain, f"product n={n}"))
    states.append((3, random_density(rng, 8), "joint n=3"))
    for n, rho_n, name in states:
        report = af_purification_check(rho_n, site_dim=2, n=n)
        check(
            problems,
            report.spectrum_gap <= 1e-8,
            f"{name}: marginal spectra differ by {report.spectrum_gap:.2e}",
        )
    conclude(8, "system and environment marginals share spectra to 1e-8, n <= 3", problems)


def test_criterion_09_typical_projection_matches_classical_oracle():
    problems = []
    source = bernoulli([Fraction(1, 4), Fraction(3, 4)])
    item1_levels = []
    for n in range(1, 13):
        q = typical_projection(QUARTER, n, 0.1)
        cls = typical_set(source, n, 0.1)
        # The site spectrum sorts descending, so eigen-digit 0 is the
        # probability-3/4 symbol "1" of the classical source.
        swapped = {
            "".join("1" if d == 0 else "0" for d in digits) for digits in q.multi_indices
        }
        # members is None when the set is empty (nothing to materialize), and
        # the window is indeed empty at a few shallow depths.
        check(
            problems,
            swapped == set(cls.members or ()) and q.rank == cls.count,
            f"n={n}: eigen-index set differs from the classical typical set",
        )
        tail = sum(
            Fraction(1, 4) ** sum(digits) * Fraction(3, 4) ** (n - sum(digits))
            for digits in q.multi_indices
        )
        check(
            problems,
            abs(q.omega - float(tail)) <= 1e-10,
            f"n={n}: omega {q.omega} misses the exact binomial tail {float(tail)}",
        )
        if q.items["item1"]:
            item1_levels.append(n)
            check(
                problems,
                q.items["item2"] and q.items["item3"],
                f"n={n}: items 2-3 fail where item 1 holds",
            )
    # At this epsilon the item-1 weight threshold is out of reach below
    # n = 13, so the item-2/3 clause above is vacuous; record that honestly.
    check(problems, item1_levels == [], f"item 1 unexpectedly held at {item1_levels}")
    conclude(9, "eigen-index sets match the classical oracle exactly for n <= 12", problems)


def test_criterion_10_state_complexity_bound_properties():
    problems = []
    rng = np.random.default_rng(10)
    cache = dovetail(PREFIX, [(16, 200)])

    def extras(dim, count):
        return [(0.5 * random_density(rng, dim), f"extra-{i}") for i in range(count)]

    violations = 0
    for e in range(20):
        m = build_mu_hat(16, cache if e % 2 else None, extra=extras(16, e % 5))
        for _ in range(10):
            lo, hi = gacs_pair(random_density(rng, 16), m)
            violations += lo > hi + 1e-9
    check(problems, violations == 0, f"{violations}/200 pairs with lower > upper")

    m = build_mu_hat(16, cache, extra=extras(16, 3))
    mix = m.mixture()
    worst = min(
        np.linalg.eigvalsh(mix - float(c.weight) * c.padded(16)).min() for c in m.components
    )
    check(problems, worst >= -1e-10, f"component domination violated by {worst:.2e}")

    flat = build_mu_hat(32)
    for _ in range(5):
        lo, hi = gacs_pair(random_density(rng, 32), flat)
        check(problems, abs(lo - 6.0) <= 1e-9 and abs(hi - 6.0) <= 1e-9,
              f"flat-ensemble value ({lo}, {hi}) != log2(32) + 1")

    failed = 0
    for e in range(5):
        m = build_mu_hat(64, cache if e % 2 else None, extra=extras(64, e))
        for _ in range(40):
            report = lower_bound_check(
                random_density(rng, 64), m, k=float(rng.uniform(0.5, 8.0)), lam=2.0
            )
            failed += not report.passed
    check(problems, failed == 0, f"{failed}/200 spectral-projection triples failed")
    conclude(10, "bound order, domination, flat closed form, 200-triple sweep", problems)


def test_criterion_11_chain_rate_experiment():
    started = time.perf_counter()
    problems = []
    report = quantum_brudno_experiment(
        QUARTER, range(4, 13), 0.15, cache=dovetail(PREFIX, [(16, 200)]), samples=2, seed=7
    )
    onward = [
        level
        for level in report.levels
        if report.n_epsilon is not None and level.n >= report.n_epsilon
    ]
    check(
        problems,
        all(all(level.items[k] for k in ("item1", "item2", "item3")) for level in onward),
        "an item fails at or beyond the reported threshold level",
    )
    # At this depth the weight threshold (item 1) is still out of reach, so
    # the experiment must report no threshold level rather than invent one.
    check(problems, report.n_epsilon is None, f"n_epsilon = {report.n_epsilon}, expected none")
    check(
        problems,
        all(
            not all(level.items[k] for k in ("item1", "item2", "item3"))
            for level in report.levels
        ),
        "all items hold at some level, so n_epsilon should not be none",
    )
    last = report.levels[-1]
    window = 2 * 0.15 + 0.2
    check(
        problems,
        abs(last.rate - report.entropy_rate) <= window,
        f"n=12 rate {last.rate} outside {report.entropy_rate} +- {window}",
    )
    elapsed = time.perf_counter() - started
    check(problems, elapsed < 300.0, f"took {elapsed:.2f}s >= 5min")
    conclude(11, "items hold from the threshold on; n=12 rate within s +- 0.5", problems)


def test_criterion_12_reports_are_deterministic(tmp_path, monkeypatch):
    problems = []
    monkeypatch.chdir(tmp_path)
    (tmp_path / "s.json").write_text(
        json.dumps({"kind": "bernoulli", "probabilities": ["1/4", "3/4"]})
    )
    (tmp_path / "rho.json").write_text(
        json.dumps({"dim": 2, "entries": [["1/4", 0], [0, "3/4"]]})
    )
    commands = {
        "deep-search": [
            "kx", "search", "--mode", "prefix",
            "--max-len", "20", "--max-steps", "100000", "--jobs", "8",
        ],
        "coin-rates": [
            "cls", "brudno", "--n", "10000", "--trials", "20",
            "--backend", "compressor", "--seed", "0",
        ],
        "coin-rates-skewed": [
            "cls", "brudno", "--source", "s.json", "--n", "10000", "--trials", "20",
            "--backend", "compressor", "--seed", "0",
        ],
        "chain-rates": [
            "qc", "brudno", "--site", "rho.json",
            "--nrange", "4:12", "--eps", "0.15", "--seed", "7",
        ],
    }
    for name, argv in commands.items():
        out = tmp_path / f"{name}.json"
        blobs = []
        for attempt in ("first", "second"):
            monkeypatch.setenv("KXCHAIN_CACHE_DIR", str(tmp_path / f"{name}-{attempt}"))
            code = dispatch(argv + ["--out", str(out)])
            check(problems, code == 0, f"{name}: {attempt} run exited {code}")
            blobs.append(out.read_bytes())
        check(problems, blobs[0] == blobs[1], f"{name}: reports differ between runs")
    conclude(12, "search, coin-rate, and chain-rate reports are byte-identical", problems)
