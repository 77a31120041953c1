"""Finite-alphabet sources, block entropies, typical sets, and rate experiments.

Word probabilities are exact rationals (the chain rule never rounds); entropy
and log-probability leave exact arithmetic only at the final ``log2``.  Words
are strings of decimal digits ("011") or sequences of symbol indices.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from .complexity import EnumerationCache, c_upper, compress_proxy

__all__ = [
    "SourceModel",
    "bernoulli",
    "markov",
    "source_from_spec",
    "shannon_entropy",
    "block_entropy",
    "KSRateReport",
    "ks_rate",
    "TypicalSetReport",
    "typical_set",
    "delta_weight",
    "delta_weight_total",
    "plugin_semimeasure",
    "classical_gacs",
    "BrudnoReport",
    "brudno_experiment",
    "word_bits",
]

BLOCK_CAP = 1 << 22

Number = Union[int, float, str, Fraction]
Word = Union[str, Sequence[int]]


def _as_fraction(x: Number) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _as_symbols(word: Word, alphabet: int) -> tuple[int, ...]:
    if isinstance(word, str):
        syms = tuple(int(ch) for ch in word)
    else:
        syms = tuple(int(s) for s in word)
    for s in syms:
        if not 0 <= s < alphabet:
            raise ValueError(f"symbol {s} outside alphabet of size {alphabet}")
    return syms


@dataclass(frozen=True)
class SourceModel:
    """A Bernoulli or stationary-capable Markov source on {0, .., p-1}."""

    kind: str
    alphabet: int
    probs: tuple[Fraction, ...] = ()
    initial: tuple[Fraction, ...] = ()
    transition: tuple[tuple[Fraction, ...], ...] = ()

    def word_probability(self, word: Word) -> Fraction:
        """Exact cylinder measure of the word."""
        syms = _as_symbols(word, self.alphabet)
        if not syms:
            return Fraction(1)
        if self.kind == "bernoulli":
            out = Fraction(1)
            for s in syms:
                out *= self.probs[s]
            return out
        out = self.initial[syms[0]]
        for prev, cur in zip(syms, syms[1:]):
            out *= self.transition[prev][cur]
        return out

    def marginal(self) -> tuple[Fraction, ...]:
        return self.probs if self.kind == "bernoulli" else self.initial

    def entropy_rate(self) -> float:
        """The source's entropy per symbol in bits.

        For Bernoulli this is H of the symbol distribution; for Markov it is
        the initial-weighted entropy of the transition rows, which equals the
        KS rate when the initial distribution is stationary.
        """
        if self.kind == "bernoulli":
            return shannon_entropy(self.probs)
        return math.fsum(
            float(w) * shannon_entropy(row)
            for w, row in zip(self.initial, self.transition)
            if w > 0
        )

    def is_stationary(self, tol: float = 1e-12) -> bool:
        if self.kind == "bernoulli":
            return True
        pi = [float(x) for x in self.initial]
        for j in range(self.alphabet):
            pushed = math.fsum(pi[i] * float(self.transition[i][j]) for i in range(self.alphabet))
            if abs(pushed - pi[j]) > tol:
                return False
        return True

    def sample(self, rng: np.random.Generator, n: int) -> tuple[int, ...]:
        if self.kind == "bernoulli":
            p = np.array([float(x) for x in self.probs])
            return tuple(int(s) for s in rng.choice(self.alphabet, size=n, p=p / p.sum()))
        rows = np.array([[float(x) for x in row] for row in self.transition])
        rows = rows / rows.sum(axis=1, keepdims=True)
        init = np.array([float(x) for x in self.initial])
        out = [int(rng.choice(self.alphabet, p=init / init.sum()))]
        u = rng.random(n - 1)
        cum = np.cumsum(rows, axis=1)
        for k in range(n - 1):
            out.append(int(np.searchsorted(cum[out[-1]], u[k], side="right")))
        return tuple(out)


def _check_distribution(probs: Sequence[Fraction], what: str) -> None:
    if any(p < 0 for p in probs):
        raise ValueError(f"{what} has a negative entry")
    if abs(math.fsum(float(p) for p in probs) - 1.0) > 1e-12:
        raise ValueError(f"{what} does not sum to 1")


def bernoulli(probs: Sequence[Number]) -> SourceModel:
    ps = tuple(_as_fraction(p) for p in probs)
    if len(ps) < 2:
        raise ValueError("alphabet size must be at least 2")
    _check_distribution(ps, "symbol distribution")
    return SourceModel(kind="bernoulli", alphabet=len(ps), probs=ps)


def markov(
    initial: Sequence[Number],
    transition: Sequence[Sequence[Number]],
    require_stationary: bool = False,
) -> SourceModel:
    init = tuple(_as_fraction(p) for p in initial)
    rows = tuple(tuple(_as_fraction(p) for p in row) for row in transition)
    p = len(init)
    if p < 2:
        raise ValueError("alphabet size must be at least 2")
    if len(rows) != p or any(len(r) != p for r in rows):
        raise ValueError("transition matrix must be square and match the initial vector")
    _check_distribution(init, "initial distribution")
    for i, row in enumerate(rows):
        _check_distribution(row, f"transition row {i}")
    source = SourceModel(kind="markov", alphabet=p, initial=init, transition=rows)
    if require_stationary and not source.is_stationary():
        raise ValueError("initial distribution is not stationary for the transition matrix")
    return source


def source_from_spec(spec: Mapping) -> tuple[SourceModel, Optional[int]]:
    """Build a source from a parsed JSON object {kind, alphabet, probabilities, seed}.

    Probabilities may be numbers or strings like "1/4" (parsed exactly).
    """
    kind = spec.get("kind")
    seed = spec.get("seed")
    probs = spec.get("probabilities")
    if kind == "bernoulli":
        source = bernoulli(probs)
    elif kind == "markov":
        source = markov(
            probs["initial"],
            probs["transition"],
            require_stationary=bool(spec.get("stationary", False)),
        )
    else:
        raise ValueError(f"unknown source kind {kind!r}")
    if "alphabet" in spec and int(spec["alphabet"]) != source.alphabet:
        raise ValueError("alphabet field disagrees with the probability table")
    return source, seed


# ---------------------------------------------------------------------------
# entropies


def shannon_entropy(probs: Sequence[Number]) -> float:
    """-sum p log2 p in bits, with 0 log 0 = 0."""
    vals = [float(_as_fraction(p)) for p in probs]
    if any(v < 0 for v in vals):
        raise ValueError("negative probability")
    if abs(math.fsum(vals) - 1.0) > 1e-12:
        raise ValueError("probabilities do not sum to 1")
    return -math.fsum(v * math.log2(v) for v in vals if v > 0)


def _layer_distributions(source: SourceModel, n: int) -> "np.ndarray":
    """Probabilities of all p^n words in base-p index order (float)."""
    p = source.alphabet
    if p**n > BLOCK_CAP:
        raise ValueError(f"{p}^{n} words exceed the enumeration cap {BLOCK_CAP}")
    if source.kind == "bernoulli":
        rows = np.tile(np.array([float(x) for x in source.probs]), (p, 1))
        start = np.array([float(x) for x in source.probs])
    else:
        rows = np.array([[float(x) for x in row] for row in source.transition])
        start = np.array([float(x) for x in source.initial])
    dist = start
    for _ in range(n - 1):
        last = np.arange(dist.size) % p
        dist = (dist[:, None] * rows[last]).reshape(-1)
    return dist


def block_entropy(source: SourceModel, n: int) -> float:
    """Entropy in bits of the length-n word distribution, by full enumeration."""
    if n < 1:
        raise ValueError("block length must be positive")
    dist = _layer_distributions(source, n)
    nz = dist[dist > 0]
    return float(-np.sum(nz * np.log2(nz)))


@dataclass(frozen=True)
class KSRateReport:
    """Finite-n entropy-rate diagnostics.

    ``ratios[k]`` is H_{k+1}/(k+1) and ``differences[k]`` is H_{k+1} - H_k
    (with H_0 = 0, so the first difference is H_1).  ``estimate`` is the last
    difference: for Markov sources with a stationary start it equals the true
    rate from n = 2 on, far before H_n/n gets close.  ``min_ratio`` is the
    least ratio seen, the finite-n stand-in for inf_n H_n/n.
    """

    n_max: int
    ratios: tuple[float, ...]
    differences: tuple[float, ...]
    min_ratio: float
    estimate: float


def ks_rate(source: SourceModel, n_max: int) -> KSRateReport:
    if n_max < 1:
        raise ValueError("n_max must be positive")
    blocks = [block_entropy(source, n) for n in range(1, n_max + 1)]
    ratios = tuple(h / n for n, h in enumerate(blocks, start=1))
    diffs = tuple(b - a for a, b in zip([0.0] + blocks, blocks))
    return KSRateReport(
        n_max=n_max,
        ratios=ratios,
        differences=diffs,
        min_ratio=min(ratios),
        estimate=diffs[-1],
    )


# ---------------------------------------------------------------------------
# typical sets


@dataclass(frozen=True)
class TypicalSetReport:
    n: int
    eps: float
    entropy_rate: float
    count: int
    measure: Fraction
    log2_count: float
    log2_cardinality_cap: float  # n * (h + eps)
    cardinality_bound_ok: bool
    members: Optional[tuple[str, ...]] = None


def _log2_fraction(x: Fraction) -> float:
    if x <= 0:
        return float("-inf")
    return math.log2(x.numerator) - math.log2(x.denominator)


def typical_set(
    source: SourceModel,
    n: int,
    eps: float,
    member_cap: int = 4096,
) -> TypicalSetReport:
    """Exact measure and cardinality of the entropy-typical words of length n.

    Binary Bernoulli sources are grouped by type class (number of ones), so n
    in the thousands stays exact; other sources enumerate all words under the
    cap.  Membership is decided on log2 word probabilities in floats, which
    only matters on knife-edge boundaries.
    """
    if n < 1:
        raise ValueError("block length must be positive")
    if eps <= 0:
        raise ValueError("eps must be positive")
    h = source.entropy_rate()
    lo = -n * (h + eps)
    hi = -n * (h - eps)

    if source.kind == "bernoulli" and source.alphabet == 2:
        p0, p1 = source.probs
        count = 0
        measure = Fraction(0)
        accepted_ones: list[int] = []
        for k in range(n + 1):
            nu = p1**k * p0 ** (n - k)
            logp = _log2_fraction(nu)
            if lo <= logp <= hi:
                ways = math.comb(n, k)
                count += ways
                measure += ways * nu
                accepted_ones.append(k)
        members = None
        if 0 < count <= member_cap and 2**n <= BLOCK_CAP:
            ones = set(accepted_ones)
            members = tuple(
                format(idx, f"0{n}b")
                for idx in range(2**n)
                if bin(idx).count("1") in ones
            )
    else:
        p = source.alphabet
        if p**n > BLOCK_CAP:
            raise ValueError(f"{p}^{n} words exceed the enumeration cap {BLOCK_CAP}")
        count = 0
        measure = Fraction(0)
        collected: list[str] = []
        for idx in range(p**n):
            word = _index_to_word(idx, n, p)
            nu = source.word_probability(word)
            if nu == 0:
                continue
            logp = _log2_fraction(nu)
            if lo <= logp <= hi:
                count += 1
                measure += nu
                if len(collected) < member_cap:
                    collected.append(word)
        members = tuple(collected) if count <= member_cap else None

    log2_count = math.log2(count) if count else float("-inf")
    return TypicalSetReport(
        n=n,
        eps=eps,
        entropy_rate=h,
        count=count,
        measure=measure,
        log2_count=log2_count,
        log2_cardinality_cap=n * (h + eps),
        cardinality_bound_ok=log2_count <= n * (h + eps),
        members=members,
    )


def _index_to_word(idx: int, n: int, p: int) -> str:
    syms = []
    for _ in range(n):
        syms.append(str(idx % p))
        idx //= p
    return "".join(reversed(syms))


# ---------------------------------------------------------------------------
# Gacs complexity against a semi-measure snapshot


def delta_weight(n: int) -> float:
    """The length weight 1/(n log2^2 n), defined for n >= 2."""
    if n < 2:
        raise ValueError("length weights start at n = 2")
    return 1.0 / (n * math.log2(n) ** 2)


@lru_cache(maxsize=1)
def delta_weight_total() -> float:
    """Sum of delta_weight over all lengths >= 2.

    Direct summation converges like 1/log M, hopeless in floats, so the tail
    from M = 10^5 is folded in with the Euler-Maclaurin correction
    integral + f(M)/2; the leftover error is below 10^-12.
    """
    m = 100_000
    head = math.fsum(delta_weight(k) for k in range(2, m))
    tail = math.log(2) ** 2 / math.log(m) + delta_weight(m) / 2
    return head + tail


def _literal_floor_bits(word_bits_len: int, c_lit: int) -> float:
    if word_bits_len < 1:
        raise ValueError("empty words have no literal floor")
    return float(word_bits_len + 2 * math.ceil(math.log2(word_bits_len)) + c_lit)


def word_bits(word: Word, alphabet: int) -> str:
    """Binary rendering of a word, ceil(log2 p) bits per symbol."""
    syms = _as_symbols(word, alphabet)
    width = max(1, (alphabet - 1).bit_length())
    return "".join(format(s, f"0{width}b") for s in syms)


def classical_gacs(
    source: SourceModel,
    n: int,
    semi_measure: Union[Callable[[str], object], Mapping[str, object]],
    c_lit: int = 8,
) -> float:
    """Source-averaged code length -sum nu(w) log2 mu(w) in bits.

    ``semi_measure`` maps length-n words to masses.  Words the snapshot
    misses (mass absent, zero, or negative) fall back to the literal-listing
    floor 2^-(l + 2 ceil(log2 l) + c_lit) with l the word's bit length, so
    the average stays finite.
    """
    if n < 1:
        raise ValueError("block length must be positive")
    lookup = semi_measure.get if isinstance(semi_measure, Mapping) else semi_measure
    p = source.alphabet
    if p**n > BLOCK_CAP:
        raise ValueError(f"{p}^{n} words exceed the enumeration cap {BLOCK_CAP}")
    width = max(1, (p - 1).bit_length())
    floor_bits = _literal_floor_bits(n * width, c_lit)
    terms = []
    for idx in range(p**n):
        word = _index_to_word(idx, n, p)
        nu = source.word_probability(word)
        if nu == 0:
            continue
        mass = lookup(word)
        if isinstance(mass, Fraction) and mass > 0:
            bits = -_log2_fraction(mass)
        elif mass is not None and not isinstance(mass, Fraction) and float(mass) > 0:
            bits = -math.log2(float(mass))
        else:
            bits = floor_bits
        terms.append(float(nu) * bits)
    return math.fsum(terms)


def plugin_semimeasure(source: SourceModel, n: int) -> Callable[[str], float]:
    """The source's own cylinder measure, weighted into a semi-measure.

    mu(w) = delta(|w|) nu(w) / sum(delta): summed over every word of every
    length this has total mass 1, so it is an admissible snapshot, and
    classical_gacs against it collapses to
    H_n + log2(n log2^2 n) + log2(sum delta) exactly.
    """
    scale = delta_weight(n) / delta_weight_total()

    def mass(word: str) -> float:
        return scale * float(source.word_probability(word))

    return mass


# ---------------------------------------------------------------------------
# the finite-n rate experiment


@dataclass(frozen=True)
class BrudnoTrial:
    trial: int
    rate: Optional[float]


@dataclass(frozen=True)
class BrudnoReport:
    source_kind: str
    n: int
    trials: int
    backend: str
    entropy_rate: float
    rows: tuple[BrudnoTrial, ...]
    mean_rate: Optional[float]
    stdev_rate: Optional[float]
    found: int = field(default=0)

    def csv_rows(self) -> list[tuple]:
        return [
            (self.n, row.trial, row.rate, self.entropy_rate, self.backend)
            for row in self.rows
        ]


def brudno_experiment(
    source: SourceModel,
    n: int,
    trials: int,
    backend: str = "compressor",
    seed: int = 0,
    cache: Optional[EnumerationCache] = None,
) -> BrudnoReport:
    """Sample words and compare per-symbol description length with the entropy rate.

    Each trial draws its own generator from (seed, trial), so trial t is the
    same no matter how many trials run or in what order.  The compressor
    backend rates a word at compress_proxy(bits)/n; the search-cache backend
    looks the word's bit string up in a plain-mode enumeration cache and
    reports None for words without a recorded witness.
    """
    if backend not in ("compressor", "search-cache"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "search-cache" and cache is None:
        raise ValueError("search-cache backend needs an enumeration cache")
    rows = []
    rates = []
    for t in range(trials):
        rng = np.random.default_rng((seed, t))
        word = source.sample(rng, n)
        bits = word_bits(word, source.alphabet)
        if backend == "compressor":
            rate: Optional[float] = compress_proxy(bits) / n
        else:
            est = c_upper(cache, bits)
            rate = est.value / n if est.value is not None else None
        rows.append(BrudnoTrial(trial=t, rate=rate))
        if rate is not None:
            rates.append(rate)
    mean = statistics.fmean(rates) if rates else None
    spread = statistics.stdev(rates) if len(rates) > 1 else None
    return BrudnoReport(
        source_kind=source.kind,
        n=n,
        trials=trials,
        backend=backend,
        entropy_rate=source.entropy_rate(),
        rows=tuple(rows),
        mean_rate=mean,
        stdev_rate=spread,
        found=len(rates),
    )
