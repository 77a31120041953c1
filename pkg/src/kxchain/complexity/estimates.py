"""Upper and lower estimates of program-length complexity from a record cache.

All masses are exact dyadic rationals (``fractions.Fraction`` with power-of-two
denominators); floating point enters only when a caller formats a report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .cache import EnumerationCache
from .machine import PLAIN, PREFIX, split_prefix

__all__ = [
    "BOLTZMANN_CONSTANT",
    "ComplexityEstimate",
    "c_upper",
    "k_upper",
    "m_lower",
    "kraft_total",
    "is_prefix_free",
    "count_below",
    "prefix_wrap_bound",
    "landauer_cost",
    "structural_antichain",
]

# CODATA 2018 exact value, J/K.
BOLTZMANN_CONSTANT = 1.380649e-23


@dataclass(frozen=True)
class ComplexityEstimate:
    """An upper bound on program length for one target string.

    ``value`` is None while no witness has been enumerated.  Because records
    are append-only and the bound is a minimum over witnesses, re-running the
    search with a larger schedule can only lower ``value`` or fill it in.
    """

    target: str
    mode: str
    value: Optional[int]
    witness: Optional[str]
    budget: int


def c_upper(cache: EnumerationCache, target: str) -> ComplexityEstimate:
    """Shortest recorded plain program for ``target``."""
    if cache.mode != PLAIN:
        raise ValueError("c_upper needs a plain-mode cache")
    return _estimate(cache, target)


def k_upper(cache: EnumerationCache, target: str) -> ComplexityEstimate:
    """Shortest recorded self-delimiting program for ``target``."""
    if cache.mode != PREFIX:
        raise ValueError("k_upper needs a prefix-mode cache")
    return _estimate(cache, target)


def _estimate(cache: EnumerationCache, target: str) -> ComplexityEstimate:
    hits = cache.witnesses(target)
    if hits:
        best = hits[0]
        return ComplexityEstimate(target, cache.mode, len(best.program), best.program, cache.total_budget())
    return ComplexityEstimate(target, cache.mode, None, None, cache.total_budget())


def m_lower(cache: EnumerationCache, target: str) -> Fraction:
    """Algorithmic-probability lower bound: sum of 2^-len over halting programs
    for ``target`` recorded so far.  Exact dyadic arithmetic throughout."""
    return sum(
        (Fraction(1, 1 << len(rec.program)) for rec in cache.witnesses(target)),
        Fraction(0),
    )


def kraft_total(cache: EnumerationCache) -> Fraction:
    """Sum of 2^-len over every recorded halting program."""
    return sum(
        (Fraction(1, 1 << len(rec.program)) for rec in cache.records.values()),
        Fraction(0),
    )


def is_prefix_free(programs: list[str]) -> bool:
    """True when no string in the list is a proper prefix of another."""
    ordered = sorted(programs)
    for a, b in zip(ordered, ordered[1:]):
        if b.startswith(a) and a != b:
            return False
    return True


def count_below(cache: EnumerationCache, c: int) -> int:
    """Number of distinct outputs whose best recorded program is shorter than c.

    Always below 2^c: a witness shorter than c bits is one of the fewer than
    2^c strings of length < c, and distinct outputs need distinct witnesses.
    """
    return sum(1 for n in cache.min_length_by_output().values() if n < c)


def prefix_wrap_bound(plain_estimate: ComplexityEstimate) -> Optional[int]:
    """Length of the self-delimited wrapping 1^n 0 p of a plain witness p.

    Gives k_upper(x) <= 2 * c_upper(x) + 1 whenever a plain witness exists;
    the prefix machine accepts the wrapped string by construction.
    """
    if plain_estimate.value is None:
        return None
    return 2 * plain_estimate.value + 1


def landauer_cost(bits: float, temperature: float) -> float:
    """Minimum heat in joules for erasing ``bits`` at ``temperature`` kelvin."""
    if bits < 0:
        raise ValueError("bit count must be non-negative")
    if temperature < 0:
        raise ValueError("temperature must be non-negative")
    return bits * BOLTZMANN_CONSTANT * temperature * math.log(2)


def structural_antichain(cache: EnumerationCache) -> bool:
    """Check the recorded prefix-mode programs form an antichain.

    True by construction for the 1^n 0 payload format; the explicit check
    exists so reports can assert it on the actual cache contents.
    """
    programs = list(cache.records)
    if cache.mode == PREFIX and any(split_prefix(p) is None for p in programs):
        return False
    return is_prefix_free(programs)
