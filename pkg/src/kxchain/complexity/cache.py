"""Dovetailed enumeration of halting programs with a persistent record cache.

The enumeration proceeds in rounds.  Each round is a pair ``(max_len,
max_steps)``: every candidate string of length at most ``max_len`` gets
``max_steps`` interpreter steps.  A candidate that halts contributes one
record ``(p, e, y, output, steps, round)``; a candidate recorded in an
earlier round is never re-run, so records are append-only and estimates
derived from the cache can only improve as rounds are added.

On disk the cache is JSON Lines: a header object followed by one object per
record in (round, length, lex) order.  Serialization is canonical (sorted
keys, no floats), so equal caches are byte-identical and the content hash is
stable across platforms.
"""

from __future__ import annotations

import hashlib
import json
import multiprocessing
import os
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .machine import MachineResult, PLAIN, PREFIX, candidates, run_machine

__all__ = [
    "CACHE_ENV_VAR",
    "HaltRecord",
    "EnumerationCache",
    "dovetail",
    "load_cache",
    "save_cache",
]

CACHE_ENV_VAR = "KXCHAIN_CACHE_DIR"

_FORMAT = "kxchain-enumeration-cache"
_VERSION = 1


@dataclass(frozen=True)
class HaltRecord:
    """One halting computation discovered by the enumeration."""

    program: str
    e: int
    y: int
    output: str
    steps: int
    round_index: int

    def to_json(self) -> str:
        payload = {
            "e": self.e,
            "out": self.output,
            "p": self.program,
            "round": self.round_index,
            "steps": self.steps,
            "y": self.y,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @staticmethod
    def from_json(line: str) -> "HaltRecord":
        obj = json.loads(line)
        return HaltRecord(
            program=obj["p"],
            e=obj["e"],
            y=obj["y"],
            output=obj["out"],
            steps=obj["steps"],
            round_index=obj["round"],
        )


@dataclass
class EnumerationCache:
    mode: str
    rounds: list[tuple[int, int]] = field(default_factory=list)
    records: dict[str, HaltRecord] = field(default_factory=dict)

    def header_json(self) -> str:
        payload = {
            "format": _FORMAT,
            "mode": self.mode,
            "rounds": [list(r) for r in self.rounds],
            "version": _VERSION,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    def serialize(self) -> str:
        lines = [self.header_json()]
        lines.extend(rec.to_json() for rec in self.records.values())
        return "\n".join(lines) + "\n"

    def content_hash(self) -> str:
        return hashlib.sha256(self.serialize().encode("ascii")).hexdigest()

    def min_length_by_output(self) -> dict[str, int]:
        """Shortest recorded program length for every output string."""
        best: dict[str, int] = {}
        for rec in self.records.values():
            n = len(rec.program)
            if rec.output not in best or n < best[rec.output]:
                best[rec.output] = n
        return best

    def witnesses(self, output: str) -> list[HaltRecord]:
        """All records producing ``output``, shortest programs first."""
        hits = [r for r in self.records.values() if r.output == output]
        hits.sort(key=lambda r: (len(r.program), r.program))
        return hits

    def total_budget(self) -> int:
        """Candidate-steps product summed over rounds (a crude work bound)."""
        return sum(((1 << (length + 1)) - 1) * steps for length, steps in self.rounds)


def _run_chunk(args: tuple[str, list[str], int, int]) -> list[HaltRecord]:
    mode, chunk, max_steps, round_index = args
    out: list[HaltRecord] = []
    for bits in chunk:
        result: Optional[MachineResult] = run_machine(mode, bits, max_steps)
        if result is not None:
            out.append(
                HaltRecord(bits, result.e, result.y, result.output, result.steps, round_index)
            )
    return out


def _chunked(items: list[str], size: int) -> Iterable[list[str]]:
    for i in range(0, len(items), size):
        yield items[i : i + size]


def dovetail(
    mode: str,
    schedule: Sequence[tuple[int, int]],
    cache: Optional[EnumerationCache] = None,
    jobs: int = 1,
) -> EnumerationCache:
    """Extend (or create) a cache by running the rounds of ``schedule``.

    Rounds already present in the cache are skipped, so repeating a call with
    the same schedule is a no-op and re-running a prefix of a longer schedule
    before the full one yields the identical final cache.  Candidates whose
    program string is already recorded keep their original record.
    """
    if mode not in (PLAIN, PREFIX):
        raise ValueError(f"unknown machine mode {mode!r}")
    if cache is None:
        cache = EnumerationCache(mode=mode)
    elif cache.mode != mode:
        raise ValueError(f"cache was built in {cache.mode!r} mode, not {mode!r}")

    for max_len, max_steps in schedule:
        if max_len < 0 or max_steps < 0:
            raise ValueError("schedule entries must be non-negative")
        rnd = (int(max_len), int(max_steps))
        if rnd in cache.rounds:
            continue
        round_index = len(cache.rounds)
        pending = [p for p in candidates(mode, max_len) if p not in cache.records]
        if jobs > 1 and len(pending) > 4096:
            size = max(1024, len(pending) // (jobs * 8))
            tasks = [(mode, chunk, max_steps, round_index) for chunk in _chunked(pending, size)]
            with multiprocessing.Pool(jobs) as pool:
                results = pool.map(_run_chunk, tasks)
            found = [rec for chunk in results for rec in chunk]
        else:
            found = _run_chunk((mode, pending, max_steps, round_index))
        for rec in found:
            cache.records[rec.program] = rec
        cache.rounds.append(rnd)
    return cache


def save_cache(cache: EnumerationCache, path: str) -> None:
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="ascii") as fh:
            fh.write(cache.serialize())
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"cannot persist enumeration cache to {path}: {exc}") from exc


def load_cache(path: str) -> EnumerationCache:
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise OSError(f"cannot read enumeration cache from {path}: {exc}") from exc
    if not lines:
        raise ValueError(f"{path}: empty cache file")
    header = json.loads(lines[0])
    if header.get("format") != _FORMAT or header.get("version") != _VERSION:
        raise ValueError(f"{path}: not a version-{_VERSION} {_FORMAT} file")
    cache = EnumerationCache(mode=header["mode"])
    cache.rounds = [tuple(r) for r in header["rounds"]]
    for line in lines[1:]:
        rec = HaltRecord.from_json(line)
        cache.records[rec.program] = rec
    return cache


def default_cache_dir() -> str:
    return os.environ.get(CACHE_ENV_VAR, os.path.join(os.path.expanduser("~"), ".cache", "kxchain"))
