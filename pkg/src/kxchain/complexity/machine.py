"""Universal machines over bit-string programs, in plain and prefix-free modes.

A plain program string p is read as the natural number ``str_encode(p)`` and
unpaired into ``(e, y)``; the machine then runs register program number ``e``
on the single input ``y`` and emits ``str_decode`` of the Y register.  Because
``e`` is the exponent part of the unpairing, it is bounded by ``len(p) + 1``,
so decoding stays cheap at any program length worth enumerating.

The prefix-free machine accepts exactly the strings ``1^n 0 payload`` with
``len(payload) == n`` and delegates the payload to the plain machine.  That
format is a prefix-free set by construction, so no behavioural analysis is
needed to certify the antichain property.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from ..codec import str_decode, str_encode, unpair
from ..langvm import Halted, program_from_number, run

__all__ = ["PLAIN", "PREFIX", "MachineResult", "run_machine", "candidates", "wrap_prefix"]

PLAIN = "plain"
PREFIX = "prefix"


@dataclass(frozen=True)
class MachineResult:
    output: str
    steps: int
    e: int
    y: int


def _run_plain(bits: str, max_steps: int) -> Optional[MachineResult]:
    e, y = unpair(str_encode(bits))
    outcome = run(program_from_number(e), (y,), budget=max_steps)
    if isinstance(outcome, Halted):
        return MachineResult(str_decode(outcome.output), outcome.steps, e, y)
    return None


def split_prefix(bits: str) -> Optional[str]:
    """Return the payload when ``bits`` is exactly 1^n 0 payload_n, else None."""
    n = len(bits) - len(bits.lstrip("1"))
    body = bits[n:]
    if not body or body[0] != "0" or len(body) != n + 1:
        return None
    return body[1:]


def wrap_prefix(payload: str) -> str:
    """Self-delimit a plain program for the prefix-free machine."""
    return "1" * len(payload) + "0" + payload


def run_machine(mode: str, bits: str, max_steps: int) -> Optional[MachineResult]:
    """Run one candidate program; None when it rejects or exhausts the budget."""
    if mode == PLAIN:
        return _run_plain(bits, max_steps)
    if mode == PREFIX:
        payload = split_prefix(bits)
        if payload is None:
            return None
        return _run_plain(payload, max_steps)
    raise ValueError(f"unknown machine mode {mode!r}")


def candidates(mode: str, max_len: int) -> Iterator[str]:
    """All candidate program strings of length <= max_len in (length, lex) order.

    In prefix mode only the structurally accepted strings are yielded; the
    remaining strings reject in O(1) and never produce records.
    """
    if mode == PLAIN:
        for length in range(max_len + 1):
            for v in range(1 << length):
                yield format(v, f"0{length}b") if length else ""
    elif mode == PREFIX:
        for n in range((max_len + 1) // 2):
            head = "1" * n + "0"
            for v in range(1 << n):
                yield head + (format(v, f"0{n}b") if n else "")
    else:
        raise ValueError(f"unknown machine mode {mode!r}")


def candidate_count(mode: str, max_len: int) -> int:
    """Size of the candidate universe of length <= max_len (all bit strings)."""
    return (1 << (max_len + 1)) - 1
