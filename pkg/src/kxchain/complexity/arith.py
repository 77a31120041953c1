"""Adaptive binary arithmetic coding as a cheap stand-in for program length.

The model is the Krichevsky-Trofimov estimator: after seeing c zeros and d
ones, the next bit is predicted to be 1 with probability (d + 1/2)/(c + d + 1).
Scaled by two, the frequencies are the odd integers 2c+1 and 2d+1 with total
2(c+d)+2, which keeps the coder in exact integer arithmetic.

The coder is the textbook 32-bit range coder: the interval [low, high] is
narrowed by the symbol's cumulative frequencies, renormalised one bit at a
time, with underflow ("pending") bits flushed when the next decided bit
appears.  Compressed output is framed with an Elias gamma code of n+1 so the
empty string costs exactly the one-bit header and decoding is self-contained.
"""

from __future__ import annotations

__all__ = ["compress_bits", "decompress_bits", "compress_proxy"]

_STATE_BITS = 32
_MASK = (1 << _STATE_BITS) - 1
_TOP = 1 << (_STATE_BITS - 1)
_SECOND = 1 << (_STATE_BITS - 2)
_MIN_RANGE = _SECOND + 2


def _gamma_encode(m: int) -> str:
    """Elias gamma code of a positive integer."""
    if m < 1:
        raise ValueError("gamma code needs a positive integer")
    body = bin(m)[2:]
    return "0" * (len(body) - 1) + body


def _gamma_decode(bits: str, pos: int) -> tuple[int, int]:
    zeros = 0
    while pos + zeros < len(bits) and bits[pos + zeros] == "0":
        zeros += 1
    end = pos + zeros + zeros + 1
    if end > len(bits):
        raise ValueError("truncated gamma header")
    return int(bits[pos + zeros : end], 2), end


class _KTCounts:
    __slots__ = ("zeros", "ones")

    def __init__(self) -> None:
        self.zeros = 0
        self.ones = 0

    def frequencies(self) -> tuple[int, int, int]:
        """(cumulative low of symbol 1, total) style triple: f0, f1, total."""
        f0 = 2 * self.zeros + 1
        f1 = 2 * self.ones + 1
        return f0, f1, f0 + f1

    def update(self, bit: int) -> None:
        if bit:
            self.ones += 1
        else:
            self.zeros += 1


class _Encoder:
    def __init__(self) -> None:
        self.low = 0
        self.high = _MASK
        self.pending = 0
        self.out: list[str] = []

    def encode(self, bit: int, counts: _KTCounts) -> None:
        f0, _, total = counts.frequencies()
        span = self.high - self.low + 1
        if bit:
            self.low = self.low + span * f0 // total
        else:
            self.high = self.low + span * f0 // total - 1
        while True:
            if self.high < _TOP:
                self._emit(0)
            elif self.low >= _TOP:
                self._emit(1)
                self.low -= _TOP
                self.high -= _TOP
            elif self.low >= _SECOND and self.high < _TOP + _SECOND:
                self.pending += 1
                self.low -= _SECOND
                self.high -= _SECOND
            else:
                break
            self.low = (self.low << 1) & _MASK
            self.high = ((self.high << 1) | 1) & _MASK

    def _emit(self, bit: int) -> None:
        self.out.append(str(bit))
        if self.pending:
            self.out.append(str(1 - bit) * self.pending)
            self.pending = 0

    def finish(self) -> str:
        self.pending += 1
        self._emit(1 if self.low >= _SECOND else 0)
        return "".join(self.out)


class _Decoder:
    def __init__(self, bits: str) -> None:
        self.bits = bits
        self.pos = 0
        self.low = 0
        self.high = _MASK
        self.code = 0
        for _ in range(_STATE_BITS):
            self.code = (self.code << 1) | self._read()

    def _read(self) -> int:
        bit = 1 if self.pos < len(self.bits) and self.bits[self.pos] == "1" else 0
        self.pos += 1
        return bit

    def decode(self, counts: _KTCounts) -> int:
        f0, _, total = counts.frequencies()
        span = self.high - self.low + 1
        split = self.low + span * f0 // total
        if self.code >= split:
            bit = 1
            self.low = split
        else:
            bit = 0
            self.high = split - 1
        while True:
            if self.high < _TOP:
                pass
            elif self.low >= _TOP:
                self.low -= _TOP
                self.high -= _TOP
                self.code -= _TOP
            elif self.low >= _SECOND and self.high < _TOP + _SECOND:
                self.low -= _SECOND
                self.high -= _SECOND
                self.code -= _SECOND
            else:
                break
            self.low = (self.low << 1) & _MASK
            self.high = ((self.high << 1) | 1) & _MASK
            self.code = ((self.code << 1) | self._read()) & _MASK
        return bit


def compress_bits(bits: str) -> str:
    """Compress a bit string; the result decodes back with decompress_bits."""
    if any(b not in "01" for b in bits):
        raise ValueError("input must be a string over {0, 1}")
    if len(bits) >= 1 << 29:
        raise ValueError("input too long for the 32-bit coder")
    header = _gamma_encode(len(bits) + 1)
    if not bits:
        return header
    counts = _KTCounts()
    enc = _Encoder()
    for ch in bits:
        bit = 1 if ch == "1" else 0
        enc.encode(bit, counts)
        counts.update(bit)
    return header + enc.finish()


def decompress_bits(code: str) -> str:
    n_plus_1, pos = _gamma_decode(code, 0)
    n = n_plus_1 - 1
    if n == 0:
        return ""
    counts = _KTCounts()
    dec = _Decoder(code[pos:])
    out: list[str] = []
    for _ in range(n):
        bit = dec.decode(counts)
        out.append("1" if bit else "0")
        counts.update(bit)
    return "".join(out)


def compress_proxy(bits: str) -> int:
    """Length in bits of the framed compressed form of ``bits``."""
    return len(compress_bits(bits))
