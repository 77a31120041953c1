"""Bijective encodings between small mathematical objects and naturals.

Everything in this module is exact integer arithmetic.  The encodings are:

* ``pair``/``unpair``       -- pairs of naturals        <-> naturals
* ``encode_list``           -- finite lists of naturals <-> naturals
* ``str_encode``            -- bit strings              <-> naturals
* ``rational_encode``       -- signed rationals         -> naturals (injective)
* ``matrix_encode``         -- rational-complex matrices -> naturals (injective)
* ``omega_to_nat`` (eta)    -- finite-support ZZ->{0,1} maps <-> naturals
* ``omega_to_int`` (nu)     -- the same maps            <-> signed integers
* ``zeta``                  -- pairs of such maps       <-> one map

Bit strings are ordinary ``str`` objects over ``'0'``/``'1'`` (position k in
the string is coefficient a_k).  Finite-support maps are ``frozenset`` objects
holding the integer sites whose bit is 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Optional, Sequence

__all__ = [
    "pair",
    "unpair",
    "encode_list",
    "decode_list",
    "str_encode",
    "str_decode",
    "rational_encode",
    "rational_decode",
    "ElementaryMatrix",
    "matrix_encode",
    "matrix_decode",
    "OmegaElement",
    "omega_to_nat",
    "nat_to_omega",
    "omega_to_int",
    "int_to_omega",
    "zeta",
    "zeta_inverse",
]

# Largest prime the list decoder is willing to walk to.  Numbers whose
# factorization needs a bigger prime are refused rather than ground through.
PRIME_LIMIT = 1_000_003


def _check_nat(n: int, name: str = "value") -> int:
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {n!r}")
    return n


# ---------------------------------------------------------------------------
# Pairing
# ---------------------------------------------------------------------------

def pair(x: int, y: int) -> int:
    """Encode the pair (x, y) as 2^x * (2y + 1) - 1."""
    _check_nat(x, "x")
    _check_nat(y, "y")
    return (1 << x) * (2 * y + 1) - 1


def unpair(z: int) -> tuple[int, int]:
    """Invert :func:`pair`; x is the 2-adic valuation of z + 1."""
    _check_nat(z, "z")
    m = z + 1
    x = (m & -m).bit_length() - 1  # count of trailing zero bits
    y = ((m >> x) - 1) // 2
    return x, y


# ---------------------------------------------------------------------------
# Lists of naturals via prime exponents
# ---------------------------------------------------------------------------

_prime_cache: list[int] = [2, 3]
_prime_composites: dict[int, int] = {9: 6}
_prime_cursor = 5


def _extend_primes() -> None:
    """Grow the shared prime table by one prime (incremental sieve)."""
    global _prime_cursor
    n = _prime_cursor
    while True:
        step = _prime_composites.pop(n, 0)
        if step:
            nxt = n + step
            while nxt in _prime_composites:
                nxt += step
            _prime_composites[nxt] = step
            n += 2
        else:
            _prime_composites[n * n] = 2 * n
            _prime_cache.append(n)
            _prime_cursor = n + 2
            return


def _primes() -> Iterator[int]:
    """Yield 2, 3, 5, ... from a shared, lazily grown table."""
    k = 0
    while True:
        if k == len(_prime_cache):
            _extend_primes()
        yield _prime_cache[k]
        k += 1


def encode_list(xs: Sequence[int]) -> int:
    """Encode [a1, ..., ak] as 2^a1 * 3^a2 * ... * p_k^ak - 1."""
    product = 1
    for p, a in zip(_primes(), xs):
        product *= p ** _check_nat(a, "list entry")
    return product - 1


def decode_list(n: int, prime_limit: int = PRIME_LIMIT) -> list[int]:
    """Exponent vector of n + 1 over consecutive primes, trailing zeros stripped.

    Raises ``ValueError`` when n + 1 has a prime factor above ``prime_limit``;
    walking arbitrarily far down the prime sequence is never useful here.
    """
    m = _check_nat(n) + 1
    exponents: list[int] = []
    for p in _primes():
        if m == 1:
            break
        if p > prime_limit:
            raise ValueError(
                f"decode_list: {n} has a prime factor above {prime_limit}"
            )
        a = 0
        while m % p == 0:
            m //= p
            a += 1
        exponents.append(a)
    while exponents and exponents[-1] == 0:
        exponents.pop()
    return exponents


# ---------------------------------------------------------------------------
# Bit strings
# ---------------------------------------------------------------------------

def _check_bits(s: str) -> str:
    if not isinstance(s, str) or s.strip("01"):
        raise ValueError(f"bit string expected, got {s!r}")
    return s


def str_encode(s: str) -> int:
    """Encode the bit string a_0 ... a_n as 2^(n+1) - 1 + sum a_k 2^k."""
    _check_bits(s)
    payload = 0
    for k, ch in enumerate(s):
        if ch == "1":
            payload |= 1 << k
    return (1 << len(s)) - 1 + payload


def str_decode(n: int) -> str:
    """Invert :func:`str_encode`."""
    _check_nat(n)
    length = (n + 1).bit_length() - 1
    payload = n - ((1 << length) - 1)
    return "".join("1" if payload >> k & 1 else "0" for k in range(length))


# ---------------------------------------------------------------------------
# Rationals
# ---------------------------------------------------------------------------

def rational_encode(q: Fraction) -> int:
    """Encode a rational as pair(sign, pair(|num|, den)); zero is (0, 0, 0)."""
    q = Fraction(q)
    if q == 0:
        return pair(0, pair(0, 0))
    sign = 0 if q > 0 else 1
    return pair(sign, pair(abs(q.numerator), q.denominator))


def rational_decode(n: int) -> Optional[Fraction]:
    """Return the rational encoded by n, or None when n is not an encoding."""
    sign, rest = unpair(n)
    p, q = unpair(rest)
    if sign == 0 and p == 0 and q == 0:
        return Fraction(0)
    if sign not in (0, 1) or p == 0 or q == 0 or gcd(p, q) != 1:
        return None
    value = Fraction(p, q)
    return -value if sign else value


# ---------------------------------------------------------------------------
# Rational-complex matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ElementaryMatrix:
    """Square matrix whose entries are exact complex rationals.

    ``entries[r][c]`` is a ``(real, imag)`` pair of ``Fraction`` values.
    """

    dim: int
    entries: tuple[tuple[tuple[Fraction, Fraction], ...], ...]

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("matrix dimension must be positive")
        if len(self.entries) != self.dim or any(
            len(row) != self.dim for row in self.entries
        ):
            raise ValueError("entries must form a dim x dim grid")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[complex | Fraction | tuple]]) -> "ElementaryMatrix":
        """Build from nested sequences of Fractions, (re, im) pairs, or exact complexes."""
        grid = []
        for row in rows:
            out_row = []
            for cell in row:
                if isinstance(cell, tuple):
                    re, im = cell
                elif isinstance(cell, complex):
                    re, im = cell.real, cell.imag
                else:
                    re, im = cell, 0
                out_row.append((Fraction(re), Fraction(im)))
            grid.append(tuple(out_row))
        return cls(len(grid), tuple(grid))

    @classmethod
    def zero(cls, dim: int) -> "ElementaryMatrix":
        z = (Fraction(0), Fraction(0))
        return cls(dim, tuple(tuple(z for _ in range(dim)) for _ in range(dim)))

    def to_complex(self):
        """Dense complex list-of-lists (callers wrap in numpy as needed)."""
        return [
            [complex(re, im) for re, im in row]
            for row in self.entries
        ]

    def is_hermitian(self) -> bool:
        for r in range(self.dim):
            for c in range(self.dim):
                re, im = self.entries[r][c]
                re_t, im_t = self.entries[c][r]
                if re != re_t or im != -im_t:
                    return False
        return True

    def trace(self) -> tuple[Fraction, Fraction]:
        re = sum((self.entries[k][k][0] for k in range(self.dim)), Fraction(0))
        im = sum((self.entries[k][k][1] for k in range(self.dim)), Fraction(0))
        return re, im


def matrix_encode(m: ElementaryMatrix) -> int:
    """Encode as encode_list([dim, re(a00), im(a00), re(a01), ...]) row-major."""
    body: list[int] = [m.dim]
    for row in m.entries:
        for re, im in row:
            body.append(rational_encode(re))
            body.append(rational_encode(im))
    return encode_list(body)


def matrix_decode(n: int, prime_limit: int = PRIME_LIMIT) -> Optional[ElementaryMatrix]:
    """Return the matrix encoded by n, or None when the layout does not fit."""
    try:
        xs = decode_list(n, prime_limit=prime_limit)
    except ValueError:
        return None
    if not xs:
        return None
    dim = xs[0]
    if dim < 1:
        return None
    cells = 2 * dim * dim
    rest = xs[1:]
    if len(rest) > cells:
        return None
    rest = rest + [0] * (cells - len(rest))  # stripped trailing zeros are rational 0
    parts: list[Fraction] = []
    for code in rest:
        value = rational_decode(code)
        if value is None:
            return None
        parts.append(value)
    rows = []
    for r in range(dim):
        row = []
        for c in range(dim):
            k = 2 * (r * dim + c)
            row.append((parts[k], parts[k + 1]))
        rows.append(tuple(row))
    return ElementaryMatrix(dim, tuple(rows))


# ---------------------------------------------------------------------------
# Finite-support maps ZZ -> {0,1}
# ---------------------------------------------------------------------------

OmegaElement = frozenset  # of int sites; membership means bit 1


def omega(sites: Iterable[int]) -> OmegaElement:
    """Normalize an iterable of sites into an OmegaElement."""
    return frozenset(int(k) for k in sites)


def _split(i: Iterable[int]) -> tuple[int, int]:
    """Pack negative sites into x and non-negative sites into y.

    Site -1 is bit 0 of x, site -2 is bit 1, and so on; site k >= 0 is bit k
    of y.  Dropping the off-by-one on the negative side (bit -k-1 instead of
    -k) is what makes the packing surjective; see the x-even argument in the
    tests.
    """
    x = 0
    y = 0
    for k in i:
        if k < 0:
            x |= 1 << (-k - 1)
        else:
            y |= 1 << k
    return x, y


def _join(x: int, y: int) -> OmegaElement:
    sites = [-(t + 1) for t in range(x.bit_length()) if x >> t & 1]
    sites += [t for t in range(y.bit_length()) if y >> t & 1]
    return frozenset(sites)


def omega_to_nat(i: Iterable[int]) -> int:
    """The bijection eta: pack both half-lines and pair the results."""
    x, y = _split(i)
    return pair(x, y)


def nat_to_omega(n: int) -> OmegaElement:
    x, y = unpair(n)
    return _join(x, y)


def omega_to_int(i: Iterable[int]) -> int:
    """The bijection nu: y when x = 0, otherwise -(pair(x, y) + 1) / 2."""
    x, y = _split(i)
    if x == 0:
        return y
    return y - ((pair(x, y) + 1) // 2 + y)


def int_to_omega(m: int) -> OmegaElement:
    """Invert :func:`omega_to_int`.

    Non-negative m comes from elements with empty negative support; negative m
    satisfies -m = 2^(x-1) * (2y + 1), which pins x and y uniquely.
    """
    if m >= 0:
        return _join(0, m)
    t = -m
    x = (t & -t).bit_length()  # valuation + 1
    y = ((t >> (x - 1)) - 1) // 2
    return _join(x, y)


def zeta(i: Iterable[int], j: Iterable[int]) -> OmegaElement:
    """Merge two finite-support maps into one (a bijection on pairs).

    The merge re-packs eta(i) into an exponent, so the result's size is
    doubly exponential in the depth of i's support; callers should keep
    supports shallow.
    """
    ei = omega_to_nat(i)
    ej = omega_to_nat(j)
    sign = 0 if ei == 0 else 1
    arg = ej - sign * ((pair(ei, ej) + 1) // 2 + ej)
    return int_to_omega(arg)


def zeta_inverse(k: Iterable[int]) -> tuple[OmegaElement, OmegaElement]:
    """Split a merged map back into its two components."""
    x, y = _split(k)
    return nat_to_omega(x), nat_to_omega(y)
