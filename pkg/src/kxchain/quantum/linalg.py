"""Dense complex linear algebra for small chain segments.

Everything here is plain numpy on complex128 arrays, sized for desk-scale
experiments (ambient dimension a few thousand at most).  The one exact
routine is the characteristic-polynomial positivity test, which also runs
over rational matrices so that decoded candidates can be screened without
rounding.
"""

from __future__ import annotations

import json
import math
import string
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from ..codec import ElementaryMatrix

__all__ = [
    "DensityCheckError",
    "charpoly_coefficients",
    "charpoly_coefficients_exact",
    "check_density",
    "elementary_from_spec",
    "haar_vector",
    "hermitian_eig",
    "is_positive_charpoly",
    "matrix_from_spec",
    "partial_trace",
    "random_density",
    "random_pure",
    "relative_entropy",
    "tensor",
    "vn_entropy",
]

HERMITIAN_TOL = 1e-10
EIG_RESIDUAL_TOL = 1e-8
EIG_CLAMP = 1e-10
SUPPORT_TOL = 1e-10


class DensityCheckError(ValueError):
    """A matrix failed the density-matrix invariants."""


def as_matrix(m: Union[np.ndarray, ElementaryMatrix, Sequence]) -> np.ndarray:
    """Coerce to a square complex128 ndarray (no copy when already one)."""
    if isinstance(m, ElementaryMatrix):
        a = np.array(m.to_complex(), dtype=np.complex128)
    else:
        a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def tensor(*factors: Union[np.ndarray, ElementaryMatrix, Sequence]) -> np.ndarray:
    """Kronecker product; the first factor is the leftmost (site 0) slot."""
    if not factors:
        raise ValueError("tensor() needs at least one factor")
    out = as_matrix(factors[0])
    for f in factors[1:]:
        out = np.kron(out, as_matrix(f))
    return out


def partial_trace(m, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every tensor slot not listed in `keep`.

    `dims` are the slot dimensions in site order (leftmost slot first,
    matching `tensor`); `keep` is a collection of slot indices.  The kept
    slots stay in their original relative order.
    """
    a = as_matrix(m)
    dims = [int(d) for d in dims]
    total = math.prod(dims)
    if a.shape[0] != total:
        raise ValueError(f"dims {dims} do not factor dimension {a.shape[0]}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} slots")
    letters = string.ascii_lowercase + string.ascii_uppercase
    if 2 * len(dims) > len(letters):
        raise ValueError("too many tensor slots for the einsum alphabet")
    rows = list(letters[: len(dims)])
    cols = []
    next_free = len(dims)
    for i in range(len(dims)):
        if i in keep:
            cols.append(letters[next_free])
            next_free += 1
        else:
            cols.append(rows[i])  # repeated letter: traced out
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    reshaped = a.reshape(dims + dims)
    traced = np.einsum("".join(rows) + "".join(cols) + "->" + out, reshaped)
    kept = math.prod(dims[i] for i in keep) if keep else 1
    return traced.reshape(kept, kept)


def is_hermitian_matrix(m, tol: float = HERMITIAN_TOL) -> bool:
    a = as_matrix(m)
    scale = max(1.0, float(np.linalg.norm(a)))
    return float(np.linalg.norm(a - a.conj().T)) <= tol * scale


def check_density(rho, tol: float = 1e-8) -> np.ndarray:
    """Validate a density matrix and return it as an ndarray.

    Hermitian, trace 1, and eigenvalues >= -1e-10 (the clamp window); raises
    DensityCheckError naming the failed invariant.
    """
    a = as_matrix(rho)
    if not is_hermitian_matrix(a, tol):
        raise DensityCheckError("density matrix must be Hermitian")
    tr = complex(np.trace(a))
    if abs(tr - 1.0) > tol:
        raise DensityCheckError(f"density matrix must have trace 1, got {tr}")
    smallest = float(np.linalg.eigvalsh(a)[0])
    if smallest < -EIG_CLAMP:
        raise DensityCheckError(f"density matrix has negative eigenvalue {smallest}")
    return a


def hermitian_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and matching orthonormal eigenvector columns.

    The reconstruction residual ||M V - V diag(w)|| and ||V^dag V - I|| are
    both checked against 1e-8 * max(1, ||M||); a failure means the input was
    not Hermitian enough for eigh to be trusted, so it raises.
    """
    a = as_matrix(m)
    scale = max(1.0, float(np.linalg.norm(a)))
    if not is_hermitian_matrix(a, 1e-8):
        raise ValueError("hermitian_eig: input is not Hermitian")
    w, v = np.linalg.eigh(a)
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    residual = float(np.linalg.norm(a @ v - v * w))
    ortho = float(np.linalg.norm(v.conj().T @ v - np.eye(a.shape[0])))
    if residual > EIG_RESIDUAL_TOL * scale or ortho > EIG_RESIDUAL_TOL:
        raise ValueError(
            f"hermitian_eig: residual {residual:.3e} / orthogonality {ortho:.3e} "
            f"exceed tolerance for norm {scale:.3e}"
        )
    return w, v


def _clamped_spectrum(rho) -> np.ndarray:
    a = check_density(rho)
    w = np.linalg.eigvalsh(a)
    return np.clip(w, 0.0, None)


def vn_entropy(rho) -> float:
    """Von Neumann entropy in bits; eigenvalues in [-1e-10, 0] clamp to 0."""
    w = _clamped_spectrum(rho)
    positive = w[w > 0]
    return float(-(positive * np.log2(positive)).sum())


def relative_entropy(rho, sigma) -> float:
    """S(rho || sigma) in bits; +inf when support(rho) escapes support(sigma)."""
    a = check_density(rho)
    b = check_density(sigma)
    if a.shape != b.shape:
        raise ValueError("relative_entropy: dimension mismatch")
    wa = np.clip(np.linalg.eigvalsh(a), 0.0, None)
    positive = wa[wa > 0]
    tr_rho_log_rho = float((positive * np.log2(positive)).sum())
    wb, vb = hermitian_eig(b)
    wb = np.clip(wb, 0.0, None)
    # mass of rho on each sigma eigenvector
    mass = np.real(np.einsum("ij,ji->i", vb.conj().T @ a, vb))
    null = wb <= SUPPORT_TOL
    if float(mass[null].sum()) > SUPPORT_TOL:
        return math.inf
    keep = ~null
    tr_rho_log_sigma = float((mass[keep] * np.log2(wb[keep])).sum())
    return tr_rho_log_rho - tr_rho_log_sigma


# ---------------------------------------------------------------------------
# Characteristic polynomial and the alternating-sign positivity test
# ---------------------------------------------------------------------------

def charpoly_coefficients(m) -> list[float]:
    """Coefficients [1, c1, ..., cd] of det(xI - M) via Faddeev-LeVerrier.

    Requires a Hermitian input so the coefficients are real.
    """
    a = as_matrix(m)
    if not is_hermitian_matrix(a, 1e-8):
        raise ValueError("charpoly_coefficients: input is not Hermitian")
    d = a.shape[0]
    coeffs = [1.0]
    mk = np.zeros_like(a)
    ck = 1.0
    for k in range(1, d + 1):
        mk = a @ (mk + ck * np.eye(d))
        ck = -float(np.trace(mk).real) / k
        coeffs.append(ck)
    return coeffs


_CZERO = (Fraction(0), Fraction(0))


def _cadd(x, y):
    return (x[0] + y[0], x[1] + y[1])


def _cmul(x, y):
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def charpoly_coefficients_exact(m: ElementaryMatrix) -> list[Fraction]:
    """Exact Faddeev-LeVerrier over complex rationals.

    The input must be Hermitian (checked exactly), which forces every
    coefficient to be real; the imaginary parts are asserted to vanish.
    """
    if not m.is_hermitian():
        raise ValueError("charpoly_coefficients_exact: input is not Hermitian")
    d = m.dim
    a = [[m.entries[r][c] for c in range(d)] for r in range(d)]
    mk = [[_CZERO for _ in range(d)] for _ in range(d)]
    ck = Fraction(1)
    coeffs = [Fraction(1)]
    for k in range(1, d + 1):
        shifted = [
            [_cadd(mk[r][c], (ck, Fraction(0)) if r == c else _CZERO) for c in range(d)]
            for r in range(d)
        ]
        nxt = [[_CZERO for _ in range(d)] for _ in range(d)]
        for r in range(d):
            for c in range(d):
                acc = _CZERO
                for t in range(d):
                    acc = _cadd(acc, _cmul(a[r][t], shifted[t][c]))
                nxt[r][c] = acc
        mk = nxt
        tr = _CZERO
        for r in range(d):
            tr = _cadd(tr, mk[r][r])
        if tr[1] != 0:
            raise ValueError("charpoly_coefficients_exact: non-real trace")
        ck = -tr[0] / k
        coeffs.append(ck)
    return coeffs


def _pattern_positive(signed: Sequence, zero_ok, strict: bool) -> bool:
    """Check (-1)^k c_k > 0 up to some rank, with only a trailing zero block.

    `signed` is the sequence (-1)^k c_k for k = 1..d; `zero_ok(x)` decides
    whether x counts as zero.
    """
    seen_zero = False
    for x in signed:
        if zero_ok(x):
            seen_zero = True
        elif x > 0:
            if seen_zero:
                return False  # zero followed by a nonzero breaks the psd pattern
        else:
            return False
    if strict and seen_zero:
        return False
    return True


def is_positive_charpoly(h, strict: bool = False) -> bool:
    """Positive semidefiniteness read off the characteristic polynomial.

    det(xI - H) = x^d + c1 x^{d-1} + ... + cd has, for H >= 0, the
    alternating pattern (-1)^k c_k > 0 for k up to the rank and c_k = 0
    beyond it.  ElementaryMatrix inputs are screened exactly; ndarrays use
    a scale-aware zero threshold.  `strict` additionally rejects singular
    matrices (no zero coefficients at all).
    """
    if isinstance(h, ElementaryMatrix):
        coeffs = charpoly_coefficients_exact(h)
        signed = [(-1) ** k * coeffs[k] for k in range(1, len(coeffs))]
        return _pattern_positive(signed, lambda x: x == 0, strict)
    a = as_matrix(h)
    coeffs = charpoly_coefficients(a)
    d = a.shape[0]
    norm = max(1.0, float(np.linalg.norm(a, 2)))
    signed = [(-1) ** k * coeffs[k] for k in range(1, d + 1)]
    # |c_k| <= binom(d,k) ||H||^k, so the zero test scales the same way
    thresholds = [1e-9 * math.comb(d, k) * norm**k for k in range(1, d + 1)]
    checks = [(x, t) for x, t in zip(signed, thresholds)]
    seen_zero = False
    for x, t in checks:
        if abs(x) <= t:
            seen_zero = True
        elif x > 0:
            if seen_zero:
                return False
        else:
            return False
    if strict and seen_zero:
        return False
    return True


# ---------------------------------------------------------------------------
# Random states and file formats
# ---------------------------------------------------------------------------

def haar_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-random unit vector in C^dim."""
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_pure(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = haar_vector(rng, dim)
    return np.outer(v, v.conj())


def random_density(rng: np.random.Generator, dim: int, rank: Optional[int] = None) -> np.ndarray:
    """Wishart-style random density matrix (full rank unless `rank` is set)."""
    k = dim if rank is None else rank
    g = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _parse_part(value) -> Fraction:
    if isinstance(value, bool):
        raise ValueError(f"matrix entry {value!r} is not a number")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**12)
    if isinstance(value, str):
        return Fraction(value)
    raise ValueError(f"matrix entry {value!r} is not a number")


def _parse_entry(cell) -> tuple[Fraction, Fraction]:
    if isinstance(cell, (list, tuple)):
        if len(cell) != 2:
            raise ValueError(f"matrix entry {cell!r} must be [re, im]")
        return _parse_part(cell[0]), _parse_part(cell[1])
    return _parse_part(cell), Fraction(0)


def elementary_from_spec(obj: Union[dict, str, Path]) -> ElementaryMatrix:
    """Parse the documented state-file format into an exact matrix.

    The format is ``{"dim": d, "entries": [[entry, ...], ...]}`` with each
    entry either a number, a rational string like "3/4", or an [re, im]
    pair of those.
    """
    if isinstance(obj, (str, Path)):
        with open(obj, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValueError("state file must hold a JSON object")
    unknown = set(obj) - {"dim", "entries"}
    if unknown:
        raise ValueError(f"unknown state-file field: {sorted(unknown)[0]}")
    if "dim" not in obj or "entries" not in obj:
        raise ValueError("state file needs 'dim' and 'entries'")
    dim = int(obj["dim"])
    entries = obj["entries"]
    if len(entries) != dim or any(len(row) != dim for row in entries):
        raise ValueError(f"entries must form a {dim}x{dim} grid")
    rows = tuple(tuple(_parse_entry(cell) for cell in row) for row in entries)
    return ElementaryMatrix(dim, rows)


def matrix_from_spec(obj: Union[dict, str, Path]) -> np.ndarray:
    """Same as elementary_from_spec but returning a complex ndarray."""
    return as_matrix(elementary_from_spec(obj))
