"""Weighted ensembles of semi-density matrices and the Gacs quantities.

A true universal semi-density matrix is uncomputable; what the experiments
need from it is (a) strict positivity, (b) exact domination of every listed
component, and (c) the freedom to include the experiment's own target
family.  The ensemble here guarantees all three: component 1 is always the
maximally mixed state at weight 1/2, further components are decoded from an
enumeration cache in canonical order or appended explicitly, and weights
walk down the powers of two, so the mixture dominates each component by its
weight, by construction.

Components of dimension m < D sit in the top-left m x m corner of the
ambient space, so their expectations never materialize a D x D matrix.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from ..codec import ElementaryMatrix, matrix_decode, str_encode
from ..complexity import EnumerationCache, m_lower
from .linalg import as_matrix, hermitian_eig, is_positive_charpoly
from .opu import MATERIALIZE_DIM_CAP

__all__ = [
    "Component",
    "LowerBoundReport",
    "SemiDensityEnsemble",
    "build_mu_hat",
    "diagonal_semimeasure",
    "ek_projection",
    "gacs_lower",
    "gacs_pair",
    "gacs_upper",
    "lower_bound_check",
    "product_component",
    "reduced_matrix",
]

EXTRA_TOL = 1e-10


def _kron_apply_dagger(u: np.ndarray, power: int, vec: np.ndarray) -> np.ndarray:
    """(u^{tensor power})^dag vec through per-site contractions, O(d^n * n)."""
    d = u.shape[0]
    out = vec.reshape((d,) * power)
    for axis in range(power):
        out = np.moveaxis(np.tensordot(u.conj().T, out, axes=([1], [axis])), 0, axis)
    return out.reshape(-1)


@dataclass(frozen=True)
class Component:
    """One weighted summand; `matrix` is None for the maximally mixed state.

    Tensor-power components (the eta family) store the site factor instead
    of the d^power-dimensional product, so their expectations run through
    per-site contractions and never materialize the big matrix.
    """

    weight: Fraction
    kind: str  # "uniform" | "decoded" | "extra" | "product"
    dim: int
    provenance: str
    matrix: Optional[np.ndarray] = None
    exact: Optional[ElementaryMatrix] = None
    nat: Optional[int] = None
    site: Optional[np.ndarray] = None
    power: int = 0
    scale: float = 1.0

    def trace(self) -> float:
        if self.site is not None:
            return self.scale * float(np.trace(self.site).real) ** self.power
        if self.matrix is None:
            return 1.0
        return float(np.trace(self.matrix).real)

    def dense(self) -> np.ndarray:
        """The native-dimension matrix (materializes tensor powers)."""
        if self.site is None:
            if self.matrix is None:
                return np.eye(self.dim, dtype=np.complex128) / self.dim
            return self.matrix
        if self.dim > MATERIALIZE_DIM_CAP:
            raise ValueError(f"component dimension {self.dim} exceeds the cap")
        out = self.site
        for _ in range(self.power - 1):
            out = np.kron(out, self.site)
        return self.scale * out

    def padded(self, dimension: int) -> np.ndarray:
        out = np.zeros((dimension, dimension), dtype=np.complex128)
        if self.matrix is None and self.site is None:
            np.fill_diagonal(out, 1.0 / self.dim)
        else:
            out[: self.dim, : self.dim] = self.dense()
        return out

    def _site_eig(self) -> tuple[np.ndarray, np.ndarray]:
        return hermitian_eig(self.site)

    def expectation_vector(self, v: np.ndarray) -> float:
        """<v| padded component |v> without materializing the padding."""
        if self.site is not None:
            w, basis = self._site_eig()
            amp = _kron_apply_dagger(basis, self.power, v[: self.dim])
            lam = w.astype(float)
            for _ in range(self.power - 1):
                lam = np.outer(lam, w).reshape(-1)
            return self.scale * float((lam * np.abs(amp) ** 2).sum())
        if self.matrix is None:
            return float(np.vdot(v, v).real) / self.dim
        head = v[: self.dim]
        return float(np.vdot(head, self.matrix @ head).real)

    def expectation_density(self, rho: np.ndarray) -> float:
        if self.matrix is None and self.site is None:
            return float(np.trace(rho).real) / self.dim
        corner = rho[: self.dim, : self.dim]
        return float(np.trace(corner @ self.dense()).real)

    def reduced(self, columns: np.ndarray) -> np.ndarray:
        """The r x r matrix with entries <col_j| padded component |col_i>."""
        if self.site is not None:
            w, basis = self._site_eig()
            amps = np.stack(
                [
                    _kron_apply_dagger(basis, self.power, columns[: self.dim, j])
                    for j in range(columns.shape[1])
                ],
                axis=1,
            )
            lam = w.astype(float)
            for _ in range(self.power - 1):
                lam = np.outer(lam, w).reshape(-1)
            return self.scale * (amps.conj().T @ (lam[:, None] * amps))
        if self.matrix is None:
            return (columns.conj().T @ columns) / self.dim
        head = columns[: self.dim, :]
        return head.conj().T @ (self.matrix @ head)


def product_component(
    site: np.ndarray,
    power: int,
    scale: float,
    provenance: str,
) -> "Component":
    """An unweighted scale * site^{tensor power} summand (weight set later)."""
    a = as_matrix(site)
    if power < 1:
        raise ValueError("tensor power must be at least 1")
    if scale < 0:
        raise ValueError("scale must be nonnegative")
    norm_gap = float(np.linalg.norm(a - a.conj().T))
    if norm_gap > EXTRA_TOL * max(1.0, float(np.linalg.norm(a))):
        raise ValueError(f"product component {provenance!r} is not Hermitian")
    smallest = float(np.linalg.eigvalsh(a)[0])
    if smallest < -EXTRA_TOL:
        raise ValueError(f"product component {provenance!r} has eigenvalue {smallest}")
    trace = scale * float(np.trace(a).real) ** power
    if trace > 1.0 + 1e-12:
        raise ValueError(f"product component {provenance!r} has trace {trace} above 1")
    return Component(
        weight=Fraction(0),
        kind="product",
        dim=a.shape[0] ** power,
        provenance=provenance,
        site=a,
        power=power,
        scale=float(scale),
    )


@dataclass(frozen=True)
class SemiDensityEnsemble:
    dimension: int
    components: tuple[Component, ...]

    def __post_init__(self) -> None:
        if not self.components or self.components[0].kind != "uniform":
            raise ValueError("component 1 must be the maximally mixed state")
        total = sum(float(c.weight) * c.trace() for c in self.components)
        if total > 1.0 + 1e-12:
            raise ValueError(f"ensemble trace {total} exceeds 1")

    def total_trace(self) -> float:
        return sum(float(c.weight) * c.trace() for c in self.components)

    def truncated(self, j: int) -> "SemiDensityEnsemble":
        """Ensemble of the first j components (j >= 1 keeps positivity)."""
        return SemiDensityEnsemble(self.dimension, self.components[:j])

    def mixture(self) -> np.ndarray:
        if self.dimension > MATERIALIZE_DIM_CAP:
            raise ValueError(
                f"dimension {self.dimension} exceeds the materialization cap"
            )
        out = np.zeros((self.dimension, self.dimension), dtype=np.complex128)
        for c in self.components:
            if c.kind == "uniform":
                out[np.diag_indices(self.dimension)] += float(c.weight) / c.dim
            else:
                out[: c.dim, : c.dim] += float(c.weight) * c.dense()
        return out

    def expectation_vector(self, v: np.ndarray) -> float:
        if v.shape != (self.dimension,):
            raise ValueError("vector dimension mismatch")
        return math.fsum(
            float(c.weight) * c.expectation_vector(v) for c in self.components
        )

    def expectation_density(self, rho: np.ndarray) -> float:
        if rho.shape != (self.dimension, self.dimension):
            raise ValueError("density dimension mismatch")
        return math.fsum(
            float(c.weight) * c.expectation_density(rho) for c in self.components
        )

    def conjugated(self, u: np.ndarray) -> "SemiDensityEnsemble":
        """Every component conjugated by the unitary u (uniform is invariant)."""
        u = as_matrix(u)
        if u.shape != (self.dimension, self.dimension):
            raise ValueError("unitary dimension mismatch")
        out: list[Component] = []
        for c in self.components:
            if c.kind == "uniform":
                out.append(c)
            else:
                rotated = u @ c.padded(self.dimension) @ u.conj().T
                out.append(
                    Component(
                        weight=c.weight,
                        kind="extra",
                        dim=self.dimension,
                        provenance=f"conjugated({c.provenance})",
                        matrix=rotated,
                    )
                )
        return SemiDensityEnsemble(self.dimension, tuple(out))


def _decoded_component(nat: int, dimension: int, weight: Fraction, provenance: str) -> Optional[Component]:
    em = matrix_decode(nat)
    if em is None or em.dim > dimension:
        return None
    if not em.is_hermitian():
        return None
    tr_re, tr_im = em.trace()
    if tr_im != 0 or tr_re > 1:
        return None
    if not is_positive_charpoly(em):
        return None
    return Component(
        weight=weight,
        kind="decoded",
        dim=em.dim,
        provenance=provenance,
        matrix=as_matrix(em),
        exact=em,
        nat=nat,
    )


def _extra_component(entry, dimension: int, weight: Fraction) -> Component:
    if isinstance(entry, Component):
        if entry.dim > dimension:
            raise ValueError(
                f"extra component dimension {entry.dim} exceeds ambient {dimension}"
            )
        return dataclasses.replace(entry, weight=weight)
    if isinstance(entry, tuple):
        matrix, provenance = entry
    else:
        matrix, provenance = entry, "extra"
    a = as_matrix(matrix)
    m = a.shape[0]
    if m > dimension:
        raise ValueError(f"extra component dimension {m} exceeds ambient {dimension}")
    scale = max(1.0, float(np.linalg.norm(a)))
    if float(np.linalg.norm(a - a.conj().T)) > EXTRA_TOL * scale:
        raise ValueError(f"extra component {provenance!r} is not Hermitian")
    smallest = float(np.linalg.eigvalsh(a)[0]) if m > 1 else float(a[0, 0].real)
    if smallest < -EXTRA_TOL:
        raise ValueError(f"extra component {provenance!r} has eigenvalue {smallest}")
    if float(np.trace(a).real) > 1.0 + 1e-12:
        raise ValueError(f"extra component {provenance!r} has trace above 1")
    return Component(weight=weight, kind="extra", dim=m, provenance=provenance, matrix=a)


def build_mu_hat(
    dimension: int,
    cache: Optional[EnumerationCache] = None,
    extra: Sequence = (),
) -> SemiDensityEnsemble:
    """Assemble the ensemble: mixed state, cache decodings, then extras.

    Cache outputs are scanned in canonical enumeration order (round, then
    program length, then lexicographic); each output string is read as a
    natural number and decoded as a matrix, and the ones that pass the exact
    screens (Hermitian, positive characteristic polynomial, trace <= 1,
    fits in `dimension`) join with the next power-of-two weight.  Duplicate
    outputs are skipped.  Undecodable outputs are skipped silently; they are
    programs for something else.
    """
    if dimension < 1:
        raise ValueError("dimension must be positive")
    components = [
        Component(
            weight=Fraction(1, 2),
            kind="uniform",
            dim=dimension,
            provenance="built-in maximally mixed",
        )
    ]
    k = 2
    if cache is not None:
        seen: set[int] = set()
        records = sorted(
            cache.records.values(),
            key=lambda r: (r.round_index, len(r.program), r.program),
        )
        for rec in records:
            nat = str_encode(rec.output)
            if nat in seen:
                continue
            seen.add(nat)
            comp = _decoded_component(
                nat,
                dimension,
                Fraction(1, 2**k),
                f"decoded-from-enumeration({nat})",
            )
            if comp is not None:
                components.append(comp)
                k += 1
    for entry in extra:
        components.append(_extra_component(entry, dimension, Fraction(1, 2**k)))
        k += 1
    return SemiDensityEnsemble(dimension, tuple(components))


def diagonal_semimeasure(dimension: int, cache: EnumerationCache) -> tuple[np.ndarray, str]:
    """Diagonal matrix sum of m_lower(x) |x><x| over the cache's outputs.

    Basis vector |x> is the one at index str_encode(x); outputs whose index
    falls outside `dimension` are dropped.  The trace is bounded by the
    Kraft sum, so the result is a valid extra component.
    """
    diag = np.zeros(dimension)
    for output in cache.min_length_by_output():
        idx = str_encode(output)
        if idx < dimension:
            diag[idx] = float(m_lower(cache, output))
    return np.diag(diag).astype(np.complex128), "diagonal-semimeasure"


def _expectation(rho: np.ndarray, m: Union[SemiDensityEnsemble, np.ndarray]) -> float:
    if isinstance(m, SemiDensityEnsemble):
        if rho.ndim == 1:
            return m.expectation_vector(rho)
        return m.expectation_density(rho)
    a = as_matrix(m)
    if rho.ndim == 1:
        return float(np.vdot(rho, a @ rho).real)
    if rho.shape != a.shape:
        raise ValueError("density dimension mismatch")
    return float(np.trace(rho @ a).real)


def gacs_lower(rho: np.ndarray, m: Union[SemiDensityEnsemble, np.ndarray]) -> float:
    """-log2 Tr(rho M); `rho` may be a density matrix or a pure state vector."""
    value = _expectation(np.asarray(rho), m)
    if value <= 0:
        return math.inf
    return -math.log2(value)


def gacs_upper(rho: np.ndarray, m: Union[SemiDensityEnsemble, np.ndarray]) -> float:
    """-Tr(rho log2 M), through the mixture's eigendecomposition."""
    mix = m.mixture() if isinstance(m, SemiDensityEnsemble) else as_matrix(m)
    rho = np.asarray(rho)
    if rho.ndim == 1:
        rho = np.outer(rho, rho.conj())
    if rho.shape != mix.shape:
        raise ValueError("density dimension mismatch")
    w, v = hermitian_eig(mix)
    if float(w[-1]) <= 0:
        raise ValueError("gacs_upper needs a strictly positive mixture")
    mass = np.real(np.einsum("ij,ji->i", v.conj().T @ rho, v))
    return float(-(mass * np.log2(w)).sum())


def gacs_pair(rho: np.ndarray, m: Union[SemiDensityEnsemble, np.ndarray]) -> tuple[float, float]:
    """(lower, upper), checking the convexity inequality between them."""
    lower = gacs_lower(rho, m)
    upper = gacs_upper(rho, m)
    if lower > upper + 1e-9:
        raise ValueError(f"gacs_lower {lower} exceeds gacs_upper {upper}")
    return lower, upper


def ek_projection(m: Union[SemiDensityEnsemble, np.ndarray], count: int) -> np.ndarray:
    """Projection onto the `count` largest-eigenvalue directions of M."""
    mix = m.mixture() if isinstance(m, SemiDensityEnsemble) else as_matrix(m)
    count = max(0, min(int(count), mix.shape[0]))
    _, v = hermitian_eig(mix)
    top = v[:, :count]
    return top @ top.conj().T


@dataclass(frozen=True)
class LowerBoundReport:
    k: float
    lam: float
    count: int
    gacs_lower: float
    gacs_upper: float
    trace: float  # Tr(rho E)
    upper_applicable: bool  # gacs_upper < k
    upper_ok: bool  # implication (vacuously True when not applicable)
    lower_applicable: bool  # gacs_lower < k
    lower_ok: bool

    @property
    def passed(self) -> bool:
        return self.upper_ok and self.lower_ok


def reduced_matrix(m: SemiDensityEnsemble, columns: np.ndarray) -> np.ndarray:
    """Entries <col_j| M |col_i> at (j, i), accumulated component-wise.

    With `columns` an orthonormal family this is M compressed to its span;
    the big-tensor experiments only ever need M through this compression.
    """
    if columns.shape[0] != m.dimension:
        raise ValueError("column dimension mismatch")
    r = columns.shape[1]
    out = np.zeros((r, r), dtype=np.complex128)
    for c in m.components:
        out += float(c.weight) * c.reduced(columns)
    return out


def lower_bound_check(
    rho: np.ndarray,
    m: Union[SemiDensityEnsemble, np.ndarray],
    k: float,
    lam: float,
) -> LowerBoundReport:
    """Check both E_k implications for one (state, ensemble, k, lambda)."""
    if lam <= 1:
        raise ValueError("lambda must exceed 1")
    dim = m.dimension if isinstance(m, SemiDensityEnsemble) else as_matrix(m).shape[0]
    exponent = lam * k
    if exponent >= 62 or 2.0**exponent >= dim:
        count = dim
    else:
        count = int(math.floor(2.0**exponent))
    lower, upper = gacs_pair(rho, m)
    mix = m.mixture() if isinstance(m, SemiDensityEnsemble) else as_matrix(m)
    _, v = hermitian_eig(mix)
    rho = np.asarray(rho)
    if rho.ndim == 1:
        top = v[:, :count]
        trace = float(np.linalg.norm(top.conj().T @ rho) ** 2)
    else:
        top = v[:, :count]
        trace = float(np.trace(top.conj().T @ rho @ top).real)
    upper_applicable = upper < k
    lower_applicable = lower < k
    upper_ok = (not upper_applicable) or trace > 1.0 - 1.0 / lam
    lower_ok = (not lower_applicable) or trace > 2.0 ** (-k) * (1.0 - 1.0 / lam)
    return LowerBoundReport(
        k=k,
        lam=lam,
        count=count,
        gacs_lower=lower,
        gacs_upper=upper,
        trace=trace,
        upper_applicable=upper_applicable,
        upper_ok=upper_ok,
        lower_applicable=lower_applicable,
        lower_ok=lower_ok,
    )
