"""Operational partitions of unity and the entropy they attach to a chain.

An OPU is a finite family {Z_i} with sum Z_i^dag Z_i = identity.  Refining it
n times places one element on each of the first n sites (site 0 in the
leftmost Kronecker slot), and the Gram matrix of the refined family in a
chain state is again a density matrix, whose von Neumann entropy per site is
the quantity the experiments track.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .linalg import as_matrix, check_density, hermitian_eig, vn_entropy

__all__ = [
    "OPU",
    "AFEntropyReport",
    "PurificationReport",
    "af_entropy_estimate",
    "af_purification_check",
    "identity_opu",
    "matrix_unit_opu",
    "opu_refine",
    "opu_state",
    "opu_validate",
]

OPU_TOL = 1e-10
# Largest matrix we materialize is 2048 x 2048 (2^22 entries).
MATERIALIZE_DIM_CAP = 2048
# Eigenvalue-product bookkeeping may go further, but not past 2^22 values.
PRODUCT_CAP_BITS = 22


@dataclass(frozen=True)
class OPU:
    """Operational partition of unity on one matrix algebra."""

    elements: tuple[np.ndarray, ...]
    name: str = "custom"

    def __post_init__(self) -> None:
        if not self.elements:
            raise ValueError("an OPU needs at least one element")
        dim = self.elements[0].shape[0]
        coerced = tuple(as_matrix(e) for e in self.elements)
        if any(e.shape[0] != dim for e in coerced):
            raise ValueError("OPU elements must share one dimension")
        object.__setattr__(self, "elements", coerced)
        if not opu_validate(self):
            raise ValueError(
                f"OPU invariant violated: sum of Z^dag Z deviates from the "
                f"identity by more than {OPU_TOL}"
            )

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)


def opu_validate(z: Union[OPU, Sequence[np.ndarray]], tol: float = OPU_TOL) -> bool:
    """True when sum Z_i^dag Z_i = identity within `tol` in operator norm."""
    elements = z.elements if isinstance(z, OPU) else [as_matrix(e) for e in z]
    dim = elements[0].shape[0]
    acc = np.zeros((dim, dim), dtype=np.complex128)
    for e in elements:
        acc += e.conj().T @ e
    return float(np.linalg.norm(acc - np.eye(dim), 2)) <= tol


def matrix_unit_opu(d: int) -> OPU:
    """The d^2 matrix units E_ij / sqrt(d); the canonical maximal refinement."""
    if d < 1:
        raise ValueError("dimension must be positive")
    scale = 1.0 / math.sqrt(d)
    elements = []
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=np.complex128)
            e[i, j] = scale
            elements.append(e)
    return OPU(tuple(elements), name=f"matrix-units({d})")


def identity_opu(d: int) -> OPU:
    """The trivial partition {identity}; refinements stay trivial."""
    return OPU((np.eye(d, dtype=np.complex128),), name=f"identity({d})")


def opu_refine(z: OPU, n: int) -> OPU:
    """Place one element of `z` on each of n sites.

    The refined index runs over digit tuples (i_0, ..., i_{n-1}) with i_0
    the most significant digit, and element (i_0, ..., i_{n-1}) is the
    Kronecker product with site 0 leftmost, so refining twice agrees with
    refining once on a doubled alphabet.
    """
    if n < 1:
        raise ValueError("refinement depth must be at least 1")
    if len(z) ** n * (z.dim**n) ** 2 > (1 << 24):
        raise ValueError(
            f"refinement of size {len(z)}^{n} on dimension {z.dim}^{n} "
            f"exceeds the materialization cap"
        )
    elements: list[np.ndarray] = list(z.elements)
    for _ in range(n - 1):
        elements = [np.kron(prev, site) for prev in elements for site in z.elements]
    return OPU(tuple(elements), name=f"{z.name}^({n})")


def opu_state(z: OPU, rho: np.ndarray) -> np.ndarray:
    """The density matrix rho[Z] with entries Tr(rho Z_j^dag Z_i) at (j, i).

    Computed through B_i = Z_i sqrt(rho): the Gram matrix of the B_i under
    the trace inner product is exactly rho[Z], and stacking the vectorized
    B_i turns the whole thing into one matmul.
    """
    rho = check_density(rho)
    k = len(z)
    dim = z.dim
    if rho.shape[0] != dim:
        raise ValueError(f"state dimension {rho.shape[0]} does not match OPU dimension {dim}")
    if k > MATERIALIZE_DIM_CAP:
        raise ValueError(f"refined OPU of size {k} exceeds the materialization cap")
    w, v = hermitian_eig(rho)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    stacked = np.stack(z.elements) @ sqrt_rho
    flat = stacked.reshape(k, dim * dim)
    gram = flat.conj() @ flat.T
    return check_density(gram)


@dataclass(frozen=True)
class AFEntropyReport:
    """Finite-n entropy-rate sequence S(rho[Z^(n)])/n; no limit is claimed."""

    n_max: int
    opu_size: int
    site_dim: int
    site_entropy: float
    gram_entropy: float  # S(rho[Z^(1)])
    entropies: tuple[float, ...]
    rates: tuple[float, ...]
    methods: tuple[str, ...]  # "direct" (materialized Gram) or "product"


def af_entropy_estimate(
    rho_site: np.ndarray,
    z: Optional[OPU] = None,
    n_max: int = 8,
    direct_cap: int = 1024,
) -> AFEntropyReport:
    """Entropy rates of the refined-OPU states of a product chain.

    For a product chain state the refined Gram matrix factorizes as
    rho[Z^(n)] = rho[Z^(1)]^{tensor n}; small n are computed directly from
    the refinement and checked against the factorization, larger n use it.
    """
    rho = check_density(rho_site)
    d = rho.shape[0]
    if z is None:
        z = matrix_unit_opu(d)
    if z.dim != d:
        raise ValueError(f"OPU dimension {z.dim} does not match the site dimension {d}")
    k = len(z)
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if k**n_max > (1 << PRODUCT_CAP_BITS):
        raise ValueError(
            f"refined family of size {k}^{n_max} exceeds 2^{PRODUCT_CAP_BITS}"
        )
    gram = opu_state(z, rho)
    s1 = vn_entropy(gram)
    entropies: list[float] = []
    methods: list[str] = []
    rho_n = rho
    gram_power = gram
    for n in range(1, n_max + 1):
        if k**n <= direct_cap and d**n <= MATERIALIZE_DIM_CAP:
            refined = opu_refine(z, n)
            g = opu_state(refined, rho_n)
            gap = float(np.linalg.norm(g - gram_power))
            if gap > 1e-8:
                raise ValueError(
                    f"refined Gram matrix deviates from the tensor power by {gap:.3e}"
                )
            entropies.append(vn_entropy(g))
            methods.append("direct")
        else:
            # additivity of the entropy over the verified tensor factorization
            entropies.append(n * s1)
            methods.append("product")
        next_direct = k ** (n + 1) <= direct_cap and d ** (n + 1) <= MATERIALIZE_DIM_CAP
        if n < n_max and next_direct:
            rho_n = np.kron(rho_n, rho)
            gram_power = np.kron(gram_power, gram)
    rates = tuple(e / n for n, e in enumerate(entropies, start=1))
    return AFEntropyReport(
        n_max=n_max,
        opu_size=k,
        site_dim=d,
        site_entropy=vn_entropy(rho),
        gram_entropy=s1,
        entropies=tuple(entropies),
        rates=rates,
        methods=tuple(methods),
    )


@dataclass(frozen=True)
class PurificationReport:
    n: int
    site_dim: int
    opu_size: int
    reference_entropy: float  # S(rho^(n))
    state_entropy: float  # S(rho[U^(n)])
    environment_entropy: float  # S(R[U^(n)])
    expected_entropy: float  # S(rho^(n)) + n log2 d
    spectrum_gap: float
    trace_gap: float
    norm_gap: float


def af_purification_check(
    rho_n: np.ndarray,
    site_dim: int = 2,
    n: Optional[int] = None,
    opu: Optional[OPU] = None,
) -> PurificationReport:
    """Purify rho^(n) through the refined matrix-unit OPU and compare marginals.

    Builds the three-slot vector Psi with Psi[:, :, m] = Z_m sqrt(rho); the
    marginal over slots I+II is rho[U^(n)] (up to transposition), the
    marginal over slot III is R[U^(n)], and the two must share a spectrum.
    Raises when the spectra disagree beyond 1e-8 or the entropy misses
    S(rho^(n)) + n log2(site_dim) by more than 1e-7.
    """
    rho = check_density(rho_n)
    total = rho.shape[0]
    if n is None:
        n = round(math.log(total, site_dim))
    if site_dim**n != total:
        raise ValueError(f"dimension {total} is not {site_dim}^{n}")
    if n > 4:
        raise ValueError("purification check is capped at n = 4")
    if opu is None:
        opu = opu_refine(matrix_unit_opu(site_dim), n)
    k = len(opu)
    w, v = hermitian_eig(rho)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    psi = np.stack([e @ sqrt_rho for e in opu.elements], axis=-1)  # D x D x k
    flat = psi.reshape(total * total, k)
    norm_gap = abs(float(np.linalg.norm(flat)) - 1.0)
    marg_state = flat.T @ flat.conj()  # k x k: Tr over slots I+II
    marg_env = flat @ flat.conj().T  # D^2 x D^2: Tr over slot III
    spec_state = np.sort(np.linalg.eigvalsh(marg_state))[::-1]
    spec_env = np.sort(np.linalg.eigvalsh(marg_env))[::-1]
    width = max(len(spec_state), len(spec_env))
    padded_state = np.zeros(width)
    padded_state[: len(spec_state)] = spec_state
    padded_env = np.zeros(width)
    padded_env[: len(spec_env)] = spec_env
    spectrum_gap = float(np.abs(padded_state - padded_env).max())
    if spectrum_gap > 1e-8:
        raise ValueError(f"purification marginals disagree in spectrum by {spectrum_gap:.3e}")
    state_entropy = vn_entropy(check_density(marg_state))
    environment_entropy = vn_entropy(check_density(marg_env))
    reference = vn_entropy(rho)
    expected = reference + n * math.log2(site_dim)
    if abs(state_entropy - expected) > 1e-7:
        raise ValueError(
            f"purified entropy {state_entropy} misses S(rho)+n*log2(d) = {expected}"
        )
    trace_gap = abs(float(np.trace(marg_state).real) - float(np.trace(marg_env).real))
    return PurificationReport(
        n=n,
        site_dim=site_dim,
        opu_size=k,
        reference_entropy=reference,
        state_entropy=state_entropy,
        environment_entropy=environment_entropy,
        expected_entropy=expected,
        spectrum_gap=spectrum_gap,
        trace_gap=trace_gap,
        norm_gap=norm_gap,
    )
