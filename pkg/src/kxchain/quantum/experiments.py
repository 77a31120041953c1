"""Chain-level rate experiments: the quantum Brudno sweep and the composite run.

Both experiments work on a faithful qubit product state.  Per block length n
they build the typical projection from the entropy window intersected with
the incompressible index strings (the semi-measure snapshot from an
enumeration cache plus the literal-program floor), sample minimal
projections in its range, and track the ensemble expectation rates next to
the finite-n theorem constants.  Nothing asymptotic is asserted: the sweep
reports the first block length from which the finite-n items hold onward,
or its absence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from ..classical import _literal_floor_bits, delta_weight
from ..complexity import EnumerationCache, m_lower
from .ensemble import SemiDensityEnsemble, build_mu_hat, gacs_lower, product_component, reduced_matrix
from .linalg import check_density, haar_vector, vn_entropy
from .typical import TypicalProjectionReport, build_report

__all__ = [
    "BrudnoLevel",
    "CompositeReport",
    "CompositeSample",
    "MinimalProjectionSample",
    "QuantumBrudnoReport",
    "composite_experiment",
    "quantum_brudno_experiment",
]

FAITHFUL_TOL = 1e-12


@dataclass(frozen=True)
class MinimalProjectionSample:
    """One rank-one projection |psi><psi| dominated by p_n(eps)."""

    kind: str  # "haar-<i>" | "extreme-max" | "extreme-min"
    omega: float  # <psi| rho^(n) |psi>
    expectation: float  # <psi| M |psi>
    rate: float  # -log2(expectation)/n
    in_window: bool  # item-2 bounds for this sample


@dataclass(frozen=True)
class BrudnoLevel:
    n: int
    rank: int
    omega: float
    alpha_n: Optional[float]
    b_complement_count: int
    items: Mapping[str, bool]
    samples: tuple[MinimalProjectionSample, ...]
    rate: Optional[float]  # headline: the first seeded sample's item-4 rate
    report: TypicalProjectionReport


@dataclass(frozen=True)
class QuantumBrudnoReport:
    site_spectrum: tuple[float, ...]
    entropy_rate: float
    eps: float
    seed: int
    n_values: tuple[int, ...]
    levels: tuple[BrudnoLevel, ...]
    n_epsilon: Optional[int]
    ensemble_sizes: tuple[int, ...]

    @property
    def rates(self) -> tuple[Optional[float], ...]:
        return tuple(level.rate for level in self.levels)


def _faithful_qubit(rho_site: np.ndarray) -> np.ndarray:
    rho = check_density(rho_site)
    if rho.shape[0] != 2:
        raise ValueError("chain experiments run on qubit site algebras")
    if float(np.linalg.eigvalsh(rho)[0]) <= FAITHFUL_TOL:
        raise ValueError("the chain state must be faithful (no zero site eigenvalue)")
    return rho


def _semimeasure_log(cache: Optional[EnumerationCache], c_lit: int):
    """-log2 of the snapshot semi-measure on index strings.

    The snapshot is max(cache mass, literal floor): both are lower bounds on
    an honest semi-measure, and the floor keeps never-emitted strings from
    looking infinitely compressible.
    """
    masses: dict[str, float] = {}
    if cache is not None:
        for output in cache.min_length_by_output():
            mass = m_lower(cache, output)
            masses[output] = math.log2(mass.denominator) - math.log2(mass.numerator)

    def log_mu(x: str) -> float:
        floor = _literal_floor_bits(len(x), c_lit)
        return min(masses.get(x, math.inf), floor)

    return log_mu


def _eta_family(rho: np.ndarray, n: int) -> list:
    return [
        product_component(rho, m, delta_weight(m), f"eta(delta({m}).rho^({m}))")
        for m in range(2, n + 1)
    ]


def _sample_projections(
    report: TypicalProjectionReport,
    ensemble: SemiDensityEnsemble,
    rng: np.random.Generator,
    samples: int,
) -> tuple[MinimalProjectionSample, ...]:
    if report.rank == 0:
        return ()
    members = report.member_matrix()
    lam = np.array(report.selected_eigenvalues)
    lo = report.margins["window_low"]
    hi = report.margins["window_high"]
    out: list[MinimalProjectionSample] = []

    def record(kind: str, coeffs: np.ndarray) -> None:
        psi = members @ coeffs
        omega = float((np.abs(coeffs) ** 2 * lam).sum())
        expectation = ensemble.expectation_vector(psi)
        rate = -math.log2(expectation) / report.n
        out.append(
            MinimalProjectionSample(
                kind=kind,
                omega=omega,
                expectation=expectation,
                rate=rate,
                in_window=lo <= omega <= hi,
            )
        )

    for i in range(samples):
        record(f"haar-{i}", haar_vector(rng, report.rank))
    top = int(np.argmax(lam))
    bottom = int(np.argmin(lam))
    for kind, idx in (("extreme-max", top), ("extreme-min", bottom)):
        coeffs = np.zeros(report.rank, dtype=np.complex128)
        coeffs[idx] = 1.0
        record(kind, coeffs)
    return tuple(out)


def quantum_brudno_experiment(
    rho_site: np.ndarray,
    n_range: Sequence[int],
    eps: float,
    *,
    cache: Optional[EnumerationCache] = None,
    samples: int = 2,
    seed: int = 0,
    c_lit: int = 8,
) -> QuantumBrudnoReport:
    """Sweep block lengths; per n, items 1-3 plus item-4 expectation rates.

    The selection keeps sorted-spectrum positions whose n-bit expansion the
    semi-measure snapshot prices above n(s - 2 eps) bits; alpha_n is the
    measured log-excess of the discarded count, or None when nothing is
    discarded (the item-3 lower bound then degenerates to zero).  The
    ensemble at level n carries the eta family delta(m) rho^(m), m <= n,
    and item-4 rates use seeded Haar minimal projections plus the window
    extremes.
    """
    rho = _faithful_qubit(rho_site)
    n_values = tuple(sorted(set(int(n) for n in n_range)))
    if not n_values or n_values[0] < 1:
        raise ValueError("block lengths must be positive")
    log_mu = _semimeasure_log(cache, c_lit)
    s = vn_entropy(rho)
    levels: list[BrudnoLevel] = []
    ensemble_sizes: list[int] = []
    for n in n_values:
        threshold = n * (s - 2 * eps)
        complement = sum(
            1 for p in range(2**n) if log_mu(format(p, f"0{n}b")) <= threshold
        )
        alpha_n = math.log2(complement) - threshold if complement else None
        report = build_report(
            rho,
            n,
            eps,
            flavor="brudno",
            b_filter=lambda x: log_mu(x) > threshold,
            alpha_n=alpha_n,
        )
        ensemble = build_mu_hat(2**n, cache, extra=_eta_family(rho, n))
        ensemble_sizes.append(len(ensemble.components))
        rng = np.random.default_rng((seed, n))
        level_samples = _sample_projections(report, ensemble, rng, samples)
        levels.append(
            BrudnoLevel(
                n=n,
                rank=report.rank,
                omega=report.omega,
                alpha_n=alpha_n,
                b_complement_count=complement,
                items=report.items,
                samples=level_samples,
                rate=level_samples[0].rate if level_samples else None,
                report=report,
            )
        )
    n_epsilon: Optional[int] = None
    item_keys = ("item1", "item2", "item3")
    for i, level in enumerate(levels):
        if all(all(lv.items[k] for k in item_keys) for lv in levels[i:]):
            n_epsilon = level.n
            break
    return QuantumBrudnoReport(
        site_spectrum=tuple(float(x) for x in np.linalg.eigvalsh(rho)[::-1]),
        entropy_rate=s,
        eps=eps,
        seed=seed,
        n_values=n_values,
        levels=tuple(levels),
        n_epsilon=n_epsilon,
        ensemble_sizes=tuple(ensemble_sizes),
    )


# ---------------------------------------------------------------------------
# Composite chain: two independent copies and entangled minimal projections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompositeSample:
    kind: str  # "product" | "haar-entangled" | "max-entangled"
    state_expectation: float  # <psi| rho^(n) x rho^(n) |psi>
    state_rate_per_site: float
    ensemble_expectation: float  # <psi| M_X x M_Y |psi>
    rate_per_site: float  # -log2(e)/(2n)
    rate_per_n: float  # -log2(e)/n, the statement's normalization
    closest_candidate: str  # "proof (s per site)" | "statement (s/2 per site)"


@dataclass(frozen=True)
class CompositeReport:
    n: int
    eps: float
    entropy_rate: float
    seed: int
    rank: int  # per-side selection size
    samples: tuple[CompositeSample, ...]
    trace_product: float  # Tr(M_X x M_Y)
    additivity_gap: float
    split_gap: float  # product sample: |rate - (rate_X + rate_Y)| in bits


def composite_experiment(
    rho_site: np.ndarray,
    n: int,
    eps: float,
    *,
    cache: Optional[EnumerationCache] = None,
    samples: int = 1,
    seed: int = 0,
    c_lit: int = 8,
) -> CompositeReport:
    """Two independent chain copies, minimal projections in p_n x p_n.

    The expectation of M_X x M_Y in a vector sum c_ij |r_i> x |r_j> only
    needs both ensembles compressed to the selected eigenvectors: it equals
    vdot(C, A C B^T) for the coefficient matrix C.  The report carries the
    per-site and per-n rates for each sample and flags which of the two
    candidate readings (s per site, from the proof; s/2 per site, from the
    statement) the measurement lands closer to.
    """
    rho = _faithful_qubit(rho_site)
    s = vn_entropy(rho)
    log_mu = _semimeasure_log(cache, c_lit)
    threshold = n * (s - 2 * eps)
    complement = sum(
        1 for p in range(2**n) if log_mu(format(p, f"0{n}b")) <= threshold
    )
    alpha_n = math.log2(complement) - threshold if complement else None
    report = build_report(
        rho,
        n,
        eps,
        flavor="brudno",
        b_filter=lambda x: log_mu(x) > threshold,
        alpha_n=alpha_n,
    )
    if report.rank == 0:
        raise ValueError(f"empty typical selection at n={n}, eps={eps}")
    members = report.member_matrix()
    lam = np.array(report.selected_eigenvalues)
    m_x = build_mu_hat(2**n, cache, extra=_eta_family(rho, n))
    m_y = build_mu_hat(2**n, cache, extra=_eta_family(rho, n))
    a_red = reduced_matrix(m_x, members)
    b_red = reduced_matrix(m_y, members)
    rng = np.random.default_rng((seed, 2 * n))
    r = report.rank

    def measure(kind: str, coeffs: np.ndarray) -> CompositeSample:
        ens = float(np.vdot(coeffs, a_red @ coeffs @ b_red.T).real)
        state = float(np.vdot(coeffs, (lam[:, None] * coeffs) * lam[None, :]).real)
        per_site = -math.log2(ens) / (2 * n)
        candidates = {"proof (s per site)": s, "statement (s/2 per site)": s / 2}
        closest = min(candidates, key=lambda name: abs(per_site - candidates[name]))
        return CompositeSample(
            kind=kind,
            state_expectation=state,
            state_rate_per_site=-math.log2(state) / (2 * n),
            ensemble_expectation=ens,
            rate_per_site=per_site,
            rate_per_n=-math.log2(ens) / n,
            closest_candidate=closest,
        )

    out: list[CompositeSample] = []
    split_gap = math.inf
    for i in range(samples):
        a = haar_vector(rng, r)
        b = haar_vector(rng, r)
        product = measure(f"product-{i}", np.outer(a, b))
        # tensor factorization: the rate must split into the one-sided rates
        ex = float(np.vdot(a, a_red @ a).real)
        ey = float(np.vdot(b, b_red @ b).real)
        split = abs(
            -math.log2(product.ensemble_expectation) - (-math.log2(ex) - math.log2(ey))
        )
        split_gap = min(split_gap, split)
        out.append(product)
        c = rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))
        out.append(measure(f"haar-entangled-{i}", c / np.linalg.norm(c)))
    out.append(measure("max-entangled", np.eye(r, dtype=np.complex128) / math.sqrt(r)))

    # additivity of the lower Gacs quantity over product inputs, evaluated
    # through the per-side expectations and through the explicit double sum
    rho_a = rho
    for _ in range(n - 1):
        rho_a = np.kron(rho_a, rho)
    ga = gacs_lower(rho_a, m_x)
    gb = gacs_lower(rho_a, m_y)
    cross = math.fsum(
        float(cx.weight) * cx.expectation_density(rho_a) * float(cy.weight) * cy.expectation_density(rho_a)
        for cx in m_x.components
        for cy in m_y.components
    )
    additivity_gap = abs(-math.log2(cross) - (ga + gb))
    return CompositeReport(
        n=n,
        eps=eps,
        entropy_rate=s,
        seed=seed,
        rank=r,
        samples=tuple(out),
        trace_product=m_x.total_trace() * m_y.total_trace(),
        additivity_gap=additivity_gap,
        split_gap=split_gap,
    )
