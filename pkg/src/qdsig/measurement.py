r"""Minimum-cost measurement: square-root POVM, optimality certification,
and the circulant-symmetric bounding analysis of a measured cost matrix.

The forger's optimal guess of an unknown alphabet phase minimises the
expected verification cost

    p_forgery = min over POVMs of (1/N) sum_{phi,theta} Tr(Pi_phi rho^theta) c[phi,theta].

For circulant symmetric cost matrices the minimiser is the square-root
measurement Pi_i = Phi^{-1/2} |v_i><v_i| Phi^{-1/2} with Phi = sum_i |v_i><v_i|,
certified by four operator criteria on the risk operators
W_i = (1/N) sum_j c[i,j] |v_j><v_j| and the Lagrangian Gamma = sum_i Pi_i W_i:

    1. sum_i Pi_i W_i = sum_i W_i Pi_i
    2. Gamma = Gamma^dagger
    3. Pi_i (W_i - Gamma) = (W_i - Gamma) Pi_i = 0 for all i
    4. (W_i - Gamma) is positive semidefinite for all i.

A measured matrix that is only approximately circulant symmetric is
sandwiched between two exactly circulant symmetric matrices built from
per-offset extrema; the square-root costs of those two matrices bracket the
true optimum whenever the criteria certify them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import CostMatrix
from .states import (
    PhaseAlphabet,
    SpectralDecomposition,
    all_state_coordinates,
    gram_spectrum,
)

# Relative cutoff below which a Gram eigenvalue is treated as zero when
# forming Phi^{-1/2}; small-amplitude alphabets are numerically rank deficient.
PSEUDO_INVERSE_THRESHOLD = 1e-12


@dataclass(frozen=True)
class Povm:
    """A measurement: positive operators summing to the identity on the
    support of the alphabet (the ``support`` projector)."""

    elements: tuple
    support: np.ndarray = field(repr=False)

    PSD_TOL = 1e-10
    COMPLETENESS_TOL = 1e-10

    @property
    def n_outcomes(self) -> int:
        return len(self.elements)

    def validate(self) -> None:
        total = np.zeros_like(self.support)
        for e in self.elements:
            if np.linalg.eigvalsh(0.5 * (e + e.conj().T)).min() < -self.PSD_TOL:
                raise ValueError("POVM element has negative eigenvalue beyond tolerance")
            total = total + e
        if np.abs(total - self.support).max() > self.COMPLETENESS_TOL:
            raise ValueError("POVM elements do not resolve the support projector")


def square_root_povm(spec: SpectralDecomposition) -> Povm:
    """Square-root measurement of the alphabet.

    Phi = sum_i |v_i><v_i| is diagonal with the Gram eigenvalues in the
    standard basis; eigenvalues below ``PSEUDO_INVERSE_THRESHOLD`` (relative
    to the largest) are dropped, so degenerate alphabets yield a measurement
    complete on the support only.  The elements are covariant:
    Pi_k = U^k Pi_0 U^{-k}.
    """
    lam = spec.eigenvalues
    keep = lam > PSEUDO_INVERSE_THRESHOLD * lam.max()
    inv_sqrt = np.where(keep, 1.0 / np.sqrt(np.where(keep, lam, 1.0)), 0.0)
    coords = all_state_coordinates(spec)
    elements = []
    for i in range(spec.n):
        w = inv_sqrt * coords[i]
        elements.append(np.outer(w, w.conj()))
    support = np.diag(keep.astype(complex))
    return Povm(elements=tuple(elements), support=support)


def risk_operators(cost: CostMatrix, spec: SpectralDecomposition) -> list[np.ndarray]:
    """W_i = (1/N) sum_j c[i,j] |v_j><v_j|, one Hermitian PSD operator per
    declarable phase; circulant costs make them covariant copies of W_0."""
    n = spec.n
    if cost.n != n:
        raise ValueError(f"cost matrix size {cost.n} != alphabet size {n}")
    coords = all_state_coordinates(spec)
    projectors = np.einsum("jd,je->jde", coords, coords.conj())
    return [np.tensordot(cost.values[i], projectors, axes=1) / n for i in range(n)]


def outcome_probability_matrix(povm: Povm, spec: SpectralDecomposition) -> np.ndarray:
    """P[phi, theta] = Tr(Pi_phi |v_theta><v_theta|)."""
    coords = all_state_coordinates(spec)
    stacked = np.stack(povm.elements)
    return np.einsum("td,fde,te->ft", coords.conj(), stacked, coords).real


def outcome_distribution(povm: Povm, theta_index: int, spec: SpectralDecomposition) -> np.ndarray:
    """Probabilities of each declared phase when the true phase index is
    ``theta_index``; nonnegative, sums to one on full support, and shifts
    cyclically with the true index for covariant measurements."""
    if not 0 <= theta_index < spec.n:
        raise IndexError(f"phase index {theta_index} out of range for N={spec.n}")
    return outcome_probability_matrix(povm, spec)[:, theta_index]


def expected_cost(povm: Povm, cost: CostMatrix, spec: SpectralDecomposition) -> float:
    """Average verification-click probability of a guess-and-declare forger,
    (1/N) sum_{phi,theta} Tr(Pi_phi |v_theta><v_theta|) c[phi,theta]."""
    if cost.n != spec.n:
        raise ValueError(f"cost matrix size {cost.n} != alphabet size {spec.n}")
    probs = outcome_probability_matrix(povm, spec)
    return float((probs * cost.values).sum() / spec.n)


def _operator_norm(m: np.ndarray) -> float:
    """Spectral norm via Hermitian eigensolve of M^dagger M."""
    return float(math.sqrt(max(0.0, np.linalg.eigvalsh(m.conj().T @ m).max())))


@dataclass(frozen=True)
class HelstromReport:
    """Residuals of the four minimum-cost criteria for a (POVM, cost) pair."""

    criterion1_residual: float
    criterion2_residual: float
    criterion3_residual: float
    criterion4_min_eigenvalue: float
    tolerance: float
    satisfied: bool

    def to_dict(self) -> dict:
        return {
            "criterion1_residual": self.criterion1_residual,
            "criterion2_residual": self.criterion2_residual,
            "criterion3_residual": self.criterion3_residual,
            "criterion4_min_eigenvalue": self.criterion4_min_eigenvalue,
            "tolerance": self.tolerance,
            "satisfied": self.satisfied,
        }


def helstrom_verify(
    povm: Povm,
    cost: CostMatrix,
    spec: SpectralDecomposition,
    tol: float = 1e-9,
) -> HelstromReport:
    """Evaluate all four minimum-cost criteria.

    Residuals are operator norms of the defect of each equality; criterion 4
    reports the smallest eigenvalue over all Hermitian parts of (W_i - Gamma).
    ``satisfied`` requires every residual below ``tol`` and the minimum
    eigenvalue above ``-tol``; a failure is a report, not an exception.
    """
    ws = risk_operators(cost, spec)
    gamma = sum(p @ w for p, w in zip(povm.elements, ws))
    gamma_swapped = sum(w @ p for p, w in zip(povm.elements, ws))
    r1 = _operator_norm(gamma - gamma_swapped)
    r2 = _operator_norm(gamma - gamma.conj().T)
    r3 = 0.0
    min_eig = math.inf
    for p, w in zip(povm.elements, ws):
        diff = w - gamma
        r3 = max(r3, _operator_norm(p @ diff), _operator_norm(diff @ p))
        herm = 0.5 * (diff + diff.conj().T)
        min_eig = min(min_eig, float(np.linalg.eigvalsh(herm).min()))
    ok = r1 < tol and r2 < tol and r3 < tol and min_eig > -tol
    return HelstromReport(
        criterion1_residual=r1,
        criterion2_residual=r2,
        criterion3_residual=r3,
        criterion4_min_eigenvalue=min_eig,
        tolerance=tol,
        satisfied=ok,
    )


def bounding_circulant_matrices(cost: CostMatrix) -> tuple[CostMatrix, CostMatrix]:
    """Closest circulant symmetric matrices bracketing a measured cost matrix.

    Entries are grouped by unordered phase offset: positions (i, j) of the
    upper triangle with (j - i) mod N equal to m or N - m form one orbit,
    so each unordered phase pair contributes one sample.  The lower matrix
    takes each orbit's minimum and the upper its maximum; both are exactly
    circulant and symmetric, coincide with the input when it already is, and
    bracket every sampled entry.
    """
    v = cost.values
    n = cost.n
    lo = np.empty(n)
    hi = np.empty(n)
    for m in range(n // 2 + 1):
        vals = [
            v[i, j]
            for i in range(n)
            for j in range(i, n)
            if (j - i) % n == m or (j - i) % n == (n - m) % n
        ]
        lo[m] = lo[(n - m) % n] = min(vals)
        hi[m] = hi[(n - m) % n] = max(vals)
    return CostMatrix.circulant(lo), CostMatrix.circulant(hi)


@dataclass(frozen=True)
class ForgingAnalysis:
    """Bracketed optimal-forging cost for one measured cost matrix.

    ``p_forgery_lower``/``p_forgery_upper`` are the square-root-measurement
    costs of the bounding matrices; they bracket the true optimum when
    ``certified`` (all four criteria hold for both).  ``p_original`` is the
    worst-case honest click probability (largest diagonal element, with the
    diagonal mean also reported), and ``p_forgery_srm_raw`` is the cost of
    the same measurement against the raw matrix, an unconditional upper
    bound on the optimum.
    """

    amplified: bool
    p_forgery_lower: float
    p_forgery_upper: float
    p_forgery_srm_raw: float
    p_original: float
    p_original_mean: float
    cost_matrix_lower: CostMatrix
    cost_matrix_upper: CostMatrix
    helstrom_lower: HelstromReport
    helstrom_upper: HelstromReport

    def __post_init__(self):
        if self.p_forgery_lower > self.p_forgery_upper + 1e-15:
            raise ValueError("forging cost bracket is inverted")

    @property
    def certified(self) -> bool:
        return self.helstrom_lower.satisfied and self.helstrom_upper.satisfied

    @property
    def gap_lower(self) -> float:
        return self.p_forgery_lower - self.p_original

    @property
    def gap_upper(self) -> float:
        return self.p_forgery_upper - self.p_original


def passive_forgery_analysis(
    cost: CostMatrix,
    alphabet: PhaseAlphabet,
    amplified: bool = False,
    tol: float = 1e-9,
) -> ForgingAnalysis:
    """Bracket the optimal forging probability for a measured cost matrix.

    The forger measures states at the alphabet amplitude, or at sqrt(3/2)
    times it when ``amplified`` (he measures his copy together with the half
    pulse forwarded by the other receiver).  A criterion-4 failure downgrades
    the bracket to a heuristic bound via the ``certified`` flag.
    """
    measured = alphabet.amplified(1.5) if amplified else alphabet
    spec = gram_spectrum(measured)
    povm = square_root_povm(spec)
    lower, upper = bounding_circulant_matrices(cost)
    return ForgingAnalysis(
        amplified=amplified,
        p_forgery_lower=expected_cost(povm, lower, spec),
        p_forgery_upper=expected_cost(povm, upper, spec),
        p_forgery_srm_raw=expected_cost(povm, cost, spec),
        p_original=cost.max_diagonal,
        p_original_mean=cost.mean_diagonal,
        cost_matrix_lower=lower,
        cost_matrix_upper=upper,
        helstrom_lower=helstrom_verify(povm, lower, spec, tol),
        helstrom_upper=helstrom_verify(povm, upper, spec, tol),
    )
