r"""Analytic security quantities: thresholds, concentration bounds for
forging / repudiation / robustness, the active-attack slack, information
balance, and the unambiguous-discrimination loss-tolerance estimate.

All bound functions return the raw analytic value, which for two-sided
Hoeffding expressions may exceed 1; ``clamp_probability`` is applied at the
reporting layer so raw values stay available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelModel, CostMatrix, multiport_null_click_probability
from .measurement import ForgingAnalysis, passive_forgery_analysis
from .states import PhaseAlphabet, gram_spectrum, signature_element_density, von_neumann_entropy


def clamp_probability(x: float) -> float:
    return min(1.0, max(0.0, x))


def thresholds(p_original: float, g: float) -> tuple[float, float]:
    """Authentication and verification click-fraction thresholds,
    s_a = p_original + g/3 and s_v = p_original + 2g/3."""
    if g <= 0:
        raise ValueError(f"gap must be positive, got {g}")
    if p_original < 0 or p_original + g >= 1:
        raise ValueError("need 0 <= p_original and p_original + g < 1")
    return p_original + g / 3.0, p_original + 2.0 * g / 3.0


def forging_bound(g: float, length: float) -> float:
    """Probability that a forger stays below the verification threshold:
    2 exp(-(2/9) g^2 L).  Raw value; 2 at L = 0."""
    if g <= 0:
        raise ValueError(f"gap must be positive, got {g}")
    return 2.0 * math.exp(-(2.0 / 9.0) * g * g * length)


def robustness_bound(g: float, length: float) -> float:
    """Probability that an all-honest run aborts at either receiver:
    exp(-(2/9) g^2 L) + exp(-(4/9) g^2 L); never exceeds the forging bound."""
    if g <= 0:
        raise ValueError(f"gap must be positive, got {g}")
    x = (2.0 / 9.0) * g * g * length
    return math.exp(-x) + math.exp(-2.0 * x)


def repudiation_bound(d: float, gap_fraction: float, length: float) -> float:
    """Probability that one receiver accepts and the other rejects,
    d^((s_v - s_a) L).  d = 1/2 for an ideal comparison network; device
    asymmetry raises it (worst-case preset 4/5).  d >= 1 makes the bound
    vacuous and returns 1."""
    if d < 0:
        raise ValueError(f"outcome probability d must be >= 0, got {d}")
    if gap_fraction <= 0:
        raise ValueError(f"threshold gap must be positive, got {gap_fraction}")
    if d >= 1.0:
        return 1.0
    return d ** (gap_fraction * length)


def nontrivial_length(g: float) -> float:
    """Signature length at which the forging bound crosses 1,
    L = 9 ln 2 / (2 g^2)."""
    if g <= 0:
        raise ValueError(f"gap must be positive, got {g}")
    return 9.0 * math.log(2.0) / (2.0 * g * g)


def active_delta(r: float, eps: float, length: float) -> float:
    """Trace-distance budget between passive and active stored signatures
    enforced by a multiport rejection threshold ``r`` with Hoeffding slack
    ``eps``: (1 - q) sqrt(r + eps) + q, q = min(1, 2 exp(-2 eps^2 L)).
    Decreases toward sqrt(r + eps) as L grows."""
    if r < 0:
        raise ValueError(f"rejection threshold must be >= 0, got {r}")
    if eps <= 0:
        raise ValueError(f"slack must be positive, got {eps}")
    if r + eps > 1.0:
        raise ValueError(f"r + eps must not exceed 1, got {r + eps}")
    q = min(1.0, 2.0 * math.exp(-2.0 * eps * eps * length))
    return (1.0 - q) * math.sqrt(r + eps) + q


@dataclass(frozen=True)
class ActiveAttackBound:
    """Forging and robustness bounds under an active attack with slack delta."""

    eps_forging: float
    eps_robustness: float
    vacuous: bool


def active_forging_bound(g_amplified: float, delta: float, length: float) -> ActiveAttackBound:
    """Bounds with the amplified gap reduced by the active-attack slack:
    2 exp(-(2/9)(g_amplified - delta)^2 L) and its robustness companion.
    ``vacuous`` flags delta >= g_amplified, where the exponent dies."""
    if g_amplified <= 0:
        raise ValueError(f"amplified gap must be positive, got {g_amplified}")
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    effective = g_amplified - delta
    if effective <= 0:
        return ActiveAttackBound(eps_forging=2.0, eps_robustness=2.0, vacuous=True)
    x = (2.0 / 9.0) * effective * effective * length
    return ActiveAttackBound(
        eps_forging=2.0 * math.exp(-x),
        eps_robustness=math.exp(-x) + math.exp(-2.0 * x),
        vacuous=False,
    )


def multiport_robustness_bound(r: float, length: float) -> float:
    """Probability that honest distribution breaches the multiport rejection
    threshold, exp(-2 r^2 L).  The threshold fed here must already include
    the raw per-pulse dark-count probability."""
    if r <= 0:
        raise ValueError(f"rejection threshold must be positive, got {r}")
    return math.exp(-2.0 * r * r * length)


def trace_distance_from_fidelity(expected_fidelity: float) -> float:
    """Upper bound sqrt(1 - F) on the trace distance between a pure state
    and any state with expected fidelity F to it."""
    if not 0.0 <= expected_fidelity <= 1.0:
        raise ValueError(f"fidelity must be in [0,1], got {expected_fidelity}")
    return math.sqrt(1.0 - expected_fidelity)


@dataclass(frozen=True)
class InfoBalance:
    """Key information vs what all signature copies in circulation reveal."""

    key_bits: float
    accessible_bits: float
    ratio: float
    balanced: bool


def info_balance(alphabet: PhaseAlphabet, receivers: int, length: float) -> InfoBalance:
    """Compare L log2 N key bits against L T S(rho) accessible bits; the
    scheme needs the ratio well below one (``balanced`` flags ratio < 1)."""
    if receivers < 1:
        raise ValueError(f"receiver count must be >= 1, got {receivers}")
    entropy = von_neumann_entropy(signature_element_density(alphabet))
    key_bits = length * math.log2(alphabet.n_phases)
    accessible = length * receivers * entropy
    ratio = accessible / key_bits if key_bits > 0 else 0.0
    return InfoBalance(
        key_bits=key_bits,
        accessible_bits=accessible,
        ratio=ratio,
        balanced=ratio < 1.0,
    )


def usd_probability(alphabet: PhaseAlphabet) -> float:
    """Optimal success probability of unambiguous discrimination among the
    alphabet states: N min_k |c_k|^2 over the standard-basis coefficients of
    any one state, i.e. the smallest Gram eigenvalue.  Zero for identical
    states, one in the orthogonal limit."""
    lam = gram_spectrum(alphabet).eigenvalues
    return float(alphabet.n_phases * (lam / alphabet.n_phases).min())


@dataclass(frozen=True)
class SecurityReport:
    """Every analytic security quantity for one cost matrix and alphabet."""

    n_phases: int
    mean_photons: float
    receivers: int
    p_original: float
    p_original_mean: float
    passive: ForgingAnalysis = field(repr=False)
    amplified: ForgingAnalysis = field(repr=False)
    gap: float
    gap_upper: float
    gap_amplified: float
    s_a: float
    s_v: float
    rejection_threshold: float
    hoeffding_slack: float
    delta: float
    repudiation_base: float
    entropy_per_copy: float
    info_ratio: float
    usd_passive: float
    usd_amplified: float
    nontriviality_length: float
    reference_length: float
    eps_forging_raw: float
    eps_repudiation_raw: float
    eps_robustness_raw: float
    eps_forging_active_raw: float
    eps_robustness_multiport_raw: float
    active_vacuous: bool
    dark_probability_per_gate: float
    dark_probability_per_clock: float

    @property
    def certified(self) -> bool:
        return self.passive.certified and self.amplified.certified

    def to_dict(self) -> dict:
        return {
            "n_phases": self.n_phases,
            "mean_photons": self.mean_photons,
            "receivers": self.receivers,
            "p_original": self.p_original,
            "p_original_mean": self.p_original_mean,
            "p_forgery_lower": self.passive.p_forgery_lower,
            "p_forgery_upper": self.passive.p_forgery_upper,
            "p_forgery_srm_raw": self.passive.p_forgery_srm_raw,
            "p_forgery_amplified_lower": self.amplified.p_forgery_lower,
            "p_forgery_amplified_upper": self.amplified.p_forgery_upper,
            "gap": self.gap,
            "gap_upper": self.gap_upper,
            "gap_amplified": self.gap_amplified,
            "s_a": self.s_a,
            "s_v": self.s_v,
            "certified": self.certified,
            "helstrom_passive_lower": self.passive.helstrom_lower.to_dict(),
            "helstrom_passive_upper": self.passive.helstrom_upper.to_dict(),
            "helstrom_amplified_lower": self.amplified.helstrom_lower.to_dict(),
            "helstrom_amplified_upper": self.amplified.helstrom_upper.to_dict(),
            "cost_matrix_lower_row": list(self.passive.cost_matrix_lower.first_row),
            "cost_matrix_upper_row": list(self.passive.cost_matrix_upper.first_row),
            "rejection_threshold": self.rejection_threshold,
            "hoeffding_slack": self.hoeffding_slack,
            "delta": self.delta,
            "repudiation_base": self.repudiation_base,
            "entropy_per_copy_bits": self.entropy_per_copy,
            "info_ratio": self.info_ratio,
            "usd_probability_passive": self.usd_passive,
            "usd_probability_amplified": self.usd_amplified,
            "nontriviality_length": self.nontriviality_length,
            "reference_length": self.reference_length,
            "eps_forging": clamp_probability(self.eps_forging_raw),
            "eps_forging_raw": self.eps_forging_raw,
            "eps_repudiation": clamp_probability(self.eps_repudiation_raw),
            "eps_repudiation_raw": self.eps_repudiation_raw,
            "eps_robustness": clamp_probability(self.eps_robustness_raw),
            "eps_robustness_raw": self.eps_robustness_raw,
            "eps_forging_active": clamp_probability(self.eps_forging_active_raw),
            "eps_forging_active_raw": self.eps_forging_active_raw,
            "eps_robustness_multiport": clamp_probability(self.eps_robustness_multiport_raw),
            "eps_robustness_multiport_raw": self.eps_robustness_multiport_raw,
            "active_vacuous": self.active_vacuous,
            "dark_probability_per_gate": self.dark_probability_per_gate,
            "dark_probability_per_clock": self.dark_probability_per_clock,
        }

    def to_csv_row(self) -> tuple[list[str], list]:
        """Flat (header, row) pair with the scalar fields only."""
        d = self.to_dict()
        keys = [k for k, v in d.items() if not isinstance(v, (dict, list))]
        return keys, [d[k] for k in keys]


def build_security_report(
    cost: CostMatrix,
    alphabet: PhaseAlphabet,
    channel: ChannelModel,
    receivers: int = 2,
    rejection_threshold: float | None = None,
    hoeffding_slack: float | None = None,
    repudiation_base: float = 0.5,
    reference_length: float = 1e7,
    helstrom_tol: float = 1e-9,
) -> SecurityReport:
    """Run the full analytic pipeline on a measured cost matrix.

    The default rejection threshold is twice the honest multiport null-port
    click probability plus the raw per-pulse dark probability (the dark
    uplift the threshold must carry); the default Hoeffding slack is half the
    threshold.
    """
    passive = passive_forgery_analysis(cost, alphabet, amplified=False, tol=helstrom_tol)
    amplified = passive_forgery_analysis(cost, alphabet, amplified=True, tol=helstrom_tol)
    p_original = passive.p_original
    g = passive.gap_lower
    g_amp = amplified.gap_lower
    s_a, s_v = thresholds(p_original, g)

    if rejection_threshold is None:
        honest_null = multiport_null_click_probability(channel, alphabet.mean_photons)
        rejection_threshold = 2.0 * honest_null + channel.dark_probability_per_clock
    if hoeffding_slack is None:
        hoeffding_slack = rejection_threshold / 2.0

    delta = active_delta(rejection_threshold, hoeffding_slack, reference_length)
    active = active_forging_bound(g_amp, delta, reference_length) if g_amp > 0 else ActiveAttackBound(2.0, 2.0, True)

    entropy = von_neumann_entropy(signature_element_density(alphabet))
    balance = info_balance(alphabet, receivers, reference_length)

    return SecurityReport(
        n_phases=alphabet.n_phases,
        mean_photons=alphabet.mean_photons,
        receivers=receivers,
        p_original=p_original,
        p_original_mean=passive.p_original_mean,
        passive=passive,
        amplified=amplified,
        gap=g,
        gap_upper=passive.gap_upper,
        gap_amplified=g_amp,
        s_a=s_a,
        s_v=s_v,
        rejection_threshold=rejection_threshold,
        hoeffding_slack=hoeffding_slack,
        delta=delta,
        repudiation_base=repudiation_base,
        entropy_per_copy=entropy,
        info_ratio=balance.ratio,
        usd_passive=usd_probability(alphabet),
        usd_amplified=usd_probability(alphabet.amplified(1.5)),
        nontriviality_length=nontrivial_length(g),
        reference_length=reference_length,
        eps_forging_raw=forging_bound(g, reference_length),
        eps_repudiation_raw=repudiation_bound(repudiation_base, g / 3.0, reference_length),
        eps_robustness_raw=robustness_bound(g, reference_length),
        eps_forging_active_raw=active.eps_forging,
        eps_robustness_multiport_raw=multiport_robustness_bound(rejection_threshold, reference_length),
        active_vacuous=active.vacuous,
        dark_probability_per_gate=channel.dark_probability_per_gate,
        dark_probability_per_clock=channel.dark_probability_per_clock,
    )


def sweep_bounds(
    gap: float,
    lengths: np.ndarray,
    repudiation_base: float = 0.5,
    gap_amplified: float | None = None,
    delta: float = 0.0,
) -> list[dict]:
    """Tabulate the clamped bounds over a grid of signature lengths."""
    rows = []
    for length in np.asarray(lengths, dtype=float):
        if gap_amplified is not None and gap_amplified - delta > 0:
            active = active_forging_bound(gap_amplified, delta, length).eps_forging
        else:
            active = 2.0
        rows.append(
            {
                "L": float(length),
                "eps_forging": clamp_probability(forging_bound(gap, length)),
                "eps_repudiation": clamp_probability(
                    repudiation_bound(repudiation_base, gap / 3.0, length)
                ),
                "eps_robustness": clamp_probability(robustness_bound(gap, length)),
                "eps_active": clamp_probability(active),
            }
        )
    return rows
