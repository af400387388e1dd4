r"""Physical model of the detection chain and the click-cost matrix.

The model reconstructs per-pulse click probabilities from the stated system
constants: Poissonian threshold detection p = 1 - exp(-mu_eff) with

    mu_eff = mu_scale * eta_total * |alpha|^2 * (1 - V cos(phi - theta)) / 2,

an independent dark-count probability per time gate, and an optional
phase-independent background probability per gate (time-gate leakage of
non-interfering photons).  With mu_scale = 1 and zero background this reduces
exactly to the ideal interference law 1 - exp(-|alpha|^2 sin^2((phi-theta)/2))
when V = 1, losses vanish and the detector is perfect.

Dark counts carry two conventions, never mixed silently:

* per-gate, ``dark_probability_per_gate`` = R_dark * gate  (time-filtered
  verification statistics);
* per-clock-period, ``dark_probability_per_clock`` = R_dark / clock  (raw
  multiport-monitoring statistics and the rejection-threshold uplift).
"""

from __future__ import annotations

import csv
import importlib.resources
import math
from dataclasses import dataclass, replace, asdict
from pathlib import Path

import numpy as np

from .states import PhaseAlphabet


@dataclass(frozen=True)
class ChannelModel:
    """Losses, visibility, detector and timing constants of the system.

    Defaults are the experiment's operating constants: 100 MHz clock, 320 cps
    dark rate per detector, 2 ns software gate, 42% detector efficiency, 98%
    interferometric visibility, 7.5 dB comparison-stage loss and 7.1 dB
    receiver-interferometer loss.  ``mu_scale`` and ``gate_background`` are
    calibration parameters (see ``fit_calibration``); their neutral values 1
    and 0 leave the bare model untouched.
    """

    clock_hz: float = 1e8
    dark_cps: float = 320.0
    gate_s: float = 2e-9
    det_efficiency: float = 0.42
    visibility: float = 0.98
    multiport_loss_db: float = 7.5
    receiver_loss_db: float = 7.1
    mu_scale: float = 1.0
    gate_background: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.det_efficiency <= 1.0:
            raise ValueError(f"det_efficiency must be in [0,1], got {self.det_efficiency}")
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError(f"visibility must be in [0,1], got {self.visibility}")
        if self.multiport_loss_db < 0 or self.receiver_loss_db < 0:
            raise ValueError("losses must be >= 0 dB")
        if self.clock_hz <= 0 or self.gate_s <= 0:
            raise ValueError("clock and gate must be positive")
        if self.dark_cps < 0:
            raise ValueError("dark rate must be >= 0")
        if self.mu_scale <= 0:
            raise ValueError("mu_scale must be positive")
        if not 0.0 <= self.gate_background < 1.0:
            raise ValueError("gate_background must be in [0,1)")

    @property
    def eta_total(self) -> float:
        """End-to-end efficiency of the verification path: detector times
        multiport and receiver losses."""
        return self.det_efficiency * 10.0 ** (-(self.multiport_loss_db + self.receiver_loss_db) / 10.0)

    @property
    def eta_multiport(self) -> float:
        """Efficiency seen by a multiport null-port monitor (no receiver
        interferometer in that path)."""
        return self.det_efficiency * 10.0 ** (-self.multiport_loss_db / 10.0)

    @property
    def dark_probability_per_gate(self) -> float:
        return self.dark_cps * self.gate_s

    @property
    def dark_probability_per_clock(self) -> float:
        return self.dark_cps / self.clock_hz

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ChannelModel":
        unknown = set(d) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ValueError(f"unknown channel keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def calibrated(cls, **overrides) -> "ChannelModel":
        """Model with ``mu_scale`` and ``gate_background`` fitted so the
        predicted matrix reproduces the bundled measured one."""
        base = cls(**overrides)
        alphabet = PhaseAlphabet(8, math.sqrt(0.16))
        scale, floor = fit_calibration(bundled_cost_matrix(), alphabet, base)
        return replace(base, mu_scale=scale, gate_background=floor)


@dataclass(frozen=True)
class CostMatrix:
    """Per-pulse signal-null-port click probabilities c[declared, encoded]."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"cost matrix must be square, got shape {v.shape}")
        if v.min() < 0.0 or v.max() > 1.0:
            raise ValueError("cost matrix entries must be probabilities in [0,1]")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def first_row(self) -> np.ndarray:
        return self.values[0].copy()

    @property
    def max_diagonal(self) -> float:
        return float(np.diag(self.values).max())

    @property
    def mean_diagonal(self) -> float:
        return float(np.diag(self.values).mean())

    def is_symmetric(self, tol: float = 0.0) -> bool:
        return bool(np.abs(self.values - self.values.T).max() <= tol)

    def is_circulant(self, tol: float = 0.0) -> bool:
        v = self.values
        n = self.n
        i, j = np.indices((n, n))
        return bool(np.abs(v - v[0][(j - i) % n]).max() <= tol)

    @classmethod
    def circulant(cls, first_row: np.ndarray) -> "CostMatrix":
        row = np.asarray(first_row, dtype=float)
        n = len(row)
        i, j = np.indices((n, n))
        return cls(row[(j - i) % n])

    @classmethod
    def from_csv(cls, path: str | Path) -> "CostMatrix":
        with open(path, newline="") as f:
            rows = [[float(x) for x in line] for line in csv.reader(f) if line]
        if not rows:
            raise ValueError(f"empty cost matrix file: {path}")
        width = len(rows[0])
        if any(len(r) != width for r in rows) or len(rows) != width:
            raise ValueError(f"cost matrix in {path} is not square")
        return cls(np.array(rows))

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            for row in self.values:
                w.writerow([f"{x:.12g}" for x in row])


def bundled_cost_matrix() -> CostMatrix:
    """The shipped experimentally measured N=8 cost matrix (|alpha|^2 = 0.16)."""
    ref = importlib.resources.files("qdsig.data") / "measured_cost_matrix_n8.csv"
    with importlib.resources.as_file(ref) as path:
        return CostMatrix.from_csv(path)


def ideal_click_probability(phi: float, theta: float, mean_photons: float) -> float:
    """Signal-null click probability with perfect devices,
    1 - exp(-|alpha|^2 sin^2((phi - theta)/2)); zero iff the declared and
    encoded phases agree (mod 2 pi) or the pulse is vacuum."""
    if mean_photons < 0:
        raise ValueError(f"mean_photons must be >= 0, got {mean_photons}")
    return -math.expm1(-mean_photons * math.sin(0.5 * (phi - theta)) ** 2)


def signal_null_click_probability(
    phi: float,
    theta: float,
    mean_photons: float,
    model: ChannelModel,
    stored_scale: float = 1.0,
) -> float:
    """Per-gate click probability at a receiver's signal null-port when the
    declared phase is ``phi`` and the stored phase is ``theta``.

    ``stored_scale`` rescales the stored amplitude relative to the declared
    reference (blocked-input scenarios); the interference term generalises to
    (1 + xi^2)/2 - V xi cos(phi - theta), which reduces to the matched-pulse
    law at xi = 1.
    """
    if mean_photons < 0:
        raise ValueError(f"mean_photons must be >= 0, got {mean_photons}")
    xi = stored_scale
    fringe = 0.5 * (1.0 + xi * xi) - model.visibility * xi * math.cos(phi - theta)
    mu_eff = model.mu_scale * model.eta_total * mean_photons * 0.5 * fringe
    p_no_click = math.exp(-mu_eff)
    p_no_dark = 1.0 - model.dark_probability_per_gate
    p_no_background = 1.0 - model.gate_background
    return 1.0 - p_no_click * p_no_dark * p_no_background


def predicted_cost_matrix(alphabet: PhaseAlphabet, model: ChannelModel) -> CostMatrix:
    """Model-predicted cost matrix over all (declared, encoded) phase pairs;
    exactly circulant and symmetric by construction."""
    n = alphabet.n_phases
    row = np.empty(n)
    for m in range(n // 2 + 1):
        row[m] = signal_null_click_probability(
            2.0 * math.pi * m / n, 0.0, alphabet.mean_photons, model
        )
        row[(n - m) % n] = row[m]
    return CostMatrix.circulant(row)


def fit_calibration(
    measured: CostMatrix, alphabet: PhaseAlphabet, model: ChannelModel
) -> tuple[float, float]:
    """Fit (mu_scale, gate_background) so the model matches a measured matrix.

    The scale is set by the modulation depth between the zero-offset and
    maximum-offset circulant orbits; the background floor then inverts the
    diagonal mean exactly.  The floor absorbs the phase-independent part of
    the measured clicks that the interference term cannot produce.
    """
    v = measured.values
    n = measured.n
    i, j = np.indices((n, n))
    offset = (j - i) % n
    m_star = n // 2
    mean_diag = v[offset == 0].mean()
    mean_star = v[offset == m_star].mean()
    theta_star = 2.0 * math.pi * m_star / n
    mu = alphabet.mean_photons
    depth = model.eta_total * mu * model.visibility * (1.0 - math.cos(theta_star)) / 2.0
    scale = (mean_star - mean_diag) / depth
    if scale <= 0:
        raise ValueError("measured matrix has no positive phase modulation to fit")
    mu_eff_diag = scale * model.eta_total * mu * (1.0 - model.visibility) / 2.0
    p_no_click = math.exp(-mu_eff_diag)
    p_no_dark = 1.0 - model.dark_probability_per_gate
    floor = 1.0 - (1.0 - mean_diag) / (p_no_click * p_no_dark)
    if floor < 0:
        floor = 0.0
    return float(scale), float(floor)


def dark_fraction(model: ChannelModel, gated_rate_cps: float) -> float:
    """Dark-count contribution to the time-gated error rate,
    (1/2) clock * R_dark * gate / R_timegated."""
    if gated_rate_cps <= 0:
        raise ValueError(f"gated rate must be positive, got {gated_rate_cps}")
    return 0.5 * model.clock_hz * model.dark_cps * model.gate_s / gated_rate_cps


def null_rate_from_visibility(signal_rate: float, visibility: float) -> float:
    """Count rate at an interference minimum given the maximum and the fringe
    visibility V = (I_max - I_min) / (I_max + I_min)."""
    if not 0.0 <= visibility <= 1.0:
        raise ValueError(f"visibility must be in [0,1], got {visibility}")
    if signal_rate < 0:
        raise ValueError(f"signal rate must be >= 0, got {signal_rate}")
    return signal_rate * (1.0 - visibility) / (1.0 + visibility)


def multiport_null_click_probability(
    model: ChannelModel, mean_photons: float, relative_phase: float = 0.0
) -> float:
    """Per-pulse click probability at a receiver's multiport null-port when
    both copies arrive with ``mean_photons`` each and differ in phase by
    ``relative_phase``.  Uses the raw (per-clock) dark convention since this
    port is monitored without time filtering."""
    mu_null = (
        model.eta_multiport
        * mean_photons
        * 0.5
        * (1.0 - model.visibility * math.cos(relative_phase))
    )
    return 1.0 - math.exp(-mu_null) * (1.0 - model.dark_probability_per_clock)


def dishonest_alice_null_rate(
    model: ChannelModel,
    mean_photons: float,
    delta_phi: float,
    tamper_fraction: float,
) -> tuple[float, float]:
    """Multiport null-port count rate when a fraction of pulses carries an
    extra phase ``delta_phi`` on one arm.

    Returns (rate in counts/s, factor over the honest rate).  The rate is the
    weighted mixture of the honest floor (visibility plus dark counts) and
    the tampered-pulse probability; the factor is monotone nondecreasing in
    ``delta_phi`` on [0, pi].  A zero honest floor with nonzero tampering is
    flagged by an infinite factor.
    """
    if not 0.0 <= tamper_fraction <= 1.0:
        raise ValueError(f"tamper_fraction must be in [0,1], got {tamper_fraction}")
    p_honest = multiport_null_click_probability(model, mean_photons)
    p_tampered = multiport_null_click_probability(model, mean_photons, delta_phi)
    p_mean = (1.0 - tamper_fraction) * p_honest + tamper_fraction * p_tampered
    rate = model.clock_hz * p_mean
    if p_honest > 0.0:
        factor = p_mean / p_honest
    else:
        factor = 1.0 if p_mean == 0.0 else math.inf
    return rate, factor
