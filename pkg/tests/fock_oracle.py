"""Independent truncated-Fock-basis oracle.

Everything here represents states as photon-number-basis vectors with a hard
cutoff and recomputes overlaps, spectra and measurement probabilities without
touching the package's span-basis machinery.  Truncation error for a
coherent state of mean photon number mu is below mu^(cutoff+1)/(cutoff+1)!,
negligible for mu <= 1 at the default cutoff of 40.
"""

import math

import numpy as np

CUTOFF = 40


def coherent_vector(alpha: complex, cutoff: int = CUTOFF) -> np.ndarray:
    """|alpha> in the number basis up to the cutoff (not renormalised)."""
    if alpha == 0:
        vec = np.zeros(cutoff + 1, dtype=complex)
        vec[0] = 1.0
        return vec
    n = np.arange(cutoff + 1)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, cutoff + 1)))))
    mag = np.exp(-0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * log_fact)
    phase = np.exp(1j * n * np.angle(alpha))
    return mag * phase


def overlap(a: complex, b: complex, cutoff: int = CUTOFF) -> complex:
    return complex(np.vdot(coherent_vector(a, cutoff), coherent_vector(b, cutoff)))


def alphabet_vectors(n_phases: int, amplitude: float, cutoff: int = CUTOFF) -> np.ndarray:
    """Rows are the alphabet states |alpha e^{2 pi i k/N}> in the number basis."""
    return np.array(
        [
            coherent_vector(amplitude * np.exp(2j * np.pi * k / n_phases), cutoff)
            for k in range(n_phases)
        ]
    )


def mixture_eigenvalues(n_phases: int, amplitude: float, cutoff: int = CUTOFF) -> np.ndarray:
    """Descending eigenvalues of the equal-weight alphabet mixture."""
    vecs = alphabet_vectors(n_phases, amplitude, cutoff)
    rho = vecs.conj().T @ vecs / n_phases
    return np.linalg.eigvalsh(rho)[::-1]


def mixture_entropy_bits(n_phases: int, amplitude: float, cutoff: int = CUTOFF) -> float:
    p = np.clip(mixture_eigenvalues(n_phases, amplitude, cutoff), 0.0, None)
    p = p[p > 1e-30]
    return float(-(p * np.log2(p)).sum())


def square_root_measurement_probabilities(
    n_phases: int, amplitude: float, cutoff: int = CUTOFF
) -> np.ndarray:
    """P[phi, theta] = Tr(Pi_phi |v_theta><v_theta|) for the square-root
    measurement, built entirely in the number basis via the pseudo-inverse
    square root of Phi = sum |v_i><v_i|."""
    vecs = alphabet_vectors(n_phases, amplitude, cutoff)
    phi_op = vecs.conj().T @ vecs
    eigval, eigvec = np.linalg.eigh(phi_op)
    inv_sqrt = np.where(eigval > 1e-12 * eigval.max(), 1.0 / np.sqrt(np.maximum(eigval, 1e-300)), 0.0)
    phi_inv_sqrt = (eigvec * inv_sqrt) @ eigvec.conj().T
    # <v_theta| Phi^{-1/2} |v_phi> for all pairs
    m = vecs.conj() @ phi_inv_sqrt @ vecs.T
    return (np.abs(m) ** 2).T


def interference_click_probability(phi: float, theta: float, mean_photons: float) -> float:
    """Perfect-device signal-null click probability, computed as one minus
    the vacuum weight of the difference mode |alpha (e^{i phi} - e^{i theta})/2>."""
    alpha = math.sqrt(mean_photons)
    null_amp = alpha * (np.exp(1j * phi) - np.exp(1j * theta)) / 2.0
    return 1.0 - math.exp(-abs(null_amp) ** 2)
