r"""Linear algebra for symmetric coherent-state alphabets.

Everything here lives in the N-dimensional span of the alphabet
{|alpha e^{2 pi i k / N}>}, k = 0 .. N-1.  The Gram matrix of these states is
circulant, so its eigenvalues lam_k are the DFT of its first row; the
orthonormal eigenbasis ("standard basis") diagonalises both the equal-weight
mixture of the alphabet and the cyclic phase-rotation unitary U.  In that
basis the k-th alphabet state has coordinates

    v_k[l] = exp(2 pi i k l / N) * sqrt(lam_l / N),

which makes overlaps, densities, entropies and measurement probabilities
exact finite-dimensional computations (no Fock-space truncation).  A
truncated-Fock oracle exists only on the test side, as an independent check.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

# lam_k below -NEGATIVE_EIG_TOL is a hard error; within [-tol, 0) it is
# round-off from the FFT of a PSD circulant row and gets clamped.
NEGATIVE_EIG_TOL = 1e-12


def overlap(a: complex, b: complex) -> complex:
    """Inner product <a|b> of two coherent states, exp(-(|a|^2+|b|^2)/2 + a* b)."""
    a = complex(a)
    b = complex(b)
    return cmath.exp(-0.5 * (abs(a) ** 2 + abs(b) ** 2) + a.conjugate() * b)


def beamsplitter_mix(a: complex, b: complex) -> tuple[complex, complex]:
    """Mix two coherent amplitudes on a 50:50 beamsplitter.

    Returns (null, signal) = ((a - b)/sqrt(2), (a + b)/sqrt(2)); equal inputs
    send everything to the signal port and vacuum to the null port.
    """
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    return (a - b) * inv_sqrt2, (a + b) * inv_sqrt2


@dataclass(frozen=True)
class MultiportOutput:
    """Amplitudes at the four output ports of the two-receiver comparison network."""

    bob_null: complex
    bob_signal: complex
    charlie_null: complex
    charlie_signal: complex

    def total_power(self) -> float:
        return (
            abs(self.bob_null) ** 2
            + abs(self.bob_signal) ** 2
            + abs(self.charlie_null) ** 2
            + abs(self.charlie_signal) ** 2
        )


def multiport_map(alice_to_bob: complex, alice_to_charlie: complex) -> MultiportOutput:
    """Propagate the two signature copies through the comparison multiport.

    Each receiver splits his input 50:50, forwards one half to the other
    receiver, and mixes the retained half with the received half on a final
    50:50 beamsplitter.  For inputs (a, b) the chain gives signal (a + b)/2
    at both receivers and nulls (b - a)/2 (Bob) and (a - b)/2 (Charlie), so
    identical copies reproduce the original state at the signal ports with
    vacuum at the nulls, and total energy is conserved.
    """
    a = complex(alice_to_bob)
    b = complex(alice_to_charlie)
    # Bob's final BS: retained a/sqrt(2) mixed with Charlie's forwarded b/sqrt(2).
    bob_null, bob_signal = beamsplitter_mix(b / math.sqrt(2.0), a / math.sqrt(2.0))
    charlie_null, charlie_signal = beamsplitter_mix(a / math.sqrt(2.0), b / math.sqrt(2.0))
    return MultiportOutput(
        bob_null=bob_null,
        bob_signal=bob_signal,
        charlie_null=charlie_null,
        charlie_signal=charlie_signal,
    )


@dataclass(frozen=True)
class PhaseAlphabet:
    """The N-state symmetric alphabet {|alpha e^{2 pi i k / N}>}.

    Parameters
    ----------
    n_phases : int
        Number of equally spaced phase encodings, N >= 2.
    amplitude : float
        Nonnegative real field amplitude alpha; amplitude**2 is the mean
        photon number per pulse.
    """

    n_phases: int
    amplitude: float

    def __post_init__(self):
        if self.n_phases < 2:
            raise ValueError(f"need at least 2 phases, got {self.n_phases}")
        if not math.isfinite(self.amplitude) or self.amplitude < 0:
            raise ValueError(f"amplitude must be finite and >= 0, got {self.amplitude}")

    @property
    def mean_photons(self) -> float:
        return self.amplitude**2

    @property
    def phases(self) -> np.ndarray:
        """Encoding angles 2 pi k / N, k = 0 .. N-1, sorted ascending."""
        return 2.0 * np.pi * np.arange(self.n_phases) / self.n_phases

    def state(self, k: int) -> complex:
        """Coherent amplitude of the k-th alphabet state."""
        return self.amplitude * cmath.exp(2j * math.pi * k / self.n_phases)

    def amplified(self, power_gain: float = 1.5) -> "PhaseAlphabet":
        """Same alphabet scaled in power; used for the forger who measures
        his own copy together with the half pulse received from the other
        receiver (power gain 3/2)."""
        return PhaseAlphabet(self.n_phases, self.amplitude * math.sqrt(power_gain))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Gram spectrum and standard-basis data of a phase alphabet.

    ``eigenvalues`` are the (clamped, nonnegative) eigenvalues lam_k of the
    alphabet's Gram matrix, summing to N.  ``basis_change`` is the unitary
    DFT matrix F[l, k] = exp(-2 pi i l k / N) / sqrt(N) relating the cyclic
    alphabet index to the standard-basis axis; its columns are orthonormal.
    """

    alphabet: PhaseAlphabet
    eigenvalues: np.ndarray
    basis_change: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.alphabet.n_phases


def gram_spectrum(alphabet: PhaseAlphabet) -> SpectralDecomposition:
    """Eigen-decompose the alphabet's Gram matrix via the DFT of its first row.

    G_{kl} = <v_k|v_l> depends only on (l - k) mod N, so G is circulant and
    lam_k = sum_m G_{0m} exp(-2 pi i k m / N).  Round-off negatives within
    ``NEGATIVE_EIG_TOL`` are clamped to zero; anything more negative raises.
    """
    n = alphabet.n_phases
    mu = alphabet.mean_photons
    m = np.arange(n)
    first_row = np.exp(-mu * (1.0 - np.exp(2j * np.pi * m / n)))
    lam = np.fft.fft(first_row).real
    if lam.min() < -NEGATIVE_EIG_TOL:
        raise ValueError(f"Gram spectrum has eigenvalue {lam.min()} < -{NEGATIVE_EIG_TOL}")
    lam = np.clip(lam, 0.0, None)
    l = np.arange(n)
    dft = np.exp(-2j * np.pi * np.outer(l, l) / n) / math.sqrt(n)
    return SpectralDecomposition(alphabet=alphabet, eigenvalues=lam, basis_change=dft)


def state_coordinates(k: int, spec: SpectralDecomposition) -> np.ndarray:
    """Standard-basis coordinates of the k-th alphabet state.

    v_k[l] = exp(2 pi i k l / N) sqrt(lam_l / N); unit norm, and the mutual
    inner products reproduce the coherent-state overlaps.  v_0 is entrywise
    nonnegative real.
    """
    n = spec.n
    if not 0 <= k < n:
        raise IndexError(f"state index {k} out of range for N={n}")
    l = np.arange(n)
    return np.exp(2j * np.pi * k * l / n) * np.sqrt(spec.eigenvalues / n)


def all_state_coordinates(spec: SpectralDecomposition) -> np.ndarray:
    """N x N array whose k-th row is state_coordinates(k, spec)."""
    n = spec.n
    k = np.arange(n)[:, None]
    l = np.arange(n)[None, :]
    return np.exp(2j * np.pi * k * l / n) * np.sqrt(spec.eigenvalues / n)[None, :]


def rotation_unitary(n: int) -> np.ndarray:
    """The cyclic phase-step unitary U = diag(exp(2 pi i l / N)) in the
    standard basis; satisfies |v_k> = U^k |v_0>."""
    return np.diag(np.exp(2j * np.pi * np.arange(n) / n))


@dataclass(frozen=True)
class DensityMatrix:
    """A validated density matrix in the standard basis."""

    matrix: np.ndarray

    HERMITICITY_TOL = 1e-12
    TRACE_TOL = 1e-12
    PSD_TOL = 1e-10

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        if np.abs(m - m.conj().T).max() > self.HERMITICITY_TOL:
            raise ValueError("density matrix is not Hermitian within tolerance")
        tr = np.trace(m).real
        if abs(tr - 1.0) > self.TRACE_TOL:
            raise ValueError(f"density matrix trace {tr} != 1 within tolerance")
        if np.linalg.eigvalsh(m).min() < -self.PSD_TOL:
            raise ValueError("density matrix has negative eigenvalue beyond tolerance")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def signature_element_density(alphabet: PhaseAlphabet) -> DensityMatrix:
    """Equal-weight mixture of the alphabet states, diag(lam_k / N) in the
    standard basis; this is the state available to anyone holding a single
    signature element with no knowledge of the encoded phase."""
    spec = gram_spectrum(alphabet)
    return DensityMatrix(np.diag(spec.eigenvalues / spec.n).astype(complex))


def von_neumann_entropy(rho: DensityMatrix | np.ndarray) -> float:
    """Von Neumann entropy in bits, -sum p_i log2 p_i with 0 log 0 = 0."""
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(np.asarray(rho))
    p = np.linalg.eigvalsh(rho.matrix)
    p = np.clip(p, 0.0, None)
    p = p[p > 0.0]
    return float(-(p * np.log2(p)).sum())


def trace_distance(a: DensityMatrix | np.ndarray, b: DensityMatrix | np.ndarray) -> float:
    """Half the trace norm of (a - b), via Hermitian eigendecomposition."""
    ma = a.matrix if isinstance(a, DensityMatrix) else np.asarray(a, dtype=complex)
    mb = b.matrix if isinstance(b, DensityMatrix) else np.asarray(b, dtype=complex)
    if ma.shape != mb.shape:
        raise ValueError(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    eigs = np.linalg.eigvalsh(ma - mb)
    return float(0.5 * np.abs(eigs).sum())
