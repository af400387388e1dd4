import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import fock_oracle
from qdsig import (
    DensityMatrix,
    PhaseAlphabet,
    beamsplitter_mix,
    gram_spectrum,
    multiport_map,
    overlap,
    rotation_unitary,
    signature_element_density,
    state_coordinates,
    trace_distance,
    von_neumann_entropy,
)
from qdsig.states import all_state_coordinates

amplitudes = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


class TestOverlap:
    def test_vacuum_self_overlap(self):
        assert overlap(0, 0) == 1.0

    @given(amplitudes)
    def test_self_overlap_is_one(self, a):
        assert abs(overlap(a, a) - 1.0) < 1e-12

    def test_opposite_amplitudes(self):
        a = math.sqrt(0.16)
        assert abs(overlap(a, -a)) ** 2 == pytest.approx(math.exp(-0.64), rel=1e-12)

    @given(amplitudes, amplitudes)
    @settings(max_examples=50)
    def test_magnitude_at_most_one(self, a, b):
        assert abs(overlap(a, b)) <= 1.0 + 1e-12

    @pytest.mark.parametrize("a,b", [(0.4, -0.4), (0.3 + 0.2j, 0.1j), (1.0, 0.7j)])
    def test_against_fock_oracle(self, a, b):
        assert overlap(a, b) == pytest.approx(fock_oracle.overlap(a, b), abs=1e-10)


class TestBeamsplitter:
    def test_equal_inputs_give_vacuum_null(self):
        a = 0.5 + 0.1j
        null, signal = beamsplitter_mix(a, a)
        assert null == 0
        assert signal == pytest.approx(math.sqrt(2) * a)

    def test_single_input_splits_evenly(self):
        null, signal = beamsplitter_mix(0.8, 0)
        assert null == pytest.approx(0.8 / math.sqrt(2))
        assert signal == pytest.approx(0.8 / math.sqrt(2))

    def test_antisymmetric_input(self):
        null, signal = beamsplitter_mix(0.8, -0.8)
        assert signal == 0
        assert null == pytest.approx(math.sqrt(2) * 0.8)

    @given(amplitudes, amplitudes)
    def test_energy_conservation(self, a, b):
        null, signal = beamsplitter_mix(a, b)
        assert abs(null) ** 2 + abs(signal) ** 2 == pytest.approx(
            abs(a) ** 2 + abs(b) ** 2, abs=1e-12
        )


class TestMultiport:
    def test_identical_copies_are_preserved(self):
        a = 0.4 * cmath.exp(0.3j)
        out = multiport_map(a, a)
        assert out.bob_signal == pytest.approx(a)
        assert out.charlie_signal == pytest.approx(a)
        assert abs(out.bob_null) < 1e-15
        assert abs(out.charlie_null) < 1e-15

    def test_one_blocked_input_quarters_the_power(self):
        out = multiport_map(0.4, 0)
        for amp in (out.bob_signal, out.charlie_signal, out.bob_null, out.charlie_null):
            assert abs(amp) ** 2 == pytest.approx(0.04)

    def test_opposite_phases_swap_ports(self):
        a = 0.4
        out = multiport_map(a, -a)
        assert abs(out.bob_signal) < 1e-15
        assert abs(out.charlie_signal) < 1e-15
        assert abs(out.bob_null) == pytest.approx(a)
        assert abs(out.charlie_null) == pytest.approx(a)

    @given(amplitudes, amplitudes)
    def test_energy_conservation(self, a, b):
        out = multiport_map(a, b)
        assert out.total_power() == pytest.approx(abs(a) ** 2 + abs(b) ** 2, abs=1e-12)

    @given(amplitudes, amplitudes)
    @settings(max_examples=50)
    def test_swap_symmetry_up_to_null_sign(self, a, b):
        out = multiport_map(a, b)
        swapped = multiport_map(b, a)
        assert swapped.bob_signal == pytest.approx(out.charlie_signal, abs=1e-12)
        assert swapped.charlie_signal == pytest.approx(out.bob_signal, abs=1e-12)
        # each receiver's null amplitude flips sign under the swap
        assert swapped.bob_null == pytest.approx(-out.bob_null, abs=1e-12)
        assert swapped.charlie_null == pytest.approx(-out.charlie_null, abs=1e-12)

    def test_matches_explicit_beamsplitter_chain(self):
        a, b = 0.3 + 0.1j, -0.2 + 0.4j
        out = multiport_map(a, b)
        fwd_b, keep_b = beamsplitter_mix(a, 0)  # Bob splits his copy
        fwd_c, keep_c = beamsplitter_mix(b, 0)
        null_c, sig_c = beamsplitter_mix(fwd_b, keep_c)
        assert sig_c == pytest.approx(out.charlie_signal, abs=1e-12)
        assert abs(null_c) == pytest.approx(abs(out.charlie_null), abs=1e-12)


class TestGramSpectrum:
    def test_vacuum_alphabet_is_rank_one(self):
        spec = gram_spectrum(PhaseAlphabet(8, 0.0))
        assert spec.eigenvalues[0] == pytest.approx(8.0)
        assert np.abs(spec.eigenvalues[1:]).max() < 1e-12

    def test_orthogonal_limit(self):
        spec = gram_spectrum(PhaseAlphabet(8, math.sqrt(50.0)))
        assert np.abs(spec.eigenvalues - 1.0).max() < 1e-6

    @pytest.mark.parametrize("n", [2, 4, 8, 16, 32])
    @pytest.mark.parametrize("mu", [0.0, 0.16, 1.0, 5.0])
    def test_trace_equals_n(self, n, mu):
        spec = gram_spectrum(PhaseAlphabet(n, math.sqrt(mu)))
        assert spec.eigenvalues.sum() == pytest.approx(n, abs=1e-12 * n)
        assert spec.eigenvalues.min() >= 0.0

    def test_rejects_tiny_alphabet(self):
        with pytest.raises(ValueError):
            PhaseAlphabet(1, 0.4)

    def test_basis_change_columns_orthonormal(self, alphabet):
        f = gram_spectrum(alphabet).basis_change
        assert np.abs(f.conj().T @ f - np.eye(alphabet.n_phases)).max() < 1e-12

    def test_matches_fock_oracle_eigenvalues(self, alphabet):
        lam = np.sort(gram_spectrum(alphabet).eigenvalues)[::-1] / alphabet.n_phases
        oracle = fock_oracle.mixture_eigenvalues(8, alphabet.amplitude)[:8]
        assert np.abs(lam - oracle).max() < 1e-10


class TestStateCoordinates:
    def test_first_state_is_nonnegative(self, alphabet):
        spec = gram_spectrum(alphabet)
        v0 = state_coordinates(0, spec)
        assert np.abs(v0.imag).max() < 1e-15
        assert v0.real.min() >= 0.0
        expected = np.sqrt(spec.eigenvalues / spec.n)
        assert np.abs(v0 - expected).max() < 1e-14

    def test_reproduces_coherent_overlaps(self, alphabet):
        spec = gram_spectrum(alphabet)
        coords = all_state_coordinates(spec)
        for k in range(8):
            for l in range(8):
                want = overlap(alphabet.state(k), alphabet.state(l))
                got = np.vdot(coords[k], coords[l])
                assert abs(got - want) < 1e-10

    def test_rotation_unitary_generates_states(self, alphabet):
        spec = gram_spectrum(alphabet)
        u = rotation_unitary(8)
        v = state_coordinates(0, spec)
        for k in range(8):
            assert np.abs(v - state_coordinates(k, spec)).max() < 1e-10
            v = u @ v

    def test_index_out_of_range(self, alphabet):
        spec = gram_spectrum(alphabet)
        with pytest.raises(IndexError):
            state_coordinates(8, spec)


class TestSignatureElementDensity:
    def test_vacuum_alphabet_is_pure(self):
        rho = signature_element_density(PhaseAlphabet(8, 0.0))
        assert von_neumann_entropy(rho) == pytest.approx(0.0, abs=1e-12)

    def test_unit_trace(self, alphabet):
        rho = signature_element_density(alphabet)
        assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-12)

    def test_large_amplitude_is_maximally_mixed(self):
        rho = signature_element_density(PhaseAlphabet(8, math.sqrt(50.0)))
        assert np.abs(np.diag(rho.matrix).real - 1 / 8).max() < 1e-6


class TestEntropy:
    def test_pure_state_has_zero_entropy(self):
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = 1.0
        assert von_neumann_entropy(rho) == 0.0

    def test_two_state_closed_form(self):
        rho = signature_element_density(PhaseAlphabet(2, math.sqrt(0.16)))
        p = (1 + math.exp(-0.32)) / 2
        expected = -(p * math.log2(p) + (1 - p) * math.log2(1 - p))
        assert von_neumann_entropy(rho) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.576, abs=5e-4)

    def test_matches_fock_oracle(self):
        for n, mu in [(2, 0.16), (4, 0.5), (8, 0.16), (8, 1.0)]:
            rho = signature_element_density(PhaseAlphabet(n, math.sqrt(mu)))
            assert von_neumann_entropy(rho) == pytest.approx(
                fock_oracle.mixture_entropy_bits(n, math.sqrt(mu)), abs=1e-8
            )

    def test_near_orthogonal_limit(self):
        rho = signature_element_density(PhaseAlphabet(8, math.sqrt(50.0)))
        assert abs(von_neumann_entropy(rho) - 3.0) < 0.01

    def test_bounded_by_log_dim(self, alphabet):
        s = von_neumann_entropy(signature_element_density(alphabet))
        assert 0.0 <= s <= 3.0

    def test_rejects_non_psd(self):
        bad = np.diag([1.5, -0.5]).astype(complex)
        with pytest.raises(ValueError):
            von_neumann_entropy(bad)


class TestTraceDistance:
    def test_identical_states(self, alphabet):
        rho = signature_element_density(alphabet)
        assert trace_distance(rho, rho) == 0.0

    def test_orthogonal_pure_states(self):
        a = np.diag([1.0, 0.0]).astype(complex)
        b = np.diag([0.0, 1.0]).astype(complex)
        assert trace_distance(a, b) == pytest.approx(1.0)

    def test_symmetric(self):
        rng = np.random.default_rng(7)
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = m @ m.conj().T
        rho /= np.trace(rho).real
        sigma = np.eye(4, dtype=complex) / 4
        assert trace_distance(rho, sigma) == pytest.approx(trace_distance(sigma, rho))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            trace_distance(np.eye(2) / 2, np.eye(3) / 3)

    def test_fidelity_bound_for_coherent_pairs(self):
        # T_D(|a><a|, |b><b|) <= sqrt(1 - |<a|b>|^2), checked in Fock truncation
        rng = np.random.default_rng(3)
        for _ in range(10):
            a, b = (rng.normal(scale=0.5) + 1j * rng.normal(scale=0.5) for _ in range(2))
            va = fock_oracle.coherent_vector(a)
            vb = fock_oracle.coherent_vector(b)
            rho = np.outer(va, va.conj())
            sigma = np.outer(vb, vb.conj())
            fidelity = abs(np.vdot(va, vb)) ** 2
            assert trace_distance(rho, sigma) <= math.sqrt(1 - fidelity) + 1e-10


class TestCyclicLemmas:
    def test_conjugation_sum_projects_to_diagonal(self):
        # sum_i U^i A U^{-i} = N diag(A)
        rng = np.random.default_rng(11)
        n = 8
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        u = rotation_unitary(n)
        total = np.zeros_like(a)
        ui = np.eye(n, dtype=complex)
        for _ in range(n):
            total += ui @ a @ ui.conj().T
            ui = ui @ u
        assert np.abs(total - n * np.diag(np.diag(a))).max() < 1e-10

    def test_weighted_conjugation_sum_is_hadamard_with_circulant(self):
        # sum_i c_i U^i A U^{-i} = A ∘ B, B circulant with first row DFT(c)
        rng = np.random.default_rng(12)
        n = 8
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        c = rng.normal(size=n) + 1j * rng.normal(size=n)
        u = rotation_unitary(n)
        total = np.zeros_like(a)
        ui = np.eye(n, dtype=complex)
        for i in range(n):
            total += c[i] * (ui @ a @ ui.conj().T)
            ui = ui @ u
        first_row = np.fft.fft(c)
        i_idx, j_idx = np.indices((n, n))
        b = first_row[(j_idx - i_idx) % n]
        assert np.abs(total - a * b).max() < 1e-10


class TestDensityMatrixValidation:
    def test_rejects_non_hermitian(self):
        m = np.eye(2, dtype=complex)
        m[0, 1] = 0.5
        with pytest.raises(ValueError):
            DensityMatrix(m)

    def test_rejects_wrong_trace(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.eye(2, dtype=complex))
