import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from atomphase.su2phase import (
    SpinSystem,
    cosine_operator,
    generators,
    phase_operator,
    phase_states,
    radial_operator,
    spin_for_pairs,
)

SPINS = [1, 2, 3, 5, 19]  # 2j
PSIS = [0.0, 1.3, math.pi]


@pytest.mark.parametrize("n, j", [(1, Fraction(1, 2)), (2, Fraction(5, 2)), (3, Fraction(19, 2)), (4, Fraction(69, 2))])
def test_spin_for_pairs(n, j):
    spin = spin_for_pairs(n)
    assert spin.j == j
    assert spin.N == math.comb(2 * n, n)
    assert spin.N % 2 == 0


def test_spin_for_pairs_rejects_zero():
    with pytest.raises(ValueError):
        spin_for_pairs(0)


def test_generators_spin_half():
    jp, jm, jz = generators(SpinSystem(1))
    assert np.array_equal(jp.matrix, [[0, 1], [0, 0]])
    assert np.array_equal(jz.matrix, np.diag([0.5, -0.5]))


def test_generators_spin_one_jz():
    _, _, jz = generators(SpinSystem(2))
    assert np.array_equal(jz.matrix, np.diag([1.0, 0.0, -1.0]))


def test_generators_spin_five_halves_elements():
    jp, _, _ = generators(SpinSystem(5))
    want = [math.sqrt(5), math.sqrt(8), 3, math.sqrt(8), math.sqrt(5)]
    assert np.allclose(np.diag(jp.matrix, k=1), want, atol=1e-15)
    assert np.count_nonzero(jp.matrix) == 5


def test_phase_operator_two_level():
    psi = 0.7
    eps = phase_operator(SpinSystem(1), psi).matrix
    assert np.allclose(eps, [[0, 1], [np.exp(1j * psi), 0]])


def test_phase_operator_six_is_cyclic_shift():
    eps = phase_operator(SpinSystem(5), 0.0).matrix
    assert np.array_equal(eps, np.roll(np.eye(6), 1, axis=1))


@pytest.mark.parametrize("two_j", SPINS)
def test_phase_operator_power_is_identity(two_j):
    spin = SpinSystem(two_j)
    eps = phase_operator(spin, 0.0).matrix
    assert np.allclose(np.linalg.matrix_power(eps, spin.N), np.eye(spin.N), atol=1e-15)


def test_radial_spin_half_by_hand():
    # [[0,1],[0,0]] @ [[0,e^{-i psi}],[1,0]] = [[1,0],[0,0]]
    assert np.allclose(radial_operator(SpinSystem(1), 0.4).matrix, np.diag([1, 0]))


def test_radial_five_halves_by_explicit_product():
    jp = generators(SpinSystem(5))[0].matrix
    eps_dag = phase_operator(SpinSystem(5), 1.1).matrix.conj().T
    # element-wise sum oracle, independent of numpy matmul
    prod = np.zeros((6, 6), dtype=complex)
    for r in range(6):
        for c in range(6):
            prod[r, c] = sum(jp[r, k] * eps_dag[k, c] for k in range(6))
    jr = radial_operator(SpinSystem(5), 1.1).matrix
    assert np.allclose(jr, prod, atol=1e-15)
    assert np.allclose(jr, np.diag([math.sqrt(5), math.sqrt(8), 3, math.sqrt(8), math.sqrt(5), 0]))


@pytest.mark.parametrize("two_j", SPINS)
@pytest.mark.parametrize("psi", PSIS)
def test_algebra_identities(two_j, psi):
    spin = SpinSystem(two_j)
    jp, jm, jz = (o.matrix for o in generators(spin))
    j = two_j / 2
    eye = np.eye(spin.N)
    eps = phase_operator(spin, psi).matrix
    jr = radial_operator(spin, psi).matrix
    assert np.max(np.abs(jp @ jm - jm @ jp - 2 * jz)) < 1e-12
    assert np.max(np.abs(jz @ jp - jp @ jz - jp)) < 1e-12
    assert np.max(np.abs(jz @ jz + 0.5 * (jp @ jm + jm @ jp) - j * (j + 1) * eye)) < 1e-12
    assert np.max(np.abs(eps @ eps.conj().T - eye)) < 1e-12
    assert np.max(np.abs(jp - jr @ eps)) < 1e-12
    assert np.max(np.abs(jr - jr.conj().T)) < 1e-12
    basis = phase_states(spin, psi)
    for s, phi in zip(basis.states, basis.eigenphases):
        assert np.linalg.norm(eps @ s.amplitudes - np.exp(1j * phi) * s.amplitudes) < 1e-12


def test_phase_states_two_level():
    b = phase_states(SpinSystem(1), 0.0)
    assert np.allclose(b[0].amplitudes, np.array([1, 1]) / math.sqrt(2))
    assert np.allclose(b[1].amplitudes, np.array([1, -1]) / math.sqrt(2))


def test_phase_states_three_level():
    b = phase_states(SpinSystem(2), 0.0)
    w = np.exp(2j * math.pi / 3)
    for k in range(3):
        assert np.allclose(b[k].amplitudes, np.array([1, w**k, w ** (2 * k)]) / math.sqrt(3))


def test_phase_states_six_level_eigenphases():
    psi = 0.9
    b = phase_states(SpinSystem(5), psi)
    assert np.allclose(b.eigenphases, psi / 6 + np.arange(6) * math.pi / 3)


def test_cosine_two_level():
    assert np.allclose(cosine_operator(SpinSystem(1), 0.0).matrix, [[0, 1], [1, 0]])


def test_cosine_six_level_spectrum_by_eigensolve():
    evals = np.sort(np.linalg.eigvalsh(cosine_operator(SpinSystem(5), 0.0).matrix))
    want = np.sort(np.cos(np.arange(6) * math.pi / 3))
    assert np.allclose(evals, want, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 25), st.floats(-10, 10, allow_nan=False))
def test_dual_basis_properties(two_j, psi):
    spin = SpinSystem(two_j)
    b = phase_states(spin, psi)
    B = b.matrix()
    assert np.max(np.abs(B @ B.conj().T - np.eye(spin.N))) < 1e-12
    assert np.max(np.abs(np.abs(B) - 1 / math.sqrt(spin.N))) < 1e-12
    C = cosine_operator(spin, psi).matrix
    for s, phi in zip(b.states, b.eigenphases):
        assert np.linalg.norm(C @ s.amplitudes - math.cos(phi) * s.amplitudes) < 1e-12
