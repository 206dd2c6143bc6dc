import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from atomphase import qstate
from atomphase.qstate import (
    DensityMatrix,
    Factor,
    InvalidDensity,
    Operator,
    StateVector,
    atom_factor,
    expectation,
    partial_trace,
    photon_factor,
    tensor_product,
    von_neumann_entropy,
)
from atomphase.atomlattice import atom_factors, local_pauli, named_state

from conftest import LN2, SQ2, ket

A = atom_factor()


def test_tensor_product_of_basis_kets():
    e = StateVector.basis_ket((A,), ("e",))
    g = StateVector.basis_ket((A,), ("g",))
    eg = tensor_product(e, g)
    assert eg.amplitude(("e", "g")) == 1
    assert eg.basis == [("e", "e"), ("e", "g"), ("g", "e"), ("g", "g")]


def test_tensor_product_superposition_with_vacuum():
    plus = StateVector.from_amplitudes((A,), [1, 1])
    vac = StateVector.basis_ket((photon_factor(1),), ("0",))
    s = tensor_product(plus, vac)
    assert s.amplitude(("e", "0")) == pytest.approx(1 / SQ2)
    assert s.amplitude(("g", "0")) == pytest.approx(1 / SQ2)
    assert s.amplitude(("e", "1")) == 0


def test_tensor_product_builds_two_ground_atoms_with_photon():
    gg = ket(("gg", 1))
    one = StateVector.basis_ket((photon_factor(1),), ("1",))
    s = tensor_product(gg, one)
    assert s.amplitude(("g", "g", "1")) == 1
    assert [f.kind for f in s.factors] == ["atom", "atom", "photon"]


def test_dimension_cap(monkeypatch):
    monkeypatch.setattr(qstate, "MAX_DIM", 16)
    a = StateVector.basis_ket(atom_factors(3), "eee")
    with pytest.raises(qstate.DimensionError):
        tensor_product(a, a)


def test_unnormalized_state_rejected():
    with pytest.raises(ValueError):
        StateVector((A,), np.array([1.0, 1.0]))


def test_operator_flags_checked():
    with pytest.raises(ValueError):
        Operator((A,), [[0, 1], [0, 0]], hermitian=True)
    with pytest.raises(ValueError):
        Operator((A,), [[1, 1], [0, 1]], unitary=True)


def test_expectation_bell_states_vanish():
    for tag in ("bell+", "bell-"):
        s = named_state(tag)
        for l in (1, 2):
            for i in (1, 2, 3):
                assert abs(expectation(local_pauli(l, i, 2), s)) < 1e-15


def test_expectation_eigenstate():
    assert expectation(local_pauli(1, 3, 2), ket(("eg", 1))) == 1


def test_expectation_three_atom_phase_state():
    s = named_state("three-atom-phase-0")
    for l in (1, 2, 3):
        assert expectation(local_pauli(l, 3, 3), s).real == pytest.approx(-1 / 3, abs=1e-12)


def test_expectation_basis_mismatch():
    with pytest.raises(qstate.BasisMismatch):
        expectation(local_pauli(1, 3, 3), ket(("eg", 1)))


def test_partial_trace_product():
    rho = partial_trace(ket(("eg", 1)), [0])
    assert np.allclose(rho.matrix, [[1, 0], [0, 0]])


def test_partial_trace_bell_is_half_identity():
    # hand computation: rho_1 = (|e><e| + |g><g|)/2
    rho = partial_trace(ket(("eg", 1), ("ge", 1)), [0])
    assert np.max(np.abs(rho.matrix - np.eye(2) / 2)) < 1e-15


def test_partial_trace_biphoton_is_third_identity():
    s = named_state("biphoton-qutrit-1")
    rho = partial_trace(s, [1])
    assert np.max(np.abs(rho.matrix - np.eye(3) / 3)) < 1e-15


def test_partial_trace_keep_all_reproduces_projector():
    s = named_state("chi21", psi=0.4)
    rho = partial_trace(s, range(4))
    assert np.max(np.abs(rho.matrix - s.projector())) < 1e-15


def test_partial_trace_needs_composite():
    s = StateVector.basis_ket((A,), ("e",))
    with pytest.raises(qstate.BasisMismatch):
        partial_trace(s, [])


def test_entropy_values():
    assert von_neumann_entropy(partial_trace(ket(("eg", 1)), [0])) == 0.0
    assert von_neumann_entropy(DensityMatrix((A,), np.eye(2) / 2)) == pytest.approx(LN2, abs=1e-15)
    ghz = named_state("ghz3+")
    assert von_neumann_entropy(partial_trace(ghz, [1])) == pytest.approx(LN2, abs=1e-12)


def test_invalid_density_rejected():
    with pytest.raises(InvalidDensity):
        DensityMatrix((A,), np.diag([0.6, 0.6]))
    rho = DensityMatrix((A,), np.array([[1.2, 0], [0, -0.2]]))
    with pytest.raises(InvalidDensity):
        von_neumann_entropy(rho)


def test_json_round_trip():
    s = named_state("chi32", psi=0.9)
    s2 = StateVector.from_json(s.to_json())
    assert abs(s.overlap(s2)) > 1 - 1e-12


def complex_vectors(size=12):
    return hnp.arrays(
        np.complex128, size,
        elements=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
    ).filter(lambda v: np.linalg.norm(v) > 1e-3)


def _state(v, factors):
    return StateVector.from_amplitudes(factors, v)


@settings(max_examples=60, deadline=None)
@given(complex_vectors())
def test_schmidt_symmetry(v):
    factors = (atom_factor(), atom_factor(), Factor("qutrit", ("a", "b", "c")))
    s = _state(v, factors)
    for keep in ([0], [1], [2], [0, 1]):
        rest = [i for i in range(3) if i not in keep]
        sa = von_neumann_entropy(partial_trace(s, keep))
        sb = von_neumann_entropy(partial_trace(s, rest))
        assert abs(sa - sb) < 1e-10
        d = min(math.prod(factors[i].dim for i in keep), math.prod(factors[i].dim for i in rest))
        assert -1e-12 <= sa <= math.log(d) + 1e-12


@settings(max_examples=60, deadline=None)
@given(complex_vectors(), st.floats(-math.pi, math.pi))
def test_norm_preserved_by_products_and_unitaries(v, angle):
    factors = (atom_factor(), atom_factor(), Factor("qutrit", ("a", "b", "c")))
    s = _state(v, factors)
    t = tensor_product(s, StateVector.from_amplitudes((A,), [math.cos(angle), 1j * math.sin(angle) + 0.3]))
    assert abs(t.norm() - 1) < 1e-12
    u = np.kron(np.eye(12), np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]]))
    u = Operator(t.factors, u, unitary=True)
    assert abs(np.linalg.norm(u.apply(t)) - 1) < 1e-12


@settings(max_examples=60, deadline=None)
@given(complex_vectors(8))
def test_hermitian_expectation_is_real(v):
    s = _state(v, atom_factors(3))
    for l in (1, 2, 3):
        for i in (1, 2, 3):
            assert abs(expectation(local_pauli(l, i, 3), s).imag) < 1e-12
