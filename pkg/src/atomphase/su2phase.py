"""SU(2) generators, their polar decomposition and the dual phase-state basis.

Spin states are indexed by ``k' = 0..N-1`` with J_z eigenvalue ``m = j - k'``.
Spins are stored as the integer ``2j`` so half-integer bookkeeping stays exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .qstate import Factor, Operator, StateVector, spin_factor


@dataclass(frozen=True)
class SpinSystem:
    two_j: int

    def __post_init__(self):
        if self.two_j < 1:
            raise ValueError("spin must be at least 1/2")

    @classmethod
    def from_dim(cls, N: int) -> "SpinSystem":
        return cls(N - 1)

    @property
    def j(self) -> Fraction:
        return Fraction(self.two_j, 2)

    @property
    def N(self) -> int:
        return self.two_j + 1

    @property
    def factor(self) -> Factor:
        return spin_factor(self.N)

    def m_values(self) -> np.ndarray:
        """J_z eigenvalues in basis order (descending)."""
        return np.array([(self.two_j - 2 * k) / 2 for k in range(self.N)])


def spin_for_pairs(n: int) -> SpinSystem:
    """Effective spin of the half-excited sector of 2n atoms sharing n photons."""
    if n < 1:
        raise ValueError("need at least one atom pair")
    N = math.comb(2 * n, n)
    return SpinSystem(N - 1)


def generators(spin: SpinSystem) -> tuple[Operator, Operator, Operator]:
    """(J+, J-, Jz) in the descending-m basis."""
    f = (spin.factor,)
    m = spin.m_values()
    jj = spin.two_j * (spin.two_j + 2) / 4  # j(j+1)
    # <m+1|J+|m>: column k'+1 (m) -> row k' (m+1)
    lower_m = m[1:]
    elems = np.sqrt(jj - lower_m * (lower_m + 1))
    jp = np.diag(elems, k=1).astype(complex)
    jz = np.diag(m).astype(complex)
    return Operator(f, jp), Operator(f, jp.conj().T), Operator(f, jz, hermitian=True)


def _epsilon_matrix(N: int, psi: float) -> np.ndarray:
    eps = np.diag(np.ones(N - 1), k=1).astype(complex)
    eps[N - 1, 0] += np.exp(1j * psi)
    return eps


def phase_operator(spin: SpinSystem, psi: float) -> Operator:
    """Exponential phase operator: unit superdiagonal, e^{i psi} in the lower-left corner."""
    return Operator((spin.factor,), _epsilon_matrix(spin.N, psi), unitary=True)


def radial_operator(spin: SpinSystem, psi: float) -> Operator:
    """J_r = J+ eps^+, so that J+ = J_r eps holds identically."""
    jp, _, _ = generators(spin)
    eps = phase_operator(spin, psi)
    jr = jp.matrix @ eps.matrix.conj().T
    # hermiticity is verified by the Operator constructor
    return Operator((spin.factor,), jr, hermitian=True)


def phase_angles(N: int, psi: float) -> np.ndarray:
    return (psi + 2 * np.pi * np.arange(N)) / N


@dataclass(frozen=True, eq=False)
class PhaseBasis:
    spin: SpinSystem
    psi: float
    states: tuple[StateVector, ...]
    eigenphases: np.ndarray

    def __len__(self):
        return len(self.states)

    def __getitem__(self, k) -> StateVector:
        return self.states[k]

    def matrix(self) -> np.ndarray:
        """Columns are the phase states."""
        return np.column_stack([s.amplitudes for s in self.states])


def phase_amplitudes(N: int, phi: float) -> np.ndarray:
    return np.exp(1j * np.arange(N) * phi) / math.sqrt(N)


def phase_states(spin: SpinSystem, psi: float) -> PhaseBasis:
    N = spin.N
    phis = phase_angles(N, psi)
    f = (spin.factor,)
    states = tuple(StateVector(f, phase_amplitudes(N, phi)) for phi in phis)
    return PhaseBasis(spin, float(psi), states, phis)


def cosine_operator(spin: SpinSystem, psi: float) -> Operator:
    eps = _epsilon_matrix(spin.N, psi)
    return Operator((spin.factor,), 0.5 * (eps + eps.conj().T), hermitian=True)
