"""Atomic configuration bases, local Pauli operators and the local-measurement witness.

Atoms are numbered from 1 in the public API (``local_pauli(1, 3, 2)`` is
sigma_3 on the first atom); factor positions inside state vectors are 0-based.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .qstate import (
    ATOM,
    ALGEBRA_TOL,
    Factor,
    Operator,
    StateVector,
    atom_factor,
    embed,
    expectation,
    flat_index,
    partial_trace,
    photon_factor,
    qutrit_factor,
    von_neumann_entropy,
)
from .su2phase import PhaseBasis, generators, phase_angles, phase_amplitudes, spin_for_pairs

MAX_ATOMS = 12
WITNESS_TOL = 1e-10
LN2 = math.log(2.0)

PAULI = {
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    # basis (e, g): sigma_2 = -i|e><g| + i|g><e|
    2: np.array([[0, -1j], [1j, 0]], dtype=complex),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}
RAISE = np.array([[0, 1], [0, 0]], dtype=complex)  # |e><g|
LOWER = RAISE.T.copy()  # |g><e|


@dataclass(frozen=True)
class AtomConfiguration:
    bits: tuple[str, ...]
    photon: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(self.bits))
        if any(b not in ("e", "g") for b in self.bits):
            raise ValueError(f"atom flags must be 'e' or 'g': {self.bits}")

    @property
    def excitations(self) -> int:
        return self.bits.count("e") + (self.photon or 0)

    def __str__(self):
        s = "".join(f"{b}{i + 1}" for i, b in enumerate(self.bits))
        return s if self.photon is None else f"{s}|{self.photon}"

    @classmethod
    def parse(cls, text: str) -> "AtomConfiguration":
        """Accepts ``'eggg'``, ``'e1g2g3g4'`` or either form followed by ``|<photons>``."""
        atoms, _, ph = text.partition("|")
        bits = tuple(ch for ch in atoms if ch in "eg")
        if not bits or re.sub(r"[eg0-9]", "", atoms):
            raise ValueError(f"cannot parse atom configuration {text!r}")
        return cls(bits, int(ph) if ph else None)


def atom_factors(count: int) -> tuple[Factor, ...]:
    if count < 1 or count > MAX_ATOMS:
        raise ValueError(f"atom count must be in 1..{MAX_ATOMS}")
    return tuple(atom_factor() for _ in range(count))


def half_excited_basis(n: int) -> list[AtomConfiguration]:
    """All C(2n, n) configurations with n excited atoms, lexicographic with e < g."""
    if n < 1 or 2 * n > MAX_ATOMS:
        raise ValueError(f"need 1 <= n and 2n <= {MAX_ATOMS}")
    out = []
    for bits in itertools.product("eg", repeat=2 * n):
        if bits.count("e") == n:
            out.append(AtomConfiguration(bits))
    return out


def local_pauli(atom: int, i: int, atom_count: int) -> Operator:
    if not 1 <= atom <= atom_count:
        raise IndexError(f"atom {atom} out of range 1..{atom_count}")
    if i not in PAULI:
        raise IndexError(f"Pauli index {i} not in 1..3")
    factors = atom_factors(atom_count)
    return Operator(factors, embed(PAULI[i], atom - 1, factors), hermitian=True, unitary=True)


def local_on(state_factors, position: int, local: np.ndarray, hermitian=False) -> Operator:
    return Operator(state_factors, embed(local, position, state_factors), hermitian=hermitian)


def atom_positions(factors) -> list[int]:
    return [i for i, f in enumerate(factors) if f.kind == ATOM]


@dataclass
class WitnessReport:
    """Local Pauli expectations ``table[i-1][atom-1]`` and single-atom entropies."""

    table: np.ndarray
    entropies: np.ndarray
    tolerance: float = WITNESS_TOL
    max_abs: float = field(init=False)
    passes: bool = field(init=False)

    def __post_init__(self):
        self.max_abs = float(np.max(np.abs(self.table)))
        self.passes = self.max_abs < self.tolerance

    @property
    def verdict(self) -> str:
        return "passes-criterion" if self.passes else "fails-criterion"

    def to_json(self) -> dict:
        return {
            "expectations": {
                f"sigma{i + 1}": [float(x) for x in row] for i, row in enumerate(self.table)
            },
            "max_abs": self.max_abs,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "entropies": [float(x) for x in self.entropies],
        }


def witness_scan(state: StateVector, tol: float = WITNESS_TOL) -> WitnessReport:
    positions = atom_positions(state.factors)
    if not positions:
        raise ValueError("state has no atomic factors")
    table = np.zeros((3, len(positions)))
    for col, pos in enumerate(positions):
        for i in (1, 2, 3):
            op = local_on(state.factors, pos, PAULI[i], hermitian=True)
            table[i - 1, col] = expectation(op, state).real
    entropies = np.array([von_neumann_entropy(partial_trace(state, [p])) for p in positions])
    return WitnessReport(table, entropies, tol)


def factor_entropies(state: StateVector) -> np.ndarray:
    """Reduced entropy of every single factor."""
    return np.array([von_neumann_entropy(partial_trace(state, [i])) for i in range(len(state.factors))])


def embed_configurations(configs, amplitudes, photon_cutoff: int | None = None) -> StateVector:
    """Superpose configurations into the full atomic (optionally atoms x Fock) space."""
    count = len(configs[0].bits)
    factors = atom_factors(count)
    if photon_cutoff is not None:
        factors = factors + (photon_factor(photon_cutoff),)
    amps = np.zeros(2**count * (1 if photon_cutoff is None else photon_cutoff + 1), dtype=complex)
    for cfg, a in zip(configs, amplitudes):
        labels = cfg.bits if photon_cutoff is None else cfg.bits + (str(cfg.photon or 0),)
        amps[flat_index(factors, labels)] += a
    return StateVector.from_amplitudes(factors, amps)


def embed_phase_states(n: int, psi: float = 0.0, photon_cutoff: int | None = None) -> PhaseBasis:
    """Phase states of spin j(n) written on the half-excited atomic configurations."""
    spin = spin_for_pairs(n)
    configs = half_excited_basis(n)
    phis = phase_angles(spin.N, psi)
    states = tuple(
        embed_configurations(configs, phase_amplitudes(spin.N, phi), photon_cutoff) for phi in phis
    )
    return PhaseBasis(spin, float(psi), states, phis)


def _two_atom(terms: dict) -> StateVector:
    return StateVector.from_terms(atom_factors(2), {tuple(k): v for k, v in terms.items()})


def chi_state(p: int, k: int, psi: float = 0.0) -> StateVector:
    """Pair components of the six N=6 phase states (two-term superpositions)."""
    if p not in (1, 2, 3) or not 0 <= k <= 5:
        raise ValueError(f"chi index out of range: p={p}, k={k}")
    phi = phase_angles(6, psi)[k]
    first, second, power = {
        1: ("eegg", "ggee", 5),
        2: ("geeg", "egge", 3),
        3: ("gege", "egeg", 1),
    }[p]
    return StateVector.from_terms(
        atom_factors(4), {tuple(first): 1.0, tuple(second): np.exp(1j * power * phi)}
    )


def three_atom_phase_state(k: int, psi: float = 0.0) -> StateVector:
    """Spin-1 phase states on the three singly excited configurations of three atoms."""
    phi = phase_angles(3, psi)[k]
    configs = [AtomConfiguration(tuple(b)) for b in ("egg", "geg", "gge")]
    return embed_configurations(configs, phase_amplitudes(3, phi))


# |e1e2>, |g1g2>, |e1g2>, |g1e2> coefficients
_FOUR_MAXIMAL = {
    1: (1, 1, 1j, 1j),
    2: (1, -1, -1j, 1j),
    3: (1j, 1j, 1, 1),
    4: (-1j, 1j, 1, -1),
}


def four_maximal_state(idx: int) -> StateVector:
    c = _FOUR_MAXIMAL[idx]
    return _two_atom({"ee": c[0], "gg": c[1], "eg": c[2], "ge": c[3]})


def two_atom_two_photon_phase_state(k: int, psi: float = 0.0) -> StateVector:
    """Phase states over the ordering ee, eg, gg, ge of two atoms."""
    phi = phase_angles(4, psi)[k]
    c = phase_amplitudes(4, phi)
    return _two_atom({"ee": c[0], "eg": c[1], "gg": c[2], "ge": c[3]})


def biphoton_qutrit_state(k: int, psi: float = 0.0) -> StateVector:
    phi = phase_angles(3, psi)[k]
    c = phase_amplitudes(3, phi)
    q = qutrit_factor()
    return StateVector.from_terms((q, q), {("+1", "-1"): c[0], ("0", "0"): c[1], ("-1", "+1"): c[2]})


NAMED_TAGS = (
    "bell+", "bell-", "ghz3+", "ghz3-",
    "chi<p><k>",
    "four-maximal-<1..4>",
    "two-atom-two-photon-phase-<k>",
    "biphoton-qutrit-<k>",
    "three-atom-phase-<k>",
    "phase-n<n>-<k>",
)


def named_state(tag: str, psi: float = 0.0) -> StateVector:
    """Look up one of the named states; ``psi`` is the reference phase where one applies."""
    tag = tag.strip().lower()
    if tag in ("bell+", "bell-"):
        sign = 1 if tag.endswith("+") else -1
        return _two_atom({"eg": 1.0, "ge": sign})
    if tag in ("ghz3+", "ghz3-"):
        sign = 1 if tag.endswith("+") else -1
        return StateVector.from_terms(atom_factors(3), {tuple("eee"): 1.0, tuple("ggg"): sign})
    patterns = [
        (r"chi\(?(\d),?\s*(\d)\)?", lambda p, k: chi_state(int(p), int(k), psi)),
        (r"four-maximal-([1-4])", lambda i: four_maximal_state(int(i))),
        (r"two-atom-two-photon-phase-([0-3])", lambda k: two_atom_two_photon_phase_state(int(k), psi)),
        (r"biphoton-qutrit-([0-2])", lambda k: biphoton_qutrit_state(int(k), psi)),
        (r"three-atom-phase-([0-2])", lambda k: three_atom_phase_state(int(k), psi)),
        (r"phase-n(\d+)-(\d+)", lambda n, k: _phase_member(int(n), int(k), psi)),
    ]
    for pat, build in patterns:
        m = re.fullmatch(pat, tag)
        if m:
            return build(*m.groups())
    raise KeyError(f"unknown state tag {tag!r}; known: {', '.join(NAMED_TAGS)}")


def _phase_member(n: int, k: int, psi: float) -> StateVector:
    basis = embed_phase_states(n, psi)
    if not 0 <= k < len(basis):
        raise ValueError(f"k={k} out of range for N={len(basis)}")
    return basis[k]


def sector_isometry(n: int) -> np.ndarray:
    """Columns are the half-excited configuration kets in the full 2^(2n) atomic space."""
    configs = half_excited_basis(n)
    factors = atom_factors(2 * n)
    V = np.zeros((2 ** (2 * n), len(configs)), dtype=complex)
    for col, cfg in enumerate(configs):
        V[flat_index(factors, cfg.bits), col] = 1.0
    return V


def sector_generators(n: int) -> tuple[Operator, Operator, Operator]:
    """J+, J-, Jz of spin j(n) lifted onto the full atomic space of 2n atoms."""
    V = sector_isometry(n)
    factors = atom_factors(2 * n)
    jp, jm, jz = generators(spin_for_pairs(n))
    return (
        Operator(factors, V @ jp.matrix @ V.conj().T),
        Operator(factors, V @ jm.matrix @ V.conj().T),
        Operator(factors, V @ jz.matrix @ V.conj().T, hermitian=True),
    )
