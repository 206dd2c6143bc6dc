"""Dense pure states, operators and reduced density matrices on tensor-product spaces.

A space is an ordered tuple of :class:`Factor` objects.  The flat basis is the
lexicographic product of the factor labels with the first factor outermost,
i.e. the same ordering ``numpy.kron`` produces.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

ALGEBRA_TOL = 1e-12
SPECTRAL_TOL = 1e-9

# Total Hilbert-space dimension allowed for any constructed object.
MAX_DIM = 2**20

ATOM = "atom"
PHOTON = "photon"
SPIN = "spin"
QUTRIT = "qutrit"


class DimensionError(ValueError):
    pass


class BasisMismatch(ValueError):
    pass


class InvalidDensity(ValueError):
    pass


@dataclass(frozen=True)
class Factor:
    """One tensor factor: a kind tag and its ordered basis labels."""

    kind: str
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate labels in factor {self.labels}")

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        return self.labels.index(str(label))


def atom_factor() -> Factor:
    # e precedes g
    return Factor(ATOM, ("e", "g"))


def photon_factor(cutoff: int) -> Factor:
    if cutoff < 0:
        raise ValueError("Fock cutoff must be >= 0")
    return Factor(PHOTON, tuple(str(k) for k in range(cutoff + 1)))


def spin_factor(N: int) -> Factor:
    return Factor(SPIN, tuple(str(k) for k in range(N)))


def qutrit_factor() -> Factor:
    return Factor(QUTRIT, ("+1", "0", "-1"))


def space_dim(factors: Sequence[Factor]) -> int:
    return math.prod(f.dim for f in factors)


def _check_dim(factors: Sequence[Factor]) -> int:
    d = space_dim(factors)
    if d > MAX_DIM:
        raise DimensionError(f"dimension {d} exceeds cap {MAX_DIM}")
    return d


def basis_labels(factors: Sequence[Factor]) -> list[tuple[str, ...]]:
    """Composite labels in flat-index order."""
    return list(itertools.product(*(f.labels for f in factors)))


def flat_index(factors: Sequence[Factor], labels: Sequence) -> int:
    if len(labels) != len(factors):
        raise BasisMismatch(f"label {labels} does not match {len(factors)} factors")
    idx = 0
    for f, lab in zip(factors, labels):
        idx = idx * f.dim + f.index(lab)
    return idx


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state over ``factors``."""

    factors: tuple[Factor, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        factors = tuple(self.factors)
        object.__setattr__(self, "factors", factors)
        d = _check_dim(factors)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != d:
            raise BasisMismatch(f"{amps.size} amplitudes for a {d}-dimensional space")
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > ALGEBRA_TOL:
            raise ValueError(f"state not normalized (norm={nrm!r})")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, factors, amplitudes) -> "StateVector":
        """Normalize ``amplitudes`` and build the state."""
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(amps)
        if nrm == 0:
            raise ValueError("zero vector cannot be normalized")
        return cls(tuple(factors), amps / nrm)

    @classmethod
    def from_terms(cls, factors, terms: dict) -> "StateVector":
        """Build from ``{label_tuple: amplitude}``; result is normalized."""
        factors = tuple(factors)
        amps = np.zeros(_check_dim(factors), dtype=complex)
        for labels, c in terms.items():
            amps[flat_index(factors, labels)] += c
        return cls.from_amplitudes(factors, amps)

    @classmethod
    def basis_ket(cls, factors, labels) -> "StateVector":
        return cls.from_terms(factors, {tuple(labels): 1.0})

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def basis(self) -> list[tuple[str, ...]]:
        return basis_labels(self.factors)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, labels) -> complex:
        return complex(self.amplitudes[flat_index(self.factors, labels)])

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>."""
        _same_space(self.factors, other.factors)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def to_json(self) -> dict:
        return {
            "factors": [{"kind": f.kind, "labels": list(f.labels)} for f in self.factors],
            "basis": [list(lab) for lab in self.basis],
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }

    @classmethod
    def from_json(cls, data: dict) -> "StateVector":
        factors = tuple(Factor(f["kind"], tuple(f["labels"])) for f in data["factors"])
        amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
        if "basis" in data:
            expected = [list(lab) for lab in basis_labels(factors)]
            if [list(map(str, lab)) for lab in data["basis"]] != expected:
                raise BasisMismatch("basis listing does not match the declared factors")
        return cls.from_amplitudes(factors, amps)


def _same_space(a: Sequence[Factor], b: Sequence[Factor]) -> None:
    if tuple(a) != tuple(b):
        raise BasisMismatch("operands live on different spaces")


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense operator with optional, construction-checked hermitian/unitary flags."""

    factors: tuple[Factor, ...]
    matrix: np.ndarray
    hermitian: bool = False
    unitary: bool = False

    def __post_init__(self):
        factors = tuple(self.factors)
        object.__setattr__(self, "factors", factors)
        d = _check_dim(factors)
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (d, d):
            raise BasisMismatch(f"matrix shape {m.shape} does not match dimension {d}")
        if self.hermitian:
            err = np.max(np.abs(m - m.conj().T), initial=0.0)
            if err >= ALGEBRA_TOL:
                raise ValueError(f"operator flagged hermitian but |M - M^+|_max = {err:.3e}")
        if self.unitary:
            err = np.max(np.abs(m @ m.conj().T - np.eye(d)), initial=0.0)
            if err >= ALGEBRA_TOL:
                raise ValueError(f"operator flagged unitary but |MM^+ - 1|_max = {err:.3e}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, s: StateVector) -> np.ndarray:
        """Raw (possibly unnormalized) image vector of ``s``."""
        _same_space(self.factors, s.factors)
        return self.matrix @ s.amplitudes

    def dagger(self) -> "Operator":
        return Operator(self.factors, self.matrix.conj().T, self.hermitian, self.unitary)

    def __matmul__(self, other: "Operator") -> "Operator":
        _same_space(self.factors, other.factors)
        return Operator(self.factors, self.matrix @ other.matrix)


def identity(factors: Sequence[Factor]) -> Operator:
    return Operator(tuple(factors), np.eye(space_dim(factors)), hermitian=True, unitary=True)


def embed(local: np.ndarray, position: int, factors: Sequence[Factor]) -> np.ndarray:
    """Kronecker-embed a single-factor matrix at ``position`` (0-based)."""
    factors = tuple(factors)
    _check_dim(factors)
    out = np.ones((1, 1), dtype=complex)
    for i, f in enumerate(factors):
        out = np.kron(out, local if i == position else np.eye(f.dim))
    return out


def tensor_product(a: StateVector, b: StateVector) -> StateVector:
    """|a> (x) |b>, with the factors of ``a`` outermost."""
    factors = a.factors + b.factors
    _check_dim(factors)
    return StateVector(factors, np.kron(a.amplitudes, b.amplitudes))


def expectation(op: Operator, s: StateVector) -> complex:
    val = complex(np.vdot(s.amplitudes, op.apply(s)))
    if op.hermitian:
        # exact up to rounding for a hermitian operator
        val = complex(val.real, 0.0) if abs(val.imag) < ALGEBRA_TOL else val
    return val


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    factors: tuple[Factor, ...]
    matrix: np.ndarray

    def __post_init__(self):
        factors = tuple(self.factors)
        object.__setattr__(self, "factors", factors)
        d = space_dim(factors)
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (d, d):
            raise BasisMismatch(f"matrix shape {m.shape} does not match dimension {d}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) >= ALGEBRA_TOL:
            raise InvalidDensity("density matrix is not hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > ALGEBRA_TOL:
            raise InvalidDensity(f"trace {tr!r} != 1")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def is_positive(self, tol: float = ALGEBRA_TOL) -> bool:
        return bool(self.eigenvalues().min() >= -tol)


def partial_trace(s: StateVector, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix on the factors listed in ``keep`` (0-based, order preserved)."""
    keep = sorted(set(keep))
    n = len(s.factors)
    if n < 2 and keep != list(range(n)):
        raise BasisMismatch("partial trace needs a composite space")
    if any(k < 0 or k >= n for k in keep):
        raise IndexError(f"factor indices {keep} out of range for {n} factors")
    if not keep:
        raise ValueError("keep at least one factor")
    dims = [f.dim for f in s.factors]
    traced = [i for i in range(n) if i not in keep]
    psi = s.amplitudes.reshape(dims)
    psi = np.transpose(psi, keep + traced)
    dk = math.prod(dims[i] for i in keep)
    psi = psi.reshape(dk, -1)
    rho = psi @ psi.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(tuple(s.factors[i] for i in keep), rho)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in nats; divide by ln 2 for bits."""
    evals = rho.eigenvalues()
    if evals.min() < -SPECTRAL_TOL:
        raise InvalidDensity(f"negative eigenvalue {evals.min():.3e}")
    evals = evals[evals > 0]
    return float(-np.sum(evals * np.log(evals))) + 0.0


def fidelity(a: StateVector, b: StateVector) -> float:
    return abs(a.overlap(b))
