"""GHZ-type operator identities, hidden-variable search and CHSH correlators."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .atomlattice import PAULI, atom_factors, atom_positions
from .qstate import Operator, StateVector

EIGEN_TOL = 1e-10
MAX_CLASSICAL_VARS = 16
_LOCAL = {0: np.eye(2, dtype=complex), **PAULI}


@dataclass(frozen=True)
class PauliWord:
    """Per-atom letters; 0 is the identity, 1..3 are sigma_1..sigma_3."""

    letters: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(x) for x in self.letters))
        if any(x not in _LOCAL for x in self.letters):
            raise ValueError(f"invalid Pauli letters {self.letters}")

    @classmethod
    def parse(cls, text) -> "PauliWord":
        if isinstance(text, PauliWord):
            return text
        if isinstance(text, str):
            return cls(tuple(0 if ch in "iI" else int(ch) for ch in text.replace(",", "")))
        return cls(tuple(text))

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return "".join("I" if x == 0 else str(x) for x in self.letters)

    def matrix(self) -> np.ndarray:
        out = np.ones((1, 1), dtype=complex)
        for x in self.letters:
            out = np.kron(out, _LOCAL[x])
        return out


@dataclass(frozen=True)
class EigenCheck:
    eigenvalue: int | None
    residual: float

    @property
    def is_eigenstate(self) -> bool:
        return self.eigenvalue is not None


def _atom_only(state: StateVector) -> None:
    if atom_positions(state.factors) != list(range(len(state.factors))):
        raise ValueError("word checks need a purely atomic state")


def word_operator(state: StateVector, word: PauliWord) -> Operator:
    return Operator(state.factors, word.matrix(), hermitian=True, unitary=True)


def word_eigencheck(state: StateVector, word, tol: float = EIGEN_TOL) -> EigenCheck:
    word = PauliWord.parse(word)
    _atom_only(state)
    if len(word) != len(state.factors):
        raise ValueError(f"word length {len(word)} != atom count {len(state.factors)}")
    image = word.matrix() @ state.amplitudes
    best = None
    for sign in (1, -1):
        r = float(np.linalg.norm(image - sign * state.amplitudes))
        if r < tol:
            return EigenCheck(sign, r)
        best = r if best is None else min(best, r)
    return EigenCheck(None, best)


@dataclass(frozen=True)
class ClassicalConstraint:
    """Product of the hidden values named by ``word`` must equal ``sign``."""

    word: PauliWord
    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if any(x not in (1, 2) for x in self.word.letters):
            raise ValueError("classical constraints use letters 1 and 2 only")

    def variables(self) -> list[tuple[int, int]]:
        """(atom, letter) pairs, atoms 1-based."""
        return [(a + 1, x) for a, x in enumerate(self.word.letters)]

    def __str__(self):
        return f"{self.word}={'+' if self.sign > 0 else '-'}1"


def classical_search(constraints: Iterable[ClassicalConstraint]) -> dict | None:
    """Exhaustive search for +-1 hidden values satisfying every constraint.

    Returns the first satisfying assignment ``{(atom, letter): +-1}`` in
    lexicographic order (+1 before -1, variables sorted), or ``None`` if the
    system is unsatisfiable.
    """
    constraints = list(constraints)
    variables = sorted({v for c in constraints for v in c.variables()})
    if len(variables) > MAX_CLASSICAL_VARS:
        raise ValueError(f"{len(variables)} hidden variables exceeds the search guard of {MAX_CLASSICAL_VARS}")
    pos = {v: i for i, v in enumerate(variables)}
    rows = [([pos[v] for v in c.variables()], c.sign) for c in constraints]
    for values in itertools.product((1, -1), repeat=len(variables)):
        if all(math.prod(values[i] for i in idx) == sign for idx, sign in rows):
            return dict(zip(variables, values))
    return None


def derive_constraints(state: StateVector) -> list[ClassicalConstraint]:
    """Every word over {sigma_1, sigma_2} that has the state as an eigenvector, with its sign."""
    _atom_only(state)
    n = len(state.factors)
    out = []
    for letters in itertools.product((1, 2), repeat=n):
        w = PauliWord(letters)
        chk = word_eigencheck(state, w)
        if chk.is_eigenstate:
            out.append(ClassicalConstraint(w, chk.eigenvalue))
    return out


def uniform_word_signs(state: StateVector) -> dict[int, int | None]:
    """Eigenvalue of sigma_i on every atom, for i = 1, 2, 3."""
    n = len(state.factors)
    return {i: word_eigencheck(state, PauliWord((i,) * n)).eigenvalue for i in (1, 2, 3)}


A_SIDE = (1, 2)
B_SIDE = (3, 4)


def pair_matrix(theta: float) -> np.ndarray:
    """Two-atom observable in the (ee, eg, ge, gg) basis."""
    c, s = math.cos(theta), math.sin(theta)
    m = np.zeros((4, 4), dtype=complex)
    ee, gg = 0, 3
    m[ee, ee], m[gg, gg] = c, -c
    m[ee, gg] = m[gg, ee] = s
    return m


def pair_observable(theta: float, side: str = "a", atom_count: int = 4) -> Operator:
    if side not in ("a", "b"):
        raise ValueError("side must be 'a' (atoms 1,2) or 'b' (atoms 3,4)")
    if atom_count != 4:
        raise ValueError("pair observables are defined for four atoms")
    local = pair_matrix(theta)
    m = np.kron(local, np.eye(4)) if side == "a" else np.kron(np.eye(4), local)
    return Operator(atom_factors(4), m, hermitian=True)


@dataclass(frozen=True)
class ChshSettings:
    theta_a: float
    theta_a_prime: float
    theta_b: float
    theta_b_prime: float

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.theta_a, self.theta_a_prime, self.theta_b, self.theta_b_prime)):
            raise ValueError("angles must be finite")

    @classmethod
    def reference(cls, theta_b: float) -> "ChshSettings":
        """a at pi, a' at pi/2, b' = -b."""
        return cls(math.pi, math.pi / 2, theta_b, -theta_b)


# position of the single minus sign -> CHSH combination
VARIANTS = ("ab", "ab'", "a'b", "a'b'")
PRINTED_VARIANT = "ab'"


@dataclass(frozen=True)
class ChshResult:
    correlators: dict
    values: dict
    s_max: float
    variant: str

    @property
    def printed(self) -> float:
        return self.values[PRINTED_VARIANT]

    def to_json(self) -> dict:
        return {
            "correlators": dict(self.correlators),
            "variants": dict(self.values),
            "S_max": self.s_max,
            "variant": self.variant,
        }


def correlator(state: StateVector, theta_a: float, theta_b: float) -> float:
    op = np.kron(pair_matrix(theta_a), pair_matrix(theta_b))
    return float(np.vdot(state.amplitudes, op @ state.amplitudes).real)


def chsh_scan(state: StateVector, settings: ChshSettings) -> ChshResult:
    _atom_only(state)
    if len(state.factors) != 4:
        raise ValueError("CHSH scan needs a four-atom state")
    ta, tap, tb, tbp = settings.theta_a, settings.theta_a_prime, settings.theta_b, settings.theta_b_prime
    corr = {
        "ab": correlator(state, ta, tb),
        "ab'": correlator(state, ta, tbp),
        "a'b": correlator(state, tap, tb),
        "a'b'": correlator(state, tap, tbp),
    }
    values = {}
    for minus in VARIANTS:
        values[minus] = abs(sum(-v if k == minus else v for k, v in corr.items()))
    variant = max(VARIANTS, key=lambda k: values[k])
    return ChshResult(corr, values, values[variant], variant)


def chsh_grid_max(state: StateVector, points: int = 10) -> float:
    """Largest S over a uniform ``points``^4 grid of all four angles in [-pi, pi)."""
    grid = np.linspace(-np.pi, np.pi, points, endpoint=False)
    mats = [pair_matrix(t) for t in grid]
    # precompute every correlator <a(t1) b(t2)>
    E = np.empty((points, points))
    for i, ma in enumerate(mats):
        for k, mb in enumerate(mats):
            E[i, k] = np.vdot(state.amplitudes, np.kron(ma, mb) @ state.amplitudes).real
    best = 0.0
    idx = range(points)
    for a, ap in itertools.product(idx, idx):
        ab, apb = E[a][:, None], E[ap][:, None]
        abp, apbp = E[a][None, :], E[ap][None, :]
        for combo in (
            -ab + abp + apb + apbp,
            ab - abp + apb + apbp,
            ab + abp - apb + apbp,
            ab + abp + apb - apbp,
        ):
            best = max(best, float(np.max(np.abs(combo))))
    return best
