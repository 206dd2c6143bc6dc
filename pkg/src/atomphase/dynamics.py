"""Closed-system atom-cavity dynamics: Hamiltonian, exact propagation, closed forms.

Propagation is by Hermitian eigendecomposition, so time points need not be
uniform and there is no integrator error.  Units are whatever ``gamma`` is
measured in; the examples use 1/gamma as the time unit.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .atomlattice import (
    AtomConfiguration,
    LOWER,
    RAISE,
    atom_factors,
    embed_configurations,
    embed_phase_states,
    half_excited_basis,
)
from .qstate import (
    ALGEBRA_TOL,
    Operator,
    StateVector,
    embed,
    photon_factor,
)

INITIAL_TAGS = ("excited-atom", "photon", "phase-minus")


@dataclass
class SimConfig:
    delta: float = 0.0
    omega0: float = 1.0
    gamma: float = 1.0
    kappa: float = 0.0
    n_pairs: int = 1
    fock_cutoff: int | None = None
    initial: object = "photon"
    times: Sequence[float] = (0.0,)

    def __post_init__(self):
        if self.n_pairs < 1:
            raise ValueError("n_pairs must be >= 1")
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or t.size == 0:
            raise ValueError("times must be a non-empty sequence")
        if t[0] < 0 or np.any(np.diff(t) <= 0):
            raise ValueError("times must start at >= 0 and increase strictly")
        self.times = t
        exc = initial_excitations(self)
        if self.fock_cutoff is None:
            self.fock_cutoff = exc
        elif self.fock_cutoff < exc:
            raise ValueError(
                f"Fock cutoff {self.fock_cutoff} below the {exc} excitations of the initial state"
            )

    @property
    def atom_count(self) -> int:
        return 2 * self.n_pairs

    @property
    def factors(self):
        return atom_factors(self.atom_count) + (photon_factor(self.fock_cutoff),)


def initial_configuration(cfg: SimConfig) -> AtomConfiguration | None:
    """Product-state configuration for a tag, or None for non-product initial states."""
    init = cfg.initial
    n = cfg.n_pairs
    if isinstance(init, StateVector):
        return None
    if init == "photon":
        return AtomConfiguration(("g",) * (2 * n), n)
    if init == "excited-atom":
        # one excitation on atom 1, remaining n-1 quanta in the field
        return AtomConfiguration(("e",) + ("g",) * (2 * n - 1), n - 1)
    if init == "phase-minus":
        if n != 1:
            raise ValueError("phase-minus initial state is defined for n_pairs=1")
        return None
    if isinstance(init, str):
        conf = AtomConfiguration.parse(init)
        if len(conf.bits) != 2 * n:
            raise ValueError(f"initial configuration {init!r} has {len(conf.bits)} atoms, expected {2 * n}")
        return AtomConfiguration(conf.bits, conf.photon or 0)
    if isinstance(init, AtomConfiguration):
        return init
    raise ValueError(f"unknown initial state {init!r}")


def initial_excitations(cfg: SimConfig) -> int:
    init = cfg.initial
    if isinstance(init, StateVector):
        ph = [i for i, f in enumerate(init.factors) if f.kind == "photon"]
        amps = init.amplitudes.reshape([f.dim for f in init.factors])
        probs = np.abs(amps) ** 2
        exc = 0
        for idx in zip(*np.nonzero(probs > 1e-15)):
            e = sum(
                (int(init.factors[i].labels[k]) if init.factors[i].kind == "photon" else int(init.factors[i].labels[k] == "e"))
                for i, k in enumerate(idx)
            )
            exc = max(exc, e)
        return exc
    if init == "phase-minus":
        return 1
    return initial_configuration(cfg).excitations


def initial_state(cfg: SimConfig) -> StateVector:
    factors = cfg.factors
    if isinstance(cfg.initial, StateVector):
        if cfg.initial.factors != factors:
            raise ValueError("explicit initial state does not match the configured space")
        return cfg.initial
    if cfg.initial == "phase-minus":
        return embed_phase_states(1, 0.0, photon_cutoff=cfg.fock_cutoff)[1]
    conf = initial_configuration(cfg)
    return embed_configurations([conf], [1.0], photon_cutoff=cfg.fock_cutoff)


def _photon_ops(cutoff: int) -> tuple[np.ndarray, np.ndarray]:
    a = np.diag(np.sqrt(np.arange(1, cutoff + 1)), k=1).astype(complex)
    return a, np.diag(np.arange(cutoff + 1)).astype(complex)


def excitation_operator(cfg: SimConfig) -> Operator:
    """Photons plus excited atoms."""
    factors = cfg.factors
    ph = len(factors) - 1
    _, num = _photon_ops(cfg.fock_cutoff)
    m = embed(num, ph, factors)
    proj_e = np.diag([1.0, 0.0]).astype(complex)
    for l in range(cfg.atom_count):
        m = m + embed(proj_e, l, factors)
    return Operator(factors, m, hermitian=True)


def build_hamiltonian(cfg: SimConfig) -> Operator:
    """Detuning + atomic energy + equal-coupling exchange + Kerr term on atoms (x) Fock(cutoff)."""
    factors = cfg.factors
    ph = len(factors) - 1
    a, num = _photon_ops(cfg.fock_cutoff)
    A = embed(a, ph, factors)
    Num = embed(num, ph, factors)
    H = cfg.delta * Num + cfg.omega0 * excitation_operator(cfg).matrix
    for l in range(cfg.atom_count):
        Rp = embed(RAISE, l, factors)
        Rm = embed(LOWER, l, factors)
        H = H + cfg.gamma * (Rp @ A + A.conj().T @ Rm)
    if cfg.kappa:
        H = H + cfg.kappa * (Num @ Num)
    H = 0.5 * (H + H.conj().T)
    return Operator(factors, H, hermitian=True)


class Propagator:
    """exp(-iHt) from one eigendecomposition, reused across times."""

    def __init__(self, H: Operator | np.ndarray):
        M = H.matrix if isinstance(H, Operator) else np.asarray(H)
        self.factors = H.factors if isinstance(H, Operator) else None
        try:
            self.energies, self.vectors = np.linalg.eigh(M)
        except np.linalg.LinAlgError as exc:
            raise RuntimeError(f"eigensolver failed: {exc}") from exc

    def amplitudes(self, psi0: np.ndarray, t: float) -> np.ndarray:
        c = self.vectors.conj().T @ psi0
        return self.vectors @ (np.exp(-1j * self.energies * t) * c)


def evolve(H: Operator, s0: StateVector, t: float, propagator: Propagator | None = None) -> StateVector:
    if H.factors != s0.factors:
        raise ValueError("Hamiltonian and state live on different spaces")
    if not H.hermitian:
        raise ValueError("evolution needs a hermitian Hamiltonian")
    prop = propagator or Propagator(H)
    amps = prop.amplitudes(s0.amplitudes, t)
    # unitary evolution: renormalize only rounding noise
    return StateVector(s0.factors, amps / np.linalg.norm(amps))


def sector_indices(N_op: Operator, value: int) -> np.ndarray:
    diag = np.real(np.diag(N_op.matrix))
    return np.nonzero(np.abs(diag - value) < 0.5)[0]


def rabi_frequency(gamma: float, delta: float, kappa: float = 0.0) -> float:
    return math.sqrt(2 * gamma**2 + (delta + kappa) ** 2 / 4)


def analytic_two_plus_one(cfg: SimConfig, initial: str, t):
    """Closed-form (C_minus, C_plus, C) for two atoms and one excitation.

    C_minus, C_plus multiply |phi_-,0> and |phi_+,0> (psi = 0), C multiplies |g1g2,1>.
    The Kerr term enters through the effective detuning delta + kappa.
    """
    if cfg.n_pairs != 1:
        raise ValueError("closed forms exist only for two atoms and one photon")
    t = np.asarray(t, dtype=float)
    d = cfg.delta + cfg.kappa
    om = rabi_frequency(cfg.gamma, cfg.delta, cfg.kappa)
    cos = np.cos(om * t)
    # sin(om t)/om, finite as om -> 0
    sinc = t * np.sinc(om * t / np.pi)
    ph = np.exp(-1j * (cfg.omega0 + d / 2) * t)
    e0 = np.exp(-1j * cfg.omega0 * t)
    zero = np.zeros_like(t, dtype=complex)
    if initial == "excited-atom":
        cm = e0 / math.sqrt(2)
        cp = (cos + 0.5j * d * sinc) * ph / math.sqrt(2)
        c = -1j * cfg.gamma * sinc * ph
    elif initial == "photon":
        cm = zero
        cp = -1j * cfg.gamma * math.sqrt(2) * sinc * ph
        c = (cos - 0.5j * d * sinc) * ph
    elif initial == "phase-minus":
        cm, cp, c = e0 + zero, zero, zero
    else:
        raise ValueError(f"no closed form for initial state {initial!r}")
    return cm, cp, c


def reference_states(cfg: SimConfig) -> tuple[StateVector, StateVector]:
    """(|phi_+>, |phi_->) (x) vacuum at psi = 0.

    For n_pairs > 1 these are the k=0 (uniform) and k=N/2 (alternating) phase
    states, which reduce to phi_+ and phi_- at n_pairs = 1.
    """
    basis = embed_phase_states(cfg.n_pairs, 0.0, photon_cutoff=cfg.fock_cutoff)
    return basis[0], basis[len(basis) // 2]


def _vacuum_ground_ket(cfg: SimConfig) -> StateVector:
    conf = AtomConfiguration(("g",) * cfg.atom_count, cfg.n_pairs)
    return embed_configurations([conf], [1.0], photon_cutoff=cfg.fock_cutoff)


def photon_probability(cfg: SimConfig, amps: np.ndarray) -> float:
    """Probability that at least one photon is present."""
    dims = [2] * cfg.atom_count + [cfg.fock_cutoff + 1]
    p = np.abs(amps.reshape(dims)) ** 2
    return float(1.0 - p[..., 0].sum())


@dataclass
class TraceRecord:
    t: float
    state: StateVector
    p_plus: float
    p_minus: float
    p_ph: float
    norm: float
    n_expect: float
    analytic: tuple | None = None
    deviation: float | None = None


@dataclass
class Trace:
    config: SimConfig
    records: list[TraceRecord] = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    CSV_COLUMNS = ("t", "P_plus", "P_minus", "P_ph", "norm", "N_expect")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for r in self.records:
            w.writerow([f"{x:.12g}" for x in (r.t, r.p_plus, r.p_minus, r.p_ph, r.norm, r.n_expect)])
        return buf.getvalue()

    def to_json(self) -> dict:
        cfg = self.config
        out = {
            "config": {
                "delta": cfg.delta, "omega0": cfg.omega0, "gamma": cfg.gamma, "kappa": cfg.kappa,
                "n_pairs": cfg.n_pairs, "fock_cutoff": cfg.fock_cutoff,
                "initial": cfg.initial if isinstance(cfg.initial, str) else "explicit",
            },
            "records": [],
        }
        for r in self.records:
            rec = {
                "t": r.t, "P_plus": r.p_plus, "P_minus": r.p_minus, "P_ph": r.p_ph,
                "norm": r.norm, "N_expect": r.n_expect, "state": r.state.to_json(),
            }
            if r.analytic is not None:
                rec["analytic"] = {k: [v.real, v.imag] for k, v in zip(("C_minus", "C_plus", "C"), r.analytic)}
                rec["deviation"] = r.deviation
            out["records"].append(rec)
        return out


def numeric_coefficients(cfg: SimConfig, state: StateVector) -> tuple[complex, complex, complex]:
    """Project a two-atom state onto |phi_->|0>, |phi_+>|0>, |g1g2>|1>."""
    plus, minus = reference_states(cfg)
    gg1 = _vacuum_ground_ket(cfg)
    return minus.overlap(state), plus.overlap(state), gg1.overlap(state)


def _analytic_tag(cfg: SimConfig) -> str | None:
    if cfg.n_pairs == 1 and isinstance(cfg.initial, str) and cfg.initial in INITIAL_TAGS:
        return cfg.initial
    if cfg.n_pairs == 1 and isinstance(cfg.initial, str):
        conf = initial_configuration(cfg)
        if conf.bits == ("e", "g") and conf.photon == 0:
            return "excited-atom"
        if conf.bits == ("g", "g") and conf.photon == 1:
            return "photon"
    return None


def run_trace(cfg: SimConfig, sector: bool = False) -> Trace:
    """Evolve the configured initial state over ``cfg.times``.

    With ``sector=True`` the Hamiltonian is diagonalized only inside the
    excitation sector of the initial state (it must lie in a single sector).
    """
    H = build_hamiltonian(cfg)
    N_op = excitation_operator(cfg)
    s0 = initial_state(cfg)
    plus, minus = reference_states(cfg)
    tag = _analytic_tag(cfg)

    if sector:
        n0 = float(np.vdot(s0.amplitudes, N_op.matrix @ s0.amplitudes).real)
        idx = sector_indices(N_op, round(n0))
        if abs(np.linalg.norm(s0.amplitudes[idx]) - 1.0) > ALGEBRA_TOL:
            raise ValueError("initial state spans several excitation sectors")
        sub = Propagator(H.matrix[np.ix_(idx, idx)])
        psi_sub = s0.amplitudes[idx]

        def amps_at(t):
            out = np.zeros(s0.dim, dtype=complex)
            out[idx] = sub.amplitudes(psi_sub, t)
            return out
    else:
        prop = Propagator(H)

        def amps_at(t):
            return prop.amplitudes(s0.amplitudes, t)

    trace = Trace(cfg)
    for t in cfg.times:
        amps = amps_at(float(t))
        nrm = float(np.linalg.norm(amps))
        st = StateVector(cfg.factors, amps / nrm)
        rec = TraceRecord(
            t=float(t),
            state=st,
            p_plus=abs(plus.overlap(st)) ** 2,
            p_minus=abs(minus.overlap(st)) ** 2,
            p_ph=photon_probability(cfg, st.amplitudes),
            norm=nrm,
            n_expect=float(np.vdot(amps, N_op.matrix @ amps).real),
        )
        if tag is not None:
            an = tuple(complex(x) for x in analytic_two_plus_one(cfg, tag, float(t)))
            num = numeric_coefficients(cfg, st)
            rec.analytic = an
            rec.deviation = max(abs(x - y) for x, y in zip(an, num))
        trace.records.append(rec)
    return trace


@dataclass
class PhaseOverlapScan:
    times: np.ndarray
    subspace: np.ndarray  # probability in half-excited atoms (x) vacuum
    per_state: np.ndarray  # shape (len(times), N)

    @property
    def max_subspace(self) -> float:
        return float(self.subspace.max())

    @property
    def argmax_time(self) -> float:
        return float(self.times[int(np.argmax(self.subspace))])

    def max_per_state(self) -> np.ndarray:
        return self.per_state.max(axis=0)

    def to_json(self) -> dict:
        return {
            "max_subspace": self.max_subspace,
            "t_at_max": self.argmax_time,
            "max_per_phase_state": [float(x) for x in self.max_per_state()],
            "times": [float(t) for t in self.times],
            "subspace": [float(x) for x in self.subspace],
        }


def phase_overlap_scan(cfg: SimConfig) -> PhaseOverlapScan:
    if cfg.n_pairs not in (1, 2):
        raise ValueError("phase overlap scan supports n_pairs 1 and 2")
    basis = embed_phase_states(cfg.n_pairs, 0.0, photon_cutoff=cfg.fock_cutoff)
    configs = half_excited_basis(cfg.n_pairs)
    proj_idx = [
        embed_configurations([c], [1.0], photon_cutoff=cfg.fock_cutoff).amplitudes.argmax() for c in configs
    ]
    trace = run_trace(cfg)
    sub = []
    per = []
    for r in trace.records:
        a = r.state.amplitudes
        sub.append(float(np.sum(np.abs(a[proj_idx]) ** 2)))
        per.append([abs(b.overlap(r.state)) ** 2 for b in basis.states])
    return PhaseOverlapScan(trace.times, np.array(sub), np.array(per))
