"""Multi-qubit system + random spin bath under ideal-pulse nested UDD.

The model couples every non-identity system Pauli string uniformly (in
units of the interaction strength J) to its own random bath operator, plus
a weak pure-bath term on the identity string.  Bath operators are sums of
bath-spin Pauli strings with uniform [0,1) coefficients drawn from named,
per-(realization, system-label, bath-string) seed streams, so a realization
is reproducible regardless of how a sweep is parallelized.

Evolution between instantaneous pulses is exact through the cached
eigendecomposition of the (time-independent) Hamiltonian; pulses enter as
eigenbasis-conjugated operators so each pulse boundary costs one dense
matrix product.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .errortypes import (
    ErrorDecomposition,
    Moos,
    embed_system,
    partition,
    pauli_string,
    validate_moos,
)
from .mpcore import (
    CMatrix,
    frobenius_norm,
    hermitian_eig,
    identity,
    kron,
    matmul,
    partial_trace_system,
    real,
    singular_values,
)
from .schedule import NuddSpec, build_timeline

_PAULI_SYMBOLS = "ixyz"

MOOS_PRESETS = {
    "single-qubit-4layer": ("iz", "ix", "zi", "xi"),
    "two-body-4layer": ("zz", "ix", "zi", "xi"),
}


@dataclass(frozen=True)
class BathSpec:
    """Random-bath model parameters.

    J and J00 are physical strengths (defaults 1 MHz / 1 kHz); only their
    ratio enters the dimensionless simulation.  seed is the master seed of
    the coefficient streams.
    """

    seed: int
    n_bath_spins: int = 4
    n_system_qubits: int = 2
    J: float = 1.0e6
    J00: float = 1.0e3
    normalize_bath: bool = True

    def __post_init__(self):
        # J == 0 is allowed as the degenerate pure-bath configuration
        if self.J < 0:
            raise ValueError("J must be nonnegative")
        if self.J00 < 0:
            raise ValueError("J00 must be nonnegative")
        if self.n_bath_spins < 1 or self.n_system_qubits < 1:
            raise ValueError("need at least one bath spin and one system qubit")

    @property
    def unit(self) -> float:
        """Strength in which the dimensionless Hamiltonian is expressed."""
        if self.J > 0:
            return self.J
        return self.J00 if self.J00 > 0 else 1.0

    @property
    def dS(self) -> int:
        return 2 ** self.n_system_qubits

    @property
    def dB(self) -> int:
        return 2 ** self.n_bath_spins


def system_labels(n_system_qubits: int) -> list[str]:
    """All system Pauli strings in fixed enumeration order ('ii' first)."""
    return ["".join(p) for p in product(_PAULI_SYMBOLS, repeat=n_system_qubits)]


def bath_coefficients(bath: BathSpec, realization: int, pair_index: int) -> list[float]:
    """Uniform [0,1) coefficients for one bath operator, one per bath string.

    Each coefficient comes from an independent stream keyed by
    (realization, system-label index, bath-string index), so values do not
    depend on evaluation order anywhere else in the program.
    """
    n_strings = 4 ** bath.n_bath_spins
    out = []
    for s in range(n_strings):
        ss = np.random.SeedSequence(
            entropy=bath.seed, spawn_key=(realization, pair_index, s)
        )
        out.append(float(np.random.default_rng(ss).random()))
    return out


def build_bath_operator(
    bath: BathSpec, realization: int, pair_index: int
) -> CMatrix:
    """Random Hermitian bath operator for one system label.

    Sum over all bath-spin Pauli strings with the stream coefficients;
    rescaled to unit spectral norm when the spec asks for normalization.
    """
    coeffs = bath_coefficients(bath, realization, pair_index)
    labels = ["".join(p) for p in product(_PAULI_SYMBOLS, repeat=bath.n_bath_spins)]
    dB = bath.dB
    acc = np.full((dB, dB), mpc(0), dtype=object)
    for c, lab in zip(coeffs, labels):
        acc = acc + mpfr(c) * pauli_string(lab).a
    B = CMatrix(acc, hermitian=True)
    if bath.normalize_bath:
        lam, _ = hermitian_eig(B)
        spectral = max(abs(lam[0]), abs(lam[-1]))
        if spectral > 0:
            B = CMatrix((real(1) / spectral) * B.a, hermitian=True)
    return B


class ModelHamiltonian:
    """Assembled Hamiltonian (in units of J) with a cached eigendecomposition."""

    def __init__(self, H: CMatrix, dS: int, dB: int,
                 parts: ErrorDecomposition | None = None):
        self.H = H
        self.dS = dS
        self.dB = dB
        self.parts = parts
        self._eig = None

    @property
    def dim(self) -> int:
        return self.dS * self.dB

    @property
    def eig(self):
        if self._eig is None:
            self._eig = hermitian_eig(self.H)
        return self._eig


def assemble_hamiltonian(
    bath: BathSpec, realization: int = 0, moos: Moos | None = None
) -> ModelHamiltonian:
    """Uniform-coupling Hamiltonian: every non-identity system string at
    strength 1 (units of J) times its bath operator, plus (J00/J) times the
    pure-bath term.  Partitioned against the MOOS when one is supplied.
    """
    labels = system_labels(bath.n_system_qubits)
    dS, dB = bath.dS, bath.dB
    n = dS * dB
    acc = np.full((n, n), mpc(0), dtype=object)
    inter = mpfr(bath.J) / mpfr(bath.unit)
    pure = mpfr(bath.J00) / mpfr(bath.unit)
    for pair_index, lab in enumerate(labels):
        B = build_bath_operator(bath, realization, pair_index)
        term = kron(pauli_string(lab), B)
        if set(lab) == {"i"}:
            acc = acc + pure * term.a
        else:
            acc = acc + inter * term.a
    H = CMatrix(acc, hermitian=True)
    parts = partition(H, moos) if moos is not None else None
    return ModelHamiltonian(H, dS, dB, parts)


def preset_moos(name: str, dB: int) -> Moos:
    """One of the named 4-layer control sets, embedded over a dB bath."""
    try:
        strings = MOOS_PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown MOOS preset {name!r}; known: {sorted(MOOS_PRESETS)}"
        ) from None
    return moos_from_strings(strings, dB)


def moos_from_strings(strings, dB: int) -> Moos:
    """Validated MOOS from system Pauli strings, bath factor attached."""
    ops = [embed_system(pauli_string(s.lower()), dB) for s in strings]
    return validate_moos(ops)


class EvolutionPlan:
    """Reusable propagation machinery for one (model, schedule, MOOS) triple.

    Precomputes the eigenbasis form of every distinct pulse product so a
    single sweep point costs one diagonal phase per interval and one dense
    product per pulse boundary.
    """

    def __init__(self, model: ModelHamiltonian, spec: NuddSpec, moos: Moos):
        if moos.dim != model.dim:
            raise ValueError(
                f"MOOS dimension {moos.dim} != model dimension {model.dim}"
            )
        if moos.ell != spec.ell:
            raise ValueError(
                f"MOOS has {moos.ell} operators but the schedule has "
                f"{spec.ell} layers"
            )
        self.model = model
        self.spec = spec
        self.moos = moos
        self.timeline = build_timeline(spec)
        lam, V = model.eig
        self.lam = lam
        self.V = V
        self.Vd = V.dagger()
        self._q: dict[tuple[int, ...], np.ndarray] = {}
        for fired in sorted(set(self.timeline.fired)):
            if not fired:
                continue
            P = identity(model.dim)
            for layer in sorted(fired):
                P = matmul(moos.operators[layer - 1], P)
            Q = matmul(self.Vd, matmul(P, V))
            self._q[fired] = Q.a

    def _phases(self, T: mpfr, delta: mpfr) -> np.ndarray:
        out = np.empty(len(self.lam), dtype=object)
        for j, lam in enumerate(self.lam):
            s, c = gmpy2.sin_cos(lam * T * delta)
            out[j] = mpc(c, -s)
        return out

    def propagate(self, T) -> CMatrix:
        """U(T) for the full schedule at total duration T (units of 1/J)."""
        T = real(T)
        tl = self.timeline
        M = None
        elapsed = real(0)
        for k, (_, length) in enumerate(tl.intervals):
            elapsed = elapsed + length
            fired = tl.fired[k]
            if not fired:
                continue
            ph = self._phases(T, elapsed)
            elapsed = real(0)
            Q = self._q[fired]
            if M is None:
                M = Q * ph[None, :]
            else:
                M = Q @ (ph[:, None] * M)
        if M is None:
            ph = self._phases(T, elapsed)
            n = self.model.dim
            M = np.full((n, n), mpc(0), dtype=object)
            for j in range(n):
                M[j, j] = ph[j]
        elif elapsed > 0:
            ph = self._phases(T, elapsed)
            M = ph[:, None] * M
        U = self.V.a @ M @ self.Vd.a
        return CMatrix(U)


def evolve(model: ModelHamiltonian, spec: NuddSpec, moos: Moos, T) -> CMatrix:
    """One-shot propagation; build an EvolutionPlan directly when sweeping."""
    return EvolutionPlan(model, spec, moos).propagate(T)


def distance_D(u: CMatrix, dS: int, dB: int) -> mpfr:
    """Normalized Frobenius distance of u from the nearest pure-bath factor.

    The optimal bath factor is the least-squares projection
    Tr_S(u) / dS, so no explicit minimization is needed.
    """
    phi = partial_trace_system(u, dS, dB)
    phi = CMatrix((real(1) / dS) * phi.a)
    resid = u - kron(identity(dS), phi)
    return frobenius_norm(resid) / gmpy2.sqrt(mpfr(dS * dB))


def error_measure_E(u: CMatrix, part: CMatrix, dS: int, dB: int) -> mpfr:
    """Bath-side residual of one error type: nuclear norm of Tr_S(u part)."""
    n = dS * dB
    if u.rows != n or part.rows != n or u.cols != n or part.cols != n:
        raise ValueError(f"operands must be {n}x{n}")
    acc = np.full((dB, dB), mpc(0), dtype=object)
    for s in range(dS):
        acc = acc + u.a[s * dB:(s + 1) * dB, :] @ part.a[:, s * dB:(s + 1) * dB]
    sv = singular_values(CMatrix(acc))
    out = mpfr(0)
    for v in sv:
        out += v
    return out


@dataclass
class RunResult:
    """One sweep point: the propagator and both performance measures."""

    tau: mpfr
    T: mpfr
    U: CMatrix
    D: mpfr
    E: dict
