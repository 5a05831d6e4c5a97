"""Small dense density-matrix toolkit for the von Neumann side of the erasure story."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .entropy import EntropyValue, shannon_entropy

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
NEG_EIG_TOL = 1e-10
UNITARY_TOL = 1e-12
EIG_CLAMP = 1e-12


class StateError(ValueError):
    """Matrix is not a valid density matrix."""


class ShapeError(ValueError):
    pass


class UnitaryError(ValueError):
    pass


class DemoRestrictedError(ValueError):
    """Controlled-unitary demo accepts classical (diagonal) inputs only."""


class DensityMatrix:
    __slots__ = ("data",)

    def __init__(self, data, check: bool = True):
        data = np.array(data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ShapeError(f"density matrix must be square, got shape {data.shape}")
        if check:
            if np.max(np.abs(data - data.conj().T), initial=0.0) > HERMITIAN_TOL:
                raise StateError("density matrix is not Hermitian")
            tr = np.trace(data).real
            if abs(tr - 1.0) > TRACE_TOL:
                raise StateError(f"density matrix has trace {tr!r}")
            lam = np.linalg.eigvalsh(data)
            if lam[0] < -NEG_EIG_TOL:
                raise StateError(f"density matrix has negative eigenvalue {lam[0]!r}")
        data.setflags(write=False)
        self.data = data

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"

    @classmethod
    def pure(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def basis(cls, k: int, d: int) -> "DensityMatrix":
        psi = np.zeros(d)
        psi[k] = 1.0
        return cls.pure(psi)

    @classmethod
    def diag(cls, p: Sequence[float]) -> "DensityMatrix":
        return cls(np.diag(np.asarray(p, dtype=float)))

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        return cls(np.eye(d) / d)


class UnitaryMatrix:
    __slots__ = ("data",)

    def __init__(self, data):
        data = np.array(data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ShapeError(f"unitary must be square, got shape {data.shape}")
        dev = np.max(np.abs(data.conj().T @ data - np.eye(data.shape[0])))
        if dev > UNITARY_TOL:
            raise UnitaryError(f"U^dagger U deviates from identity by {dev:.3e}")
        data.setflags(write=False)
        self.data = data

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __repr__(self):
        return f"UnitaryMatrix(dim={self.dim})"


def von_neumann_entropy(rho: DensityMatrix) -> EntropyValue:
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    lam = np.linalg.eigvalsh(rho.data)
    lam = lam[lam > EIG_CLAMP]
    return EntropyValue(float(-np.sum(lam * np.log(lam))) + 0.0)


def tensor(rho: DensityMatrix, sigma: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(np.kron(rho.data, sigma.data))


def partial_trace(rho: DensityMatrix, dims: tuple[int, int], trace_out: int) -> DensityMatrix:
    """Reduce a bipartite state on dims (dA, dB) by tracing out subsystem 0 or 1."""
    dA, dB = dims
    if rho.dim != dA * dB:
        raise ShapeError(f"state of dimension {rho.dim} does not factor as {dA} x {dB}")
    r = rho.data.reshape(dA, dB, dA, dB)
    if trace_out == 0:
        out = np.einsum("ijik->jk", r)
    elif trace_out == 1:
        out = np.einsum("ijkj->ik", r)
    else:
        raise ShapeError(f"trace_out must be 0 or 1, got {trace_out}")
    return DensityMatrix(out)


def evolve(rho: DensityMatrix, U: UnitaryMatrix) -> DensityMatrix:
    if rho.dim != U.dim:
        raise ShapeError(f"unitary of dimension {U.dim} cannot act on state of dimension {rho.dim}")
    u = U.data
    out = u @ rho.data @ u.conj().T
    # Restore exact Hermiticity lost to rounding.
    return DensityMatrix((out + out.conj().T) / 2)


def random_unitary(d: int, rng: np.random.Generator) -> UnitaryMatrix:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return UnitaryMatrix(q * ph)


def random_density_matrix(d: int, rng: np.random.Generator) -> DensityMatrix:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    m = m / np.trace(m).real
    return DensityMatrix((m + m.conj().T) / 2)


def swap_gate(d: int = 2) -> UnitaryMatrix:
    u = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            u[j * d + i, i * d + j] = 1.0
    return UnitaryMatrix(u)


def cnot(control: int = 0) -> UnitaryMatrix:
    """Two-qubit CNOT; ``control`` is the index (0 or 1) of the control qubit."""
    u = np.zeros((4, 4))
    for a in range(2):
        for b in range(2):
            bits = [a, b]
            if bits[control]:
                bits[1 - control] ^= 1
            u[bits[0] * 2 + bits[1], a * 2 + b] = 1.0
    return UnitaryMatrix(u)


# -- demos --------------------------------------------------------------------


@dataclass(frozen=True)
class DemoReport:
    name: str
    s_initial_nats: float
    s_system_final_nats: float
    s_env_final_nats: float
    delta_env_nats: float
    mutual_information_nats: float | None
    s_total_before_nats: float
    s_total_after_nats: float
    system_reset_error: float
    seed: int | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def _reset_error(rho: DensityMatrix) -> float:
    return float(np.max(np.abs(rho.data - DensityMatrix.basis(0, rho.dim).data)))


def swap_erasure_demo(rho_system: DensityMatrix, seed: int | None = None) -> DemoReport:
    """Erase a qubit by swapping it with a pure |0> environment qubit."""
    if rho_system.dim != 2:
        raise ShapeError("swap demo expects a qubit")
    env0 = DensityMatrix.basis(0, 2)
    joint = tensor(rho_system, env0)
    after = evolve(joint, swap_gate(2))
    sys_final = partial_trace(after, (2, 2), trace_out=1)
    env_final = partial_trace(after, (2, 2), trace_out=0)
    s_env_final = von_neumann_entropy(env_final).nats
    return DemoReport(
        name="swap_erasure",
        s_initial_nats=von_neumann_entropy(rho_system).nats,
        s_system_final_nats=von_neumann_entropy(sys_final).nats,
        s_env_final_nats=s_env_final,
        delta_env_nats=s_env_final - von_neumann_entropy(env0).nats,
        mutual_information_nats=None,
        s_total_before_nats=von_neumann_entropy(joint).nats,
        s_total_after_nats=von_neumann_entropy(after).nats,
        system_reset_error=_reset_error(sys_final),
        seed=seed,
    )


def controlled_unitary_demo(p, seed: int | None = None) -> DemoReport:
    """Reset a bit with a state-dependent unitary and show the auxiliary keeps the record.

    Stage 1 copies the system bit into a |0> auxiliary (CNOT, system controls).
    Stage 2 is the single joint unitary that flips the system back iff the
    auxiliary reads 1 (CNOT, auxiliary controls). The system always ends in
    |0>; the auxiliary ends holding the initial bit.
    """
    if isinstance(p, DensityMatrix):
        if p.dim != 2:
            raise ShapeError("controlled-unitary demo expects a qubit")
        off = np.abs(p.data - np.diag(np.diag(p.data)))
        if np.max(off) > HERMITIAN_TOL:
            raise DemoRestrictedError("system state has coherences; only classical mixtures are supported")
        p = np.diag(p.data).real
    p = np.asarray(p, dtype=float)
    if p.shape != (2,):
        raise DemoRestrictedError(f"need a probability pair, got {p.tolist()}")
    h_input = shannon_entropy(p)

    evolve_chain = (cnot(control=0), cnot(control=1))
    aux0 = DensityMatrix.basis(0, 2)

    def run(rho_sys: DensityMatrix) -> DensityMatrix:
        state = tensor(rho_sys, aux0)
        for gate in evolve_chain:
            state = evolve(state, gate)
        return state

    # Outcome statistics of the auxiliary conditioned on each prepared bit.
    joint_sa = np.zeros((2, 2))
    for s in range(2):
        if p[s] == 0:
            continue
        aux = partial_trace(run(DensityMatrix.basis(s, 2)), (2, 2), trace_out=0)
        joint_sa[s] = p[s] * np.clip(np.diag(aux.data).real, 0.0, None)
    p_aux = joint_sa.sum(axis=0)
    p_aux = p_aux / p_aux.sum()
    h_aux_given_s = sum(
        p[s] * shannon_entropy(joint_sa[s] / p[s]).nats for s in range(2) if p[s] > 0
    )
    mi = shannon_entropy(p_aux).nats - h_aux_given_s

    mixed = DensityMatrix.diag(p)
    before = tensor(mixed, aux0)
    after = run(mixed)
    sys_final = partial_trace(after, (2, 2), trace_out=1)
    aux_final = partial_trace(after, (2, 2), trace_out=0)
    s_aux_final = von_neumann_entropy(aux_final).nats
    return DemoReport(
        name="controlled_unitary",
        s_initial_nats=h_input.nats,
        s_system_final_nats=von_neumann_entropy(sys_final).nats,
        s_env_final_nats=s_aux_final,
        delta_env_nats=s_aux_final - von_neumann_entropy(aux0).nats,
        mutual_information_nats=float(mi) + 0.0,
        s_total_before_nats=von_neumann_entropy(before).nats,
        s_total_after_nats=von_neumann_entropy(after).nats,
        system_reset_error=_reset_error(sys_final),
        seed=seed,
    )


@dataclass(frozen=True)
class InvariantSuite:
    seed: int
    samples: int
    dims: tuple[int, ...]
    max_additivity_error: float
    max_unitary_invariance_error: float
    max_partial_trace_error: float

    def passed(self, tol: float = 1e-9, pt_tol: float = 1e-10) -> bool:
        return (
            self.max_additivity_error <= tol
            and self.max_unitary_invariance_error <= tol
            and self.max_partial_trace_error <= pt_tol
        )

    def as_dict(self) -> dict:
        return asdict(self)


def quantum_invariant_suite(seed: int = 0, samples: int = 100, dims: Sequence[int] = (2, 4, 8)) -> InvariantSuite:
    """Worst-case additivity, unitary-invariance and partial-trace errors over seeded samples."""
    rng = np.random.default_rng(seed)
    add_err = inv_err = pt_err = 0.0
    for d in dims:
        for _ in range(samples):
            rho = random_density_matrix(d, rng)
            sigma = random_density_matrix(d, rng)
            U = random_unitary(d, rng)
            s_rho = von_neumann_entropy(rho).nats
            s_sigma = von_neumann_entropy(sigma).nats
            joint = tensor(rho, sigma)
            add_err = max(add_err, abs(von_neumann_entropy(joint).nats - s_rho - s_sigma))
            inv_err = max(inv_err, abs(von_neumann_entropy(evolve(rho, U)).nats - s_rho))
            pt_err = max(
                pt_err,
                float(np.max(np.abs(partial_trace(joint, (d, d), 1).data - rho.data))),
                float(np.max(np.abs(partial_trace(joint, (d, d), 0).data - sigma.data))),
            )
    return InvariantSuite(seed, samples, tuple(dims), add_err, inv_err, pt_err)
