"""Quantum dynamics in the truncated momentum eigenbasis.

The state lives on N momentum eigenstates |n>, n = -N/2 ... N/2-1, with
rho|n> = n*hbar_k|n> and n treated as periodic.  One kick cycle is the
ordered product of segment propagators exp(-i*duration*H_seg/hbar_k)
(H_dark between pulses, H_light during them), each built by Hermitian
eigendecomposition so the factors are unitary to eigensolver accuracy.
Spontaneous emission enters as a per-cycle mixing channel that adds the
density matrix to two versions of itself shifted by one ladder unit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .model import ParameterError, PulseTrain, SimParams

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10
UNITARITY_TOL = 1e-10


def momentum_ladder(N: int) -> np.ndarray:
    """Ladder indices n = -N/2 ... N/2-1."""
    return np.arange(-N // 2, N // 2)


@dataclass
class DensityMatrix:
    """N x N Hermitian, unit-trace operator in the momentum eigenbasis."""

    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        n = self.matrix.shape[0]
        if self.matrix.shape != (n, n) or n % 2:
            raise ParameterError(f"density matrix must be square with even size, got {self.matrix.shape}")

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def validate(self, check_positivity: bool = True) -> None:
        m = self.matrix
        herm = np.abs(m - m.conj().T).max()
        if herm > HERMITICITY_TOL:
            raise ParameterError(f"not Hermitian: max |rho - rho^dag| = {herm:.3e}")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL * 10:
            raise ParameterError(f"trace = {tr}, expected 1")
        if check_positivity:
            lo = np.linalg.eigvalsh(m).min()
            if lo < -POSITIVITY_TOL:
                raise ParameterError(f"negative eigenvalue {lo:.3e}")

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    @classmethod
    def pure(cls, N: int, n: int) -> "DensityMatrix":
        """Momentum eigenstate |n><n|."""
        i = int(n) + N // 2
        m = np.zeros((N, N), dtype=complex)
        m[i, i] = 1.0
        return cls(m)

    @classmethod
    def from_state(cls, psi: np.ndarray) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, N: int) -> "DensityMatrix":
        return cls(np.eye(N, dtype=complex) / N)

    @classmethod
    def thermal(cls, N: int, hbar_k: float, sigma: float) -> "DensityMatrix":
        """Incoherent Gaussian mixture of momentum eigenstates, width sigma in rho."""
        n = momentum_ladder(N)
        if sigma == 0.0:
            return cls.pure(N, 0)
        w = np.exp(-((n * hbar_k) ** 2) / (2.0 * sigma**2))
        return cls(np.diag(w / w.sum()).astype(complex))


@dataclass
class FloquetOperator:
    """Single-cycle unitary with the parameters it was built from."""

    matrix: np.ndarray
    kick_strength: float
    scaled_planck: float
    segments: tuple = ()

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def unitarity_defect(self) -> float:
        u = self.matrix
        return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())


def build_hamiltonians(N: int, k: float, hbar_k: float) -> tuple[np.ndarray, np.ndarray]:
    """(H_dark, H_light) in the periodic momentum ladder basis.

    H_dark = diag(n^2 hbar_k^2 / 2); H_light adds -k/2 on the first
    off-diagonals and on the periodic wraparound corners.
    """
    if N <= 0 or N % 2:
        raise ParameterError(f"N must be positive and even, got {N}")
    n = momentum_ladder(N)
    h_dark = np.diag(0.5 * n.astype(float) ** 2 * hbar_k**2)
    h_light = h_dark.copy()
    idx = np.arange(N - 1)
    h_light[idx, idx + 1] -= 0.5 * k
    h_light[idx + 1, idx] -= 0.5 * k
    h_light[0, N - 1] -= 0.5 * k
    h_light[N - 1, 0] -= 0.5 * k
    return h_dark, h_light


def _expm_hermitian(h: np.ndarray, scale: float) -> np.ndarray:
    """exp(1j * scale * H) for Hermitian H via eigendecomposition.

    Eigenphases can reach ~1e4 radians, where a float64 product alone loses
    a digit; forming scale * vals in extended precision and reducing mod
    2*pi keeps the phases accurate to ~1e-15 absolute.
    """
    vals, vecs = np.linalg.eigh(h)
    two_pi = 2.0 * np.arccos(np.longdouble(-1.0))
    phase = np.mod(np.longdouble(scale) * vals.astype(np.longdouble), two_pi).astype(float)
    return (vecs * np.exp(1j * phase)) @ vecs.conj().T


def build_floquet(N: int, k: float, hbar_k: float, train: PulseTrain) -> FloquetOperator:
    """Single-kick evolution operator, segment propagators applied in schedule order."""
    h_dark, h_light = build_hamiltonians(N, k, hbar_k)
    exps = {}
    u = np.eye(N, dtype=complex)
    for dur, driven in train.segments:
        key = (dur, driven)
        if key not in exps:
            h = h_light if driven else h_dark
            exps[key] = _expm_hermitian(h, -float(dur) / hbar_k)
        u = exps[key] @ u
    return FloquetOperator(u, k, hbar_k, train.segments)


def apply_decoherence(rho: DensityMatrix, eta: float) -> DensityMatrix:
    """Per-cycle spontaneous-emission channel.

    rho'[m, n] = eta/2 * (rho[m+1, n+1] + rho[m-1, n-1]) + (1 - eta) * rho[m, n],
    index shifts wrapping periodically.  A convex mixture of the identity and
    two cyclic-shift conjugations: trace-preserving and completely positive.
    """
    if not 0.0 <= eta <= 1.0:
        raise ParameterError(f"eta must lie in [0, 1], got {eta}")
    m = rho.matrix
    up = np.roll(m, (-1, -1), axis=(0, 1))    # rho[m+1, n+1]
    down = np.roll(m, (1, 1), axis=(0, 1))    # rho[m-1, n-1]
    return DensityMatrix(0.5 * eta * (up + down) + (1.0 - eta) * m)


def momentum_distribution(rho: DensityMatrix) -> np.ndarray:
    """Populations diag(rho), clipped of numerical imaginary residue."""
    return np.real(np.diag(rho.matrix)).copy()


@dataclass
class EvolutionRecord:
    """Per-kick momentum populations plus full-state checkpoints."""

    kicks: np.ndarray                 # (n_kicks+1,)
    populations: np.ndarray           # (n_kicks+1, N)
    checkpoints: dict[int, DensityMatrix] = field(default_factory=dict)
    edge_population_max: float = 0.0  # largest population seen on the ladder edges


def evolve_density(
    rho0: DensityMatrix,
    floquet: FloquetOperator,
    eta: float,
    n_kicks: int,
    checkpoint_kicks: tuple[int, ...] = (),
) -> EvolutionRecord:
    """Apply n_kicks of (unitary cycle, then decoherence channel).

    Records diag(rho) every kick and the full density matrix at the requested
    checkpoints.  Tracks the largest population reaching the ladder edges,
    where the periodic wrap is unphysical.
    """
    u = floquet.matrix
    ud = u.conj().T
    rho = DensityMatrix(rho0.matrix.copy())
    pops = [momentum_distribution(rho)]
    kicks = [0]
    checks = {}
    if 0 in checkpoint_kicks:
        checks[0] = DensityMatrix(rho.matrix.copy())
    edge_max = float(max(pops[0][0], pops[0][-1]))
    for kick in range(1, n_kicks + 1):
        rho = DensityMatrix(u @ rho.matrix @ ud)
        if eta > 0.0:
            rho = apply_decoherence(rho, eta)
        p = momentum_distribution(rho)
        pops.append(p)
        kicks.append(kick)
        edge_max = max(edge_max, float(p[0]), float(p[-1]))
        if kick in checkpoint_kicks:
            checks[kick] = DensityMatrix(rho.matrix.copy())
    return EvolutionRecord(np.array(kicks), np.array(pops), checks, edge_max)


def floquet_modes(floquet: FloquetOperator) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition (eigenvalues, eigenvectors) of the cycle unitary.

    Uses a complex Schur decomposition, which for a unitary (normal) matrix
    yields an orthonormal eigenbasis: U = V diag(lam) V^dag.  Coherent n-kick
    evolution is then V lam^n V^dag.
    """
    u = floquet.matrix
    t, v = scipy.linalg.schur(u, output="complex")
    lam = np.diag(t).copy()
    if np.abs(np.abs(lam) - 1.0).max() > 1e-8:
        raise ParameterError("eigenvalues deviate from the unit circle; operator not unitary")
    return lam, v


def evolve_state_floquet(psi0: np.ndarray, floquet: FloquetOperator, n_kicks: int) -> np.ndarray:
    """n-kick coherent evolution of a pure state via the Floquet modes."""
    lam, v = floquet_modes(floquet)
    return v @ (lam**n_kicks * (v.conj().T @ psi0))
