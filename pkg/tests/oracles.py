"""Independent reference implementations used to pin expected values.

These deliberately avoid the code paths they check: entropies come from
brute-force many-body linear algebra in the full 2^L Fock space, and evolution
comes from a dense matrix exponential applied in one shot.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg


def creation_operators(length: int) -> list[np.ndarray]:
    """Dense Jordan-Wigner creation operators; site 1 is the leftmost factor."""
    cdag = np.array([[0.0, 0.0], [1.0, 0.0]])
    zed = np.diag([1.0, -1.0])
    eye = np.eye(2)
    ops = []
    for site in range(length):
        op = np.array([[1.0]])
        for k in range(length):
            if k < site:
                op = np.kron(op, zed)
            elif k == site:
                op = np.kron(op, cdag)
            else:
                op = np.kron(op, eye)
        ops.append(op)
    return ops


def fock_state_from_orbitals(orbitals: np.ndarray) -> np.ndarray:
    """Many-body vector of the Slater determinant with the given orbital columns."""
    L, N = orbitals.shape
    cdag = creation_operators(L)
    psi = np.zeros(2**L, dtype=complex)
    psi[0] = 1.0
    for k in range(N):
        op = sum(orbitals[i, k] * cdag[i] for i in range(L))
        psi = op @ psi
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("orbitals produced a null state")
    return psi / norm


def fock_entropy(psi: np.ndarray, n_left: int, length: int) -> float:
    """Von Neumann entropy (nats) of sites 1..n_left from the full state vector."""
    M = psi.reshape(2**n_left, 2 ** (length - n_left))
    sv = np.linalg.svd(M, compute_uv=False)
    p = np.clip(sv**2, 1e-300, None)
    p = p[p > 1e-30]
    return float(-np.sum(p * np.log(p)))


def fock_correlation(psi: np.ndarray, length: int) -> np.ndarray:
    """C_ij = <psi| c_i^dag c_j |psi> computed with explicit operators."""
    cdag = creation_operators(length)
    C = np.empty((length, length), dtype=complex)
    for i in range(length):
        for j in range(length):
            C[i, j] = psi.conj() @ (cdag[i] @ cdag[j].conj().T @ psi)
    return C


def exact_evolution_ee(H: np.ndarray, orbitals0: np.ndarray, dt: float,
                       steps: int) -> np.ndarray:
    """Half-chain entropy series from one-shot exp(-i H t) evolution.

    No per-step QR: the orbital matrix is propagated by the full exponential
    and orthonormalized once, at readout, for each time.
    """
    L = H.shape[0]
    ees = []
    for n in range(steps + 1):
        M = scipy.linalg.expm(-1j * H * (dt * n)) @ orbitals0
        Q, _ = np.linalg.qr(M)
        C = (Q @ Q.conj().T).T
        sub = C[: L // 2, : L // 2]
        lam = np.clip(np.linalg.eigvalsh(0.5 * (sub + sub.conj().T)), 1e-12, 1 - 1e-12)
        ees.append(float(-np.sum(lam * np.log(lam) + (1 - lam) * np.log(1 - lam))))
    return np.asarray(ees)


def random_slater_orbitals(length: int, n_particles: int,
                           rng: np.random.Generator) -> np.ndarray:
    """Random orthonormal L x N orbital matrix (Haar via QR of a Ginibre draw)."""
    X = rng.normal(size=(length, n_particles)) + 1j * rng.normal(size=(length, n_particles))
    Q, _ = np.linalg.qr(X)
    return Q
