"""Nonunitary time evolution of Slater determinants with per-step QR.

The state is an L x N matrix of single-particle orbitals.  One step multiplies
the orbitals by the fixed step matrix exp(-i H dt) and re-orthonormalizes the
columns by a QR factorization, which both normalizes the many-body state and
keeps the numerics stable against the exponential amplitude growth of
nonreciprocal evolution.  The two-point correlation matrix of the state is
C = (Q Q^dag)^T, a Hermitian projector of rank N.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .entanglement import gaussian_smooth, half_chain_entropy
from .model import Hamiltonian, ModelParams, as_matrix, build_hamiltonian
from .spectral import BiorthogonalError, biorthogonal_eigendecomposition

RANK_TOL = 1e-300


class PropagatorError(RuntimeError):
    pass


class RankDeficiencyError(RuntimeError):
    pass


class TrajectoryError(RuntimeError):
    pass


@dataclass(frozen=True)
class SlaterState:
    """Orthonormal orbital columns (L x N) and the current time."""

    orbitals: np.ndarray
    time: float = 0.0

    @property
    def length(self) -> int:
        return self.orbitals.shape[0]

    @property
    def n_particles(self) -> int:
        return self.orbitals.shape[1]


def init_z2_state(length: int) -> SlaterState:
    """Half-filled alternating product state occupying sites 2, 4, ..., L."""
    if length % 2 != 0 or length <= 0:
        raise ValueError(f"alternating state needs an even positive length, got {length}")
    U = np.zeros((length, length // 2), dtype=complex)
    U[np.arange(1, length, 2), np.arange(length // 2)] = 1.0
    return SlaterState(orbitals=U, time=0.0)


@dataclass(frozen=True)
class Propagator:
    """Fixed one-step evolution matrix exp(-i H dt)."""

    step_matrix: np.ndarray
    dt: float
    method: str = "eig"


def make_propagator(H, dt: float, method: str = "eig") -> Propagator:
    """Build exp(-i H dt) once, for repeated application.

    method="eig" assembles the exponential from the biorthogonal mode
    expansion (O(L^3) once, exact to eigensolver accuracy) and raises
    PropagatorError when the left/right overlaps fall below 1e-12; in that
    near-defective regime use method="expm" (scaling-and-squaring), which is
    slower per call but unconditional.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    M = as_matrix(H)
    if method == "expm":
        return Propagator(scipy.linalg.expm(-1j * dt * M), dt, "expm")
    if method != "eig":
        raise ValueError(f"unknown propagator method {method!r}")
    try:
        spec = biorthogonal_eigendecomposition(M)
    except BiorthogonalError as err:
        raise PropagatorError(
            f"biorthogonal propagator failed: {err}; rebuild with method='expm'"
        ) from err
    return Propagator(spec.evolution_operator(dt), dt, "eig")


def step_qr(state: SlaterState, prop: Propagator) -> SlaterState:
    """Advance one step and re-orthonormalize.

    The orbitals become the Q factor of step_matrix @ orbitals, with column
    phases fixed so the R diagonal is real non-negative (unique Q, so runs are
    platform-deterministic).  A vanishing R diagonal entry means the propagated
    orbitals lost rank, i.e. the nonunitary growth over one dt step exceeded
    the representable range.
    """
    if prop.step_matrix.shape[0] != state.length:
        raise ValueError(
            f"propagator size {prop.step_matrix.shape[0]} != state size {state.length}"
        )
    Q, R = np.linalg.qr(prop.step_matrix @ state.orbitals)
    d = np.diagonal(R)
    small = np.abs(d) < RANK_TOL
    if np.any(small):
        raise RankDeficiencyError(
            f"propagated orbitals are rank deficient (|R_kk| < {RANK_TOL:g} at "
            f"column {int(np.argmax(small))}); reduce dt"
        )
    phase = d / np.abs(d)
    return SlaterState(orbitals=Q * phase, time=state.time + prop.dt)


def correlation_matrix(state: SlaterState) -> np.ndarray:
    """Two-point function C_ij = <c_i^dag c_j> = [(Q Q^dag)^T]_ij of the state."""
    Q = state.orbitals
    return (Q @ Q.conj().T).T


def density_profile(C: np.ndarray) -> np.ndarray:
    """Site occupations: the real diagonal of C, clamped to [0, 1]."""
    return np.clip(np.real(np.diagonal(C)), 0.0, 1.0)


def validate_correlation(C: np.ndarray, n_particles: int, atol: float = 1e-8) -> dict:
    """Residuals of the correlation-matrix invariants (pure Slater state).

    Returns a dict with hermiticity, idempotency, trace and spectrum-range
    residuals plus an 'ok' flag comparing each against atol.
    """
    C = np.asarray(C)
    herm = float(np.max(np.abs(C - C.conj().T)))
    idem = float(np.max(np.abs(C @ C - C)))
    trace = float(abs(np.trace(C).real - n_particles))
    lam = np.linalg.eigvalsh(0.5 * (C + C.conj().T))
    spectrum = float(max(0.0, -lam.min(), lam.max() - 1.0))
    residuals = {
        "hermiticity": herm,
        "idempotency": idem,
        "trace": trace,
        "spectrum_range": spectrum,
    }
    residuals["ok"] = all(v <= atol for v in residuals.values())
    return residuals


@dataclass(frozen=True)
class Schedule:
    """Time-stepping plan: step size, budget, sampling and plateau stopping."""

    dt: float = 10.0
    steps: int = 10000
    sample_stride: int = 50
    early_stop: bool = False
    plateau_tol: float = 1e-4
    plateau_window: int = 100
    smooth_sigma: float = 20.0

    def __post_init__(self):
        if self.dt <= 0 or self.steps < 1 or self.sample_stride < 1:
            raise ValueError("schedule needs dt > 0, steps >= 1, sample_stride >= 1")


@dataclass
class TrajectoryRecord:
    """One evolved trajectory: entropy series, sampled densities, final state."""

    params: ModelParams
    dt: float
    steps: int
    ee_series: np.ndarray
    density_steps: np.ndarray
    density_series: np.ndarray
    final_correlation: np.ndarray
    converged: bool = False
    propagator_method: str = "eig"
    ee_label: str = field(default="half-chain entropy (nats)", repr=False)


def _tail_plateau(ee: list, window: int, sigma: float, tol: float) -> bool:
    """True when the smoothed series varies less than tol over the last window.

    Only points whose kernel support lies fully inside the series are used, so
    the window ends one kernel half-width before the running end; one-sided
    smoothing at the live edge would leak the raw oscillation back in.
    """
    pad = int(np.ceil(4.0 * sigma))
    need = window + 2 * pad
    if len(ee) < need:
        return False
    smooth = gaussian_smooth(np.asarray(ee[-need:]), sigma)
    core = smooth[pad:-pad] if pad else smooth
    return float(core.max() - core.min()) < tol


def run_trajectory(
    params: ModelParams,
    schedule: Schedule,
    on_sample: Optional[Callable[[int, SlaterState, np.ndarray], None]] = None,
) -> TrajectoryRecord:
    """Evolve the alternating state under the chain Hamiltonian.

    Records the half-chain entropy every step (including t=0) and the density
    profile every sample_stride steps.  With early_stop enabled the run ends
    once the smoothed entropy stays within plateau_tol over plateau_window
    consecutive steps.  on_sample(step, state, C), if given, is called at every
    density sample for additional observables.
    """
    H = build_hamiltonian(params)
    try:
        prop = make_propagator(H, schedule.dt, method="eig")
    except PropagatorError:
        prop = make_propagator(H, schedule.dt, method="expm")

    state = init_z2_state(params.length)
    C = correlation_matrix(state)
    ee = [half_chain_entropy(C)]
    density_steps = [0]
    densities = [density_profile(C)]
    if on_sample is not None:
        on_sample(0, state, C)

    converged = False
    n_done = 0
    for n in range(1, schedule.steps + 1):
        try:
            state = step_qr(state, prop)
        except RankDeficiencyError as err:
            raise TrajectoryError(f"step {n}: {err}") from err
        C = correlation_matrix(state)
        ee.append(half_chain_entropy(C))
        n_done = n
        if n % schedule.sample_stride == 0:
            density_steps.append(n)
            densities.append(density_profile(C))
            if on_sample is not None:
                on_sample(n, state, C)
        if (
            schedule.early_stop
            and n % schedule.plateau_window == 0
            and n >= 2 * schedule.plateau_window
        ):
            if _tail_plateau(ee, schedule.plateau_window, schedule.smooth_sigma,
                             schedule.plateau_tol):
                converged = True
                break

    if not converged and n_done >= 2 * schedule.plateau_window:
        converged = _tail_plateau(ee, schedule.plateau_window, schedule.smooth_sigma,
                                  schedule.plateau_tol)

    if density_steps[-1] != n_done:
        density_steps.append(n_done)
        densities.append(density_profile(C))
        if on_sample is not None:
            on_sample(n_done, state, C)

    return TrajectoryRecord(
        params=params,
        dt=schedule.dt,
        steps=n_done,
        ee_series=np.asarray(ee),
        density_steps=np.asarray(density_steps, dtype=int),
        density_series=np.asarray(densities),
        final_correlation=C,
        converged=converged,
        propagator_method=prop.method,
    )
