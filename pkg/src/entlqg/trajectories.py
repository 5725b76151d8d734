"""Monte-Carlo oracle for the conditional dynamics under measurement and feedback.

The conditional covariance evolves deterministically (its Riccati ODE is
integrated with RK4), while the conditional means follow a linear SDE driven
by the measurement noise and are integrated per trajectory with
Euler-Maruyama. In steady state the unconditional covariance decomposes as
the conditional covariance plus the ensemble second moment of the means,
which is what the statistics returned here verify.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import PlantModel, diffusion_matrix, drift_matrix, is_hurwitz
from .errors import StabilityError, TrajectoryDivergenceError
from .feedback import FeedbackGain
from .gaussian import CovarianceMatrix
from .unravelling import Unravelling, measurement_model, riccati_rhs, riccati_steady

_CHUNK = 128
_DIVERGENCE_LIMIT = 1e6
_DIVERGENCE_CHECK_EVERY = 200


@dataclass(frozen=True)
class SimConfig:
    """Simulation grid and ensemble settings.

    dt and t_final are in damping-time units. Each trajectory draws its
    Gaussian increments from an independent counter-based stream derived
    from the master seed, so results are bit-identical regardless of
    execution order or chunking.
    """

    dt: float = 1e-3
    t_final: float = 20.0
    n_traj: int = 1000
    seed: int = 0
    burn_in: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.dt <= 1e-2:
            raise ValueError(f"dt must be in (0, 1e-2], got {self.dt}")
        if self.t_final < self.dt:
            raise ValueError("t_final must be at least dt")
        if self.n_traj < 1:
            raise ValueError("n_traj must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if not 0.0 <= self.burn_in < 1.0:
            raise ValueError(f"burn_in must be in [0, 1), got {self.burn_in}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


@dataclass(frozen=True)
class TrajectoryStats:
    """Aggregated steady-state statistics of a simulated ensemble.

    mean_outer is the time-and-ensemble average of <x><x>^T after burn-in;
    v_unconditional = v_c_final + mean_outer estimates the stationary
    unconditional covariance. Per-trajectory aggregates are kept so that
    standard errors are estimated across trajectories, not within one.
    """

    v_c_final: CovarianceMatrix
    mean_outer: np.ndarray
    v_unconditional: np.ndarray
    n_steps: int
    outer_by_traj: np.ndarray   # (n_traj, 2N, 2N) time-averaged <x><x>^T
    mean_by_traj: np.ndarray    # (n_traj, 2N) time-averaged <x>

    @property
    def n_traj(self) -> int:
        return self.outer_by_traj.shape[0]

    def mean_outer_sem(self) -> np.ndarray:
        """Entrywise standard error of mean_outer across trajectories."""
        ddof = 1 if self.n_traj > 1 else 0
        return self.outer_by_traj.std(axis=0, ddof=ddof) / np.sqrt(self.n_traj)

    def traj_mean(self) -> np.ndarray:
        """Ensemble average of the time-averaged conditional means."""
        return self.mean_by_traj.mean(axis=0)

    def traj_mean_sem(self) -> np.ndarray:
        ddof = 1 if self.n_traj > 1 else 0
        return self.mean_by_traj.std(axis=0, ddof=ddof) / np.sqrt(self.n_traj)


def _trajectory_rng(seed: int, index: int) -> np.random.Generator:
    # Counter-based splitting: one Philox key per (seed, trajectory) pair.
    return np.random.Generator(np.random.Philox(key=(seed << 64) + index))


def simulate_conditional(plant: PlantModel, u: Unravelling, gain: FeedbackGain,
                         cfg: SimConfig,
                         v0: CovarianceMatrix | None = None) -> TrajectoryStats:
    """Simulate the conditional moments under continuous measurement and feedback.

    The conditional covariance starts from ``v0`` (default: the stabilizing
    Riccati steady state, i.e. steady-state operation) and is integrated
    with RK4. Conditional means start at zero and follow
    d<x> = (A + BF C)<x> dt + (V_c C^T + Gamma^T + BF) dw per trajectory.
    Statistics are accumulated after the burn-in fraction of the horizon.
    """
    A = drift_matrix(plant)
    D = diffusion_matrix(plant)
    meas = measurement_model(plant, u)
    C, Gamma, BF = meas.C, meas.Gamma, gain.BF
    A_cl = A + BF @ C

    if not is_hurwitz(A_cl):
        raise StabilityError("closed-loop drift A + BF C is not Hurwitz")
    slowest = 1.0 / abs(np.linalg.eigvals(A_cl).real.max())
    if cfg.t_final < 10.0 * slowest:
        warnings.warn(
            f"t_final={cfg.t_final} is below 10x the slowest closed-loop time "
            f"constant ({slowest:.2f}); statistics may carry transient bias",
            stacklevel=2)

    n_steps, dt = cfg.n_steps, cfg.dt
    n = A.shape[0]

    # Deterministic conditional covariance path and noise coefficients.
    Vc = (v0.data if v0 is not None else riccati_steady(plant, u).data).copy()
    coeff = np.empty((n_steps, n, C.shape[0]))
    for k in range(n_steps):
        coeff[k] = Vc @ C.T + Gamma.T + BF
        k1 = riccati_rhs(A, D, C, Gamma, Vc)
        k2 = riccati_rhs(A, D, C, Gamma, Vc + 0.5 * dt * k1)
        k3 = riccati_rhs(A, D, C, Gamma, Vc + 0.5 * dt * k2)
        k4 = riccati_rhs(A, D, C, Gamma, Vc + dt * k3)
        Vc = Vc + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        Vc = 0.5 * (Vc + Vc.T)
    v_c_final = CovarianceMatrix(Vc)

    k_burn = int(cfg.burn_in * n_steps)
    n_avg = n_steps - k_burn
    sqrt_dt = np.sqrt(dt)
    A_cl_T = A_cl.T

    mean_by = np.empty((cfg.n_traj, n))
    outer_by = np.empty((cfg.n_traj, n, n))
    for start in range(0, cfg.n_traj, _CHUNK):
        idx = range(start, min(start + _CHUNK, cfg.n_traj))
        noise = np.stack([_trajectory_rng(cfg.seed, i).normal(size=(n_steps, n))
                          for i in idx]) * sqrt_dt
        X = np.zeros((len(noise), n))
        SX = np.zeros_like(X)
        SXX = np.zeros((len(noise), n, n))
        for k in range(n_steps):
            X = X + (X @ A_cl_T) * dt + noise[:, k, :] @ coeff[k].T
            if k % _DIVERGENCE_CHECK_EVERY == 0:
                peak = np.abs(X).max()
                if peak > _DIVERGENCE_LIMIT or not np.isfinite(peak):
                    bad = int(np.abs(X).max(axis=1).argmax()) + start
                    raise TrajectoryDivergenceError(
                        f"trajectory {bad} diverged at step {k}", trajectory=bad)
            if k >= k_burn:
                SX += X
                SXX += np.einsum("ci,cj->cij", X, X)
        mean_by[idx.start:idx.stop] = SX / n_avg
        outer_by[idx.start:idx.stop] = SXX / n_avg

    mean_outer = outer_by.mean(axis=0)
    return TrajectoryStats(
        v_c_final=v_c_final, mean_outer=mean_outer,
        v_unconditional=v_c_final.data + mean_outer,
        n_steps=n_steps, outer_by_traj=outer_by, mean_by_traj=mean_by)


def regulation_cost(stats: TrajectoryStats, P: np.ndarray) -> float:
    """Steady-state quadratic cost estimate tr[P V_unconditional]."""
    return float(np.trace(np.asarray(P) @ stats.v_unconditional))


def regulation_cost_sem(stats: TrajectoryStats, P: np.ndarray) -> float:
    """Standard error of the cost estimate across trajectories."""
    P = np.asarray(P)
    per_traj = np.einsum("ij,cji->c", P, stats.outer_by_traj)
    ddof = 1 if stats.n_traj > 1 else 0
    return float(per_traj.std(ddof=ddof) / np.sqrt(stats.n_traj))
