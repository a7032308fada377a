"""Simulation of the delayed feedback controlled dynamics.

The controlled update is x(k+1) = sum_j a_j f(x(k - (j-1)T)); the control
magnitude u(k) = x(k+1) - f(x(k)) is recorded per step. By construction the
control vanishes identically when the trajectory sits on the target orbit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cycles import Cycle
from .maps import MapSpec, eval_map
from .spectrum import GainVector

__all__ = ["Trajectory", "simulate", "basin_fraction", "DEFAULT_SIM_TOL"]

DEFAULT_SIM_TOL = 1e-6


@dataclass(frozen=True)
class Trajectory:
    """Controlled time series with per-step control magnitudes.

    ``states`` holds x(0..K) including the initial history of length
    (N-1)T + 1; ``controls`` holds one u(k) per update step, so
    len(controls) = len(states) - history length. ``settle_step`` is the
    first index after which every state stays within tol of the target
    orbit set (None when the run did not converge).
    """

    states: np.ndarray
    controls: np.ndarray
    converged: bool
    settle_step: int | None
    target: Cycle
    diverged: bool = False


def simulate(
    m: MapSpec,
    a: GainVector,
    T: int,
    init_history,
    steps: int,
    target: Cycle,
    tol: float = DEFAULT_SIM_TOL,
) -> Trajectory:
    """Iterate the controlled system and test convergence to the target orbit.

    ``init_history`` must supply exactly (N-1)T + 1 states. Convergence means
    every state in the final window of length 10*T lies within tol of the
    orbit set (distance as a set; phase alignment is not required). A
    non-finite state truncates the run and flags divergence.
    """
    N = len(a)
    M = (N - 1) * T + 1
    history = [float(v) for v in init_history]
    if len(history) != M:
        raise ValueError(f"init_history must have length {M}, got {len(history)}")
    if steps < 10 * T:
        raise ValueError(f"steps must be at least 10*T = {10 * T}")

    states = list(history)
    controls: list[float] = []
    diverged = False
    coeffs = a.coeffs
    for k in range(M - 1, M - 1 + steps):
        try:
            fx = [eval_map(m, states[k - (j - 1) * T]) for j in range(1, N + 1)]
        except Exception:
            diverged = True
            break
        new = sum(c * v for c, v in zip(coeffs, fx))
        if not math.isfinite(new):
            diverged = True
            break
        controls.append(new - fx[0])
        states.append(new)

    states_arr = np.asarray(states)
    controls_arr = np.asarray(controls)

    converged = False
    settle: int | None = None
    if not diverged and len(states) >= M + 10 * T:
        dist = np.array([target.distance_to(x) for x in states])
        window = dist[-10 * T :]
        converged = bool(np.all(window <= tol))
        if converged:
            s = len(states)
            while s > 0 and dist[s - 1] <= tol:
                s -= 1
            settle = s

    return Trajectory(
        states=states_arr,
        controls=controls_arr,
        converged=converged,
        settle_step=settle,
        target=target,
        diverged=diverged,
    )


def basin_fraction(
    m: MapSpec,
    a: GainVector,
    T: int,
    target: Cycle,
    samples: int,
    steps: int,
    tol: float = DEFAULT_SIM_TOL,
    seed: int = 0,
) -> float:
    """Monte Carlo fraction of constant initial histories that converge.

    Histories are constant sequences with the value drawn uniformly from the
    map's domain; results are deterministic for a given seed regardless of
    evaluation order (all draws are taken up front).
    """
    if samples < 1:
        raise ValueError("samples must be a positive integer")
    N = len(a)
    M = (N - 1) * T + 1
    rng = np.random.default_rng(seed)
    lo, hi = m.domain
    draws = rng.uniform(lo, hi, samples)
    hits = 0
    for v in draws:
        traj = simulate(m, a, T, [float(v)] * M, steps, target, tol)
        if traj.converged:
            hits += 1
    return hits / samples
