"""Ballistic simulated-bifurcation solver.

Each spin is represented by a nonlinear oscillator with position ``x_i`` and
momentum ``y_i``. One step of the ballistic variant updates momenta from the
current positions, then positions from the new momenta, and finally applies a
perfectly inelastic wall at ``x = +/-1``:

    y_i += [-(a0 - a_k) * x_i - eta * h_i + c0 * sum_j J_ij * x_j] * dt
    x_i += a0 * y_i * dt
    if |x_i| > 1:  x_i = sign(x_i), y_i = 0

``a_k`` is a control parameter ramped from zero to ``a0`` over the run; the
default schedule is linear, ``a_k = a0 * k / n_steps``, and can be swapped via
the ``ramp`` argument. After ``n_steps`` steps the positions are digitized to
spins by sign (with sign(0) taken as +1).

Initialization: positions start at zero and momenta are drawn uniformly from
``[-init_noise, +init_noise]`` with numpy's default generator seeded from
``SbParams.seed``, so a solve is fully deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ising import IsingProblem, QuboProblem, ising_energy, qubo_energy, qubo_to_ising, spins_to_bits


@dataclass(frozen=True)
class SbParams:
    """Solver parameters. The defaults are the operating point used throughout."""

    a0: float = 1.0
    c0: float = 0.8
    eta: float = 0.8
    dt: float = 0.3
    n_steps: int = 400
    seed: int = 0
    restarts: int = 1
    init_noise: float = 0.1

    def __post_init__(self):
        if self.a0 <= 0 or self.c0 <= 0 or self.dt <= 0:
            raise ValueError("a0, c0 and dt must be positive")
        if self.n_steps < 1:
            raise ValueError("n_steps must be at least 1")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.init_noise < 0:
            raise ValueError("init_noise must be non-negative")


@dataclass(frozen=True)
class SbState:
    """Oscillator positions, momenta, and the index of the next step."""

    x: np.ndarray
    y: np.ndarray
    k: int = 0


def linear_ramp(k: int, params: SbParams) -> float:
    """Default control schedule: ``a_k = a0 * k / n_steps``."""
    return params.a0 * k / params.n_steps


def sb_step(state: SbState, p: IsingProblem, params: SbParams, ramp=linear_ramp) -> SbState:
    """Advance the oscillator network by one time step."""
    if state.x.shape != (p.n,) or state.y.shape != (p.n,):
        raise ValueError(
            f"state dimension {state.x.shape} does not match problem size {p.n}"
        )
    a_k = ramp(state.k, params)
    y = state.y + (
        -(params.a0 - a_k) * state.x - params.eta * p.h + params.c0 * (p.j @ state.x)
    ) * params.dt
    x = state.x + params.a0 * y * params.dt
    over = np.abs(x) > 1.0
    if over.any():
        x = np.where(over, np.sign(x), x)
        y = np.where(over, 0.0, y)
    return SbState(x=x, y=y, k=state.k + 1)


def initial_state(n: int, rng: np.random.Generator, init_noise: float) -> SbState:
    """Zero positions with small uniform momentum noise to break symmetry."""
    return SbState(x=np.zeros(n), y=rng.uniform(-init_noise, init_noise, size=n), k=0)


def _digitize(x: np.ndarray) -> np.ndarray:
    return np.where(x >= 0.0, 1, -1).astype(np.int64)


def solve_ising(p: IsingProblem, params: SbParams = SbParams(), ramp=linear_ramp) -> np.ndarray:
    """Run the solver and return a +/-1 spin vector.

    With ``restarts > 1``, runs that many independent trajectories (drawing all
    initial momenta from one seeded generator) and keeps the lowest-energy
    digitized result, preferring the earliest run on ties.
    """
    rng = np.random.default_rng(params.seed)
    best_spins = None
    best_energy = np.inf
    for _ in range(params.restarts):
        state = initial_state(p.n, rng, params.init_noise)
        for _ in range(params.n_steps):
            state = sb_step(state, p, params, ramp)
        spins = _digitize(state.x)
        energy = ising_energy(p, spins)
        if energy < best_energy:
            best_energy = energy
            best_spins = spins
    return best_spins


def solve_qubo(
    p: QuboProblem,
    params: SbParams = SbParams(),
    ramp=linear_ramp,
    offset: float = 0.0,
) -> tuple[np.ndarray, float]:
    """Solve a QUBO by converting to Ising form and digitizing the result.

    Returns ``(bits, energy)`` where the energy equals ``qubo_energy(p, bits)``
    plus the optional ``offset`` (useful when the matrix was built by dropping
    a constant, as the assignment builder does).
    """
    spins = solve_ising(qubo_to_ising(p), params, ramp)
    bits = spins_to_bits(spins)
    return bits, qubo_energy(p, bits) + offset
