"""Ballistic simulated-bifurcation dynamics and solver quality."""

import numpy as np
import pytest

from flextrack.assign import build_assignment_qubo
from flextrack.ising import IsingProblem, QuboProblem, brute_force_qubo, ising_energy
from flextrack.sb import SbParams, SbState, sb_step, solve_ising, solve_qubo


def zero_problem(n):
    return IsingProblem(j=np.zeros((n, n)), h=np.zeros(n))


class TestSbStep:
    def test_hand_evaluated_step(self):
        # single oscillator pulled by a negative bias, defaults
        p = IsingProblem(j=[[0.0]], h=[-1.0])
        state = SbState(x=np.zeros(1), y=np.zeros(1), k=0)
        after = sb_step(state, p, SbParams())
        assert after.y[0] == pytest.approx(0.8 * 0.3, rel=1e-12)  # -eta*h*dt
        assert after.x[0] == pytest.approx(0.8 * 0.3 * 0.3, rel=1e-12)
        assert after.k == 1

    def test_wall_clamps_overshoot(self):
        state = SbState(x=np.array([1.5]), y=np.array([0.0]), k=0)
        after = sb_step(state, zero_problem(1), SbParams())
        assert after.x[0] == 1.0 and after.y[0] == 0.0

    def test_wall_clamps_momentum_overshoot(self):
        state = SbState(x=np.array([0.9]), y=np.array([10.0]), k=0)
        after = sb_step(state, zero_problem(1), SbParams())
        assert after.x[0] == 1.0 and after.y[0] == 0.0

    def test_zero_fixed_point(self):
        state = SbState(x=np.zeros(3), y=np.zeros(3), k=0)
        for _ in range(50):
            state = sb_step(state, zero_problem(3), SbParams())
        assert np.all(state.x == 0.0) and np.all(state.y == 0.0)

    def test_dimension_mismatch(self):
        state = SbState(x=np.zeros(2), y=np.zeros(2), k=0)
        with pytest.raises(ValueError, match="dimension"):
            sb_step(state, zero_problem(3), SbParams())

    def test_wall_invariant_through_run(self):
        rng = np.random.default_rng(5)
        raw = rng.uniform(-1, 1, size=(12, 12))
        j = (raw + raw.T) / 2
        np.fill_diagonal(j, 0.0)
        p = IsingProblem(j=j, h=rng.uniform(-1, 1, size=12))
        params = SbParams(seed=5)
        state = SbState(x=np.zeros(12), y=rng.uniform(-0.1, 0.1, size=12), k=0)
        for _ in range(params.n_steps):
            state = sb_step(state, p, params)
            assert np.max(np.abs(state.x)) <= 1.0
            # a position sitting exactly on the wall was just clamped
            assert np.all((np.abs(state.x) < 1.0) | (state.y == 0.0))


class TestSolveIsing:
    def test_single_spin_follows_bias(self):
        spins = solve_ising(IsingProblem(j=[[0.0]], h=[-1.0]), SbParams())
        assert np.array_equal(spins, [1])

    def test_ferromagnetic_ground_pair(self):
        p = IsingProblem(j=[[0.0, 1.0], [1.0, 0.0]], h=[0.0, 0.0])
        spins = solve_ising(p, SbParams())
        assert abs(spins.sum()) == 2  # aligned either way
        assert ising_energy(p, spins) == pytest.approx(-1.0)

    def test_deterministic_for_seed(self):
        rng = np.random.default_rng(9)
        raw = rng.uniform(-1, 1, size=(10, 10))
        j = (raw + raw.T) / 2
        np.fill_diagonal(j, 0.0)
        p = IsingProblem(j=j, h=rng.uniform(-1, 1, size=10))
        a = solve_ising(p, SbParams(seed=123))
        b = solve_ising(p, SbParams(seed=123))
        assert np.array_equal(a, b)

    def test_restarts_never_worse(self):
        rng = np.random.default_rng(13)
        raw = rng.uniform(-1, 1, size=(10, 10))
        j = (raw + raw.T) / 2
        np.fill_diagonal(j, 0.0)
        p = IsingProblem(j=j, h=rng.uniform(-1, 1, size=10))
        single = ising_energy(p, solve_ising(p, SbParams(seed=1)))
        multi = ising_energy(p, solve_ising(p, SbParams(seed=1, restarts=5)))
        assert multi <= single + 1e-12

    def test_quality_invariant_up_to_16_vars(self):
        # never better than the oracle; matches it on at least 90% of instances
        hits = 0
        for i in range(200):
            n = 2 + (i % 15)
            rng = np.random.default_rng(i)
            p = QuboProblem(rng.uniform(-1, 1, size=(n, n)))
            _, best = brute_force_qubo(p)
            _, got = solve_qubo(p, SbParams(seed=i))
            assert got >= best - 1e-9
            hits += abs(got - best) < 1e-9
        assert hits >= 180


class TestSolveQubo:
    def test_single_variable(self):
        bits, energy = solve_qubo(QuboProblem([[-2.5]]), SbParams())
        assert np.array_equal(bits, [1]) and energy == pytest.approx(-2.5)

    def test_all_zero_problem(self):
        _, energy = solve_qubo(QuboProblem(np.zeros((2, 2))), SbParams())
        assert energy == 0.0

    def test_assignment_instance_with_offset(self):
        # two trackers fighting over one detection at the tolerant weight
        problem, dropped = build_assignment_qubo(np.array([[0.8], [0.7]]), c=0.1)
        bits, energy = solve_qubo(problem, SbParams(), offset=dropped)
        assert np.array_equal(bits, [1, 1])
        assert energy == pytest.approx(-1.4)

    def test_bad_params_rejected(self):
        with pytest.raises(ValueError):
            SbParams(dt=0.0)
        with pytest.raises(ValueError):
            SbParams(n_steps=0)
        with pytest.raises(ValueError):
            SbParams(restarts=0)
