"""QUBO/Ising encodings: energies, conversion identity, brute-force oracle."""

import numpy as np
import pytest

from flextrack.ising import (
    BRUTE_FORCE_MAX_VARS,
    IsingProblem,
    QuboProblem,
    bits_to_spins,
    brute_force_qubo,
    ising_energy,
    qubo_energy,
    qubo_to_ising,
    read_qubo_file,
    spins_to_bits,
)


def all_bit_vectors(n):
    """Exhaustive enumeration oracle, bit 0 most significant."""
    return [
        np.array([(v >> (n - 1 - i)) & 1 for i in range(n)])
        for v in range(1 << n)
    ]


class TestQuboEnergy:
    def test_single_term(self):
        p = QuboProblem([[-2.5]])
        assert qubo_energy(p, [1]) == -2.5

    def test_all_zero_bits(self):
        p = QuboProblem(np.random.default_rng(0).normal(size=(5, 5)))
        assert qubo_energy(p, np.zeros(5)) == 0.0

    def test_pair(self):
        p = QuboProblem([[1.0, 0.5], [0.5, 0.0]])
        assert qubo_energy(p, [1, 1]) == pytest.approx(2.0)

    def test_length_mismatch(self):
        p = QuboProblem([[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(ValueError, match="bits"):
            qubo_energy(p, [1, 0, 1])

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            QuboProblem(np.zeros((2, 3)))


class TestIsingEnergy:
    def test_ferromagnetic_pair(self):
        p = IsingProblem(j=[[0.0, 1.0], [1.0, 0.0]], h=[0.0, 0.0])
        assert ising_energy(p, [1, 1]) == pytest.approx(-1.0)

    def test_single_bias(self):
        p = IsingProblem(j=[[0.0]], h=[-1.0])
        assert ising_energy(p, [1]) == pytest.approx(-1.0)

    def test_antiparallel_pair(self):
        p = IsingProblem(j=[[0.0, 1.0], [1.0, 0.0]], h=[0.0, 0.0])
        assert ising_energy(p, [1, -1]) == pytest.approx(1.0)

    def test_invalid_spin(self):
        p = IsingProblem(j=[[0.0]], h=[0.0])
        with pytest.raises(ValueError, match="spins"):
            ising_energy(p, [0])

    def test_rejects_nonzero_diagonal(self):
        with pytest.raises(ValueError, match="diagonal"):
            IsingProblem(j=[[1.0]], h=[0.0])

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError, match="symmetric"):
            IsingProblem(j=[[0.0, 1.0], [0.5, 0.0]], h=[0.0, 0.0])


class TestConversion:
    def test_diagonal_example(self):
        p = QuboProblem(np.diag([2.0, -4.0]))
        ising = qubo_to_ising(p)
        assert np.allclose(ising.h, [1.0, -2.0])
        assert np.all(ising.j == 0.0)
        assert ising.offset == pytest.approx(-1.0)
        # the substitution identity at one corner of the cube
        assert qubo_energy(p, [0, 1]) == pytest.approx(-4.0)
        assert ising_energy(ising, [-1, 1]) + ising.offset == pytest.approx(-4.0)

    def test_all_zero(self):
        ising = qubo_to_ising(QuboProblem(np.zeros((3, 3))))
        assert np.all(ising.j == 0.0)
        assert np.all(ising.h == 0.0)
        assert ising.offset == 0.0

    def test_argmin_correspondence(self):
        rng = np.random.default_rng(7)
        p = QuboProblem(rng.uniform(-1, 1, size=(6, 6)))
        ising = qubo_to_ising(p)
        qubo_energies = [qubo_energy(p, b) for b in all_bit_vectors(6)]
        ising_energies = [
            ising_energy(ising, bits_to_spins(b)) for b in all_bit_vectors(6)
        ]
        assert int(np.argmin(qubo_energies)) == int(np.argmin(ising_energies))

    @pytest.mark.parametrize("n", range(1, 13, 2))
    def test_energy_identity_exhaustive(self, n):
        rng = np.random.default_rng(n)
        p = QuboProblem(rng.uniform(-2, 2, size=(n, n)))
        ising = qubo_to_ising(p)
        for b in all_bit_vectors(n):
            lhs = qubo_energy(p, b)
            rhs = ising_energy(ising, bits_to_spins(b)) + ising.offset
            assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_energy_identity_sampled_n20(self):
        rng = np.random.default_rng(20)
        p = QuboProblem(rng.uniform(-2, 2, size=(20, 20)))
        ising = qubo_to_ising(p)
        for _ in range(200):
            b = rng.integers(0, 2, size=20)
            lhs = qubo_energy(p, b)
            rhs = ising_energy(ising, bits_to_spins(b)) + ising.offset
            assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_spin_bit_maps_roundtrip(self):
        b = np.array([0, 1, 1, 0])
        assert np.array_equal(bits_to_spins(b), [-1, 1, 1, -1])
        assert np.array_equal(spins_to_bits(bits_to_spins(b)), b)


class TestSymmetrization:
    def test_preserves_energy(self):
        rng = np.random.default_rng(3)
        raw = rng.normal(size=(5, 5))  # deliberately asymmetric
        p = QuboProblem(raw)
        assert np.array_equal(p.q, p.q.T)
        for b in all_bit_vectors(5):
            assert qubo_energy(p, b) == pytest.approx(float(b @ raw @ b), abs=1e-9)


class TestBruteForce:
    def test_single_negative(self):
        bits, energy = brute_force_qubo(QuboProblem([[-2.5]]))
        assert np.array_equal(bits, [1]) and energy == -2.5

    def test_positive_diagonal_prefers_zero(self):
        bits, energy = brute_force_qubo(QuboProblem([[1.0]]))
        assert np.array_equal(bits, [0]) and energy == 0.0

    def test_tie_breaks_to_lowest_integer(self):
        bits, energy = brute_force_qubo(QuboProblem([[0.0, 5.0], [5.0, 0.0]]))
        assert np.array_equal(bits, [0, 0]) and energy == 0.0

    def test_cap(self):
        n = BRUTE_FORCE_MAX_VARS + 1
        with pytest.raises(ValueError, match="capped"):
            brute_force_qubo(QuboProblem(np.zeros((n, n))))

    def test_lower_bound_property(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            p = QuboProblem(rng.uniform(-1, 1, size=(8, 8)))
            _, best = brute_force_qubo(p)
            for _ in range(20):
                b = rng.integers(0, 2, size=8)
                assert best <= qubo_energy(p, b) + 1e-12


class TestQuboFile:
    def test_load_symmetrizes(self, tmp_path):
        path = tmp_path / "q.txt"
        path.write_text("2\n0 0 -2.5\n0 1 1.0\n")
        p = read_qubo_file(path)
        assert p.n == 2
        assert p.q[0, 1] == p.q[1, 0] == 0.5
        assert p.q[0, 0] == -2.5
        assert p.q[1, 1] == 0.0  # unlisted entries are zero

    def test_bad_entry_names_line(self, tmp_path):
        path = tmp_path / "q.txt"
        path.write_text("2\n0 0 -2.5\n0 x 1.0\n")
        with pytest.raises(ValueError, match="3"):
            read_qubo_file(path)

    def test_index_out_of_range(self, tmp_path):
        path = tmp_path / "q.txt"
        path.write_text("2\n0 2 1.0\n")
        with pytest.raises(ValueError, match="out of range"):
            read_qubo_file(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "q.txt"
        path.write_text("")
        with pytest.raises(ValueError, match="empty"):
            read_qubo_file(path)
