import json
import math
from pathlib import Path

import numpy as np
import pytest

from pqforge.entropy import Distribution, renyi_entropy
from pqforge.errors import CapabilityError, DomainError, ValidationError
from pqforge.lattice import IntegerLattice, enumerate_short_vectors
from pqforge.oracle import (FunctionTable, birthday_product, collision_count, concentration_sweep,
                            counter_stream, empirical_collision_entropy, empirical_collision_frequency,
                            gaussian_mass_enum, gaussian_tail_bound, renyi_from_table,
                            sample_random_function, shortest_vector_enum)

CORPUS = json.loads((Path(__file__).parent / "data" / "lattices.json").read_text())

# chi-square critical value, 15 degrees of freedom, upper tail 1e-6
CHI2_15_1E6 = 56.4934


class TestGenerator:
    def test_splitmix_reference(self):
        got = counter_stream(np.uint64(0), np.arange(3, dtype=np.uint64)).tolist()
        assert got == [16294208416658607535, 7960286522194355700, 487617019471545679]

    def test_table_reference(self):
        assert sample_random_function(8, 256, 42).table.tolist() == [189, 40, 71, 88, 9, 222, 55, 204]

    def test_deterministic(self):
        a = sample_random_function(1000, 97, 7).table
        b = sample_random_function(1000, 97, 7).table
        c = sample_random_function(1000, 97, 8).table
        assert np.array_equal(a, b) and not np.array_equal(a, c)

    def test_range_one(self):
        assert not sample_random_function(64, 1, 3).table.any()

    def test_uniformity(self):
        counts = sample_random_function(2 ** 16, 16, 12345).counts()
        expected = 2 ** 16 / 16
        chi2 = float(((counts - expected) ** 2 / expected).sum())
        assert chi2 < CHI2_15_1E6

    def test_limits(self):
        with pytest.raises(CapabilityError):
            sample_random_function(2 ** 21, 2, 0)
        with pytest.raises(CapabilityError):
            sample_random_function(4, 2 ** 17, 0)

    def test_table_validation(self):
        with pytest.raises(ValidationError):
            FunctionTable(2, 2, np.array([0, 2]), 0)


class TestEmpiricalEntropy:
    def test_identity_and_constant(self):
        ident = FunctionTable(256, 256, np.arange(256), 0)
        const = FunctionTable(256, 256, np.zeros(256, dtype=np.int64), 0)
        assert empirical_collision_entropy(ident) == 8.0
        assert empirical_collision_entropy(const) == 0.0

    def test_matches_entropy_module(self):
        t = sample_random_function(4096, 256, 99)
        assert empirical_collision_entropy(t) == pytest.approx(renyi_from_table(t, 2), abs=1e-12)
        assert renyi_from_table(t, "inf") <= renyi_from_table(t, 2) <= renyi_from_table(t, "shannon")


class TestSweep:
    def test_zero_threshold_is_certain(self):
        s = concentration_sweep(256, 16, 200, [0.0, 0.5], 1)
        assert s.empirical_tail[0] == 1.0 and s.bound_tail[0] == 1.0
        assert all(s.dominated())
        assert s.probability_space == "random function"

    def test_csv_reproducible(self):
        a = concentration_sweep(512, 64, 300, [0.01, 0.1], 5).to_csv()
        b = concentration_sweep(512, 64, 300, [0.01, 0.1], 5).to_csv()
        assert a == b
        assert a.splitlines()[0] == "t,empirical_tail,bound_tail,trials,seed"

    def test_tail_nonincreasing(self):
        s = concentration_sweep(256, 64, 500, [0.0, 0.02, 0.05, 0.1, 0.5], 11)
        assert s.empirical_tail == sorted(s.empirical_tail, reverse=True)

    def test_min_trials(self):
        with pytest.raises(DomainError):
            concentration_sweep(256, 16, 99, [0.1], 1)


class TestCollisions:
    def test_pigeonhole(self):
        assert empirical_collision_frequency(64, 8, 9, 100, 0) == 1.0
        assert birthday_product(9, 8) == 1.0

    def test_birthday_values(self):
        assert birthday_product(2, 256) == pytest.approx(1 / 256)
        assert birthday_product(16, 256) == pytest.approx(0.3802923025057854, abs=1e-14)

    def test_frequency_near_birthday(self):
        p = birthday_product(8, 256)
        freq = empirical_collision_frequency(256, 256, 8, 20000, 3)
        assert abs(freq - p) <= 4 * math.sqrt(p * (1 - p) / 20000)

    def test_bad_sample_count(self):
        with pytest.raises(DomainError):
            collision_count(4, 16, 5, 10, 0)
        with pytest.raises(DomainError):
            collision_count(4, 16, 1, 10, 0)


class TestShortestVector:
    @pytest.mark.parametrize("entry", CORPUS, ids=[e["name"] for e in CORPUS])
    def test_corpus(self, entry):
        lam, witness = shortest_vector_enum(IntegerLattice(entry["basis"]))
        assert lam * lam == pytest.approx(entry["lambda1_sq"], abs=1e-12)
        assert sum(v * v for v in witness) == entry["lambda1_sq"]

    def test_unimodular_invariance(self):
        rng = np.random.default_rng(2024)
        for entry in CORPUS:
            lat = IntegerLattice(entry["basis"])
            n = lat.dim
            for _ in range(10):
                u = np.eye(n, dtype=np.int64)
                for _ in range(4):
                    i, j = rng.choice(n, 2, replace=False)
                    u[i] += int(rng.integers(-2, 3)) * u[j]
                moved = lat.transformed(u.tolist())
                assert moved.det == lat.det
                lam, _ = shortest_vector_enum(moved, lat.default_radius())
                assert lam * lam == pytest.approx(entry["lambda1_sq"], abs=1e-9)

    def test_enumeration_is_symmetric(self):
        vecs = {v for v, _ in enumerate_short_vectors(IntegerLattice([[2, 0], [1, 2]]), 3.0)}
        assert vecs == {tuple(-c for c in v) for v in vecs}
        assert (0, 0) not in vecs

    def test_radius_too_small(self):
        with pytest.raises(DomainError):
            shortest_vector_enum(IntegerLattice([[3, 0], [0, 5]]), 1.0)

    def test_dimension_limits(self):
        with pytest.raises(CapabilityError):
            IntegerLattice(np.eye(9, dtype=int).tolist())
        with pytest.raises(CapabilityError):
            shortest_vector_enum(IntegerLattice(np.eye(7, dtype=int).tolist()))

    def test_singular_rejected(self):
        with pytest.raises(ValidationError):
            IntegerLattice([[1, 2], [2, 4]])


class TestGaussianMass:
    def test_integers(self):
        # 2 (e^{-pi} + e^{-4 pi}), 40-digit reference
        got = gaussian_mass_enum(IntegerLattice([[1]]), 1.0)
        assert got.mass == pytest.approx(0.08643481121225692, abs=1e-15)
        assert got.count == 4

    def test_tail_bound_covers_extra_shell(self):
        lat = IntegerLattice([[2, 0], [1, 2]])
        r = lat.default_radius()
        near = gaussian_mass_enum(lat, 1.5, r)
        far = gaussian_mass_enum(lat, 1.5, 1.5 * r)
        assert far.mass - near.mass <= near.tail_bound

    def test_tail_bound_inapplicable(self):
        assert gaussian_tail_bound(4, 10.0, 1.0, 0.0) == math.inf

    def test_mass_grows_with_sigma(self):
        lat = IntegerLattice(CORPUS[5]["basis"])
        masses = [gaussian_mass_enum(lat, s, 6.0).mass for s in (0.5, 1.0, 1.5, 2.0)]
        assert masses == sorted(masses)

    def test_bad_sigma(self):
        with pytest.raises(DomainError):
            gaussian_mass_enum(IntegerLattice([[1]]), 0.0)


def test_renyi_agrees_with_histogram():
    t = FunctionTable(6, 3, np.array([0, 0, 0, 1, 1, 2]), 0)
    assert renyi_from_table(t, 2) == pytest.approx(renyi_entropy(Distribution([0.5, 1 / 3, 1 / 6]), 2), abs=1e-12)
