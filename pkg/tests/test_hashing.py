import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import oracle_hash

from giomhash.cases import get_case, square_case_region
from giomhash.hashing import (
    BioHashCode,
    biohash,
    giom_hash,
    hash_rows,
    iom_hash,
    project_rows,
    rmf_features,
)
from giomhash.model import CylinderSet, GaussianBank, HashKey
from giomhash.randomness import OrthoMatrix, derive_bank, random_ortho


@pytest.fixture(scope="module")
def square_case():
    return get_case(1)


@pytest.fixture(scope="module")
def under_case():
    return get_case(2)


class TestWorkedExamples:
    def test_square_case_projections(self, square_case):
        proj = project_rows(square_case.vector[None, :], square_case.bank)[0]
        np.testing.assert_allclose(proj, square_case.expected_projections, atol=1e-12)

    def test_square_case_code(self, square_case):
        np.testing.assert_array_equal(
            iom_hash(square_case.vector, square_case.bank), [1, 2, 1]
        )

    def test_underdetermined_case_code(self, under_case):
        np.testing.assert_array_equal(iom_hash(under_case.vector, under_case.bank), [1, 2])

    def test_square_case_region_contains_vector(self, square_case):
        assert square_case_region(square_case.vector[None, :])[0]


class TestGiomHash:
    def test_matches_loop_oracle(self):
        rng = np.random.default_rng(17)
        bank = derive_bank(HashKey(seed=3, m=4, q=5, d=6))
        rows = rng.random((3, 6))
        expected = [oracle_hash(row, bank.matrices) for row in rows]
        np.testing.assert_array_equal(hash_rows(rows, bank), expected)

    def test_cylinder_set_entry_point(self):
        bank = derive_bank(HashKey(seed=3, m=4, q=5, d=6))
        cylinders = CylinderSet(np.full((2, 6), 0.5))
        hashed = giom_hash(cylinders, bank)
        assert hashed.codes.shape == (2, 4)
        assert hashed.q == 5
        assert hashed.key_fingerprint == bank.fingerprint()

    def test_iom_equals_single_row_giom(self):
        rng = np.random.default_rng(8)
        bank = derive_bank(HashKey(seed=11, m=6, q=4, d=5))
        x = rng.random(5)
        single = giom_hash(CylinderSet(x[None, :]), bank)
        np.testing.assert_array_equal(iom_hash(x, bank), single.codes[0])

    def test_indices_in_range(self):
        rng = np.random.default_rng(2)
        bank = derive_bank(HashKey(seed=4, m=10, q=7, d=8))
        codes = hash_rows(rng.standard_normal((20, 8)), bank)
        assert codes.min() >= 1 and codes.max() <= 7

    def test_deterministic(self):
        bank = derive_bank(HashKey(seed=21, m=5, q=6, d=7))
        x = np.linspace(0, 1, 7)
        np.testing.assert_array_equal(iom_hash(x, bank), iom_hash(x, bank))

    @given(st.integers(0, 10_000), st.floats(1e-6, 10.0, allow_nan=False))
    def test_positive_scale_invariance(self, seed, alpha):
        rng = np.random.default_rng(seed)
        bank = derive_bank(HashKey(seed=seed, m=3, q=4, d=5))
        x = rng.standard_normal(5)
        np.testing.assert_array_equal(iom_hash(x, bank), iom_hash(alpha * x, bank))

    def test_tie_breaks_to_smallest_index(self):
        # identical columns project identically; the first must win
        mats = np.ones((2, 3, 4))
        bank = GaussianBank(mats)
        np.testing.assert_array_equal(iom_hash(np.array([0.2, 0.5, 0.3]), bank), [1, 1])

    def test_dominant_column_forced(self):
        mats = np.zeros((1, 3, 4))
        mats[0, :, 2] = 1.0
        bank = GaussianBank(mats)
        np.testing.assert_array_equal(iom_hash(np.array([0.1, 0.2, 0.3]), bank), [3])

    def test_dimension_mismatch(self):
        bank = derive_bank(HashKey(seed=1, m=2, q=3, d=4))
        with pytest.raises(ValueError, match="does not match bank"):
            iom_hash(np.ones(5), bank)

    def test_non_finite_rejected(self):
        bank = derive_bank(HashKey(seed=1, m=2, q=3, d=4))
        with pytest.raises(ValueError, match="finite"):
            iom_hash(np.array([1.0, np.nan, 0.0, 0.0]), bank)


class TestRmf:
    def test_square_case_values(self, square_case):
        rmf = rmf_features(square_case.vector, square_case.bank)
        np.testing.assert_allclose(
            rmf.values, np.array([0.38, 0.88, 0.59]) / np.sqrt(3.0), atol=1e-12
        )

    def test_zero_vector(self, square_case):
        rmf = rmf_features(np.zeros(3), square_case.bank)
        np.testing.assert_array_equal(rmf.values, np.zeros(3))

    def test_argmax_consistent_with_iom(self):
        rng = np.random.default_rng(5)
        bank = derive_bank(HashKey(seed=7, m=8, q=5, d=6))
        x = rng.standard_normal(6)
        proj = project_rows(x[None, :], bank)[0]
        scaled_max = rmf_features(x, bank).values
        code = iom_hash(x, bank)
        for i in range(bank.m):
            assert proj[i, code[i] - 1] == pytest.approx(scaled_max[i] * np.sqrt(bank.m))

    def test_dimension_mismatch(self, square_case):
        with pytest.raises(ValueError, match="does not match bank"):
            rmf_features(np.ones(7), square_case.bank)


class TestBioHash:
    def test_aligned_unit_vector(self):
        basis = random_ortho(5, 1, seed=2)
        x = basis.entries[:, 0]
        np.testing.assert_array_equal(biohash(x, basis).bits, [1])

    def test_orthogonal_input_all_zero_bits(self):
        # exact orthogonality: axis-aligned basis, input on an unused axis
        basis = OrthoMatrix(np.eye(6)[:, :3])
        x = np.eye(6)[:, 5]
        bits = biohash(x, basis, tau=0.0).bits
        np.testing.assert_array_equal(bits, np.zeros(3, dtype=np.uint8))

    def test_boundary_maps_to_zero(self):
        basis = random_ortho(4, 2, seed=9)
        bits = biohash(np.zeros(4), basis, tau=0.0).bits
        np.testing.assert_array_equal(bits, [0, 0])

    def test_huge_negative_threshold_all_ones(self):
        basis = random_ortho(5, 3, seed=1)
        rng = np.random.default_rng(0)
        bits = biohash(rng.standard_normal(5), basis, tau=-1e9).bits
        np.testing.assert_array_equal(bits, [1, 1, 1])

    def test_dimension_mismatch(self):
        basis = random_ortho(5, 2, seed=3)
        with pytest.raises(ValueError, match="shape"):
            biohash(np.ones(4), basis)

    def test_code_type_validation(self):
        with pytest.raises(ValueError, match="0/1"):
            BioHashCode(bits=np.array([0, 2]), tau=0.0)
