import numpy as np
import pytest

from ncframes import (
    AlgebraSpec,
    AMatrix,
    Frame,
    NotTightError,
    canonical_coisometry,
    canonical_frame,
    check_tight,
    factorize,
    frame_operator,
    gram_matrix,
    is_partial_isometry,
    is_spherical,
    is_unitary,
    random_tight_frame,
    random_unitary,
    scalar_definition_check,
)
from conftest import scalar_frame


class TestFrameOperator:
    def test_canonical_coisometry(self, mixed_spec):
        F = Frame(canonical_coisometry(mixed_spec, 4, 2))
        assert frame_operator(F).allclose(AMatrix.identity(mixed_spec, 2), tol=1e-14)

    def test_repeated_basis_vector(self):
        F = scalar_frame([[1], [1]])  # e1 twice in C^1
        S = frame_operator(F)
        assert S.entry(0, 0).blocks[0][0, 0] == pytest.approx(2.0)

    def test_self_adjoint_positive(self, m2_spec):
        rng = np.random.default_rng(0)
        F = Frame(AMatrix.random(m2_spec, 2, 4, rng))
        S = frame_operator(F)
        assert S.H.allclose(S, tol=1e-12)
        # eigenvalue oracle on the flat view
        for blk in S.flatten().blocks:
            assert np.linalg.eigvalsh(blk).min() >= -1e-10


class TestCheckTight:
    def test_canonical_frames_are_tight(self, mixed_spec):
        rng = np.random.default_rng(1)
        for b in (0.5, 1.0, 2.0):
            U = random_unitary(mixed_spec, 5, rng)
            F = canonical_frame(mixed_spec, 5, 3, b, U)
            report = check_tight(F)
            assert report.is_tight
            assert abs(report.b - b) <= 1e-10 * b

    def test_mercedes_constant(self, mercedes):
        # oracle: FF* of three unit vectors at 120-degree spacing is (3/2) I
        report = check_tight(mercedes)
        assert report.is_tight
        assert report.b == pytest.approx(1.5, abs=1e-12)

    def test_non_tight_detected(self):
        F = scalar_frame([[1, 0], [0, 1], [1, 0]])  # S = diag(2, 1)
        report = check_tight(F)
        assert not report.is_tight

    def test_per_summand_disagreement_is_not_tight(self):
        spec = AlgebraSpec((1, 1))
        # identity columns scaled differently per summand
        import ncframes

        e1 = ncframes.AlgebraElement(
            spec, (np.array([[1.0]], dtype=complex), np.array([[2.0]], dtype=complex))
        )
        F = Frame(AMatrix.from_entries([[e1]]))
        report = check_tight(F)
        assert not report.is_tight
        assert report.per_summand_b == (1.0, 4.0)


class TestScalarDefinitionCheck:
    def test_scalar_tight_frame_equality(self, scalar_spec):
        F = random_tight_frame(scalar_spec, 5, 3, b=1.5, seed=2)
        rep = scalar_definition_check(F, 1.5, num_samples=2000, seed=0)
        assert rep.max_equality_deviation <= 1e-9
        assert rep.inequality_violations == 0

    def test_canonical_basis_vector_zero_deviation(self, scalar_spec):
        F = Frame(canonical_coisometry(scalar_spec, 4, 2))
        rep = scalar_definition_check(F, 1.0, num_samples=500, seed=1)
        assert rep.inequality_violations == 0

    def test_matrix_block_strict_inequality_witness(self, m2_spec):
        # frame [E11, E22] in A^1 over M2: FF* = I, but for v = 1_A the
        # pairings have disjoint supports, so the scalar sum strictly
        # dominates: 1 + 1 > 1.
        e11 = np.zeros((2, 2), dtype=complex)
        e11[0, 0] = 1
        e22 = np.zeros((2, 2), dtype=complex)
        e22[1, 1] = 1
        import ncframes

        F = Frame(
            AMatrix.from_entries(
                [
                    [
                        ncframes.AlgebraElement(m2_spec, (e11,)),
                        ncframes.AlgebraElement(m2_spec, (e22,)),
                    ]
                ]
            )
        )
        report = check_tight(F)
        assert report.is_tight and report.b == pytest.approx(1.0)
        from ncframes import inner_product

        v = AMatrix.from_entries([[m2_spec.identity()]])
        total = sum(
            inner_product(v, F.matrix.column(i)).norm() ** 2 for i in range(2)
        )
        delta = total - report.b * inner_product(v, v).norm()
        assert delta == pytest.approx(1.0)
        rep = scalar_definition_check(F, report.b, num_samples=2000, seed=3)
        assert rep.inequality_violations == 0
        assert rep.max_equality_deviation > 0.1


class TestIsSpherical:
    def test_canonical_coisometry_not_spherical(self, scalar_spec):
        F = Frame(canonical_coisometry(scalar_spec, 4, 2))
        assert not is_spherical(F, mode="strict").is_spherical
        assert not is_spherical(F, mode="equal_norm").is_spherical

    def test_mercedes_strict(self, mercedes):
        rep = is_spherical(mercedes, mode="strict")
        assert rep.is_spherical
        assert rep.radius == pytest.approx(1.0, abs=1e-12)

    def test_generic_canonical_frame_not_spherical(self, m2_spec):
        F = random_tight_frame(m2_spec, 5, 2, b=1.0, seed=4)
        rep = is_spherical(F)
        assert rep.deviation > 1e-3  # generic columns have unequal lengths


class TestCanonicalForm:
    def test_w_matrix_values(self, scalar_spec):
        W = canonical_coisometry(scalar_spec, 3, 2)
        np.testing.assert_array_equal(
            W.flatten().blocks[0], np.array([[1, 0, 0], [0, 1, 0]], dtype=complex)
        )
        Wn = canonical_coisometry(scalar_spec, 3, 3)
        assert Wn.allclose(AMatrix.identity(scalar_spec, 3), tol=0.0)
        assert (W @ W.H).allclose(AMatrix.identity(scalar_spec, 2), tol=0.0)

    def test_w_matrix_requires_wide(self, scalar_spec):
        from ncframes import ShapeError

        with pytest.raises(ShapeError):
            canonical_coisometry(scalar_spec, 2, 3)

    def test_identity_unitary(self, m2_spec):
        F = canonical_frame(m2_spec, 4, 2, 2.0, AMatrix.identity(m2_spec, 4))
        expected = np.sqrt(2.0) * canonical_coisometry(m2_spec, 4, 2)
        assert F.matrix.allclose(expected, tol=1e-14)

    def test_rejects_non_unitary(self, m2_spec):
        with pytest.raises(ValueError):
            canonical_frame(m2_spec, 4, 2, 1.0, 2.0 * AMatrix.identity(m2_spec, 4))

    def test_square_case_orthonormal_basis(self, scalar_spec):
        F = canonical_frame(scalar_spec, 3, 3, 1.0, AMatrix.identity(scalar_spec, 3))
        assert frame_operator(F).allclose(AMatrix.identity(scalar_spec, 3), tol=0.0)


class TestFactorize:
    def test_scaled_coisometry(self, scalar_spec):
        F = Frame(np.sqrt(2.0) * canonical_coisometry(scalar_spec, 3, 2))
        result = factorize(F)
        assert result.b == pytest.approx(2.0)
        assert result.unitary.allclose(AMatrix.identity(scalar_spec, 3), tol=1e-12)

    def test_round_trip(self, mixed_spec):
        rng = np.random.default_rng(5)
        for seed in range(10):
            U0 = random_unitary(mixed_spec, 4, rng)
            F = canonical_frame(mixed_spec, 4, 2, 1.5, U0)
            result = factorize(F)
            assert is_unitary(result.unitary, 1e-10)
            assert result.reconstruction_residual <= 1e-8

    def test_mercedes(self, mercedes):
        result = factorize(mercedes)
        assert result.b == pytest.approx(1.5, abs=1e-12)
        assert is_unitary(result.unitary, 1e-10)
        assert result.reconstruction_residual < 1e-10

    def test_not_tight_raises_with_residual(self):
        F = scalar_frame([[1, 0], [0, 1], [1, 0]])
        with pytest.raises(NotTightError) as err:
            factorize(F)
        assert err.value.residual > 0.1

    def test_tightness_iff_partial_isometry(self, m2_spec):
        rng = np.random.default_rng(6)
        for seed in range(5):
            F = random_tight_frame(m2_spec, 5, 3, b=2.0, seed=seed)
            report = check_tight(F)
            G = (1.0 / np.sqrt(report.b)) * F.matrix
            assert is_partial_isometry(G, 1e-9)
        loose = Frame(AMatrix.random(m2_spec, 3, 5, rng))
        report = check_tight(loose)
        assert not report.is_tight
        G = (1.0 / np.sqrt(report.b)) * loose.matrix
        assert not is_partial_isometry(G, 1e-9)


class TestRandomTightFrame:
    def test_always_tight(self, mixed_spec):
        for seed in range(10):
            F = random_tight_frame(mixed_spec, 6, 4, b=0.5, seed=seed)
            assert check_tight(F).is_tight

    def test_deterministic(self, m2_spec):
        F1 = random_tight_frame(m2_spec, 4, 2, seed=9)
        F2 = random_tight_frame(m2_spec, 4, 2, seed=9)
        for a, b in zip(F1.matrix.summands, F2.matrix.summands):
            np.testing.assert_array_equal(a, b)

    def test_square_gives_scaled_unitary(self, scalar_spec):
        F = random_tight_frame(scalar_spec, 3, 3, b=4.0, seed=0)
        assert is_unitary(0.5 * F.matrix, 1e-10)


class TestUnitaryInvariance:
    def test_left_right_unitary_invariance(self, m2_spec):
        rng = np.random.default_rng(7)
        F = random_tight_frame(m2_spec, 5, 3, b=1.0, seed=11)
        U = random_unitary(m2_spec, 5, rng)
        V = random_unitary(m2_spec, 3, rng)
        before = check_tight(F)
        after = check_tight(Frame(V @ F.matrix @ U))
        assert abs(after.b - before.b) <= 1e-10
        assert abs(after.residual - before.residual) <= 1e-10


def test_mercedes_gram_offdiagonals(mercedes):
    # |<f_i, f_j>| = 1/2 for distinct unit vectors at 120 degrees
    G = gram_matrix(mercedes)
    for i in range(3):
        for j in range(3):
            expected = 1.0 if i == j else 0.5
            assert abs(G.entry(i, j).blocks[0][0, 0]) == pytest.approx(expected)
