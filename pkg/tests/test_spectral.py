import numpy as np
import pytest

from regrich.errors import OrderingError
from regrich.spectral import (acyclicity, admissible_class_orders, check_order, from_blocks,
                              jordan_basis, jordan_block, jordan_matrix, jordan_type, mod_t_classes,
                              normal_order, pop1_from_type, rectangle_decomposition, torsion_order)

from conftest import OMEGA, big_type, random_jordan_type, well_conditioned


def match_types(jt, lams, blocks, tol=1e-5):
    """Compare a detected Jordan type with the prescribed one, up to eigenvalue order."""
    if jt.r != len(lams):
        return False
    for lam, bs in zip(lams, blocks):
        k = int(np.argmin(np.abs(jt.eigenvalues - lam)))
        if abs(jt.eigenvalues[k] - lam) > tol or sorted(jt.block_sizes[k]) != sorted(bs):
            return False
    return True


class TestJordanType:
    def test_diag(self):
        jt = jordan_type(np.diag([2.0, 1.0]))
        assert sorted(jt.eigenvalues.real) == [1, 2] and jt.block_sizes == [[1], [1]]

    def test_single_eigenvalue(self):
        from scipy.linalg import block_diag
        A = block_diag(jordan_block(1.0, 4), jordan_block(1.0, 2), jordan_block(1.0, 1))
        assert jordan_type(A).block_sizes == [[4, 2, 1]]

    def test_big(self, big_matrix):
        bj = big_type()
        assert match_types(jordan_type(big_matrix), bj.eigenvalues, bj.block_sizes)

    def test_random_conjugated(self):
        rng = np.random.default_rng(2)
        bad = 0
        for _ in range(100):
            d = int(rng.integers(1, 6))
            lams, blocks = random_jordan_type(rng, d)
            P = well_conditioned(rng, d, 20)
            A = P @ jordan_matrix(from_blocks(lams, blocks)) @ np.linalg.inv(P)
            bad += not match_types(jordan_type(A), lams, blocks)
        assert bad == 0

    def test_jordan_basis(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            d = int(rng.integers(1, 6))
            lams, blocks = random_jordan_type(rng, d)
            P = well_conditioned(rng, d, 20)
            A = P @ jordan_matrix(from_blocks(lams, blocks)) @ np.linalg.inv(P)
            jt = jordan_type(A)
            Q = jordan_basis(A, jt)
            assert np.allclose(np.linalg.solve(Q, A @ Q), jordan_matrix(jt), atol=1e-6)

    def test_nearly_merging_warning(self):
        jt = jordan_type(np.diag([1.0, 1.0 + 5e-6, 3.0]))
        assert any("ill-conditioned" in w for w in jt.warnings)


class TestClasses:
    def test_toroidal(self, toroidal):
        assert mod_t_classes(jordan_type(toroidal)).c == 1

    def test_powers_of_two(self):
        assert mod_t_classes(jordan_type(np.diag([1.0, 2.0, 4.0]))).c == 3

    def test_big(self, big_matrix):
        assert mod_t_classes(jordan_type(big_matrix)).c == 2

    def test_torsion_order(self):
        assert torsion_order(OMEGA) == 3
        assert torsion_order(-1.0) == 2
        assert torsion_order(np.exp(2j * np.pi * 7 / 61)) is None     # beyond the power bound
        assert torsion_order(np.exp(2j * np.pi * np.sqrt(2))) is None
        assert torsion_order(1.5) is None

    def test_detected_orders(self):
        cl = mod_t_classes(from_blocks([1, 1j, 2], [[1], [1], [1]]))
        assert cl.detected_orders == {(0, 1): 4}
        assert cl.c == 2


def _ordered(A_or_jt):
    jt = A_or_jt if hasattr(A_or_jt, "block_sizes") else jordan_type(A_or_jt)
    return normal_order(jt)


class TestRectangles:
    def test_big_counts(self, big_matrix):
        rd = rectangle_decomposition(*_ordered(big_matrix))
        assert (len(rd.c_rectangles), len(rd.e_rectangles), len(rd.j_rectangles)) == (4, 25, 64)
        assert rd.pop1 == 29 == 15 + 9 + 2 + 2 + 1

    def test_diag_two(self):
        rd = rectangle_decomposition(*_ordered(np.diag([2.0, 1.0])))
        banners = sorted(np.round([e.banner.real for e in rd.e_rectangles], 12))
        assert banners == [0.5, 1.0, 1.0, 2.0]
        assert rd.pop1 == 2

    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_scalar(self, d):
        rd = rectangle_decomposition(*_ordered(from_blocks([1.7], [[1] * d])))
        assert len(rd.j_rectangles) == d * d
        assert all(abs(J.banner - 1) < 1e-12 for J in rd.j_rectangles)
        assert rd.pop1 == d * d

    def test_counts_and_banners_random(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            d = int(rng.integers(1, 7))
            jt = from_blocks(*random_jordan_type(rng, d))
            ojt, cl = normal_order(jt)
            rd = rectangle_decomposition(ojt, cl)
            tau = sum(len(b) for b in ojt.block_sizes)
            assert len(rd.j_rectangles) == tau ** 2
            assert len(rd.e_rectangles) == ojt.r ** 2
            assert len(rd.c_rectangles) == cl.c ** 2
            assert rd.pop1 == sum(e.weight for e in rd.e_rectangles if abs(e.banner - 1) < 1e-9)
            for e in rd.e_rectangles:
                if e.equatorial:
                    assert abs(e.banner - 1) < 1e-12
                assert -2 * np.pi < e.argument < 2 * np.pi
            # banner 1 has the largest total weight
            totals = {}
            for e in rd.e_rectangles:
                key = (round(e.banner.real, 8), round(e.banner.imag, 8))
                totals[key] = totals.get(key, 0) + e.weight
            assert max(totals.values()) == rd.pop1

    def test_city_projection_inequality(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            k = [sorted(rng.integers(1, 6, size=rng.integers(1, 4)).tolist(), reverse=True) for _ in range(2)]
            jt = from_blocks([1.0, 3.0], k)
            rd = rectangle_decomposition(*normal_order(jt))
            w = {(e.row_eig, e.col_eig): e.weight for e in rd.e_rectangles}
            assert 2 * w[(0, 1)] <= w[(0, 0)] + w[(1, 1)]
            if 2 * w[(0, 1)] == w[(0, 0)] + w[(1, 1)]:
                assert len(k[0]) == len(k[1])

    def test_unordered_rejected(self):
        # -1 before 1 inside one class: angles must increase
        ojt, cl = normal_order(from_blocks([1.0, -1.0], [[1], [1]]))
        check_order(ojt, cl)
        bad = ojt.reordered([1, 0])
        with pytest.raises(OrderingError):
            rectangle_decomposition(bad, mod_t_classes(bad))

    def test_classes_must_be_consecutive(self):
        bad = from_blocks([1.0, 2.0, -1.0], [[1], [1], [1]])
        with pytest.raises(OrderingError):
            rectangle_decomposition(bad, mod_t_classes(bad))

    def test_latitude_and_weight(self):
        rd = rectangle_decomposition(*normal_order(from_blocks([2.0], [[3, 1]])))
        got = {(J.row_block, J.col_block): (J.weight, J.latitude) for J in rd.j_rectangles}
        assert got[((0, 3), (3, 4))] == (1, 1)
        assert got[((3, 4), (0, 3))] == (1, -1)
        assert got[((0, 3), (0, 3))] == (3, 0)

    def test_class_orders_pass_crossing(self, big_matrix):
        jt = jordan_type(big_matrix)
        for order in admissible_class_orders(jt):
            rectangle_decomposition(*normal_order(jt, class_order=order))


class TestAcyclicity:
    def test_toroidal(self, toroidal):
        assert acyclicity(toroidal) == 3

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_identity(self, d):
        assert acyclicity(np.eye(d)) == d * d

    def test_big(self, big_matrix):
        assert acyclicity(big_matrix) == 29

    def test_pop1_formula(self):
        assert pop1_from_type(from_blocks([1.0, 2.0], [[2, 1], [1]])) == (2 + 1 + 1 + 1) + 1


def test_branch_cut_canonicalized():
    # 1 - tiny*i must order like 1, before -1, and be flagged
    jt = from_blocks([-1.0, 1.0 - 1e-14j], [[1], [1]])
    ojt, cl = normal_order(jt)
    assert cl.c == 1
    assert abs(ojt.eigenvalues[0] - 1) < 1e-12
    assert any("branch cut" in w for w in ojt.warnings)
    check_order(ojt, cl)
    clean, _ = normal_order(from_blocks([-1.0, 1.0], [[1], [1]]))
    assert not any("branch cut" in w for w in clean.warnings)
