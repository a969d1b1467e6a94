import numpy as np
import pytest

from regrich.constraints import (ICONSTRAINED, MULTICONSTRAINED, UNCONSTRAINED, adapted_basis,
                                 classify, constraints_of_values, elementary_constraints, good_match,
                                 rich_pair_shortcut)
from regrich.errors import UnsupportedClassError
from regrich.richness import Datum, is_rich
from regrich.spectral import jordan_block, jordan_type
from regrich.transitivity import TRANSITIVE

from conftest import rand_c, well_conditioned


def brute_constraints(lams, tol=1e-8):
    """Distinct elementary relations, as sets of index multisets, by direct enumeration."""
    from itertools import product
    n = len(lams)
    found = set()
    for i, j, k, l in product(range(n), repeat=4):
        if len({i, l} & {j, k}) or i == l and j == k:
            continue
        if abs(lams[i] * lams[l] - lams[j] * lams[k]) <= tol * abs(lams[j] * lams[k]):
            found.add(frozenset([frozenset([i, l]) if i != l else (i,), frozenset([j, k]) if j != k else (j,)]))
    for i, j in product(range(n), repeat=2):
        if i < j and abs(lams[i] + lams[j]) <= tol * abs(lams[j]):
            found.add(("neg", i, j))
        if i < j and abs(lams[i] - lams[j]) <= tol * abs(lams[j]):
            found.add(("eq", i, j))
    return found


class TestElementary:
    def test_powers_of_two(self):
        cons = elementary_constraints(jordan_type(np.diag([1.0, 2.0, 4.0])))
        assert [(c.ctype, c.indices) for c in cons] == [(1, (0, 1, 2))]

    def test_unconstrained(self):
        assert elementary_constraints(jordan_type(np.diag([1.0, 2.0, 3.0]))) == []

    def test_negatives(self):
        cons = constraints_of_values([2.0, -2.0, 5.0])
        assert [(c.ctype, c.indices) for c in cons] == [(3, (0, 1))]

    def test_type_two(self):
        cons = constraints_of_values([1.0, 2.0, 3.0, 6.0])
        assert [(c.ctype, sorted(c.indices)) for c in cons] == [(2, [0, 1, 2, 3])]

    def test_relations_hold(self, rng):
        for _ in range(200):
            lams = np.exp(rng.integers(-2, 3, size=4) * 0.5) * rng.choice([1, -1], size=4)
            for c in constraints_of_values(lams):
                x = lams[list(c.indices)]
                if c.ctype == 1:
                    assert np.isclose(x[0] * x[2], x[1] ** 2)
                elif c.ctype == 2:
                    assert np.isclose(x[0] * x[3], x[1] * x[2])
                elif c.ctype == 3:
                    assert np.isclose(x[0], -x[1])
                else:
                    assert np.isclose(x[0], x[1])

    def test_count_matches_brute(self, rng):
        for _ in range(200):
            lams = np.exp(rng.integers(-2, 3, size=4) * 0.5) * rng.choice([1, -1], size=4)
            assert len(constraints_of_values(lams)) == len(brute_constraints(lams))


class TestClassify:
    def test_unconstrained(self):
        assert classify(np.diag([1.0, 2.0, 3.0])).kind == UNCONSTRAINED

    def test_type_four(self):
        from scipy.linalg import block_diag
        cl = classify(block_diag(jordan_block(1.0, 2), [[3.0]]))
        assert cl.label() == "IConstrained(4)" and not cl.derogatory

    def test_derogatory(self):
        cl = classify(np.diag([1.0, 1.0, 3.0]))
        assert cl.kind == MULTICONSTRAINED and cl.derogatory

    def test_conjugation_invariant(self, rng):
        for A in (np.diag([1.0, 2.0, 4.0]), np.diag([2.0, -2.0, 5.0]), np.diag([1.0, 2.0, 3.0])):
            P = well_conditioned(rng, 3)
            assert classify(P @ A @ np.linalg.inv(P)).label() == classify(A).label()


class TestAdaptedBasis:
    def test_type_one_order(self):
        P = adapted_basis(np.diag([4.0, 1.0, 2.0]))
        D = np.linalg.solve(P, np.diag([4.0, 1.0, 2.0]) @ P)
        assert np.allclose(D, np.diag([1.0, 2.0, 4.0]))
        assert np.allclose(np.abs(P), np.abs(P).round())

    def test_modified_jordan(self, rng):
        from scipy.linalg import block_diag
        Q = well_conditioned(rng, 3)
        A = Q @ block_diag(jordan_block(5.0, 2), [[7.0]]) @ np.linalg.inv(Q)
        P = adapted_basis(A)
        assert np.allclose(np.linalg.solve(P, A @ P), [[5, 5, 0], [0, 5, 0], [0, 0, 7]], atol=1e-6)

    def test_multiconstrained(self):
        with pytest.raises(UnsupportedClassError):
            adapted_basis(np.diag([1.0, 1.0, 3.0]))


class TestGoodMatch:
    def test_all_ones(self):
        assert good_match(np.diag([1.0, 2.0, 4.0]), np.ones((3, 3)))

    def test_type_three_equal_diagonal(self):
        A = np.diag([2.0, -2.0, 5.0])
        assert not good_match(A, np.ones((3, 3)))
        B = np.ones((3, 3))
        B[1, 1] = 2
        assert good_match(A, B)

    def test_off_diagonal_zero(self):
        B = np.ones((3, 3))
        B[0, 2] = 0
        assert not good_match(np.diag([1.0, 2.0, 3.0]), B)


class TestShortcut:
    def test_type_one_generic(self, rng):
        A = np.diag([1.0, 2.0, 4.0])
        B = rand_c(rng, 3, 3)
        assert rich_pair_shortcut(A, B) is True
        assert is_rich(Datum(A, [B])).kind == TRANSITIVE

    def test_poor_pair(self, poor2):
        assert rich_pair_shortcut(poor2[0], poor2[1]) is None

    def test_multiconstrained(self):
        assert rich_pair_shortcut(np.diag([1.0, 1.0, 3.0]), np.ones((3, 3))) is None

    def test_soundness(self):
        rng = np.random.default_rng(11)
        pool = [np.diag([1.0, 2.0, 4.0]), np.diag([2.0, -2.0, 5.0]), np.diag([1.0, 3.0, 9.0, 5.0]),
                np.diag([1.0, 2.0, 3.0, 6.0]), np.diag([1.5, -0.5, 2.0])]
        hits = 0
        for trial in range(200):
            A0 = pool[trial % len(pool)]
            d = len(A0)
            P = well_conditioned(rng, d)
            A = P @ A0 @ np.linalg.inv(P)
            B = rand_c(rng, d, d)
            if rich_pair_shortcut(A, B):
                hits += 1
                assert is_rich(Datum(A, [B]), method="numeric").kind == TRANSITIVE
        assert hits >= 150
