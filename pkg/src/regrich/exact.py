"""Exact arithmetic over the Gaussian rationals Q(i).

Used as an escape hatch for inputs with exact entries: ranks by
fraction-free (Bareiss) elimination over Z[i], exact adjoint Krylov spaces,
and the s = 2 transitivity oracle.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np
from sympy.polys.domains import QQ_I, ZZ_I
from sympy.polys.matrices import DomainMatrix

from .errors import DimensionError, ExactnessError, FormatError, SingularMatrixError


def gq(re, im=0):
    """Gaussian rational from two rationals (ints, Fractions or 'p/q' strings)."""
    return QQ_I(Fraction(re), Fraction(im))


def to_exact(x):
    """Coerce a python number or pair into QQ_I.  Floats must be dyadic-exact."""
    if isinstance(x, type(QQ_I(0))):
        return x
    if isinstance(x, (tuple, list)):
        if len(x) == 2 and all(isinstance(t, (tuple, list)) for t in x):
            (a, b), (p, q) = x
            return gq(Fraction(int(a), int(b)), Fraction(int(p), int(q)))
        if len(x) == 2:
            return gq(Fraction(x[0]), Fraction(x[1]))
        raise ExactnessError(f"cannot read exact entry {x!r}")
    if isinstance(x, complex):
        return gq(Fraction(x.real), Fraction(x.imag))
    if isinstance(x, (int, Fraction)):
        return gq(x)
    if isinstance(x, float):
        return gq(Fraction(x))
    raise ExactnessError(f"cannot read exact entry {x!r}")


def exact_matrix(M):
    """Nested lists of exact entries -> list of lists of QQ_I."""
    if isinstance(M, np.ndarray):
        raise ExactnessError("numpy arrays are not exact input")
    return [[to_exact(x) for x in row] for row in M]


def exact_matrix_from_json(obj):
    try:
        r, c = int(obj["rows"]), int(obj["cols"])
        ent = obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad matrix object: {exc}") from None
    if len(ent) != r * c:
        raise FormatError(f"expected {r * c} entries, got {len(ent)}")
    vals = []
    for e in ent:
        if not (isinstance(e, (list, tuple)) and len(e) == 2
                and all(isinstance(t, (list, tuple)) and len(t) == 2 for t in e)):
            raise ExactnessError("exact entries must be [[num,den],[num,den]]")
        vals.append(to_exact(e))
    return [vals[i * c:(i + 1) * c] for i in range(r)]


def to_complex(M):
    return np.array([[complex(float(x.x), float(x.y)) for x in row] for row in M])


def _den(x):
    return lcm(int(x.x.denominator), int(x.y.denominator))


def _row_to_zzi(row):
    L = 1
    for x in row:
        L = lcm(L, _den(x))
    return [ZZ_I(int(x.x * L), int(x.y * L)) for x in row]


def bareiss_rank(rows):
    """Rank of a matrix over Q(i) by fraction-free elimination over Z[i]."""
    M = [_row_to_zzi(r) for r in rows]
    if not M:
        return 0
    n, m = len(M), len(M[0])
    rank, prev = 0, ZZ_I(1)
    zero = ZZ_I(0)
    for col in range(m):
        piv = next((i for i in range(rank, n) if M[i][col] != zero), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        p = M[rank][col]
        for i in range(rank + 1, n):
            a = M[i][col]
            for j in range(col + 1, m):
                M[i][j] = ZZ_I.exquo(p * M[i][j] - a * M[rank][j], prev)
            M[i][col] = zero
        prev = p
        rank += 1
        if rank == n:
            break
    return rank


def vec_exact(M):
    """Column-major vectorization of a list-of-lists matrix."""
    r, c = len(M), len(M[0])
    return [M[i][j] for j in range(c) for i in range(r)]


def unvec_exact(v, r, c):
    return [[v[j * r + i] for j in range(c)] for i in range(r)]


class ExactSpan:
    """Incrementally maintained reduced echelon basis of a subspace of Q(i)^n."""

    def __init__(self, n):
        self.n = n
        self.rows = []   # echelon rows, pivot entry 1
        self.pivots = []

    def reduce(self, v):
        v = list(v)
        for row, p in zip(self.rows, self.pivots):
            a = v[p]
            if a:
                v = [x - a * y for x, y in zip(v, row)]
        return v

    def add(self, v):
        v = self.reduce(v)
        p = next((i for i, x in enumerate(v) if x), None)
        if p is None:
            return False
        inv = QQ_I(1) / v[p]
        v = [x * inv for x in v]
        # keep rows fully reduced
        for k, row in enumerate(self.rows):
            a = row[p]
            if a:
                self.rows[k] = [x - a * y for x, y in zip(row, v)]
        self.rows.append(v)
        self.pivots.append(p)
        return True

    @property
    def dim(self):
        return len(self.rows)


def _dm(M):
    return DomainMatrix(M, (len(M), len(M[0])), QQ_I)


def exact_inverse(A):
    D = _dm(A)
    if D.rank() < len(A):
        raise SingularMatrixError("exact matrix is singular")
    return D.inv().to_list()


def exact_span(mats):
    if not mats:
        raise DimensionError("empty span needs a shape")
    r, c = len(mats[0]), len(mats[0][0])
    S = ExactSpan(r * c)
    for M in mats:
        if len(M) != r or len(M[0]) != c:
            raise DimensionError("mixed shapes")
        S.add(vec_exact(M))
    return [unvec_exact(v, r, c) for v in S.rows]


def exact_krylov_adjoint(A, seeds, N=None):
    """Exact span{Ad_A^t(S) : t < N} for seeds S; stops at stabilization."""
    d = len(A)
    Ad, Ai = _dm(A), _dm(exact_inverse(A))
    S = ExactSpan(d * d)
    front = [s for s in seeds if S.add(vec_exact(s))]
    N = d * d if N is None else N
    for _ in range(N - 1):
        if not front:
            break
        new = []
        for X in front:
            Y = (Ad * _dm(X) * Ai).to_list()
            if S.add(vec_exact(Y)):
                new.append(Y)
        front = new
    return [unvec_exact(v, d, d) for v in S.rows]


def exact_lambda_space(A, Bs, N=None):
    d = len(A)
    Id = [[QQ_I(1) if i == j else QQ_I(0) for j in range(d)] for i in range(d)]
    return exact_krylov_adjoint(A, [Id] + list(Bs), N)


def exact_conj(P, M, Pinv=None):
    Pinv = exact_inverse(P) if Pinv is None else Pinv
    return (_dm(Pinv) * _dm(M) * _dm(P)).to_list()
