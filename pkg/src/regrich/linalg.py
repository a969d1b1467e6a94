"""Dense complex linear algebra with tolerance-controlled rank decisions.

Conventions
-----------
Matrices are numpy complex arrays.  ``vec`` stacks columns (column-major),
so that ``vec(A @ X @ B) == kron(B.T, A) @ vec(X)``.  With this convention
the adjoint ``X -> A X A^-1`` has matrix ``kron(inv(A).T, A)``.

A :class:`MatrixSpace` keeps an orthonormal basis (Frobenius inner product)
as an array of shape ``(dim, rows, cols)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, SingularMatrixError, ZeroVectorError


@dataclass(frozen=True)
class ToleranceConfig:
    rank_tol_rel: float = 1e-9
    zero_tol_abs: float = 1e-10
    max_power_for_roots_of_unity: int = 60
    # eigenvalue clustering radius relative to ||A||
    cluster_rel_tol: float = 1e-6
    # tolerance for torsion / modulus tests on eigenvalue ratios
    root_tol: float = 1e-8
    # relative tolerance for elementary constraint relations
    constraint_tol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_tol_rel", "zero_tol_abs", "max_power_for_roots_of_unity",
                     "cluster_rel_tol", "root_tol", "constraint_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


DEFAULT_CFG = ToleranceConfig()


def as_matrix(M, rows=None, cols=None):
    """Coerce to a finite 2-d complex array."""
    A = np.array(M, dtype=complex)
    if A.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {A.shape}")
    if rows is not None and A.shape != (rows, cols):
        raise DimensionError(f"expected shape {(rows, cols)}, got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def vec(B):
    return np.asarray(B).reshape(-1, order="F")


def unvec(v, rows, cols):
    return np.asarray(v).reshape((rows, cols), order="F")


def E(i, j, rows, cols=None):
    """Matrix unit with a single 1 at (i, j) (0-based)."""
    M = np.zeros((rows, rows if cols is None else cols), dtype=complex)
    M[i, j] = 1
    return M


def orth_rows(X, tol_abs):
    """Orthonormal rows spanning the row space of X; singular values below tol_abs dropped."""
    X = np.atleast_2d(X)
    if X.shape[0] == 0:
        return np.zeros((0, X.shape[1]), dtype=complex)
    _, s, vh = np.linalg.svd(X, full_matrices=False)
    r = int(np.sum(s > tol_abs))
    return vh[:r].copy()


def numerical_rank(X, cfg=DEFAULT_CFG, scale=None):
    X = np.atleast_2d(np.asarray(X, dtype=complex))
    if X.size == 0:
        return 0
    s = np.linalg.svd(X, compute_uv=False)
    ref = s[0] if scale is None else scale
    if ref <= cfg.zero_tol_abs:
        return 0
    return int(np.sum(s > cfg.rank_tol_rel * ref))


def null_space(X, cfg=DEFAULT_CFG, scale=None):
    """Orthonormal columns spanning the numerical kernel of X."""
    X = np.atleast_2d(np.asarray(X, dtype=complex))
    n = X.shape[1]
    if X.shape[0] == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(X, full_matrices=True)
    ref = (s[0] if len(s) else 0.0) if scale is None else scale
    if ref <= cfg.zero_tol_abs:
        return np.eye(n, dtype=complex)
    r = int(np.sum(s > cfg.rank_tol_rel * ref))
    return vh[r:].conj().T


@dataclass
class MatrixSpace:
    rows: int
    cols: int
    basis: np.ndarray  # (dim, rows, cols), Frobenius-orthonormal
    tol: float = DEFAULT_CFG.rank_tol_rel
    exact_basis: list | None = field(default=None, repr=False)

    @property
    def dim(self):
        return self.basis.shape[0]

    @property
    def vecs(self):
        """Basis as rows of vectorized (column-major) matrices."""
        return self.basis.transpose(0, 2, 1).reshape(self.dim, -1)

    @classmethod
    def from_vecs(cls, V, rows, cols, tol=DEFAULT_CFG.rank_tol_rel):
        V = np.asarray(V).reshape(-1, rows * cols)
        basis = V.reshape(-1, cols, rows).transpose(0, 2, 1)
        return cls(rows, cols, np.ascontiguousarray(basis), tol)

    def contains(self, M, cfg=DEFAULT_CFG):
        v = vec(as_matrix(M, self.rows, self.cols))
        nv = np.linalg.norm(v)
        if nv <= cfg.zero_tol_abs:
            return True
        Q = self.vecs
        res = v - Q.T @ (Q.conj() @ v)
        return np.linalg.norm(res) <= 1e3 * cfg.rank_tol_rel * nv

    def transform(self, P, Q):
        """The space P . S . Q (not orthonormal in general, so re-spanned)."""
        mats = [P @ L @ Q for L in self.basis]
        return span_basis(mats, ToleranceConfig(rank_tol_rel=self.tol),
                          shape=(P.shape[0], Q.shape[1]))

    def is_full(self):
        return self.dim == self.rows * self.cols


def span_basis(mats, cfg=DEFAULT_CFG, shape=None):
    """Orthonormal basis of span(mats); rank by sigma >= rank_tol_rel * sigma_max."""
    mats = [np.asarray(M, dtype=complex) for M in mats]
    if not mats:
        if shape is None:
            raise DimensionError("empty list needs an explicit shape")
        r, c = shape
        return MatrixSpace(r, c, np.zeros((0, r, c), dtype=complex), cfg.rank_tol_rel)
    r, c = mats[0].shape
    if shape is not None and tuple(shape) != (r, c):
        raise DimensionError("shape mismatch")
    for M in mats:
        if M.shape != (r, c):
            raise DimensionError(f"mixed shapes {M.shape} and {(r, c)}")
    X = np.array([vec(M) for M in mats])
    s = np.linalg.svd(X, compute_uv=False)
    if s[0] <= cfg.zero_tol_abs:
        return MatrixSpace(r, c, np.zeros((0, r, c), dtype=complex), cfg.rank_tol_rel)
    Q = orth_rows(X, cfg.rank_tol_rel * s[0])
    return MatrixSpace.from_vecs(Q, r, c, cfg.rank_tol_rel)


@dataclass
class LinearOperator:
    matrix: np.ndarray

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __call__(self, v):
        return self.matrix @ v


def check_invertible(A, cfg=DEFAULT_CFG):
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise DimensionError("matrix must be square")
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0 or s[-1] / s[0] <= cfg.zero_tol_abs:
        raise SingularMatrixError("matrix is singular to working tolerance")
    return A


def adjoint_operator(A, cfg=DEFAULT_CFG):
    """Matrix of B -> A B A^-1 acting on column-major vec(B)."""
    A = check_invertible(A, cfg)
    return LinearOperator(np.kron(np.linalg.inv(A).T, A))


def krylov_reach(H, seeds, N, cfg=DEFAULT_CFG, shape=None):
    """span{H^t(v_i) : 0 <= t < N}, seeds given as matrices.

    Works Arnoldi-style: only the directions added at the previous step are
    pushed through H, which spans the same chain of spaces.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    seeds = [np.asarray(S, dtype=complex) for S in seeds]
    if shape is None:
        if not seeds:
            raise DimensionError("need seeds or a shape")
        shape = seeds[0].shape
    r, c = shape
    n = r * c
    if H.dim != n:
        raise DimensionError(f"operator dim {H.dim} does not match {shape}")
    for S in seeds:
        if S.shape != (r, c):
            raise DimensionError("seed shape mismatch")
    if not seeds:
        return MatrixSpace(r, c, np.zeros((0, r, c), dtype=complex), cfg.rank_tol_rel)

    X = np.array([vec(S) for S in seeds])
    s0 = np.linalg.svd(X, compute_uv=False)[0]
    if s0 <= cfg.zero_tol_abs:
        return MatrixSpace(r, c, np.zeros((0, r, c), dtype=complex), cfg.rank_tol_rel)
    Q = orth_rows(X, cfg.rank_tol_rel * s0)
    hnorm = max(np.linalg.norm(H.matrix, 2), cfg.zero_tol_abs)
    front = Q
    for _ in range(N - 1):
        if front.shape[0] == 0 or Q.shape[0] == n:
            break
        cand = (H.matrix @ front.T).T
        # two rounds of projection for stability
        for _ in range(2):
            cand = cand - (cand @ Q.conj().T) @ Q
        front = orth_rows(cand, cfg.rank_tol_rel * hnorm)
        if front.shape[0]:
            front = front - (front @ Q.conj().T) @ Q
            front = orth_rows(front, 0.5)
            Q = np.vstack([Q, front])
    return MatrixSpace.from_vecs(Q, r, c, cfg.rank_tol_rel)


def space_action(space, v, cfg=DEFAULT_CFG):
    """(dim, orthonormal rows) of Lambda . v = {L v : L in space}."""
    v = np.asarray(v, dtype=complex).ravel()
    if v.shape[0] != space.cols:
        raise DimensionError("vector length does not match source dimension")
    nv = np.linalg.norm(v)
    if nv <= cfg.zero_tol_abs:
        raise ZeroVectorError("v must be nonzero")
    if space.dim == 0:
        return 0, np.zeros((0, space.rows), dtype=complex)
    imgs = space.basis @ (v / nv)  # (dim, rows)
    Q = orth_rows(imgs, cfg.rank_tol_rel)
    return Q.shape[0], Q


def matrix_to_json(M):
    M = np.asarray(M, dtype=complex)
    return {"rows": int(M.shape[0]), "cols": int(M.shape[1]),
            "entries": [[float(z.real), float(z.imag)] for z in M.ravel()]}


def is_exact_entries(obj):
    """Exact entries look like [[num, den], [num, den]]."""
    try:
        e = obj["entries"][0]
        return isinstance(e[0], (list, tuple))
    except (KeyError, IndexError, TypeError):
        return False


def matrix_from_json(obj):
    from .errors import FormatError
    try:
        r, c = int(obj["rows"]), int(obj["cols"])
        ent = obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad matrix object: {exc}") from None
    if len(ent) != r * c:
        raise FormatError(f"expected {r * c} entries, got {len(ent)}")
    vals = []
    for e in ent:
        if isinstance(e, (int, float)):
            vals.append(complex(e))
        elif isinstance(e[0], (list, tuple)):
            (a, b), (p, q) = e
            vals.append(complex(a / b, p / q))
        else:
            vals.append(complex(e[0], e[1]))
    M = np.array(vals, dtype=complex).reshape(r, c)
    if not np.all(np.isfinite(M)):
        raise FormatError("non-finite entry")
    return M
