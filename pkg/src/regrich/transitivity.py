"""Transitivity of matrix subspaces.

A space L of t x s matrices is transitive if L.v = C^t for every nonzero v.
Dually it fails iff there are unit v, w with w* L v = 0 for all L in the
space; the search below looks for such pairs.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ExactnessError, PartitionError
from .linalg import DEFAULT_CFG, MatrixSpace, null_space, span_basis

TRANSITIVE = "Transitive"
NOT_TRANSITIVE = "NotTransitive"
INCONCLUSIVE = "Inconclusive"


@dataclass
class TransitivityVerdict:
    kind: str
    margin: float
    witness: tuple | None = None   # (v, w), unit vectors
    certificate: str | None = None  # GeneralizedToeplitz, SudokuDecomposition, ExactOracle, Numeric, Dimension, FullSpace

    @property
    def transitive(self):
        return self.kind == TRANSITIVE

    def to_json(self):
        out = {"kind": self.kind, "margin": float(self.margin), "certificate": self.certificate}
        if self.witness is not None:
            v, w = self.witness
            out["witness"] = {"v": [[float(z.real), float(z.imag)] for z in v],
                              "w": [[float(z.real), float(z.imag)] for z in w]}
        return out


def witness_residual(space, v, w):
    """max_k |w* L_k v| over the (orthonormal) basis."""
    if space.dim == 0:
        return 0.0
    vals = np.einsum("t,kts,s->k", np.conj(w), space.basis, v)
    return float(np.max(np.abs(vals)))


def _unit(x):
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def _rand_unit(rng, shape):
    x = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return _unit(x)


def _alternate(L, V, iters, stop=1e-10):
    """Batched alternating minimization of ||w* M(v)|| over unit v, w.

    L: (K, t, s) basis; V: (R, s) starting points.  Returns V, W, residuals.
    Stops early once some start is below `stop` (polishing takes over).
    """
    K, t, s = L.shape
    for it in range(iters):
        M = np.einsum("kts,rs->rtk", L, V)
        U, _, _ = np.linalg.svd(M, full_matrices=True)
        W = U[:, :, t - 1]
        G = np.einsum("rt,kts->rks", W.conj(), L)
        _, _, Vh = np.linalg.svd(G, full_matrices=True)
        V = Vh[:, s - 1, :].conj()
        if it % 5 == 4 and np.min(np.linalg.norm(np.einsum("rt,kts,rs->rk", W.conj(), L, V), axis=1)) < stop:
            break
    res = np.linalg.norm(np.einsum("rt,kts,rs->rk", W.conj(), L, V), axis=1)
    return V, W, res


def _polish(L, v, w, iters=60):
    """Gauss-Newton on y^T L_k v = 0 (y = conj w) with linear normalizations.

    Returns the best unit pair seen; stops if the iteration blows up.
    """
    K, t, s = L.shape

    def resid(v, y):
        v, w = _unit(v), _unit(y.conj())
        return v, w, float(np.linalg.norm(np.einsum("t,kts,s->k", w.conj(), L, v)))

    y = w.conj()
    v0, y0 = v.copy(), y.copy()
    best = resid(v, y)
    for _ in range(iters):
        F = np.concatenate([np.einsum("t,kts,s->k", y, L, v),
                            [v0.conj() @ v - 1, y0.conj() @ y - 1]])
        if not np.all(np.isfinite(F)) or np.linalg.norm(F) < 1e-30:
            break
        Jv = np.einsum("t,kts->ks", y, L)
        Jy = np.einsum("kts,s->kt", L, v)
        J = np.zeros((K + 2, s + t), dtype=complex)
        J[:K, :s], J[:K, s:] = Jv, Jy
        J[K, :s] = v0.conj()
        J[K + 1, s:] = y0.conj()
        try:
            step = np.linalg.lstsq(J, -F, rcond=None)[0]
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        v, y = v + step[:s], y + step[s:]
        cur = resid(v, y)
        if cur[2] < best[2]:
            best = cur
        if np.linalg.norm(step) < 1e-15:
            break
    return best


def _search(space, cfg, restarts, seed, iters=60):
    """Best (v, w, residual) over multi-start alternating minimization."""
    t, s = space.rows, space.cols
    L = space.basis
    rng = np.random.default_rng(seed)
    if space.dim == 0:
        return _rand_unit(rng, s), _rand_unit(rng, t), 0.0
    V = _rand_unit(rng, (restarts, s))
    V, W, res = _alternate(L, V, iters)
    order = np.argsort(res)
    best = (V[order[0]], W[order[0]], float(res[order[0]]))
    # polish the most promising starts
    for i in order[: min(4, restarts)]:
        if res[i] > 1e-2:
            break
        v, w, r = _polish(L, V[i], W[i])
        if r < best[2]:
            best = (v, w, r)
        if best[2] <= cfg.zero_tol_abs:
            break
    if best[2] > cfg.zero_tol_abs and best[2] < 1e-2:
        # slow linear convergence: keep alternating from the best point
        V2, W2, r2 = _alternate(L, best[0][None, :], 400)
        v, w, r = _polish(L, V2[0], W2[0])
        if r < best[2]:
            best = (v, w, r)
    return best


def default_restarts(space):
    return 8 * (space.rows + space.cols)


def witness_search(space, cfg=DEFAULT_CFG, restarts=None, seed=0):
    """Look for unit (v, w) with w* L v = 0 on the space; None if not found."""
    restarts = default_restarts(space) if restarts is None else restarts
    v, w, r = _search(space, cfg, restarts, seed)
    if r <= cfg.zero_tol_abs:
        return v, w, r
    return None


def _probe_margin(space, seed, n=16):
    """Smallest t-th singular value of M(v) over a few random unit v."""
    t, s = space.rows, space.cols
    if space.dim < t:
        return 0.0
    V = _rand_unit(np.random.default_rng(seed), (n, s))
    M = np.einsum("kts,rs->rtk", space.basis, V)
    return float(np.min(np.linalg.svd(M, compute_uv=False)[:, t - 1]))


def generalized_toeplitz_check(space, cfg=DEFAULT_CFG):
    """Lambda is cut out by relations inside single diagonals, forcing no entry to zero.

    Tested as: Lambda is the direct sum of its projections onto the diagonals
    (sum of the per-diagonal evaluation ranks equals dim Lambda) and every
    entry is somewhere nonzero.  Then each 1x1 sudoku cell is C, and the
    pairwise surjectivity onto C^2 for entries on distinct diagonals follows.
    Pairwise surjectivity alone is not enough: a generic 3-dimensional
    P Lambda Q with Lambda = {x_12 = 0} in gl(2) passes it and is not transitive.
    """
    d = space.rows
    if space.rows != space.cols:
        raise ValueError("generalized Toeplitz check needs a square ambient space")
    if space.dim == 0:
        return False
    n = d * d
    Ev = space.basis.reshape(space.dim, n).T  # row p = evaluation functional at position p
    norms = np.linalg.norm(Ev, axis=1)
    thr = max(cfg.rank_tol_rel, 10 * cfg.zero_tol_abs)
    if np.any(norms <= thr):
        return False
    diag = (np.arange(n) % d) - (np.arange(n) // d)  # column - row
    total = 0
    for k in range(-d + 1, d):
        s = np.linalg.svd(Ev[diag == k], compute_uv=False)
        total += int(np.sum(s > thr))
    return total == space.dim


def _flip_cols(space):
    return MatrixSpace(space.rows, space.cols, space.basis[:, :, ::-1].copy(), space.tol)


def _flip_rows(space):
    return MatrixSpace(space.rows, space.cols, space.basis[:, ::-1, :].copy(), space.tol)


def is_transitive(space, cfg=DEFAULT_CFG, seed=0, restarts=None, method="auto",
                  exact_basis=None):
    """Decide transitivity; see TransitivityVerdict for the possible outcomes.

    method="numeric" skips the structural certificates and the exact oracle.
    """
    t, s = space.rows, space.cols
    restarts = default_restarts(space) if restarts is None else restarts
    if space.dim == 0:
        rng = np.random.default_rng(seed)
        return TransitivityVerdict(NOT_TRANSITIVE, 0.0,
                                   (_rand_unit(rng, s), _rand_unit(rng, t)), "Dimension")

    if space.dim < s + t - 1:
        v, w, r = _search(space, cfg, restarts, seed)
        if r > cfg.zero_tol_abs:
            v, w, r = _search(space, cfg, 4 * restarts, seed + 1)
        if r <= cfg.zero_tol_abs:
            return TransitivityVerdict(NOT_TRANSITIVE, r, (v, w), "Dimension")
        return TransitivityVerdict(INCONCLUSIVE, r, None, "Dimension")

    if method == "auto":
        if space.is_full():
            return TransitivityVerdict(TRANSITIVE, _probe_margin(space, seed), None, "FullSpace")
        if t == s:
            for sp in (space, _flip_cols(space), _flip_rows(space)):
                if generalized_toeplitz_check(sp, cfg):
                    return TransitivityVerdict(TRANSITIVE, _probe_margin(space, seed), None,
                                               "GeneralizedToeplitz")
        if exact_basis is not None and s == 2:
            ok, hint = _source2_analysis(exact_basis)
            if ok:
                return TransitivityVerdict(TRANSITIVE, _probe_margin(space, seed), None, "ExactOracle")
            v, w = _witness_from_hint(space, hint, cfg, seed)
            return TransitivityVerdict(NOT_TRANSITIVE, 0.0, (v, w), "ExactOracle")

    v, w, r = _search(space, cfg, restarts, seed)
    if r <= cfg.zero_tol_abs:
        return TransitivityVerdict(NOT_TRANSITIVE, r, (v, w), "Numeric")
    if r > 100 * cfg.rank_tol_rel:
        return TransitivityVerdict(TRANSITIVE, r, None, "Numeric")
    return TransitivityVerdict(INCONCLUSIVE, r, None, "Numeric")


# ---------------------------------------------------------------- sudoku cells

def _check_partition(parts, n):
    parts = [tuple(int(x) for x in p) for p in parts]
    pos = 0
    for a, b in parts:
        if a != pos or b <= a:
            raise PartitionError(f"intervals must be consecutive and nonempty: {parts}")
        pos = b
    if pos != n:
        raise PartitionError(f"intervals must cover [0, {n}): {parts}")
    return parts


def intervals_from_sizes(sizes):
    out, pos = [], 0
    for k in sizes:
        out.append((pos, pos + k))
        pos += k
    return out


def cell_space(space, rows, cols, cfg=DEFAULT_CFG):
    """Lambda^[R]: R-blocks of members that vanish outside R and the two
    off-diagonal corner regions (strictly above-left, strictly below-right)."""
    (a, b), (c, e) = rows, cols
    t, s = space.rows, space.cols
    I, J = np.meshgrid(np.arange(t), np.arange(s), indexing="ij")
    allowed = ((I >= a) & (I < b) & (J >= c) & (J < e)) | ((I < a) & (J < c)) | ((I >= b) & (J >= e))
    K = space.dim
    if K == 0:
        return span_basis([], cfg, shape=(b - a, e - c))
    C = space.basis[:, ~allowed].T  # forbidden entries as functionals on coefficients
    N = null_space(C, cfg, scale=1.0) if C.shape[0] else np.eye(K, dtype=complex)
    blocks = np.einsum("kn,kij->nij", N, space.basis[:, a:b, c:e])
    return span_basis(list(blocks), cfg, shape=(b - a, e - c))


def sudoku_transitive(space, row_partition, col_partition, cfg=DEFAULT_CFG, seed=0,
                      cell_decider=None):
    """True if every cell space is transitive, None if some cell is not shown to be.

    cell_decider(cell_space, i, j) may replace the default is_transitive call.
    """
    rp = _check_partition(row_partition, space.rows)
    cp = _check_partition(col_partition, space.cols)
    for i, R in enumerate(rp):
        for j, Cc in enumerate(cp):
            cs = cell_space(space, R, Cc, cfg)
            if cell_decider is not None:
                ok = cell_decider(cs, i, j)
            else:
                ok = is_transitive(cs, cfg, seed=seed).transitive
            if not ok:
                return None
    return True


# ---------------------------------------------------------------- exact oracle

def _source2_analysis(exact_basis):
    """Exact decision for t x 2 spaces.  Returns (transitive, hint)."""
    from sympy import Poly, symbols
    from sympy.polys.domains import QQ_I
    from sympy.polys.matrices import DomainMatrix

    mats = list(exact_basis)
    GR = type(QQ_I(0))
    for M in mats:
        for row in M:
            if len(row) != 2:
                raise ExactnessError("source dimension must be 2")
            for x in row:
                if not isinstance(x, GR):
                    raise ExactnessError("basis entries must be exact Gaussian rationals")
    if not mats:
        return False, ("any",)
    t = len(mats[0])
    K = len(mats)
    if K < t:
        return False, ("any",)
    z = symbols("z")
    R = QQ_I[z]
    cols = [[R.from_sympy(0) + R.convert(M[i][0]) + R.convert(M[i][1]) * R.gens[0]
             for i in range(t)] for M in mats]
    g = None
    for idx in combinations(range(K), t):
        D = DomainMatrix([[cols[k][i] for k in idx] for i in range(t)], (t, t), R)
        m = D.det()
        if m == R.zero:
            continue
        g = m if g is None else R.gcd(g, m)
        if R.to_sympy(g).is_number:
            break
    if g is None:
        return False, ("any",)
    gp = Poly(R.to_sympy(g), z)
    if gp.degree() > 0:
        return False, ("root", [complex(c) for c in gp.all_coeffs()])
    # v = (0, 1)
    from .exact import bareiss_rank
    if bareiss_rank([[M[i][1] for M in mats] for i in range(t)]) < t:
        return False, ("infinity",)
    return True, None


def exact_oracle_source2(space, exact_basis=None):
    """Exact transitivity for spaces of t x 2 matrices with Gaussian-rational entries."""
    if exact_basis is None:
        exact_basis = getattr(space, "exact_basis", None) if space is not None else None
        if exact_basis is None:
            raise ExactnessError("an exact basis is required")
    return _source2_analysis(exact_basis)[0]


def _witness_from_hint(space, hint, cfg, seed):
    t = space.rows
    if hint[0] == "root":
        z = np.roots(hint[1])[0]
        v = np.array([1, z], dtype=complex)
    elif hint[0] == "infinity":
        v = np.array([0, 1], dtype=complex)
    else:
        v, w, _ = _search(space, cfg, default_restarts(space), seed)
        return v, w
    v = v / np.linalg.norm(v)
    M = np.einsum("kts,s->tk", space.basis, v)
    U, _, _ = np.linalg.svd(M, full_matrices=True)
    return v, U[:, t - 1]
