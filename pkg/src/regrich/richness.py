"""Richness of matrix data (A, B_1..B_m) and regularity ranks.

Lambda_N(A) is the Ad_A-Krylov space of (Id, B_1..B_m) after N steps and
Lambda(A) its stabilization.  A datum is rich when Lambda(A) is transitive.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constraints import UNCONSTRAINED, classify
from .errors import DimensionError, FormatError, ZeroVectorError
from .linalg import (DEFAULT_CFG, MatrixSpace, adjoint_operator, as_matrix, check_invertible,
                     krylov_reach, matrix_from_json, matrix_to_json, orth_rows, space_action, span_basis)
from .spectral import jordan_type
from .transitivity import (INCONCLUSIVE, NOT_TRANSITIVE, TRANSITIVE, TransitivityVerdict,
                           _probe_margin, _search, is_transitive)


@dataclass
class Datum:
    A: np.ndarray
    B: list
    exact: tuple | None = field(default=None, repr=False)  # (A, [B]) over Q(i)

    def __post_init__(self):
        self.A = as_matrix(self.A)
        d = self.A.shape[0]
        if self.A.shape != (d, d):
            raise DimensionError("A must be square")
        self.B = [as_matrix(Bk, d, d) for Bk in self.B]

    @property
    def d(self):
        return self.A.shape[0]

    @property
    def m(self):
        return len(self.B)

    def is_real(self, tol=0.0):
        return all(np.all(np.abs(M.imag) <= tol) for M in [self.A] + self.B)

    def conjugated(self, P):
        Pi = np.linalg.inv(P)
        return Datum(Pi @ self.A @ P, [Pi @ Bk @ P for Bk in self.B])

    def recombined(self, Q):
        Q = np.asarray(Q)
        return Datum(self.A, [sum(Q[i, j] * self.B[j] for j in range(self.m)) for i in range(Q.shape[0])])

    @classmethod
    def from_json(cls, obj):
        from .exact import exact_matrix_from_json
        from .linalg import is_exact_entries
        try:
            Aobj, Bobjs = obj["A"], obj.get("B", [])
        except (KeyError, TypeError, AttributeError):
            raise FormatError("datum needs keys 'A' and 'B'") from None
        A = matrix_from_json(Aobj)
        B = [matrix_from_json(b) for b in Bobjs]
        exact = None
        if is_exact_entries(Aobj) and all(is_exact_entries(b) for b in Bobjs):
            exact = (exact_matrix_from_json(Aobj), [exact_matrix_from_json(b) for b in Bobjs])
        return cls(A, B, exact)

    def to_json(self):
        return {"A": matrix_to_json(self.A), "B": [matrix_to_json(b) for b in self.B]}


def lambda_chain(datum, cfg=DEFAULT_CFG, N=None):
    """Lambda_N for N = 1, 2, ... up to stabilization (or N); returns (space, dims)."""
    d = datum.d
    H = adjoint_operator(datum.A, cfg)
    seeds = [np.eye(d, dtype=complex)] + list(datum.B)
    Nmax = d * d if N is None else N
    dims = []
    for n in range(1, Nmax + 1):
        sp = krylov_reach(H, seeds, n, cfg)
        dims.append(sp.dim)
        if N is None and len(dims) >= 2 and dims[-1] == dims[-2]:
            break
    return sp, dims


def stabilization_index(datum, cfg=DEFAULT_CFG):
    _, dims = lambda_chain(datum, cfg)
    n = len(dims)
    while n > 1 and dims[n - 2] == dims[-1]:
        n -= 1
    return n


def lambda_space(datum, N=None, cfg=DEFAULT_CFG):
    d = datum.d
    H = adjoint_operator(datum.A, cfg)
    seeds = [np.eye(d, dtype=complex)] + list(datum.B)
    return krylov_reach(H, seeds, d * d if N is None else N, cfg)


def conspicuous_poor_check(datum, cfg=DEFAULT_CFG):
    """(P, positions) of common off-diagonal zeros of P^-1 B_k P, or None.

    Positions are 0-based (row, col).  Requires d simple eigenvalues.
    """
    A = check_invertible(datum.A, cfg)
    d = datum.d
    jt = jordan_type(A, cfg)
    if jt.r != d:
        return None
    w, P = np.linalg.eig(A)
    P = P / np.linalg.norm(P, axis=0)
    conj = [np.linalg.solve(P, Bk @ P) for Bk in datum.B]
    scale = max([1.0] + [float(np.max(np.abs(C))) for C in conj])
    pos = []
    for i in range(d):
        for j in range(d):
            if i != j and all(abs(C[i, j]) <= cfg.zero_tol_abs * scale for C in conj):
                pos.append((i, j))
    return (P, pos) if pos else None


def _witness_from_position(P, i0, j0):
    v = P[:, j0] / np.linalg.norm(P[:, j0])
    w = np.linalg.inv(P)[i0].conj()
    return v, w / np.linalg.norm(w)


def _fast_path_applies(datum, cfg):
    if datum.d < 2:
        return False
    cl = classify(datum.A, cfg)
    return cl.kind == UNCONSTRAINED


def is_rich(datum, cfg=DEFAULT_CFG, seed=0, method="auto", exact=None):
    """Transitivity verdict for Lambda(datum).

    Fast path for unconstrained A: poor iff the conjugated B's share an
    off-diagonal zero.  exact=True uses Gaussian-rational arithmetic when the
    datum carries exact entries.
    """
    d = datum.d
    use_exact = (exact is True or (exact is None and method == "exact")) and datum.exact is not None
    if use_exact:
        return _is_rich_exact(datum, cfg, seed)
    if d == 1:
        return TransitivityVerdict(TRANSITIVE, 1.0, None, "FullSpace")
    if method == "auto" and _fast_path_applies(datum, cfg):
        cpc = conspicuous_poor_check(datum, cfg)
        if cpc is not None:
            P, pos = cpc
            v, w = _witness_from_position(P, *pos[0])
            return TransitivityVerdict(NOT_TRANSITIVE, 0.0, (v, w), "Conspicuous")
        return TransitivityVerdict(TRANSITIVE, _probe_margin(lambda_space(datum, None, cfg), seed),
                                   None, "GeneralizedToeplitz")
    sp = lambda_space(datum, None, cfg)
    return is_transitive(sp, cfg, seed=seed, method="numeric" if method == "numeric" else "auto")


def _is_rich_exact(datum, cfg, seed):
    from .exact import exact_lambda_space, to_complex
    from .transitivity import _source2_analysis, _witness_from_hint
    Ae, Be = datum.exact
    d = len(Ae)
    basis = exact_lambda_space(Ae, Be)
    sp = span_basis([to_complex(M) for M in basis], cfg, shape=(d, d))
    if len(basis) == d * d:
        return TransitivityVerdict(TRANSITIVE, _probe_margin(sp, seed), None, "ExactOracle")
    if len(basis) < 2 * d - 1:
        v, w, r = _search(sp, cfg, 32 * d, seed)
        return TransitivityVerdict(NOT_TRANSITIVE, r, (v, w), "Dimension")
    if d == 2:
        ok, hint = _source2_analysis(basis)
        if ok:
            return TransitivityVerdict(TRANSITIVE, _probe_margin(sp, seed), None, "ExactOracle")
        return TransitivityVerdict(NOT_TRANSITIVE, 0.0, _witness_from_hint(sp, hint, cfg, seed), "ExactOracle")
    # exactly diagonal A with exactly unconstrained simple spectrum
    diag = all(Ae[i][j] == 0 for i in range(d) for j in range(d) if i != j)
    if diag:
        lam = [Ae[i][i] for i in range(d)]
        if not _exact_constrained(lam):
            for i in range(d):
                for j in range(d):
                    if i != j and all(Bk[i][j] == 0 for Bk in Be):
                        P = np.eye(d, dtype=complex)
                        return TransitivityVerdict(NOT_TRANSITIVE, 0.0, _witness_from_position(P, i, j),
                                                   "ExactOracle")
            return TransitivityVerdict(TRANSITIVE, _probe_margin(sp, seed), None, "ExactOracle")
    return is_transitive(sp, cfg, seed=seed)


def _exact_constrained(lam):
    from itertools import combinations
    n = len(lam)
    for a, b in combinations(range(n), 2):
        if lam[a] == lam[b] or lam[a] == -lam[b]:
            return True
    for a, c in combinations(range(n), 2):
        for b in range(n):
            if b not in (a, c) and lam[a] * lam[c] == lam[b] * lam[b]:
                return True
    for q in combinations(range(n), 4):
        a = q[0]
        for dd in q[1:]:
            b, c = [x for x in q[1:] if x != dd]
            if lam[a] * lam[dd] == lam[b] * lam[c]:
                return True
    return False


def regularity_rank(datum, x0, N, cfg=DEFAULT_CFG):
    """dim(Lambda_N . A^N x0) - 1."""
    x0 = np.asarray(x0, dtype=complex).ravel()
    if x0.shape[0] != datum.d:
        raise DimensionError("x0 has the wrong length")
    if np.linalg.norm(x0) <= cfg.zero_tol_abs:
        raise ZeroVectorError("x0 must be nonzero")
    if N < 1:
        raise ValueError("N must be >= 1")
    sp = lambda_space(datum, N, cfg)
    y = np.linalg.matrix_power(datum.A, N) @ x0
    return space_action(sp, y, cfg)[0] - 1


@dataclass
class SingularStates:
    directions: list           # [(unit vector, corank)]
    complete: bool

    def __iter__(self):
        return iter(self.directions)

    def __len__(self):
        return len(self.directions)


def singular_states(datum, cfg=DEFAULT_CFG, seed=0, tries=8):
    """Directions v with dim(Lambda . v) < d, with corank d - dim(Lambda . v)."""
    d = datum.d
    verdict = is_rich(datum, cfg, seed)
    if verdict.kind == TRANSITIVE:
        return SingularStates([], True)
    sp = lambda_space(datum, None, cfg)
    if _fast_path_applies(datum, cfg):
        cpc = conspicuous_poor_check(datum, cfg)
        if cpc is not None and len(cpc[1]) == 1:
            P, [(i0, j0)] = cpc
            adapted = sp.transform(np.linalg.inv(P), P)
            e = np.zeros(d, dtype=complex)
            e[j0] = 1
            k, Q = space_action(adapted, e, cfg)
            if k == d - 1 and np.all(np.abs(Q[:, i0]) <= 1e3 * cfg.rank_tol_rel):
                v = P[:, j0] / np.linalg.norm(P[:, j0])
                return SingularStates([(v, 1)], True)
    found = []
    for s in range(tries):
        v, w, r = _search(sp, cfg, 8 * (2 * d), seed + s)
        if r > cfg.zero_tol_abs:
            continue
        if any(abs(np.vdot(u, v)) > 1 - 1e-6 for u, _ in found):
            continue
        k, _ = space_action(sp, v, cfg)
        found.append((v, d - k))
    return SingularStates(found, False)


def real_status(datum, verdict, tol=1e-12):
    """How the complex verdict transfers to real data (None for complex data)."""
    if not datum.is_real(tol):
        return None
    if verdict.kind == TRANSITIVE:
        return "rich over R as well"
    if verdict.kind == NOT_TRANSITIVE and verdict.witness is not None:
        v, w = verdict.witness
        if _real_up_to_phase(v) and _real_up_to_phase(w):
            return "poor over R as well"
        return "complex-poor, real status unverified"
    return "undecided"


def _real_up_to_phase(x, tol=1e-8):
    k = int(np.argmax(np.abs(x)))
    y = x * np.exp(-1j * np.angle(x[k]))
    return np.linalg.norm(y.imag) <= tol * np.linalg.norm(y)


@dataclass
class RegularityReport:
    stabilization_N: int
    lambda_dim: int
    rich: TransitivityVerdict
    singular_directions: list
    singular_complete: bool
    conspicuous: tuple | None
    real_status: str | None = None

    def to_json(self):
        out = {"stabilization_N": self.stabilization_N, "lambda_dim": self.lambda_dim,
               "rich": self.rich.to_json(),
               "singular_directions": [{"direction": [[float(z.real), float(z.imag)] for z in v],
                                        "corank": int(c)} for v, c in self.singular_directions],
               "singular_complete": self.singular_complete,
               "real_status": self.real_status}
        if self.conspicuous is not None:
            P, i0, j0 = self.conspicuous
            out["conspicuous"] = {"P": matrix_to_json(P), "i0": i0 + 1, "j0": j0 + 1}
        return out


def regularity_report(datum, cfg=DEFAULT_CFG, seed=0, method="auto", exact=None):
    sp, dims = lambda_chain(datum, cfg)
    n = len(dims)
    while n > 1 and dims[n - 2] == dims[-1]:
        n -= 1
    verdict = is_rich(datum, cfg, seed, method, exact)
    if verdict.kind == TRANSITIVE:
        ss = SingularStates([], True)
    else:
        ss = singular_states(datum, cfg, seed)
    cpc = conspicuous_poor_check(datum, cfg)
    consp = None if cpc is None else (cpc[0], *cpc[1][0])
    return RegularityReport(n, sp.dim, verdict, list(ss.directions), ss.complete, consp,
                            real_status(datum, verdict))
