"""Rigidity bounds and constructive transitive witnesses for Ad_A.

A witness is a list (Id, X_2, ..., X_n) whose Ad_A-Krylov space is
transitive.  The construction works in a Jordan basis ordered as in
spectral.normal_order and assembles generators rectangle by rectangle:

    j-rectangles   random generators, the first one Id on diagonal blocks
    e-rectangles   sums over j-rectangles of equal latitude
    c-rectangles   sums over e-rectangles of equal banner, slots split by
                   the sign of the argument; Hankel-type recipe for the
                   exceptional case (banners +-1, one block each, equal sizes)
    whole matrix   sums over c-rectangles of equal banner class

Random coefficients stand in for "generic" choices; every witness is
checked before it is returned.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConstructionError
from .linalg import DEFAULT_CFG, adjoint_operator, check_invertible, krylov_reach
from .spectral import (admissible_class_orders, jordan_basis, jordan_type, mod_t_classes,
                       normal_order, pop1_from_type, rectangle_decomposition)
from .transitivity import is_transitive, sudoku_transitive


@dataclass
class RigidityReport:
    d: int
    c: int
    acyc: int
    upper_bound: int
    witness: list | None = None
    jordan: object = field(default=None, repr=False)

    def fiber_codim_lower(self, m):
        """Lower bound on the codimension of the poor fiber over A for m inputs."""
        if self.witness is None:
            raise ConstructionError("a verified witness is required", "fiber")
        return max(0, m + 1 - (len(self.witness) - 1))

    def to_json(self):
        out = {"d": self.d, "c": self.c, "acyc": self.acyc, "upper_bound": self.upper_bound,
               "known_interval": [2 if self.d >= 2 else 1,
                                  len(self.witness) if self.witness is not None else self.upper_bound]}
        if self.jordan is not None:
            out["jordan_type"] = self.jordan.to_json()
        return out


def rigidity_upper_bound(A, cfg=DEFAULT_CFG):
    A = check_invertible(A, cfg)
    jt = jordan_type(A, cfg)
    c = mod_t_classes(jt, cfg).c
    acyc = pop1_from_type(jt)
    d = A.shape[0]
    bound = 2 if c == d else acyc - c + 1
    return RigidityReport(d, c, acyc, bound, None, jt)


def _rand(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _close(a, b, tol=1e-8):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def _group_banners(items, key):
    groups = []
    for it in items:
        b = key(it)
        for g in groups:
            if _close(g[0], b):
                g[1].append(it)
                break
        else:
            groups.append((b, [it]))
    return groups


class _Builder:
    def __init__(self, jt, classes, rd, d, rng):
        self.jt, self.classes, self.rd, self.d, self.rng = jt, classes, rd, d, rng

    def zero(self):
        return np.zeros((self.d, self.d), dtype=complex)

    # -- j level
    def j_gens(self, J):
        (a0, a1), (b0, b1) = J.row_block, J.col_block
        out = []
        for i in range(J.weight):
            X = self.zero()
            if J.equatorial and i == 0:
                X[a0:a1, b0:b1] = np.eye(a1 - a0)
            else:
                X[a0:a1, b0:b1] = _rand(self.rng, (a1 - a0, b1 - b0))
            out.append(X)
        return out

    # -- e level: list of generators, Id_E first when equatorial
    def e_gens(self, E):
        js = [J for J in self.rd.j_rectangles if J.row_eig == E.row_eig and J.col_eig == E.col_eig]
        lats = sorted({J.latitude for J in js}, key=lambda l: (l != 0, l))
        out = []
        for lat in lats:
            group = [J for J in js if J.latitude == lat]
            gens = [self.j_gens(J) for J in group]
            n = max(J.weight for J in group)
            for i in range(n):
                Y = self.zero()
                for g in gens:
                    if i < len(g):
                        Y += g[i]
                out.append(Y)
        return out

    # -- c level
    def is_exceptional(self, C):
        if not C.equatorial:
            return False
        es = [e for e in self.rd.e_rectangles if self._in_c(e, C)]
        if len(es) != 4:
            return False
        if not all(_close(e.banner, 1) or _close(e.banner, -1) for e in es):
            return False
        js = [J for J in self.rd.j_rectangles if self._in_c(J, C)]
        return len(js) == 4 and len({J.weight for J in js}) == 1

    def _in_c(self, x, C):
        cl = self.classes.class_of
        return cl[x.row_eig] == C.row_class and cl[x.col_eig] == C.col_class

    def c_gens(self, C):
        """Generators for C; for equatorial C the identity on C is the last one."""
        if self.is_exceptional(C):
            return self.exceptional_gens(C)
        es = [e for e in self.rd.e_rectangles if self._in_c(e, C)]
        eg = {(e.row_eig, e.col_eig): self.e_gens(e) for e in es}
        nonid = [e for e in es if not e.equatorial]
        slots = {}
        width = 0
        for _, group in _group_banners(nonid, lambda e: e.banner):
            pos = [e for e in group if e.argument >= 0]
            neg = [e for e in group if e.argument < 0]
            n = max([len(eg[(e.row_eig, e.col_eig)]) for e in pos], default=0)
            s = max([len(eg[(e.row_eig, e.col_eig)]) for e in neg], default=0)
            for e in pos:
                for i, X in enumerate(eg[(e.row_eig, e.col_eig)]):
                    slots.setdefault(i, []).append(X)
            for e in neg:
                for i, X in enumerate(eg[(e.row_eig, e.col_eig)]):
                    slots.setdefault(n + i, []).append(X)
            width = max(width, n + s)
        if not C.equatorial:
            return [sum(slots.get(j, [self.zero()])) for j in range(width)]
        M = C.pop1
        if width >= M:
            raise ConstructionError(f"banner slots {width} exceed pop1 {M}", "c-rectangle")
        ident = self.zero()
        for e in es:
            if e.equatorial:
                g = eg[(e.row_eig, e.col_eig)]
                ident += g[0]
                for i, X in enumerate(g[1:]):
                    slots.setdefault(i, []).append(X)
        out = [sum(slots.get(j, [self.zero()])) for j in range(M - 1)]
        return out + [ident]

    def exceptional_gens(self, C):
        (r0, r1) = C.rows
        k = (r1 - r0) // 2
        ev = self.jt.eigenvalues
        i1, i2 = self.classes.members(C.row_class)
        mu1, mu2 = ev[i1], ev[i2]
        # rescale so that Ad_A on C becomes Ad of Diag(J, -J), J = J_k(1)
        S = np.diag(np.concatenate([mu1 ** np.arange(k), mu2 ** np.arange(k)]))
        Si = np.diag(1 / np.diag(S))
        Xs = [np.eye(k, dtype=complex)]
        for _ in range(k - 1):
            X = _rand(self.rng, (k, k))
            Xs.append(X - np.trace(X) / k * np.eye(k))   # traceless: invariant complement of Id
        Z = np.zeros((k, k), dtype=complex)
        local = []
        for X in Xs[1:]:
            local.append(np.block([[X, Z], [Z, Z]]))
        for X in Xs:
            local.append(np.block([[Z, X], [X, X]]))
        local.append(np.eye(2 * k, dtype=complex))
        out = []
        for Y in local:
            G = self.zero()
            G[r0:r1, r0:r1] = S @ Y @ Si
            out.append(G)
        return out

    # -- whole matrix
    def world_gens(self):
        c = self.classes.c
        m = self.rd.pop1 - c + 1
        per_c = {(C.row_class, C.col_class): self.c_gens(C) for C in self.rd.c_rectangles}
        slots = [self.zero() for _ in range(m)]
        for C in self.rd.c_rectangles:
            g = per_c[(C.row_class, C.col_class)]
            if C.equatorial:
                if len(g) > m:
                    raise ConstructionError(f"equatorial block needs {len(g)} > {m}", "world")
                for i, X in enumerate(g[:-1]):
                    slots[i] += X
                slots[m - 1] += g[-1]
            else:
                if len(g) > m - 1:
                    raise ConstructionError(f"off-diagonal block needs {len(g)} > {m - 1}", "world")
                for i, X in enumerate(g):
                    slots[i] += X
        ident = slots[m - 1]
        rest = [X for X in slots[: m - 1] if np.linalg.norm(X) > 0]
        return [ident] + rest


def _verify(T, gens, rd, cfg, seed):
    """Nested sudoku check of the Ad_T reach of gens (normal-form basis)."""
    d = T.shape[0]
    sp = krylov_reach(adjoint_operator(T, cfg), gens, d * d, cfg)

    def leaf(cell):
        return is_transitive(cell, cfg, seed=seed).transitive

    def rel(ivs, off):
        return [(a - off, b - off) for a, b in ivs]

    def e_cell(cell, k, l):
        rows = rel(rd.block_intervals[k], rd.eig_intervals[k][0])
        cols = rel(rd.block_intervals[l], rd.eig_intervals[l][0])
        ok = sudoku_transitive(cell, rows, cols, cfg, seed, lambda cs, i, j: leaf(cs))
        return bool(ok) or leaf(cell)

    def c_cell(cell, K, L):
        mk = [i for i, x in enumerate(rd_classes) if x == K]
        ml = [i for i, x in enumerate(rd_classes) if x == L]
        rows = rel([rd.eig_intervals[i] for i in mk], rd.class_intervals[K][0])
        cols = rel([rd.eig_intervals[i] for i in ml], rd.class_intervals[L][0])
        ok = sudoku_transitive(cell, rows, cols, cfg, seed,
                               lambda cs, i, j: e_cell(cs, mk[i], ml[j]))
        return bool(ok) or leaf(cell)

    rd_classes = _classes_of(rd)
    ok = sudoku_transitive(sp, rd.class_intervals, rd.class_intervals, cfg, seed,
                           lambda cs, i, j: c_cell(cs, i, j))
    return bool(ok), sp


def _classes_of(rd):
    out = []
    for (a, b) in rd.eig_intervals:
        K = next(i for i, (c0, c1) in enumerate(rd.class_intervals) if c0 <= a and b <= c1)
        out.append(K)
    return out


def construct_witness(A, cfg=DEFAULT_CFG, seed=0, attempts=3, return_report=False):
    """Verified generators (Id first) whose Ad_A-reach is transitive."""
    A = check_invertible(A, cfg)
    d = A.shape[0]
    if d == 1:
        W = [np.eye(1, dtype=complex)]
        return (W, rigidity_upper_bound(A, cfg)) if return_report else W
    rep = rigidity_upper_bound(A, cfg)
    jt = rep.jordan
    rng = np.random.default_rng(seed)
    orders = [None] + admissible_class_orders(jt, cfg, limit=6)
    last = None
    for order in orders:
        try:
            ojt, classes = normal_order(jt, cfg, class_order=order)
        except Exception as exc:   # ordering failures fall through to the next order
            last = exc
            continue
        P = jordan_basis(A, ojt)
        Pi = np.linalg.inv(P)
        T = Pi @ A @ P
        rd = rectangle_decomposition(ojt, classes)
        for attempt in range(attempts):
            if classes.c == d:
                B = np.ones((d, d), dtype=complex) if attempt == 0 else _rand(rng, (d, d))
                gens = [np.eye(d, dtype=complex), B]
            else:
                try:
                    gens = _Builder(ojt, classes, rd, d, rng).world_gens()
                except ConstructionError as exc:
                    last = exc
                    break
            if len(gens) > rep.upper_bound:
                last = ConstructionError(f"witness length {len(gens)} exceeds bound {rep.upper_bound}", "length")
                break
            ok, _ = _verify(T, gens, rd, cfg, seed)
            if ok:
                W = [np.eye(d, dtype=complex)] + [P @ G @ Pi for G in gens[1:]]
                rep.witness = W
                return (W, rep) if return_report else W
            last = ConstructionError("reach of the candidate witness is not transitive", "verify")
    if isinstance(last, ConstructionError):
        raise last
    raise ConstructionError(f"no admissible ordering produced a witness: {last}", "ordering")


def fiber_codim_lower_bound(A, m, cfg=DEFAULT_CFG, seed=0):
    """max(0, m + 1 - (w - 1)) with w the length of a certified witness."""
    if m < 1:
        raise ValueError("m must be >= 1")
    W = construct_witness(A, cfg, seed)
    return max(0, m + 1 - (len(W) - 1))
