"""Elementary eigenvalue constraints, classification and good matches.

Eigenvalues are listed with multiplicity (0-based indices into that list).
Canonical relations:

    type 1: l_a * l_c = l_b ** 2          (a, b, c distinct)
    type 2: l_a * l_d = l_b * l_c         (a, b, c, d distinct)
    type 3: l_a = -l_b
    type 4: l_a = l_b
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import UnsupportedClassError
from .linalg import DEFAULT_CFG, as_matrix
from .spectral import jordan_basis, jordan_type

UNCONSTRAINED = "Unconstrained"
ICONSTRAINED = "IConstrained"
MULTICONSTRAINED = "Multiconstrained"


@dataclass(frozen=True)
class ConstraintRecord:
    ctype: int
    indices: tuple


@dataclass
class Classification:
    kind: str
    ctype: int | None
    constraints: list
    derogatory: bool
    jt: object = field(default=None, repr=False)

    def label(self):
        return f"IConstrained({self.ctype})" if self.kind == ICONSTRAINED else self.kind


def _eq(p, q, tol):
    # scale-free comparison; |p/q - 1| small <=> log-moduli and angles agree
    return abs(p / q - 1) <= tol


def constraints_of_values(lams, cfg=DEFAULT_CFG):
    lams = np.asarray(lams, dtype=complex)
    n = len(lams)
    tol = cfg.constraint_tol
    out = []
    for a, b in combinations(range(n), 2):
        if _eq(lams[a], lams[b], tol):
            out.append(ConstraintRecord(4, (a, b)))
        elif _eq(lams[a], -lams[b], tol):
            out.append(ConstraintRecord(3, (a, b)))
    # type 1: {a, c} unordered, b the middle term
    for a, c in combinations(range(n), 2):
        for b in range(n):
            if b in (a, c):
                continue
            if _eq(lams[a] * lams[c], lams[b] ** 2, tol):
                out.append(ConstraintRecord(1, (a, b, c)))
    # type 2: one record per 4-set and pairing {{a,d},{b,c}}
    for quad in combinations(range(n), 4):
        a = quad[0]
        for d in quad[1:]:
            b, c = [x for x in quad[1:] if x != d]
            if _eq(lams[a] * lams[d], lams[b] * lams[c], tol):
                out.append(ConstraintRecord(2, (a, b, c, d)))
    return out


def elementary_constraints(jt, cfg=DEFAULT_CFG):
    """All elementary constraints among the eigenvalues of a Jordan type."""
    return constraints_of_values(jt.eigen_list(), cfg)


def classify(A, cfg=DEFAULT_CFG, jt=None):
    A = as_matrix(A)
    jt = jordan_type(A, cfg) if jt is None else jt
    derog = any(len(b) >= 2 for b in jt.block_sizes)
    cons = elementary_constraints(jt, cfg)
    if derog or len(cons) >= 2:
        return Classification(MULTICONSTRAINED, None, cons, derog, jt)
    if not cons:
        return Classification(UNCONSTRAINED, None, cons, derog, jt)
    return Classification(ICONSTRAINED, cons[0].ctype, cons, derog, jt)


def _eig_basis(A, lams):
    """Unit eigenvectors for the simple eigenvalues lams, in that order."""
    w, V = np.linalg.eig(A)
    cols = []
    used = set()
    for lam in lams:
        i = min((i for i in range(len(w)) if i not in used), key=lambda i: abs(w[i] - lam))
        used.add(i)
        cols.append(V[:, i] / np.linalg.norm(V[:, i]))
    return np.array(cols).T


def adapted_basis(A, classification=None, cfg=DEFAULT_CFG):
    """Basis putting A in canonical diagonal form, or modified Jordan form for type 4."""
    A = as_matrix(A)
    cl = classify(A, cfg) if classification is None else classification
    if cl.kind == MULTICONSTRAINED:
        raise UnsupportedClassError("multiconstrained matrices have no adapted basis")
    jt = cl.jt if cl.jt is not None else jordan_type(A, cfg)
    lams = jt.eigen_list()
    n = len(lams)
    if cl.kind == ICONSTRAINED and cl.ctype == 4:
        k = next(i for i, b in enumerate(jt.block_sizes) if b == [2])
        order = [k] + [i for i in range(jt.r) if i != k]
        ojt = jt.reordered(order)
        P = jordan_basis(A, ojt)
        lam = ojt.eigenvalues[0]
        P[:, 1] = lam * P[:, 1]
        return P
    head = list(cl.constraints[0].indices) if cl.kind == ICONSTRAINED else []
    order = head + [i for i in range(n) if i not in head]
    return _eig_basis(A, lams[order])


def _conj(P, B):
    return np.linalg.solve(P, B @ P)


def good_match(A, B, cfg=DEFAULT_CFG, classification=None):
    A, B = as_matrix(A), as_matrix(B)
    cl = classify(A, cfg) if classification is None else classification
    P = adapted_basis(A, cl, cfg)
    Bp = _conj(P, B)
    scale = max(np.max(np.abs(Bp)), 1e-300)
    off = ~np.eye(len(Bp), dtype=bool)
    if np.any(np.abs(Bp[off]) <= cfg.zero_tol_abs * scale):
        return False
    if cl.kind == ICONSTRAINED and cl.ctype == 3:
        if abs(Bp[0, 0] - Bp[1, 1]) <= cfg.zero_tol_abs * scale:
            return False
    return True


def rich_pair_shortcut(A, B, cfg=DEFAULT_CFG):
    """True when A is not multiconstrained and B is a good match; else None."""
    cl = classify(A, cfg)
    if cl.kind == MULTICONSTRAINED:
        return None
    return True if good_match(A, B, cfg, cl) else None
