"""Jordan types, mod-T eigenvalue classes and the rectangle decomposition.

Index conventions: eigenvalues are numbered 0..r-1, Jordan blocks of an
eigenvalue are listed by decreasing size.  Intervals are half-open and
0-based.  Arguments theta are taken in [0, 2*pi).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np
import scipy.linalg as sla

from .errors import OrderingError
from .linalg import DEFAULT_CFG, check_invertible

TWO_PI = 2 * np.pi
# accept a merged eigenvalue cluster when (spread / ||A||)^size is at roundoff level
_MERGE_LEVEL = 1e-11
# rank threshold for powers of the nilpotent part, relative to ||A||^k
_STAIRCASE_TOL = 1e-8


@dataclass
class JordanType:
    eigenvalues: np.ndarray          # distinct eigenvalues
    block_sizes: list                # per eigenvalue, decreasing sizes
    warnings: list = field(default_factory=list)
    # per eigenvalue: (Z, N) with Z an orthonormal basis of the generalized
    # eigenspace and N the nilpotent part of A in that basis
    _gen: list | None = field(default=None, repr=False)

    @property
    def d(self):
        return int(sum(sum(b) for b in self.block_sizes))

    @property
    def r(self):
        return len(self.block_sizes)

    @property
    def multiplicities(self):
        return [sum(b) for b in self.block_sizes]

    def eigen_list(self):
        """Eigenvalues repeated with algebraic multiplicity."""
        return np.concatenate([[lam] * s for lam, s in zip(self.eigenvalues, self.multiplicities)])

    def reordered(self, order):
        order = list(order)
        gen = None if self._gen is None else [self._gen[i] for i in order]
        return JordanType(self.eigenvalues[order].copy(), [list(self.block_sizes[i]) for i in order],
                          list(self.warnings), gen)

    def to_json(self):
        return {"eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
                "block_sizes": [list(map(int, b)) for b in self.block_sizes],
                "warnings": list(self.warnings)}


def from_blocks(eigenvalues, block_sizes):
    """JordanType from a prescription (no matrix attached)."""
    ev = np.asarray(eigenvalues, dtype=complex)
    return JordanType(ev, [sorted(map(int, b), reverse=True) for b in block_sizes])


def jordan_block(lam, t):
    return lam * np.eye(t, dtype=complex) + np.eye(t, k=1)


def jordan_matrix(jt):
    """Block-diagonal Jordan normal form in the order of jt."""
    blocks = [jordan_block(lam, t) for lam, bs in zip(jt.eigenvalues, jt.block_sizes) for t in bs]
    return sla.block_diag(*blocks).astype(complex)


def _cluster(ev, nrm, cfg):
    """Group computed eigenvalues into numerical eigenvalue clusters.

    A defective eigenvalue with largest block t splits into points at
    distance ~ eps^(1/t) from their mean, so a fixed radius cannot work.  We
    walk the single-linkage dendrogram top-down and keep the largest node
    whose spread s satisfies (s/||A||)^size <= _MERGE_LEVEL, always merging
    points closer than the base tolerance.
    """
    from scipy.cluster.hierarchy import linkage, to_tree

    n = len(ev)
    if n == 1:
        return [[0]], [False]
    pts = np.column_stack([ev.real, ev.imag])
    root = to_tree(linkage(pts, method="single"))
    base = cfg.cluster_rel_tol * nrm
    out, wide = [], []

    def visit(node):
        idx = node.pre_order()
        vals = ev[idx]
        spread = np.max(np.abs(vals - vals.mean()))
        if node.is_leaf() or node.dist <= base or (spread / nrm) ** len(idx) <= _MERGE_LEVEL:
            out.append(sorted(idx))
            wide.append(not node.is_leaf() and node.dist > base)
        else:
            visit(node.get_left())
            visit(node.get_right())

    visit(root)
    return out, wide


def _nullities(N, nrm, s):
    out = [0]
    P = np.eye(N.shape[0], dtype=complex)
    for k in range(1, s + 1):
        P = P @ N
        sv = np.linalg.svd(P, compute_uv=False)
        thr = _STAIRCASE_TOL * max(nrm, 1.0) ** k
        out.append(int(np.sum(sv <= thr)))
    return out


def _blocks_from_nullities(nul, s):
    # number of blocks of size >= k is nul[k] - nul[k-1]; force it nonincreasing
    ge = [nul[k] - nul[k - 1] for k in range(1, len(nul))]
    for k in range(1, len(ge)):
        ge[k] = min(ge[k], ge[k - 1])
    ge = [max(g, 0) for g in ge] + [0]
    sizes = []
    for k in range(1, len(ge)):
        sizes += [k] * (ge[k - 1] - ge[k])
    sizes.sort(reverse=True)
    return sizes


def jordan_type(A, cfg=DEFAULT_CFG):
    """Numerical Jordan type of an invertible matrix."""
    A = check_invertible(A, cfg)
    d = A.shape[0]
    nrm = np.linalg.norm(A, 2)
    ev = np.linalg.eigvals(A)
    clusters, wide = _cluster(ev, nrm, cfg)
    means = np.array([ev[c].mean() for c in clusters])
    # canonical order: by modulus, then argument in [0, 2pi)
    order = np.lexsort((np.mod(np.angle(means), TWO_PI), np.round(np.abs(means), 9)))
    clusters = [clusters[i] for i in order]
    wide = [wide[i] for i in order]
    means = means[order]
    warnings = []
    if len(means) > 1:
        gaps = [abs(means[i] - means[j]) for i in range(len(means)) for j in range(i + 1, len(means))]
        if min(gaps) <= 10 * cfg.cluster_rel_tol * nrm:
            warnings.append("ill-conditioned clustering: distinct eigenvalues nearly merge")

    blocks, gen = [], []
    for ci, (c, lam) in enumerate(zip(clusters, means)):
        s = len(c)
        if len(means) > 1:
            others = np.delete(means, ci)
            radius = 0.5 * np.min(np.abs(others - lam))
        else:
            radius = np.inf
        T, Z, sdim = sla.schur(A, output="complex", sort=lambda x: abs(x - lam) < radius)
        if sdim != s:
            warnings.append(f"cluster at {lam:.6g} selected {sdim} Schur values, expected {s}")
            s = sdim
        N = T[:s, :s] - lam * np.eye(s)
        nul = _nullities(N, nrm, s)
        if nul[-1] != s:
            warnings.append(f"cluster at {lam:.6g} is not numerically a single eigenvalue")
        sizes = _blocks_from_nullities(nul, s)
        if sum(sizes) < s:
            sizes += [1] * (s - sum(sizes))
            sizes.sort(reverse=True)
        if wide[ci] and len(sizes) > 1:
            # a truly defective cluster of this spread would be a single block
            warnings.append(f"ill-conditioned clustering: cluster at {lam:.6g} may be distinct eigenvalues")
        blocks.append(sizes)
        gen.append((Z[:, :s].copy(), N))
    return JordanType(means, blocks, warnings, gen)


def jordan_basis(A, jt):
    """P with P^-1 A P equal (numerically) to jordan_matrix(jt).

    jt must come from jordan_type(A) (possibly reordered)."""
    if jt._gen is None:
        raise ValueError("Jordan type carries no generalized eigenspaces")
    cols = []
    for (Z, N), sizes in zip(jt._gen, jt.block_sizes):
        s = N.shape[0]
        tmax = max(sizes)
        kers = [np.zeros((s, 0), dtype=complex)]
        P = np.eye(s, dtype=complex)
        for k in range(1, tmax + 1):
            P = P @ N
            nk = sum(min(t, k) for t in sizes)
            _, _, vh = np.linalg.svd(P)
            kers.append(vh[s - nk:].conj().T if nk else np.zeros((s, 0), dtype=complex))
        chains = []  # (length, top vector)
        for k in range(tmax, 0, -1):
            b = sizes.count(k)
            if b == 0:
                continue
            W = [kers[k - 1]] + [np.linalg.matrix_power(N, L - k) @ x[:, None] for L, x in chains]
            W = np.hstack(W)
            if W.shape[1]:
                Qw, _ = np.linalg.qr(W)
                Y = kers[k] - Qw @ (Qw.conj().T @ kers[k])
            else:
                Y = kers[k]
            _, _, vh = np.linalg.svd(Y, full_matrices=False)
            for i in range(b):
                x = kers[k] @ vh[i].conj()
                chains.append((k, x / np.linalg.norm(x)))
        chains.sort(key=lambda c: -c[0])
        for L, x in chains:
            vecs = [np.linalg.matrix_power(N, L - 1 - j) @ x for j in range(L)]
            cols += [Z @ v for v in vecs]
    return np.array(cols).T


# ---------------------------------------------------------------- mod T classes

@dataclass
class ModTClasses:
    class_of: list            # eigenvalue index -> class index
    c: int
    detected_orders: dict     # (i, j) -> q with (l_i/l_j)^q = 1

    def members(self, K):
        return [i for i, k in enumerate(self.class_of) if k == K]


def torsion_order(z, cfg=DEFAULT_CFG):
    """Least q <= max power with z^q = 1 within tolerance, else None."""
    if abs(np.log(abs(z))) > cfg.root_tol:
        return None
    phi = np.angle(z) / TWO_PI
    for q in range(1, cfg.max_power_for_roots_of_unity + 1):
        x = q * phi
        if abs(x - round(x)) <= q * cfg.root_tol:
            return q
    return None


def mod_t_classes(jt, cfg=DEFAULT_CFG):
    ev = jt.eigenvalues
    n = len(ev)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    orders = {}
    for i in range(n):
        for j in range(i + 1, n):
            q = torsion_order(ev[i] / ev[j], cfg)
            if q is not None:
                orders[(i, j)] = q
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    roots = []
    class_of = []
    for i in range(n):
        r = find(i)
        if r not in roots:
            roots.append(r)
        class_of.append(roots.index(r))
    return ModTClasses(class_of, len(roots), orders)


BRANCH_TOL = 1e-9


def _theta(z):
    """Argument in [0, 2pi); angles just below 2pi are snapped to 0."""
    t = float(np.mod(np.angle(z), TWO_PI))
    return 0.0 if TWO_PI - t < BRANCH_TOL else t


def _near_cut(z):
    t = abs(float(np.angle(z)))
    return 0.0 < t < BRANCH_TOL


def _same_class(z, w, cfg):
    return torsion_order(z / w, cfg) is not None


def _cross_condition(reps, cfg):
    """Same banner class c-rectangles must be strictly NW/SE of each other."""
    c = len(reps)
    rects = [(K, L) for K in range(c) for L in range(c) if K != L]
    for a in range(len(rects)):
        K, L = rects[a]
        for b in range(a + 1, len(rects)):
            K2, L2 = rects[b]
            if _same_class(reps[L] / reps[K], reps[L2] / reps[K2], cfg):
                if (K - K2) * (L - L2) <= 0:
                    return False
    return True


def normal_order(jt, cfg=DEFAULT_CFG, class_order=None):
    """Reorder a Jordan type into normal-form order.

    Classes are consecutive, angles increase within a class, and the class
    order satisfies the crossing condition on c-rectangles of equal banner
    class.  Returns (ordered JordanType, ModTClasses of the ordered type).
    """
    classes = mod_t_classes(jt, cfg)
    ev = jt.eigenvalues
    members = [sorted(classes.members(K), key=lambda i: _theta(ev[i])) for K in range(classes.c)]
    reps = [ev[m[0]] for m in members]
    if class_order is None:
        key = sorted(range(classes.c), key=lambda K: (round(np.log(abs(reps[K])), 9), _theta(reps[K])))
        candidates = [tuple(key)]
        if not _cross_condition([reps[K] for K in key], cfg):
            if classes.c > 8:
                raise OrderingError("no admissible class order found by the heuristic; too many classes to search")
            candidates = [p for p in permutations(range(classes.c))
                          if _cross_condition([reps[K] for K in p], cfg)]
            if not candidates:
                raise OrderingError("no class order satisfies the crossing condition")
        class_order = candidates[0]
    order = [i for K in class_order for i in members[K]]
    ojt = jt.reordered(order)
    cut = [z for z in ev if _near_cut(z)]
    if cut:
        ojt.warnings.append("eigenvalue(s) " + ", ".join(f"{z:.6g}" for z in cut)
                            + " lie on the branch cut of arg; angle canonicalized to 0")
    return ojt, mod_t_classes(ojt, cfg)


def admissible_class_orders(jt, cfg=DEFAULT_CFG, limit=None):
    """All class orders (of the classes of jt) passing the crossing condition."""
    classes = mod_t_classes(jt, cfg)
    ev = jt.eigenvalues
    reps = []
    for K in range(classes.c):
        m = sorted(classes.members(K), key=lambda i: _theta(ev[i]))
        reps.append(ev[m[0]])
    out = []
    for p in permutations(range(classes.c)):
        if _cross_condition([reps[K] for K in p], cfg):
            out.append(p)
            if limit and len(out) >= limit:
                break
    return out


# ---------------------------------------------------------------- rectangles

@dataclass
class JRect:
    row_block: tuple
    col_block: tuple
    row_eig: int
    col_eig: int
    weight: int
    latitude: int
    banner: complex
    equatorial: bool


@dataclass
class ERect:
    row_eig: int
    col_eig: int
    rows: tuple
    cols: tuple
    banner: complex
    argument: float
    equatorial: bool
    weight: int


@dataclass
class CRect:
    row_class: int
    col_class: int
    rows: tuple
    cols: tuple
    banner_class: complex     # representative banner value
    equatorial: bool
    weight: int
    pop1: int


@dataclass
class RectangleDecomposition:
    j_rectangles: list
    e_rectangles: list
    c_rectangles: list
    pop1: int
    eig_intervals: list
    class_intervals: list
    block_intervals: list     # per eigenvalue, list of block intervals

    def to_json(self):
        def c2(z):
            return [float(np.real(z)), float(np.imag(z))]
        return {
            "counts": {"c": len(self.c_rectangles), "e": len(self.e_rectangles), "j": len(self.j_rectangles)},
            "pop1": int(self.pop1),
            "j_rectangles": [{"rows": list(j.row_block), "cols": list(j.col_block), "weight": j.weight,
                              "latitude": j.latitude, "banner": c2(j.banner), "equatorial": j.equatorial}
                             for j in self.j_rectangles],
            "e_rectangles": [{"rows": list(e.rows), "cols": list(e.cols), "banner": c2(e.banner),
                              "argument": e.argument, "equatorial": e.equatorial, "weight": e.weight}
                             for e in self.e_rectangles],
            "c_rectangles": [{"rows": list(c.rows), "cols": list(c.cols), "banner_class": c2(c.banner_class),
                              "equatorial": c.equatorial, "weight": c.weight, "pop1": c.pop1}
                             for c in self.c_rectangles],
        }


def pop1_from_type(jt):
    return int(sum(min(a, b) for bs in jt.block_sizes for a in bs for b in bs))


def check_order(jt, classes):
    seen, prev = set(), None
    for k in classes.class_of:
        if k != prev:
            if k in seen:
                raise OrderingError("equivalent eigenvalues are not consecutive")
            seen.add(k)
            prev = k
    th = [_theta(z) for z in jt.eigenvalues]
    for i in range(1, len(th)):
        if classes.class_of[i] == classes.class_of[i - 1] and not th[i] > th[i - 1]:
            raise OrderingError("angles must increase within a class")


def rectangle_decomposition(jt, classes):
    check_order(jt, classes)
    ev = jt.eigenvalues
    th = [_theta(z) for z in ev]
    pos = 0
    eig_iv, blk_iv = [], []
    for bs in jt.block_sizes:
        start = pos
        ivs = []
        for t in bs:
            ivs.append((pos, pos + t))
            pos += t
        eig_iv.append((start, pos))
        blk_iv.append(ivs)
    cls_iv = []
    for K in range(classes.c):
        m = classes.members(K)
        cls_iv.append((eig_iv[m[0]][0], eig_iv[m[-1]][1]))

    J, Er = [], []
    for k in range(jt.r):
        for l in range(jt.r):
            banner = ev[l] / ev[k]
            w_e = 0
            for i, (a0, a1) in enumerate(blk_iv[k]):
                for j, (b0, b1) in enumerate(blk_iv[l]):
                    w = min(a1 - a0, b1 - b0)
                    w_e += w
                    J.append(JRect((a0, a1), (b0, b1), k, l, w, j - i, banner, k == l and i == j))
            Er.append(ERect(k, l, eig_iv[k], eig_iv[l], banner, th[l] - th[k], k == l, w_e))
    C = []
    for K in range(classes.c):
        for L in range(classes.c):
            es = [e for e in Er if classes.class_of[e.row_eig] == K and classes.class_of[e.col_eig] == L]
            rk, rl = classes.members(K)[0], classes.members(L)[0]
            C.append(CRect(K, L, cls_iv[K], cls_iv[L], ev[rl] / ev[rk], K == L,
                           sum(e.weight for e in es), sum(e.weight for e in es if e.equatorial)))
    pop1 = sum(e.weight for e in Er if e.equatorial)
    return RectangleDecomposition(J, Er, C, pop1, eig_iv, cls_iv, blk_iv)


def acyclicity(A, cfg=DEFAULT_CFG):
    """acyc Ad_A: total weight of the banner-1 e-rectangles."""
    return pop1_from_type(jordan_type(A, cfg))
