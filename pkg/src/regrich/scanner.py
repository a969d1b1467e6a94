"""Polynomial parameterized systems and grid scans for singular constant inputs.

A system is a d x d matrix A(u) of polynomials in u_1..u_m.  At each grid
point the datum (A, B_1..B_m), B_k = (d_k A) A^{-1}, is tested with is_rich.
Where A(u) has simple spectrum we also track the conjugated derivatives
Q_k = P^{-1} B_k P in a continuity-tracked eigenbasis; a singular input
makes some off-diagonal entry vanish for every k simultaneously.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy import optimize

from .errors import DimensionError, FormatError, SingularMatrixError
from .linalg import DEFAULT_CFG
from .richness import Datum, is_rich, singular_states
from .transitivity import NOT_TRANSITIVE, TRANSITIVE

MERGE_RADIUS = 1e-6
REFINE_TOL = 1e-10


def _coef(c):
    if isinstance(c, (list, tuple)):
        if len(c) != 2:
            raise FormatError(f"complex coefficient must be [re, im], got {c}")
        return complex(float(c[0]), float(c[1]))
    if isinstance(c, (int, float)):
        return complex(c)
    raise FormatError(f"bad coefficient {c!r}")


class Poly:
    """Sparse multivariate polynomial: exps (n_mon, m) and coefs (n_mon,)."""

    def __init__(self, exps, coefs, m):
        self.m = m
        self.exps = np.asarray(exps, dtype=int).reshape(-1, m)
        self.coefs = np.asarray(coefs, dtype=complex).reshape(-1)
        if len(self.exps) != len(self.coefs):
            raise FormatError("monomial and coefficient counts differ")
        if np.any(self.exps < 0):
            raise FormatError("negative exponent")

    @classmethod
    def from_json(cls, obj, m):
        mons = obj.get("monomials") if isinstance(obj, dict) else None
        if mons is None:
            raise FormatError("entry needs a 'monomials' list")
        exps, coefs = [], []
        for mon in mons:
            e = mon.get("exps")
            if e is None or len(e) != m:
                raise FormatError(f"monomial exps must have length {m}")
            if any(int(x) != x for x in e):
                raise FormatError("exponents must be integers")
            exps.append([int(x) for x in e])
            coefs.append(_coef(mon.get("coef", 0)))
        return cls(exps if exps else np.zeros((0, m)), coefs, m)

    def to_json(self):
        return {"monomials": [{"exps": [int(x) for x in e], "coef": [c.real, c.imag]}
                              for e, c in zip(self.exps, self.coefs)]}

    def __call__(self, u):
        if not len(self.coefs):
            return 0j
        return complex(np.sum(self.coefs * np.prod(np.power(u, self.exps), axis=1)))

    def deriv(self, k, u):
        e = self.exps[:, k]
        mask = e > 0
        if not np.any(mask):
            return 0j
        ex = self.exps[mask].copy()
        ex[:, k] -= 1
        return complex(np.sum(self.coefs[mask] * e[mask] * np.prod(np.power(u, ex), axis=1)))


@dataclass
class ParamSystem:
    d: int
    m: int
    entries: list                 # d x d of Poly
    domain: list                  # [(lo, hi)] per parameter
    warnings: list = field(default_factory=list)

    @classmethod
    def from_json(cls, obj):
        try:
            d, m = int(obj["d"]), int(obj["m"])
            ent = obj["entries"]
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"system JSON needs d, m, entries: {exc}") from None
        if d < 1 or m < 1:
            raise FormatError("d and m must be positive")
        if len(ent) != d or any(len(row) != d for row in ent):
            raise DimensionError(f"entries must be a {d}x{d} grid")
        polys = [[Poly.from_json(e, m) for e in row] for row in ent]
        dom = obj.get("domain", [[-1.0, 1.0]] * m)
        if len(dom) != m or any(len(iv) != 2 or not float(iv[0]) <= float(iv[1]) for iv in dom):
            raise FormatError("domain must give one [lo, hi] per parameter")
        sys = cls(d, m, polys, [(float(a), float(b)) for a, b in dom])
        for corner in product(*sys.domain):
            A = sys.matrix(np.array(corner))
            s = np.linalg.svd(A, compute_uv=False)
            if s[-1] <= DEFAULT_CFG.zero_tol_abs * max(s[0], 1e-300):
                sys.warnings.append(f"A(u) singular at domain corner {list(corner)}")
        return sys

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def to_json(self):
        return {"d": self.d, "m": self.m,
                "entries": [[p.to_json() for p in row] for row in self.entries],
                "domain": [list(iv) for iv in self.domain]}

    def matrix(self, u):
        return np.array([[p(u) for p in row] for row in self.entries])

    def partial(self, k, u):
        return np.array([[p.deriv(k, u) for p in row] for row in self.entries])

    def is_real(self):
        return all(np.all(p.coefs.imag == 0) for row in self.entries for p in row)


def eval_system(sys, u, cfg=DEFAULT_CFG):
    """Datum (A(u), B_1..B_m) with B_k = (d_k A)(u) A(u)^{-1}."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.shape != (sys.m,):
        raise DimensionError(f"u must have {sys.m} coordinates")
    A = sys.matrix(u)
    s = np.linalg.svd(A, compute_uv=False)
    if s[-1] <= cfg.zero_tol_abs * max(s[0], 1e-300):
        raise SingularMatrixError(f"A(u) is singular at u = {u.tolist()}", point=u.tolist())
    Ainv = np.linalg.inv(A)
    Bs = [sys.partial(k, u) @ Ainv for k in range(sys.m)]
    if sys.is_real():
        A, Bs = A.real, [B.real for B in Bs]
    return Datum(A, Bs)


# ---------------------------------------------------------------- detector

def _simple_eig(A, cfg):
    w, V = np.linalg.eig(A)
    gaps = np.abs(w[:, None] - w[None, :])
    np.fill_diagonal(gaps, np.inf)
    if len(w) > 1 and gaps.min() <= cfg.cluster_rel_tol * max(np.linalg.norm(A, 2), 1.0):
        return None
    return w, V / np.linalg.norm(V, axis=0)


def _align(V, ref):
    """Reorder and rephase the columns of V to follow ref continuously."""
    if ref is None:
        # deterministic phase: largest component real positive
        idx = np.argmax(np.abs(V), axis=0)
        ph = V[idx, np.arange(V.shape[1])]
        return V * (np.abs(ph) / ph)
    ov = np.abs(ref.conj().T @ V)
    order = np.full(V.shape[1], -1)
    for _ in range(V.shape[1]):
        i, j = np.unravel_index(np.argmax(ov), ov.shape)
        order[i] = j
        ov[i, :] = -1
        ov[:, j] = -1
    W = V[:, order]
    ph = np.sum(ref.conj() * W, axis=0)
    ph = np.where(np.abs(ph) > 0, ph, 1)
    return W * (np.abs(ph) / ph)


def _conjugated(datum, V):
    Vi = np.linalg.inv(V)
    return np.array([Vi @ B @ V for B in datum.B])   # (m, d, d)


@dataclass
class _Point:
    u: np.ndarray
    verdict: object
    V: np.ndarray | None = None
    Q: np.ndarray | None = None
    error: str | None = None


def _threads():
    try:
        n = int(os.environ.get("REGRICH_THREADS", "0"))
    except ValueError:
        n = 0
    return max(1, n) if n else 1


def _evaluate(sys, u, cfg, seed):
    try:
        datum = eval_system(sys, u, cfg)
    except SingularMatrixError as exc:
        return _Point(u, None, error=str(exc))
    v = is_rich(datum, cfg, seed)
    se = _simple_eig(datum.A, cfg)
    return _Point(u, v, V=None if se is None else se[1])


@dataclass
class ScanReport:
    grid_points: int
    poor_candidates: list
    refined_roots: list
    flags: list
    non_simple: list
    clusters: list
    seed: int

    def to_json(self):
        return {"grid_points": self.grid_points, "poor_candidates": self.poor_candidates,
                "refined_roots": self.refined_roots, "flags": self.flags,
                "non_simple_points": self.non_simple, "clusters": self.clusters, "seed": self.seed}

    def dumps(self):
        return json.dumps(_clean(self.to_json()), sort_keys=True, indent=2)


def _clean(x):
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return float(np.round(float(x), 12)) + 0.0
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_clean(x.real), _clean(x.imag)]
    return x


def _grid(sys, counts):
    if isinstance(counts, int):
        counts = [counts] * sys.m
    if len(counts) != sys.m or any(int(n) < 2 for n in counts):
        raise FormatError(f"grid needs {sys.m} counts, each >= 2")
    axes = [np.linspace(lo, hi, int(n)) for (lo, hi), n in zip(sys.domain, counts)]
    return axes, [int(n) for n in counts]


def _entry_fn(sys, cfg, V0, i, j):
    """u -> Q_k[i, j] (all k), eigenbasis aligned to V0; None on degeneracy."""
    def f(u):
        datum = eval_system(sys, u, cfg)
        se = _simple_eig(datum.A, cfg)
        if se is None:
            return None
        V = _align(se[1], V0)
        return _conjugated(datum, V)[:, i, j]
    return f


def _verify_root(sys, u, cfg, seed):
    datum = eval_system(sys, u, cfg)
    v = is_rich(datum, cfg, seed)
    if v.kind == TRANSITIVE:
        return None
    if v.kind != NOT_TRANSITIVE and not (v.margin is not None and v.margin <= 1e-8):
        return None
    ss = singular_states(datum, cfg, seed)
    dirs = [{"direction": _canon(x), "corank": int(c)} for x, c in ss.directions]
    return {"u": [float(x) for x in u], "certificate": v.certificate, "verdict": v.kind,
            "corank": max((c for _, c in ss.directions), default=None),
            "failing_direction": dirs[0]["direction"] if dirs else None,
            "directions": dirs, "directions_complete": ss.complete}


def _canon(x):
    x = np.asarray(x, dtype=complex)
    k = np.argmax(np.abs(x))
    x = x * (abs(x[k]) / x[k])
    x = x / np.linalg.norm(x)
    if np.all(np.abs(x.imag) <= 1e-12):
        return [float(t) for t in x.real]
    return [[float(t.real), float(t.imag)] for t in x]


def _refine_1d(f, a, b, real):
    """Zero of the (single-k) entry function on [a, b]."""
    def g(t):
        q = f(np.array([t]))
        return np.nan if q is None else (q[0].real if real else abs(q[0]))
    if real:
        fa, fb = g(a), g(b)
        if np.isfinite(fa) and np.isfinite(fb) and fa * fb < 0:
            return optimize.brentq(g, a, b, xtol=REFINE_TOL * 1e-2, rtol=1e-15, maxiter=200)
    res = optimize.minimize_scalar(lambda t: abs(g(t)) if np.isfinite(g(t)) else 1e300,
                                   bounds=(a, b), method="bounded",
                                   options={"xatol": REFINE_TOL * 1e-2})
    return res.x


def _refine_nd(f, u0, sys):
    def r(u):
        q = f(u)
        if q is None:
            return np.full(2 * sys.m, 1e6)
        return np.concatenate([q.real, q.imag])
    lo = [a for a, _ in sys.domain]
    hi = [b for _, b in sys.domain]
    res = optimize.least_squares(r, u0, bounds=(lo, hi), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return res.x


def scan(sys, grid=101, cfg=DEFAULT_CFG, seed=0, threads=None):
    axes, counts = _grid(sys, grid)
    pts = [np.array(p, dtype=float) for p in product(*axes)]
    nthreads = threads or _threads()
    if nthreads > 1:
        with ThreadPoolExecutor(nthreads) as ex:
            res = list(ex.map(lambda u: _evaluate(sys, u, cfg, seed), pts))
    else:
        res = [_evaluate(sys, u, cfg, seed) for u in pts]

    shape = tuple(counts)
    flat = {idx: n for n, idx in enumerate(product(*[range(c) for c in counts]))}
    flags, non_simple, candidates = [], [], []
    for p in res:
        if p.error:
            flags.append(f"singular A(u) at {[float(x) for x in p.u]}")
    good = [p for p in res if p.verdict is not None]
    if good and all(not p.verdict.transitive for p in good):
        flags.append("identically singular system")
        return ScanReport(len(pts), [{"u": [float(x) for x in p.u], "verdict": p.verdict.kind,
                                      "detector": None} for p in good], [], flags, [], [], seed)

    # continuity-tracked eigenbases, then detector values
    for idx in product(*[range(c) for c in counts]):
        p = res[flat[idx]]
        if p.verdict is None or p.V is None:
            if p.verdict is not None:
                non_simple.append([float(x) for x in p.u])
            continue
        ref = None
        for ax in reversed(range(sys.m)):
            if idx[ax] > 0:
                prev = res[flat[idx[:ax] + (idx[ax] - 1,) + idx[ax + 1:]]]
                if prev.V is not None:
                    ref = prev.V
                    break
        p.V = _align(p.V, ref)
        p.Q = _conjugated(eval_system(sys, p.u, cfg), p.V)

    d = sys.d
    offdiag = [(i, j) for i in range(d) for j in range(d) if i != j]

    def det(p):
        if p.Q is None:
            return None
        return float(min(np.max(np.abs(p.Q[:, i, j])) for i, j in offdiag)) if offdiag else None

    poor = []
    for p in res:
        if p.verdict is not None and not p.verdict.transitive:
            poor.append({"u": [float(x) for x in p.u], "verdict": p.verdict.kind, "detector": det(p)})
            candidates.append(("point", p.u.copy(), None, None))

    scale = max((np.max(np.abs(p.Q)) for p in res if p.Q is not None), default=1.0)
    real = sys.is_real()
    for i, j in offdiag:
        for idx in product(*[range(c) for c in counts]):
            p = res[flat[idx]]
            if p.Q is None:
                continue
            val = np.max(np.abs(p.Q[:, i, j]))
            for ax in range(sys.m):
                nb = []
                for s in (-1, 1):
                    t = idx[ax] + s
                    if 0 <= t < counts[ax]:
                        nb.append(res[flat[idx[:ax] + (t,) + idx[ax + 1:]]])
                if any(q.Q is None for q in nb):
                    continue
                # signed crossing along this axis (one parameter, real data)
                if sys.m == 1 and real and idx[ax] + 1 < counts[ax]:
                    q = nb[-1]
                    a, b = p.Q[0, i, j], q.Q[0, i, j]
                    if abs(a.imag) + abs(b.imag) <= 1e-9 * scale and a.real * b.real < 0:
                        candidates.append(("sign", p.u[0], q.u[0], (i, j, p.V)))
                # modulus dip: local minimum along every axis, well below the grid scale
            if val <= 0.25 * scale and _is_local_min(res, flat, idx, counts, i, j, val):
                candidates.append(("dip", p.u.copy(), idx, (i, j, p.V)))

    roots = []
    for kind, a, b, info in candidates:
        try:
            if kind == "point":
                u = a
            else:
                i, j, V0 = info
                f = _entry_fn(sys, cfg, V0, i, j)
                if kind == "sign":
                    u = np.array([_refine_1d(f, a, b, True)])
                elif sys.m == 1:
                    h = (sys.domain[0][1] - sys.domain[0][0]) / (counts[0] - 1)
                    lo, hi = max(a[0] - h, sys.domain[0][0]), min(a[0] + h, sys.domain[0][1])
                    u = np.array([_refine_1d(f, lo, hi, False)])
                else:
                    u = _refine_nd(f, a, sys)
                q = f(u)
                if q is None or np.max(np.abs(q)) > 1e-8 * scale:
                    continue
        except (SingularMatrixError, ValueError):
            continue
        if any(np.linalg.norm(u - np.array(r["u"])) <= MERGE_RADIUS for r in roots):
            continue
        rec = _verify_root(sys, u, cfg, seed)
        if rec is not None:
            roots.append(rec)

    roots.sort(key=lambda r: r["u"])
    clusters = _cluster_diag(roots)
    if any(c["size"] > 1 for c in clusters):
        flags.append("root clusters found; the singular set may not be discrete")
    return ScanReport(len(pts), poor, roots, flags, non_simple, clusters, seed)


def _is_local_min(res, flat, idx, counts, i, j, val):
    for ax in range(len(counts)):
        for s in (-1, 1):
            t = idx[ax] + s
            if 0 <= t < len(range(counts[ax])):
                q = res[flat[idx[:ax] + (t,) + idx[ax + 1:]]]
                if q.Q is None:
                    continue
                if np.max(np.abs(q.Q[:, i, j])) < val:
                    return False
    return True


def _cluster_diag(roots, radius=1e-3):
    """Group refined roots closer than radius (a diagnostic, not a merge)."""
    out = []
    for r in roots:
        u = np.array(r["u"])
        for c in out:
            if np.linalg.norm(u - c["center"]) <= radius:
                c["members"].append(r["u"])
                c["size"] += 1
                break
        else:
            out.append({"center": u, "members": [r["u"]], "size": 1})
    return [{"center": [float(x) for x in c["center"]], "size": c["size"]} for c in out]


def poly_entry(terms, m=1):
    """Entry JSON from {exponent tuple or int: coefficient}."""
    mons = []
    for e, c in terms.items():
        e = (e,) if isinstance(e, int) else tuple(e)
        if len(e) != m:
            raise FormatError("exponent length mismatch")
        c = complex(c)
        mons.append({"exps": list(e), "coef": [c.real, c.imag]})
    return {"monomials": mons}


def conjugated_diag_system(lo=-0.5, hi=0.5):
    """P(u) Diag(2,1) P(u)^{-1}, P = [[1,u],[u^2,1]], cleared by the scalar 1-u^3.

    The scalar adds a multiple of Id to each B_k and leaves Lambda and the
    off-diagonal detector unchanged.
    """
    e = poly_entry
    return ParamSystem.from_json({
        "d": 2, "m": 1,
        "entries": [[e({0: 2, 3: -1}), e({1: -1})],
                    [e({2: 1}), e({0: 1, 3: -2})]],
        "domain": [[lo, hi]]})
