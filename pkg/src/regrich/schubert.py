"""Young diagrams in the k x (n-k) rectangle and cup-product nonvanishing."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import FormatError


@dataclass(frozen=True)
class YoungDiagram:
    k: int
    n: int
    rows: tuple

    def __post_init__(self):
        rows = tuple(int(x) for x in self.rows)
        if len(rows) < self.k:
            rows = rows + (0,) * (self.k - len(rows))
        object.__setattr__(self, "rows", rows)
        if not (0 <= self.k <= self.n):
            raise FormatError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")
        if len(rows) != self.k:
            raise FormatError(f"diagram has {len(rows)} rows, rectangle has {self.k}")
        if any(x < 0 for x in rows) or (rows and rows[0] > self.n - self.k):
            raise FormatError(f"{rows} does not fit the {self.k}x{self.n - self.k} rectangle")
        if any(rows[i] < rows[i + 1] for i in range(len(rows) - 1)):
            raise FormatError(f"rows {rows} are not weakly decreasing")

    @property
    def area(self):
        return sum(self.rows)

    def to_json(self):
        return {"k": self.k, "n": self.n, "rows": list(self.rows), "area": self.area}


@dataclass(frozen=True)
class RankTable:
    k: int
    n: int
    jumps: tuple

    def __post_init__(self):
        j = tuple(int(x) for x in self.jumps)
        object.__setattr__(self, "jumps", j)
        if len(j) != self.k:
            raise FormatError(f"expected {self.k} jumping indices, got {len(j)}")
        if any(x < 1 or x > self.n for x in j):
            raise FormatError(f"jumping indices must lie in [1, {self.n}]")
        if any(j[i] >= j[i + 1] for i in range(len(j) - 1)):
            raise FormatError(f"jumping indices {j} are not strictly increasing")


def diagram_from_jumps(rt):
    k, n = rt.k, rt.n
    return YoungDiagram(k, n, tuple(n - k - j + i for i, j in enumerate(rt.jumps, start=1)))


def jumps_from_diagram(lam):
    k, n = lam.k, lam.n
    return RankTable(k, n, tuple(n - k - x + i for i, x in enumerate(lam.rows, start=1)))


def _same_rect(lam, mu):
    if (lam.k, lam.n) != (mu.k, mu.n):
        raise FormatError(f"rectangles differ: ({lam.k},{lam.n}) vs ({mu.k},{mu.n})")


def cup_nonzero(lam, mu):
    """Non-overlap test: lam_i + mu_{k+1-i} <= n-k for every i."""
    _same_rect(lam, mu)
    k, w = lam.k, lam.n - lam.k
    return all(lam.rows[i] + mu.rows[k - 1 - i] <= w for i in range(k))


def all_diagrams(k, n):
    """Every diagram in the k x (n-k) rectangle (a k-subset of n determines one)."""
    for jumps in combinations(range(1, n + 1), k):
        yield diagram_from_jumps(RankTable(k, n, jumps))


def min_area_partner(lam, vanishing=True):
    """Least-area mu whose rotated copy overlaps lam, i.e. lam cup mu = 0.

    Returns (mu, area), or (None, None) when lam is empty and nothing overlaps.
    With vanishing=False the partner with lam cup mu != 0 is returned instead,
    which is always the empty diagram.
    """
    k, n = lam.k, lam.n
    w = n - k
    if not vanishing:
        return YoungDiagram(k, n, ()), 0
    best = None
    # overlap at row i needs mu_{k+1-i} >= w - lam_i + 1, hence the same for mu_1..mu_{k+1-i}
    for i in range(1, k + 1):
        li = lam.rows[i - 1]
        if li == 0:
            continue
        h, c = k + 1 - i, w - li + 1
        if best is None or h * c < best[0]:
            best = (h * c, h, c)
    if best is None:
        return None, None
    area, h, c = best
    return YoungDiagram(k, n, (c,) * h), area


def special_diagram(k, n, e):
    """e full rows followed by k-e empty rows."""
    if not (1 <= e <= k < n):
        raise FormatError("need 1 <= e <= k < n")
    return YoungDiagram(k, n, (n - k,) * e)


def fiber_codim_formula(pairs):
    """min over nonempty strata of j + codim C_j; pairs is a dict or (j, codim) list."""
    items = list(pairs.items()) if isinstance(pairs, dict) else [tuple(p) for p in pairs]
    if not items:
        raise FormatError("no strata given")
    for j, c in items:
        if j < 0 or c < 0:
            raise FormatError(f"negative entry in ({j}, {c})")
    return min(int(j) + int(c) for j, c in items)
