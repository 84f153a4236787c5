"""Acyclic quivers, path counts, and the standard framed pattern.

Vertices are 0-based integers.  A quiver is kept in an admissible order:
there is no arrow from i to j when i >= j, so every arrow goes strictly
upward.  build_quiver establishes that order (reporting the relabelling)
or raises CycleError.
"""

from __future__ import annotations

from dataclasses import dataclass
from graphlib import CycleError as _GraphCycle
from graphlib import TopologicalSorter

from . import linalg
from .errors import ConventionError, CycleError, RankMismatch


@dataclass(frozen=True)
class Quiver:
    """Acyclic quiver in admissible vertex order.

    arrows is a tuple of (source, target) pairs with source < target;
    parallel arrows simply repeat.
    """

    n: int
    arrows: tuple

    def __post_init__(self):
        for s, t in self.arrows:
            if not (0 <= s < t < self.n):
                raise CycleError(
                    f"arrow ({s}, {t}) violates the admissible order"
                )

    def bmatrix(self):
        """Skew-symmetric exchange matrix: b[i][j] = #(i -> j) - #(j -> i)."""
        b = linalg.zeros(self.n, self.n)
        for s, t in self.arrows:
            b[s][t] += 1
            b[t][s] -= 1
        return b

    def arrows_from(self, i):
        return [(s, t) for (s, t) in self.arrows if s == i]

    def arrows_into(self, i):
        return [(s, t) for (s, t) in self.arrows if t == i]


def build_quiver(n, arrows):
    """Topologically order the vertices and return (quiver, perm).

    perm maps old labels to new ones: an input arrow (s, t) becomes
    (perm[s], perm[t]).  Raises CycleError for cyclic input.
    """
    arrows = [(int(s), int(t)) for s, t in arrows]
    for s, t in arrows:
        if not (0 <= s < n and 0 <= t < n):
            raise RankMismatch(f"arrow ({s}, {t}) out of range for n={n}")
        if s == t:
            raise CycleError(f"loop at vertex {s}")
    ts = TopologicalSorter({i: set() for i in range(n)})
    for s, t in arrows:
        ts.add(t, s)
    try:
        order = list(ts.static_order())
    except _GraphCycle as exc:
        raise CycleError("arrow set contains a directed cycle") from exc
    perm = [0] * n
    for new, old in enumerate(order):
        perm[old] = new
    relabelled = tuple(sorted((perm[s], perm[t]) for s, t in arrows))
    return Quiver(n, relabelled), perm


def path_counts(quiver):
    """Matrix p with p[i][j] = number of directed paths from i to j
    (the trivial path counts, so the diagonal is 1).

    Upper unitriangular in the admissible order; satisfies
    p[i][j] = delta_ij + sum over arrows (i -> k) of p[k][j].
    """
    n = quiver.n
    p = linalg.zeros(n, n)
    outgoing = [[] for _ in range(n)]
    for s, t in quiver.arrows:
        outgoing[s].append(t)
    for i in range(n - 1, -1, -1):
        for k in outgoing[i]:
            for j in range(n):
                p[i][j] += p[k][j]
        p[i][i] += 1
    return p


@dataclass(frozen=True)
class IceQuiver:
    """Exchange matrix with frozen rows: an m x n integer matrix whose top
    n x n block is skew-symmetric."""

    n: int
    btilde: tuple

    @property
    def m(self):
        return len(self.btilde)

    def __post_init__(self):
        n = self.n
        if len(self.btilde) < n:
            raise RankMismatch("need at least n rows")
        if any(len(row) != n for row in self.btilde):
            raise RankMismatch("every row must have length n")
        top = [list(row) for row in self.btilde[:n]]
        if not linalg.is_skew_symmetric(top):
            raise ConventionError("principal block is not skew-symmetric")

    def as_lists(self):
        return [list(row) for row in self.btilde]

    def principal_part(self):
        return [list(row[:]) for row in self.btilde[: self.n]]


def z_pattern(quiver):
    """The standard framed pattern: 2n x n exchange matrix whose top block
    is B and whose bottom block is -delta_ij + [b_ji]_+ ."""
    n = quiver.n
    b = quiver.bmatrix()
    rows = [list(row) for row in b]
    for i in range(n):
        rows.append(
            [
                (-1 if i == j else 0) + max(b[j][i], 0)
                for j in range(n)
            ]
        )
    return IceQuiver(n, tuple(tuple(r) for r in rows))


def z_pattern_square(quiver):
    """Square 2n x 2n extension of the framed pattern: the right block is
    determined by skew-symmetry against the frozen rows, and the
    frozen-frozen block vanishes."""
    n = quiver.n
    bz = z_pattern(quiver).as_lists()
    sq = linalg.zeros(2 * n, 2 * n)
    for i in range(2 * n):
        for j in range(n):
            sq[i][j] = bz[i][j]
    for i in range(n):
        for j in range(n):
            sq[i][j + n] = -bz[j + n][i]
    return sq


def lambda_z(quiver):
    """Skew form of the framed pattern, in terms of path counts:

        block (principal, principal) = 0
        block (frozen i, principal j) = -p[i][j]
        block (principal i, frozen j) = p[j][i]
        block (frozen i, frozen j)    = -p[i][j] + p[j][i]

    Verified against the defining property: lambda_z is the inverse of
    the negated square framed matrix.  ConventionError if that fails.
    """
    n = quiver.n
    p = path_counts(quiver)
    lam = linalg.zeros(2 * n, 2 * n)
    for i in range(n):
        for j in range(n):
            lam[i + n][j] = -p[i][j]
            lam[i][j + n] = p[j][i]
            lam[i + n][j + n] = -p[i][j] + p[j][i]
    check = linalg.matmul(lam, linalg.neg(z_pattern_square(quiver)))
    if not linalg.mat_eq(check, linalg.identity(2 * n)):
        raise ConventionError(
            "path-count skew form failed to invert the framed matrix"
        )
    return lam


def cartan_matrix(quiver):
    """Symmetric generalised Cartan matrix: 2 on the diagonal,
    -|b_ij| off it."""
    n = quiver.n
    b = quiver.bmatrix()
    return [
        [2 if i == j else -abs(b[i][j]) for j in range(n)] for i in range(n)
    ]


def random_acyclic_quiver(rng, max_n=6, max_mult=2):
    """Draw a small acyclic quiver (used by the self test); the vertex
    count is at least 2."""
    n = rng.randint(2, max_n)
    arrows = []
    for i in range(n):
        for j in range(i + 1, n):
            for _ in range(rng.randint(0, max_mult)):
                arrows.append((i, j))
    return Quiver(n, tuple(sorted(arrows)))


# -- serialisation -----------------------------------------------------------


def quiver_to_json(quiver):
    """JSON document with 1-based vertex labels."""
    return {
        "n": quiver.n,
        "arrows": [[s + 1, t + 1] for s, t in quiver.arrows],
    }


def quiver_from_json(doc):
    """Accepts arrows in any vertex order (1-based labels) and reorders."""
    n = int(doc["n"])
    arrows = [(int(s) - 1, int(t) - 1) for s, t in doc.get("arrows", [])]
    q, perm = build_quiver(n, arrows)
    return q, perm
