"""Quiver representations, generic kernels, and subrepresentation counts.

Modules here are representations of the opposite quiver: the injective
envelope of the simple at vertex k has dimension p[k][j] at vertex j
(paths k -> j), and for each original arrow a: i -> j the structure map
goes from the space at j to the space at i, deleting a trailing arrow a
from a path when possible.  This orientation is pinned operationally:
the fundamental character it produces must match the once-mutated
cluster variable, and the cross check lives in the characters module.

Counting is exact: subrepresentations over F_p are enumerated vertex by
vertex through echelon bases constrained between the span of incoming
images and the intersection of outgoing preimages.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import linalg
from .errors import (
    DimensionError,
    InterpolationMismatch,
    NotCoefficientFree,
    RankMismatch,
)
from .quiver import path_counts
from .weights import Weight, is_truncated_w, split_coefficient_part

# Orientation used for modules; the alternative value is "paths_to_k".
MODULE_CONVENTION = "paths_from_k"


@dataclass(frozen=True)
class QuiverRep:
    """Representation data: spaces F^dims[i] and one matrix per arrow.

    maps[a] has shape dims[target] x dims[source] (row-major, integer
    entries); arrows are pairs over the representation's own quiver,
    which need not be in admissible order.
    """

    nvert: int
    arrows: tuple
    dims: tuple
    maps: tuple

    def __post_init__(self):
        if len(self.maps) != len(self.arrows):
            raise DimensionError("one matrix per arrow required")
        for (s, t), mat in zip(self.arrows, self.maps):
            rows = len(mat)
            cols = len(mat[0]) if rows else 0
            if rows != self.dims[t] or (rows and cols != self.dims[s]):
                raise DimensionError(
                    f"map for arrow ({s}, {t}) must be {self.dims[t]}x{self.dims[s]}"
                )

    def total_dim(self):
        return sum(self.dims)

    def map_lists(self, a):
        return [list(r) for r in self.maps[a]]


def _freeze_mat(mat):
    return tuple(tuple(int(x) for x in row) for row in mat)


def _paths_from(quiver, k):
    """All paths starting at k, as tuples of arrow indices, sorted."""
    adj = [[] for _ in range(quiver.n)]
    for idx, (s, t) in enumerate(quiver.arrows):
        adj[s].append((idx, t))
    out = {j: [] for j in range(quiver.n)}
    stack = [(k, ())]
    while stack:
        vert, trail = stack.pop()
        out[vert].append(trail)
        for idx, t in adj[vert]:
            stack.append((t, trail + (idx,)))
    return {j: sorted(ps) for j, ps in out.items()}


def injective_module(quiver, k, convention=None):
    """Injective envelope of the simple at vertex k, as a representation
    of the opposite quiver (default convention).

    Basis at vertex j: paths k -> j.  The map attached to the original
    arrow a: i -> j sends a path ending with a to the path with a
    removed, and kills the rest.
    """
    convention = convention or MODULE_CONVENTION
    if convention == "paths_from_k":
        paths = _paths_from(quiver, k)
        dims = tuple(len(paths[j]) for j in range(quiver.n))
        arrows = []
        maps = []
        for idx, (s, t) in enumerate(quiver.arrows):
            # opposite arrow t -> s; matrix of shape dims[s] x dims[t]
            mat = [[0] * dims[t] for _ in range(dims[s])]
            index_s = {p: r for r, p in enumerate(paths[s])}
            for c, p in enumerate(paths[t]):
                if p and p[-1] == idx:
                    mat[index_s[p[:-1]]][c] = 1
            arrows.append((t, s))
            maps.append(_freeze_mat(mat))
        return QuiverRep(quiver.n, tuple(arrows), dims, tuple(maps))
    if convention == "paths_to_k":
        # mirror construction: spaces indexed by paths into k, maps along
        # the original arrows delete a leading arrow; built by forward
        # search from every start vertex
        adj = [[] for _ in range(quiver.n)]
        for idx, (s, t) in enumerate(quiver.arrows):
            adj[s].append((idx, t))
        into = {j: [] for j in range(quiver.n)}
        for j in range(quiver.n):
            stack = [(j, ())]
            while stack:
                vert, trail = stack.pop()
                if vert == k:
                    into[j].append(trail)
                for idx, t in adj[vert]:
                    stack.append((t, trail + (idx,)))
        into = {j: sorted(ps) for j, ps in into.items()}
        dims = tuple(len(into[j]) for j in range(quiver.n))
        arrows = []
        maps = []
        for idx, (s, t) in enumerate(quiver.arrows):
            mat = [[0] * dims[s] for _ in range(dims[t])]
            index_t = {p: r for r, p in enumerate(into[t])}
            for c, p in enumerate(into[s]):
                if p and p[0] == idx:
                    mat[index_t[p[1:]]][c] = 1
            arrows.append((s, t))
            maps.append(_freeze_mat(mat))
        return QuiverRep(quiver.n, tuple(arrows), dims, tuple(maps))
    raise ValueError(f"unknown module convention {convention!r}")


def zero_module(quiver, arrows):
    return QuiverRep(
        quiver.n,
        tuple(arrows),
        tuple([0] * quiver.n),
        tuple(tuple() for _ in arrows),
    )


def direct_sum(reps):
    """Direct sum of representations over the same quiver."""
    if not reps:
        raise DimensionError("empty direct sum needs an explicit quiver")
    first = reps[0]
    for r in reps[1:]:
        if r.arrows != first.arrows or r.nvert != first.nvert:
            raise DimensionError("summands live over different quivers")
    dims = tuple(sum(r.dims[i] for r in reps) for i in range(first.nvert))
    maps = []
    for a, (s, t) in enumerate(first.arrows):
        big = [[0] * dims[s] for _ in range(dims[t])]
        roff = 0
        coff = 0
        for r in reps:
            mat = r.maps[a]
            for i in range(r.dims[t]):
                for j in range(r.dims[s]):
                    big[roff + i][coff + j] = mat[i][j]
            roff += r.dims[t]
            coff += r.dims[s]
        maps.append(_freeze_mat(big))
    return QuiverRep(first.nvert, first.arrows, dims, tuple(maps))


def socle_dims(rep):
    """Dimension vector of the largest semisimple subrepresentation:
    at each vertex, intersect the kernels of all outgoing maps."""
    out = []
    for i in range(rep.nvert):
        stacked = []
        for a, (s, _) in enumerate(rep.arrows):
            if s == i:
                stacked.extend([list(r) for r in rep.maps[a]])
        if not stacked:
            out.append(rep.dims[i])
        else:
            out.append(rep.dims[i] - linalg.rank(stacked))
    return out


def hom_basis(src, dst):
    """Integer basis of the space of homomorphisms src -> dst.

    A homomorphism is a tuple of matrices f_i; the commuting conditions
    f_t B_a = B'_a f_s (one per arrow) are linear, and the kernel lattice
    is computed exactly.
    """
    if src.arrows != dst.arrows:
        raise DimensionError("representations live over different quivers")
    nv = src.nvert
    sizes = [dst.dims[i] * src.dims[i] for i in range(nv)]
    offs = [0] * (nv + 1)
    for i in range(nv):
        offs[i + 1] = offs[i] + sizes[i]
    total = offs[nv]

    def var(i, r, c):
        return offs[i] + r * src.dims[i] + c

    rows = []
    for a, (s, t) in enumerate(src.arrows):
        bs = src.maps[a]
        bt = dst.maps[a]
        for r in range(dst.dims[t]):
            for c in range(src.dims[s]):
                row = [0] * total
                # (f_t B_a)[r][c]
                for k in range(src.dims[t]):
                    if bs[k][c]:
                        row[var(t, r, k)] += bs[k][c]
                # -(B'_a f_s)[r][c]
                for k in range(dst.dims[s]):
                    if bt[r][k]:
                        row[var(s, k, c)] -= bt[r][k]
                if any(row):
                    rows.append(row)
    basis_vecs = linalg.kernel_basis(rows, total)
    out = []
    for vec in basis_vecs:
        mats = []
        for i in range(nv):
            mat = [
                [vec[var(i, r, c)] for c in range(src.dims[i])]
                for r in range(dst.dims[i])
            ]
            mats.append(mat)
        out.append(mats)
    return out


def _kernel_rep(src, fmats):
    """Kernel of a homomorphism f: src -> dst as a subrepresentation of
    src, with induced maps solved exactly over the integers."""
    nv = src.nvert
    kbases = []
    for i in range(nv):
        if src.dims[i] == 0:
            kbases.append([])
            continue
        mat = fmats[i]
        if not mat:
            kbases.append(linalg.identity(src.dims[i]))
            continue
        kbases.append(linalg.kernel_basis(mat, src.dims[i]))
    dims = tuple(len(kb) for kb in kbases)
    maps = []
    for a, (s, t) in enumerate(src.arrows):
        bsrc = src.map_lists(a)
        cols = []
        kt = kbases[t]
        kt_cols = linalg.transpose(kt) if kt else []
        for vec in kbases[s]:
            img = linalg.mat_vec(bsrc, vec) if bsrc else [0] * src.dims[t]
            if dims[t] == 0:
                if any(img):
                    raise DimensionError("image escaped the kernel")
                cols.append([])
            else:
                cols.append(linalg.solve_int(kt_cols, img))
        mat = [[cols[c][r] for c in range(dims[s])] for r in range(dims[t])]
        maps.append(_freeze_mat(mat))
    return QuiverRep(nv, src.arrows, dims, tuple(maps)), kbases


# large sampling range; minors then avoid small primes with overwhelming
# probability, and reductions stay generic at every counting prime
SAMPLE_BOUND = 2**31


def generic_module(quiver, w, seed=0, batch=5, convention=None, strict=True):
    """Generic kernel attached to a coefficient-free dominant datum.

    w must be truncated with no common part per vertex.  Samples a batch
    of homomorphisms f: I^(w(-1)) -> I^(w(0)) with integer coefficients
    in a huge range, keeps the one whose kernel dimension vector is
    smallest, and returns the kernel representation together with the
    witness maps recorded for prime filtering.

    With strict=False a common part is tolerated: the sampled map then
    goes between the unreduced sums, which generically has the same
    kernel and serves as a cross check of the reduced route.
    """
    if not is_truncated_w(w):
        raise RankMismatch("w must be truncated and nonnegative")
    phi, f = split_coefficient_part(w)
    if strict and not f.is_zero():
        raise NotCoefficientFree("w has a nonzero pure-coefficient part")
    n = quiver.n
    wneg = [w[(i, -2)] for i in range(n)]
    wzero = [w[(i, 0)] for i in range(n)]
    injectives = [injective_module(quiver, k, convention) for k in range(n)]
    arrows = injectives[0].arrows if injectives else ()

    src_list = [injectives[i] for i in range(n) for _ in range(wneg[i])]
    dst_list = [injectives[i] for i in range(n) for _ in range(wzero[i])]
    src = direct_sum(src_list) if src_list else zero_module(quiver, arrows)
    dst = direct_sum(dst_list) if dst_list else zero_module(quiver, arrows)

    hb = hom_basis(src, dst)
    rng = random.Random(seed)
    best = None
    for _ in range(max(batch, 1)):
        coeffs = [rng.randrange(-SAMPLE_BOUND, SAMPLE_BOUND + 1) for _ in hb]
        fmats = []
        for i in range(quiver.n):
            mat = [[0] * src.dims[i] for _ in range(dst.dims[i])]
            for c, basis_elt in zip(coeffs, hb):
                bm = basis_elt[i]
                for r in range(dst.dims[i]):
                    for cc in range(src.dims[i]):
                        mat[r][cc] += c * bm[r][cc]
            fmats.append(mat)
        rep, kbases = _kernel_rep(src, fmats)
        key = (rep.total_dim(), rep.dims)
        if best is None or key < best[0]:
            best = (key, rep, fmats)
    rep = best[1]
    object.__setattr__(rep, "_witness", best[2])
    return rep


def kernel_dim_vector(quiver, w, seed=0, batch=5, convention=None):
    return generic_module(quiver, w, seed, batch, convention).dims


# ---------------------------------------------------------------------------
# counting over prime fields


def _echelon_free_patterns(dim, k):
    """Yield (pivots, free_positions) for all k x dim reduced echelon
    shapes: pivots is an increasing column tuple, free positions are the
    (row, col) slots that take arbitrary field values."""
    from itertools import combinations

    for pivots in combinations(range(dim), k):
        free = []
        for r in range(k):
            for c in range(pivots[r] + 1, dim):
                if c not in pivots:
                    free.append((r, c))
        yield pivots, free


def _subspaces(dim, k, p):
    """All k-dimensional subspaces of F_p^dim as reduced echelon bases."""
    if k == 0:
        yield []
        return
    for pivots, free in _echelon_free_patterns(dim, k):
        total = len(free)
        for mask in range(p**total):
            mat = [[0] * dim for _ in range(k)]
            for r, c in zip(range(k), pivots):
                mat[r][c] = 1
            rest = mask
            for r, c in free:
                mat[r][c] = rest % p
                rest //= p
            yield mat


def _span_rows(rows, p):
    """Reduced echelon form of a list of F_p rows; returns (rows, pivots)."""
    if not rows:
        return [], []
    red, piv = linalg.rref_mod(rows, p)
    red = [r for r in red if any(r)]
    return red, piv[: len(red)]


def _in_span(vec, rows, pivots, p):
    return not any(linalg.reduce_against_rref(vec, rows, pivots, p))


def count_subreps(rep, v, p):
    """Number of subrepresentations of rep (mod p) with dimension vector v.

    Enumerates vertices in an order that fixes constraint endpoints as
    early as possible; at each vertex only subspaces squeezed between the
    span of incoming images and the intersection of outgoing preimages
    are generated (in quotient coordinates).
    """
    nv = rep.nvert
    if len(v) != nv:
        raise RankMismatch("dimension vector has wrong length")
    if any(not (0 <= v[i] <= rep.dims[i]) for i in range(nv)):
        return 0
    maps_p = [linalg.mat_mod(rep.map_lists(a), p) for a in range(len(rep.arrows))]

    # order vertices: those with more constraint partners first is not
    # needed; a topological order of the representation quiver keeps the
    # incoming spans available when a vertex is visited
    order = _topo_order(nv, rep.arrows)
    pos = {vert: idx for idx, vert in enumerate(order)}

    count = 0
    chosen = [None] * nv  # echelon rows per vertex once fixed

    def feasible_at(vert):
        """Enumerate echelon bases at vert between forced lower and upper
        bounds; yields row lists."""
        d = rep.dims[vert]
        k = v[vert]
        lower = []
        for a, (s, t) in enumerate(rep.arrows):
            if t == vert and chosen[s] is not None:
                for row in chosen[s]:
                    img = linalg.mat_vec(maps_p[a], row) if maps_p[a] else [0] * d
                    lower.append([x % p for x in img])
        lo_rows, lo_piv = _span_rows(lower, p)
        if len(lo_rows) > k:
            return
        # upper bound: intersect preimages of already-chosen targets
        upper_conditions = []
        for a, (s, t) in enumerate(rep.arrows):
            if s == vert and chosen[t] is not None:
                tgt_rows, tgt_piv = _span_rows([list(r) for r in chosen[t]], p)
                comp = _complement_conditions(tgt_rows, tgt_piv, rep.dims[t], p)
                for cond in comp:
                    row = [0] * d
                    mp = maps_p[a]
                    for c in range(d):
                        row[c] = sum(cond[r] * mp[r][c] for r in range(rep.dims[t])) % p
                    upper_conditions.append(row)
        if upper_conditions:
            ubasis = linalg.nullspace_mod(upper_conditions, p, d)
        else:
            ubasis = linalg.identity(d)
        urows, upiv = _span_rows([list(r) for r in ubasis], p)
        ud = len(urows)
        if k > ud:
            return
        # lower must sit inside upper
        for row in lo_rows:
            if not _in_span(row, urows, upiv, p):
                return
        # coordinates: express the enumeration inside upper/lower quotient
        lo_in_u = [_coords_in_span(r, urows, upiv, p) for r in lo_rows]
        qrows, qpiv = _span_rows([list(r) for r in lo_in_u], p)
        # complement coordinates of the quotient inside F_p^ud
        free_dirs = []
        for j in range(ud):
            e = [0] * ud
            e[j] = 1
            if not _in_span(e, qrows, qpiv, p):
                free_dirs.append(e)
                newq = qrows + [e]
                qrows, qpiv = _span_rows(newq, p)
        qd = len(free_dirs)
        need = k - len(lo_rows)
        if need < 0 or need > qd:
            return
        base_rows = [list(r) for r in lo_rows]
        for sub in _subspaces(qd, need, p):
            extra = []
            for srow in sub:
                amb = [0] * ud
                for c, x in enumerate(srow):
                    if x:
                        for t2 in range(ud):
                            amb[t2] = (amb[t2] + x * free_dirs[c][t2]) % p
                vec = [0] * d
                for t2 in range(ud):
                    if amb[t2]:
                        for c2 in range(d):
                            vec[c2] = (vec[c2] + amb[t2] * urows[t2][c2]) % p
                extra.append(vec)
            rows, piv = _span_rows(base_rows + extra, p)
            if len(rows) == k:
                yield rows

    def check_all_arrows():
        for a, (s, t) in enumerate(rep.arrows):
            srows = chosen[s]
            trows, tpiv = _span_rows([list(r) for r in chosen[t]], p)
            for row in srows:
                img = linalg.mat_vec(maps_p[a], row) if maps_p[a] else []
                img = [x % p for x in img]
                if any(img) and not _in_span(img, trows, tpiv, p):
                    return False
                if any(img) and v[t] == 0:
                    return False
        return True

    def rec(idx):
        nonlocal count
        if idx == nv:
            if check_all_arrows():
                count += 1
            return
        vert = order[idx]
        for rows in feasible_at(vert):
            chosen[vert] = rows
            rec(idx + 1)
            chosen[vert] = None

    rec(0)
    return count


def _coords_in_span(vec, rows, pivots, p):
    """Coordinates of vec in the span of echelon rows (must lie inside)."""
    v = [x % p for x in vec]
    coords = [0] * len(rows)
    for i, (row, col) in enumerate(zip(rows, pivots)):
        if v[col]:
            f = v[col]
            coords[i] = f
            v = [(x - f * y) % p for x, y in zip(v, row)]
    if any(v):
        raise RankMismatch("vector not inside the span")
    return coords


def _complement_conditions(rows, pivots, dim, p):
    """Linear conditions (as row functionals) cutting out the span of the
    given echelon rows inside F_p^dim."""
    conds = []
    pivset = set(pivots)
    for j in range(dim):
        if j in pivset:
            continue
        cond = [0] * dim
        cond[j] = 1
        for r, c in enumerate(pivots):
            cond[c] = (-rows[r][j]) % p
        conds.append(cond)
    return conds


def _topo_order(nv, arrows):
    from graphlib import TopologicalSorter

    ts = TopologicalSorter({i: set() for i in range(nv)})
    for s, t in arrows:
        ts.add(t, s)
    return list(ts.static_order())


# ---------------------------------------------------------------------------
# counting polynomials


@dataclass(frozen=True)
class CountingPolynomial:
    """Coefficients (ascending powers of q) plus the prime/count table
    the interpolation was built from."""

    coeffs: tuple
    provenance: tuple

    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else -1

    def evaluate(self, q):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * q + c
        return acc

    def is_zero(self):
        return not self.coeffs

    def to_json(self):
        return {
            "coeffs": list(self.coeffs),
            "primes": [[p, c] for p, c in self.provenance],
        }


def _first_primes(count, good, start=2):
    out = []
    p = start
    while len(out) < count:
        if _is_prime(p) and good(p):
            out.append(p)
        p += 1
    return out


def _is_prime(p):
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def good_prime_for(rep, p):
    """A prime is used only if every structure map (and the sampling
    witness, when present) keeps its rational rank mod p."""
    for a in range(len(rep.arrows)):
        mat = rep.map_lists(a)
        if mat and mat[0]:
            if linalg.rank_mod(mat, p) != linalg.rank(mat):
                return False
    witness = getattr(rep, "_witness", None)
    if witness:
        for mat in witness:
            if mat and mat[0]:
                if linalg.rank_mod(mat, p) != linalg.rank(mat):
                    return False
    return True


def counting_polynomial(rep, v):
    """Interpolated polynomial q -> #subreps with dimension vector v.

    Degree bound D = sum_i v_i (d_i - v_i); counts at D + 1 good primes
    feed an exact Lagrange interpolation, one further held-out prime
    validates it.  All primes and counts are recorded.
    """
    from fractions import Fraction

    nv = rep.nvert
    if len(v) != nv:
        raise RankMismatch("dimension vector has wrong length")
    if any(not (0 <= v[i] <= rep.dims[i]) for i in range(nv)):
        return CountingPolynomial((), ())
    dbound = sum(v[i] * (rep.dims[i] - v[i]) for i in range(nv))
    primes = _first_primes(dbound + 2, lambda p: good_prime_for(rep, p))
    counts = [count_subreps(rep, v, p) for p in primes]
    interp_pts = list(zip(primes[: dbound + 1], counts[: dbound + 1]))
    coeffs = [Fraction(0)] * (dbound + 1)
    for xi, yi in interp_pts:
        li = [Fraction(1)]
        denom = Fraction(1)
        for xj, _ in interp_pts:
            if xj == xi:
                continue
            li = _poly_mul_linear(li, -xj)
            denom *= xi - xj
        scale = Fraction(yi) / denom
        for k in range(len(li)):
            coeffs[k] += li[k] * scale
    out = []
    for c in coeffs:
        if c.denominator != 1:
            raise InterpolationMismatch("interpolated coefficient not integral")
        out.append(int(c))
    while out and out[-1] == 0:
        out.pop()
    held_p, held_c = primes[dbound + 1], counts[dbound + 1]
    acc = 0
    for c in reversed(out):
        acc = acc * held_p + c
    if acc != held_c:
        raise InterpolationMismatch(
            f"held-out prime {held_p} gives {held_c}, polynomial gives {acc}"
        )
    return CountingPolynomial(tuple(out), tuple(zip(primes, counts)))


def _poly_mul_linear(poly, const):
    """Multiply a coefficient list by (x + const)."""
    from fractions import Fraction

    out = [Fraction(0)] * (len(poly) + 1)
    for i, c in enumerate(poly):
        out[i] += c * const
        out[i + 1] += c
    return out
