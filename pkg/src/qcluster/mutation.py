"""Seed mutation for quantum cluster algebras.

A seed carries a compatible pair and, for each of the m variables, its
expansion in the initial quantum torus.  Mutation at a mutable index k
replaces the pair by its standard mutation and the k-th expansion by the
quantum exchange combination, computed inside the initial torus by exact
division.

The normalised monomial of the current seed with exponent c >= 0 is

    M_t(c) = v^(-sum_{i<j} c_i c_j Lam_t(e_i, e_j)) E_1^c_1 * ... * E_m^c_m

(the v-power makes it bar-invariant), and the exchange relation at k is

    x_k' * x_k = v^(Lam_t(a+, e_k)) M_t(a+ + e_k)
                 + v^(Lam_t(a-, e_k)) M_t(a- + e_k),

with a+- = -e_k + sum_i [+-b_ik]_+ e_i read off the current matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg
from .errors import (
    CompatibilityBroken,
    NotFPolynomialShaped,
    NoSolution,
    RankMismatch,
)
from .quiver import lambda_z, z_pattern
from .torus import (
    CompatiblePair,
    QLaurent,
    TorusElement,
    check_compatibility,
    exact_divide,
    twisted_mul,
)


def mutation_emat(btilde, k, sign=1):
    """The m x m elementary matrix E used for Lam mutation: identity off
    column k; E[k][k] = -1 and E[i][k] = [-sign * b_ik]_+ for i != k.
    Both signs produce the same mutated form."""
    m = len(btilde)
    e = linalg.identity(m)
    for i in range(m):
        e[i][k] = -1 if i == k else max(-sign * btilde[i][k], 0)
    return e


def mutate_btilde(btilde, k):
    """Standard matrix mutation in direction k (columns are mutable)."""
    m = len(btilde)
    n = len(btilde[0])
    if not (0 <= k < n):
        raise RankMismatch(f"direction {k} is not mutable")
    out = [[0] * n for _ in range(m)]
    for i in range(m):
        for j in range(n):
            if i == k or j == k:
                out[i][j] = -btilde[i][j]
            else:
                bik, bkj = btilde[i][k], btilde[k][j]
                out[i][j] = btilde[i][j] + (abs(bik) * bkj + bik * abs(bkj)) // 2
    return out


def mutate_pair(pair, k):
    """Mutate a compatible pair; D must come back unchanged."""
    bt = [list(row) for row in pair.btilde]
    lam = [list(row) for row in pair.lam]
    e = mutation_emat(bt, k)
    lam2 = linalg.matmul(linalg.matmul(linalg.transpose(e), lam), e)
    bt2 = mutate_btilde(bt, k)
    new = check_compatibility(lam2, bt2)
    if not isinstance(new, CompatiblePair) or new.d != pair.d:
        raise CompatibilityBroken(f"mutation at {k} changed the diagonal part")
    return new


@dataclass(frozen=True)
class QuantumSeed:
    """Immutable seed: current pair, expansions of all m variables in the
    initial torus, the initial skew form, and the mutation history."""

    pair: CompatiblePair
    expansions: tuple
    lam0: tuple
    history: tuple = ()

    @property
    def m(self):
        return self.pair.m

    @property
    def n(self):
        return self.pair.n

    def lam0_lists(self):
        return [list(r) for r in self.lam0]


def initial_seed(pair):
    m = pair.m
    exps = tuple(TorusElement.unit_x(m, i) for i in range(m))
    return QuantumSeed(pair, exps, pair.lam, ())


def normalized_monomial(seed, c):
    """Bar-invariant monomial M_t(c) of the current seed, c in N^m,
    expanded in the initial torus."""
    m = seed.m
    if len(c) != m or any(x < 0 for x in c):
        raise RankMismatch("need a nonnegative exponent vector of length m")
    lam_t = seed.pair.lam
    w = 0
    for i in range(m):
        if not c[i]:
            continue
        for j in range(i + 1, m):
            if c[j]:
                w += c[i] * c[j] * lam_t[i][j]
    lam0 = seed.lam0_lists()
    prod = TorusElement.one(m)
    for i in range(m):
        for _ in range(c[i]):
            prod = twisted_mul(prod, seed.expansions[i], lam0)
    return prod.scale(QLaurent.vpow(-w))


def mutate_seed(seed, k):
    """Mutate the seed at mutable index k (0-based)."""
    pair = seed.pair
    m, n = pair.m, pair.n
    if not (0 <= k < n):
        raise RankMismatch(f"direction {k} is not mutable")
    bt = pair.btilde
    aplus = [max(bt[i][k], 0) for i in range(m)]
    aminus = [max(-bt[i][k], 0) for i in range(m)]
    aplus[k] -= 1
    aminus[k] -= 1
    cplus = aplus[:]
    cplus[k] += 1
    cminus = aminus[:]
    cminus[k] += 1
    lam_t = pair.lam
    wplus = sum(aplus[i] * lam_t[i][k] for i in range(m))
    wminus = sum(aminus[i] * lam_t[i][k] for i in range(m))
    num = normalized_monomial(seed, cplus).scale(QLaurent.vpow(wplus)) + \
        normalized_monomial(seed, cminus).scale(QLaurent.vpow(wminus))
    newvar = exact_divide(num, seed.expansions[k], seed.lam0_lists())
    exps = list(seed.expansions)
    exps[k] = newvar
    return QuantumSeed(
        mutate_pair(pair, k), tuple(exps), seed.lam0, seed.history + (k,)
    )


def seed_from_pair(lam, btilde):
    pair = check_compatibility(lam, btilde)
    if not isinstance(pair, CompatiblePair):
        raise CompatibilityBroken(
            "cannot build a quantum seed on a weakly compatible pair"
        )
    return initial_seed(pair)


def z_seed(quiver):
    """Initial seed of the framed pattern with its path-count skew form."""
    return seed_from_pair(lambda_z(quiver), z_pattern(quiver).as_lists())


def principal_lambda(b):
    """Canonical skew form [[0, -I], [I, -B]] compatible with [B; I]."""
    n = len(b)
    lam = linalg.zeros(2 * n, 2 * n)
    for i in range(n):
        lam[i][i + n] = -1
        lam[i + n][i] = 1
        for j in range(n):
            lam[i + n][j + n] = -b[i][j]
    return lam


def principal_pair(quiver, delta=1):
    """Principal-coefficient pair with D = delta * identity."""
    b = quiver.bmatrix()
    n = quiver.n
    lam = [[delta * x for x in row] for row in principal_lambda(b)]
    bt = [row[:] for row in b] + list(linalg.identity(n))
    return check_compatibility(lam, bt)


def principal_seed(quiver, delta=1):
    return initial_seed(principal_pair(quiver, delta))


def mutate_along(seed, path):
    for k in path:
        seed = mutate_seed(seed, k)
    return seed


def extract_g_and_f(elem, btilde):
    """Decompose a torus element whose support is g + Btilde * S for a
    finite S in N^n containing 0.  Returns (g, {v: coeff}).

    Raises NotFPolynomialShaped when no such decomposition exists;
    Btilde must have full column rank.
    """
    if elem.is_zero():
        raise NotFPolynomialShaped("zero element")
    bt = [list(row) for row in btilde]
    support = elem.support()
    h0 = support[0]
    offsets = {}
    for h in support:
        rhs = [a - b for a, b in zip(h, h0)]
        try:
            offsets[h] = tuple(linalg.solve_int(bt, rhs))
        except NoSolution as exc:
            raise NotFPolynomialShaped(
                "support does not lie in a single Btilde coset"
            ) from exc
    ncols = len(bt[0])
    tmin = [min(u[i] for u in offsets.values()) for i in range(ncols)]
    svals = {h: tuple(a - b for a, b in zip(u, tmin)) for h, u in offsets.items()}
    if tuple([0] * ncols) not in svals.values():
        raise NotFPolynomialShaped("no exponent realises the minimal corner")
    g = tuple(a + b for a, b in zip(h0, linalg.mat_vec(bt, tmin)))
    return g, {svals[h]: elem.coeff(h) for h in support}


def sigma_indices(pair):
    """g-vectors of the variables obtained by mutating once at every
    vertex along the sink order n-1, ..., 0 of the principal part."""
    seed = initial_seed(pair)
    n = pair.n
    for k in range(n - 1, -1, -1):
        seed = mutate_seed(seed, k)
    bt = [list(r) for r in pair.btilde]
    return [extract_g_and_f(seed.expansions[i], bt)[0] for i in range(n)]


def delta_rescale_check(quiver, i, path, delta):
    """Expansion coefficients under D = delta*I are the D = I
    coefficients with v replaced by v^delta.  Returns True/False."""
    s1 = mutate_along(principal_seed(quiver, 1), path)
    sd = mutate_along(principal_seed(quiver, delta), path)
    bt = [row[:] for row in quiver.bmatrix()] + list(linalg.identity(quiver.n))
    g1, f1 = extract_g_and_f(s1.expansions[i], bt)
    gd, fd = extract_g_and_f(sd.expansions[i], bt)
    if g1 != gd or set(f1) != set(fd):
        return False
    return all(f1[v].subs_vpower(delta) == fd[v] for v in f1)


def nonbacktracking_paths(n, max_len):
    """All mutation paths of length 1..max_len with no immediate repeat."""
    paths = []

    def rec(prefix):
        if prefix:
            paths.append(tuple(prefix))
        if len(prefix) == max_len:
            return
        for k in range(n):
            if not prefix or prefix[-1] != k:
                prefix.append(k)
                rec(prefix)
                prefix.pop()

    rec([])
    return paths


def seeds_to_depth(seed, depth):
    """DFS over non-backtracking mutation paths, sharing prefixes.
    Returns [(path, seed)] including the empty path."""
    out = [((), seed)]

    def rec(path, s):
        if len(path) == depth:
            return
        for k in range(s.n):
            if path and path[-1] == k:
                continue
            s2 = mutate_seed(s, k)
            out.append((path + (k,), s2))
            rec(path + (k,), s2)

    rec((), seed)
    return out


# -- serialisation ------------------------------------------------------------


def seed_to_json(seed):
    return {
        "lambda": [list(r) for r in seed.pair.lam],
        "btilde": [list(r) for r in seed.pair.btilde],
        "d": [list(r) for r in seed.pair.d],
        "expansions": [e.to_json() for e in seed.expansions],
        "history": [k + 1 for k in seed.history],
    }
