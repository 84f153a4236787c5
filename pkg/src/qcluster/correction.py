"""Transport of product relations between pairs with a shared principal part.

A relation here is a normalised two-factor product identity

    v^(-Lam(g1, g2)) M_1 * M_2 = sum_j c_j M_j,    j >= 3,

where every M_j = x^(g_j) sum_v b_j(v) x^(Btilde v) has a nonzero
constant term b_j(0), and the c_j are Laurent coefficients times frozen
monomials acting by plain exponent shifts.  Because the b_j only depend
on the principal part, such a relation determines its counterpart over
any other pair with the same principal part once the diagonal blocks
are proportional: coefficient exponents are stretched by the ratio and
each c_j picks up a frozen correction monomial fixed by the unique u_j
with g_j = g1 + g2 + Btilde u_j.

The builder at the bottom extracts exchange relations from the mutation
engine in exactly this shape.
"""

import math
from fractions import Fraction

from . import linalg
from .errors import (
    DeltaMismatch,
    EliminationStuck,
    IncompatibleError,
    NegativeU,
    PrincipalMismatch,
    RankMismatch,
)
from .mutation import (
    extract_g_and_f,
    initial_seed,
    mutate_along,
    mutate_seed,
    normalized_monomial,
)
from .torus import (
    QLaurent,
    TorusElement,
    assert_frozen,
    lam_pairing,
    pad_matrix,
    twisted_mul,
)


def _freeze(mat):
    return tuple(tuple(int(x) for x in row) for row in mat)


def _d_block(lam, btilde, n):
    """Top n x n block of Lam (-Btilde); the lower block must vanish."""
    prod = linalg.matmul([list(r) for r in lam], linalg.neg([list(r) for r in btilde]))
    for row in prod[n:]:
        if any(row):
            raise IncompatibleError("pair is not even weakly compatible")
    return [row[:n] for row in prod[:n]]


def _phi_vec(bt):
    """Integer functional strictly negative on the exchange columns."""
    gram = linalg.matmul(linalg.transpose(bt), bt)
    sol = linalg.solve_exact(gram, [1] * len(gram))
    den = math.lcm(*(Fraction(s).denominator for s in sol)) if sol else 1
    x = [int(Fraction(s) * den) for s in sol]
    return [-a for a in linalg.mat_vec(bt, x)]


class TorusRelation:
    """Concrete relation data over one pair.

    gvecs is the tuple (g_1, ..., g_s); fdicts[j] maps exponent-offset
    tuples v in N^n to Laurent coefficients with fdicts[j][0] nonzero;
    coeffs[i] (for the term with g-vector gvecs[i + 2]) maps frozen
    exponent tuples to Laurent coefficients.  Right-hand terms are kept
    sorted by their g-vector so that equality does not depend on the
    order of discovery.
    """

    def __init__(self, lam, btilde, gvecs, fdicts, coeffs):
        self.lam = _freeze(lam)
        self.btilde = _freeze(btilde)
        m = len(self.lam)
        n = len(self.btilde[0]) if self.btilde else 0
        if len(self.btilde) != m:
            raise RankMismatch("skew form and exchange matrix sizes disagree")
        if len(gvecs) < 3:
            raise RankMismatch("a relation needs two factors and a right side")
        if len(fdicts) != len(gvecs) or len(coeffs) != len(gvecs) - 2:
            raise RankMismatch("per-term data does not match the g-vectors")
        gvecs = [tuple(int(a) for a in g) for g in gvecs]
        fdicts = [
            {tuple(int(a) for a in v): c for v, c in fd.items() if not c.is_zero()}
            for fd in fdicts
        ]
        coeffs = [
            {tuple(int(a) for a in f): c for f, c in cd.items() if not c.is_zero()}
            for cd in coeffs
        ]
        for g in gvecs:
            if len(g) != m:
                raise RankMismatch("g-vector rank mismatch")
        zero = tuple([0] * n)
        for fd in fdicts:
            for v in fd:
                if len(v) != n or any(a < 0 for a in v):
                    raise RankMismatch("offsets must be nonnegative n-vectors")
            if zero not in fd:
                raise RankMismatch("every term needs a nonzero constant offset")
        for cd in coeffs:
            for f in cd:
                if len(f) != m:
                    raise RankMismatch("frozen coefficient exponent rank mismatch")
                assert_frozen(f, n)
        order = sorted(range(len(coeffs)), key=lambda i: gvecs[i + 2])
        self.gvecs = tuple(gvecs[:2] + [gvecs[i + 2] for i in order])
        self.fdicts = tuple(fdicts[:2] + [fdicts[i + 2] for i in order])
        self.coeffs = tuple(coeffs[i] for i in order)

    @property
    def m(self):
        return len(self.lam)

    @property
    def n(self):
        return len(self.btilde[0]) if self.btilde else 0

    def principal_part(self):
        n = self.n
        return [list(row[:n]) for row in self.btilde[:n]]

    def term(self, j):
        """The element x^(g_j) sum_v b_j(v) x^(Btilde v)."""
        g = self.gvecs[j]
        bt = [list(r) for r in self.btilde]
        terms = {}
        for v, c in self.fdicts[j].items():
            off = linalg.mat_vec(bt, list(v))
            terms[tuple(a + b for a, b in zip(g, off))] = c
        return TorusElement(self.m, terms)

    def left_side(self):
        pre = QLaurent.vpow(-lam_pairing(self.lam, self.gvecs[0], self.gvecs[1]))
        lam = [list(r) for r in self.lam]
        return twisted_mul(self.term(0), self.term(1), lam).scale(pre)

    def right_side(self):
        total = TorusElement.zero(self.m)
        for i, cd in enumerate(self.coeffs):
            base = self.term(i + 2)
            for f, c in cd.items():
                total = total + base.shift_exponents(f).scale(c)
        return total

    def verify(self):
        return self.left_side() == self.right_side()

    def __eq__(self, other):
        return (
            isinstance(other, TorusRelation)
            and self.lam == other.lam
            and self.btilde == other.btilde
            and self.gvecs == other.gvecs
            and self.fdicts == other.fdicts
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        return f"TorusRelation(m={self.m}, n={self.n}, terms={len(self.gvecs)})"

    # -- serialisation ---------------------------------------------------

    def to_json(self):
        return {
            "lam": [list(r) for r in self.lam],
            "btilde": [list(r) for r in self.btilde],
            "gvecs": [list(g) for g in self.gvecs],
            "fdicts": [
                sorted([list(v), c.to_json()] for v, c in fd.items())
                for fd in self.fdicts
            ],
            "coeffs": [
                sorted([list(f), c.to_json()] for f, c in cd.items())
                for cd in self.coeffs
            ],
        }

    @classmethod
    def from_json(cls, doc):
        return cls(
            doc["lam"],
            doc["btilde"],
            [tuple(g) for g in doc["gvecs"]],
            [{tuple(v): QLaurent.from_json(c) for v, c in fd} for fd in doc["fdicts"]],
            [{tuple(f): QLaurent.from_json(c) for f, c in cd} for cd in doc["coeffs"]],
        )


def _pad_vec(g, m):
    return tuple(list(g) + [0] * (m - len(g)))


def _delta_ratio(d1, d2):
    """The integer delta with D2 = delta * D1, entry by entry."""
    delta = None
    n = len(d1)
    for i in range(n):
        for j in range(n):
            a, b = d1[i][j], d2[i][j]
            if a == 0:
                if b != 0:
                    raise DeltaMismatch("diagonal blocks are not proportional")
                continue
            if b % a:
                raise DeltaMismatch("diagonal ratio is not an integer")
            q = b // a
            if delta is None:
                delta = q
            elif delta != q:
                raise DeltaMismatch("diagonal blocks are not proportional")
    if delta is None:
        raise DeltaMismatch("source pair has a vanishing diagonal block")
    if delta < 0:
        raise DeltaMismatch("diagonal ratio must be nonnegative")
    return delta


def transport_relation(rel, lam2, btilde2, g1=None, g2=None, gs=None):
    """Move a relation to a second pair with the same principal part.

    The diagonal blocks must satisfy D2 = delta * D1 for an integer
    delta >= 0, with delta = 0 admissible only for a vanishing skew
    form (the classical degeneration).  New g-vectors may be supplied,
    aligned with the stored term order; they must match the old ones on
    the principal block.  Omitted right-side g-vectors default to
    g1 + g2 + Btilde2 u_j, which makes the correction monomial trivial.
    Tori of different ranks are aligned by zero padding.
    """
    lam2 = [list(r) for r in lam2]
    bt2 = [list(r) for r in btilde2]
    n = rel.n
    m = max(rel.m, len(lam2))
    if len(lam2) < m:
        lam2 = pad_matrix(lam2, m, m)
        bt2 = pad_matrix(bt2, m, n)
    if rel.m < m:
        rel = TorusRelation(
            pad_matrix([list(r) for r in rel.lam], m, m),
            pad_matrix([list(r) for r in rel.btilde], m, n),
            tuple(_pad_vec(g, m) for g in rel.gvecs),
            rel.fdicts,
            tuple({_pad_vec(f, m): c for f, c in cd.items()} for cd in rel.coeffs),
        )
    bt1 = [list(r) for r in rel.btilde]
    if linalg.rank(bt1) != n:
        raise RankMismatch("source exchange matrix must have full column rank")
    if [row[:n] for row in bt1[:n]] != [row[:n] for row in bt2[:n]]:
        raise PrincipalMismatch("principal parts differ")
    delta = _delta_ratio(_d_block(rel.lam, rel.btilde, n), _d_block(lam2, bt2, n))
    if delta == 0 and any(any(row) for row in lam2):
        raise DeltaMismatch("a zero ratio needs a vanishing skew form")

    g1new = _pad_vec(g1, m) if g1 is not None else rel.gvecs[0]
    g2new = _pad_vec(g2, m) if g2 is not None else rel.gvecs[1]
    for new, old in zip((g1new, g2new), rel.gvecs[:2]):
        if new[:n] != old[:n]:
            raise PrincipalMismatch("factor g-vectors disagree on the principal block")
    rhs_old = rel.gvecs[2:]
    if gs is None:
        rhs_new = [None] * len(rhs_old)
    else:
        if len(gs) != len(rhs_old):
            raise RankMismatch("wrong number of right-side g-vectors")
        rhs_new = [_pad_vec(g, m) for g in gs]

    base_old = tuple(a + b for a, b in zip(rel.gvecs[0], rel.gvecs[1]))
    base_new = tuple(a + b for a, b in zip(g1new, g2new))
    gvecs2 = [g1new, g2new]
    coeffs2 = []
    for i, gold in enumerate(rhs_old):
        rhs = [a - b for a, b in zip(gold, base_old)]
        u = linalg.solve_int(bt1, rhs)
        if any(a < 0 for a in u):
            raise NegativeU(f"offset {list(u)} of term {i + 3} is negative")
        canon = tuple(a + b for a, b in zip(base_new, linalg.mat_vec(bt2, list(u))))
        gnew = rhs_new[i] if rhs_new[i] is not None else canon
        if gnew[:n] != gold[:n]:
            raise PrincipalMismatch(
                f"term {i + 3} g-vector disagrees on the principal block"
            )
        corr = tuple(a - b for a, b in zip(canon, gnew))
        assert_frozen(corr, n)
        gvecs2.append(gnew)
        coeffs2.append(
            {
                tuple(a + b for a, b in zip(f, corr)): c.subs_vpower(delta)
                for f, c in rel.coeffs[i].items()
            }
        )
    fdicts2 = tuple(
        {v: c.subs_vpower(delta) for v, c in fd.items()} for fd in rel.fdicts
    )
    return TorusRelation(lam2, bt2, tuple(gvecs2), fdicts2, tuple(coeffs2))


def exchange_relation(pair, path, k):
    """Exchange relation at vertex k of the seed reached along path,
    written over the initial torus in transportable shape."""
    seed = mutate_along(initial_seed(pair), path)
    bt_cur = seed.pair.btilde
    m = pair.m
    a_plus = [0] * m
    a_minus = [0] * m
    for i in range(m):
        if i == k:
            continue
        e = bt_cur[i][k]
        if e > 0:
            a_plus[i] = e
        elif e < 0:
            a_minus[i] = -e
    m2 = seed.expansions[k]
    m1 = mutate_seed(seed, k).expansions[k]
    bt0 = [list(r) for r in pair.btilde]
    lam0 = [list(r) for r in pair.lam]

    parts = []
    for elem in (m1, m2):
        g, fd = extract_g_and_f(elem, bt0)
        parts.append((g, fd, elem))
    rhs_parts = {}
    for avec in (a_plus, a_minus):
        elem = normalized_monomial(seed, avec)
        g, fd = extract_g_and_f(elem, bt0)
        if g in rhs_parts:
            rhs_parts[g] = (fd, rhs_parts[g][1] + elem)
        else:
            rhs_parts[g] = (fd, elem)

    lhs = twisted_mul(m1, m2, lam0).scale(
        QLaurent.vpow(-lam_pairing(lam0, parts[0][0], parts[1][0]))
    )
    pv = _phi_vec(bt0)
    res = lhs
    found = []
    for g in sorted(
        rhs_parts,
        key=lambda h: (sum(a * b for a, b in zip(pv, h)), h),
        reverse=True,
    ):
        fd, elem = rhs_parts[g]
        c = res.coeff(g).exact_div(fd[tuple([0] * pair.n)])
        if c.is_zero():
            raise EliminationStuck("product misses an expected corner term")
        res = res - elem.scale(c)
        found.append((g, fd, c))
    if not res.is_zero():
        raise EliminationStuck("exchange product has extra terms")
    gvecs = [parts[0][0], parts[1][0]] + [g for g, _, _ in found]
    fdicts = [dict(parts[0][1]), dict(parts[1][1])] + [dict(fd) for _, fd, _ in found]
    zero = tuple([0] * m)
    cdicts = [{zero: c} for _, _, c in found]
    return TorusRelation(lam0, bt0, tuple(gvecs), tuple(fdicts), tuple(cdicts))
