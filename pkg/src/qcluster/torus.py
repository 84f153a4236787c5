"""Quantum torus arithmetic.

The ground ring is Z[v, v^-1] with v the square root of q.  A torus
element is a finite sum of monomials x^g, g in Z^m, with Laurent
coefficients; the twisted product is

    x^g * x^h = v^(Lam(g, h)) x^(g + h),

where Lam(g, h) = g^T Lam h for a skew-symmetric integer matrix Lam.
The bar involution inverts v and fixes every monomial x^g, hence is an
antiautomorphism for the twisted product.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg
from .errors import (
    IncompatibleError,
    NotDivisible,
    NotFrozen,
    RankMismatch,
)


class QLaurent:
    """Laurent polynomial in v with integer coefficients.

    Stored as a dict {exponent: coefficient} with no zero values; the
    class behaves as an immutable value.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            for k, val in (coeffs.items() if isinstance(coeffs, dict) else coeffs):
                if val:
                    nv = c.get(k, 0) + val
                    if nv:
                        c[k] = nv
                    elif k in c:
                        del c[k]
        self._c = c

    # -- constructors ------------------------------------------------

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({0: 1})

    @classmethod
    def const(cls, c):
        return cls({0: c}) if c else cls()

    @classmethod
    def vpow(cls, k, c=1):
        return cls({k: c}) if c else cls()

    # -- ring structure ----------------------------------------------

    def __add__(self, other):
        c = dict(self._c)
        for k, val in other._c.items():
            nv = c.get(k, 0) + val
            if nv:
                c[k] = nv
            elif k in c:
                del c[k]
        out = QLaurent.__new__(QLaurent)
        out._c = c
        return out

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        out = QLaurent.__new__(QLaurent)
        out._c = {k: -v for k, v in self._c.items()}
        return out

    def __mul__(self, other):
        if isinstance(other, int):
            other = QLaurent.const(other)
        c = {}
        for k1, v1 in self._c.items():
            for k2, v2 in other._c.items():
                k = k1 + k2
                nv = c.get(k, 0) + v1 * v2
                if nv:
                    c[k] = nv
                elif k in c:
                    del c[k]
        out = QLaurent.__new__(QLaurent)
        out._c = c
        return out

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            other = QLaurent.const(other)
        if not isinstance(other, QLaurent):
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __bool__(self):
        return bool(self._c)

    def __repr__(self):
        if not self._c:
            return "0"
        parts = []
        for k in sorted(self._c):
            c = self._c[k]
            if k == 0:
                parts.append(f"{c}")
            elif k == 1:
                parts.append(f"{c}*v" if c != 1 else "v")
            else:
                parts.append(f"{c}*v^{k}" if c != 1 else f"v^{k}")
        return " + ".join(parts)

    # -- involutions and specialisations -------------------------------

    def bar(self):
        """v -> v^-1."""
        out = QLaurent.__new__(QLaurent)
        out._c = {-k: v for k, v in self._c.items()}
        return out

    def subs_vpower(self, k):
        """Substitute v -> v^k.  k = 0 collapses to the sum of coefficients
        (the classical limit), k = 1 is the identity."""
        if k == 1:
            return self
        if k == 0:
            return QLaurent.const(sum(self._c.values()))
        return QLaurent({e * k: c for e, c in self._c.items()})

    def eval_one(self):
        return sum(self._c.values())

    # -- queries -------------------------------------------------------

    def items(self):
        return sorted(self._c.items())

    def is_zero(self):
        return not self._c

    def is_one(self):
        return self._c == {0: 1}

    def is_monomial(self):
        return len(self._c) == 1

    def is_nonneg(self):
        return all(c >= 0 for c in self._c.values())

    def is_bar_invariant(self):
        return all(self._c.get(-k, 0) == v for k, v in self._c.items())

    def min_pow(self):
        return min(self._c) if self._c else 0

    def max_pow(self):
        return max(self._c) if self._c else 0

    def monomial_data(self):
        """For a one-term coefficient, return (exponent, coefficient)."""
        if len(self._c) != 1:
            raise ValueError("not a coefficient monomial")
        ((k, c),) = self._c.items()
        return k, c

    # -- exact division -------------------------------------------------

    def exact_div(self, other):
        """Exact quotient self / other in Z[v, v^-1]; raises NotDivisible."""
        if not other._c:
            raise NotDivisible("division by zero coefficient")
        if not self._c:
            return QLaurent.zero()
        num = dict(self._c)
        quo = {}
        dmax = other.max_pow()
        dlead = other._c[dmax]
        guard = len(self._c) * (len(other._c) + 1) + 8
        while num:
            nmax = max(num)
            c, r = divmod(num[nmax], dlead)
            if r:
                raise NotDivisible("coefficient division left a remainder")
            k = nmax - dmax
            quo[k] = c
            for e, dc in other._c.items():
                t = e + k
                nv = num.get(t, 0) - c * dc
                if nv:
                    num[t] = nv
                elif t in num:
                    del num[t]
            guard -= 1
            if guard < 0:
                raise NotDivisible("division does not terminate")
        return QLaurent(quo)

    # -- serialisation ----------------------------------------------------

    def to_json(self):
        return [[k, c] for k, c in sorted(self._c.items())]

    @classmethod
    def from_json(cls, data):
        return cls({int(k): int(c) for k, c in data})


def _as_coeff(c):
    if isinstance(c, QLaurent):
        return c
    if isinstance(c, int):
        return QLaurent.const(c)
    raise TypeError(f"cannot use {type(c).__name__} as a coefficient")


class TorusElement:
    """Finite Z[v^(+-1)]-combination of monomials x^g, g in Z^rank.

    The object itself is product-agnostic: the commutative product is a
    method, while the twisted product lives in :func:`twisted_mul` since
    it needs the skew form.
    """

    __slots__ = ("rank", "_terms")

    def __init__(self, rank, terms=None):
        self.rank = rank
        t = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for g, c in items:
                g = tuple(int(x) for x in g)
                if len(g) != rank:
                    raise RankMismatch(f"exponent {g} does not have rank {rank}")
                c = _as_coeff(c)
                if not c.is_zero():
                    acc = t.get(g)
                    nc = acc + c if acc is not None else c
                    if nc.is_zero():
                        t.pop(g, None)
                    else:
                        t[g] = nc
        self._terms = t

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, rank):
        return cls(rank)

    @classmethod
    def one(cls, rank):
        return cls(rank, {tuple([0] * rank): QLaurent.one()})

    @classmethod
    def monomial(cls, g, coeff=1):
        return cls(len(g), {tuple(g): _as_coeff(coeff)})

    @classmethod
    def unit_x(cls, rank, i, power=1):
        g = [0] * rank
        g[i] = power
        return cls(rank, {tuple(g): QLaurent.one()})

    # -- additive structure ----------------------------------------------

    def __add__(self, other):
        self._check(other)
        t = dict(self._terms)
        for g, c in other._terms.items():
            acc = t.get(g)
            nc = acc + c if acc is not None else c
            if nc.is_zero():
                t.pop(g, None)
            else:
                t[g] = nc
        out = TorusElement.__new__(TorusElement)
        out.rank, out._terms = self.rank, t
        return out

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        out = TorusElement.__new__(TorusElement)
        out.rank = self.rank
        out._terms = {g: -c for g, c in self._terms.items()}
        return out

    def scale(self, c):
        c = _as_coeff(c)
        if c.is_zero():
            return TorusElement.zero(self.rank)
        out = TorusElement.__new__(TorusElement)
        out.rank = self.rank
        out._terms = {g: cc * c for g, cc in self._terms.items()}
        return out

    def shift_exponents(self, g):
        """Multiply by the monomial x^g in the commutative sense."""
        g = tuple(g)
        if len(g) != self.rank:
            raise RankMismatch("shift vector has wrong rank")
        out = TorusElement.__new__(TorusElement)
        out.rank = self.rank
        out._terms = {
            tuple(a + b for a, b in zip(h, g)): c for h, c in self._terms.items()
        }
        return out

    def usual_mul(self, other):
        """Commutative product (exponents add, coefficients multiply)."""
        self._check(other)
        t = {}
        for g1, c1 in self._terms.items():
            for g2, c2 in other._terms.items():
                g = tuple(a + b for a, b in zip(g1, g2))
                c = c1 * c2
                acc = t.get(g)
                nc = acc + c if acc is not None else c
                if nc.is_zero():
                    t.pop(g, None)
                else:
                    t[g] = nc
        out = TorusElement.__new__(TorusElement)
        out.rank, out._terms = self.rank, t
        return out

    # -- involutions -------------------------------------------------------

    def bar(self):
        """Coefficient-wise v -> v^-1; monomials x^g are fixed."""
        out = TorusElement.__new__(TorusElement)
        out.rank = self.rank
        out._terms = {g: c.bar() for g, c in self._terms.items()}
        return out

    def subs_vpower(self, k):
        out = TorusElement.__new__(TorusElement)
        out.rank = self.rank
        out._terms = {}
        for g, c in self._terms.items():
            nc = c.subs_vpower(k)
            if not nc.is_zero():
                out._terms[g] = nc
        return out

    # -- queries -------------------------------------------------------------

    def _check(self, other):
        if self.rank != other.rank:
            raise RankMismatch("mixing toruses of different rank")

    def is_zero(self):
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if not isinstance(other, TorusElement):
            return NotImplemented
        return self.rank == other.rank and self._terms == other._terms

    def __hash__(self):
        return hash((self.rank, frozenset(self._terms.items())))

    def __len__(self):
        return len(self._terms)

    def coeff(self, g):
        return self._terms.get(tuple(g), QLaurent.zero())

    def support(self):
        return sorted(self._terms)

    def terms(self):
        for g in sorted(self._terms):
            yield g, self._terms[g]

    def leading(self, key):
        """Leading (exponent, coefficient) for a monomial order given as a
        key function on exponent tuples."""
        if not self._terms:
            raise ValueError("zero element has no leading term")
        g = max(self._terms, key=key)
        return g, self._terms[g]

    def is_bar_invariant(self):
        return all(c.is_bar_invariant() for c in self._terms.values())

    def has_nonneg_coeffs(self):
        return all(c.is_nonneg() for c in self._terms.values())

    def is_frozen(self, n):
        """True if every monomial has zero exponent on the first n
        (principal) coordinates."""
        return all(all(x == 0 for x in g[:n]) for g in self._terms)

    def __repr__(self):
        if not self._terms:
            return "TorusElement(0)"
        bits = [f"({c!r})*x^{list(g)}" for g, c in self.terms()]
        return " + ".join(bits)

    # -- serialisation ----------------------------------------------------------

    def to_json(self):
        return [
            {"exp": list(g), "coeff": c.to_json()} for g, c in self.terms()
        ]

    @classmethod
    def from_json(cls, data, rank=None):
        terms = [(tuple(t["exp"]), QLaurent.from_json(t["coeff"])) for t in data]
        if rank is None:
            if not terms:
                raise RankMismatch("rank needed for an empty element")
            rank = len(terms[0][0])
        return cls(rank, terms)


# ---------------------------------------------------------------------------
# skew form and twisted multiplication


def lam_pairing(lam, g, h):
    """g^T Lam h for integer vectors g, h."""
    total = 0
    for i, gi in enumerate(g):
        if gi:
            row = lam[i]
            total += gi * sum(r * hj for r, hj in zip(row, h))
    return total


def twisted_mul(a, b, lam):
    """Twisted product on a quantum torus with skew form lam."""
    a._check(b)
    if len(lam) != a.rank:
        raise RankMismatch("skew matrix rank does not match the torus")
    # precompute lam * h for the (usually few) distinct right exponents
    lam_h = {h: linalg.mat_vec(lam, list(h)) for h in b._terms}
    t = {}
    for g1, c1 in a._terms.items():
        for g2, c2 in b._terms.items():
            w = sum(x * y for x, y in zip(g1, lam_h[g2]))
            g = tuple(x + y for x, y in zip(g1, g2))
            c = c1 * c2 * QLaurent.vpow(w)
            acc = t.get(g)
            nc = acc + c if acc is not None else c
            if nc.is_zero():
                t.pop(g, None)
            else:
                t[g] = nc
    out = TorusElement.__new__(TorusElement)
    out.rank, out._terms = a.rank, t
    return out


def graded_lex_key(g):
    """Key for the graded lexicographic order on exponent vectors."""
    return (sum(g), g)


def exact_divide(num, den, lam, order_key=graded_lex_key):
    """Solve c * den = num in the quantum torus (right division).

    Eliminates leading terms of den with respect to the given total order
    on exponent vectors; raises NotDivisible when a remainder survives.
    """
    num._check(den)
    if den.is_zero():
        raise NotDivisible("division by zero")
    if num.is_zero():
        return TorusElement.zero(num.rank)
    dlead, dcoeff = den.leading(order_key)
    lam_dlead = linalg.mat_vec(lam, list(dlead))
    rem = num
    quo = {}
    guard = 4 * len(num) * (len(den) + 2) + 64
    while rem:
        nlead, ncoeff = rem.leading(order_key)
        h = tuple(a - b for a, b in zip(nlead, dlead))
        w = sum(x * y for x, y in zip(h, lam_dlead))
        c = ncoeff.exact_div(dcoeff * QLaurent.vpow(w))
        quo[h] = quo.get(h, QLaurent.zero()) + c
        piece = twisted_mul(TorusElement.monomial(h, c), den, lam)
        rem = rem - piece
        guard -= 1
        if guard < 0:
            raise NotDivisible("elimination does not terminate")
    return TorusElement(num.rank, quo)


# ---------------------------------------------------------------------------
# compatible pairs


def _freeze(mat):
    return tuple(tuple(int(x) for x in row) for row in mat)


@dataclass(frozen=True)
class CompatiblePair:
    """Skew form Lam (m x m) together with an exchange matrix Btilde
    (m x n) such that Lam * (-Btilde) = [D; 0] with D diagonal positive."""

    lam: tuple
    btilde: tuple
    d: tuple

    @property
    def m(self):
        return len(self.lam)

    @property
    def n(self):
        return len(self.btilde[0]) if self.btilde else 0

    def principal_part(self):
        n = self.n
        return [list(row[:n]) for row in self.btilde[:n]]

    def delta_of(self):
        """If D = delta * identity, return delta, else None."""
        n = self.n
        d0 = self.d[0][0] if n else 1
        for i in range(n):
            for j in range(n):
                want = d0 if i == j else 0
                if self.d[i][j] != want:
                    return None
        return d0


@dataclass(frozen=True)
class WeaklyCompatiblePair:
    """Same block condition with no positivity or diagonality on D."""

    lam: tuple
    btilde: tuple
    d: tuple

    @property
    def m(self):
        return len(self.lam)

    @property
    def n(self):
        return len(self.btilde[0]) if self.btilde else 0

    def principal_part(self):
        n = self.n
        return [list(row[:n]) for row in self.btilde[:n]]


def check_compatibility(lam, btilde):
    """Classify (lam, btilde); returns a CompatiblePair or a
    WeaklyCompatiblePair, or raises IncompatibleError."""
    lam = [list(map(int, row)) for row in lam]
    btilde = [list(map(int, row)) for row in btilde]
    m = len(lam)
    if any(len(row) != m for row in lam):
        raise RankMismatch("lam must be square")
    if not linalg.is_skew_symmetric(lam):
        raise IncompatibleError("lam is not skew-symmetric")
    if len(btilde) != m:
        raise RankMismatch("btilde must have m rows")
    n = len(btilde[0]) if btilde else 0
    if any(len(row) != n for row in btilde):
        raise RankMismatch("btilde rows have inconsistent length")
    if n > m:
        raise RankMismatch("btilde cannot have more columns than rows")
    prod = linalg.matmul(lam, linalg.neg(btilde))
    d = [row[:] for row in prod[:n]]
    lower = prod[n:]
    if any(any(x != 0 for x in row) for row in lower):
        raise IncompatibleError("Lam*(-Btilde) has a nonzero lower block")
    diagonal_positive = all(
        (d[i][j] == 0 if i != j else d[i][j] > 0) for i in range(n) for j in range(n)
    )
    if diagonal_positive:
        return CompatiblePair(_freeze(lam), _freeze(btilde), _freeze(d))
    return WeaklyCompatiblePair(_freeze(lam), _freeze(btilde), _freeze(d))


# ---------------------------------------------------------------------------
# the double torus


def pad_matrix(mat, rows, cols):
    """Zero-pad an integer matrix to the requested shape."""
    out = [[0] * cols for _ in range(rows)]
    for i, row in enumerate(mat):
        for j, x in enumerate(row):
            out[i][j] = x
    return out


@dataclass(frozen=True)
class DoubleTorusContext:
    """Ambient data for x/y monomials: a pair padded to rank N >= m, 2n."""

    lam: tuple
    btilde: tuple
    nvert: int

    @classmethod
    def from_pair(cls, pair):
        n = pair.n
        m = pair.m
        nn = max(2 * n, m)
        return cls(
            _freeze(pad_matrix([list(r) for r in pair.lam], nn, nn)),
            _freeze(pad_matrix([list(r) for r in pair.btilde], nn, n)),
            n,
        )

    @property
    def rank(self):
        return len(self.lam)


class DoubleTorusElement:
    """Finite combination of monomials x^g y^u with g in Z^N, u in Z^n.

    The twisted product is
        x^g1 y^u1 * x^g2 y^u2
            = v^(Lam(g1 + Btilde u1, g2 + Btilde u2)) x^(g1+g2) y^(u1+u2).
    """

    __slots__ = ("xrank", "yrank", "_terms")

    def __init__(self, xrank, yrank, terms=None):
        self.xrank = xrank
        self.yrank = yrank
        t = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for (g, u), c in items:
                g, u = tuple(g), tuple(u)
                if len(g) != xrank or len(u) != yrank:
                    raise RankMismatch("bad x/y exponent lengths")
                c = _as_coeff(c)
                if not c.is_zero():
                    key = (g, u)
                    acc = t.get(key)
                    nc = acc + c if acc is not None else c
                    if nc.is_zero():
                        t.pop(key, None)
                    else:
                        t[key] = nc
        self._terms = t

    @classmethod
    def monomial(cls, g, u, coeff=1):
        return cls(len(g), len(u), {(tuple(g), tuple(u)): _as_coeff(coeff)})

    def __add__(self, other):
        if (self.xrank, self.yrank) != (other.xrank, other.yrank):
            raise RankMismatch("mixing double toruses of different shape")
        t = dict(self._terms)
        for k, c in other._terms.items():
            acc = t.get(k)
            nc = acc + c if acc is not None else c
            if nc.is_zero():
                t.pop(k, None)
            else:
                t[k] = nc
        out = DoubleTorusElement.__new__(DoubleTorusElement)
        out.xrank, out.yrank, out._terms = self.xrank, self.yrank, t
        return out

    def __sub__(self, other):
        return self + other.scale(QLaurent.const(-1))

    def scale(self, c):
        c = _as_coeff(c)
        out = DoubleTorusElement.__new__(DoubleTorusElement)
        out.xrank, out.yrank = self.xrank, self.yrank
        out._terms = (
            {} if c.is_zero() else {k: cc * c for k, cc in self._terms.items()}
        )
        return out

    def bar(self):
        out = DoubleTorusElement.__new__(DoubleTorusElement)
        out.xrank, out.yrank = self.xrank, self.yrank
        out._terms = {k: c.bar() for k, c in self._terms.items()}
        return out

    def __eq__(self, other):
        if not isinstance(other, DoubleTorusElement):
            return NotImplemented
        return (
            self.xrank == other.xrank
            and self.yrank == other.yrank
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self.xrank, self.yrank, frozenset(self._terms.items())))

    def is_zero(self):
        return not self._terms

    def terms(self):
        for k in sorted(self._terms):
            yield k, self._terms[k]

    def twisted_mul(self, other, ctx):
        if (self.xrank, self.yrank) != (other.xrank, other.yrank):
            raise RankMismatch("mixing double toruses of different shape")
        lam = [list(r) for r in ctx.lam]
        bt = [list(r) for r in ctx.btilde]
        t = {}
        cache = {}
        for (g2, u2), c2 in other._terms.items():
            vec2 = [a + b for a, b in zip(g2, linalg.mat_vec(bt, list(u2)))]
            cache[(g2, u2)] = linalg.mat_vec(lam, vec2)
        for (g1, u1), c1 in self._terms.items():
            vec1 = [a + b for a, b in zip(g1, linalg.mat_vec(bt, list(u1)))]
            for (g2, u2), c2 in other._terms.items():
                w = sum(x * y for x, y in zip(vec1, cache[(g2, u2)]))
                key = (
                    tuple(a + b for a, b in zip(g1, g2)),
                    tuple(a + b for a, b in zip(u1, u2)),
                )
                c = c1 * c2 * QLaurent.vpow(w)
                acc = t.get(key)
                nc = acc + c if acc is not None else c
                if nc.is_zero():
                    t.pop(key, None)
                else:
                    t[key] = nc
        out = DoubleTorusElement.__new__(DoubleTorusElement)
        out.xrank, out.yrank, out._terms = self.xrank, self.yrank, t
        return out


def hat_pi(elem, btilde):
    """Projection x^g y^u -> x^(g + Btilde u) onto the plain torus."""
    bt = [list(r) for r in btilde]
    rank = elem.xrank
    if len(bt) != rank:
        raise RankMismatch("btilde rows must match the x-rank")
    terms = {}
    for (g, u), c in elem._terms.items():
        h = tuple(a + b for a, b in zip(g, linalg.mat_vec(bt, list(u))))
        acc = terms.get(h)
        nc = acc + c if acc is not None else c
        if nc.is_zero():
            terms.pop(h, None)
        else:
            terms[h] = nc
    return TorusElement(rank, terms)


def assert_frozen(g, n):
    if any(x != 0 for x in g[:n]):
        raise NotFrozen(f"exponent {list(g)} has a nonzero principal part")
