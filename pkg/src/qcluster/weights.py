"""Bigraded weight vectors and the deformed Cartan calculus.

A weight is a finite-support integer map on pairs (vertex, degree) where
degrees range over half-integers.  Degrees are stored doubled, so the
key (i, d2) means vertex i in degree d2/2; integer degrees have even d2,
half-integer ones odd d2.

The deformed Cartan operator acts by

    (C_q xi)_k(a) = xi_k(a - 1/2) + xi_k(a + 1/2)
                    - sum_{j > k} b_kj xi_j(a - 1/2)
                    - sum_{i < k} b_ik xi_i(a + 1/2)

and commutes with degree shifts.  Its inverse is computed by back
substitution along the order (degree, vertex): solving C_q xi = eta for
the unknown xi_k(a + 1/2) only needs values at strictly smaller degree
or at the same degree and smaller vertex.
"""

from __future__ import annotations

from .errors import CutoffExceeded, RankMismatch


class Weight:
    """Immutable finite-support map (vertex, doubled degree) -> int."""

    __slots__ = ("_e",)

    def __init__(self, entries=None):
        e = {}
        if entries:
            items = entries.items() if isinstance(entries, dict) else entries
            for (i, d2), c in items:
                if c:
                    k = (int(i), int(d2))
                    nv = e.get(k, 0) + c
                    if nv:
                        e[k] = nv
                    elif k in e:
                        del e[k]
        self._e = e

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def unit(cls, i, d2, c=1):
        return cls({(i, d2): c})

    def __add__(self, other):
        e = dict(self._e)
        for k, c in other._e.items():
            nv = e.get(k, 0) + c
            if nv:
                e[k] = nv
            elif k in e:
                del e[k]
        out = Weight.__new__(Weight)
        out._e = e
        return out

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        out = Weight.__new__(Weight)
        out._e = {k: -c for k, c in self._e.items()}
        return out

    def scale(self, c):
        out = Weight.__new__(Weight)
        out._e = {} if c == 0 else {k: c * v for k, v in self._e.items()}
        return out

    def __eq__(self, other):
        if not isinstance(other, Weight):
            return NotImplemented
        return self._e == other._e

    def __hash__(self):
        return hash(frozenset(self._e.items()))

    def __bool__(self):
        return bool(self._e)

    def __getitem__(self, key):
        return self._e.get((key[0], key[1]), 0)

    def items(self):
        return sorted(self._e.items())

    def key(self):
        """Canonical hashable form, usable as a dict key or label."""
        return tuple(sorted(self._e.items()))

    @classmethod
    def from_key(cls, key):
        return cls(dict(key))

    def support(self):
        return sorted(self._e)

    def degrees2(self):
        return sorted({d2 for (_, d2) in self._e})

    def vertices(self):
        return sorted({i for (i, _) in self._e})

    def is_zero(self):
        return not self._e

    def is_nonneg(self):
        return all(c >= 0 for c in self._e.values())

    def total(self):
        """Sum of all entries (the size |w|)."""
        return sum(self._e.values())

    def shift(self, d2):
        """Degree shift by d2/2: (xi[d])_k(a) = xi_k(a + d), so an entry
        at doubled degree e2 moves to e2 - d2."""
        out = Weight.__new__(Weight)
        out._e = {(i, e2 - d2): c for (i, e2), c in self._e.items()}
        return out

    def dot(self, other):
        """Pointwise pairing over the common support."""
        if len(self._e) > len(other._e):
            self, other = other, self
        return sum(c * other._e.get(k, 0) for k, c in self._e.items())

    def __repr__(self):
        if not self._e:
            return "Weight(0)"
        bits = []
        for (i, d2), c in self.items():
            deg = d2 // 2 if d2 % 2 == 0 else f"{d2}/2"
            bits.append(f"{c}*e[{i},{deg}]")
        return " + ".join(bits)

    def to_json(self):
        """1-based vertex labels in the external form."""
        return {"entries": [[i + 1, d2, c] for (i, d2), c in self.items()]}

    @classmethod
    def from_json(cls, doc):
        return cls({(int(i) - 1, int(d2)): int(c) for i, d2, c in doc["entries"]})


def cq_apply(b, xi):
    """Apply the deformed Cartan operator for the exchange matrix b."""
    n = len(b)
    acc = {}

    def add(i, d2, c):
        if c:
            k = (i, d2)
            nv = acc.get(k, 0) + c
            if nv:
                acc[k] = nv
            elif k in acc:
                del acc[k]

    for (j, d2), c in xi._e.items():
        if not (0 <= j < n):
            raise RankMismatch(f"vertex {j} outside 0..{n - 1}")
        add(j, d2 + 1, c)
        add(j, d2 - 1, c)
        for k in range(j):
            if b[k][j]:
                add(k, d2 + 1, -b[k][j] * c)
        for k in range(j + 1, n):
            if b[j][k]:
                add(k, d2 - 1, -b[j][k] * c)
    out = Weight.__new__(Weight)
    out._e = acc
    return out


def _cq_window(b, eta, hi2):
    """Back-substitute C_q xi = eta for all doubled degrees <= hi2.

    Returns (xi, stabilised): the computed entries are exact regardless;
    stabilised means the full preimage is finite and entirely below the
    window, so xi is the complete inverse.
    """
    n = len(b)
    entries = eta._e
    if not entries:
        return Weight.zero(), True
    lo2 = min(d2 for (_, d2) in entries)
    eta_max2 = max(d2 for (_, d2) in entries)
    xi = {}

    def xi_get(i, d2):
        return xi.get((i, d2), 0)

    d2 = lo2 + 1  # first level where the unknown can be nonzero
    last_two_zero = 0
    stabilised = False
    while d2 <= hi2:
        level_zero = True
        for k in range(n):
            # (C_q xi)_k(a) with a + 1/2 = d2/2, i.e. doubled a2 = d2 - 1
            a2 = d2 - 1
            val = entries.get((k, a2), 0)
            val -= xi_get(k, d2 - 2)
            for j in range(k + 1, n):
                if b[k][j]:
                    val += b[k][j] * xi_get(j, d2 - 2)
            for i in range(k):
                if b[i][k]:
                    val += b[i][k] * xi_get(i, d2)
            if val:
                xi[(k, d2)] = val
                level_zero = False
        last_two_zero = last_two_zero + 1 if level_zero else 0
        if last_two_zero >= 2 and d2 > eta_max2:
            stabilised = True
            break
        d2 += 1
    out = Weight.__new__(Weight)
    out._e = xi
    return out, stabilised


def cq_inverse(b, eta, hi2=None):
    """Full preimage under C_q; raises CutoffExceeded when the preimage
    does not stabilise below the window (default: 64 above the support)."""
    if eta.is_zero():
        return Weight.zero()
    if hi2 is None:
        hi2 = max(d2 for (_, d2) in eta._e) + 64
    xi, ok = _cq_window(b, eta, hi2)
    if not ok:
        raise CutoffExceeded(
            f"preimage did not stabilise below doubled degree {hi2}"
        )
    return xi


def cq_inverse_window(b, eta, hi2):
    """Exact truncation of the C_q-preimage to doubled degrees <= hi2.
    The second component reports whether the full preimage stabilised."""
    return _cq_window(b, eta, hi2)


# ---------------------------------------------------------------------------
# bilinear forms


def bilinear_d(b, v1, w1, v2, w2):
    """(w1 - C_q v1) . v2[-1/2] + v1 . w2[-1/2]."""
    return (w1 - cq_apply(b, v1)).dot(v2.shift(-1)) + v1.dot(w2.shift(-1))


def bilinear_d_alt(b, v1, w1, v2, w2):
    """v1[1/2] . (w2 - C_q v2) + w1[1/2] . v2  (must agree with bilinear_d)."""
    return v1.shift(1).dot(w2 - cq_apply(b, v2)) + w1.shift(1).dot(v2)


def dtilde_w(b, w, wp):
    """- w[1/2] . C_q^(-1) wp, evaluated through an exact finite window."""
    ws = w.shift(1)
    if ws.is_zero() or wp.is_zero():
        return 0
    hi2 = max(d2 for (_, d2) in ws._e)
    inv, _ = _cq_window(b, wp, hi2)
    return -ws.dot(inv)


def eprime(b, w, wp):
    """Antisymmetrised version: -w[1/2].C_q^(-1) wp + wp[1/2].C_q^(-1) w."""
    return dtilde_w(b, w, wp) - dtilde_w(b, wp, w)


def dtilde(b, v1, w1, v2, w2):
    return bilinear_d(b, v1, w1, v2, w2) + dtilde_w(b, w1, w2)


def bilinear_forms(b, pair1, pair2):
    """All pairings of two dominant-style pairs at once, as a dict."""
    v1, w1 = pair1
    v2, w2 = pair2
    return {
        "d": bilinear_d(b, v1, w1, v2, w2),
        "d_alt": bilinear_d_alt(b, v1, w1, v2, w2),
        "dW": dtilde_w(b, w1, w2),
        "dtilde": dtilde(b, v1, w1, v2, w2),
        "E": eprime(b, w1, w2),
    }


# ---------------------------------------------------------------------------
# dominance and truncation


def is_truncated_w(w):
    """Supported on doubled degrees {-2, 0} with nonnegative entries."""
    return all(d2 in (-2, 0) for (_, d2) in w._e) and w.is_nonneg()


def is_level_v(v):
    """Supported on doubled degree -1 with nonnegative entries."""
    return all(d2 == -1 for (_, d2) in v._e) and v.is_nonneg()


def v_from_tuple(u):
    return Weight({(i, -1): c for i, c in enumerate(u)})


def v_to_tuple(v, n):
    out = [0] * n
    for (i, d2), c in v._e.items():
        if d2 != -1:
            raise RankMismatch("v is not supported in degree -1/2")
        out[i] = c
    return tuple(out)


def w_from_pair(neg, zero):
    """Truncated weight from integer vectors in degrees -1 and 0."""
    e = {}
    for i, c in enumerate(neg):
        if c:
            e[(i, -2)] = c
    for i, c in enumerate(zero):
        if c:
            e[(i, 0)] = c
    return Weight(e)


def dominates(b, pair1, pair2):
    """True iff pair2 is below pair1: there is v'' >= 0 with
    w2 - C_q v2 = w1 - C_q (v1 + v'')."""
    v1, w1 = pair1
    v2, w2 = pair2
    eta = (w1 - cq_apply(b, v1)) - (w2 - cq_apply(b, v2))
    if eta.is_zero():
        return True
    hi2 = max(d2 for (_, d2) in eta._e) + 2
    cand, ok = _cq_window(b, eta, hi2)
    if not ok:
        return False
    return cand.is_nonneg() and cq_apply(b, cand) == eta


def enumerate_l_dominant(b, w):
    """All v (in degree -1/2, as Weights) with w - C_q v >= 0, for a
    truncated nonnegative w.  Deterministic order: by |v|, then lex."""
    n = len(b)
    if not is_truncated_w(w):
        raise RankMismatch("w must be truncated and nonnegative")
    wneg = [w[(i, -2)] for i in range(n)]
    wzero = [w[(i, 0)] for i in range(n)]
    sols = []

    def feasible(u):
        for k in range(n):
            lhs0 = u[k] - sum(b[k][j] * u[j] for j in range(k + 1, n))
            if lhs0 > wzero[k]:
                return False
            lhs1 = u[k] - sum(b[i][k] * u[i] for i in range(k))
            if lhs1 > wneg[k]:
                return False
        return True

    def rec(k, u):
        if k == n:
            if feasible(u):
                sols.append(tuple(u))
            return
        bound = wneg[k] + sum(b[i][k] * u[i] for i in range(k))
        for c in range(0, max(bound, -1) + 1):
            u.append(c)
            rec(k + 1, u)
            u.pop()

    rec(0, [])
    sols.sort(key=lambda u: (sum(u), u))
    return [v_from_tuple(u) for u in sols]


def split_coefficient_part(w):
    """Split a truncated w into (phi_w, f_w) where f_w collects, per
    vertex, the common part min(w(-1), w(0)) in both degrees."""
    if not is_truncated_w(w):
        raise RankMismatch("w must be truncated and nonnegative")
    f = {}
    for i in sorted({i for (i, _) in w._e}):
        m = min(w[(i, -2)], w[(i, 0)])
        if m:
            f[(i, -2)] = m
            f[(i, 0)] = m
    fw = Weight(f)
    return w - fw, fw


def is_coefficient_free(w):
    phi, f = split_coefficient_part(w)
    return f.is_zero()
