"""Exact multivariate integer Laurent polynomials.

Terms are stored sparsely as a map from exponent tuples (entries may be
negative) to nonzero integer coefficients.  Everything is defined up to
units +-t1^k1...tb^kb; normalize_units picks the canonical representative
with minimum exponent 0 in each variable and positive graded-lex leading
coefficient.

The gcd is primitive-PRS based (recursive content/primitive part with a
pseudo-remainder sequence in the last variable), exact and dependency-free;
intended for up to three variables at desk-scale degrees.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd as int_gcd

from .errors import BadBasis, RingMismatch, Unsupported, ZeroIdeal, ZeroPolynomial


class LaurentPoly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        self.terms: dict[tuple[int, ...], int] = {}
        if terms:
            for e, c in (terms.items() if isinstance(terms, dict) else terms):
                e = tuple(e)
                if len(e) != nvars:
                    raise RingMismatch(f"exponent {e} has wrong arity for {nvars} vars")
                if c:
                    self.terms[e] = self.terms.get(e, 0) + c
                    if not self.terms[e]:
                        del self.terms[e]

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "LaurentPoly":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c: int) -> "LaurentPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, exps, c: int = 1) -> "LaurentPoly":
        exps = tuple(exps)
        return cls(len(exps), {exps: c})

    @classmethod
    def univariate(cls, coeffs: dict[int, int]) -> "LaurentPoly":
        return cls(1, {(e,): c for e, c in coeffs.items()})

    # -- basics --------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (isinstance(other, LaurentPoly) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def _chk(self, other: "LaurentPoly"):
        if self.nvars != other.nvars:
            raise RingMismatch(f"{self.nvars} vars vs {other.nvars}")

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._chk(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
            if not t[e]:
                del t[e]
        out = LaurentPoly(self.nvars)
        out.terms = t
        return out

    def __neg__(self) -> "LaurentPoly":
        out = LaurentPoly(self.nvars)
        out.terms = {e: -c for e, c in self.terms.items()}
        return out

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, int):
            return self.scalar(other)
        self._chk(other)
        t: dict[tuple[int, ...], int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
                if not t[e]:
                    del t[e]
        out = LaurentPoly(self.nvars)
        out.terms = t
        return out

    __rmul__ = __mul__

    def scalar(self, n: int) -> "LaurentPoly":
        if n == 0:
            return LaurentPoly.zero(self.nvars)
        out = LaurentPoly(self.nvars)
        out.terms = {e: n * c for e, c in self.terms.items()}
        return out

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            raise ValueError("negative power")
        out = LaurentPoly.constant(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __repr__(self):
        return f"LaurentPoly({self.nvars}, {render(self)!r})"

    def min_exponents(self) -> tuple[int, ...]:
        return tuple(min(e[k] for e in self.terms) for k in range(self.nvars))

    def max_exponents(self) -> tuple[int, ...]:
        return tuple(max(e[k] for e in self.terms) for k in range(self.nvars))

    def shift(self, by) -> "LaurentPoly":
        by = tuple(by)
        out = LaurentPoly(self.nvars)
        out.terms = {tuple(a + b for a, b in zip(e, by)): c
                     for e, c in self.terms.items()}
        return out

    def invert_variables(self) -> "LaurentPoly":
        out = LaurentPoly(self.nvars)
        out.terms = {tuple(-x for x in e): c for e, c in self.terms.items()}
        return out

    def evaluate_at_ones(self) -> int:
        return sum(self.terms.values())


def laurent_add(p, q):
    return p + q


def laurent_mul(p, q):
    return p * q


def laurent_neg(p):
    return -p


def scalar_mul(n, p):
    return p.scalar(n)


# ---------------------------------------------------------------------------
# Unit normalization

def _graded_lex_key(e):
    return (sum(e), e)


def normalize_units(p: LaurentPoly) -> LaurentPoly:
    """Canonical representative of the class {+-monomial * p}: shift so the
    minimum exponent in each variable is 0, then fix the sign so the
    graded-lex-leading coefficient is positive."""
    if p.is_zero():
        raise ZeroPolynomial("cannot normalize the zero polynomial")
    q = p.shift(tuple(-m for m in p.min_exponents()))
    lead = max(q.terms, key=_graded_lex_key)
    if q.terms[lead] < 0:
        q = -q
    return q


def unit_equal(p: LaurentPoly, q: LaurentPoly) -> bool:
    if p.is_zero() or q.is_zero():
        return p.is_zero() and q.is_zero()
    return normalize_units(p) == normalize_units(q)


# ---------------------------------------------------------------------------
# Recursive dense form used by gcd and exact division.
# A k-variable polynomial is an int when k == 0, otherwise a list of
# (k-1)-variable coefficients indexed by the exponent of the LAST variable,
# with no trailing zero entries.  Exponents must be nonnegative here.

def _rzero(k):
    return 0 if k == 0 else []


def _ris_zero(a, k) -> bool:
    return a == 0 if k == 0 else len(a) == 0


def _rtrim(a, k):
    while a and _ris_zero(a[-1], k - 1):
        a.pop()
    return a


def _radd(a, b, k):
    if k == 0:
        return a + b
    out = []
    for i in range(max(len(a), len(b))):
        x = a[i] if i < len(a) else _rzero(k - 1)
        y = b[i] if i < len(b) else _rzero(k - 1)
        out.append(_radd(x, y, k - 1))
    return _rtrim(out, k)


def _rneg(a, k):
    if k == 0:
        return -a
    return [_rneg(x, k - 1) for x in a]


def _rmul(a, b, k):
    if k == 0:
        return a * b
    if not a or not b:
        return []
    out = [_rzero(k - 1) for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        if _ris_zero(x, k - 1):
            continue
        for j, y in enumerate(b):
            if _ris_zero(y, k - 1):
                continue
            out[i + j] = _radd(out[i + j], _rmul(x, y, k - 1), k - 1)
    return _rtrim(out, k)


def _rmulc(a, c, k):
    """Multiply the k-var poly a by the (k-1)-var coefficient c."""
    return _rtrim([_rmul(x, c, k - 1) for x in a], k)


def _rdiv(a, b, k):
    """Exact division a / b; None when not exact."""
    if k == 0:
        if b == 0:
            return None
        q, r = divmod(a, b)
        return q if r == 0 else None
    if not a:
        return []
    if not b:
        return None
    if len(a) < len(b):
        return None
    rem = list(a)
    q = [_rzero(k - 1) for _ in range(len(a) - len(b) + 1)]
    while rem:
        if len(rem) < len(b):
            return None
        c = _rdiv(rem[-1], b[-1], k - 1)
        if c is None:
            return None
        d = len(rem) - len(b)
        q[d] = c
        sub = _rmulc(b, c, k)
        for i in range(len(sub)):
            rem[d + i] = _radd(rem[d + i], _rneg(sub[i], k - 1), k - 1)
        if not _ris_zero(rem[-1], k - 1):
            return None  # leading term failed to cancel
        _rtrim(rem, k)
    return _rtrim(q, k)


def _rprem(a, b, k):
    """Pseudo-remainder of a by b in the last variable (k >= 1)."""
    rem = list(a)
    lb = b[-1]
    while rem and len(rem) >= len(b):
        lr = rem[-1]
        d = len(rem) - len(b)
        rem = _rmulc(rem, lb, k)
        sub = _rmulc(b, lr, k)
        for i in range(len(sub)):
            rem[d + i] = _radd(rem[d + i], _rneg(sub[i], k - 1), k - 1)
        _rtrim(rem, k)
    return rem


def _rcontent(a, k):
    """gcd of the coefficients of the k-var poly a; a (k-1)-var poly."""
    c = _rzero(k - 1)
    for x in a:
        c = _rgcd(c, x, k - 1)
    return c


def _rprim(a, k):
    c = _rcontent(a, k)
    if _ris_zero(c, k - 1):
        return a, c
    return [_rdiv(x, c, k - 1) if not _ris_zero(x, k - 1) else _rzero(k - 1)
            for x in a], c


def _rlead_int(a, k) -> int:
    """The innermost leading integer coefficient (0 for the zero poly)."""
    if k == 0:
        return a
    if not a:
        return 0
    return _rlead_int(a[-1], k - 1)


def _rsign_normal(a, k):
    return _rneg(a, k) if _rlead_int(a, k) < 0 else a


def _rgcd(a, b, k):
    if k == 0:
        return int_gcd(a, b)
    if _ris_zero(a, k):
        return _rsign_normal(b, k)
    if _ris_zero(b, k):
        return _rsign_normal(a, k)
    ap, ac = _rprim(a, k)
    bp, bc = _rprim(b, k)
    cont = _rgcd(ac, bc, k - 1)
    u, v = (ap, bp) if len(ap) >= len(bp) else (bp, ap)
    while not _ris_zero(v, k):
        r = _rprem(u, v, k)
        if _ris_zero(r, k):
            u = v
            break
        r, _ = _rprim(r, k)
        u, v = v, r
    u, _ = _rprim(u, k)
    return _rmulc(_rsign_normal(u, k), cont, k)


def _to_rec(p: LaurentPoly):
    """Convert to recursive dense form; requires nonnegative exponents."""
    k = p.nvars
    if k == 0:
        return p.terms.get((), 0)

    def build(items, k):
        if k == 0:
            return items[0][1] if items else 0
        deg = max((e[-1] for e, _ in items), default=-1)
        buckets: list[list] = [[] for _ in range(deg + 1)]
        for e, c in items:
            buckets[e[-1]].append((e[:-1], c))
        out = [build(b, k - 1) for b in buckets]
        return _rtrim(out, k)

    return build(list(p.terms.items()), k)


def _from_rec(r, nvars: int) -> LaurentPoly:
    terms: dict[tuple[int, ...], int] = {}

    def walk(node, k, suffix):
        if k == 0:
            if node:
                terms[suffix] = node
            return
        for i, sub in enumerate(node):
            walk(sub, k - 1, (i,) + suffix)

    walk(r, nvars, ())
    out = LaurentPoly(nvars)
    out.terms = terms
    return out


# ---------------------------------------------------------------------------
# Public gcd / division

def exact_div(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly | None:
    """p / q in the Laurent ring if the division is exact, else None."""
    if q.is_zero():
        raise ZeroPolynomial("division by zero polynomial")
    if p.is_zero():
        return LaurentPoly.zero(p.nvars)
    p._chk(q)
    if p.nvars == 0:
        c = _rdiv(p.terms.get((), 0), q.terms.get((), 0), 0)
        return None if c is None else LaurentPoly.constant(0, c)
    pm = p.min_exponents()
    qm = q.min_exponents()
    pr = _to_rec(p.shift(tuple(-m for m in pm)))
    qr = _to_rec(q.shift(tuple(-m for m in qm)))
    d = _rdiv(pr, qr, p.nvars)
    if d is None:
        return None
    out = _from_rec(d, p.nvars)
    return out.shift(tuple(a - b for a, b in zip(pm, qm)))


def divides(q: LaurentPoly, p: LaurentPoly) -> bool:
    return exact_div(p, q) is not None


def laurent_gcd(polys) -> LaurentPoly:
    """gcd of a list of Laurent polynomials, up to units, normalized.
    Zero entries are ignored; an all-zero list raises ZeroIdeal."""
    polys = list(polys)
    nonzero = [p for p in polys if not p.is_zero()]
    if not nonzero:
        raise ZeroIdeal("gcd of the zero ideal")
    nvars = nonzero[0].nvars
    if nvars > 3:
        raise Unsupported("gcd supported for at most 3 variables")
    for p in nonzero:
        nonzero[0]._chk(p)
    if nvars == 0:
        g = 0
        for p in nonzero:
            g = int_gcd(g, p.terms.get((), 0))
        return LaurentPoly.constant(0, g)
    g = None
    one = LaurentPoly.constant(nvars, 1)
    for p in nonzero:
        r = _to_rec(p.shift(tuple(-m for m in p.min_exponents())))
        g = r if g is None else _rgcd(g, r, nvars)
        if normalize_units(_from_rec(g, nvars)) == one:
            break
    return normalize_units(_from_rec(g, nvars))


# ---------------------------------------------------------------------------
# Newton polytope

def newton_vertices(p: LaurentPoly) -> list[tuple[tuple[int, ...], int]]:
    """Extreme points of the convex hull of the exponent vectors, each
    paired with its coefficient, sorted by exponent tuple."""
    if p.is_zero():
        raise ZeroPolynomial("Newton polytope of 0")
    pts = list(p.terms.keys())
    if p.nvars == 0:
        return [((), p.terms[()])]
    if len(pts) == 1:
        return [(pts[0], p.terms[pts[0]])]
    if p.nvars == 1:
        lo = min(pts)
        hi = max(pts)
        verts = [lo] if lo == hi else [lo, hi]
    elif p.nvars == 2:
        verts = convex_hull_2d(pts)
    else:
        verts = [q for q in pts if not point_in_hull(q, [r for r in pts if r != q])]
    return sorted((tuple(v), p.terms[tuple(v)]) for v in verts)


def convex_hull_2d(points) -> list[tuple[int, int]]:
    """Vertices (strict extreme points) of the 2D hull, CCW from lex-min."""
    pts = sorted(set(map(tuple, points)))
    if len(pts) <= 2:
        return pts

    def half(seq):
        out = []
        for q in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], q) <= 0:
                out.pop()
            out.append(q)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if not hull:  # all collinear
        hull = [pts[0], pts[-1]]
    return hull


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def point_in_hull(q, pts) -> bool:
    """Exact test q in conv(pts) via Caratheodory over small subsets."""
    dim = len(q)
    for k in range(1, dim + 2):
        for sub in combinations(pts, k):
            if _in_simplex(q, sub):
                return True
    return False


def _in_simplex(q, pts) -> bool:
    """Solve sum(li * pi) = q, sum(li) = 1, li >= 0 exactly with Fractions."""
    k = len(pts)
    dim = len(q)
    rows = [[Fraction(p[d]) for p in pts] + [Fraction(q[d])] for d in range(dim)]
    rows.append([Fraction(1)] * k + [Fraction(1)])
    m = len(rows)
    pivots = []
    r = 0
    for c in range(k):
        pr = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if rows[i][k] != 0:
            return False  # inconsistent
    if len(pivots) < k:
        return False  # affinely dependent subset; a smaller one decides
    sol = [Fraction(0)] * k
    for i, c in enumerate(pivots):
        sol[c] = rows[i][k]
    return all(x >= 0 for x in sol)


# ---------------------------------------------------------------------------
# Predicates and variable changes

@dataclass(frozen=True)
class LaurentPredicates:
    is_monic_univariate: bool
    degree_span: tuple[int, ...]
    is_symmetric_under_inversion: bool
    value_at_all_ones: int

    @property
    def span(self) -> int:
        return self.degree_span[0] if len(self.degree_span) == 1 else max(
            self.degree_span, default=0)


def laurent_predicates(p: LaurentPoly) -> LaurentPredicates:
    if p.is_zero():
        raise ZeroPolynomial("predicates of 0")
    lo = p.min_exponents()
    hi = p.max_exponents()
    span = tuple(h - l for h, l in zip(hi, lo))
    monic = False
    if p.nvars == 1:
        q = normalize_units(p)
        monic = abs(q.terms.get((0,), 0)) == 1 and abs(q.terms.get((span[0],), 0)) == 1
    sym = unit_equal(p, p.invert_variables())
    return LaurentPredicates(monic, span, sym, p.evaluate_at_ones())


def change_variables(p: LaurentPoly, K) -> LaurentPoly:
    """Exponent map e -> K @ e for a unimodular integer matrix K."""
    from .abelian import IntMatrix
    M = K if isinstance(K, IntMatrix) else IntMatrix(K)
    if M.m != p.nvars or M.n != p.nvars:
        raise BadBasis(f"need a {p.nvars}x{p.nvars} matrix")
    if abs(M.det()) != 1:
        raise BadBasis("matrix is not unimodular")
    out = LaurentPoly(p.nvars)
    for e, c in p.terms.items():
        ne = tuple(sum(M.rows[i][j] * e[j] for j in range(p.nvars))
                   for i in range(p.nvars))
        out.terms[ne] = out.terms.get(ne, 0) + c
        if not out.terms[ne]:
            del out.terms[ne]
    return out


# ---------------------------------------------------------------------------
# Rendering

def render(p: LaurentPoly, varnames=None) -> str:
    """Table-style bracket form for symmetric univariate polynomials,
    otherwise a signed monomial sum."""
    if p.is_zero():
        return "0"
    if p.nvars == 1:
        b = bracket_form(p)
        if b is not None:
            return b
    return monomial_sum(p, varnames)


def bracket_form(p: LaurentPoly) -> str | None:
    """[a_k, ..., a_0] for even span, (a_k, ..., a_1) for odd span, applied
    to the normalized representative when it is inversion-symmetric."""
    if p.nvars != 1 or p.is_zero():
        return None
    q = normalize_units(p)
    if not unit_equal(q, q.invert_variables()):
        return None
    span = q.max_exponents()[0]
    coeff = [q.terms.get((e,), 0) for e in range(span, -1, -1)]
    if span % 2 == 0:
        top = coeff[:span // 2 + 1]
        return "[" + ",".join(str(c) for c in top) + "]"
    top = coeff[:(span + 1) // 2]
    return "(" + ",".join(str(c) for c in top) + ")"


def monomial_sum(p: LaurentPoly, varnames=None) -> str:
    if varnames is None:
        varnames = default_varnames(p.nvars)
    items = sorted(p.terms.items(), key=lambda ec: _graded_lex_key(ec[0]),
                   reverse=True)
    parts = []
    for e, c in items:
        factors = []
        for name, k in zip(varnames, e):
            if k == 1:
                factors.append(name)
            elif k != 0:
                factors.append(f"{name}^{k}")
        body = "*".join(factors)
        mag = abs(c)
        if body:
            txt = body if mag == 1 else f"{mag}*{body}"
        else:
            txt = str(mag)
        if not parts:
            parts.append(("-" if c < 0 else "") + txt)
        else:
            parts.append(("- " if c < 0 else "+ ") + txt)
    return " ".join(parts)


def default_varnames(nvars: int):
    if nvars == 1:
        return ("t",)
    if nvars == 2:
        return ("s", "t")
    if nvars == 3:
        return ("s", "t", "u")
    return tuple(f"t{i}" for i in range(nvars))
