"""Fox free differential calculus, Alexander matrices and polynomials,
and the fibredness obstructions read off from them.

The derivation rules: d(x_i)/d(x_j) = delta_ij, d(x_i^-1)/d(x_j) =
-delta_ij x_i^-1, d(uv)/d(x_j) = du/d(x_j) + u dv/d(x_j).  Matrix entries
are evaluated in the group ring of the FREE abelianization: torsion
classes evaluate to 1, the free part maps to monomials in b variables.
"""

from __future__ import annotations

from dataclasses import dataclass

from .abelian import AbelianStructure, Character, IntMatrix, abelianization, is_simple_form
from .errors import NoFreePart, NotSimpleForm, ZeroIdeal
from .laurent import (LaurentPoly, laurent_gcd, laurent_predicates, newton_vertices,
                      normalize_units)
from .presentations import Flags, Presentation
from .words import Word, cyclic_reduce, free_reduce


@dataclass(frozen=True)
class GroupRingElem:
    """Element of the integral group ring of a free group: a normalized
    list of (coefficient, freely reduced word) pairs."""
    terms: tuple[tuple[int, Word], ...]

    @staticmethod
    def from_items(items) -> "GroupRingElem":
        acc: dict[tuple, int] = {}
        words: dict[tuple, Word] = {}
        for c, w in items:
            w = free_reduce(w)
            key = w.letters
            acc[key] = acc.get(key, 0) + c
            words[key] = w
        terms = tuple(sorted(((c, words[k]) for k, c in acc.items() if c),
                             key=lambda cw: (len(cw[1]), cw[1].letters)))
        return GroupRingElem(terms)

    @staticmethod
    def zero() -> "GroupRingElem":
        return GroupRingElem(())

    @staticmethod
    def of_word(w: Word, coeff: int = 1) -> "GroupRingElem":
        return GroupRingElem.from_items([(coeff, w)])

    def __add__(self, other: "GroupRingElem") -> "GroupRingElem":
        return GroupRingElem.from_items(list(self.terms) + list(other.terms))

    def __neg__(self) -> "GroupRingElem":
        return GroupRingElem(tuple((-c, w) for c, w in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "GroupRingElem") -> "GroupRingElem":
        items = [(c1 * c2, w1 * w2) for c1, w1 in self.terms
                 for c2, w2 in other.terms]
        return GroupRingElem.from_items(items)

    def is_zero(self) -> bool:
        return not self.terms


def fox_derivative(w: Word, gen: int) -> GroupRingElem:
    """The unique derivation with d(x_i)/d(x_j) = delta_ij applied to w."""
    items: list[tuple[int, Word]] = []
    prefix: list[tuple[int, int]] = []
    for g, s in w.letters:
        if s > 0:
            if g == gen:
                items.append((1, Word(tuple(prefix))))
            prefix.append((g, s))
        else:
            prefix.append((g, s))
            if g == gen:
                items.append((-1, Word(tuple(prefix))))
    return GroupRingElem.from_items(items)


def abelian_eval(elem: GroupRingElem, images, nvars: int) -> LaurentPoly:
    """Evaluate in Z[Z^nvars]: each word maps to the monomial of its image
    under the free abelianization (images[g] is the vector of generator g)."""
    out = LaurentPoly.zero(nvars)
    for c, w in elem.terms:
        v = [0] * nvars
        for g, s in w.letters:
            img = images[g]
            for k in range(nvars):
                v[k] += s * img[k]
        out = out + LaurentPoly.monomial(tuple(v), c)
    return out


# ---------------------------------------------------------------------------
# Alexander data

@dataclass
class AlexanderData:
    matrix: tuple[tuple[LaurentPoly, ...], ...]
    minors: tuple[LaurentPoly, ...] | None
    delta: LaurentPoly | None
    status: str  # "matrix", "ok", or "zero_ideal"
    images: tuple[tuple[int, ...], ...]
    ab: AbelianStructure

    def to_json(self) -> dict:
        from .laurent import render
        return {
            "status": self.status,
            "matrix": [[render(e) for e in row] for row in self.matrix],
            "minors": None if self.minors is None else [render(m) for m in self.minors],
            "delta": None if self.delta is None else render(self.delta),
            "betti": self.ab.betti,
            "torsion": list(self.ab.torsion),
        }


def alexander_matrix(pres: Presentation, ab: AbelianStructure | None = None,
                     images=None) -> AlexanderData:
    """Rows indexed by relators, columns by generators; entries are the
    evaluated Fox derivatives."""
    if ab is None:
        ab = abelianization(pres)
    if ab.betti < 1:
        raise NoFreePart("the abelianization has no free part")
    if images is None:
        images = tuple(ab.free_image(j) for j in range(pres.ngens))
    else:
        images = tuple(tuple(v) for v in images)
        for r in pres.relators:
            v = [0] * ab.betti
            for g, s in r.letters:
                for k in range(ab.betti):
                    v[k] += s * images[g][k]
            if any(v):
                raise NoFreePart("supplied images do not kill the relators")
    b = ab.betti
    rows = []
    for r in pres.relators:
        rows.append(tuple(abelian_eval(fox_derivative(r, g), images, b)
                          for g in range(pres.ngens)))
    return AlexanderData(tuple(rows), None, None, "matrix", images, ab)


def laurent_det(mat) -> LaurentPoly:
    """Determinant of a square matrix of Laurent polynomials (cofactor
    expansion with a column-subset memo)."""
    n = len(mat)
    if n == 0:
        raise ValueError("empty matrix")
    nvars = mat[0][0].nvars
    memo: dict[tuple[int, tuple[int, ...]], LaurentPoly] = {}

    def rec(row: int, cols: tuple[int, ...]) -> LaurentPoly:
        if row == n:
            return LaurentPoly.constant(nvars, 1)
        key = (row, cols)
        if key in memo:
            return memo[key]
        total = LaurentPoly.zero(nvars)
        for idx, j in enumerate(cols):
            entry = mat[row][j]
            if entry.is_zero():
                continue
            sub = rec(row + 1, cols[:idx] + cols[idx + 1:])
            term = entry * sub
            total = total + (term if idx % 2 == 0 else -term)
        memo[key] = total
        return total

    return rec(0, tuple(range(n)))


def alexander_polynomial(pres: Presentation, ab: AbelianStructure | None = None,
                         images=None) -> AlexanderData:
    """First elementary ideal data: all (n-1)x(n-1) minors of the Alexander
    matrix and their gcd, unit-normalized.  An all-zero minor list reports
    delta = 0 with status "zero_ideal" rather than raising."""
    data = alexander_matrix(pres, ab=ab, images=images)
    m = len(data.matrix)
    n = pres.ngens
    size = n - 1
    minors: list[LaurentPoly] = []
    if size == 0:
        # one generator: E1 is generated by the empty minor, the whole ring
        minors = [LaurentPoly.constant(data.ab.betti, 1)]
    elif m >= size:
        from itertools import combinations
        for rowset in combinations(range(m), size):
            for colset in combinations(range(n), size):
                sub = [[data.matrix[i][j] for j in colset] for i in rowset]
                minors.append(laurent_det(sub))
    data.minors = tuple(minors)
    nonzero = [p for p in minors if not p.is_zero()]
    if not nonzero:
        data.delta = LaurentPoly.zero(data.ab.betti)
        data.status = "zero_ideal"
    else:
        data.delta = laurent_gcd(nonzero)
        data.status = "ok"
    return data


# ---------------------------------------------------------------------------
# Simple-form shortcut

@dataclass
class SimpleFormData:
    K: IntMatrix
    L: IntMatrix
    lead: int
    trail: int
    monodromy_charpoly: LaurentPoly | None


def simple_form_data(pres: Presentation, gen: str,
                     ab: AbelianStructure | None = None) -> SimpleFormData:
    """For relators r_i = x u_i X v_i (exactly one x and one X each):
    K, L are the exponent-sum matrices of the u_i, v_i over the other
    generators; the evaluated derivative row entries are K[i][j] t + L[i][j].
    lead = det K and trail = det L must agree for a symmetric polynomial.
    When K is a permutation-free identity (each u_i a single distinct
    positive generator), the monodromy characteristic polynomial
    det(tI + L) is attached."""
    if not is_simple_form(pres, gen):
        raise NotSimpleForm(f"not in simple form with respect to {gen!r}")
    if ab is None:
        ab = abelianization(pres)
    x = pres.gen_index(gen)
    others = [g.id for g in pres.generators if g.id != x]
    col = {g: j for j, g in enumerate(others)}
    K_rows, L_rows = [], []
    u_words = []
    for r in pres.relators:
        w = cyclic_reduce(free_reduce(r))[0]
        pos = next(i for i, (g, s) in enumerate(w.letters) if g == x and s > 0)
        rot = w.rotate(pos)  # starts with (x, +1)
        neg = next(i for i, (g, s) in enumerate(rot.letters) if g == x and s < 0)
        u = rot.letters[1:neg]
        v = rot.letters[neg + 1:]
        u_words.append(u)
        krow = [0] * len(others)
        lrow = [0] * len(others)
        for g, s in u:
            krow[col[g]] += s
        for g, s in v:
            lrow[col[g]] += s
        K_rows.append(krow)
        L_rows.append(lrow)
    K = IntMatrix(K_rows)
    L = IntMatrix(L_rows)
    lead = K.det() if K.m == K.n else 0
    trail = L.det() if L.m == L.n else 0
    charpoly = None
    if K.m == K.n:
        # fibred shape: u_i a single positive generator, all distinct
        singles = [u[0][0] if len(u) == 1 and u[0][1] > 0 else None for u in u_words]
        if None not in singles and sorted(singles) == sorted(others):
            order = [singles.index(g) for g in others]
            Lr = [[L.rows[i][j] for j in range(len(others))] for i in order]
            n = len(others)
            tI = [[LaurentPoly.univariate({1: 1}) if i == j else LaurentPoly.zero(1)
                   for j in range(n)] for i in range(n)]
            mat = [[tI[i][j] + LaurentPoly.univariate({0: Lr[i][j]})
                    for j in range(n)] for i in range(n)]
            charpoly = laurent_det(mat)
    return SimpleFormData(K, L, lead, trail, charpoly)


# ---------------------------------------------------------------------------
# Obstructions

@dataclass(frozen=True)
class ObstructionReport:
    delta_is_zero: bool
    nonmonic_beta1: bool
    newton_no_units: bool
    degree_too_small: bool
    closed_hyperbolic_shape: bool
    torsion_consistent: bool | None  # diagnostic only; None when beta1 > 1
    details: tuple[str, ...]

    @property
    def not_fibred(self) -> bool:
        return (self.nonmonic_beta1 or self.newton_no_units
                or self.degree_too_small or self.closed_hyperbolic_shape)


def fibred_obstructions(delta: LaurentPoly, ab: AbelianStructure,
                        flags: Flags) -> ObstructionReport:
    """Independent boolean fibredness obstructions read from delta."""
    details: list[str] = []
    if delta.is_zero():
        return ObstructionReport(True, False, False, False, False, None,
                                 ("delta is zero; no polynomial obstruction",))
    preds = laurent_predicates(delta)
    nonmonic_b1 = ab.betti == 1 and not preds.is_monic_univariate
    if nonmonic_b1:
        details.append("beta1 = 1 and delta is not monic")
    verts = newton_vertices(delta)
    newton_no_units = all(abs(c) != 1 for _, c in verts)
    if newton_no_units:
        details.append("no Newton polytope vertex has coefficient +-1")
    degree_small = (ab.betti == 1 and flags.is_hyperbolic
                    and preds.degree_span[0] < 2)
    if degree_small:
        details.append("hyperbolic with deg(delta) < 2: fibre would be cyclic")
    closed_shape = False
    if flags.is_closed and flags.is_hyperbolic and ab.betti == 1:
        span = preds.degree_span[0]
        closed_shape = (span % 2 == 1 or span < 4
                        or not preds.is_monic_univariate)
        if closed_shape:
            details.append("closed hyperbolic: delta must be monic of even degree >= 4")
    torsion_ok: bool | None = None
    if ab.betti == 1:
        torsion_ok = abs(preds.value_at_all_ones) == ab.torsion_order()
        if not torsion_ok:
            details.append(f"|delta(1)| = {abs(preds.value_at_all_ones)} but "
                           f"torsion order is {ab.torsion_order()}")
    return ObstructionReport(False, nonmonic_b1, newton_no_units, degree_small,
                             closed_shape, torsion_ok, tuple(details))
