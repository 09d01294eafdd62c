"""Integer linear algebra over Z: Smith normal form, abelianizations,
characters (homomorphisms to Z), and the zero-exponent-sum "standard form"
of a presentation.

All arithmetic is exact on Python integers; the Smith pivot rule (smallest
absolute value, ties row-major) makes every decomposition deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .errors import NoCharacters, NotACharacter, UnknownGenerator
from .presentations import Presentation, TietzeLog, reorder_generators, substitute
from .words import Word, cyclic_reduce, exponent_vector, free_reduce


class IntMatrix:
    """Dense integer matrix; rows is a list of lists."""

    def __init__(self, rows):
        self.rows = [list(r) for r in rows]
        self.m = len(self.rows)
        self.n = len(self.rows[0]) if self.rows else 0
        if any(len(r) != self.n for r in self.rows):
            raise ValueError("ragged matrix")

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, m, n):
        return cls([[0] * n for _ in range(m)])

    def copy(self):
        return IntMatrix(self.rows)

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self.rows == other.rows

    def __repr__(self):
        return f"IntMatrix({self.rows})"

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.n != other.m:
            raise ValueError("dimension mismatch")
        out = [[sum(self.rows[i][k] * other.rows[k][j] for k in range(self.n))
                for j in range(other.n)] for i in range(self.m)]
        return IntMatrix(out)

    def transpose(self) -> "IntMatrix":
        return IntMatrix([[self.rows[i][j] for i in range(self.m)]
                          for j in range(self.n)])

    def det(self) -> int:
        """Fraction-free Bareiss determinant (square matrices)."""
        if self.m != self.n:
            raise ValueError("determinant of non-square matrix")
        n = self.n
        if n == 0:
            return 1
        a = [row[:] for row in self.rows]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def is_unimodular(self) -> bool:
        return self.m == self.n and abs(self.det()) == 1


@dataclass
class SmithDecomposition:
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    def diagonal(self) -> list[int]:
        return [self.D[i, i] for i in range(min(self.D.m, self.D.n))]

    def check(self, A: IntMatrix) -> bool:
        if (self.U @ A @ self.V) != self.D:
            return False
        if not (self.U.is_unimodular() and self.V.is_unimodular()):
            return False
        d = self.diagonal()
        for i in range(self.D.m):
            for j in range(self.D.n):
                if i != j and self.D[i, j] != 0:
                    return False
        for i in range(len(d) - 1):
            if d[i] < 0 or (d[i] == 0 and d[i + 1] != 0):
                return False
            if d[i] != 0 and d[i + 1] % d[i] != 0:
                return False
        return True


def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    """U*A*V = D with U, V unimodular, D diagonal, d1 | d2 | ... >= 0."""
    m, n = A.m, A.n
    d = [row[:] for row in A.rows]
    U = IntMatrix.identity(m)
    V = IntMatrix.identity(n)

    def row_op(i, j, q):  # row_i -= q * row_j
        for k in range(n):
            d[i][k] -= q * d[j][k]
        for k in range(m):
            U.rows[i][k] -= q * U.rows[j][k]

    def col_op(i, j, q):  # col_i -= q * col_j
        for k in range(m):
            d[k][i] -= q * d[k][j]
        for k in range(n):
            V.rows[k][i] -= q * V.rows[k][j]

    def row_swap(i, j):
        d[i], d[j] = d[j], d[i]
        U.rows[i], U.rows[j] = U.rows[j], U.rows[i]

    def col_swap(i, j):
        for k in range(m):
            d[k][i], d[k][j] = d[k][j], d[k][i]
        for k in range(n):
            V.rows[k][i], V.rows[k][j] = V.rows[k][j], V.rows[k][i]

    def negate_row(i):
        for k in range(n):
            d[i][k] = -d[i][k]
        for k in range(m):
            U.rows[i][k] = -U.rows[i][k]

    t = 0
    while t < min(m, n):
        # smallest absolute nonzero entry in the trailing block, row-major ties
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if d[i][j] != 0 and (best is None or abs(d[i][j]) < abs(d[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        if bi != t:
            row_swap(t, bi)
        if bj != t:
            col_swap(t, bj)
        # clear row and column t
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, m):
                if d[i][t] != 0:
                    q = d[i][t] // d[t][t]
                    row_op(i, t, q)
                    if d[i][t] != 0:  # remainder smaller than pivot: swap up
                        row_swap(t, i)
                        dirty = True
            for j in range(t + 1, n):
                if d[t][j] != 0:
                    q = d[t][j] // d[t][t]
                    col_op(j, t, q)
                    if d[t][j] != 0:
                        col_swap(t, j)
                        dirty = True
        if d[t][t] < 0:
            negate_row(t)
        t += 1

    # enforce the divisibility chain
    r = t
    changed = True
    while changed:
        changed = False
        for i in range(r - 1):
            a, b = d[i][i], d[i + 1][i + 1]
            if a != 0 and b % a != 0:
                # col_i += col_{i+1}, then re-reduce the 2x2 block
                col_op(i, i + 1, -1)
                g, x, y = _xgcd(a, d[i + 1][i])
                # row reduce: standard 2x2 smith step
                _smith_2x2(d, U, V, i, m, n)
                changed = True
    for i in range(r):
        if d[i][i] < 0:
            negate_row(i)
    return SmithDecomposition(U, IntMatrix(d), V)


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def _smith_2x2(d, U, V, i, m, n):
    """Re-diagonalize the block at (i, i) after a divisibility fix-up."""
    while True:
        if d[i + 1][i] != 0:
            if d[i][i] == 0 or abs(d[i + 1][i]) < abs(d[i][i]):
                d[i], d[i + 1] = d[i + 1], d[i]
                U.rows[i], U.rows[i + 1] = U.rows[i + 1], U.rows[i]
            q = d[i + 1][i] // d[i][i]
            for k in range(n):
                d[i + 1][k] -= q * d[i][k]
            for k in range(m):
                U.rows[i + 1][k] -= q * U.rows[i][k]
            continue
        if d[i][i + 1] != 0:
            if d[i][i] == 0 or abs(d[i][i + 1]) < abs(d[i][i]):
                for k in range(m):
                    d[k][i], d[k][i + 1] = d[k][i + 1], d[k][i]
                for k in range(n):
                    V.rows[k][i], V.rows[k][i + 1] = V.rows[k][i + 1], V.rows[k][i]
            q = d[i][i + 1] // d[i][i]
            for k in range(m):
                d[k][i + 1] -= q * d[k][i]
            for k in range(n):
                V.rows[k][i + 1] -= q * V.rows[k][i]
            continue
        break


# ---------------------------------------------------------------------------
# Abelianization

@dataclass(frozen=True)
class AbelianStructure:
    """Smith data of the abelianization Z^betti + torsion factors.

    gen_images[j] is the coordinate vector of generator j: first `betti`
    free coordinates, then one coordinate per torsion factor (reduced mod
    the factor).  change_of_basis is the unimodular matrix whose j-th row
    is the image of generator j in the diagonalized coordinates.
    """
    betti: int
    torsion: tuple[int, ...]
    gen_images: tuple[tuple[int, ...], ...]
    change_of_basis: IntMatrix

    def free_image(self, gen: int) -> tuple[int, ...]:
        return self.gen_images[gen][:self.betti]

    def free_image_of_word(self, w: Word) -> tuple[int, ...]:
        v = [0] * self.betti
        for g, s in w.letters:
            img = self.free_image(g)
            for k in range(self.betti):
                v[k] += s * img[k]
        return tuple(v)

    def torsion_order(self) -> int:
        out = 1
        for t in self.torsion:
            out *= t
        return out

    def describe(self) -> str:
        parts = [f"Z{t}" for t in self.torsion] + ["Z"] * self.betti
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"betti": self.betti, "torsion": list(self.torsion),
                "gen_images": [list(v) for v in self.gen_images]}


def abelianization(pres: Presentation) -> AbelianStructure:
    n = pres.ngens
    rows = pres.exponent_matrix()
    if not rows:
        rows = [[0] * n]
    A = IntMatrix(rows)
    snf = smith_normal_form(A)
    diag = snf.diagonal() + [0] * (n - min(A.m, n))
    diag = diag[:n]
    # coordinate i of x*V has order diag[i] (0 = free, 1 = trivial)
    free_coords = [i for i in range(n) if diag[i] == 0]
    tors_coords = [i for i in range(n) if diag[i] > 1]
    betti = len(free_coords)
    torsion = tuple(diag[i] for i in tors_coords)
    images = []
    for j in range(n):
        row = snf.V.rows[j]
        img = tuple(row[i] for i in free_coords) + tuple(
            row[i] % diag[i] for i in tors_coords)
        images.append(img)
    return AbelianStructure(betti, torsion, tuple(images), snf.V)


# ---------------------------------------------------------------------------
# Characters

@dataclass(frozen=True)
class Character:
    """An integer-valued homomorphism, stored by its generator values."""
    values: tuple[int, ...]

    def __call__(self, x) -> int:
        if isinstance(x, Word):
            return sum(s * self.values[g] for g, s in x.letters)
        return self.values[x]

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def content(self) -> int:
        g = 0
        for v in self.values:
            g = gcd(g, v)
        return g

    def primitive(self) -> "Character":
        c = self.content()
        if c in (0, 1):
            return self
        return Character(tuple(v // c for v in self.values))

    def neg(self) -> "Character":
        return Character(tuple(-v for v in self.values))

    def vanishes_on(self, pres: Presentation) -> bool:
        return all(self(r) == 0 for r in pres.relators)


@dataclass(frozen=True)
class CharacterFamily:
    """All surjective characters: primitive integer vectors in Z^betti
    pulled back through the generator images."""
    betti: int
    free_images: tuple[tuple[int, ...], ...]  # one row per generator

    def character(self, lam) -> Character:
        lam = tuple(lam)
        if len(lam) != self.betti:
            raise ValueError(f"need {self.betti} coefficients")
        vals = tuple(sum(l * img[k] for k, l in enumerate(lam))
                     for img in self.free_images)
        return Character(vals)

    def unique(self) -> Character:
        if self.betti != 1:
            raise ValueError("unique character only for betti = 1")
        chi = self.character((1,))
        return chi

    def primitive_directions(self, bound: int):
        """Primitive lattice vectors with coordinates in [-bound, bound],
        one per +- pair, lexicographically ordered."""
        if self.betti == 1:
            yield (1,)
            return
        seen = set()
        for first in range(0, bound + 1):
            for rest in _boxed(self.betti - 1, bound):
                v = (first,) + rest
                if all(x == 0 for x in v):
                    continue
                g = 0
                for x in v:
                    g = gcd(g, x)
                if g != 1:
                    continue
                canon = _canon_sign(v)
                if canon not in seen:
                    seen.add(canon)
                    yield canon


def _boxed(k, bound):
    if k == 0:
        yield ()
        return
    for x in range(-bound, bound + 1):
        for rest in _boxed(k - 1, bound):
            yield (x,) + rest


def _canon_sign(v):
    for x in v:
        if x > 0:
            return v
        if x < 0:
            return tuple(-y for y in v)
    return v


def primitive_characters(ab: AbelianStructure) -> CharacterFamily:
    if ab.betti < 1:
        raise NoCharacters("betti number is 0; no surjections onto Z")
    return CharacterFamily(ab.betti, tuple(ab.free_image(j)
                                           for j in range(len(ab.gen_images))))


# ---------------------------------------------------------------------------
# Standard and simple form

def to_standard_form(pres: Presentation) -> tuple[Presentation, TietzeLog]:
    """Unimodular generator substitutions making the first betti generators
    have zero exponent sum in every relator (column Hermite reduction).
    """
    log = TietzeLog()
    cur = pres
    done: list[str] = []  # pivot letters, one per processed relator row
    for i in range(len(pres.relators)):
        while True:
            vec = exponent_vector(cur.relators[i], cur.ngens)
            active = [(cur.generators[j].letter, vec[j])
                      for j in range(cur.ngens)
                      if vec[j] != 0 and cur.generators[j].letter not in done]
            if not active:
                break
            if len(active) == 1:
                done.append(active[0][0])
                break
            pivot = min(active, key=lambda lv: (abs(lv[1]), cur.gen_index(lv[0])))
            victim = next(lv for lv in active if lv[0] != pivot[0])
            q = victim[1] // pivot[1]
            if q == 0:
                # |victim| < |pivot| is impossible by pivot choice; guard anyway
                q = 1
            fresh = _unused_letter(cur)
            repl_word = victim[0] * 0  # placeholder, build text below
            power = -q
            repl_text = fresh + _power_text(victim[0], power)
            cur, mv_log = substitute(cur, pivot[0], repl_text, fresh)
            log.extend(mv_log)
    zero_cols = [g.letter for g in cur.generators if g.letter not in done]
    order = zero_cols + [l for l in (g.letter for g in cur.generators) if l in done]
    if order != list(cur.alphabet):
        cur = reorder_generators(cur, [cur.gen_index(l) for l in order])
        log.add("relabel", tuple(order))
    return cur, log


def _power_text(letter: str, power: int) -> str:
    if power == 0:
        return ""
    glyph = letter if power > 0 else letter.upper()
    k = abs(power)
    return glyph if k == 1 else f"{glyph}{k}"


def _unused_letter(pres: Presentation) -> str:
    used = set(pres.alphabet)
    for c in "xyzwvuabcdefghijklmnopqrst":
        if c not in used:
            return c
    i = 0
    while f"g{i}" in used:
        i += 1
    return f"g{i}"


def standard_generators(pres: Presentation) -> list[int]:
    """Generators with zero exponent sum in every relator."""
    out = []
    for j in range(pres.ngens):
        if all(exponent_vector(r, pres.ngens)[j] == 0 for r in pres.relators):
            out.append(j)
    return out


def is_standard_form(pres: Presentation, ab: AbelianStructure | None = None) -> bool:
    if ab is None:
        ab = abelianization(pres)
    zeros = standard_generators(pres)
    return zeros[:ab.betti] == list(range(ab.betti))


def is_simple_form(pres: Presentation, gen: str) -> bool:
    """True iff every relator, viewed cyclically after reduction, contains
    exactly one positive and one negative occurrence of `gen`."""
    idx = pres.gen_index(gen)
    for r in pres.relators:
        w = cyclic_reduce(free_reduce(r))[0]
        pos = sum(1 for g, s in w.letters if g == idx and s > 0)
        neg = sum(1 for g, s in w.letters if g == idx and s < 0)
        if pos != 1 or neg != 1:
            return False
    return True
