"""Brown's algorithm for one-relator groups.

For a character chi and a cyclically reduced relator, walk the relator and
record heights (rank 1) or trace the relator on the integer grid (rank 2,
zero exponent sums in both generators).  A direction d has its kernel-side
condition satisfied exactly when the set of cyclic path indices maximizing
<d, .> is a single index, or two cyclically adjacent indices (the ends of a
single flat step at the top).  The kernel is finitely generated iff both d
and -d satisfy the condition.

The rank-2 report enumerates the exceptional set by faces of the convex
hull of the path (edge-normal rays and open vertex cones); queries always
recompute from the path itself, never from the enumeration.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from math import gcd

from .abelian import Character, abelianization, primitive_characters
from .errors import BadRelator, NotACharacter, NotRank2, Unsupported
from .laurent import convex_hull_2d
from .presentations import Presentation
from .words import Word, cyclic_reduce, exponent_vector, free_reduce


# ---------------------------------------------------------------------------
# Walks and paths

@dataclass(frozen=True)
class HeightWalk:
    relator: Word
    chi: Character
    heights: tuple[int, ...]  # h_0 .. h_L with h_L == h_0 == 0

    @property
    def levels(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.heights)))


@dataclass(frozen=True)
class LatticePath:
    relator: Word
    points: tuple[tuple[int, int], ...]  # P_0 .. P_{L-1}, cyclic, P_0 = origin

    def visit_counts(self) -> dict[tuple[int, int], int]:
        counts: dict[tuple[int, int], int] = {}
        for p in self.points:
            counts[p] = counts.get(p, 0) + 1
        return counts


def height_walk(relator: Word, chi: Character) -> HeightWalk:
    h = [0]
    for g, s in relator.letters:
        h.append(h[-1] + s * chi.values[g])
    if h[-1] != 0:
        raise NotACharacter("character does not vanish on the relator")
    return HeightWalk(relator, chi, tuple(h))


def lattice_path(relator: Word) -> LatticePath:
    ev = exponent_vector(relator, 2)
    if ev != (0, 0):
        raise NotRank2(f"exponent sums {ev} are not both zero")
    pts = [(0, 0)]
    for g, s in relator.letters:
        x, y = pts[-1]
        pts.append((x + s, y) if g == 0 else (x, y + s))
    assert pts[-1] == (0, 0)
    return LatticePath(relator, tuple(pts[:-1]))


def _side_ok(values: list[int]) -> bool:
    """The single-peak condition on a cyclic sequence: the maximum is
    attained at one index, or at two cyclically adjacent indices."""
    m = max(values)
    idx = [i for i, v in enumerate(values) if v == m]
    if len(idx) == 1:
        return True
    if len(idx) == 2:
        i, j = idx
        L = len(values)
        return (j - i) % L == 1 or (i - j) % L == 1
    return False


def _require_cyclic(relator: Word):
    if not relator.letters:
        raise BadRelator("empty relator")
    w, conj = cyclic_reduce(free_reduce(relator))
    if w.letters != relator.letters:
        raise BadRelator("relator must be freely and cyclically reduced")


# ---------------------------------------------------------------------------
# Rank 1

@dataclass(frozen=True)
class Rank1Result:
    fg_kernel: bool
    walk: HeightWalk


def brown_rank1(relator: Word, chi: Character) -> Rank1Result:
    """Finite generation of ker(chi) for the one-relator group on `relator`.

    Generic case: unique maximum and unique minimum of the height walk.
    When chi vanishes on a generator present in the relator, a flat step at
    the extreme is allowed: the extreme may be attained at exactly two
    cyclically adjacent indices.
    """
    _require_cyclic(relator)
    present = {g for g, _ in relator.letters}
    if all(chi.values[g] == 0 for g in present):
        raise NotACharacter("character vanishes on every letter of the relator")
    walk = height_walk(relator, chi)
    vals = list(walk.heights[:-1])
    fg = _side_ok(vals) and _side_ok([-v for v in vals])
    return Rank1Result(fg, walk)


# ---------------------------------------------------------------------------
# Rank 2

def _primitive(d: tuple[int, int]) -> tuple[int, int]:
    g = gcd(abs(d[0]), abs(d[1]))
    return (d[0] // g, d[1] // g) if g else d


def _canon_pair(d: tuple[int, int]) -> tuple[int, int]:
    if d[0] > 0 or (d[0] == 0 and d[1] > 0):
        return d
    return (-d[0], -d[1])


def _ccw_key(d: tuple[int, int]):
    x, y = d
    half = 0 if (y > 0 or (y == 0 and x > 0)) else 1
    return (half, )


def _ccw_sort(dirs):
    def cmp(a, b):
        ha = 0 if (a[1] > 0 or (a[1] == 0 and a[0] > 0)) else 1
        hb = 0 if (b[1] > 0 or (b[1] == 0 and b[0] > 0)) else 1
        if ha != hb:
            return ha - hb
        cr = a[0] * b[1] - a[1] * b[0]
        return -1 if cr > 0 else (1 if cr < 0 else 0)
    return sorted(set(dirs), key=functools.cmp_to_key(cmp))


@dataclass
class ConeReport:
    """Where on the direction circle the kernel fails to be finitely
    generated.  `exceptional_rays` are isolated primitive directions;
    `exceptional_cones` are angular sectors given by their boundary rays
    (closed at a boundary ray iff that ray itself is exceptional).  Both
    lists store one representative per +- pair; the set is closed under
    negation."""
    path: LatticePath
    hull: tuple[tuple[int, int], ...]
    visit_counts: dict[tuple[int, int], int]
    exceptional_rays: tuple[tuple[int, int], ...]
    exceptional_cones: tuple[tuple[tuple[int, int], tuple[int, int]], ...]
    all_exceptional: bool
    symmetric: bool

    def sigma_plus(self, d: tuple[int, int]) -> bool:
        d = _primitive(d)
        vals = [d[0] * x + d[1] * y for x, y in self.path.points]
        return _side_ok(vals)

    def fg_kernel(self, d: tuple[int, int]) -> bool:
        return self.sigma_plus(d) and self.sigma_plus((-d[0], -d[1]))

    @property
    def has_fg_direction(self) -> bool:
        return not self.all_exceptional

    def exceptional_directions(self, bound: int) -> set[tuple[int, int]]:
        """All primitive exceptional directions with coordinates <= bound,
        one representative per +- pair (computed by query)."""
        out = set()
        for m in range(0, bound + 1):
            for n in range(-bound, bound + 1):
                if gcd(m, abs(n)) != 1:
                    continue
                d = _canon_pair((m, n))
                if not self.fg_kernel(d):
                    out.add(d)
        return out


def brown_rank2(relator: Word) -> ConeReport:
    """Brown's convex-hull criterion for a two-generator one-relator group
    with zero exponent sums in both generators."""
    _require_cyclic(relator)
    path = lattice_path(relator)
    pts = path.points
    hull = tuple(convex_hull_2d(set(pts)))
    counts = path.visit_counts()
    L = len(pts)

    def side(d):
        vals = [d[0] * x + d[1] * y for x, y in pts]
        return _side_ok(vals)

    # outward normals of hull edges, in CCW order around the circle
    k = len(hull)
    normals = []
    for i in range(k):
        ax, ay = hull[i]
        bx, by = hull[(i + 1) % k]
        normals.append(_primitive((by - ay, -(bx - ax))))
    # overlay of the fan with its negation
    points_on_circle = _ccw_sort([n for n in normals] + [(-a, -b) for a, b in normals])
    M = len(points_on_circle)
    pieces = []  # (kind, data, failing)
    for i in range(M):
        d = points_on_circle[i]
        nd = (-d[0], -d[1])
        pieces.append(("ray", d, not (side(d) and side(nd))))
        nxt = points_on_circle[(i + 1) % M]
        rep = _primitive((d[0] + nxt[0], d[1] + nxt[1]))
        pieces.append(("arc", (d, nxt), not (side(rep) and side((-rep[0], -rep[1])))))

    all_exc = all(f for _, _, f in pieces)
    rays: list[tuple[int, int]] = []
    cones: list[tuple[tuple[int, int], tuple[int, int]]] = []
    if not all_exc:
        # rotate so the run structure does not wrap
        start = next(i for i, p in enumerate(pieces) if not p[2])
        rot = pieces[start:] + pieces[:start]
        run: list = []
        for kind, data, failing in rot:
            if failing:
                run.append((kind, data))
            elif run:
                _emit_run(run, rays, cones)
                run = []
        if run:
            _emit_run(run, rays, cones)
    # one representative per +- pair
    rays_c = sorted({_canon_pair(r) for r in rays})
    cones_c = []
    seen = set()
    for a, b in cones:
        key = min((a, b), ((-a[0], -a[1]), (-b[0], -b[1])))
        if key not in seen:
            seen.add(key)
            cones_c.append(key)
    symmetric = _is_symmetric_hull(hull)
    return ConeReport(path, hull, counts, tuple(rays_c), tuple(sorted(cones_c)),
                      all_exc, symmetric)


def _emit_run(run, rays, cones):
    if len(run) == 1 and run[0][0] == "ray":
        rays.append(run[0][1])
        return
    first, last = run[0], run[-1]
    a = first[1] if first[0] == "ray" else first[1][0]
    b = last[1] if last[0] == "ray" else last[1][1]
    cones.append((a, b))


def _is_symmetric_hull(hull) -> bool:
    xs = [p[0] for p in hull]
    ys = [p[1] for p in hull]
    sx = min(xs) + max(xs)
    sy = min(ys) + max(ys)
    pts = set(hull)
    return all((sx - x, sy - y) in pts for x, y in pts)


# ---------------------------------------------------------------------------
# Quotient argument

@dataclass
class QuotientCertificate:
    fg_kernel_in_quotient: bool
    method: str  # "rank1" or "rank2"
    quotient_betti: int
    chi: Character
    walk: HeightWalk | None = None
    report: ConeReport | None = None


def brown_quotient(pres: Presentation, relator_index: int,
                   chi: Character) -> QuotientCertificate | None:
    """Run Brown's algorithm on the one-relator quotient-source
    <a, b | r_i>: the group on the selected relator alone surjects onto the
    presented group, so a finitely generated kernel upstairs certifies a
    finitely generated image kernel downstairs (chi must factor through the
    full presentation, i.e. vanish on every relator)."""
    if pres.ngens != 2:
        raise Unsupported("quotient argument needs a 2-generator presentation")
    if chi.is_zero():
        raise NotACharacter("zero character")
    for r in pres.relators:
        if chi(r) != 0:
            raise NotACharacter("character does not vanish on all relators")
    chi = chi.primitive()
    relator = cyclic_reduce(free_reduce(pres.relators[relator_index]))[0]
    if not relator.letters:
        return None
    from .presentations import Presentation as P, Generator
    gamma = P(pres.generators, (relator,), name=f"{pres.name}~quotient",
              flags=pres.flags)
    ev = exponent_vector(relator, 2)
    if ev == (0, 0):
        report = brown_rank2(relator)
        return QuotientCertificate(report.fg_kernel(tuple(chi.values)), "rank2",
                                   2, chi, report=report)
    ab = abelianization(gamma)
    res = brown_rank1(relator, chi)
    return QuotientCertificate(res.fg_kernel, "rank1", ab.betti, chi,
                               walk=res.walk)


# ---------------------------------------------------------------------------
# Punctured-torus bundle recognition

def punctured_torus_bundle_test(pres: Presentation) -> bool:
    """For a hyperbolic 2-generator 1-relator presentation in standard form:
    true iff beta1 = 1 and the height walk of the standard character lies on
    exactly three levels with unique extremes (in the single-flat-step
    sense)."""
    if pres.ngens != 2 or len(pres.relators) != 1 or not pres.flags.is_hyperbolic:
        raise Unsupported("need a hyperbolic 2-generator 1-relator presentation")
    relator = cyclic_reduce(free_reduce(pres.relators[0]))[0]
    ev = exponent_vector(relator, 2)
    zero_gens = [g for g in range(2) if ev[g] == 0]
    if not zero_gens:
        raise Unsupported("presentation is not in standard form")
    if len(zero_gens) == 2:
        return False  # beta1 = 2
    x = zero_gens[0]
    chi = Character(tuple(1 if g == x else 0 for g in range(2)))
    res = brown_rank1(relator, chi)
    return len(res.walk.levels) == 3 and res.fg_kernel
