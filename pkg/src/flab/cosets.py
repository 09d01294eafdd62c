"""Finite-index subgroup machinery: Todd-Coxeter coset enumeration (HLT
with full coincidence processing), Sims-style low-index subgroup search,
cyclic covers, and Reidemeister-Schreier rewriting with a deterministic
simplifier.

Cosets are numbered from 0 (the subgroup).  In a complete table every
generator acts by a permutation; relators act trivially from every coset
and the subgroup generators fix coset 0.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field, replace
from math import gcd

from .abelian import AbelianStructure, Character, abelianization
from .errors import Incomplete, NotACharacter, NotPrimitive, Overflow, Unsupported
from .presentations import (Generator, Presentation, TietzeLog, _remove_generator,
                            format_presentation)
from .words import Word, cyclic_reduce, free_reduce, print_word

DEFAULT_MAX_COSETS = 100_000


def max_cosets_default() -> int:
    env = os.environ.get("FLAB_MAX_COSETS")
    return int(env) if env else DEFAULT_MAX_COSETS


@dataclass(frozen=True)
class CosetTable:
    n_cosets: int
    action: tuple[tuple[int, ...], ...]       # action[g][c] = c . g
    subgroup_gens: tuple[Word, ...] = ()

    def inverse_action(self) -> tuple[tuple[int, ...], ...]:
        inv = []
        for perm in self.action:
            a = [0] * self.n_cosets
            for i, j in enumerate(perm):
                a[j] = i
            inv.append(tuple(a))
        return tuple(inv)

    def trace(self, coset: int, w: Word) -> int:
        inv = self.inverse_action()
        c = coset
        for g, s in w.letters:
            c = self.action[g][c] if s > 0 else inv[g][c]
        return c

    def check(self, pres: Presentation) -> bool:
        for perm in self.action:
            if sorted(perm) != list(range(self.n_cosets)):
                return False
        for r in pres.relators:
            for c in range(self.n_cosets):
                if self.trace(c, r) != c:
                    return False
        return all(self.trace(0, w) == 0 for w in self.subgroup_gens)

    def flat(self) -> tuple[tuple[int, ...], ...]:
        """Rows over columns (g0, g0^-1, g1, g1^-1, ...)."""
        inv = self.inverse_action()
        k = len(self.action)
        return tuple(
            tuple(self.action[g][c] if d == 0 else inv[g][c]
                  for g in range(k) for d in (0, 1))
            for c in range(self.n_cosets))

    def to_json(self, pres: Presentation | None = None) -> dict:
        names = (pres.alphabet if pres is not None
                 else tuple(str(i) for i in range(len(self.action))))
        return {
            "index": self.n_cosets,
            "action": {names[g]: list(self.action[g]) for g in range(len(self.action))},
            "subgroup_gens": [print_word(w, names) for w in self.subgroup_gens],
        }


# ---------------------------------------------------------------------------
# Todd-Coxeter (HLT)

def todd_coxeter(pres: Presentation, subgroup_gens, max_cosets: int | None = None) -> CosetTable:
    """Enumerate cosets of the subgroup generated by `subgroup_gens`.
    Raises Overflow when more than max_cosets cosets get defined (the index
    may be infinite or the bound too small)."""
    if max_cosets is None:
        max_cosets = max_cosets_default()
    if max_cosets < 1:
        raise ValueError("max_cosets must be >= 1")
    k = pres.ngens
    ncols = 2 * k
    sub_words = [free_reduce(w if isinstance(w, Word) else pres.word(w))
                 for w in subgroup_gens]
    rel_words = [cyclic_reduce(free_reduce(r))[0] for r in pres.relators]
    rel_words = [r for r in rel_words if r.letters]

    def col(g: int, s: int) -> int:
        return 2 * g + (0 if s > 0 else 1)

    def inv_col(c: int) -> int:
        return c ^ 1

    table: list[list[int | None]] = [[None] * ncols]
    p = [0]  # union-find, merge keeps the smaller index

    def rep(x: int) -> int:
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def define(a: int, c: int) -> int:
        if len(table) >= max_cosets:
            raise Overflow(f"coset bound {max_cosets} exceeded")
        b = len(table)
        table.append([None] * ncols)
        p.append(b)
        table[a][c] = b
        table[b][inv_col(c)] = a
        return b

    pending: deque[int] = deque()

    def merge(a: int, b: int):
        a, b = rep(a), rep(b)
        if a == b:
            return
        if a > b:
            a, b = b, a
        p[b] = a
        pending.append(b)

    def process_coincidences():
        while pending:
            dead = pending.popleft()
            for c in range(ncols):
                d = table[dead][c]
                if d is None:
                    continue
                table[dead][c] = None
                dr = rep(d)
                if table[dr][inv_col(c)] is not None and rep(table[dr][inv_col(c)]) == dead:
                    table[dr][inv_col(c)] = None
                u = rep(dead)
                v = dr
                tu = table[u][c]
                tv = table[v][inv_col(c)]
                if tu is not None:
                    merge(tu, v)
                elif tv is not None:
                    merge(tv, u)
                else:
                    table[u][c] = v
                    table[v][inv_col(c)] = u

    def scan_and_fill(a: int, w: Word):
        letters = w.letters
        while True:
            a = rep(a)
            f = a
            i = 0
            while i < len(letters):
                c = col(*letters[i])
                nxt = table[f][c]
                if nxt is None:
                    break
                f = rep(nxt)
                i += 1
            if i == len(letters):
                if f != a:
                    merge(f, a)
                    process_coincidences()
                return
            b = a
            j = len(letters) - 1
            while j >= i:
                c = inv_col(col(*letters[j]))
                nxt = table[b][c]
                if nxt is None:
                    break
                b = rep(nxt)
                j -= 1
            if j == i:
                c = col(*letters[i])
                tu = table[f][c]
                tv = table[b][inv_col(c)]
                if tu is not None:
                    merge(tu, b)
                elif tv is not None:
                    merge(tv, f)
                else:
                    table[f][c] = b
                    table[b][inv_col(c)] = f
                process_coincidences()
                if not pending:
                    return
            elif j < i:
                merge(f, b)
                process_coincidences()
                return
            else:
                define(f, col(*letters[i]))
                # continue the loop to rescan from the (possibly merged) start

    for w in sub_words:
        scan_and_fill(0, w)
    idx = 0
    while idx < len(table):
        if rep(idx) != idx:
            idx += 1
            continue
        for r in rel_words:
            scan_and_fill(idx, r)
            if rep(idx) != idx:
                break
        if rep(idx) != idx:
            idx += 1
            continue
        for c in range(ncols):
            if rep(idx) != idx:
                break
            if table[idx][c] is None:
                define(idx, c)
        idx += 1

    live = [i for i in range(len(table)) if rep(i) == i]
    renum = {old: new for new, old in enumerate(live)}
    action = []
    for g in range(k):
        row = []
        for old in live:
            t = table[old][col(g, 1)]
            if t is None:
                raise Incomplete("table incomplete after enumeration")
            row.append(renum[rep(t)])
        action.append(tuple(row))
    return CosetTable(len(live), tuple(action), tuple(sub_words))


# ---------------------------------------------------------------------------
# Low-index subgroups (Sims backtracking over standardized tables)

def low_index_subgroups(pres: Presentation, max_index: int,
                        include_index_one: bool = False) -> list[CosetTable]:
    """One representative per conjugacy class of subgroups of index
    2..max_index (canonical: lexicographically minimal standardized table
    over all base points)."""
    if max_index > 6:
        raise Unsupported("low-index search supported for index <= 6")
    if max_index < 1:
        return []
    k = pres.ngens
    ncols = 2 * k
    rels = [cyclic_reduce(free_reduce(r))[0] for r in pres.relators]
    rels = [r.letters for r in rels if r.letters]

    def col(g, s):
        return 2 * g + (0 if s > 0 else 1)

    results: list[tuple[tuple[int, ...], ...]] = []

    def scan_all(table) -> bool:
        """Relator scans with deductions; False on contradiction."""
        changed = True
        while changed:
            changed = False
            for a in range(len(table)):
                for letters in rels:
                    f, i = a, 0
                    while i < len(letters):
                        nxt = table[f][col(*letters[i])]
                        if nxt is None:
                            break
                        f, i = nxt, i + 1
                    if i == len(letters):
                        if f != a:
                            return False
                        continue
                    b, j = a, len(letters) - 1
                    while j >= i:
                        nxt = table[b][col(*letters[j]) ^ 1]
                        if nxt is None:
                            break
                        b, j = nxt, j - 1
                    if j == i:
                        c = col(*letters[i])
                        if table[f][c] is None and table[b][c ^ 1] is None:
                            table[f][c] = b
                            table[b][c ^ 1] = f
                            changed = True
                        elif table[f][c] == b:
                            pass
                        elif table[f][c] is not None and table[f][c] != b:
                            return False
                        elif table[b][c ^ 1] is not None and table[b][c ^ 1] != f:
                            return False
        return True

    def first_empty(table):
        for r in range(len(table)):
            for c in range(ncols):
                if table[r][c] is None:
                    return r, c
        return None

    def recurse(table):
        slot = first_empty(table)
        if slot is None:
            results.append(tuple(tuple(row) for row in table))
            return
        r, c = slot
        n = len(table)
        candidates = list(range(n)) + ([n] if n < max_index else [])
        for cand in candidates:
            if cand < n and table[cand][c ^ 1] is not None:
                continue
            snap = [row[:] for row in table]
            if cand == n:
                snap.append([None] * ncols)
            snap[r][c] = cand
            snap[cand][c ^ 1] = r
            if scan_all(snap):
                recurse(snap)

    recurse([[None] * ncols])

    def standardize(flat, base):
        mapping = {base: 0}
        order = [base]
        i = 0
        while i < len(order):
            a = order[i]
            for c in range(ncols):
                b = flat[a][c]
                if b not in mapping:
                    mapping[b] = len(order)
                    order.append(b)
            i += 1
        return tuple(tuple(mapping[flat[a][c]] for c in range(ncols))
                     for a in order)

    kept = []
    for flat in results:
        n = len(flat)
        if n == 1 and not include_index_one:
            continue
        canon = min(standardize(flat, b) for b in range(n))
        if flat == canon:
            kept.append(flat)
    kept.sort(key=lambda f: (len(f), f))
    out = []
    for flat in kept:
        action = tuple(tuple(flat[c][2 * g] for c in range(len(flat)))
                       for g in range(k))
        out.append(CosetTable(len(flat), action))
    return out


def subgroup_counts(pres: Presentation, max_index: int) -> dict[int, int]:
    """Conjugacy classes of subgroups per index, 2..max_index."""
    counts = {i: 0 for i in range(2, max_index + 1)}
    for t in low_index_subgroups(pres, max_index):
        counts[t.n_cosets] += 1
    return counts


# ---------------------------------------------------------------------------
# Cyclic covers

def cyclic_cover(pres: Presentation, chi: Character, n: int) -> CosetTable:
    """The index-n subgroup chi^-1(nZ): cosets are residues mod n and
    generator g sends k to k + chi(g)."""
    if n < 1:
        raise ValueError("cover degree must be >= 1")
    if len(chi.values) != pres.ngens:
        raise NotACharacter("character has wrong arity")
    if not chi.vanishes_on(pres):
        raise NotACharacter("character does not vanish on the relators")
    if chi.content() != 1:
        raise NotPrimitive("character is not surjective (content != 1)")
    action = tuple(
        tuple((c + chi.values[g]) % n for c in range(n))
        for g in range(pres.ngens))
    # subgroup generators: g x^{-chi(g)} for all g, and x^n, where chi(x) = 1
    x = _section_word(chi)
    gens = []
    for g in range(pres.ngens):
        w = Word(((g, 1),)) * x.power(-chi.values[g])
        w = free_reduce(w)
        if w.letters:
            gens.append(w)
    gens.append(free_reduce(x.power(n)))
    return CosetTable(n, action, tuple(gens))


def _section_word(chi: Character) -> Word:
    """A word x with chi(x) = 1, from an extended-gcd combination."""
    vals = chi.values
    nz = [(g, v) for g, v in enumerate(vals) if v != 0]
    g0, v0 = nz[0]
    coeffs = {g0: 1}
    cur = v0
    for g, v in nz[1:]:
        if cur == 1 or cur == -1:
            break
        d, s, t = _xgcd(cur, v)
        coeffs = {h: c * s for h, c in coeffs.items()}
        coeffs[g] = coeffs.get(g, 0) + t
        cur = d
    if abs(cur) != 1:
        raise NotPrimitive("character is not surjective")
    if cur == -1:
        coeffs = {h: -c for h, c in coeffs.items()}
    letters = []
    for h in sorted(coeffs):
        c = coeffs[h]
        letters.extend([(h, 1 if c > 0 else -1)] * abs(c))
    return free_reduce(Word(tuple(letters)))


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


# ---------------------------------------------------------------------------
# Reidemeister-Schreier

@dataclass
class SubgroupPresentation:
    presentation: Presentation
    inclusion: dict[str, Word]  # subgroup generator letter -> ambient word
    ambient: Presentation
    table: CosetTable

    def inclusion_of(self, letter: str) -> Word:
        return self.inclusion[letter]

    def spell_inclusions(self) -> dict[str, str]:
        return {l: self.ambient.spell(w) for l, w in self.inclusion.items()}


def _gen_names(count: int) -> list[str]:
    if count <= 26:
        return [chr(ord("a") + i) for i in range(count)]
    return [f"g{i}" for i in range(count)]


def reidemeister_schreier(pres: Presentation, table: CosetTable) -> SubgroupPresentation:
    """Subgroup presentation on the Schreier generators of a breadth-first
    transversal; one rewritten relator per (coset, ambient relator) pair.
    No simplification is applied here."""
    n = table.n_cosets
    k = pres.ngens
    act = table.action
    inv = table.inverse_action()

    # BFS transversal in generator order (positive letters first)
    trans: list[Word | None] = [None] * n
    trans[0] = Word((), reduced=True)
    tree: set[tuple[int, int]] = set()  # (coset, gen) positive edges in the tree
    queue = deque([0])
    while queue:
        c = queue.popleft()
        for g in range(k):
            d = act[g][c]
            if trans[d] is None:
                trans[d] = free_reduce(trans[c] * Word(((g, 1),)))
                tree.add((c, g))
                queue.append(d)
        for g in range(k):
            d = inv[g][c]
            if trans[d] is None:
                trans[d] = free_reduce(trans[c] * Word(((g, -1),)))
                tree.add((d, g))
                queue.append(d)

    sgen_index: dict[tuple[int, int], int] = {}
    inclusion_words: list[Word] = []
    for c in range(n):
        for g in range(k):
            if (c, g) in tree:
                continue
            sgen_index[(c, g)] = len(inclusion_words)
            inclusion_words.append(free_reduce(
                trans[c] * Word(((g, 1),)) * trans[act[g][c]].inverse()))

    names = _gen_names(len(inclusion_words))

    def rewrite(start: int, w: Word) -> Word:
        out: list[tuple[int, int]] = []
        c = start
        for g, s in w.letters:
            if s > 0:
                e = (c, g)
                c = act[g][c]
            else:
                c = inv[g][c]
                e = (c, g)
            if e in sgen_index:
                out.append((sgen_index[e], s))
        return free_reduce(Word(tuple(out)))

    relators = []
    for c in range(n):
        for r in pres.relators:
            relators.append(rewrite(c, r))
    gens = tuple(Generator(i, nm) for i, nm in enumerate(names))
    sub_pres = Presentation(gens, tuple(relators),
                            name=f"{pres.name}.cover{n}" if pres.name else f"cover{n}",
                            flags=pres.flags)
    inclusion = {names[i]: w for i, w in enumerate(inclusion_words)}
    return SubgroupPresentation(sub_pres, inclusion, pres, table)


# ---------------------------------------------------------------------------
# Simplification

def simplify_presentation(pres: Presentation) -> tuple[Presentation, TietzeLog]:
    """Deterministic fixpoint simplification: freely and cyclically reduce
    relators, drop empty relators, and eliminate any generator occurring
    exactly once in exactly one relator (never one used in a cusp word)."""
    log = TietzeLog()
    cur = pres
    while True:
        changed = False
        # reduce relators
        rels = list(cur.relators)
        for i, r in enumerate(rels):
            red = cyclic_reduce(free_reduce(r))[0]
            if red.letters != r.letters:
                rels[i] = red
                log.add("reduce_relator", i)
                changed = True
        if changed:
            cur = replace(cur, relators=tuple(rels))
        # drop empty relators (from the end, to keep logged indices valid)
        for i in range(len(cur.relators) - 1, -1, -1):
            if not cur.relators[i].letters:
                log.add("remove_relator", i)
                rels = list(cur.relators)
                del rels[i]
                cur = replace(cur, relators=tuple(rels))
                changed = True
        # eliminate a generator occurring once in one relator
        elim = _find_eliminable(cur)
        if elim is not None:
            letter, rel_idx = elim
            log.add("remove_generator", letter, rel_idx)
            cur = _remove_generator(cur, cur.gen_index(letter), rel_idx)
            changed = True
        if not changed:
            return cur, log


def _find_eliminable(pres: Presentation):
    counts = [0] * pres.ngens
    where: list[int | None] = [None] * pres.ngens
    for i, r in enumerate(pres.relators):
        for g, _ in r.letters:
            counts[g] += 1
            where[g] = i
    cusp_gens = set()
    for m, l in pres.cusps:
        cusp_gens.update(g for g, _ in m.letters)
        cusp_gens.update(g for g, _ in l.letters)
    candidates = [(len(pres.relators[where[g]]), g)
                  for g in range(pres.ngens)
                  if counts[g] == 1 and g not in cusp_gens]
    if not candidates:
        return None
    _, g = min(candidates)
    return pres.generators[g].letter, where[g]


def simplify_subgroup(sp: SubgroupPresentation) -> SubgroupPresentation:
    simp, _ = simplify_presentation(sp.presentation)
    inclusion = {g.letter: sp.inclusion[g.letter] for g in simp.generators}
    return SubgroupPresentation(simp, inclusion, sp.ambient, sp.table)


# ---------------------------------------------------------------------------
# Composite

def subgroup_homology(pres: Presentation, subgroup_gens=None,
                      table: CosetTable | None = None,
                      max_cosets: int | None = None) -> AbelianStructure:
    """todd_coxeter -> reidemeister_schreier -> simplify -> abelianization."""
    if table is None:
        if subgroup_gens is None:
            raise ValueError("need subgroup generators or a coset table")
        table = todd_coxeter(pres, subgroup_gens, max_cosets=max_cosets)
    sp = reidemeister_schreier(pres, table)
    simp, _ = simplify_presentation(sp.presentation)
    return abelianization(simp)
