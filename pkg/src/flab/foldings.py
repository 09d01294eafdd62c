"""Stallings folded graphs for finitely generated subgroups of free groups,
free-basis certificates, and the ascending-HNN fibration test.

A folded graph is a connected based graph with edges labeled by free-group
generators such that no vertex carries two equal-labeled edges in the same
direction.  Folding a wedge of word loops gives a membership-complete
graph: a freely reduced word lies in the subgroup iff it traces a loop at
the base vertex.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .abelian import AbelianStructure
from .errors import NoInclusion, NoPattern, NotSimpleForm
from .presentations import Presentation, TietzeLog
from .words import Word, cyclic_reduce, free_reduce


@dataclass(frozen=True)
class FoldedGraph:
    nvertices: int
    base: int
    rank: int  # ambient free-group rank
    out: dict[tuple[int, int], int]   # (vertex, gen) -> head of the g-edge
    inn: dict[tuple[int, int], int]   # (vertex, gen) -> tail of the g-edge

    def step(self, v: int, g: int, s: int) -> int | None:
        return self.out.get((v, g)) if s > 0 else self.inn.get((v, g))

    def edges(self):
        return sorted((u, g, v) for (u, g), v in self.out.items())

    def canonical_form(self) -> tuple:
        """Isomorphism invariant: edges of the BFS-renumbered graph."""
        return (self.nvertices, tuple(self.edges()))


def build_folded_graph(words, n: int) -> FoldedGraph:
    """Fold the wedge of word loops at the base; core-trimmed, membership
    complete for the subgroup the words generate."""
    words = [free_reduce(w) for w in words]
    edges: list[list[int]] = []  # [tail, gen, head]
    nv = 1
    for w in words:
        prev = 0
        for i, (g, s) in enumerate(w.letters):
            last = i == len(w.letters) - 1
            nxt = 0 if last else nv
            if not last:
                nv += 1
            if s > 0:
                edges.append([prev, g, nxt])
            else:
                edges.append([nxt, g, prev])
            prev = nxt

    parent = list(range(nv))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        x, y = find(x), find(y)
        if x != y:
            parent[max(x, y)] = min(x, y)

    # fold to fixpoint: two equal-labeled edges sharing a tail (or a head)
    # identify their other endpoints
    changed = True
    while changed:
        changed = False
        dedup: set[tuple[int, int, int]] = set()
        kept: list[tuple[int, int, int]] = []
        for e in edges:
            t, g, h = find(e[0]), e[1], find(e[2])
            if (t, g, h) in dedup:
                continue
            dedup.add((t, g, h))
            kept.append((t, g, h))
        if len(kept) != len(edges):
            changed = True
        edges = [list(e) for e in kept]
        by_tail: dict[tuple[int, int], int] = {}
        by_head: dict[tuple[int, int], int] = {}
        for t, g, h in kept:
            if (t, g) in by_tail:
                if find(by_tail[(t, g)]) != find(h):
                    union(by_tail[(t, g)], h)
                    changed = True
            else:
                by_tail[(t, g)] = h
            if (h, g) in by_head:
                if find(by_head[(h, g)]) != find(t):
                    union(by_head[(h, g)], t)
                    changed = True
            else:
                by_head[(h, g)] = t

    final_edges = {(find(t), g, find(h)) for t, g, h in edges}
    base = find(0)
    final_edges, base = _trim_core(final_edges, base)

    # canonical renumbering by BFS from the base
    adj: dict[int, list[tuple[int, int, int, int]]] = {}
    for t, g, h in final_edges:
        adj.setdefault(t, []).append((g, 1, h, 0))
        adj.setdefault(h, []).append((g, -1, t, 0))
    order = {base: 0}
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for g, s, w, _ in sorted(adj.get(v, [])):
            if w not in order:
                order[w] = len(order)
                queue.append(w)
    out = {}
    inn = {}
    for t, g, h in final_edges:
        out[(order[t], g)] = order[h]
        inn[(order[h], g)] = order[t]
    return FoldedGraph(len(order), 0, n, out, inn)


def _trim_core(edges: set[tuple[int, int, int]], base: int):
    """Remove non-base vertices of total degree <= 1 until none remain."""
    while True:
        deg: dict[int, int] = {}
        for t, _g, h in edges:
            deg[t] = deg.get(t, 0) + 1
            deg[h] = deg.get(h, 0) + 1
        prune = {v for v, d in deg.items() if d <= 1 and v != base}
        if not prune:
            return edges, base
        edges = {(t, g, h) for t, g, h in edges
                 if t not in prune and h not in prune}


def graph_membership(graph: FoldedGraph, w: Word) -> bool:
    """True iff the freely reduced word traces a base-to-base loop."""
    v = graph.base
    for g, s in free_reduce(w).letters:
        nxt = graph.step(v, g, s)
        if nxt is None:
            return False
        v = nxt
    return v == graph.base


def generates_whole(graph: FoldedGraph) -> bool:
    """The folded graph is the rose: one vertex carrying every generator loop."""
    if graph.nvertices != 1:
        return False
    return all((graph.base, g) in graph.out for g in range(graph.rank))


def is_basis(words, n: int) -> bool:
    """Surjection onto the free group plus matching count: by the Hopf
    property a generating set of size n is a free basis."""
    words = list(words)
    return len(words) == n and generates_whole(build_folded_graph(words, n))


def dot_export(graph: FoldedGraph, gen_names=None) -> str:
    names = gen_names or [chr(ord("a") + i) for i in range(graph.rank)]
    lines = ["digraph folded {", "  rankdir=LR;",
             f"  v{graph.base} [shape=doublecircle];"]
    for u, g, v in graph.edges():
        lines.append(f'  v{u} -> v{v} [label="{names[g]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Fiber subwords and the ascending-HNN test

@dataclass(frozen=True)
class FiberSubwords:
    """Subwords strictly between the t and t^-1 letters of each relator,
    rewritten over the remaining generators (alphabet lists their letters)."""
    words: tuple[Word, ...]
    alphabet: tuple[str, ...]


def extract_fiber_subwords(pres: Presentation, t: str, side: str) -> FiberSubwords:
    """side "t_to_T": the cyclic subword following the (t, +1) letter up to
    the (t, -1) letter; side "T_to_t": the other way around.  Each relator
    must contain exactly one t and one t^-1 (simple form)."""
    if side not in ("t_to_T", "T_to_t"):
        raise ValueError("side must be 't_to_T' or 'T_to_t'")
    ti = pres.gen_index(t)
    others = [g.id for g in pres.generators if g.id != ti]
    remap = {g: j for j, g in enumerate(others)}
    alphabet = tuple(pres.generators[g].letter for g in others)
    out: list[Word] = []
    for r in pres.relators:
        w = cyclic_reduce(free_reduce(r))[0]
        pos = [i for i, (g, s) in enumerate(w.letters) if g == ti and s > 0]
        neg = [i for i, (g, s) in enumerate(w.letters) if g == ti and s < 0]
        if len(pos) != 1 or len(neg) != 1:
            raise NotSimpleForm(f"relator has {len(pos)} t and {len(neg)} t^-1 letters")
        start = pos[0] if side == "t_to_T" else neg[0]
        end = neg[0] if side == "t_to_T" else pos[0]
        L = len(w.letters)
        letters = []
        i = (start + 1) % L
        while i != end:
            g, s = w.letters[i]
            letters.append((remap[g], s))
            i = (i + 1) % L
        out.append(free_reduce(Word(tuple(letters))))
    return FiberSubwords(tuple(out), alphabet)


@dataclass
class HnnCertificate:
    verdict: str                # "fibred" or "inconclusive"
    fiber_rank: int
    t: str
    side_used: str | None
    subwords: dict[str, FiberSubwords]

    @property
    def fibred(self) -> bool:
        return self.verdict == "fibred"


def ascending_hnn_check(pres: Presentation, t: str) -> HnnCertificate:
    """Stallings' fibration criterion through an HNN decomposition over the
    span of the non-t generators: if the subwords between t and t^-1
    generate the free group on the other generators, conjugation by t maps
    that free group into itself and the decomposition is ascending.  For a
    3-manifold-flagged presentation one side suffices; otherwise both sides
    are required."""
    d = pres.ngens - 1
    sub: dict[str, FiberSubwords] = {}
    sides = ("t_to_T", "T_to_t")
    passing = {}
    for side in sides:
        fs = extract_fiber_subwords(pres, t, side)
        sub[side] = fs
        passing[side] = generates_whole(build_folded_graph(fs.words, d))
        if passing[side] and pres.flags.is_3manifold:
            return HnnCertificate("fibred", d, t, side, sub)
    if passing["t_to_T"] and passing["T_to_t"]:
        return HnnCertificate("fibred", d, t, "both", sub)
    return HnnCertificate("inconclusive", d, t, None, sub)


def descent_check(cover, base_ab: AbelianStructure, fiber_gens) -> bool:
    """Push a cover's fibration down to the base: every fiber generator's
    inclusion image must have finite order in the base abelianization
    (vanishing free part)."""
    for letter in fiber_gens:
        if letter not in cover.inclusion:
            raise NoInclusion(f"no inclusion word for generator {letter!r}")
        img = base_ab.free_image_of_word(cover.inclusion[letter])
        if any(img):
            return False
    return True


# ---------------------------------------------------------------------------
# Relator concatenation (two t-pairs -> one)

def concat_double_relators(pres: Presentation, t: str) -> tuple[Presentation, TietzeLog]:
    """Search pairs of relators with exactly two t/T pairs each for a
    rotation whose concatenation freely reduces to a relator with exactly
    one t/T pair.  The concatenation of two cyclic rotations is a product
    of conjugates, hence a consequence; the partner it replaces is a
    consequence of the new relator and the kept one."""
    ti = pres.gen_index(t)

    def tcount(w: Word):
        pos = sum(1 for g, s in w.letters if g == ti and s > 0)
        neg = sum(1 for g, s in w.letters if g == ti and s < 0)
        return pos, neg

    reduced = [cyclic_reduce(free_reduce(r))[0] for r in pres.relators]
    doubles = [i for i, r in enumerate(reduced) if tcount(r) == (2, 2)]
    for i in doubles:
        for j in doubles:
            if i == j:
                continue
            r, s = reduced[i], reduced[j]
            for s_var in (s, s.inverse()):
                for ri in range(len(r.letters)):
                    rrot = r.rotate(ri)
                    for si in range(len(s_var.letters)):
                        srot = Word(s_var.rotate(si).letters)
                        new = free_reduce(rrot * srot)
                        if not new.letters:
                            continue
                        if tcount(new) == (1, 1):
                            log = TietzeLog()
                            rels = list(pres.relators)
                            rels.append(new)
                            log.add("add_relator", len(rels) - 1,
                                    pres.spell(new))
                            del rels[j]
                            log.add("remove_relator", j)
                            from dataclasses import replace as _replace
                            out = _replace(pres, relators=tuple(rels))
                            return out, log
    raise NoPattern("no concatenable pair of double-t relators")
