"""Finite presentations with optional peripheral (cusp) structure.

The text format, one presentation per blank-line-separated block:

    name: v3396
    gens: a b c
    rel: aBca2bC
    rel: a2cba2CAB
    cusp: Ab | B3a5B2
    flags: 3manifold hyperbolic

'#' starts a comment.  Flag tokens: 3manifold, closed, hyperbolic.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import BadCount, BadSubstitution, ParseError, UnknownGenerator
from .words import Word, free_reduce, cyclic_reduce, exponent_vector, parse_word, print_word


@dataclass(frozen=True)
class Generator:
    id: int
    letter: str


@dataclass(frozen=True)
class Flags:
    is_3manifold: bool = False
    is_closed: bool = False
    is_hyperbolic: bool = False


@dataclass(frozen=True)
class Presentation:
    generators: tuple[Generator, ...]
    relators: tuple[Word, ...]
    cusps: tuple[tuple[Word, Word], ...] = ()
    name: str = ""
    flags: Flags = Flags()

    def __post_init__(self):
        n = len(self.generators)
        for i, g in enumerate(self.generators):
            if g.id != i:
                raise ValueError(f"generator id {g.id} at position {i}")
        letters = [g.letter for g in self.generators]
        if len(set(letters)) != len(letters):
            raise ValueError("duplicate generator letters")
        for w in self.all_words():
            for g, _ in w.letters:
                if not 0 <= g < n:
                    raise UnknownGenerator(f"letter indexes undeclared generator {g}")

    @property
    def ngens(self) -> int:
        return len(self.generators)

    @property
    def alphabet(self) -> tuple[str, ...]:
        return tuple(g.letter for g in self.generators)

    def all_words(self):
        yield from self.relators
        for m, l in self.cusps:
            yield m
            yield l

    def gen_index(self, letter: str) -> int:
        for g in self.generators:
            if g.letter == letter:
                return g.id
        raise UnknownGenerator(f"no generator named {letter!r}")

    def word(self, text: str) -> Word:
        return parse_word(text, self.alphabet)

    def spell(self, w: Word) -> str:
        return print_word(w, self.alphabet)

    def exponent_matrix(self) -> list[list[int]]:
        """Rows indexed by relators, columns by generators."""
        return [list(exponent_vector(r, self.ngens)) for r in self.relators]


def presentation(letters, relator_texts, cusp_texts=(), name="", flags=Flags()):
    """Convenience constructor from letter strings and word texts."""
    gens = tuple(Generator(i, l) for i, l in enumerate(letters))
    alpha = tuple(l for l in letters)
    rels = tuple(parse_word(t, alpha) if isinstance(t, str) else t for t in relator_texts)
    cusps = tuple(
        (parse_word(m, alpha) if isinstance(m, str) else m,
         parse_word(l, alpha) if isinstance(l, str) else l)
        for m, l in cusp_texts)
    return Presentation(gens, rels, cusps, name=name, flags=flags)


# ---------------------------------------------------------------------------
# Tietze moves

@dataclass(frozen=True)
class TietzeMove:
    """One replayable presentation move.

    kinds:
      substitute: data = (target letter, replacement text over others+fresh, fresh letter)
      add_relator / remove_relator: data = (index, word text or None)
      reduce_relator: data = (index,)  free+cyclic reduction
      remove_generator: data = (letter, defining relator index)
      relabel: data = (tuple of letters in new order,)
    """
    kind: str
    data: tuple


@dataclass
class TietzeLog:
    moves: list[TietzeMove] = field(default_factory=list)

    def add(self, kind: str, *data):
        self.moves.append(TietzeMove(kind, tuple(data)))

    def extend(self, other: "TietzeLog"):
        self.moves.extend(other.moves)

    def replay(self, pres: Presentation) -> Presentation:
        for mv in self.moves:
            pres = apply_move(pres, mv)
        return pres


def apply_move(pres: Presentation, mv: TietzeMove) -> Presentation:
    if mv.kind == "substitute":
        target, replacement, fresh = mv.data
        out, _ = substitute(pres, target, replacement, fresh)
        return out
    if mv.kind == "add_relator":
        _, text = mv.data
        w = pres.word(text) if isinstance(text, str) else text
        return replace(pres, relators=pres.relators + (w,))
    if mv.kind == "remove_relator":
        idx = mv.data[0]
        rels = list(pres.relators)
        del rels[idx]
        return replace(pres, relators=tuple(rels))
    if mv.kind == "reduce_relator":
        idx = mv.data[0]
        rels = list(pres.relators)
        rels[idx] = cyclic_reduce(free_reduce(rels[idx]))[0]
        return replace(pres, relators=tuple(rels))
    if mv.kind == "remove_generator":
        letter, rel_idx = mv.data
        return _remove_generator(pres, pres.gen_index(letter), rel_idx)
    if mv.kind == "relabel":
        order = mv.data[0]
        return reorder_generators(pres, [pres.gen_index(l) for l in order])
    raise ValueError(f"unknown move kind {mv.kind!r}")


def _map_word(w: Word, images: dict[int, Word]) -> Word:
    out: list[tuple[int, int]] = []
    for g, s in w.letters:
        img = images[g]
        out.extend(img.letters if s > 0 else img.inverse().letters)
    return free_reduce(Word(tuple(out)))


def reorder_generators(pres: Presentation, order: list[int]) -> Presentation:
    """Permute the generator list; words are reindexed accordingly."""
    if sorted(order) != list(range(pres.ngens)):
        raise ValueError("not a permutation of generator indices")
    newpos = {old: new for new, old in enumerate(order)}
    gens = tuple(Generator(new, pres.generators[old].letter)
                 for new, old in enumerate(order))

    def remap(w: Word) -> Word:
        return Word(tuple((newpos[g], s) for g, s in w.letters),
                    reduced=w.reduced, cyclically_reduced=w.cyclically_reduced)

    return Presentation(
        gens,
        tuple(remap(r) for r in pres.relators),
        tuple((remap(m), remap(l)) for m, l in pres.cusps),
        name=pres.name, flags=pres.flags)


def _remove_generator(pres: Presentation, gen: int, rel_idx: int) -> Presentation:
    """Drop a generator occurring only in relator rel_idx (which is dropped too)."""
    for i, r in enumerate(pres.relators):
        if i != rel_idx and any(g == gen for g, _ in r.letters):
            raise ValueError("generator occurs outside its defining relator")
    for m, l in pres.cusps:
        if any(g == gen for g, _ in m.letters) or any(g == gen for g, _ in l.letters):
            raise ValueError("generator occurs in a cusp word")
    keep = [g.id for g in pres.generators if g.id != gen]
    newid = {old: new for new, old in enumerate(keep)}
    gens = tuple(Generator(newid[g.id], g.letter) for g in pres.generators if g.id != gen)

    def remap(w: Word) -> Word:
        return Word(tuple((newid[g], s) for g, s in w.letters),
                    reduced=w.reduced, cyclically_reduced=w.cyclically_reduced)

    rels = tuple(remap(r) for i, r in enumerate(pres.relators) if i != rel_idx)
    cusps = tuple((remap(m), remap(l)) for m, l in pres.cusps)
    return Presentation(gens, rels, cusps, name=pres.name, flags=pres.flags)


def substitute(pres: Presentation, target: str, replacement, fresh: str | None = None):
    """Replace generator `target` by a word over (other gens + one fresh gen).

    The replacement must use the fresh generator exactly once so the move is
    invertible.  The fresh generator is appended at the end of the generator
    list.  Returns (presentation, TietzeLog with the single move).
    """
    tgt = pres.gen_index(target)
    others = [g.letter for g in pres.generators if g.id != tgt]
    if fresh is None:
        fresh = _fresh_letter(pres)
    if fresh in (g.letter for g in pres.generators):
        raise BadSubstitution(f"fresh letter {fresh!r} already in use")
    ext_alpha = others + [fresh]
    if isinstance(replacement, str):
        repl = parse_word(replacement, ext_alpha)
    else:
        repl = replacement
    fresh_idx = len(ext_alpha) - 1
    if sum(1 for g, _ in repl.letters if g == fresh_idx) != 1:
        raise BadSubstitution("replacement must contain the fresh generator exactly once")

    # Image map: old ids -> words over the new generator list (others..., fresh).
    new_letters = others + [fresh]
    newpos = {l: i for i, l in enumerate(new_letters)}
    old_to_new: dict[int, Word] = {}
    for g in pres.generators:
        if g.id == tgt:
            old_to_new[g.id] = Word(tuple(
                (newpos[ext_alpha[gg]], s) for gg, s in repl.letters))
        else:
            old_to_new[g.id] = Word(((newpos[g.letter], 1),))

    gens = tuple(Generator(i, l) for i, l in enumerate(new_letters))
    rels = tuple(_map_word(r, old_to_new) for r in pres.relators)
    cusps = tuple((_map_word(m, old_to_new), _map_word(l, old_to_new))
                  for m, l in pres.cusps)
    out = Presentation(gens, rels, cusps, name=pres.name, flags=pres.flags)
    log = TietzeLog()
    repl_text = print_word(repl, ext_alpha)
    log.add("substitute", target, repl_text, fresh)
    return out, log


def _fresh_letter(pres: Presentation) -> str:
    used = set(pres.alphabet)
    for c in "xyzwvutsrqponmlkjihgfedcba":
        if c not in used:
            return c
    i = 0
    while f"g{i}" in used:
        i += 1
    return f"g{i}"


# ---------------------------------------------------------------------------
# File format

def parse_presentations(text: str) -> list[Presentation]:
    blocks: list[list[tuple[int, str]]] = [[]]
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            if blocks[-1]:
                blocks.append([])
            continue
        blocks[-1].append((lineno, line))
    if blocks and not blocks[-1]:
        blocks.pop()
    return [_parse_block(b) for b in blocks]


def parse_presentation(text: str) -> Presentation:
    pres = parse_presentations(text)
    if len(pres) != 1:
        raise ParseError(f"expected one presentation block, found {len(pres)}")
    return pres[0]


def _parse_block(lines: list[tuple[int, str]]) -> Presentation:
    name = ""
    gens: list[str] | None = None
    rel_texts: list[tuple[int, str]] = []
    cusp_texts: list[tuple[int, str]] = []
    flag_tokens: list[str] = []
    for lineno, line in lines:
        if ":" not in line:
            raise ParseError("expected 'key: value'", line=lineno, col=1)
        key, _, value = line.partition(":")
        key = key.strip()
        value = value.strip()
        if key == "name":
            name = value
        elif key == "gens":
            gens = value.split()
            for lineno2, g in ((lineno, g) for g in gens):
                if len(g) != 1 or not (g.isalpha() and g.islower()):
                    raise ParseError(f"generator name must be one lowercase letter, got {g!r}",
                                     line=lineno2)
            if len(set(gens)) != len(gens):
                raise ParseError("duplicate generator letters", line=lineno)
        elif key == "rel":
            rel_texts.append((lineno, value))
        elif key == "cusp":
            cusp_texts.append((lineno, value))
        elif key == "flags":
            flag_tokens.extend(value.split())
        else:
            raise ParseError(f"unknown key {key!r}", line=lineno, col=1)
    if gens is None:
        raise ParseError("block missing 'gens:' line",
                         line=lines[0][0] if lines else None)
    alpha = tuple(gens)

    def pw(lineno, text):
        try:
            return parse_word(text, alpha)
        except (UnknownGenerator, BadCount) as e:
            raise ParseError(str(e), line=lineno) from e

    rels = tuple(pw(ln, t) for ln, t in rel_texts)
    cusps = []
    for ln, t in cusp_texts:
        if "|" not in t:
            raise ParseError("cusp line must be 'm | l'", line=ln)
        m_text, _, l_text = t.partition("|")
        cusps.append((pw(ln, m_text.strip()), pw(ln, l_text.strip())))
    known = {"3manifold", "closed", "hyperbolic"}
    for tok in flag_tokens:
        if tok not in known:
            raise ParseError(f"unknown flag token {tok!r}")
    flags = Flags(is_3manifold="3manifold" in flag_tokens,
                  is_closed="closed" in flag_tokens,
                  is_hyperbolic="hyperbolic" in flag_tokens)
    gen_objs = tuple(Generator(i, l) for i, l in enumerate(gens))
    return Presentation(gen_objs, rels, tuple(cusps), name=name, flags=flags)


def format_presentation(pres: Presentation) -> str:
    lines = []
    if pres.name:
        lines.append(f"name: {pres.name}")
    lines.append("gens: " + " ".join(pres.alphabet))
    for r in pres.relators:
        lines.append("rel: " + pres.spell(r))
    for m, l in pres.cusps:
        lines.append(f"cusp: {pres.spell(m)} | {pres.spell(l)}")
    toks = []
    if pres.flags.is_3manifold:
        toks.append("3manifold")
    if pres.flags.is_closed:
        toks.append("closed")
    if pres.flags.is_hyperbolic:
        toks.append("hyperbolic")
    if toks:
        lines.append("flags: " + " ".join(toks))
    return "\n".join(lines) + "\n"
