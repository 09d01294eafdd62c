"""Words in free groups: signed generator sequences, reduction, parsing.

A letter is a pair (generator id, sign) with sign in {+1, -1}.  Words store
letters, not glyphs; printing and parsing translate through an alphabet,
a sequence of generator names.  Single lowercase characters print as
themselves with uppercase denoting the inverse; longer synthesized names
(g0, g1, ...) print space-separated with ^-1 for inverses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BadCount, UnknownGenerator


@dataclass(frozen=True)
class Word:
    letters: tuple[tuple[int, int], ...] = ()
    reduced: bool = False
    cyclically_reduced: bool = False

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __bool__(self):
        return bool(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        inv = tuple((g, -s) for (g, s) in reversed(self.letters))
        return Word(inv, reduced=self.reduced,
                    cyclically_reduced=self.cyclically_reduced)

    def power(self, n: int) -> "Word":
        if n < 0:
            return self.inverse().power(-n)
        return Word(self.letters * n)

    def rotate(self, k: int) -> "Word":
        """Cyclic rotation: letters[k:] + letters[:k]."""
        if not self.letters:
            return self
        k %= len(self.letters)
        return Word(self.letters[k:] + self.letters[:k])

    def max_generator(self) -> int:
        return max((g for g, _ in self.letters), default=-1)


def word(letters) -> Word:
    return Word(tuple(letters))


def free_reduce(w: Word) -> Word:
    """The unique freely reduced word equal to w in the free group."""
    if w.reduced:
        return w
    stack: list[tuple[int, int]] = []
    for g, s in w.letters:
        if stack and stack[-1][0] == g and stack[-1][1] == -s:
            stack.pop()
        else:
            stack.append((g, s))
    return Word(tuple(stack), reduced=True)


def is_freely_reduced(w: Word) -> bool:
    ls = w.letters
    return all(not (ls[i][0] == ls[i + 1][0] and ls[i][1] == -ls[i + 1][1])
               for i in range(len(ls) - 1))


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Return (w', c) with w' cyclically reduced and w = c * w' * c^-1.

    Peels one cancelling first/last pair at a time; the conjugator records
    the peeled letters outermost first.
    """
    w = free_reduce(w)
    ls = list(w.letters)
    conj: list[tuple[int, int]] = []
    while len(ls) >= 2 and ls[0][0] == ls[-1][0] and ls[0][1] == -ls[-1][1]:
        conj.append(ls[0])
        ls = ls[1:-1]
    out = Word(tuple(ls), reduced=True, cyclically_reduced=True)
    return out, Word(tuple(conj), reduced=True)


def exponent_vector(w: Word, ngens: int) -> tuple[int, ...]:
    """Per-generator signed letter counts; a homomorphism to Z^ngens."""
    v = [0] * ngens
    for g, s in w.letters:
        v[g] += s
    return tuple(v)


def parse_word(text: str, alphabet) -> Word:
    """Parse census-style word text over single-letter generator names.

    Grammar: a letter, optionally followed by an optional caret and a
    decimal repetition count >= 1.  Case encodes inversion; whitespace is
    ignored.  'a4B2' expands to aaaaBB.
    """
    lookup = {name: i for i, name in enumerate(alphabet)}
    letters: list[tuple[int, int]] = []
    text = "".join(text.split())
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isdigit() or ch == "^":
            raise BadCount(f"repetition count without a preceding letter at position {i}")
        low = ch.lower()
        if low not in lookup:
            raise UnknownGenerator(f"unknown generator letter {ch!r}")
        gen = lookup[low]
        sign = 1 if ch.islower() else -1
        i += 1
        if i < n and text[i] == "^":
            i += 1
            if i >= n or not (text[i].isdigit() or text[i] == "-"):
                raise BadCount("caret without a repetition count")
        count = 1
        if i < n and (text[i].isdigit() or text[i] == "-"):
            j = i
            if text[j] == "-":
                j += 1
            while j < n and text[j].isdigit():
                j += 1
            count = int(text[i:j])
            if count < 1:
                raise BadCount(f"repetition count must be >= 1, got {count}")
            i = j
        letters.extend([(gen, sign)] * count)
    return Word(tuple(letters))


def print_word(w: Word, alphabet) -> str:
    """Render a word; inverse of parse_word on reduced words."""
    if not w.letters:
        return ""
    multichar = any(len(str(name)) > 1 for name in alphabet)
    runs: list[tuple[int, int, int]] = []  # (gen, sign, count)
    for g, s in w.letters:
        if runs and runs[-1][0] == g and runs[-1][1] == s:
            runs[-1] = (g, s, runs[-1][2] + 1)
        else:
            runs.append((g, s, 1))
    if multichar:
        parts = []
        for g, s, c in runs:
            name = str(alphabet[g])
            exp = s * c
            parts.append(name if exp == 1 else f"{name}^{exp}")
        return " ".join(parts)
    parts = []
    for g, s, c in runs:
        name = str(alphabet[g])
        glyph = name if s > 0 else name.upper()
        parts.append(glyph if c == 1 else f"{glyph}{c}")
    return "".join(parts)
