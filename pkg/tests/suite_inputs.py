"""Shared inputs: census presentations and printed cover data.

The cover presentations and basis words below are the published rewriting
outputs for the degree-n cyclic covers; tests treat them as given input
(the library consumes them through foldings, it does not regenerate the
exact letters).
"""

import os

from flab.presentations import Flags, parse_presentations, presentation

DATA = os.path.join(os.path.dirname(__file__), "..", "data", "presentations.txt")


def load_suite():
    with open(DATA, encoding="utf-8") as fh:
        return {p.name: p for p in parse_presentations(fh.read())}


MFLD_FLAGS = Flags(is_3manifold=True, is_hyperbolic=True)

# degree-2 cyclic cover of s594: generators (p, q, r, t) include into the
# base <a, c, x> (standard form w.r.t. a) as p=x, q=c, r=axA, t=a^2
S594_COVER = presentation(
    "pqrt", ["RQRtpqpT", "PQPTqPtP", "QPTRtRqP"],
    name="s594.cover2", flags=MFLD_FLAGS)
S594_INCLUSIONS = {"p": "x", "q": "c", "r": "axA", "t": "a2"}
S594_BASE_GENS = "acx"
S594_BASE_INFINITE = "a"

# degree-5 cyclic cover of v3093: generators (p, q, r, s, t) include into
# the base <b, x, y> (standard w.r.t. b) as p=x, q=y, r=BxB^-1... r=b^-1xb,
# s=b^-1yb, t=b^5
V3093_COVER = presentation(
    "pqrst",
    ["rsQPqrp2qTqSrsPRst",
     "sPtQPqrpqrpqrTSrsPsP",
     "QpqTpSQpqSrsPRsPqtRQPR",
     "sTQpqSrsPRsqSrsPRsqSrsPRstr2"],
    name="v3093.cover5", flags=MFLD_FLAGS)
V3093_INCLUSIONS = {"p": "x", "q": "y", "r": "BxB", "s": "ByB", "t": "b5"}
V3093_BASE_GENS = "bxy"
V3093_BASE_INFINITE = "b"

# degree-6 cover of v2869: ten-to-six basis words over a..f.  The published
# fifth word has one corrupted letter in our extracted source; the unique
# single-letter repair (B for b after "EFfE") restores the basis property.
V2869_BASIS_WORDS = [
    "F2eBdBaceBabf",
    "Fef",
    "FBabFeBAbEceBabf",
    "F2eBdBaeBadBaCAbDbEf2",
    "F2eBdBacAbDbEFfEBdBabFeBAbEcef",
    "F2eBdBacAbDbf",
]

# degree-12 cover of v3541: ten basis words over a..j, with w expanded
V3541_W = "bDCIjaIhGHicH"
V3541_BASIS_TEXTS = [
    "WJ", "jwJ", "jwfBAweJiCIjaI", "jI", "jEWaJ", "iAJicI",
    "jbDIjEWabFeWJ", "iH", "hFEfBAweJidBAweJ", "hCIhgFEfBAweJidFWJ",
]


def v3541_words():
    from flab.words import Word, free_reduce, parse_word
    w = parse_word(V3541_W, "abcdefghij")
    out = []
    for text in V3541_BASIS_TEXTS:
        raw = parse_word(text, "abcdefghijw")
        letters = []
        for g, s in raw.letters:
            if g == 10:
                letters.extend(w.letters if s > 0 else w.inverse().letters)
            else:
                letters.append((g, s))
        out.append(free_reduce(Word(tuple(letters))))
    return out
