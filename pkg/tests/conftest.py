import random
import sys
import os

import pytest

sys.path.insert(0, os.path.dirname(__file__))


@pytest.fixture
def rng():
    return random.Random(0xF1B5ED)


@pytest.fixture(scope="session")
def suite():
    from suite_inputs import load_suite
    return load_suite()


def random_word(rng, ngens, length):
    from flab.words import Word
    letters = tuple((rng.randrange(ngens), rng.choice((1, -1)))
                    for _ in range(length))
    return Word(letters)


def random_cyclic_relator(rng, ngens, length, zero_sums=False):
    """A nonempty freely and cyclically reduced word; optionally with zero
    exponent sum in every generator."""
    from flab.words import Word, cyclic_reduce, free_reduce
    while True:
        if zero_sums:
            half = [(rng.randrange(ngens), 1) for _ in range(length // 2)]
            letters = half + [(g, -s) for g, s in half]
            rng.shuffle(letters)
            w = Word(tuple(letters))
        else:
            w = random_word(rng, ngens, length)
        w = cyclic_reduce(free_reduce(w))[0]
        if len(w.letters) >= 2:
            return w
