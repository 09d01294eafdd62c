import pytest

from flab.errors import BadCount, BadSubstitution, ParseError, UnknownGenerator
from flab.presentations import (format_presentation, parse_presentation,
                                parse_presentations, presentation, substitute)
from flab.words import (Word, cyclic_reduce, exponent_vector, free_reduce,
                        parse_word, print_word)

from conftest import random_cyclic_relator, random_word


class TestParseWord:
    def test_census_notation(self):
        w = parse_word("a4B2Ab3AB2Ab3AB2", "ab")
        assert print_word(w, "ab") == "a4B2Ab3AB2Ab3AB2"
        assert len(w) == 20
        spelled = "".join(("ab"[g] if s > 0 else "AB"[g]) for g, s in w)
        assert spelled == "aaaaBBAbbbABBAbbbABB"

    def test_empty(self):
        assert parse_word("", "ab") == Word()

    def test_mixed_case_letters(self):
        w = parse_word("aCAc", "abc")
        assert w.letters == ((0, 1), (2, -1), (0, -1), (2, 1))

    def test_caret_is_optional_sugar(self):
        assert parse_word("a^4B^2", "ab") == parse_word("a4B2", "ab")

    def test_whitespace_ignored(self):
        assert parse_word("a 4 B2\tA", "ab") == parse_word("a4B2A", "ab")

    def test_unknown_letter(self):
        with pytest.raises(UnknownGenerator):
            parse_word("axb", "ab")

    def test_zero_count(self):
        with pytest.raises(BadCount):
            parse_word("a0", "ab")

    def test_negative_count(self):
        with pytest.raises(BadCount):
            parse_word("a-2", "ab")

    def test_leading_digit(self):
        with pytest.raises(BadCount):
            parse_word("3a", "ab")

    def test_roundtrip_on_random_reduced_words(self, rng):
        for _ in range(200):
            w = free_reduce(random_word(rng, 3, rng.randrange(0, 25)))
            assert parse_word(print_word(w, "abc"), "abc") == Word(w.letters)


class TestFreeReduce:
    def test_single_cancellation(self):
        assert print_word(free_reduce(parse_word("aBba", "ab")), "ab") == "a2"

    def test_figure_two_word(self):
        # (Ab)^2(B^3a^5B^2) reduces across the b/B junction
        w = parse_word("Ab", "ab").power(2) * parse_word("B3a5B2", "ab")
        red = free_reduce(w)
        assert print_word(red, "ab") == "AbAB2a5B2"
        assert free_reduce(red) == red

    def test_full_collapse(self):
        assert free_reduce(parse_word("abBA", "ab")) == Word((), reduced=True)

    def test_idempotent_and_no_adjacent_pair(self, rng):
        for _ in range(300):
            w = random_word(rng, 2, rng.randrange(0, 30))
            r = free_reduce(w)
            assert free_reduce(r) == r
            assert len(r) <= len(w)
            for i in range(len(r.letters) - 1):
                g1, s1 = r.letters[i]
                g2, s2 = r.letters[i + 1]
                assert not (g1 == g2 and s1 == -s2)


class TestCyclicReduce:
    def test_simple_peel(self):
        out, conj = cyclic_reduce(parse_word("Aba", "ab"))
        assert print_word(out, "ab") == "b"
        assert print_word(conj, "ab") == "A"

    def test_already_reduced(self):
        out, conj = cyclic_reduce(parse_word("abAB", "ab"))
        assert print_word(out, "ab") == "abAB"
        assert conj == Word((), reduced=True)

    def test_peels_to_fixpoint(self):
        # BaabAb peels twice: conjugator Ba, core ab
        out, conj = cyclic_reduce(parse_word("BaabAb", "ab"))
        assert print_word(out, "ab") == "ab"
        assert print_word(conj, "ab") == "Ba"

    def test_conjugation_identity(self, rng):
        for _ in range(200):
            w = free_reduce(random_word(rng, 2, rng.randrange(1, 20)))
            out, conj = cyclic_reduce(w)
            back = free_reduce(conj * out * conj.inverse())
            assert back == w
            # no cancelling first/last pair
            if len(out.letters) >= 2:
                (g1, s1), (g2, s2) = out.letters[0], out.letters[-1]
                assert not (g1 == g2 and s1 == -s2)


class TestExponentVector:
    def test_v1539_relator(self):
        assert exponent_vector(parse_word("a4B2Ab3AB2Ab3AB2", "ab"), 2) == (0, 0)

    def test_v3036_relator(self):
        w = parse_word("a3b3AbAb3a3b3AbAb4AbAb3", "ab")
        assert exponent_vector(w, 2) == (0, 19)

    def test_empty(self):
        assert exponent_vector(Word(), 2) == (0, 0)

    def test_homomorphism(self, rng):
        for _ in range(200):
            u = random_word(rng, 3, rng.randrange(0, 12))
            v = random_word(rng, 3, rng.randrange(0, 12))
            uv = exponent_vector(u * v, 3)
            su = exponent_vector(u, 3)
            sv = exponent_vector(v, 3)
            assert uv == tuple(a + b for a, b in zip(su, sv))


class TestSubstitute:
    def test_v3384_substitution(self):
        pres = presentation("abc", ["ab2ab2aCb2ab2abcb", "aCAc"])
        out, log = substitute(pres, "a", "yB2", "y")
        assert out.alphabet == ("b", "c", "y")
        assert [out.spell(r) for r in out.relators] == ["y3B2Cb2y2Bcb", "yB2Cb2Yc"]
        assert log.replay(pres).relators == out.relators

    def test_pure_rename(self):
        pres = presentation("ab", ["ab"])
        out, _ = substitute(pres, "a", "x", "x")
        assert set(out.alphabet) == {"b", "x"}
        assert out.spell(out.relators[0]) == "xb"

    def test_standard_form_check_after_v1539_substitution(self):
        pres = presentation("ab", ["a4B2Ab3AB2Ab3AB2"],
                            cusp_texts=[("Ab", "B3a5B2")])
        out, _ = substitute(pres, "a", "bx", "x")
        # b picks up a's exponents: still zero sums; x has zero sum too
        for r in out.relators:
            assert exponent_vector(r, out.ngens)[out.gen_index("b")] == 0
            assert exponent_vector(r, out.ngens)[out.gen_index("x")] == 0

    def test_substitutes_cusp_words(self):
        pres = presentation("ab", ["a4B2Ab3AB2Ab3AB2"],
                            cusp_texts=[("Ab", "B3a5B2")])
        out, _ = substitute(pres, "a", "bx", "x")
        assert out.alphabet == ("b", "x")
        m, l = out.cusps[0]
        assert out.spell(m) == "X"  # (bx)^-1 b reduces to x^-1
        assert exponent_vector(m, 2) == (0, -1)
        assert exponent_vector(l, 2) == (0, 5)

    def test_invertibility_guard(self):
        pres = presentation("ab", ["ab"])
        with pytest.raises(BadSubstitution):
            substitute(pres, "a", "xbx", "x")
        with pytest.raises(BadSubstitution):
            substitute(pres, "a", "b", "x")


class TestPresentationFiles:
    V3396 = """\
name: v3396
gens: a b c
rel: aBca2bC
rel: a2cba2CAB
flags: 3manifold hyperbolic
"""

    def test_parse_v3396(self):
        pres = parse_presentation(self.V3396)
        assert pres.name == "v3396"
        assert pres.ngens == 3
        assert len(pres.relators) == 2
        assert pres.flags.is_3manifold and pres.flags.is_hyperbolic
        assert not pres.flags.is_closed

    def test_free_group_block(self):
        pres = parse_presentation("name: F2\ngens: a b\n")
        assert pres.ngens == 2 and not pres.relators

    def test_cusp_line(self):
        pres = parse_presentation(
            "name: v1539\ngens: a b\nrel: a4B2Ab3AB2Ab3AB2\n"
            "cusp: Ab | B3a5B2\n")
        assert len(pres.cusps) == 1
        m, l = pres.cusps[0]
        assert pres.spell(m) == "Ab" and pres.spell(l) == "B3a5B2"

    def test_roundtrip(self):
        pres = parse_presentation(self.V3396)
        assert parse_presentation(format_presentation(pres)) == pres

    def test_multiple_blocks_and_comments(self):
        text = "# comment\nname: x\ngens: a\nrel: a2\n\n\nname: y\ngens: b\n"
        ps = parse_presentations(text)
        assert [p.name for p in ps] == ["x", "y"]

    def test_duplicate_generators(self):
        with pytest.raises(ParseError):
            parse_presentation("gens: a a\n")

    def test_unknown_letter_has_line_number(self):
        with pytest.raises(ParseError) as e:
            parse_presentation("gens: a b\nrel: axb\n")
        assert e.value.line == 2

    def test_unknown_key(self):
        with pytest.raises(ParseError):
            parse_presentation("gens: a\nbogus: 1\n")

    def test_cusp_over_undeclared_generator(self):
        with pytest.raises(ParseError):
            parse_presentation("gens: a\ncusp: a | b\n")

    def test_bad_flag_token(self):
        with pytest.raises(ParseError):
            parse_presentation("gens: a\nflags: shiny\n")
