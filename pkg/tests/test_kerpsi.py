import pytest
from hypothesis import given
from hypothesis import strategies as st

from fenchel.homomorphism import Homomorphism, RewritingError
from fenchel.kerpsi import c0_conjugate_rewrite, kerpsi_dictionary
from fenchel.perm import Perm
from fenchel.signature import Generator, Word, parse_signature

MINUS = parse_signature("(1;-;[3];{(2,2)})")
INVOLUTIONS = [Perm.from_cycles(t, 5) for t in ["(1 2)", "(2 3)(4 5)", "(1 5)"]]

free_perms = st.permutations(range(5)).map(Perm)


def ambient(d1, x1):
    """Images for MINUS with involutive reflections and the long relator satisfied."""
    c10, c11, c12 = INVOLUTIONS
    e1 = (d1 * d1 * x1).inverse()
    return Homomorphism(MINUS, {"d1": d1, "x1": x1, "c10": c10, "c11": c11, "c12": c12, "e1": e1})


def test_kernel_signature_is_doubled():
    dictionary = kerpsi_dictionary(MINUS)
    assert str(dictionary.kernel_signature) == "(2;-;[3,2,2,3];{-})"
    plus = kerpsi_dictionary(parse_signature("(0;+;[3];{(2,4)})"))
    assert str(plus.kernel_signature) == "(0;+;[3,2,4,3];{-})"


def test_kernel_words():
    dictionary = kerpsi_dictionary(parse_signature("(0;+;[3];{(2,4)})"))
    words = {g.name: str(w) for g, w in dictionary.words.items()}
    assert words == {
        "x1": "c10.x1.c10",
        "x2": "c10.c11",
        "x3": "c11.c12",
        "x4": "x1^-1",
    }


@pytest.mark.parametrize("text", ["(0;+;[3];{(2),(2)})", "(1;+;[3];{(2)})", "(1;-;[-];{(-)})", "(0;+;[3];{-})"])
def test_unsupported_signatures(text):
    with pytest.raises(ValueError):
        kerpsi_dictionary(parse_signature(text))


@given(free_perms, free_perms)
def test_lifts_reproduce_ambient_images(d1, x1):
    h = ambient(d1, x1)
    dictionary = kerpsi_dictionary(MINUS)
    c0 = h["c10"]
    for gen in MINUS.generators():
        a, b, flip = dictionary.lift(gen)
        pa = h.evaluate(dictionary.expand(a))
        pb = h.evaluate(dictionary.expand(b))
        assert pb == c0 * pa * c0, gen.name
        assert (pa * c0 if flip else pa) == h[gen], gen.name


@given(free_perms, free_perms)
def test_c0_conjugation(d1, x1):
    h = ambient(d1, x1)
    dictionary = kerpsi_dictionary(MINUS)
    c0 = h["c10"]
    for gen in dictionary.kernel_signature.generators():
        inside = h.evaluate(dictionary.expand(Word.of(gen)))
        rewritten = h.evaluate(dictionary.expand(dictionary.c0_conjugate(gen)))
        assert rewritten == c0 * inside * c0, gen.name
        assert c0_conjugate_rewrite(dictionary, gen) == dictionary.c0_conjugate(gen)


def test_rewriting_errors():
    dictionary = kerpsi_dictionary(MINUS)
    with pytest.raises(RewritingError):
        dictionary.lift(Generator.from_name("c20"))
    with pytest.raises(RewritingError):
        dictionary.expand(Word.of(Generator.from_name("x9")))
    with pytest.raises(RewritingError):
        dictionary.c0_conjugate(Generator.from_name("d3"))
