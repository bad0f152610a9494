from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fenchel.signature import (
    ADMISSIBLE_FUCHSIAN,
    ADMISSIBLE_PROPER_NEC,
    MINUS,
    NON_HYPERBOLIC,
    PLUS,
    Generator,
    NecSignature,
    NotBordered,
    PeriodOutOfRange,
    SignatureSyntaxError,
    UnknownGenerator,
    Word,
    area_mu,
    bordered_surface_criterion,
    canonical_presentation,
    classify,
    cycle_params,
    doubled_signature,
    fuchsian_double,
    kernel_surface_data,
    linear_bordered_reading,
    orientation_character,
    parse_signature,
    parse_word,
    plus_generators,
    render_signature,
    riemann_hurwitz,
    torsion_part,
)

periods = st.lists(st.integers(2, 7), max_size=3)
cycles = st.lists(st.lists(st.integers(2, 6), max_size=4), max_size=2)


@st.composite
def signatures(draw):
    sign = draw(st.sampled_from([PLUS, MINUS]))
    genus = draw(st.integers(1 if sign == MINUS else 0, 2))
    return NecSignature(genus, sign, tuple(draw(periods)), tuple(tuple(c) for c in draw(cycles)))


def test_parse_fields():
    sig = parse_signature("(0;+;[-];{(2,3,7)})")
    assert sig.genus == 0 and sig.is_plus
    assert sig.periods == ()
    assert [c.links for c in sig.cycles] == [(2, 3, 7)]


def test_parse_ignores_whitespace():
    assert parse_signature(" ( 1 ; - ; [2, 3] ; { (-) , (2,2) } ) ") == parse_signature("(1;-;[2,3];{(-),(2,2)})")


@given(signatures())
def test_render_parse_round_trip(sig):
    assert parse_signature(render_signature(sig)) == sig


@pytest.mark.parametrize(
    "text",
    ["(0;+;[2,;{-})", "(0;+;[2];{(3)}", "(0;*;[-];{-})", "(0;+;[2];{(3)}) x", "(a;+;[-];{-})"],
)
def test_syntax_errors_carry_position(text):
    with pytest.raises(SignatureSyntaxError) as info:
        parse_signature(text)
    assert 0 <= info.value.position <= len(text)


def test_sign_minus_needs_genus():
    with pytest.raises(SignatureSyntaxError):
        parse_signature("(0;-;[-];{-})")


@pytest.mark.parametrize("text", ["(0;+;[1];{-})", "(0;+;[-];{(2,1)})"])
def test_period_out_of_range(text):
    with pytest.raises(PeriodOutOfRange):
        parse_signature(text)


def test_area_values():
    assert area_mu(parse_signature("(0;+;[-];{(2,3,7)})")) == Fraction(1, 84)
    assert area_mu(parse_signature("(3;-;[-];{-})")) == 1
    assert area_mu(parse_signature("(0;+;[2,3,7];{-})")) == Fraction(1, 42)


@pytest.mark.parametrize("n", range(2, 51))
def test_area_of_excluded_family(n):
    sig = parse_signature(f"(0;+;[2];{{({n})}})")
    assert area_mu(sig) == Fraction(-1, 2 * n)
    assert classify(sig) == NON_HYPERBOLIC


def test_classify():
    assert classify(parse_signature("(2;+;[-];{-})")) == ADMISSIBLE_FUCHSIAN
    assert classify(parse_signature("(1;+;[4];{(2)})")) == ADMISSIBLE_PROPER_NEC
    assert classify(parse_signature("(0;+;[-];{(2,2,2,2)})")) == NON_HYPERBOLIC


def test_generators_in_presentation_order():
    sig = parse_signature("(1;+;[3];{(2,2)})")
    assert [g.name for g in sig.generators()] == ["a1", "b1", "x1", "c10", "c11", "c12", "e1"]
    assert [g.name for g in plus_generators(sig)] == ["a1", "b1", "x1", "e1"]


def test_generator_names_with_large_indices():
    gen = Generator("c", 1, 12)
    assert gen.name == "c1_12"
    assert Generator.from_name("c1_12") == gen
    with pytest.raises(UnknownGenerator):
        Generator.from_name("y1")


def test_presentation_labels():
    labels = canonical_presentation(parse_signature("(0;+;[3];{(2,5)})")).labels
    assert labels == (
        "x1^3",
        "c10^2",
        "c11^2",
        "c12^2",
        "(c10.c11)^2",
        "(c11.c12)^5",
        "c12=e1.c10.e1^-1",
        "long",
    )


@given(signatures())
def test_relators_preserve_orientation(sig):
    for label, relator in canonical_presentation(sig):
        assert orientation_character(sig, relator) == 1, label


def test_word_free_reduction():
    w = parse_word("a1.b1.b1^-1.a1")
    assert str(w) == "a1^2"
    assert str(w * w.inverse()) == "1"
    assert len(parse_word("c10^3.x1^-2")) == 5
    assert str(parse_word("c10.e1").reversed()) == "e1.c10"


def test_word_checked_against_signature():
    sig = parse_signature("(1;-;[-];{(-)})")
    assert orientation_character(sig, parse_word("d1.c10", sig)) == 1
    assert orientation_character(sig, parse_word("d1^3", sig)) == -1
    with pytest.raises(UnknownGenerator):
        parse_word("a1", sig)


def test_cycle_params():
    params = cycle_params(parse_signature("(0;+;[-];{(-),(2),(2,3),(2,2,2),(-)})"))
    assert (params.k0, params.k1, params.k2, params.k3) == (2, 1, 1, 1)
    assert params.k == 5


def test_bordered_criterion_readings():
    sig = parse_signature("(0;+;[2];{(2,3,2)})")
    assert bordered_surface_criterion(sig) is True
    assert linear_bordered_reading(sig) is False
    assert bordered_surface_criterion(parse_signature("(0;+;[-];{(-)})")) is True
    with pytest.raises(NotBordered):
        bordered_surface_criterion(parse_signature("(2;+;[-];{-})"))


def test_riemann_hurwitz_and_kernel_genus():
    assert riemann_hurwitz(Fraction(1, 84), 168) == 2
    orientable = kernel_surface_data(Fraction(1, 84), 168, orientable=True)
    assert orientable.genus == 2 and orientable.consistent
    nonorientable = kernel_surface_data(Fraction(1, 2), 4, orientable=False)
    assert nonorientable.genus == 4 and nonorientable.consistent
    assert kernel_surface_data(Fraction(1, 3), 2, orientable=False).genus is None


def test_doubled_and_torsion_part():
    sig = parse_signature("(2;-;[3,4];{(5)})")
    assert doubled_signature(sig) == parse_signature("(4;-;[3,4,5,4,3];{-})")
    assert torsion_part(sig) == parse_signature("(0;+;[3,4];{(5)})")
    assert fuchsian_double(parse_signature("(0;+;[3];{(2,4)})")) == parse_signature("(0;+;[3,2,4,3];{-})")
    with pytest.raises(ValueError):
        fuchsian_double(sig)


def test_word_power_and_product():
    w = Word.of("x1") * Word.of("c10")
    assert str(w**2) == "x1.c10.x1.c10"
    assert str(w ** -1) == "c10^-1.x1^-1"
