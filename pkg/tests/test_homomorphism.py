import pytest

from fenchel.homomorphism import (
    AS_PRINTED,
    E_INVERTED,
    Homomorphism,
    SignatureMismatch,
    check_witness,
    combine,
    induce_index2,
    normalize_convention,
    orientation_homomorphism,
    torsion_free_certificate,
    verify_relators,
)
from fenchel.kerpsi import kerpsi_dictionary
from fenchel.perm import DegreeMismatch, Perm
from fenchel.signature import Generator, UnknownGenerator, parse_signature, parse_word


def cyc(text, degree=4):
    return Perm.from_cycles(text, degree)


TWO_CYCLES = parse_signature("(0;+;[-];{(3),(3)})")
G = cyc("(1 3 2)")


def two_cycle_images(e1, e2):
    return {
        Generator.from_name("c10"): cyc("(1 2)"),
        Generator.from_name("c11"): cyc("(2 3)"),
        Generator.from_name("e1"): e1,
        Generator.from_name("c20"): cyc("(1 2)"),
        Generator.from_name("c21"): cyc("(1 3)"),
        Generator.from_name("e2"): e2,
    }


def klein_hom():
    sig = parse_signature("(0;+;[-];{(2,2,2)})")
    u, v = cyc("(1 2)(3 4)"), cyc("(1 3)(2 4)")
    return Homomorphism(sig, {"c10": u, "c11": v, "c12": u * v, "c13": u}, fill_identity=True)


def test_missing_and_unknown_images():
    sig = parse_signature("(0;+;[3];{(-)})")
    with pytest.raises(SignatureMismatch):
        Homomorphism(sig, {"x1": cyc("(1 2 3)")})
    with pytest.raises(UnknownGenerator):
        Homomorphism(sig, {"x1": cyc("(1 2 3)"), "x2": cyc("(1 2 3)")}, fill_identity=True)
    with pytest.raises(DegreeMismatch):
        Homomorphism(sig, {"x1": cyc("(1 2 3)"), "c10": cyc("(1 2)"), "e1": Perm.identity(3)})


def test_fill_identity_and_lookup():
    h = klein_hom()
    assert h["e1"].is_identity
    assert h[Generator.from_name("c12")] == cyc("(1 4)(2 3)")
    assert h.index() == 4


def test_relators_and_torsion_pass_for_klein_quotient():
    h = klein_hom()
    assert verify_relators(h).passed
    report = torsion_free_certificate(h)
    assert report.passed
    assert [r.source for r in report.rows][:4] == ["c10", "c11", "c12", "c13"]


def test_failures_are_named():
    sig = parse_signature("(0;+;[-];{(4,2,2)})")
    u, v = cyc("(1 2)(3 4)"), cyc("(1 3)(2 4)")
    h = Homomorphism(sig, {"c10": u, "c11": v, "c12": u * v, "c13": u}, fill_identity=True)
    assert torsion_free_certificate(h).failed == ["c10.c11"]
    assert verify_relators(h).passed


def test_connector_relator_is_checked():
    sig = parse_signature("(0;+;[-];{(2,2,2)})")
    u, v = cyc("(1 2)(3 4)"), cyc("(1 3)(2 4)")
    h = Homomorphism(sig, {"c10": u, "c11": v, "c12": u * v, "c13": v}, fill_identity=True)
    assert verify_relators(h).failed == ["c13=e1.c10.e1^-1"]


def test_witness_must_reverse_orientation():
    h = klein_hom()
    assert check_witness(h, parse_word("c10.c11.c12"))
    assert not check_witness(h, parse_word("c10.c10"))
    assert not check_witness(h, parse_word("c10"))


def test_orientation_homomorphism_always_satisfies_relators():
    for text in ["(0;+;[3];{(2,3),(-)})", "(2;-;[2];{(4)})", "(1;+;[-];{-})"]:
        sig = parse_signature(text)
        assert verify_relators(orientation_homomorphism(sig)).passed


def test_combine_multiplies_images():
    h = klein_hom()
    both = combine([h, orientation_homomorphism(h.signature)])
    assert both.degree == 6
    assert verify_relators(both).passed
    assert both.index() == 8
    assert not check_witness(both, parse_word("c10.c11.c12"))
    with pytest.raises(SignatureMismatch):
        combine([h, orientation_homomorphism(TWO_CYCLES)])


def test_normalize_as_printed():
    result = normalize_convention(TWO_CYCLES, two_cycle_images(G, G.inverse()))
    assert result.variant == AS_PRINTED


def test_normalize_inverts_connectors():
    images = two_cycle_images(G.inverse(), G)
    assert not verify_relators(Homomorphism(TWO_CYCLES, images)).passed
    result = normalize_convention(TWO_CYCLES, images)
    assert result.variant == E_INVERTED
    assert verify_relators(Homomorphism(TWO_CYCLES, result.images)).passed


def test_normalize_gives_up():
    images = two_cycle_images(G, G.inverse())
    images[Generator.from_name("c11")] = cyc("(3 4)")
    assert normalize_convention(TWO_CYCLES, images) is None


def test_normalize_rejects_bad_witness():
    h = klein_hom()
    assert normalize_convention(h.signature, h.images, parse_word("c10.c11.c12")).witness is not None
    assert normalize_convention(h.signature, h.images, parse_word("c10.c11.c10")) is None


def test_induce_from_fuchsian_subgroup():
    sig = parse_signature("(0;+;[3];{(-)})")
    dictionary = kerpsi_dictionary(sig)
    t = Perm.from_cycles("(1 2 3)", 3)
    kappa = Homomorphism(dictionary.kernel_signature, {"x1": t, "x2": t.inverse()})
    h = induce_index2(sig, dictionary, kappa)
    assert h.degree == 6
    assert verify_relators(h).passed
    assert torsion_free_certificate(h).passed
    assert h.index() == 6
    with pytest.raises(SignatureMismatch):
        induce_index2(sig, dictionary, klein_hom())
