import itertools

import pytest

from fenchel.homomorphism import torsion_free_certificate, verify_relators
from fenchel.perm import Perm
from fenchel.search import (
    SearchContext,
    SearchExhausted,
    euclidean_affine_quotient,
    find_full_quotient,
    find_polygon_quotient,
    find_reflection_cycle_quotient,
    reflection_factor,
)
from fenchel.signature import parse_signature


def product(perms):
    result = Perm.identity(perms[0].degree)
    for p in perms:
        result = result * p
    return result


def assert_polygon(periods, images):
    assert [x.order() for x in images] == list(periods)
    assert product(images).is_identity


def assert_cycle(links, images):
    s = len(links)
    assert all(c.order() == 2 for c in images)
    assert [(images[j] * images[(j + 1) % s]).order() for j in range(s)] == list(links)


@pytest.mark.parametrize("periods", [(2, 3, 3), (3, 2, 3), (2, 2, 5), (2, 3, 6), (2, 2, 2, 2), (4, 4, 2)])
def test_structured_polygons(ctx, periods):
    assert_polygon(periods, find_polygon_quotient(periods, ctx))


def test_polygon_needs_three_periods(ctx):
    with pytest.raises(ValueError):
        find_polygon_quotient((2, 3), ctx)


def test_polygon_memoized(ctx):
    first = find_polygon_quotient((2, 2, 5), ctx)
    assert find_polygon_quotient((2, 2, 5), ctx) is first
    assert ("polygon", (2, 2, 5)) in ctx.memo


def test_polygon_exhausted_below_min_degree():
    with pytest.raises(SearchExhausted):
        find_polygon_quotient((2, 3, 7), SearchContext(seed=0, max_degree=4))


@pytest.mark.slow
@pytest.mark.parametrize("periods", [(2, 3, 7), (2, 4, 5), (3, 3, 4)])
def test_hyperbolic_triangle_polygons(ctx, periods):
    assert_polygon(periods, find_polygon_quotient(periods, ctx))


def test_seeded_search_is_reproducible():
    a = find_polygon_quotient((2, 3, 4), SearchContext(seed=11))
    b = find_polygon_quotient((2, 3, 4), SearchContext(seed=11))
    assert a == b


@pytest.mark.parametrize("links", [(2, 2, 2, 2), (2, 2, 2), (3, 3, 3), (3, 2, 3), (5, 5, 5), (4, 4, 4, 4), (2, 2, 7), (7, 2, 2)])
def test_structured_cycles(ctx, links):
    assert_cycle(links, find_reflection_cycle_quotient(links, ctx))


def test_short_cycles(ctx):
    (w,) = find_reflection_cycle_quotient((), ctx)
    assert w.order() == 2
    assert len(find_reflection_cycle_quotient((5,), ctx)) == 1
    with pytest.raises(ValueError):
        find_reflection_cycle_quotient((2, 3), ctx)


@pytest.mark.parametrize("links", [(2, 4, 4), (4, 4, 2), (3, 6, 2)])
def test_euclidean_cycles(ctx, links):
    assert_cycle(links, find_reflection_cycle_quotient(links, ctx))


def test_euclidean_affine_quotient():
    u, v, w = euclidean_affine_quotient((4, 2, 4), 4)
    assert u.degree == 16
    assert ((u * v).order(), (v * w).order(), (w * u).order()) == (2, 4, 4)
    with pytest.raises(ValueError):
        euclidean_affine_quotient((2, 3, 7), 5)
    with pytest.raises(ValueError):
        euclidean_affine_quotient((2, 4, 4), 2)


@pytest.mark.slow
@pytest.mark.parametrize("links", [(2, 3, 7), (3, 4, 5), (2, 3, 3, 3)])
def test_hyperbolic_cycles(ctx, links):
    assert_cycle(links, find_reflection_cycle_quotient(links, ctx))


def test_context_seeds():
    ctx = SearchContext(seed=3)
    assert ctx.rng("polygon", (2, 3)).integers(10**9) == SearchContext(seed=3).rng("polygon", (2, 3)).integers(10**9)
    child = ctx.derive("row", 1)
    assert child.seed != ctx.seed and child.memo == {}
    assert child.seed == ctx.derive("row", 1).seed


def test_context_from_config():
    ctx = SearchContext.from_config({"seed": "5", "max_degree": 10, "workers": 3})
    assert ctx.seed == 5 and ctx.max_degree == 10
    assert ctx.reflection_attempts == 20000


@pytest.mark.parametrize(
    "text",
    [
        "(0;+;[2,2];{(-)})",
        "(0;+;[-];{(2,2,2,2)})",
        "(0;+;[2,2,2];{(-)})",
        "(0;+;[-];{(3),(3)})",
        "(0;+;[2];{(3,3,3),(-)})",
    ],
)
def test_full_quotient(ctx, text):
    sig = parse_signature(text)
    h = find_full_quotient(sig, ctx)
    assert verify_relators(h).passed
    assert torsion_free_certificate(h).passed
    assert find_full_quotient(sig, ctx) is h


def test_full_quotient_needs_genus_zero_cycles(ctx):
    with pytest.raises(ValueError):
        find_full_quotient(parse_signature("(1;+;[2];{(2)})"), ctx)
    with pytest.raises(ValueError):
        find_full_quotient(parse_signature("(0;+;[2,3,7];{-})"), ctx)


def test_single_link_needs_partner(ctx):
    with pytest.raises(ValueError):
        reflection_factor(parse_signature("(0;+;[-];{(3),(3)})"), 1, ctx)


@pytest.mark.slow
@pytest.mark.parametrize("periods", list(itertools.combinations_with_replacement(range(2, 9), 3)))
def test_all_small_triples(ctx, periods):
    assert_polygon(periods, find_polygon_quotient(periods, ctx))
