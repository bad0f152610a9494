"""
Copyright (c) fenchel-nec contributors.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.

Recipes: explicit homomorphisms onto finite groups whose kernels are
torsion-free and contain orientation-reversing elements, keyed by the shape
of the signature. Recipe ids are stable and recorded in every certificate.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple, Union

from fenchel.certificate import Certificate, build_certificate, orientable_surface_kernel
from fenchel.homomorphism import (
    Homomorphism,
    check_witness,
    combine,
    induce_index2,
    normalize_convention,
    torsion_free_certificate,
    verify_relators,
)
from fenchel.kerpsi import c0_conjugate_rewrite, kerpsi_dictionary
from fenchel.perm import FiniteGroupSpec, Perm, PermGroup, direct_product
from fenchel.search import (
    SearchContext,
    cycle_factor,
    find_full_quotient,
    find_polygon_quotient,
    find_reflection_cycle_quotient,
    reflection_factor,
)
from fenchel.signature import (
    ADMISSIBLE_FUCHSIAN,
    CONNECTOR,
    ELLIPTIC,
    GLIDE,
    HYPERBOLIC_A,
    HYPERBOLIC_B,
    NON_HYPERBOLIC,
    REFLECTION,
    Generator,
    NecSignature,
    Word,
    area_mu,
    classify,
    cycle_params,
    parse_signature,
    torsion_part,
    with_cycles,
)

__all__ = [
    "OPEN_TABLE2",
    "NOT_APPLICABLE",
    "RecipeFailure",
    "Recipe",
    "OpenCase",
    "Instance",
    "RECIPES",
    "TABLE1_INSTANCES",
    "TABLE2_OPEN",
    "recipe_for",
    "instantiate",
    "certify",
    "kerpsi_dictionary",
    "c0_conjugate_rewrite",
]

OPEN_TABLE2 = "open_table2"
NOT_APPLICABLE = "not_applicable"


class RecipeFailure(RuntimeError):
    pass


@dataclass
class Construction:
    group: PermGroup
    images: Dict[Generator, Perm]
    witness: Word
    notes: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class Recipe:
    id: str
    summary: str
    build: Callable[[NecSignature, SearchContext], Construction] = field(repr=False, compare=False)


@dataclass(frozen=True)
class OpenCase:
    status: str
    reason: str


@dataclass
class Instance:
    recipe: Recipe
    homomorphism: Homomorphism
    witness: Word
    normalization: str
    notes: List[str]


def _x(i: int) -> Generator:
    return Generator(ELLIPTIC, i)


def _c(i: int, j: int) -> Generator:
    return Generator(REFLECTION, i, j)


def _e(i: int) -> Generator:
    return Generator(CONNECTOR, i)


def _d(i: int) -> Generator:
    return Generator(GLIDE, i)


def _a(i: int) -> Generator:
    return Generator(HYPERBOLIC_A, i)


def _b(i: int) -> Generator:
    return Generator(HYPERBOLIC_B, i)


def _w(*parts: Union[Generator, Tuple[Generator, int]]) -> Word:
    return Word.product(Word.of(p) if isinstance(p, Generator) else Word.of(*p) for p in parts)


def _links(sig: NecSignature, i: int = 1) -> Tuple[int, ...]:
    return sig.cycles[i - 1].links


def _first_even(periods: Tuple[int, ...]) -> Optional[int]:
    return next((t for t, m in enumerate(periods) if m % 2 == 0), None)


def _cycle_images(i: int, s: int, images: Dict[Generator, Perm], reflections, closing: Perm):
    for j, p in enumerate(reflections):
        images[_c(i, j)] = p
    images[_c(i, s)] = closing


# sign '-', no period cycles


def _minus_polygon(sig: NecSignature, ctx: SearchContext) -> Construction:
    polygon = find_polygon_quotient(sig.periods, ctx)
    images = {_x(t + 1): p for t, p in enumerate(polygon)}
    return Construction(PermGroup(polygon), images, _w(_d(1)))


def _minus_two_periods(sig: NecSignature, ctx: SearchContext) -> Construction:
    u, v, _ = find_polygon_quotient(sig.periods + (3,), ctx)
    images = {_x(1): u, _x(2): v, _d(1): u * v}
    return Construction(PermGroup([u, v]), images, _w((_d(1), 3)))


def _minus_one_period(sig: NecSignature, ctx: SearchContext) -> Construction:
    u, v, _ = find_polygon_quotient((3, 3) + sig.periods, ctx)
    images = {_d(1): u, _d(2): v, _x(1): v * u}
    return Construction(PermGroup([u, v]), images, _w((_d(1), 3)))


def _minus_no_periods(sig: NecSignature, ctx: SearchContext) -> Construction:
    spec = FiniteGroupSpec.cyclic(3)
    u = spec["w"]
    return Construction(spec.group, {_d(1): u, _d(2): u.inverse()}, _w(_d(3)))


# sign '-', one period cycle


def _minus_empty_cycle(sig: NecSignature, ctx: SearchContext) -> Construction:
    spec = FiniteGroupSpec.cyclic(2)
    return Construction(spec.group, {_c(1, 0): spec["w"]}, _w(_d(1)))


def _minus_induced(sig: NecSignature, ctx: SearchContext) -> Construction:
    dictionary = kerpsi_dictionary(sig)
    kernel = dictionary.kernel_signature
    inner = recipe_for(kernel)
    if isinstance(inner, OpenCase):
        raise RecipeFailure(f"no recipe for the ker psi signature {kernel}: {inner.reason}")
    kappa = instantiate(inner, kernel, ctx)
    conjugate = c0_conjugate_rewrite(dictionary, kappa.witness)
    if not kappa.homomorphism.evaluate(conjugate).is_identity:
        raise RecipeFailure(f"c0-conjugate {conjugate} of the kernel witness survives {inner.id}")
    h = induce_index2(sig, dictionary, kappa.homomorphism)
    notes = [f"ker psi signature {kernel} via {inner.id}", f"kernel witness {kappa.witness}"]
    return Construction(h.target, h.images, dictionary.expand(kappa.witness), notes)


# sign '-', two or more period cycles


def _minus_two_empty(sig: NecSignature, ctx: SearchContext) -> Construction:
    spec = FiniteGroupSpec.cyclic(2)
    u = spec["w"]
    return Construction(spec.group, {_c(1, 0): u, _c(2, 0): u}, _w(_d(1)))


def _minus_torsion_part(sig: NecSignature, ctx: SearchContext) -> Construction:
    h0 = find_full_quotient(torsion_part(sig), ctx)
    group = h0.target or h0.image_group()
    return Construction(group, dict(h0.images), _w(_d(1)), [f"torsion part {torsion_part(sig)}"])


# sign '+', positive genus


def _plus_torsion_part(sig: NecSignature, ctx: SearchContext) -> Construction:
    h0 = find_full_quotient(torsion_part(sig), ctx)
    images = dict(h0.images)
    images[_a(1)] = h0[_c(1, 0)]
    group = h0.target or h0.image_group()
    return Construction(group, images, _w(_a(1), _c(1, 0)), [f"torsion part {torsion_part(sig)}"])


def _shape(gamma0: NecSignature) -> Optional[str]:
    """Letter of the non-hyperbolic torsion-part shape, if any."""
    m = gamma0.periods
    cycles = [c.links for c in gamma0.cycles]
    if len(cycles) == 2:
        return "a" if not m and cycles == [(), ()] else None
    if len(cycles) != 1:
        return None
    links = cycles[0]
    shapes = [
        ("b", m == (2, 2) and links == ()),
        ("c", m == (2,) and links == (2, 2)),
        ("d", m == (2,) and len(links) == 1),
        ("e", m == (3,) and links == (3,)),
        ("f", m == (3,) and links == (2,)),
        ("g", m == (4,) and links == (2,)),
        ("h", len(m) == 1 and links == ()),
        ("i", not m and links == (2, 2, 2, 2)),
        ("j", not m and len(links) == 3 and sum(Fraction(1, n) for n in links) >= 1),
        ("k", not m and links == ()),
        ("l", not m and len(links) == 2),
        ("m", not m and len(links) == 1),
    ]
    return next((letter for letter, hit in shapes if hit), None)


def _plus(spec_group: PermGroup, images: Dict[Generator, Perm], u: Perm, notes=None) -> Construction:
    images[_a(1)] = u
    images[_c(1, 0)] = u
    return Construction(spec_group, images, _w(_a(1), _c(1, 0)), list(notes or []))


def _shape_a(sig, ctx):
    spec = FiniteGroupSpec.cyclic(2)
    u = spec["w"]
    return _plus(spec.group, {_c(2, 0): u}, u)


def _shape_b(sig, ctx):
    spec = FiniteGroupSpec.klein_four()
    u, v = spec["u"], spec["v"]
    return _plus(spec.group, {_x(1): v, _x(2): u, _e(1): u * v}, u)


def _shape_c(sig, ctx):
    spec = FiniteGroupSpec.klein_four()
    u, v = spec["u"], spec["v"]
    return _plus(spec.group, {_x(1): u, _e(1): u, _c(1, 1): v, _c(1, 2): u}, u)


def _shape_d(sig, ctx):
    (n,) = _links(sig)
    spec = FiniteGroupSpec.dihedral(2 * n)
    u, v = spec["u"], spec["v"]
    return _plus(spec.group, {_x(1): v, _e(1): v, _c(1, 1): v * u * v}, u)


def _s4_pair() -> Tuple[PermGroup, Perm, Perm]:
    u = Perm.from_cycles("(1 2)", 4)
    v = Perm.from_cycles("(2 3 4)", 4)
    return PermGroup([u, v]), u, v


def _shape_e(sig, ctx):
    group, u, v = _s4_pair()
    images = {_x(1): v.inverse(), _e(1): v, _c(1, 1): u.conjugate(v)}
    return _plus(group, images, u, ["S4 with u = (1 2), v = (2 3 4)"])


def _shape_f(sig, ctx):
    v = Perm.from_cycles("(1 2 3)", 4)
    u = Perm.from_cycles("(1 2)(3 4)", 4)
    images = {_x(1): v.inverse(), _e(1): v, _c(1, 1): u.conjugate(v)}
    return _plus(PermGroup([u, v]), images, u, ["A4 with u = (1 2)(3 4), v = (1 2 3)"])


def _shape_g(sig, ctx):
    spec = FiniteGroupSpec.dihedral(4)
    u, rho = spec["u"], spec["rho"]
    return _plus(spec.group, {_x(1): rho.inverse(), _e(1): rho, _c(1, 1): u * rho**2}, u)


def _shape_h(sig, ctx):
    spec, _ = FiniteGroupSpec.product([FiniteGroupSpec.cyclic(2), FiniteGroupSpec.cyclic(sig.periods[0])])
    w = spec["w1"]
    return _plus(spec.group, {_x(1): w, _e(1): w.inverse()}, spec["w0"])


def _shape_i(sig, ctx):
    spec = FiniteGroupSpec.klein_four()
    u, v = spec["u"], spec["v"]
    images = {_c(1, j): (u if j % 2 == 0 else v) for j in range(1, 5)}
    return _plus(spec.group, images, u)


def _shape_j(sig, ctx):
    reflections = find_reflection_cycle_quotient(_links(sig), ctx)
    images: Dict[Generator, Perm] = {}
    _cycle_images(1, 3, images, reflections, reflections[0])
    return _plus(PermGroup(reflections), images, reflections[0])


def _shape_k(sig, ctx):
    spec = FiniteGroupSpec.cyclic(2)
    return _plus(spec.group, {}, spec["w"])


def _shape_l(sig, ctx):
    n1, n2 = _links(sig)
    spec = FiniteGroupSpec.dihedral(4 * n1 * n2)
    u, rho = spec["u"], spec["rho"]
    images = {
        _b(1): rho ** (n2 - n1),
        _e(1): rho ** (2 * (n1 - n2)),
        _c(1, 1): u * rho ** (4 * n2),
        _c(1, 2): rho ** (4 * (n1 - n2)) * u,
    }
    return _plus(spec.group, images, u)


def _shape_m(sig, ctx):
    (n,) = _links(sig)
    spec = FiniteGroupSpec.dihedral(4 * n)
    u, rho = spec["u"], spec["rho"]
    return _plus(spec.group, {_b(1): rho, _e(1): rho ** -2, _c(1, 1): u * rho**4}, u)


# sign '+', genus 0, at least two anchoring cycles


def _pipeline(sig: NecSignature, ctx: SearchContext) -> Construction:
    anchors = [i for i, cycle in enumerate(sig.cycles, 1) if cycle.s == 0 or cycle.s >= 3]
    p, q = anchors[:2]
    s_p = sig.cycles[p - 1].s
    reflections = find_reflection_cycle_quotient(_links(sig, p), ctx)
    c0 = reflections[0]
    j_group = PermGroup(reflections)

    first: Dict[Generator, Perm] = {_e(p): c0, _e(q): c0}
    _cycle_images(p, s_p, first, reflections, c0)
    factors = [Homomorphism(sig, first, degree=j_group.degree, target=j_group, fill_identity=True)]
    factors.append(reflection_factor(sig, q, ctx))
    factors += [cycle_factor(sig, i, ctx, partner=q) for i in range(1, sig.k + 1) if i not in (p, q)]

    notes = [f"anchoring cycles {p} and {q}"]
    r = sig.r
    if r >= 3:
        polygon = find_polygon_quotient(sig.periods, ctx)
        images = {_x(t + 1): x for t, x in enumerate(polygon)}
        group = PermGroup(polygon)
        factors.append(Homomorphism(sig, images, degree=group.degree, target=group, fill_identity=True))
    elif r > 0:
        if r == 2:
            x1, x2, x3 = find_polygon_quotient(sig.periods + (2,), ctx)
            heads, closing = [x1, x2], x3
        else:
            spec = FiniteGroupSpec.dihedral(sig.periods[0])
            u, v = spec["u"], spec["v"]
            heads, closing = [u * v], v * u
        prod = direct_product([PermGroup(heads + [closing]), j_group])
        one_h = Perm.identity(heads[0].degree)
        one_j = Perm.identity(j_group.degree)
        images = {_x(t + 1): prod.element([x, one_j]) for t, x in enumerate(heads)}
        images[_e(p)] = prod.element([one_h, c0])
        images[_e(q)] = prod.element([closing, c0])
        _cycle_images(p, s_p, images, [prod.element([one_h, c]) for c in reflections], prod.element([one_h, c0]))
        factors.append(Homomorphism(sig, images, degree=prod.degree, target=prod.group, fill_identity=True))
        notes.append(f"proper periods carried by a factor with {r} period(s)")
    h = combine(factors)
    return Construction(h.target, h.images, _w(_c(p, 0), _e(p)), notes)


# sign '+', genus 0, one period cycle


def _table1_case1(sig, ctx):
    polygon = find_polygon_quotient(sig.periods + (2,), ctx)
    closing = polygon[-1]
    images = {_x(t + 1): x for t, x in enumerate(polygon[:-1])}
    images[_e(1)] = closing
    images[_c(1, 0)] = closing
    return Construction(PermGroup(polygon), images, _w(_e(1), _c(1, 0)))


def _table1_case2(sig, ctx):
    (n,) = _links(sig)
    r, h = sig.r, (n + 1) // 2
    if r % 2 == 0:
        spec = FiniteGroupSpec.dihedral(n)
        u, v, rho = spec["u"], spec["v"], spec["rho"]
        xs = [u] * (r - 1) + [u * rho**h]
        e1, c10, c11 = rho**h, u, v
    else:
        spec, _ = FiniteGroupSpec.product([FiniteGroupSpec.dihedral(n), FiniteGroupSpec.cyclic(2)])
        u, v, rho, t = spec["u0"], spec["v0"], spec["rho0"], spec["w1"]
        xs = [u] * (r - 2) + [u * rho**h, t]
        e1, c10, c11 = rho**h * t, u, v
    images = {_x(i + 1): x for i, x in enumerate(xs)}
    images.update({_e(1): e1, _c(1, 0): c10, _c(1, 1): c11})
    notes = ["extra C2 factor for an odd number of periods"] if r % 2 else []
    return Construction(spec.group, images, _w(_x(1), _c(1, 0)), notes)


def _table1_case3(sig, ctx):
    if sig.r == 1:
        x1, x2, x3 = find_polygon_quotient((2, sig.periods[0], 3), ctx)
        cyc = FiniteGroupSpec.cyclic(2)
        prod = direct_product([PermGroup([x1, x2, x3]), cyc.group])
        one_h, one_c = Perm.identity(x1.degree), cyc.identity()
        lift = lambda p: prod.element([p, one_c])  # noqa: E731
        images = {
            _x(1): lift(x2),
            _e(1): lift(x2.inverse()),
            _c(1, 0): lift(x1),
            _c(1, 1): prod.element([one_h, cyc["w"]]),
            _c(1, 2): lift(x1.conjugate(x2)),
        }
        witness = _w(_c(1, 0), (_e(1), -1)) ** 3
        return Construction(prod.group, images, witness, ["r = 1 via a (2, m, 3) quotient"])
    polygon = find_polygon_quotient(sig.periods + (2,), ctx)
    cyc = FiniteGroupSpec.cyclic(2)
    prod = direct_product([PermGroup(polygon), cyc.group])
    one_c = cyc.identity()
    images = {_x(t + 1): prod.element([x, one_c]) for t, x in enumerate(polygon[:-1])}
    closing = prod.element([polygon[-1], one_c])
    u = prod.element([Perm.identity(polygon[0].degree), cyc["w"]])
    images.update({_e(1): closing, _c(1, 1): closing, _c(1, 0): u, _c(1, 2): u})
    return Construction(prod.group, images, _w(_e(1), _c(1, 1)))


def _table1_case4(sig, ctx):
    (n, _) = _links(sig)
    t = _first_even(sig.periods)
    polygon = find_polygon_quotient(sig.periods, ctx)
    spec = FiniteGroupSpec.dihedral(n)
    prod = direct_product([PermGroup(polygon), spec.group])
    one_h, one_d = Perm.identity(polygon[0].degree), spec.identity()
    u = prod.element([one_h, spec["u"]])
    images = {_x(i + 1): prod.element([x, one_d]) for i, x in enumerate(polygon)}
    images[_x(t + 1)] = prod.element([polygon[t], spec["u"]])
    images.update({_e(1): u, _c(1, 0): u, _c(1, 1): prod.element([one_h, spec["v"]]), _c(1, 2): u})
    return Construction(prod.group, images, _w(_e(1), _c(1, 0)), [f"even period at x{t + 1}"])


def _table1_case5(sig, ctx):
    s = sig.cycles[0].s
    polygon = find_polygon_quotient(sig.periods + (2,), ctx)
    reflections = find_reflection_cycle_quotient(_links(sig), ctx)
    prod = direct_product([PermGroup(polygon), PermGroup(reflections)])
    one_h, one_j = Perm.identity(polygon[0].degree), Perm.identity(reflections[0].degree)
    images = {_x(t + 1): prod.element([x, one_j]) for t, x in enumerate(polygon[:-1])}
    closing = prod.element([polygon[-1], one_j])
    j_part = [prod.element([one_h, c]) for c in reflections]
    _cycle_images(1, s, images, j_part, j_part[0])
    images[_c(1, 1)] = closing
    images[_e(1)] = closing
    return Construction(prod.group, images, _w(_e(1), _c(1, 1)))


def _string_of_involutions(sig, ctx) -> Tuple[PermGroup, Dict[Generator, Perm]]:
    """c10 = c1s = C1, c11 = C1 C2, c1i = C_i from involutions with links (2, n3, ..., ns)."""
    links = _links(sig)
    s = len(links)
    involutions = find_reflection_cycle_quotient((2,) + links[2:], ctx)
    C = {i + 1: p for i, p in enumerate(involutions)}
    images = {_c(1, i): C[i] for i in range(2, s)}
    images.update({_c(1, 0): C[1], _c(1, s): C[1], _c(1, 1): C[1] * C[2]})
    return PermGroup(involutions), images


def _table1_case6(sig, ctx):
    group, images = _string_of_involutions(sig, ctx)
    return Construction(group, images, _w(_c(1, 0), _c(1, 1), _c(1, 2)))


def _table1_case7(sig, ctx):
    m = sig.periods[0]
    n3 = _links(sig)[2]
    spec, _ = FiniteGroupSpec.product([FiniteGroupSpec.dihedral(n3), FiniteGroupSpec.cyclic(m)])
    u, v, rho, w = spec["u0"], spec["v0"], spec["rho0"], spec["w1"]
    images = {_x(1): w, _e(1): w.inverse(), _c(1, 0): u, _c(1, 3): u, _c(1, 2): v}
    if m % 2 == 0:
        images[_c(1, 1)] = w ** (m // 2)
        witness = _w((_e(1), m // 2), _c(1, 1))
        note = "branch: m even"
    elif n3 % 2 == 0:
        images[_c(1, 1)] = rho ** (n3 // 2)
        witness = _w(_c(1, 0), _c(1, 2)) ** (n3 // 2) * _w(_c(1, 1))
        note = "branch: n3 even"
    else:
        raise RecipeFailure(f"{sig}: m and n3 both odd")
    return Construction(spec.group, images, witness, [note])


def _table1_case8(sig, ctx):
    group, inner = _string_of_involutions(sig, ctx)
    cyc = FiniteGroupSpec.cyclic(sig.periods[0])
    prod = direct_product([group, cyc.group])
    one_h, one_c = Perm.identity(group.degree), cyc.identity()
    images = {gen: prod.element([p, one_c]) for gen, p in inner.items()}
    images[_x(1)] = prod.element([one_h, cyc["w"]])
    images[_e(1)] = prod.element([one_h, cyc["w"].inverse()])
    return Construction(prod.group, images, _w(_c(1, 0), _c(1, 1), _c(1, 2)))


def _table1_case9(sig, ctx):
    s = sig.cycles[0].s
    t = _first_even(sig.periods)
    polygon = find_polygon_quotient(sig.periods + (2,), ctx)
    reflections = find_reflection_cycle_quotient(_links(sig), ctx)
    prod = direct_product([PermGroup(polygon), PermGroup(reflections)])
    one_j = Perm.identity(reflections[0].degree)
    closing, c0 = polygon[-1], reflections[0]
    images = {_x(i + 1): prod.element([x, one_j]) for i, x in enumerate(polygon[:-1])}
    images[_x(t + 1)] = prod.element([polygon[t], c0])
    images[_e(1)] = prod.element([closing, c0])
    j_part = [prod.element([closing, c]) for c in reflections]
    _cycle_images(1, s, images, j_part, j_part[0])
    return Construction(prod.group, images, _w(_e(1), _c(1, 0)), [f"even period at x{t + 1}"])


def _table1_case10(sig, ctx):
    s = sig.cycles[0].s
    m = sig.periods[0]
    reflections = find_reflection_cycle_quotient(_links(sig), ctx)
    cyc = FiniteGroupSpec.cyclic(m)
    prod = direct_product([cyc.group, PermGroup(reflections)])
    w, c0 = cyc["w"], reflections[0]
    x1 = prod.element([w, c0])
    images = {_x(1): x1, _e(1): x1.inverse()}
    half = w ** (m // 2)
    j_part = [prod.element([half, c]) for c in reflections]
    _cycle_images(1, s, images, j_part, j_part[0])
    return Construction(prod.group, images, _w((_e(1), m // 2), _c(1, 0)))


def _recipes() -> Dict[str, Recipe]:
    rows = [
        ("4.2/r≥3", "sign '-', no cycles, r >= 3: polygon quotient, d_i -> 1", _minus_polygon),
        ("4.2/r=2", "sign '-', no cycles, r = 2: [m1, m2, 3] quotient, d1 -> uv", _minus_two_periods),
        ("4.2/r=1", "sign '-', no cycles, r = 1: [3, 3, m] quotient, d1 -> u, d2 -> v", _minus_one_period),
        ("4.2/r=0", "sign '-', no cycles, no periods: C3 with d1 -> u, d2 -> u^-1", _minus_no_periods),
        ("4.3/r=s=0", "sign '-', one empty cycle, no periods: C2 via c10", _minus_empty_cycle),
        ("4.3/induced", "sign '-', one cycle: induced from the ker psi subgroup", _minus_induced),
        ("4.4/k=2-empty", "sign '-', two empty cycles, no periods: C2", _minus_two_empty),
        ("4.4/torsion-part", "sign '-', k >= 2: quotient of the torsion part, d_i -> 1", _minus_torsion_part),
        ("4.5/torsion-part", "sign '+', g > 0, hyperbolic torsion part: a1 -> image of c10", _plus_torsion_part),
        ("4.5/a", "torsion part {(-),(-)}: C2", _shape_a),
        ("4.5/b", "torsion part [2,2]{(-)}: C2 x C2", _shape_b),
        ("4.5/c", "torsion part [2]{(2,2)}: C2 x C2", _shape_c),
        ("4.5/d", "torsion part [2]{(n)}: D_2n", _shape_d),
        ("4.5/e", "torsion part [3]{(3)}: S4", _shape_e),
        ("4.5/f", "torsion part [3]{(2)}: A4", _shape_f),
        ("4.5/g", "torsion part [4]{(2)}: D4", _shape_g),
        ("4.5/h", "torsion part [m]{(-)}: C2 x Cm", _shape_h),
        ("4.5/i", "torsion part {(2,2,2,2)}: C2 x C2", _shape_i),
        ("4.5/j", "torsion part {(n1,n2,n3)}, non-hyperbolic triangle: reflection quotient", _shape_j),
        ("4.5/k", "torsion part {(-)}: C2", _shape_k),
        ("4.5/l", "torsion part {(n1,n2)}: D_4n1n2", _shape_l),
        ("4.5/m", "torsion part {(n)}: D_4n", _shape_m),
        ("4.6/pipeline", "g = 0, sign '+', k0 + k3 >= 2: product over cycles", _pipeline),
        ("T1/1", "s = 0: [m1, ..., mr, 2] quotient", _table1_case1),
        ("T1/2", "s = 1, periods all 2, n odd: D_n", _table1_case2),
        ("T1/3", "s = 2, links (2, 2)", _table1_case3),
        ("T1/4", "s = 2, links (n, n), r >= 3 with an even period: H x D_n", _table1_case4),
        ("T1/5", "links (2, 2, ...), s >= 3, r >= 2: H x J", _table1_case5),
        ("T1/6", "links (2, 2, ...), s >= 4, r = 0", _table1_case6),
        ("T1/7", "links (2, 2, n3), r = 1, m or n3 even: D_n3 x C_m", _table1_case7),
        ("T1/8", "links (2, 2, ...), s >= 4, r = 1", _table1_case8),
        ("T1/9", "s >= 3, r >= 2 with an even period: H x J", _table1_case9),
        ("T1/10", "s >= 3, r = 1, m = 2 mod 4: C_m x J", _table1_case10),
    ]
    return {rid: Recipe(rid, summary, build) for rid, summary, build in rows}


RECIPES = _recipes()


def _cycle_rotation(links: Tuple[int, ...]) -> int:
    """Start of the lexicographically least rotation; it opens with (2, 2) whenever two 2s are adjacent."""
    if not links:
        return 0
    return min(range(len(links)), key=lambda t: links[t:] + links[:t])


def _rotated(sig: NecSignature, t: int) -> NecSignature:
    links = _links(sig)
    return with_cycles(sig, [links[t:] + links[:t]])


def _table1(sig: NecSignature) -> Union[str, OpenCase]:
    links = _links(_rotated(sig, _cycle_rotation(_links(sig))))
    s, r, m = len(links), sig.r, sig.periods
    starts_22 = links[:2] == (2, 2)
    even = _first_even(m) is not None
    if s == 0:
        return "T1/1"
    if s == 1 and all(p == 2 for p in m) and links[0] % 2 == 1 and links[0] > 2:
        return "T1/2"
    if links == (2, 2):
        return "T1/3"
    if s == 2 and links[0] == links[1] and r >= 3 and even:
        return "T1/4"
    if s >= 3 and starts_22 and r >= 2:
        return "T1/5"
    if s >= 4 and starts_22 and r == 0:
        return "T1/6"
    if s == 3 and starts_22 and r == 1 and (m[0] % 2 == 0 or links[2] % 2 == 0):
        return "T1/7"
    if s >= 4 and starts_22 and r == 1:
        return "T1/8"
    if s >= 3 and r >= 2 and even:
        return "T1/9"
    if s >= 3 and r == 1 and m[0] % 4 == 2:
        return "T1/10"
    return OpenCase(OPEN_TABLE2, f"g = 0, k = 1 with r = {r}, links {links}: no construction known")


def _dispatch(sig: NecSignature) -> Union[str, OpenCase]:
    if not sig.is_plus:
        if sig.k == 0:
            return {0: "4.2/r=0", 1: "4.2/r=1", 2: "4.2/r=2"}.get(sig.r, "4.2/r≥3")
        if sig.k == 1:
            return "4.3/r=s=0" if sig.r == 0 and sig.cycles[0].s == 0 else "4.3/induced"
        if sig.k == 2 and sig.r == 0 and all(c.s == 0 for c in sig.cycles):
            return "4.4/k=2-empty"
        return "4.4/torsion-part"
    if sig.genus > 0:
        if area_mu(sig) > 2 * sig.genus:
            return "4.5/torsion-part"
        letter = _shape(torsion_part(sig))
        return f"4.5/{letter}" if letter else "4.5/torsion-part"
    if sig.k >= 2:
        params = cycle_params(sig)
        if params.k0 + params.k3 >= 2:
            return "4.6/pipeline"
        return OpenCase(OPEN_TABLE2, f"g = 0, k = {sig.k} with k0 + k3 = {params.k0 + params.k3} <= 1")
    return _table1(sig)


def recipe_for(sig: NecSignature) -> Union[Recipe, OpenCase]:
    """
    The most specific recipe for an admissible proper NEC signature.

    Returns:
        Recipe or OpenCase: ``OpenCase`` with status ``open_table2`` for shapes
        with no known construction, ``not_applicable`` for Fuchsian and
        non-hyperbolic signatures.
    """
    kind = classify(sig)
    if kind == NON_HYPERBOLIC:
        return OpenCase(NOT_APPLICABLE, f"area {area_mu(sig)} is not positive")
    if kind == ADMISSIBLE_FUCHSIAN:
        return OpenCase(NOT_APPLICABLE, "Fuchsian: sign '+' and no period cycles")
    found = _dispatch(sig)
    if isinstance(found, OpenCase):
        return found
    return RECIPES[found]


def _unrotate(inner: Instance, sig: NecSignature, t: int) -> Instance:
    """
    Carry an instance built on the cycle read from link t + 1 back to ``sig``.

    The rotated reflections are c'_j = c_{j+t}, with c_{j+s} = e c_j e^-1, so
    c_k for k < t is recovered as e^-1 c'_{k+s-t} e.
    """
    s = sig.cycles[0].s
    h = inner.homomorphism
    e = h[_e(1)]
    images = {g: p for g, p in h.images.items() if g.kind != REFLECTION}
    for k in range(s + 1):
        images[_c(1, k)] = h[_c(1, k - t)] if k >= t else h[_c(1, k + s - t)].conjugate(e)

    def shifted(j: int) -> Word:
        if j + t <= s:
            return _w(_c(1, j + t))
        return _w(_e(1), _c(1, j + t - s), (_e(1), -1))

    parts = []
    for gen, step in inner.witness.expand():
        part = shifted(gen.j) if gen.kind == REFLECTION else _w(gen)
        parts.append(part if step > 0 else part.inverse())
    witness = Word.product(parts)
    back = Homomorphism(sig, images, degree=h.degree, target=h.target)
    failed = verify_relators(back).failed + torsion_free_certificate(back).failed
    if failed or not check_witness(back, witness):
        raise RecipeFailure(f"{inner.recipe.id} on {sig}: rotation by {t} breaks {', '.join(failed) or 'the witness'}")
    notes = inner.notes + [f"cycle read from link {t + 1}"]
    return Instance(inner.recipe, back, witness, inner.normalization, notes)


def instantiate(rec: Recipe, sig: NecSignature, ctx: SearchContext) -> Instance:
    """
    Build the homomorphism and witness of ``rec`` for ``sig`` and check them.

    Raises:
        RecipeFailure: If no convention reading satisfies every relator and the
            witness, or a torsion row is not exact.
        SearchExhausted: If a quotient search inside the recipe fails.
    """
    if rec.id.startswith("T1/"):
        t = _cycle_rotation(_links(sig))
        if t:
            return _unrotate(instantiate(rec, _rotated(sig, t), ctx), sig, t)
    built = rec.build(sig, ctx)
    gens = sig.generators()
    unknown = set(built.images) - set(gens)
    if unknown:
        raise RecipeFailure(f"{rec.id} assigns images to {sorted(g.name for g in unknown)} outside {sig}")
    degree = built.group.degree
    identity = Perm.identity(degree)
    images = {g: built.images.get(g, identity) for g in gens}
    normalized = normalize_convention(sig, images, built.witness, degree=degree)
    if normalized is None:
        failed = verify_relators(Homomorphism(sig, images, degree=degree)).failed or ["witness " + str(built.witness)]
        raise RecipeFailure(f"{rec.id} on {sig}: {', '.join(failed)} fails in every convention")
    h = Homomorphism(sig, normalized.images, degree=degree, target=built.group)
    torsion = torsion_free_certificate(h)
    if not torsion:
        raise RecipeFailure(f"{rec.id} on {sig}: torsion rows {', '.join(torsion.failed)} are not exact")
    logging.debug("%s on %s: degree %d, %s", rec.id, sig, degree, normalized.variant)
    return Instance(rec, h, normalized.witness, normalized.variant, built.notes)


def certify(sig: NecSignature, ctx: SearchContext, orientable: bool = False) -> Union[Certificate, OpenCase]:
    """
    Certificate for ``sig``, or the reason none is produced.

    With ``orientable`` the recipe's map is joined with the orientation
    character and the certificate is of the orientable kind.
    """
    rec = recipe_for(sig)
    if isinstance(rec, OpenCase):
        return rec
    inst = instantiate(rec, sig, ctx)
    if orientable:
        return orientable_surface_kernel(inst.homomorphism, notes=[f"base recipe {rec.id}"] + inst.notes)
    return build_certificate(inst.homomorphism, rec.id, inst.witness, inst.normalization, inst.notes)


# smallest admissible instance of each T1 recipe
TABLE1_INSTANCES = [
    ("T1/1", parse_signature("(0;+;[2,3];{(-)})")),
    ("T1/2", parse_signature("(0;+;[2,2];{(5)})")),
    ("T1/3", parse_signature("(0;+;[3];{(2,2)})")),
    ("T1/3", parse_signature("(0;+;[2,3];{(2,2)})")),
    ("T1/4", parse_signature("(0;+;[2,2,2];{(3,3)})")),
    ("T1/5", parse_signature("(0;+;[2,3];{(2,2,2)})")),
    ("T1/6", parse_signature("(0;+;[-];{(2,2,2,3)})")),
    ("T1/7", parse_signature("(0;+;[4];{(2,2,3)})")),
    ("T1/7", parse_signature("(0;+;[3];{(2,2,4)})")),
    ("T1/8", parse_signature("(0;+;[2];{(2,2,2,2)})")),
    ("T1/9", parse_signature("(0;+;[2,3];{(3,3,3)})")),
    ("T1/10", parse_signature("(0;+;[6];{(3,3,3)})")),
]

# one admissible representative per unresolved row
TABLE2_OPEN = [
    ("s = 1, periods not all 2 or n even", parse_signature("(0;+;[3,3];{(2)})")),
    ("s = 2, n1 != n2", parse_signature("(0;+;[2,3];{(2,3)})")),
    ("s = 2, (n, n) with n > 2, r = 1 or 2 or all periods odd", parse_signature("(0;+;[3];{(3,3)})")),
    ("s = 3, all links > 2, r = 0", parse_signature("(0;+;[-];{(3,4,5)})")),
    ("s = 3, (2, 2, n3) with n3 odd, r = 1 with m odd", parse_signature("(0;+;[3];{(2,2,3)})")),
    ("s >= 3, no two adjacent links equal to 2", parse_signature("(0;+;[-];{(2,3,7)})")),
    ("s >= 3, r = 1 with m != 2 mod 4", parse_signature("(0;+;[4];{(3,3,3)})")),
    ("s >= 3, r >= 2 with all periods odd", parse_signature("(0;+;[3,3];{(3,3,3)})")),
]
