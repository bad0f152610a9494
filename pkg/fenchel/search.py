"""
Copyright (c) fenchel-nec contributors.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.

Bounded, seeded search for finite quotients with exact element orders.

Every request tries the shipped lookup table first, then structured families,
then seeded random search. Results are re-verified with exact element orders
before they are returned and memoized on the search context.
"""
import hashlib
import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import permutations
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import orjson
from sympy import divisors, factorint

from fenchel.homomorphism import (
    Homomorphism,
    combine,
    induce_index2,
    torsion_free_certificate,
    verify_relators,
)
from fenchel.kerpsi import kerpsi_dictionary
from fenchel.perm import FiniteGroupSpec, Perm, PermGroup, RelationViolation, wreath_c2
from fenchel.signature import (
    CONNECTOR,
    ELLIPTIC,
    REFLECTION,
    Generator,
    NecSignature,
    fuchsian_double,
    render_signature,
)

logger = logging.getLogger()

LOOKUP_PATH = Path(__file__).parent / "data" / "lookup.json"
BATCH = 200
INVOLUTION_TRIES = 64

# (matrix, shift) of three affine reflections of (Z/N)^2. Keyed by the orders
# of (uv, vw, wu).
EUCLIDEAN_MAPS = {
    (2, 4, 4): {
        "u": ([[-1, 0], [0, 1]], [2, 0]),
        "v": ([[1, 0], [0, -1]], [0, 0]),
        "w": ([[0, 1], [1, 0]], [0, 0]),
    },
    (3, 3, 3): {
        "u": ([[1, -1], [0, -1]], [0, 0]),
        "v": ([[0, 1], [1, 0]], [0, 0]),
        "w": ([[-1, 0], [-1, 1]], [2, 1]),
    },
    (2, 3, 6): {
        "u": ([[1, 0], [1, -1]], [0, 0]),
        "v": ([[-1, 0], [-1, 1]], [2, 1]),
        "w": ([[0, 1], [1, 0]], [0, 0]),
    },
}


class SearchExhausted(RuntimeError):
    pass


class OrderCollapse(ValueError):
    pass


@lru_cache(maxsize=None)
def load_lookup(path: Optional[str] = None) -> Dict[str, Any]:
    """Known small solutions, keyed by table ("polygon", "cycle", "full")."""
    return orjson.loads(Path(path or LOOKUP_PATH).read_bytes())


@dataclass
class SearchContext:
    """
    Bounds and seed for one search session.

    Args:
        seed: Root seed; every request derives its own generator from it.
        max_degree: Largest permutation degree tried by random search.
        max_attempts: Total random tries per polygon request.
        reflection_attempts: Total random tries per reflection-cycle request.
        euclid_modulus: First modulus N for the Euclidean affine families.
        euclid_modulus_max: Last modulus tried before giving up on them.
        lookup: Table of known small solutions.
        memo: Answers already computed under this context.
    """

    seed: int = 0
    max_degree: int = 16
    max_attempts: int = 10**6
    reflection_attempts: int = 20000
    euclid_modulus: int = 4
    euclid_modulus_max: int = 12
    lookup: Dict[str, Any] = field(default_factory=load_lookup, repr=False)
    memo: Dict[tuple, Any] = field(default_factory=dict, repr=False)

    @classmethod
    def from_config(cls, config) -> "SearchContext":
        kwargs = {}
        for name in (
            "seed",
            "max_degree",
            "max_attempts",
            "reflection_attempts",
            "euclid_modulus",
            "euclid_modulus_max",
        ):
            value = config.get(name)
            if value is not None:
                kwargs[name] = int(value)
        if config.get("lookup"):
            kwargs["lookup"] = load_lookup(str(config.get("lookup")))
        return cls(**kwargs)

    def _digest(self, *key) -> int:
        h = hashlib.blake2b(repr((self.seed,) + key).encode(), digest_size=8)
        return int.from_bytes(h.digest(), "big")

    def rng(self, *key) -> np.random.Generator:
        """Generator that depends only on the seed and ``key``, not on call order."""
        return np.random.default_rng(self._digest(*key))

    def derive(self, *key) -> "SearchContext":
        """Child context for a worker or a batch row."""
        return replace(self, seed=self._digest(*key), memo={})


def _unrotate(sol: Sequence[Perm], k: int) -> Tuple[Perm, ...]:
    sol = tuple(sol)
    if not k:
        return sol
    return sol[-k:] + sol[:-k]


def _product(perms: Sequence[Perm]) -> Perm:
    result = Perm.identity(perms[0].degree)
    for p in perms:
        result = result * p
    return result


def _polygon_holds(periods: Sequence[int], images: Sequence[Perm]) -> bool:
    if len(images) != len(periods):
        return False
    if any(p.order() != m for p, m in zip(images, periods)):
        return False
    return _product(images).is_identity


def _cycle_holds(links: Sequence[int], images: Sequence[Perm]) -> bool:
    s = len(links)
    if len(images) != s or any(c.order() != 2 for c in images):
        return False
    return all((images[j - 1] * images[j % s]).order() == links[j - 1] for j in range(1, s + 1))


def _from_lookup(
    ctx: SearchContext,
    table: str,
    values: Tuple[int, ...],
    holds: Callable[[Sequence[int], Sequence[Perm]], bool],
) -> Optional[Tuple[Perm, ...]]:
    entries = ctx.lookup.get(table, {})
    n = len(values)
    for k in range(n):
        rotated = values[k:] + values[:k]
        arrays = entries.get(",".join(map(str, rotated)))
        if arrays is None:
            continue
        sol = _unrotate([Perm.from_images(a) for a in arrays], k)
        if holds(values, sol):
            return sol
    return None


def _prime_power_parts(m: int) -> List[int]:
    return [p**a for p, a in factorint(m).items()]


def _min_degree(m: int) -> int:
    return sum(_prime_power_parts(m))


def _random_of_order(m: int, degree: int, rng: np.random.Generator) -> Optional[Perm]:
    """Random permutation of exact order ``m``, or None if ``degree`` is too small."""
    lengths = [m] if m <= degree and rng.random() < 0.5 else _prime_power_parts(m)
    if sum(lengths) > degree:
        return None
    free = degree - sum(lengths)
    divs = divisors(m)
    while free:
        options = [d for d in divs if d <= free]
        step = int(options[rng.integers(len(options))])
        lengths.append(step)
        free -= step
    points = rng.permutation(degree).tolist()
    img = list(range(degree))
    pos = 0
    for length in lengths:
        cycle = points[pos : pos + length]
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            img[a] = b
        pos += length
    return Perm(img)


def _random_involution(degree: int, rng: np.random.Generator) -> Perm:
    pairs = int(rng.integers(1, degree // 2 + 1))
    points = rng.permutation(degree).tolist()
    img = list(range(degree))
    for t in range(pairs):
        a, b = points[2 * t], points[2 * t + 1]
        img[a], img[b] = b, a
    return Perm(img)


def _abelian_polygon(periods: Tuple[int, ...]) -> Optional[Tuple[Perm, ...]]:
    for t, m in enumerate(periods):
        others = periods[:t] + periods[t + 1 :]
        if math.lcm(*others) != m:
            continue
        spec, _ = FiniteGroupSpec.product([FiniteGroupSpec.cyclic(n) for n in others])
        gens = [spec[f"w{i}"] for i in range(len(others))]
        return tuple(gens[:t]) + (_product(gens).inverse(),) + tuple(gens[t:])
    return None


def _dihedral_polygon(periods: Tuple[int, ...]) -> Optional[Tuple[Perm, ...]]:
    if len(periods) != 3 or sorted(periods)[:2] != [2, 2]:
        return None
    t = max(range(3), key=lambda i: periods[i])
    spec = FiniteGroupSpec.dihedral(periods[t])
    u, v = spec["u"], spec["v"]
    return _unrotate((u, v, v * u), (t + 1) % 3)


def _random_polygon(periods: Tuple[int, ...], ctx: SearchContext) -> Optional[Tuple[Perm, ...]]:
    r = len(periods)
    t = max(range(r), key=lambda i: periods[i])
    k = (t + 1) % r
    # largest period last, so the repaired image is the hardest one to hit
    rotated = periods[k:] + periods[:k]
    start = max(_min_degree(m) for m in periods)
    if start > ctx.max_degree:
        return None
    rng = ctx.rng("polygon", periods)
    attempts = 0
    while attempts < ctx.max_attempts:
        for degree in range(start, ctx.max_degree + 1):
            logger.debug("polygon %s: degree %d after %d attempts", periods, degree, attempts)
            for _ in range(BATCH):
                attempts += 1
                images = []
                for m in rotated[:-1]:
                    x = _random_of_order(m, degree, rng)
                    if x is None:
                        break
                    images.append(x)
                else:
                    last = _product(images).inverse()
                    if last.order() == rotated[-1]:
                        return _unrotate(images + [last], k)
                if attempts >= ctx.max_attempts:
                    return None
    return None


def find_polygon_quotient(periods: Sequence[int], ctx: SearchContext) -> Tuple[Perm, ...]:
    """
    Permutations X_1, ..., X_r with order(X_i) = m_i exactly and X_1 ... X_r = 1.

    Args:
        periods: The orders m_1, ..., m_r, r >= 3.
        ctx: Search bounds and seed.

    Returns:
        Tuple[Perm, ...]: The images, all of one degree.

    Raises:
        SearchExhausted: If every stage failed within the bounds of ``ctx``.
    """
    periods = tuple(int(m) for m in periods)
    if len(periods) < 3:
        raise ValueError(f"polygon quotient needs at least 3 periods, got {periods}")
    key = ("polygon", periods)
    if key in ctx.memo:
        return ctx.memo[key]
    stages = [
        ("lookup", lambda: _from_lookup(ctx, "polygon", periods, _polygon_holds)),
        ("abelian", lambda: _abelian_polygon(periods)),
        ("dihedral", lambda: _dihedral_polygon(periods)),
        ("random", lambda: _random_polygon(periods, ctx)),
    ]
    for name, stage in stages:
        sol = stage()
        if sol is not None and _polygon_holds(periods, sol):
            if name != "random":
                logger.info("polygon %s: %s family, degree %d", periods, name, sol[0].degree)
            ctx.memo[key] = sol
            return sol
    logger.warning("polygon %s: no quotient up to degree %d", periods, ctx.max_degree)
    raise SearchExhausted(f"no polygon quotient for {list(periods)} within degree {ctx.max_degree}")


def _klein_cycle(links: Tuple[int, ...]) -> Optional[Tuple[Perm, ...]]:
    if any(n != 2 for n in links):
        return None
    spec = FiniteGroupSpec.klein_four()
    u, v = spec["u"], spec["v"]
    images = [u if i % 2 == 0 else v for i in range(len(links))]
    if len(links) % 2:
        images[-1] = u * v
    return tuple(images)


def _constant_cycle(links: Tuple[int, ...]) -> Optional[Tuple[Perm, ...]]:
    n, s = links[0], len(links)
    if any(x != n for x in links):
        return None
    spec = FiniteGroupSpec.dihedral(n)
    u, v, rho = spec["u"], spec["v"], spec["rho"]
    if s % 2 == 0:
        return tuple(u if i % 2 == 0 else v for i in range(s))
    if n % 2:
        # reflections u rho^k; the closing pair differs by rho^2, still of order n
        positions = [i % 2 for i in range(s - 1)] + [2]
        return tuple(u * rho**k for k in positions)
    return None


def _two_twos_cycle(links: Tuple[int, ...]) -> Optional[Tuple[Perm, ...]]:
    if len(links) != 3 or sorted(links)[:2] != [2, 2]:
        return None
    for k in range(3):
        rotated = links[k:] + links[:k]
        if rotated[:2] == (2, 2):
            spec, _ = FiniteGroupSpec.product([FiniteGroupSpec.dihedral(rotated[2]), FiniteGroupSpec.cyclic(2)])
            return _unrotate((spec["u0"], spec["w1"], spec["v0"]), k)
    return None


def euclidean_affine_quotient(kind: Sequence[int], modulus: int) -> Tuple[Perm, Perm, Perm]:
    """
    Three affine reflections u, v, w of (Z/N)^2 whose products uv, vw, wu have
    the orders of a Euclidean triangle type, in sorted order.

    Raises:
        OrderCollapse: If some order drops at this modulus.
    """
    kind = tuple(sorted(int(n) for n in kind))
    if kind not in EUCLIDEAN_MAPS:
        raise ValueError(f"{kind} is not a Euclidean triangle type")
    if modulus < 3:
        raise ValueError(f"modulus must be at least 3, got {modulus}")
    orders = {"u": 2, "v": 2, "w": 2, "u*v": kind[0], "v*w": kind[1], "w*u": kind[2]}
    try:
        spec = FiniteGroupSpec.affine_zn2(modulus, EUCLIDEAN_MAPS[kind], orders)
    except RelationViolation as err:
        raise OrderCollapse(f"type {kind} modulo {modulus}: {err}") from err
    return spec["u"], spec["v"], spec["w"]


def _euclidean_cycle(links: Tuple[int, ...], ctx: SearchContext) -> Optional[Tuple[Perm, ...]]:
    if len(links) != 3 or tuple(sorted(links)) not in EUCLIDEAN_MAPS:
        return None
    for modulus in range(ctx.euclid_modulus, ctx.euclid_modulus_max + 1):
        try:
            triple = euclidean_affine_quotient(links, modulus)
        except OrderCollapse as err:
            logger.debug("%s", err)
            continue
        for arrangement in permutations(triple):
            if _cycle_holds(links, arrangement):
                return tuple(arrangement)
    return None


def _random_cycle(links: Tuple[int, ...], ctx: SearchContext) -> Optional[Tuple[Perm, ...]]:
    start = max(4, max(_min_degree(n) for n in links))
    degrees = list(range(start, ctx.max_degree + 1))
    if not degrees:
        return None
    rng = ctx.rng("cycle", links)
    per_degree = max(1, ctx.reflection_attempts // len(degrees))
    for degree in degrees:
        logger.debug("cycle %s: degree %d", links, degree)
        for _ in range(per_degree):
            images = [_random_involution(degree, rng)]
            for n in links[:-1]:
                for _ in range(INVOLUTION_TRIES):
                    c = _random_involution(degree, rng)
                    if (images[-1] * c).order() == n:
                        images.append(c)
                        break
                else:
                    break
            else:
                if (images[-1] * images[0]).order() == links[-1]:
                    return tuple(images)
    return None


def _induced_cycle(links: Tuple[int, ...], ctx: SearchContext) -> Tuple[Perm, ...]:
    """C_i = diag(Q_i^-1, Q_i) * swap with Q_i = P_1 ... P_i for a polygon quotient P."""
    polygon = find_polygon_quotient(links, ctx)
    wreath = wreath_c2(PermGroup(polygon))
    prefix = Perm.identity(polygon[0].degree)
    images = []
    for p in polygon[:-1]:
        images.append(wreath.element(prefix.inverse(), prefix, True))
        prefix = prefix * p
    images.append(wreath.element(prefix.inverse(), prefix, True))
    return tuple(images)


def find_reflection_cycle_quotient(links: Sequence[int], ctx: SearchContext) -> Tuple[Perm, ...]:
    """
    Involutions C_0, ..., C_{s-1} with order(C_{i-1} C_i) = n_i, indices mod s.

    An empty or single-link cycle gets the single involution of C2. Two-link
    cycles are handled by dedicated dihedral constructions and are rejected.

    Raises:
        SearchExhausted: If no stage produced a solution.
    """
    links = tuple(int(n) for n in links)
    if len(links) <= 1:
        return (FiniteGroupSpec.cyclic(2)["w"],)
    if len(links) == 2:
        raise ValueError("two-link cycles have no reflection-cycle quotient of this form")
    key = ("cycle", links)
    if key in ctx.memo:
        return ctx.memo[key]
    stages = [
        ("lookup", lambda: _from_lookup(ctx, "cycle", links, _cycle_holds)),
        ("klein", lambda: _klein_cycle(links)),
        ("dihedral", lambda: _constant_cycle(links)),
        ("two-twos", lambda: _two_twos_cycle(links)),
        ("euclidean", lambda: _euclidean_cycle(links, ctx)),
        ("random", lambda: _random_cycle(links, ctx)),
        ("induced", lambda: _induced_cycle(links, ctx)),
    ]
    for name, stage in stages:
        sol = stage()
        if sol is not None and _cycle_holds(links, sol):
            logger.info("cycle %s: %s family, degree %d", links, name, sol[0].degree)
            ctx.memo[key] = sol
            return sol
    logger.warning("cycle %s: exhausted", links)
    raise SearchExhausted(f"no reflection-cycle quotient for {list(links)}")


def _c(i: int, j: int) -> Generator:
    return Generator(REFLECTION, i, j)


def _e(i: int) -> Generator:
    return Generator(CONNECTOR, i)


def _factor(sig: NecSignature, group: PermGroup, images: Dict[Generator, Perm]) -> Homomorphism:
    return Homomorphism(sig, images, degree=group.degree, target=group, fill_identity=True)


def periods_factor(sig: NecSignature) -> Optional[Homomorphism]:
    """x_t -> generator of C_{m_t} in the product of cyclic groups; e_1 absorbs the product."""
    if not sig.periods:
        return None
    spec, _ = FiniteGroupSpec.product([FiniteGroupSpec.cyclic(m) for m in sig.periods])
    images = {Generator(ELLIPTIC, t + 1): spec[f"w{t}"] for t in range(sig.r)}
    images[_e(1)] = _product(list(images.values())).inverse()
    return _factor(sig, spec.group, images)


def reflection_factor(sig: NecSignature, i: int, ctx: SearchContext) -> Homomorphism:
    """Factor carrying cycle ``i`` alone, with e_i -> 1."""
    links = sig.cycles[i - 1].links
    s = len(links)
    if s == 1 or (s == 2 and links[0] != links[1]):
        raise ValueError(f"cycle {i} of {sig} needs a partner connector")
    if s == 2:
        spec = FiniteGroupSpec.dihedral(links[0])
        images = {_c(i, 0): spec["u"], _c(i, 1): spec["v"], _c(i, 2): spec["u"]}
        return _factor(sig, spec.group, images)
    solution = find_reflection_cycle_quotient(links, ctx)
    images = {_c(i, j): solution[j] for j in range(len(solution))}
    images[_c(i, s)] = solution[0]
    return _factor(sig, PermGroup(solution), images)


def psi_factor(sig: NecSignature, i: int, partner: int) -> Homomorphism:
    """Two-link cycle (n1, n2) in D_{2 n1 n2}; e_i and e_partner are inverse rotations."""
    n1, n2 = sig.cycles[i - 1].links
    spec = FiniteGroupSpec.dihedral(2 * n1 * n2)
    u, rho = spec["u"], spec["rho"]
    images = {
        _c(i, 0): u * rho ** (2 * n2),
        _c(i, 1): u,
        _c(i, 2): u * rho ** (2 * n1),
        _e(i): rho ** (n2 - n1),
        _e(partner): rho ** (n1 - n2),
    }
    return _factor(sig, spec.group, images)


def tau_factor(sig: NecSignature, i: int, partner: int) -> Homomorphism:
    """Single-link cycle (n) in D_{2n}; e_i = e_partner = v."""
    (n,) = sig.cycles[i - 1].links
    spec = FiniteGroupSpec.dihedral(2 * n)
    u, v = spec["u"], spec["v"]
    images = {_c(i, 0): u, _c(i, 1): v * u * v, _e(i): v, _e(partner): v}
    return _factor(sig, spec.group, images)


def cycle_factor(sig: NecSignature, i: int, ctx: SearchContext, partner: Optional[int] = None) -> Homomorphism:
    links = sig.cycles[i - 1].links
    needs_partner = len(links) == 1 or (len(links) == 2 and links[0] != links[1])
    if not needs_partner:
        return reflection_factor(sig, i, ctx)
    if partner is None:
        if sig.k < 2:
            raise ValueError(f"cycle {i} of {sig} needs a partner connector")
        partner = 2 if i == 1 else 1
    if len(links) == 1:
        return tau_factor(sig, i, partner)
    return psi_factor(sig, i, partner)


def _short_polygon(periods: Tuple[int, ...], ctx: SearchContext) -> Tuple[Perm, ...]:
    if len(periods) >= 3:
        return find_polygon_quotient(periods, ctx)
    if len(periods) == 2 and periods[0] == periods[1]:
        w = FiniteGroupSpec.cyclic(periods[0])["w"]
        return w, w.inverse()
    raise SearchExhausted(f"no polygon quotient for {list(periods)}")


def _full_from_lookup(sig: NecSignature, ctx: SearchContext) -> Optional[Homomorphism]:
    entry = ctx.lookup.get("full", {}).get(render_signature(sig))
    if entry is None:
        return None
    images = {name: Perm.from_images(arr) for name, arr in entry.items()}
    degree = len(next(iter(entry.values())))
    return Homomorphism(sig, images, degree=degree, fill_identity=True)


def _full_by_factors(sig: NecSignature, ctx: SearchContext) -> Homomorphism:
    factors = [f for f in [periods_factor(sig)] if f is not None]
    factors += [cycle_factor(sig, i, ctx) for i in range(1, sig.k + 1)]
    return combine(factors) if len(factors) > 1 else factors[0]


def _full_by_induction(sig: NecSignature, ctx: SearchContext) -> Homomorphism:
    r, s = sig.r, sig.cycles[0].s
    if r == 0 and s != 1 and s != 2:
        return reflection_factor(sig, 1, ctx)
    dictionary = kerpsi_dictionary(sig)
    periods = fuchsian_double(sig).periods
    polygon = _short_polygon(periods, ctx)
    kappa = Homomorphism(
        dictionary.kernel_signature,
        {Generator(ELLIPTIC, t + 1): p for t, p in enumerate(polygon)},
        target=PermGroup(polygon),
    )
    return induce_index2(sig, dictionary, kappa)


def find_full_quotient(sig: NecSignature, ctx: SearchContext) -> Homomorphism:
    """
    A homomorphism of a genus-0, sign '+' group with period cycles onto a
    finite group that keeps the exact order of every canonical torsion generator.

    With two or more cycles it is the product of a factor for the proper
    periods and one factor per cycle. With one cycle it is induced from a
    polygon quotient of the canonical Fuchsian subgroup.

    Raises:
        SearchExhausted: If a needed sub-search fails or the result does not verify.
    """
    if sig.genus != 0 or not sig.is_plus or sig.k == 0:
        raise ValueError(f"full quotient needs genus 0, sign '+' and period cycles: {sig}")
    key = ("full", render_signature(sig))
    if key in ctx.memo:
        return ctx.memo[key]
    h = _full_from_lookup(sig, ctx)
    if h is not None and verify_relators(h) and torsion_free_certificate(h):
        logger.info("%s: lookup hit", sig)
    else:
        h = _full_by_factors(sig, ctx) if sig.k >= 2 else _full_by_induction(sig, ctx)
    relators, torsion = verify_relators(h), torsion_free_certificate(h)
    if not (relators and torsion):
        logger.warning("%s: assembled quotient fails %s", sig, relators.failed + torsion.failed)
        raise SearchExhausted(f"assembled quotient of {sig} does not verify")
    ctx.memo[key] = h
    return h
