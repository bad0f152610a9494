"""
Copyright (c) fenchel-nec contributors.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.

Permutations and permutation groups.

Composition is left to right throughout: ``p * q`` applies ``p`` first, then
``q``. This agrees with sympy's ``Permutation.__mul__``, which backs the
stabilizer chain computations. Points are 0-based internally and 1-based in
every serialized or printed form.
"""
import math
import re
import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sympy.combinatorics import Permutation, PermutationGroup

DEFAULT_DEGREE_CAP = 4096


class DegreeMismatch(ValueError):
    pass


class DegreeLimitExceeded(ValueError):
    pass


class RelationViolation(ValueError):
    pass


class Perm:
    __slots__ = ("_img", "_hash")

    def __init__(self, images: Iterable[int]):
        img = tuple(int(i) for i in images)
        if sorted(img) != list(range(len(img))):
            raise ValueError(f"not a permutation: {img}")
        self._img = img
        self._hash = hash(img)

    @classmethod
    def identity(cls, degree: int) -> "Perm":
        return cls(range(degree))

    @classmethod
    def from_images(cls, images: Sequence[int]) -> "Perm":
        """From a 1-based image array such as ``[2, 1, 4, 3]``."""
        return cls(i - 1 for i in images)

    @classmethod
    def from_cycles(cls, text: str, degree: int) -> "Perm":
        """From cycle notation, ``(1 2)(3 4)`` or ``(1,2)(3,4)``; ``()`` is the identity."""
        img = list(range(degree))
        for body in re.findall(r"\(([^()]*)\)", text):
            points = [int(p) - 1 for p in re.split(r"[\s,]+", body.strip()) if p]
            for a, b in zip(points, points[1:] + points[:1]):
                if not 0 <= a < degree:
                    raise ValueError(f"point {a + 1} outside degree {degree}")
                img[a] = b
        return cls(img)

    @classmethod
    def from_sympy(cls, p: Permutation) -> "Perm":
        return cls(p.array_form)

    def to_sympy(self) -> Permutation:
        return Permutation(list(self._img))

    @property
    def degree(self) -> int:
        return len(self._img)

    @property
    def array(self) -> Tuple[int, ...]:
        return self._img

    def __call__(self, point: int) -> int:
        return self._img[point]

    def to_list(self) -> List[int]:
        return [i + 1 for i in self._img]

    def __mul__(self, other: "Perm") -> "Perm":
        return compose(self, other)

    def inverse(self) -> "Perm":
        inv = [0] * len(self._img)
        for i, j in enumerate(self._img):
            inv[j] = i
        return Perm(inv)

    def __pow__(self, n: int) -> "Perm":
        base = self if n >= 0 else self.inverse()
        result = Perm.identity(self.degree)
        n = abs(n)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self, g: "Perm") -> "Perm":
        """g^-1 p g"""
        return g.inverse() * self * g

    @property
    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self._img))

    def cycles(self) -> List[Tuple[int, ...]]:
        """Nontrivial cycles, 1-based, each starting at its smallest point."""
        seen = set()
        result = []
        for start in range(len(self._img)):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            nxt = self._img[start]
            while nxt != start:
                cycle.append(nxt)
                seen.add(nxt)
                nxt = self._img[nxt]
            if len(cycle) > 1:
                result.append(tuple(p + 1 for p in cycle))
        return result

    def order(self) -> int:
        return element_order(self)

    def __eq__(self, other):
        return isinstance(other, Perm) and self._img == other._img

    def __hash__(self):
        return self._hash

    def __str__(self):
        cycles = self.cycles()
        if not cycles:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cycles)

    def __repr__(self):
        return f"Perm({self})"


def compose(p: Perm, q: Perm) -> Perm:
    """Apply ``p``, then ``q``."""
    if p.degree != q.degree:
        raise DegreeMismatch(f"degrees {p.degree} and {q.degree}")
    qi = q.array
    return Perm(qi[i] for i in p.array)


def element_order(p: Perm) -> int:
    order = 1
    for cycle in p.cycles():
        order = math.lcm(order, len(cycle))
    return order


def commutator(p: Perm, q: Perm) -> Perm:
    """[p,q] = p^-1 q^-1 p q"""
    return p.inverse() * q.inverse() * p * q


def direct_sum(parts: Sequence[Perm]) -> Perm:
    """The permutation acting by ``parts[i]`` on the i-th block of consecutive points."""
    img: List[int] = []
    offset = 0
    for p in parts:
        img.extend(offset + i for i in p.array)
        offset += p.degree
    return Perm(img)


class PermGroup:
    """
    Group generated by a list of permutations of equal degree.

    The stabilizer chain is computed once by sympy's Schreier-Sims and cached.
    Access is guarded by a lock so several threads can query one group.
    """

    def __init__(
        self,
        generators: Iterable[Perm],
        degree: Optional[int] = None,
        cap: int = DEFAULT_DEGREE_CAP,
    ):
        gens = tuple(generators)
        if degree is None:
            if not gens:
                raise ValueError("degree required for a group without generators")
            degree = gens[0].degree
        for g in gens:
            if g.degree != degree:
                raise DegreeMismatch(f"generator of degree {g.degree} in a group of degree {degree}")
        if degree > cap:
            raise DegreeLimitExceeded(f"degree {degree} exceeds cap {cap}")
        self.degree = degree
        self.generators = gens
        self._lock = threading.Lock()
        self._sympy: Optional[PermutationGroup] = None

    @property
    def sympy(self) -> PermutationGroup:
        with self._lock:
            if self._sympy is None:
                gens = [g.to_sympy() for g in self.generators] or [
                    Permutation(list(range(self.degree)))
                ]
                group = PermutationGroup(gens)
                group.schreier_sims()
                self._sympy = group
            return self._sympy

    def order(self) -> int:
        group = self.sympy
        with self._lock:
            return int(group.order())

    def contains(self, p: Perm) -> bool:
        if p.degree != self.degree:
            raise DegreeMismatch(f"degree {p.degree} in a group of degree {self.degree}")
        if p.is_identity:
            return True
        group = self.sympy
        with self._lock:
            return bool(group.contains(p.to_sympy()))

    def stabilizer_chain(self) -> Tuple[List[int], List[Perm]]:
        """Base points (1-based) and strong generators."""
        group = self.sympy
        with self._lock:
            base = [b + 1 for b in group.base]
            strong = [Perm.from_sympy(s) for s in group.strong_gens]
        return base, strong

    def elements(self, limit: int = 100000) -> List[Perm]:
        """All elements by closure under right multiplication by generators."""
        identity = Perm.identity(self.degree)
        seen = {identity}
        queue = deque([identity])
        while queue:
            g = queue.popleft()
            for s in self.generators:
                h = g * s
                if h not in seen:
                    if len(seen) >= limit:
                        raise DegreeLimitExceeded(f"more than {limit} elements")
                    seen.add(h)
                    queue.append(h)
        return sorted(seen, key=lambda p: p.array)

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(a * b == b * a for i, a in enumerate(gens) for b in gens[i + 1 :])

    def is_normal_subgroup(self, sub: "PermGroup") -> bool:
        return all(sub.contains(n.conjugate(g)) for n in sub.generators for g in self.generators)

    def __repr__(self):
        return f"PermGroup(degree={self.degree}, generators={len(self.generators)})"


def group_order(group: PermGroup) -> int:
    return group.order()


def normal_closure(group: PermGroup, subset: Iterable[Perm]) -> PermGroup:
    """
    Smallest subgroup containing ``subset`` and closed under conjugation by the
    generators of ``group``. Deterministic: conjugates are added in generator order.
    """
    gens = [s for s in subset if not s.is_identity]
    closure = PermGroup(gens, degree=group.degree)
    queue = deque(gens)
    while queue:
        n = queue.popleft()
        for g in group.generators:
            c = n.conjugate(g)
            if not closure.contains(c):
                gens.append(c)
                closure = PermGroup(gens, degree=group.degree)
                queue.append(c)
    return closure


def derived_subgroup(group: PermGroup) -> PermGroup:
    gens = group.generators
    comms = [commutator(a, b) for i, a in enumerate(gens) for b in gens[i + 1 :]]
    return normal_closure(group, comms)


def is_perfect(group: PermGroup) -> bool:
    return derived_subgroup(group).order() == group.order()


@dataclass
class DirectProduct:
    """Direct product acting on the disjoint union of the factors' domains."""

    factors: Tuple[PermGroup, ...]
    offsets: Tuple[int, ...] = field(init=False)
    group: PermGroup = field(init=False)

    def __post_init__(self):
        offsets, total = [], 0
        for f in self.factors:
            offsets.append(total)
            total += f.degree
        self.offsets = tuple(offsets)
        gens = [self.embed(i, g) for i, f in enumerate(self.factors) for g in f.generators]
        self.group = PermGroup(gens, degree=total)

    @property
    def degree(self) -> int:
        return self.group.degree

    def element(self, parts: Sequence[Perm]) -> Perm:
        if len(parts) != len(self.factors):
            raise ValueError(f"expected {len(self.factors)} components, got {len(parts)}")
        return direct_sum(parts)

    def embed(self, index: int, p: Perm) -> Perm:
        parts = [Perm.identity(f.degree) for f in self.factors]
        parts[index] = p
        return direct_sum(parts)

    def project(self, index: int, p: Perm) -> Perm:
        lo = self.offsets[index]
        hi = lo + self.factors[index].degree
        return Perm(p.array[i] - lo for i in range(lo, hi))


def direct_product(groups: Sequence[PermGroup]) -> DirectProduct:
    return DirectProduct(tuple(groups))


@dataclass
class WreathC2:
    """
    (Q x Q) x| C2 on two copies A and B of Q's domain. ``diag(a, b)`` acts by
    ``a`` on A and ``b`` on B; ``swap`` exchanges A_i and B_i.
    """

    base: PermGroup
    group: PermGroup = field(init=False)
    swap: Perm = field(init=False)

    def __post_init__(self):
        n = self.base.degree
        self.swap = Perm(list(range(n, 2 * n)) + list(range(n)))
        one = Perm.identity(n)
        gens = [self.diag(g, one) for g in self.base.generators] + [self.swap]
        self.group = PermGroup(gens, degree=2 * n)

    @property
    def degree(self) -> int:
        return self.group.degree

    def diag(self, a: Perm, b: Perm) -> Perm:
        return direct_sum([a, b])

    def element(self, a: Perm, b: Perm, flip: bool) -> Perm:
        d = self.diag(a, b)
        return d * self.swap if flip else d


def wreath_c2(base: PermGroup) -> WreathC2:
    return WreathC2(base)


@dataclass
class FiniteGroupSpec:
    """
    A named finite target group: a tag, its parameters, distinguished elements
    and the realized permutation group. Constructors check the defining
    relations with exact orders and raise ``RelationViolation`` otherwise.
    """

    tag: str
    params: tuple
    named: Dict[str, Perm]
    group: PermGroup

    @property
    def degree(self) -> int:
        return self.group.degree

    def __getitem__(self, name: str) -> Perm:
        return self.named[name]

    def identity(self) -> Perm:
        return Perm.identity(self.degree)

    def _check(self, name: str, required: int):
        achieved = self.named[name].order()
        if achieved != required:
            raise RelationViolation(f"{self.tag}{self.params}: {name} has order {achieved}, expected {required}")

    @classmethod
    def cyclic(cls, m: int) -> "FiniteGroupSpec":
        w = Perm([(i + 1) % m for i in range(m)])
        spec = cls("cyclic", (m,), {"w": w}, PermGroup([w]))
        spec._check("w", m)
        return spec

    @classmethod
    def dihedral(cls, n: int) -> "FiniteGroupSpec":
        """Two involutions u, v whose product rho = uv has order ``n``."""
        if n == 1:
            u = Perm.from_cycles("(1 2)", 2)
            v = u
        elif n == 2:
            u = Perm.from_cycles("(1 2)(3 4)", 4)
            v = Perm.from_cycles("(1 3)(2 4)", 4)
        else:
            u = Perm((-i) % n for i in range(n))
            v = Perm((1 - i) % n for i in range(n))
        spec = cls("dihedral", (n,), {"u": u, "v": v, "rho": u * v}, PermGroup([u, v]))
        spec._check("u", 2)
        spec._check("v", 2)
        spec._check("rho", n)
        return spec

    @classmethod
    def klein_four(cls) -> "FiniteGroupSpec":
        spec = cls.dihedral(2)
        spec.tag = "klein_four"
        spec.params = ()
        return spec

    @classmethod
    def explicit(cls, named: Dict[str, Perm], orders: Optional[Dict[str, int]] = None) -> "FiniteGroupSpec":
        gens = list(named.values())
        spec = cls("explicit", tuple(sorted(named)), dict(named), PermGroup(gens))
        spec._check_orders(orders)
        return spec

    def _check_orders(self, orders: Optional[Dict[str, int]]):
        """Exact orders for named elements or '*' products of them; products are added to ``named``."""
        for name, required in (orders or {}).items():
            if name not in self.named:
                self.named[name] = evaluate_product(self, name)
            self._check(name, required)

    @classmethod
    def affine_zn2(
        cls,
        modulus: int,
        maps: Dict[str, Tuple[Sequence[Sequence[int]], Sequence[int]]],
        orders: Optional[Dict[str, int]] = None,
    ) -> "FiniteGroupSpec":
        """
        Affine maps ``p -> A p + t`` of the plane (Z/N)^2, realized on the N^2
        points ordered row by row. ``orders`` is checked as in ``explicit``.
        """
        if modulus < 2:
            raise ValueError(f"modulus must be at least 2, got {modulus}")
        coords = np.indices((modulus, modulus)).reshape(2, -1)
        named = {}
        for name, (matrix, shift) in maps.items():
            image = (np.asarray(matrix, dtype=np.int64) @ coords + np.asarray(shift, dtype=np.int64)[:, None]) % modulus
            named[name] = Perm((image[0] * modulus + image[1]).tolist())
        spec = cls("affine_zn2", (modulus,), named, PermGroup(list(named.values())))
        spec._check_orders(orders)
        return spec

    @classmethod
    def product(cls, specs: Sequence["FiniteGroupSpec"]) -> Tuple["FiniteGroupSpec", DirectProduct]:
        prod = direct_product([s.group for s in specs])
        named = {}
        for i, s in enumerate(specs):
            for name, p in s.named.items():
                named[f"{name}{i}"] = prod.embed(i, p)
        return cls("direct_product", tuple(s.tag for s in specs), named, prod.group), prod

    @classmethod
    def wreath(cls, spec: "FiniteGroupSpec") -> Tuple["FiniteGroupSpec", WreathC2]:
        wr = wreath_c2(spec.group)
        result = cls("wreath_c2", (spec.tag,), {"swap": wr.swap}, wr.group)
        result._check("swap", 2)
        return result, wr


def evaluate_product(spec: FiniteGroupSpec, expression: str) -> Perm:
    """Product of named elements written with '*', e.g. ``u*v``."""
    result = spec.identity()
    for name in expression.split("*"):
        result = result * spec.named[name.strip()]
    return result

