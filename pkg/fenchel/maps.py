"""
Copyright (c) fenchel-nec contributors.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.

Checkers for finite groups generated by involutions, as they arise as
automorphism groups of regular maps and polytopes: the odd identity word
criterion, its rotation form, the (2, S, 2n) hemi construction and the
perfect group route. Positive answers are turned into certificates.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple, Union

import orjson

from fenchel.certificate import Certificate, build_certificate
from fenchel.homomorphism import Homomorphism
from fenchel.perm import DegreeLimitExceeded, Perm, PermGroup, is_perfect, normal_closure
from fenchel.signature import (
    CONNECTOR,
    ELLIPTIC,
    REFLECTION,
    Generator,
    NecSignature,
    PeriodCycle,
    PLUS,
    Word,
)

BFS_LIMIT = 10**4
Z_SEARCH_LIMIT = 10**4


class GroupFileError(ValueError):
    def __init__(self, problems: Sequence[str]):
        super().__init__("; ".join(problems))
        self.problems = list(problems)


class PreconditionError(ValueError):
    pass


@dataclass
class InvolutionSystem:
    """
    Involutions C_0, ..., C_{s-1} with order(C_{i-1} C_i) = n_i, indices mod s.
    Also the shape of the generators of a regular polytope.
    """

    group: PermGroup
    involutions: Tuple[Perm, ...]
    links: Tuple[int, ...]
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def s(self) -> int:
        return len(self.involutions)

    @classmethod
    def create(cls, involutions: Sequence[Perm], links: Sequence[int], metadata=None) -> "InvolutionSystem":
        involutions, links = tuple(involutions), tuple(int(n) for n in links)
        problems = []
        if len(involutions) < 2:
            problems.append("generators: at least two involutions are required")
        if len(links) != len(involutions):
            problems.append(f"declared_links: {len(links)} entries for {len(involutions)} involutions")
        if problems:
            raise GroupFileError(problems)
        for i, c in enumerate(involutions):
            if c.order() != 2:
                problems.append(f"C{i}: order {c.order()}, expected 2")
        for i, n in enumerate(links):
            # link i + 1 sits between C_i and C_{i+1}
            achieved = (involutions[i] * involutions[(i + 1) % len(involutions)]).order()
            if n < 2:
                problems.append(f"declared_links[{i}]: {n} is below 2")
            elif achieved != n:
                problems.append(f"declared_links[{i}]: order(C{i} C{(i + 1) % len(involutions)}) is {achieved}, declared {n}")
        if problems:
            raise GroupFileError(problems)
        return cls(PermGroup(involutions), involutions, links, dict(metadata or {}))

    def signature(self) -> NecSignature:
        """(0;+;[-];{(n_1,...,n_s)}) read off the declared links."""
        return NecSignature(0, PLUS, (), (PeriodCycle(self.links),))


@dataclass
class RotationSystem:
    """Elements X_1, ..., X_s of declared orders with X_1 ... X_s = 1, and an optional Z."""

    group: PermGroup
    rotations: Tuple[Perm, ...]
    orders: Tuple[int, ...]
    z: Optional[Perm] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def create(cls, rotations: Sequence[Perm], orders: Sequence[int], z: Optional[Perm] = None, metadata=None) -> "RotationSystem":
        rotations, orders = tuple(rotations), tuple(int(n) for n in orders)
        problems = []
        if not rotations:
            problems.append("generators: no rotations")
        if len(orders) != len(rotations):
            problems.append(f"declared_links: {len(orders)} entries for {len(rotations)} rotations")
        if problems:
            raise GroupFileError(problems)
        for i, (x, n) in enumerate(zip(rotations, orders), 1):
            if x.order() != n:
                problems.append(f"X{i}: order {x.order()}, declared {n}")
        product = Perm.identity(rotations[0].degree)
        for x in rotations:
            product = product * x
        if not product.is_identity:
            problems.append("generators: X1 ... Xs is not the identity")
        if problems:
            raise GroupFileError(problems)
        return cls(PermGroup(rotations), rotations, orders, z, dict(metadata or {}))


def group_from_record(record: Mapping[str, Any]) -> Union[InvolutionSystem, RotationSystem]:
    """
    Build a system from a decoded group file.

    The record holds ``degree``, ``generators`` (1-based image arrays),
    ``roles`` (``C0, C1, ...`` or ``X1, X2, ...`` with an optional ``Z``),
    ``declared_links`` and free-form ``metadata``.

    Raises:
        GroupFileError: With one message per offending field.
    """
    problems = []
    degree = record.get("degree")
    raw = record.get("generators")
    roles = record.get("roles")
    links = record.get("declared_links")
    if not isinstance(degree, int) or degree < 1:
        problems.append(f"degree: expected a positive integer, got {degree!r}")
    if not isinstance(raw, list) or not raw:
        problems.append("generators: expected a non-empty list of image arrays")
    if not isinstance(roles, list):
        problems.append("roles: expected a list")
    if not isinstance(links, list) or not all(isinstance(n, int) for n in links):
        problems.append("declared_links: expected a list of integers")
    if problems:
        raise GroupFileError(problems)

    perms = []
    for i, arr in enumerate(raw):
        if not isinstance(arr, list) or len(arr) != degree:
            problems.append(f"generators[{i}]: expected {degree} images")
            continue
        try:
            perms.append(Perm.from_images(arr))
        except (TypeError, ValueError):
            problems.append(f"generators[{i}]: not a permutation")
    if len(roles) != len(raw):
        problems.append(f"roles: {len(roles)} roles for {len(raw)} generators")
    if problems:
        raise GroupFileError(problems)

    by_role = dict(zip(roles, perms))
    metadata = record.get("metadata") or {}
    if roles and all(str(r).startswith("C") for r in roles):
        expected = [f"C{i}" for i in range(len(roles))]
        if roles != expected:
            raise GroupFileError([f"roles: expected {expected}"])
        return InvolutionSystem.create(perms, links, metadata)
    x_roles = [r for r in roles if r != "Z"]
    expected = [f"X{i}" for i in range(1, len(x_roles) + 1)]
    if x_roles != expected or roles.count("Z") > 1:
        raise GroupFileError([f"roles: expected C0, C1, ... or {expected} with an optional Z"])
    return RotationSystem.create([by_role[r] for r in x_roles], links, by_role.get("Z"), metadata)


def ingest_group(path: Union[str, Path]) -> Union[InvolutionSystem, RotationSystem]:
    try:
        record = orjson.loads(Path(path).read_bytes())
    except orjson.JSONDecodeError as err:
        raise GroupFileError([f"{path}: not JSON ({err})"]) from err
    if not isinstance(record, dict):
        raise GroupFileError([f"{path}: expected an object"])
    system = group_from_record(record)
    logging.info("loaded %s from %s, |G| = %d", type(system).__name__, path, system.group.order())
    return system


def rotations(sys: InvolutionSystem) -> RotationSystem:
    """X_i = C_{i-1} C_i, X_s = C_{s-1} C_0 in the group they generate; Z = C_0 is recorded."""
    c = sys.involutions
    xs = [c[i - 1] * c[i] for i in range(1, sys.s)] + [c[-1] * c[0]]
    orders = [x.order() for x in xs]
    return RotationSystem(PermGroup(xs), tuple(xs), tuple(orders), c[0], dict(sys.metadata))


def parity_bfs(
    degree: int, letters: Sequence[Tuple[Hashable, Perm, bool]], limit: int = BFS_LIMIT
) -> Optional[List[Hashable]]:
    """
    Shortest word with an odd number of odd letters that evaluates to the identity.

    Args:
        degree: Degree of the permutations.
        letters: (label, permutation, counts-as-odd) triples; words multiply left to right.
        limit: Bound on the group order; the search visits at most twice as many states.

    Returns:
        list or None: Labels of the word, None when every identity word is even.

    Raises:
        DegreeLimitExceeded: If more than ``2 * limit`` states are reached.
    """
    identity = Perm.identity(degree)
    start, target = (identity, 0), (identity, 1)
    parent: Dict[tuple, Optional[Tuple[tuple, int]]] = {start: None}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        g, parity = state
        for index, (_, p, odd) in enumerate(letters):
            nxt = (g * p, parity ^ int(odd))
            if nxt in parent:
                continue
            if len(parent) >= 2 * limit:
                raise DegreeLimitExceeded(f"parity search passed {2 * limit} states")
            parent[nxt] = (state, index)
            if nxt == target:
                word = []
                step = parent[nxt]
                while step is not None:
                    state, index = step
                    word.append(letters[index][0])
                    step = parent[state]
                return word[::-1]
            queue.append(nxt)
    return None


def _reflection(j: int) -> Generator:
    return Generator(REFLECTION, 1, j)


@dataclass
class OddWordResult:
    holds: bool
    order: int
    index: int
    witness: Optional[Word] = None
    note: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "holds": self.holds,
            "order": self.order,
            "even_subgroup_index": self.index,
            "witness": str(self.witness) if self.witness is not None else None,
            "note": self.note,
        }


def odd_identity_check(sys: InvolutionSystem, bfs_limit: int = BFS_LIMIT) -> OddWordResult:
    """
    Whether the identity is a word of odd length in the C_i.

    Decided by the index of the even subgroup <C_0 C_1, ..., C_0 C_{s-1}>; the
    index is 1 exactly when an odd identity word exists. The witness is a word
    in the reflections c_1j of (0;+;[-];{(n_1,...,n_s)}) with c_1j -> C_j.
    """
    c = sys.involutions
    order = sys.group.order()
    even = PermGroup([c[0] * ci for ci in c[1:]], degree=sys.group.degree)
    index = order // even.order()
    if index != 1:
        return OddWordResult(False, order, index)
    if order > bfs_limit:
        return OddWordResult(True, order, 1, note=f"witness not extracted: |G| > {bfs_limit}")
    labels = parity_bfs(sys.group.degree, [(j, cj, True) for j, cj in enumerate(c)], bfs_limit)
    witness = Word.product(Word.of(_reflection(j)) for j in labels)
    return OddWordResult(True, order, 1, witness)


@dataclass
class CorollaryResult:
    holds: Optional[bool]
    z: Optional[Perm] = None
    exact: int = 0
    loose: int = 0
    note: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "holds": self.holds,
            "z": self.z.to_list() if self.z is not None else None,
            "z_with_involution_prefixes": self.exact,
            "z_with_prefixes_of_order_dividing_2": self.loose,
            "note": self.note,
        }


def corollary_check(sys: RotationSystem, z_search_limit: int = Z_SEARCH_LIMIT) -> CorollaryResult:
    """
    Search G for Z such that Z X_1 ... X_i has order exactly 2 for 0 <= i < s.

    The count of Z whose prefixes only have order dividing 2 is reported as well.
    """
    order = sys.group.order()
    if order > z_search_limit:
        return CorollaryResult(None, note=f"undecided at bound: |G| = {order} > {z_search_limit}")
    exact, loose, found = 0, 0, None
    for z in sys.group.elements(limit=z_search_limit):
        prefix, orders = z, []
        for x in sys.rotations[:-1]:
            orders.append(prefix.order())
            prefix = prefix * x
        orders.append(prefix.order())
        if all(o == 2 for o in orders):
            exact += 1
            found = found or z
        if all(o <= 2 for o in orders):
            loose += 1
    return CorollaryResult(exact > 0, found, exact, loose)


@dataclass
class HemiReport:
    n: int
    s: int
    normal_generators: List[Perm]
    normal_order: int
    quotient_order: int
    normal: bool
    certificate: Optional[Certificate] = None
    note: str = ""

    @property
    def applicable(self) -> bool:
        return self.normal and self.quotient_order == 2 * self.s

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "s": self.s,
            "normal_generators": [p.to_list() for p in self.normal_generators],
            "normal_order": self.normal_order,
            "quotient_order": self.quotient_order,
            "normal": self.normal,
            "applicable": self.applicable,
            "certified": self.certificate is not None,
            "signature": self.certificate.signature if self.certificate else None,
            "note": self.note,
        }


def _two_s_two_n(sys: InvolutionSystem) -> Tuple[int, int]:
    if sys.s != 3:
        raise PreconditionError(f"three involutions required, got {sys.s}")
    c0, c1, c2 = sys.involutions
    if (c0 * c1).order() != 2:
        raise PreconditionError(f"order(C0 C1) is {(c0 * c1).order()}, expected 2")
    last = (c2 * c0).order()
    if last % 2 or last < 4:
        raise PreconditionError(f"order(C2 C0) is {last}, expected 2n with n >= 2")
    middle = (c1 * c2).order()
    if middle != sys.links[1]:
        raise PreconditionError(f"order(C1 C2) is {middle}, declared {sys.links[1]}")
    return middle, last // 2


def hemi_construction(sys: InvolutionSystem, bfs_limit: int = BFS_LIMIT) -> HemiReport:
    """
    The subgroup N generated by C'_j = (C_1 C_2)^-j C_0 (C_1 C_2)^j, 0 <= j < S,
    for a (2, S, 2n) system. When N is normal of index 2S the reflections of
    (0;+;[-];{(n,...,n)}) map to the C'_j and the kernel is certified.

    Raises:
        PreconditionError: If the system is not of type (2, S, 2n).
    """
    s, n = _two_s_two_n(sys)
    c0, c1, c2 = sys.involutions
    rot = c1 * c2
    primes = [c0.conjugate(rot**j) for j in range(s)]
    sub = PermGroup(primes)
    closure = normal_closure(sys.group, primes)
    normal = closure.order() == sub.order()
    quotient = sys.group.order() // sub.order()
    report = HemiReport(n, s, primes, sub.order(), quotient, normal)
    if not report.applicable:
        report.note = f"|G/N| = {quotient}, construction needs {2 * s}" if normal else "N is not normal"
        return report
    if sub.order() > bfs_limit:
        report.note = f"witness not searched: |N| > {bfs_limit}"
        return report
    labels = parity_bfs(sub.degree, [(j, p, True) for j, p in enumerate(primes)], bfs_limit)
    if labels is None:
        report.note = "no odd identity word in N"
        return report
    sig = NecSignature(0, PLUS, (), (PeriodCycle((n,) * s),))
    images = {_reflection(j): p for j, p in enumerate(primes)}
    images[_reflection(s)] = primes[0]
    h = Homomorphism(sig, images, degree=sub.degree, target=sub, fill_identity=True)
    witness = Word.product(Word.of(_reflection(j)) for j in labels)
    report.certificate = build_certificate(h, "5.2/hemi", witness, notes=[f"|G/N| = {quotient}"])
    return report


@dataclass
class PerfectReport:
    perfect: bool
    m: int
    n: int
    certificate: Optional[Certificate] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "perfect": self.perfect,
            "m": self.m,
            "n": self.n,
            "certified": self.certificate is not None,
            "signature": self.certificate.signature if self.certificate else None,
        }


def perfect_route_check(sys: InvolutionSystem, bfs_limit: int = BFS_LIMIT) -> PerfectReport:
    """
    For a perfect group G with a (2, m, 2n) system, find a word in x = C_1 C_2
    and c = C_0 with an odd number of c's that is the identity, and certify
    (0;+;[m];{(n)}) with x1 -> x, e1 -> x^-1, c10 -> c, c11 -> x^-1 c x.

    Raises:
        PreconditionError: If the system has the wrong type, G is not perfect,
            G is above the search bound or no such word exists.
    """
    m, n = _two_s_two_n(sys)
    if not is_perfect(sys.group):
        raise PreconditionError("group is not perfect")
    order = sys.group.order()
    if order > bfs_limit:
        raise PreconditionError(f"|G| = {order} exceeds the search bound {bfs_limit}")
    c0, c1, c2 = sys.involutions
    x = c1 * c2
    x1, e1, c10, c11 = Generator(ELLIPTIC, 1), Generator(CONNECTOR, 1), _reflection(0), _reflection(1)
    letters = [((x1, 1), x, False), ((x1, -1), x.inverse(), False), ((c10, 1), c0, True)]
    labels = parity_bfs(sys.group.degree, letters, bfs_limit)
    if labels is None:
        raise PreconditionError("every identity word has an even number of c letters")
    sig = NecSignature(0, PLUS, (m,), (PeriodCycle((n,)),))
    images = {x1: x, e1: x.inverse(), c10: c0, c11: c0.conjugate(x)}
    h = Homomorphism(sig, images, degree=sys.group.degree, target=sys.group)
    witness = Word.product(Word.of(g, e) for g, e in labels)
    return PerfectReport(True, m, n, build_certificate(h, "5.4/perfect", witness))


def odd_word_certificate(sys: InvolutionSystem, bfs_limit: int = BFS_LIMIT) -> Certificate:
    """
    Certificate for (0;+;[-];{(n_1,...,n_s)}) with c_1j -> C_j, c_1s -> C_0, e_1 -> 1.

    Raises:
        PreconditionError: If no odd identity word exists or it was not extracted.
    """
    result = odd_identity_check(sys, bfs_limit)
    if not result.holds:
        raise PreconditionError(f"even subgroup has index {result.index}")
    if result.witness is None:
        raise PreconditionError(result.note)
    c = sys.involutions
    images = {_reflection(j): cj for j, cj in enumerate(c)}
    images[_reflection(sys.s)] = c[0]
    h = Homomorphism(sys.signature(), images, degree=sys.group.degree, target=sys.group, fill_identity=True)
    return build_certificate(h, "5.1/odd-word", result.witness)


@dataclass
class StringNote:
    non_commuting: List[Tuple[int, int]]

    @property
    def holds(self) -> bool:
        return not self.non_commuting

    def to_dict(self) -> Dict[str, Any]:
        return {
            "non_adjacent_commute": self.holds,
            "non_commuting_pairs": [list(p) for p in self.non_commuting],
            "intersection_condition": "not checked",
        }


def string_c_group_note(sys: InvolutionSystem) -> StringNote:
    """Non-adjacent generators of a polytope must commute; the intersection condition is not checked."""
    c = sys.involutions
    pairs = [(i, j) for i in range(sys.s) for j in range(i + 2, sys.s) if c[i] * c[j] != c[j] * c[i]]
    return StringNote(pairs)
