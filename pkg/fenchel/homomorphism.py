"""
Copyright (c) fenchel-nec contributors.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.

Homomorphisms from canonical NEC presentations into permutation groups.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from fenchel.perm import DegreeMismatch, DirectProduct, Perm, PermGroup, direct_product, wreath_c2
from fenchel.signature import (
    CONNECTOR,
    ELLIPTIC,
    REFLECTION,
    Generator,
    NecSignature,
    UnknownGenerator,
    Word,
    canonical_presentation,
    orientation_character,
)

AS_PRINTED = "as-printed"
E_INVERTED = "e-inverted"
REVERSED = "reversed"


class SignatureMismatch(ValueError):
    pass


class RewritingError(KeyError):
    pass


class Homomorphism:
    """
    Images of the canonical generators of ``signature`` as permutations of a
    common degree. Words are evaluated left to right.
    """

    def __init__(
        self,
        signature: NecSignature,
        images: Mapping[Union[Generator, str], Perm],
        degree: Optional[int] = None,
        target: Optional[PermGroup] = None,
        fill_identity: bool = False,
    ):
        resolved: Dict[Generator, Perm] = {}
        for key, p in images.items():
            gen = Generator.from_name(key) if isinstance(key, str) else key
            resolved[gen] = p
        if degree is None:
            if target is not None:
                degree = target.degree
            elif resolved:
                degree = next(iter(resolved.values())).degree
            else:
                degree = 1
        gens = signature.generators()
        unknown = set(resolved) - set(gens)
        if unknown:
            raise UnknownGenerator(", ".join(sorted(g.name for g in unknown)))
        for gen in gens:
            if gen not in resolved:
                if not fill_identity:
                    raise SignatureMismatch(f"no image for {gen.name}")
                resolved[gen] = Perm.identity(degree)
            elif resolved[gen].degree != degree:
                raise DegreeMismatch(f"image of {gen.name} has degree {resolved[gen].degree}, expected {degree}")
        self.signature = signature
        self.degree = degree
        self.images: Dict[Generator, Perm] = {g: resolved[g] for g in gens}
        self.target = target
        self._image_group: Optional[PermGroup] = None

    def __getitem__(self, gen: Union[Generator, str]) -> Perm:
        if isinstance(gen, str):
            gen = Generator.from_name(gen)
        try:
            return self.images[gen]
        except KeyError:
            raise UnknownGenerator(gen.name) from None

    def evaluate(self, w: Word) -> Perm:
        return evaluate_word(self, w)

    def image_group(self) -> PermGroup:
        if self._image_group is None:
            self._image_group = PermGroup(
                [p for p in self.images.values() if not p.is_identity], degree=self.degree
            )
        return self._image_group

    def index(self) -> int:
        """Order of the image, which is the index of the kernel."""
        return self.image_group().order()

    def named_images(self) -> Dict[str, Perm]:
        return {g.name: p for g, p in self.images.items()}

    def __repr__(self):
        return f"Homomorphism({self.signature}, degree={self.degree})"


def evaluate_word(h: Homomorphism, w: Word) -> Perm:
    result = Perm.identity(h.degree)
    for gen, exp in w.letters:
        result = result * h[gen] ** exp
    return result


@dataclass
class RelatorReport:
    rows: List[Tuple[str, bool]]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.rows)

    @property
    def failed(self) -> List[str]:
        return [label for label, ok in self.rows if not ok]

    def __bool__(self):
        return self.passed


def verify_relators(h: Homomorphism) -> RelatorReport:
    rows = [(label, evaluate_word(h, rel).is_identity) for label, rel in canonical_presentation(h.signature)]
    return RelatorReport(rows)


@dataclass(frozen=True)
class TorsionRow:
    source: str
    required: int
    achieved: int

    @property
    def passed(self) -> bool:
        return self.required == self.achieved


@dataclass
class TorsionReport:
    rows: List[TorsionRow]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def failed(self) -> List[str]:
        return [r.source for r in self.rows if not r.passed]

    def __bool__(self):
        return self.passed


def torsion_free_certificate(h: Homomorphism) -> TorsionReport:
    """
    Exact orders of the canonical torsion generators. When every row passes the
    kernel meets no conjugate of a finite cyclic or dihedral canonical subgroup,
    so it is torsion-free.
    """
    sig = h.signature
    rows = []
    for i, m in enumerate(sig.periods, 1):
        gen = Generator(ELLIPTIC, i)
        rows.append(TorsionRow(gen.name, m, h[gen].order()))
    for i, cycle in enumerate(sig.cycles, 1):
        refl = [Generator(REFLECTION, i, j) for j in range(cycle.s + 1)]
        for c in refl:
            rows.append(TorsionRow(c.name, 2, h[c].order()))
        for j, n in enumerate(cycle.links, 1):
            a, b = refl[j - 1], refl[j]
            rows.append(TorsionRow(f"{a.name}.{b.name}", n, (h[a] * h[b]).order()))
    return TorsionReport(rows)


def check_witness(h: Homomorphism, w: Word) -> bool:
    return orientation_character(h.signature, w) == -1 and evaluate_word(h, w).is_identity


class CombinedHomomorphism(Homomorphism):
    """Product map into the direct product of the factors' targets."""

    def __init__(self, factors: Sequence[Homomorphism]):
        if not factors:
            raise ValueError("combine needs at least one homomorphism")
        sig = factors[0].signature
        for f in factors[1:]:
            if f.signature != sig:
                raise SignatureMismatch(f"{f.signature} differs from {sig}")
        self.factors = tuple(factors)
        self.product: DirectProduct = direct_product(
            [f.target if f.target is not None else f.image_group() for f in factors]
        )
        images = {g: self.product.element([f.images[g] for f in factors]) for g in sig.generators()}
        super().__init__(sig, images, degree=self.product.degree, target=self.product.group)


def combine(hs: Sequence[Homomorphism]) -> CombinedHomomorphism:
    return CombinedHomomorphism(hs)


def orientation_homomorphism(sig: NecSignature) -> Homomorphism:
    """The orientation character as a map onto C2 acting on two points."""
    swap = Perm([1, 0])
    one = Perm.identity(2)
    images = {g: swap if g.reverses_orientation else one for g in sig.generators()}
    return Homomorphism(sig, images, degree=2, target=PermGroup([swap]))


def induce_index2(sig: NecSignature, dictionary, kappa: Homomorphism) -> Homomorphism:
    """
    Induce ``kappa``, defined on the index-2 subgroup K described by
    ``dictionary``, to the C2-wreath of its target. Kernel elements h map to
    diag(kappa(h), kappa(c h c)) and the coset representative c maps to the swap,
    so the kernel of the result is K' intersected with c K' c for K' = ker kappa.

    ``dictionary.lift(gen)`` must return (A, B, flip), words over the
    generators of ``kappa.signature`` with gen = diag(A, B) * swap^flip.
    """
    if kappa.signature != dictionary.kernel_signature:
        raise SignatureMismatch(f"kappa is defined on {kappa.signature}, expected {dictionary.kernel_signature}")
    base = kappa.target if kappa.target is not None else kappa.image_group()
    wreath = wreath_c2(base)
    images = {}
    for gen in sig.generators():
        try:
            a, b, flip = dictionary.lift(gen)
        except KeyError as err:
            raise RewritingError(f"no lift for {gen.name}") from err
        images[gen] = wreath.element(evaluate_word(kappa, a), evaluate_word(kappa, b), flip)
    h = Homomorphism(sig, images, degree=wreath.degree, target=wreath.group)
    logging.debug("induced %s from degree %d to %d", sig, kappa.degree, wreath.degree)
    return h


@dataclass
class Normalized:
    images: Dict[Generator, Perm]
    witness: Optional[Word]
    variant: str


def normalize_convention(
    sig: NecSignature,
    images: Mapping[Generator, Perm],
    witness: Optional[Word] = None,
    degree: Optional[int] = None,
) -> Optional[Normalized]:
    """
    Find the reading of a printed assignment that satisfies the connector
    relators c_is = e_i c_i0 e_i^-1 as enforced by ``verify_relators``.

    Tried in order: the images as given, every e_i replaced by its inverse,
    every image replaced by its inverse (which reverses each relator, so the
    witness is read backwards). Returns None when no reading passes.
    """
    candidates = [
        (AS_PRINTED, dict(images), witness),
        (
            E_INVERTED,
            {g: p.inverse() if g.kind == CONNECTOR else p for g, p in images.items()},
            witness,
        ),
        (
            REVERSED,
            {g: p.inverse() for g, p in images.items()},
            witness.reversed() if witness is not None else None,
        ),
    ]
    for variant, candidate, w in candidates:
        h = Homomorphism(sig, candidate, degree=degree)
        if not verify_relators(h):
            continue
        if w is not None and not check_witness(h, w):
            continue
        if variant != AS_PRINTED:
            logging.debug("%s: images accepted after %s normalization", sig, variant)
        return Normalized(h.images, w, variant)
    return None
