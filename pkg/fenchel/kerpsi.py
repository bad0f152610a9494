"""
Copyright (c) fenchel-nec contributors.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.

The index-2 subgroup K = ker(psi) of a group with one period cycle, where psi
sends every reflection to -1 and every other canonical generator to +1.

K is again an NEC group without period cycles. Its canonical generators are
named by the doubled signature (``d1``.. ``d{2g}``, ``x1``.. ``x{2r+s}``) and
are expressed as words in the ambient generators:

    d'_i       = d_{g+1-i}^-1          1 <= i <= g
    d'_{g+i}   = c0 d_i c0             1 <= i <= g
    x'_i       = c0 x_i c0             1 <= i <= r
    x'_{r+j}   = c_{j-1} c_j           1 <= j <= s
    x'_{r+s+i} = x_{r+1-i}^-1          1 <= i <= r
"""
from dataclasses import dataclass, field
from typing import Dict, List, Tuple, Union

from fenchel.signature import (
    CONNECTOR,
    ELLIPTIC,
    GLIDE,
    REFLECTION,
    Generator,
    NecSignature,
    Word,
    doubled_signature,
)
from fenchel.homomorphism import RewritingError


def _w(kind: str, i: int, j: int = None, exp: int = 1) -> Word:
    return Word.of(Generator(kind, i, j), exp)


@dataclass
class KerPsiDictionary:
    signature: NecSignature
    kernel_signature: NecSignature
    words: Dict[Generator, Word] = field(default_factory=dict)

    @property
    def g(self) -> int:
        return self.signature.genus

    @property
    def r(self) -> int:
        return self.signature.r

    @property
    def s(self) -> int:
        return self.signature.cycles[0].s

    def d(self, i: int, exp: int = 1) -> Word:
        return _w(GLIDE, i, exp=exp)

    def x(self, i: int, exp: int = 1) -> Word:
        return _w(ELLIPTIC, i, exp=exp)

    def prefix(self, j: int) -> Word:
        """P_j = x'_{r+1} ... x'_{r+j}, which equals c0 c_j."""
        return Word.product(self.x(self.r + t) for t in range(1, j + 1))

    def expand(self, w: Word) -> Word:
        """Substitute the ambient expression of every kernel generator."""
        parts = []
        for gen, exp in w.letters:
            if gen not in self.words:
                raise RewritingError(f"{gen.name} is not a generator of {self.kernel_signature}")
            parts.append(self.words[gen] ** exp)
        return Word.product(parts)

    def lift(self, gen: Generator) -> Tuple[Word, Word, bool]:
        """
        (A, B, flip) with gen = diag(A, c0 A c0) for kernel elements and
        gen = diag(A, B) * swap for reflections, all over kernel generators.
        """
        g, r, s = self.g, self.r, self.s
        if gen.kind == GLIDE and 1 <= gen.i <= g:
            return self.d(g + 1 - gen.i, -1), self.d(g + gen.i), False
        if gen.kind == ELLIPTIC and 1 <= gen.i <= r:
            return self.x(2 * r + s + 1 - gen.i, -1), self.x(gen.i), False
        if gen.kind == CONNECTOR and gen.i == 1:
            a = Word.product(self.x(r + s + i) for i in range(1, r + 1))
            a = a * Word.product(self.d(i, 2) for i in range(1, g + 1))
            b = Word.product(self.x(i) for i in range(1, r + 1)).inverse()
            b = b * Word.product(self.d(g + i, 2) for i in range(1, g + 1)).inverse()
            return a, b, False
        if gen.kind == REFLECTION and gen.i == 1 and 0 <= gen.j <= s:
            p = self.prefix(gen.j)
            return p.inverse(), p, True
        raise RewritingError(f"no lift for {gen.name}")

    def c0_conjugate(self, gen: Generator) -> Word:
        """c0 * gen * c0 rewritten over kernel generators."""
        g, r, s = self.g, self.r, self.s
        if gen.kind == GLIDE and 1 <= gen.i <= 2 * g:
            return self.d(2 * g + 1 - gen.i, -1)
        if gen.kind == ELLIPTIC and 1 <= gen.i <= 2 * r + s:
            if r < gen.i <= r + s:
                j = gen.i - r
                p = self.prefix(j - 1)
                return p * self.x(gen.i, -1) * p.inverse()
            return self.x(2 * r + s + 1 - gen.i, -1)
        raise RewritingError(f"{gen.name} is not a generator of {self.kernel_signature}")


def kerpsi_dictionary(sig: NecSignature) -> KerPsiDictionary:
    """
    Presentation data for ker(psi). Defined for one period cycle with sign '-'
    (any genus) or sign '+' and genus 0, and r + s > 0.
    """
    if sig.k != 1 or (sig.is_plus and sig.genus != 0):
        raise ValueError(f"ker psi dictionary needs one period cycle and sign '-' or genus 0: {sig}")
    r, s, g = sig.r, sig.cycles[0].s, sig.genus
    if r + s == 0:
        raise ValueError(f"ker psi dictionary needs r + s > 0: {sig}")
    kernel = doubled_signature(sig)
    c0 = _w(REFLECTION, 1, 0)
    words: Dict[Generator, Word] = {}
    for i in range(1, g + 1):
        words[Generator(GLIDE, i)] = _w(GLIDE, g + 1 - i, exp=-1)
        words[Generator(GLIDE, g + i)] = c0 * _w(GLIDE, i) * c0
    for i in range(1, r + 1):
        words[Generator(ELLIPTIC, i)] = c0 * _w(ELLIPTIC, i) * c0
        words[Generator(ELLIPTIC, r + s + i)] = _w(ELLIPTIC, r + 1 - i, exp=-1)
    for j in range(1, s + 1):
        words[Generator(ELLIPTIC, r + j)] = _w(REFLECTION, 1, j - 1) * _w(REFLECTION, 1, j)
    return KerPsiDictionary(sig, kernel, words)


def c0_conjugate_rewrite(dictionary: KerPsiDictionary, w: Union[Word, Generator]) -> Word:
    """Rewrite c0 * w * c0 letter by letter over kernel generators."""
    if isinstance(w, Generator):
        w = Word.of(w)
    parts: List[Word] = [dictionary.c0_conjugate(gen) ** exp for gen, exp in w.letters]
    return Word.product(parts)
