"""
Copyright (c) fenchel-nec contributors.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.

NEC signatures, canonical generators, words and the canonical presentation.
"""
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

PLUS = "+"
MINUS = "-"

ADMISSIBLE_PROPER_NEC = "admissible_proper_nec"
ADMISSIBLE_FUCHSIAN = "admissible_fuchsian"
NON_HYPERBOLIC = "non_hyperbolic"

# generator kinds
HYPERBOLIC_A = "a"
HYPERBOLIC_B = "b"
GLIDE = "d"
ELLIPTIC = "x"
REFLECTION = "c"
CONNECTOR = "e"


class SignatureSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class PeriodOutOfRange(ValueError):
    pass


class NotBordered(ValueError):
    pass


class UnknownGenerator(KeyError):
    pass


@dataclass(frozen=True)
class PeriodCycle:
    links: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "links", tuple(int(n) for n in self.links))
        for n in self.links:
            if n < 2:
                raise PeriodOutOfRange(f"link period {n} < 2")

    @property
    def s(self) -> int:
        return len(self.links)

    def render(self) -> str:
        if not self.links:
            return "(-)"
        return "(" + ",".join(str(n) for n in self.links) + ")"


@dataclass(frozen=True)
class CycleParams:
    k0: int
    k1: int
    k2: int
    k3: int

    @property
    def k(self) -> int:
        return self.k0 + self.k1 + self.k2 + self.k3


@dataclass(frozen=True)
class Generator:
    kind: str
    i: int
    j: Optional[int] = None

    @property
    def name(self) -> str:
        if self.kind == REFLECTION:
            if self.i < 10 and self.j < 10:
                return f"c{self.i}{self.j}"
            return f"c{self.i}_{self.j}"
        return f"{self.kind}{self.i}"

    @property
    def reverses_orientation(self) -> bool:
        return self.kind in (REFLECTION, GLIDE)

    @classmethod
    def from_name(cls, name: str) -> "Generator":
        m = re.fullmatch(r"([abdex])(\d+)", name)
        if m:
            return cls(m.group(1), int(m.group(2)))
        m = re.fullmatch(r"c(\d)(\d)", name) or re.fullmatch(r"c(\d+)_(\d+)", name)
        if m:
            return cls(REFLECTION, int(m.group(1)), int(m.group(2)))
        raise UnknownGenerator(name)

    def __str__(self):
        return self.name

    def __repr__(self):
        return f"Generator({self.name})"


Letter = Tuple[Generator, int]


class Word:
    """
    Freely reduced word over canonical generators. Adjacent letters always
    carry distinct generators; exponents are nonzero.
    """

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[Letter] = ()):
        reduced: List[Letter] = []
        for gen, exp in letters:
            if reduced and reduced[-1][0] == gen:
                exp += reduced.pop()[1]
            if exp:
                reduced.append((gen, exp))
        self.letters: Tuple[Letter, ...] = tuple(reduced)

    @classmethod
    def of(cls, gen: Union[Generator, str], exp: int = 1) -> "Word":
        if isinstance(gen, str):
            gen = Generator.from_name(gen)
        return cls([(gen, exp)])

    @classmethod
    def product(cls, words: Iterable["Word"]) -> "Word":
        letters: List[Letter] = []
        for w in words:
            letters.extend(w.letters)
        return cls(letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word((g, -e) for g, e in reversed(self.letters))

    def __pow__(self, n: int) -> "Word":
        base = self if n >= 0 else self.inverse()
        return Word(base.letters * abs(n))

    def reversed(self) -> "Word":
        return Word(reversed(self.letters))

    def expand(self) -> Iterator[Letter]:
        """Yield unit letters (generator, +1 or -1)."""
        for gen, exp in self.letters:
            step = 1 if exp > 0 else -1
            for _ in range(abs(exp)):
                yield gen, step

    def generators(self) -> set:
        return {g for g, _ in self.letters}

    def __len__(self):
        return sum(abs(e) for _, e in self.letters)

    def __bool__(self):
        return bool(self.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __str__(self):
        return render_word(self)

    def __repr__(self):
        return f"Word({render_word(self)!r})"


def commutator(u: Word, v: Word) -> Word:
    """[u,v] = u^-1 v^-1 u v"""
    return u.inverse() * v.inverse() * u * v


def render_word(w: Word) -> str:
    if not w.letters:
        return "1"
    parts = []
    for gen, exp in w.letters:
        parts.append(gen.name if exp == 1 else f"{gen.name}^{exp}")
    return ".".join(parts)


def parse_word(text: str, sig: Optional["NecSignature"] = None) -> Word:
    """
    Parse a word such as ``a1.c10`` or ``e1^-1.d1^3``; ``1`` is the empty word.

    Args:
        text: The word string.
        sig: If given, every generator must belong to this signature.

    Returns:
        Word: The freely reduced word.
    """
    text = text.strip()
    if text in ("", "1"):
        return Word()
    allowed = set(sig.generators()) if sig is not None else None
    letters = []
    for token in text.split("."):
        m = re.fullmatch(r"\s*([a-z][0-9_]+)\s*(?:\^\s*(-?\d+))?\s*", token)
        if m is None:
            raise SignatureSyntaxError(f"bad word letter {token!r}", text.find(token))
        gen = Generator.from_name(m.group(1))
        if allowed is not None and gen not in allowed:
            raise UnknownGenerator(gen.name)
        letters.append((gen, int(m.group(2) or 1)))
    return Word(letters)


@dataclass(frozen=True)
class NecSignature:
    genus: int
    sign: str
    periods: Tuple[int, ...] = ()
    cycles: Tuple[PeriodCycle, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "periods", tuple(int(m) for m in self.periods))
        object.__setattr__(
            self,
            "cycles",
            tuple(c if isinstance(c, PeriodCycle) else PeriodCycle(c) for c in self.cycles),
        )
        if self.genus < 0:
            raise ValueError(f"negative genus {self.genus}")
        if self.sign not in (PLUS, MINUS):
            raise ValueError(f"sign must be '+' or '-', got {self.sign!r}")
        if self.sign == MINUS and self.genus < 1:
            raise ValueError("sign '-' requires genus >= 1")
        for m in self.periods:
            if m < 2:
                raise PeriodOutOfRange(f"proper period {m} < 2")

    @classmethod
    def parse(cls, text: str) -> "NecSignature":
        return parse_signature(text)

    @property
    def r(self) -> int:
        return len(self.periods)

    @property
    def k(self) -> int:
        return len(self.cycles)

    @property
    def is_plus(self) -> bool:
        return self.sign == PLUS

    def generators(self) -> List[Generator]:
        """Canonical generators in presentation order."""
        gens = []
        for i in range(1, self.genus + 1):
            if self.is_plus:
                gens += [Generator(HYPERBOLIC_A, i), Generator(HYPERBOLIC_B, i)]
            else:
                gens.append(Generator(GLIDE, i))
        gens += [Generator(ELLIPTIC, i) for i in range(1, self.r + 1)]
        for i, cycle in enumerate(self.cycles, 1):
            gens += [Generator(REFLECTION, i, j) for j in range(cycle.s + 1)]
            gens.append(Generator(CONNECTOR, i))
        return gens

    def link_pairs(self) -> Iterator[Tuple[int, int, int]]:
        """Yield (cycle index, j, n_ij) for every link period, j counted from 1."""
        for i, cycle in enumerate(self.cycles, 1):
            for j, n in enumerate(cycle.links, 1):
                yield i, j, n

    def __str__(self):
        return render_signature(self)


class _Parser:
    _token = re.compile(r"\d+|[-+;,()\[\]{}]")

    def __init__(self, text: str):
        self.tokens: List[Tuple[str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            m = self._token.match(text, pos)
            if m is None:
                raise SignatureSyntaxError(f"unexpected character {text[pos]!r}", pos)
            self.tokens.append((m.group(), pos))
            pos = m.end()
        self.index = 0
        self.end = len(text)

    def peek(self) -> str:
        return self.tokens[self.index][0] if self.index < len(self.tokens) else ""

    def position(self) -> int:
        return self.tokens[self.index][1] if self.index < len(self.tokens) else self.end

    def expect(self, *options: str) -> str:
        tok = self.peek()
        if tok not in options:
            found = repr(tok) if tok else "end of input"
            raise SignatureSyntaxError(
                f"expected {' or '.join(repr(o) for o in options)}, found {found}",
                self.position(),
            )
        self.index += 1
        return tok

    def integer(self, minimum: int = 0) -> int:
        tok, pos = self.peek(), self.position()
        if not tok.isdigit():
            found = repr(tok) if tok else "end of input"
            raise SignatureSyntaxError(f"expected integer, found {found}", pos)
        self.index += 1
        value = int(tok)
        if value < minimum:
            raise PeriodOutOfRange(f"period {value} < {minimum} at position {pos}")
        return value

    def integer_list(self, close: str) -> Tuple[int, ...]:
        if self.peek() == "-":
            self.index += 1
            self.expect(close)
            return ()
        values = [self.integer(2)]
        while self.expect(",", close) == ",":
            values.append(self.integer(2))
        return tuple(values)

    def signature(self) -> NecSignature:
        self.expect("(")
        genus = self.integer()
        self.expect(";")
        sign_pos = self.position()
        sign = self.expect(PLUS, MINUS)
        self.expect(";")
        self.expect("[")
        periods = self.integer_list("]")
        self.expect(";")
        self.expect("{")
        cycles = []
        if self.peek() == "-":
            self.index += 1
            self.expect("}")
        else:
            while True:
                self.expect("(")
                cycles.append(PeriodCycle(self.integer_list(")")))
                if self.expect(",", "}") == "}":
                    break
        self.expect(")")
        if self.index != len(self.tokens):
            raise SignatureSyntaxError("trailing input", self.position())
        if sign == MINUS and genus == 0:
            raise SignatureSyntaxError("sign '-' requires genus >= 1", sign_pos)
        return NecSignature(genus, sign, periods, tuple(cycles))


def parse_signature(text: str) -> NecSignature:
    """
    Parse the symbol ``(g;±;[m1,...,mr];{(n11,...),...})``.

    Whitespace is ignored; ``[-]``, ``(-)`` and ``{-}`` denote empty lists.

    Raises:
        SignatureSyntaxError: On malformed input, with the offending position.
        PeriodOutOfRange: When a proper or link period is smaller than 2.
    """
    return _Parser(text).signature()


def render_signature(sig: NecSignature) -> str:
    periods = "[" + (",".join(str(m) for m in sig.periods) or "-") + "]"
    cycles = "{" + (",".join(c.render() for c in sig.cycles) or "-") + "}"
    return f"({sig.genus};{sig.sign};{periods};{cycles})"


def area_mu(sig: NecSignature) -> Fraction:
    """Normalized hyperbolic area of a fundamental region, as an exact rational."""
    alpha = 2 if sig.is_plus else 1
    mu = Fraction(alpha * sig.genus + sig.k - 2)
    mu += sum((1 - Fraction(1, m) for m in sig.periods), Fraction(0))
    mu += Fraction(1, 2) * sum(
        (1 - Fraction(1, n) for _, _, n in sig.link_pairs()), Fraction(0)
    )
    return mu


def classify(sig: NecSignature) -> str:
    if area_mu(sig) <= 0:
        return NON_HYPERBOLIC
    if sig.is_plus and sig.k == 0:
        return ADMISSIBLE_FUCHSIAN
    return ADMISSIBLE_PROPER_NEC


def riemann_hurwitz(mu_gamma: Fraction, index: int) -> Fraction:
    if index < 1:
        raise ValueError(f"index must be positive, got {index}")
    return index * Fraction(mu_gamma)


def cycle_params(sig: NecSignature) -> CycleParams:
    counts = [0, 0, 0, 0]
    for cycle in sig.cycles:
        counts[min(cycle.s, 3)] += 1
    return CycleParams(*counts)


@dataclass(frozen=True)
class Presentation:
    generators: Tuple[Generator, ...]
    relators: Tuple[Word, ...]
    labels: Tuple[str, ...]

    def __iter__(self):
        return iter(zip(self.labels, self.relators))


def canonical_presentation(sig: NecSignature) -> Presentation:
    """
    Generators and defining relators of an NEC group with signature ``sig``.

    Relator order: elliptic powers, then per cycle the reflection squares, the
    link relators and the connector relator, then the long relator.
    """
    labels, relators = [], []

    def add(label: str, word: Word):
        labels.append(label)
        relators.append(word)

    for i, m in enumerate(sig.periods, 1):
        add(f"x{i}^{m}", Word.of(Generator(ELLIPTIC, i), m))
    for i, cycle in enumerate(sig.cycles, 1):
        refl = [Generator(REFLECTION, i, j) for j in range(cycle.s + 1)]
        e = Word.of(Generator(CONNECTOR, i))
        for c in refl:
            add(f"{c.name}^2", Word.of(c, 2))
        for j, n in enumerate(cycle.links, 1):
            pair = Word.of(refl[j - 1]) * Word.of(refl[j])
            add(f"({refl[j - 1].name}.{refl[j].name})^{n}", pair**n)
        conj = e * Word.of(refl[0]) * e.inverse()
        add(f"{refl[-1].name}=e{i}.{refl[0].name}.e{i}^-1", Word.of(refl[-1]) * conj.inverse())

    parts = []
    for i in range(1, sig.genus + 1):
        if sig.is_plus:
            parts.append(
                commutator(Word.of(Generator(HYPERBOLIC_A, i)), Word.of(Generator(HYPERBOLIC_B, i)))
            )
        else:
            parts.append(Word.of(Generator(GLIDE, i), 2))
    parts += [Word.of(Generator(ELLIPTIC, i)) for i in range(1, sig.r + 1)]
    parts += [Word.of(Generator(CONNECTOR, i)) for i in range(1, sig.k + 1)]
    add("long", Word.product(parts))
    return Presentation(tuple(sig.generators()), tuple(relators), tuple(labels))


def orientation_character(sig: Optional[NecSignature], w: Word) -> int:
    """+1 if ``w`` lies in the canonical Fuchsian subgroup, -1 otherwise."""
    if sig is not None:
        allowed = set(sig.generators())
        for gen in w.generators():
            if gen not in allowed:
                raise UnknownGenerator(gen.name)
    parity = sum(abs(e) for g, e in w.letters if g.reverses_orientation) % 2
    return -1 if parity else 1


def plus_generators(sig: NecSignature) -> List[Generator]:
    return [g for g in sig.generators() if not g.reverses_orientation]


def bordered_surface_criterion(sig: NecSignature, cyclic: bool = True) -> bool:
    """
    True iff some period cycle is empty or has two adjacent link periods equal
    to 2. With ``cyclic`` the closing pair (n_is, n_i1) also counts.

    Raises:
        NotBordered: if the signature has no period cycles.
    """
    if sig.k == 0:
        raise NotBordered(f"{sig} has no period cycles")
    for cycle in sig.cycles:
        links = cycle.links
        if not links:
            return True
        pairs = list(zip(links, links[1:]))
        if cyclic and len(links) > 2:
            pairs.append((links[-1], links[0]))
        if any(p == (2, 2) for p in pairs):
            return True
    return False


def linear_bordered_reading(sig: NecSignature) -> bool:
    return bordered_surface_criterion(sig, cyclic=False)


@dataclass(frozen=True)
class KernelSurface:
    mu: Fraction
    genus: Optional[int]
    consistent: bool


def kernel_surface_data(mu_gamma: Fraction, index: int, orientable: bool) -> KernelSurface:
    """
    Area and genus of a torsion-free normal subgroup of the given index.

    Args:
        mu_gamma: Area of the ambient group, positive.
        index: Index of the subgroup.
        orientable: Whether the subgroup lies in the canonical Fuchsian subgroup.

    Returns:
        KernelSurface: ``genus`` is None when the Riemann-Hurwitz value is not an integer.
    """
    if mu_gamma <= 0:
        raise ValueError(f"area must be positive, got {mu_gamma}")
    mu_k = riemann_hurwitz(mu_gamma, index)
    genus = (mu_k + 2) / 2 if orientable else mu_k + 2
    if genus.denominator != 1:
        return KernelSurface(mu_k, None, False)
    genus = int(genus)
    return KernelSurface(mu_k, genus, genus >= (2 if orientable else 3))


def doubled_signature(sig: NecSignature) -> NecSignature:
    """
    Signature of the index-2 subgroup on which every reflection acts as -1 and
    everything else as +1. Defined for sign '-' with one period cycle, and for
    sign '+', genus 0 with one period cycle (where it is the canonical Fuchsian
    subgroup).
    """
    if sig.k != 1 or (sig.is_plus and sig.genus != 0):
        raise ValueError(f"no doubled signature for {sig}")
    periods = sig.periods + sig.cycles[0].links + tuple(reversed(sig.periods))
    return NecSignature(2 * sig.genus, sig.sign, periods, ())


def torsion_part(sig: NecSignature) -> NecSignature:
    """The genus-0 orientable-sign signature with the same periods and cycles."""
    return NecSignature(0, PLUS, sig.periods, sig.cycles)


def with_cycles(sig: NecSignature, cycles: Sequence[Sequence[int]]) -> NecSignature:
    return NecSignature(sig.genus, sig.sign, sig.periods, tuple(PeriodCycle(c) for c in cycles))


def fuchsian_double(sig: NecSignature) -> NecSignature:
    """Canonical Fuchsian subgroup of a genus-0, sign '+' group with one period cycle."""
    if not sig.is_plus or sig.genus != 0 or sig.k != 1:
        raise ValueError(f"fuchsian double needs genus 0, sign '+' and one period cycle: {sig}")
    return doubled_signature(sig)
