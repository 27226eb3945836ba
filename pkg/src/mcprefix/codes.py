"""Channel specs, words, codebooks and the basic code measures."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .exactnum import ExactReal, RationalLike, exact_from_ln, exact_sum, ln_int

DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class ChannelSpec:
    """Alphabet sizes ``(q_0, ..., q_{n-1})``."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(q) for q in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if not sizes:
            raise ValueError("a channel spec needs at least one channel")
        for q in sizes:
            if q < 2:
                raise ValueError(f"alphabet size {q} < 2")

    @property
    def n(self) -> int:
        return len(self.sizes)

    def __len__(self) -> int:
        return len(self.sizes)

    def __iter__(self):
        return iter(self.sizes)

    def __getitem__(self, i: int) -> int:
        return self.sizes[i]

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.sizes)) + ")"


def spec(*sizes: int) -> ChannelSpec:
    if len(sizes) == 1 and not isinstance(sizes[0], int):
        sizes = tuple(sizes[0])
    return ChannelSpec(tuple(sizes))


@dataclass(frozen=True, order=True)
class Word:
    """An n-tuple of per-channel symbol strings; ``()`` is the empty string."""

    components: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "components", tuple(tuple(c) for c in self.components)
        )

    @classmethod
    def parse(cls, *parts: str) -> "Word":
        """``Word.parse("0", "")`` builds ``(0, eps)``; symbols are 0-9a-z."""
        comps = []
        for s in parts:
            if s in ("-", "ε"):
                s = ""
            comps.append(tuple(DIGITS.index(ch) for ch in s.lower()))
        return cls(tuple(comps))

    @property
    def n(self) -> int:
        return len(self.components)

    def __getitem__(self, i: int) -> tuple[int, ...]:
        return self.components[i]

    def is_empty(self) -> bool:
        return not any(self.components)

    def conforms(self, spec: ChannelSpec) -> bool:
        if len(self.components) != spec.n:
            return False
        return all(
            all(0 <= s < q for s in comp)
            for comp, q in zip(self.components, spec.sizes)
        )

    def __str__(self) -> str:
        def show(comp):
            return "".join(DIGITS[s] for s in comp) if comp else "ε"

        return "(" + ",".join(show(c) for c in self.components) + ")"


def w(*parts: str) -> Word:
    return Word.parse(*parts)


@dataclass(frozen=True)
class Codebook:
    """Ordered codewords over a channel spec (rows of the codeword matrix)."""

    spec: ChannelSpec
    codewords: tuple[Word, ...]

    def __post_init__(self):
        cws = tuple(self.codewords)
        object.__setattr__(self, "codewords", cws)
        for c in cws:
            if not c.conforms(self.spec):
                raise ValueError(f"codeword {c} does not conform to {self.spec}")
        if len(set(cws)) != len(cws):
            raise ValueError("duplicate codewords")
        if len(cws) > 1 and any(c.is_empty() for c in cws):
            raise ValueError("the all-empty word is only allowed alone")

    def __len__(self) -> int:
        return len(self.codewords)

    def __iter__(self):
        return iter(self.codewords)

    def __getitem__(self, j: int) -> Word:
        return self.codewords[j]


def codebook(sizes: Sequence[int], words: Iterable[Word | Sequence[str]]) -> Codebook:
    cws = [c if isinstance(c, Word) else Word.parse(*c) for c in words]
    return Codebook(ChannelSpec(tuple(sizes)), tuple(cws))


@dataclass(frozen=True)
class ProbMultiset:
    """Multiset of positive rationals, kept in the given order."""

    probs: tuple[Fraction, ...]

    def __post_init__(self):
        ps = tuple(Fraction(p) for p in self.probs)
        object.__setattr__(self, "probs", ps)
        for p in ps:
            if not 0 < p <= 1:
                raise ValueError(f"probability {p} outside (0, 1]")

    def __len__(self) -> int:
        return len(self.probs)

    def __iter__(self):
        return iter(self.probs)

    @property
    def total(self) -> Fraction:
        return sum(self.probs, Fraction(0))

    def is_distribution(self) -> bool:
        return self.total == 1

    def require_distribution(self) -> None:
        if not self.is_distribution():
            raise ValueError(f"probabilities sum to {self.total}, not 1")


def length_tuple(word: Word) -> tuple[int, ...]:
    return tuple(len(c) for c in word.components)


def descriptive_length_of(lengths: Sequence[int], spec: ChannelSpec) -> ExactReal:
    return exact_sum(ln_int(q) * l for l, q in zip(lengths, spec.sizes) if l)


def descriptive_length(word: Word, spec: ChannelSpec) -> ExactReal:
    """``sum(l_i * ln q_i)`` in nats."""
    return descriptive_length_of(length_tuple(word), spec)


def _is_prefix(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    return len(a) <= len(b) and b[: len(a)] == a


def strings_prefix_free(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    return not _is_prefix(a, b) and not _is_prefix(b, a)


def prefix_free_pair(a: Word, b: Word) -> bool:
    """True iff some channel carries components where neither prefixes the other."""
    if a.n != b.n:
        raise ValueError("words over different channel counts")
    return any(strings_prefix_free(x, y) for x, y in zip(a.components, b.components))


def is_prefix_code(cb: Codebook) -> bool:
    return all(prefix_free_pair(a, b) for a, b in combinations(cb.codewords, 2))


def block_volume_fraction(word: Word, spec: ChannelSpec) -> Fraction:
    """``exp(-|c|)`` as an exact rational."""
    den = 1
    for comp, q in zip(word.components, spec.sizes):
        den *= q ** len(comp)
    return Fraction(1, den)


def kraft_sum(cb: Codebook) -> Fraction:
    return sum((block_volume_fraction(c, cb.spec) for c in cb), Fraction(0))


def entropy(p: ProbMultiset | Iterable[RationalLike]) -> ExactReal:
    """``-sum(p ln p)`` in nats; the input must sum to exactly 1."""
    if not isinstance(p, ProbMultiset):
        p = ProbMultiset(tuple(p))
    p.require_distribution()
    counts = Counter(p.probs)
    return exact_sum(-(exact_from_ln(x) * (x * k)) for x, k in counts.items())


def _check_assignment(cb: Codebook, assignment: Sequence) -> ProbMultiset:
    if not isinstance(assignment, ProbMultiset):
        assignment = ProbMultiset(tuple(assignment))
    if len(assignment) != len(cb):
        raise ValueError(
            f"{len(assignment)} probabilities for {len(cb)} codewords"
        )
    assignment.require_distribution()
    return assignment


def expected_length(cb: Codebook, assignment) -> ExactReal:
    """``sum(p_j |c_j|)`` where ``assignment[j]`` goes with codeword ``j``."""
    ps = _check_assignment(cb, assignment)
    return exact_sum(descriptive_length(c, cb.spec) * p for c, p in zip(cb, ps))


def redundancy(cb: Codebook, assignment) -> ExactReal:
    ps = _check_assignment(cb, assignment)
    return expected_length(cb, ps) - entropy(ps)


def local_redundancies(cb: Codebook, assignment) -> list[ExactReal]:
    ps = _check_assignment(cb, assignment)
    return [descriptive_length(c, cb.spec) + exact_from_ln(p) for c, p in zip(cb, ps)]

