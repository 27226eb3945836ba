"""Rectangle packing graph: codewords as axis-aligned blocks in a container.

Blocks are disjoint exactly when the codewords are pairwise prefix-free, which
makes this module an independent check on :func:`codes.is_prefix_code`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import prod

from .codes import ChannelSpec, Codebook, Word, length_tuple


@dataclass(frozen=True)
class Container:
    spec: ChannelSpec
    max_lengths: tuple[int, ...]

    @property
    def edges(self) -> tuple[int, ...]:
        return tuple(q**l for q, l in zip(self.spec.sizes, self.max_lengths))

    @property
    def volume(self) -> int:
        return prod(self.edges)


@dataclass(frozen=True)
class Block:
    origin: tuple[int, ...]
    size: tuple[int, ...]

    @property
    def volume(self) -> int:
        return prod(self.size)

    def contains(self, other: "Block") -> bool:
        return all(
            a <= b and b + t <= a + s
            for a, s, b, t in zip(self.origin, self.size, other.origin, other.size)
        )


def container_of(cb: Codebook) -> Container:
    n = cb.spec.n
    if len(cb) == 0:
        return Container(cb.spec, (0,) * n)
    lens = [length_tuple(c) for c in cb]
    return Container(cb.spec, tuple(max(l[i] for l in lens) for i in range(n)))


def _value(digits: tuple[int, ...], q: int) -> int:
    v = 0
    for d in digits:
        v = v * q + d
    return v


def block_of(word: Word, container: Container) -> Block:
    """Block of the cells whose leading symbols spell ``word``."""
    origin, size = [], []
    for comp, q, lmax in zip(word.components, container.spec.sizes, container.max_lengths):
        if len(comp) > lmax:
            raise ValueError(f"{word} does not fit container {container.max_lengths}")
        span = q ** (lmax - len(comp))
        origin.append(_value(comp, q) * span)
        size.append(span)
    return Block(tuple(origin), tuple(size))


def blocks_disjoint(a: Block, b: Block) -> bool:
    """Disjoint iff the intervals are disjoint along at least one axis."""
    return any(
        x + s <= y or y + t <= x
        for x, s, y, t in zip(a.origin, a.size, b.origin, b.size)
    )


def blocks(cb: Codebook) -> list[Block]:
    box = container_of(cb)
    return [block_of(c, box) for c in cb]


def overlap_free(cb: Codebook) -> bool:
    return all(blocks_disjoint(a, b) for a, b in combinations(blocks(cb), 2))


def volume_fraction(block: Block, container: Container) -> Fraction:
    return Fraction(block.volume, container.volume)


def dump_blocks(cb: Codebook) -> str:
    """One ``origin size`` line per codeword (debugging aid, n <= 3)."""
    if cb.spec.n > 3:
        raise ValueError("block dumps are limited to at most 3 channels")
    lines = []
    for c, b in zip(cb, blocks(cb)):
        lines.append(f"{c} origin={list(b.origin)} size={list(b.size)}")
    return "\n".join(lines)
