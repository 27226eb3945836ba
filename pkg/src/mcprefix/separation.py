"""Separation of channel-size sub-multisets via non-negative Diophantine solutions.

Positions of ``Q`` are used throughout, so repeated sizes such as ``(2, 2, 4)``
stay distinguishable.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterator, Optional, Sequence

from sympy import factorint

from .codes import ChannelSpec


@dataclass(frozen=True)
class FactorMatrix:
    primes: tuple[int, ...]
    entries: tuple[tuple[int, ...], ...]  # entries[row for prime][position]

    def column(self, k: int) -> dict[int, int]:
        return {p: row[k] for p, row in zip(self.primes, self.entries) if row[k]}


@dataclass(frozen=True)
class SeparationWitness:
    x: tuple[int, ...]
    violating_position: int


Partition = tuple[tuple[int, ...], ...]


def _sizes(spec) -> tuple[int, ...]:
    return spec.sizes if isinstance(spec, ChannelSpec) else tuple(spec)


def factor_matrix(spec) -> FactorMatrix:
    """Exponent of each prime (ascending) in each channel size."""
    sizes = _sizes(spec)
    facs = [factorint(q) for q in sizes]
    primes = tuple(sorted({p for f in facs for p in f}))
    entries = tuple(tuple(f.get(p, 0) for f in facs) for p in primes)
    return FactorMatrix(primes, entries)


def enumerate_solutions(spec, rhs: int) -> list[tuple[int, ...]]:
    """All ``x >= 0`` with ``prod(q**x_q) == rhs``, in lexicographic order."""
    if rhs < 1:
        raise ValueError("rhs must be a positive integer")
    sizes = _sizes(spec)
    target = factorint(rhs)
    facs = [factorint(q) for q in sizes]
    if any(p not in {pp for f in facs for pp in f} for p in target):
        return []
    out: list[tuple[int, ...]] = []
    n = len(sizes)
    x = [0] * n

    def rec(k: int, rem: dict[int, int]) -> None:
        if k == n:
            if not any(rem.values()):
                out.append(tuple(x))
            return
        f = facs[k]
        bound = min(rem.get(p, 0) // e for p, e in f.items())
        for v in range(bound + 1):
            x[k] = v
            nxt = dict(rem)
            for p, e in f.items():
                nxt[p] -= v * e
            # primes that no later size carries must already be exhausted
            if all(
                nxt.get(p, 0) == 0 or any(p in facs[j] for j in range(k + 1, n))
                for p in nxt
            ):
                rec(k + 1, nxt)
        x[k] = 0

    rec(0, {p: target.get(p, 0) for f in facs for p in f} | dict(target))
    return out


def complement_product(spec, part: Sequence[int]) -> int:
    sizes = _sizes(spec)
    inside = set(part)
    return prod(q for k, q in enumerate(sizes) if k not in inside)


def is_separated(part: Sequence[int], spec) -> Optional[SeparationWitness]:
    """``None`` when the positions in ``part`` are separated, else a witness.

    The witness is the lexicographically smallest solution that is non-zero
    somewhere on ``part``.
    """
    part = tuple(sorted(set(part)))
    if not part:
        raise ValueError("part must be non-empty")
    for x in enumerate_solutions(spec, complement_product(spec, part)):
        for k in part:
            if x[k] > 0:
                return SeparationWitness(x, k)
    return None


def all_witnesses(part: Sequence[int], spec) -> list[SeparationWitness]:
    part = tuple(sorted(set(part)))
    out = []
    for x in enumerate_solutions(spec, complement_product(spec, part)):
        bad = [k for k in part if x[k] > 0]
        if bad:
            out.append(SeparationWitness(x, bad[0]))
    return out


def check_partition(p: Sequence[Sequence[int]], n: int) -> Partition:
    parts = tuple(tuple(sorted(part)) for part in p)
    flat = sorted(k for part in parts for k in part)
    if flat != list(range(n)) or any(not part for part in parts):
        raise ValueError(f"{p} is not a partition of {n} positions")
    return parts


def is_t_separation(p: Sequence[Sequence[int]], spec) -> bool:
    parts = check_partition(p, len(_sizes(spec)))
    return all(is_separated(part, spec) is None for part in parts)


def restricted_growth_strings(n: int, t: int) -> Iterator[tuple[int, ...]]:
    """RGS of length ``n`` using exactly ``t`` blocks, lexicographic order."""
    if n == 0 or not 1 <= t <= n:
        return
    a = [0] * n

    def rec(k: int, top: int) -> Iterator[tuple[int, ...]]:
        # top = largest block label used so far
        if k == n:
            if top == t - 1:
                yield tuple(a)
            return
        if (t - 1 - top) > (n - k):
            return
        for v in range(min(top + 1, t - 1) + 1):
            a[k] = v
            yield from rec(k + 1, max(top, v))

    a[0] = 0
    yield from rec(1, 0)


def rgs_to_partition(rgs: Sequence[int]) -> Partition:
    blocks: dict[int, list[int]] = {}
    for k, b in enumerate(rgs):
        blocks.setdefault(b, []).append(k)
    return tuple(tuple(blocks[b]) for b in sorted(blocks))


def find_t_separation(spec, t: int) -> Optional[Partition]:
    """First ``t``-separation in restricted-growth order, or ``None``."""
    sizes = _sizes(spec)
    n = len(sizes)
    if not 1 <= t <= n:
        raise ValueError(f"t={t} outside 1..{n}")
    cache: dict[tuple[int, ...], bool] = {}

    def separated(part):
        if part not in cache:
            cache[part] = is_separated(part, sizes) is None
        return cache[part]

    for rgs in restricted_growth_strings(n, t):
        parts = rgs_to_partition(rgs)
        if all(separated(part) for part in parts):
            return parts
    return None


def natural_separation_check(p: Sequence[Sequence[int]], spec) -> bool:
    """Every element has a prime factor shared with no size outside its part."""
    sizes = _sizes(spec)
    parts = check_partition(p, len(sizes))
    facs = [set(factorint(q)) for q in sizes]
    for part in parts:
        outside = set().union(*(facs[k] for k in range(len(sizes)) if k not in part))
        for k in part:
            if not facs[k] - outside:
                return False
    return True


@dataclass(frozen=True)
class TreeLineReport:
    spec: tuple[int, ...]
    separations: dict[int, Partition]
    verdict: str  # "above tree line" or "unknown"

    @property
    def t_separable_for(self) -> frozenset[int]:
        return frozenset(t for t in self.separations if t >= 3)


def above_tree_line_sufficient(spec) -> TreeLineReport:
    """Positive verdict iff some ``t >= 3`` separation exists; never claims below."""
    sizes = _sizes(spec)
    found = {}
    for t in range(1, len(sizes) + 1):
        part = find_t_separation(sizes, t)
        if part is not None:
            found[t] = part
    verdict = "above tree line" if any(t >= 3 for t in found) else "unknown"
    return TreeLineReport(sizes, found, verdict)


def format_partition(p: Partition, spec) -> str:
    sizes = _sizes(spec)
    return "{" + ", ".join(
        "{" + ",".join(str(sizes[k]) for k in part) + "}" for part in p
    ) + "}"
