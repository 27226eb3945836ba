"""Entropy-achieving tree-decodable codes from a partition that fails separation.

Given a partition ``{Q_j}`` of the channel sizes and a part ``Q_j*`` that is
not separated, the selvage core over the product alphabets ``Q^x`` is lifted
to ``Q`` and one or more of its rows is rewritten so that a single channel
``i*`` is non-empty in every codeword.  That channel can then serve as the
root of a decoding tree, and padding with unit-volume words fills the
container, so the code has zero redundancy on the ``Q^x`` selvage assembly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import prod
from typing import Optional, Sequence

from .codes import ChannelSpec, Codebook, ProbMultiset, Word, prefix_free_pair
from .selvage import selvage_core, spa
from .separation import (
    Partition,
    SeparationWitness,
    all_witnesses,
    check_partition,
    complement_product,
)
from .treedec import Node, Tree, _relabel, guillotine_tree


class NoApplicableCase(ValueError):
    pass


@dataclass(frozen=True)
class ProductSpec:
    base: ChannelSpec
    partition: Partition

    def __post_init__(self):
        object.__setattr__(
            self, "partition", check_partition(self.partition, self.base.n)
        )

    @property
    def product_sizes(self) -> tuple[int, ...]:
        return tuple(prod(self.base[i] for i in part) for part in self.partition)

    @property
    def product_spec(self) -> ChannelSpec:
        return ChannelSpec(self.product_sizes)

    @property
    def t(self) -> int:
        return len(self.partition)

    def part_of(self, i: int) -> int:
        for j, part in enumerate(self.partition):
            if i in part:
                return j
        raise IndexError(i)


@dataclass(frozen=True)
class DisentangleInput:
    spec: ProductSpec
    failing_part: int
    witness: SeparationWitness

    def __post_init__(self):
        base = self.spec.base
        part = self.spec.partition[self.failing_part]
        lhs = prod(q**x for q, x in zip(base.sizes, self.witness.x))
        if lhs != complement_product(base, part):
            raise ValueError("witness does not solve the separation equation")
        if not any(self.witness.x[i] for i in part):
            raise ValueError("witness vanishes on the failing part")

    @property
    def qplus(self) -> tuple[int, ...]:
        return tuple(i for i, x in enumerate(self.witness.x) if x > 0)


@dataclass(frozen=True)
class DisentangleResult:
    codebook: Codebook
    tree: Tree
    case: int
    root_class: int
    input: DisentangleInput
    probabilities: ProbMultiset  # per codeword, from the product-alphabet SPA

    @property
    def core_size(self) -> int:
        return self.input.spec.t


def lift_to_base(cb: Codebook, pspec: ProductSpec) -> Codebook:
    """Copy product-channel component ``j`` onto every base channel of part ``j``."""
    if cb.spec.sizes != pspec.product_sizes:
        raise ValueError("codebook is not over the product alphabets")
    out = []
    for c in cb:
        comps: list[tuple[int, ...]] = [()] * pspec.base.n
        for j, part in enumerate(pspec.partition):
            if any(s > 1 for s in c[j]):
                raise ValueError(f"component {c[j]} of {c} uses a symbol above 1")
            for i in part:
                comps[i] = c[j]
        out.append(Word(tuple(comps)))
    return Codebook(pspec.base, tuple(out))


def _padding(base: ChannelSpec, lengths: Sequence[int], lead: Optional[tuple[int, int]],
             core: Sequence[Word]) -> list[Word]:
    """Words with the given length profile (optionally a fixed first symbol on one
    channel) that are prefix-free with every core word, lexicographic order."""
    ranges = []
    for i, l in enumerate(lengths):
        for pos in range(l):
            if lead is not None and i == lead[0] and pos == 0:
                ranges.append((lead[1],))
            else:
                ranges.append(range(base[i]))
    out = []
    for flat in product(*ranges):
        comps, k = [], 0
        for l in lengths:
            comps.append(tuple(flat[k:k + l]))
            k += l
        word = Word(tuple(comps))
        if all(prefix_free_pair(word, c) for c in core):
            out.append(word)
    return out


def _rooted_tree(base: ChannelSpec, root: int, words: Sequence[Word]) -> Tree:
    """Root of class ``root``; each slice gets a guillotine subtree."""
    slots: list[Optional[Tree]] = [None] * base[root]
    for s in range(base[root]):
        members = [j for j, c in enumerate(words) if c[root] and c[root][0] == s]
        if not members:
            continue
        comps = [
            tuple(comp[1:] if i == root else comp for i, comp in enumerate(words[j].components))
            for j in members
        ]
        slots[s] = _relabel(guillotine_tree(base, comps), members)
    if sum(1 for c in words if c[root]) != len(words):
        raise ValueError(f"channel {root} is empty in some codeword")
    return Node(root, tuple(slots))


def _result(inp: DisentangleInput, core: list[Word], padding: list[Word],
            root: int, case: int) -> DisentangleResult:
    base = inp.spec.base
    cb = Codebook(base, tuple(core) + tuple(padding))
    qx = inp.spec.product_sizes
    expected = prod(base.sizes) - sum(qx)
    if len(padding) != expected:
        raise AssertionError(f"padding has {len(padding)} words, expected {expected}")
    tree = _rooted_tree(base, root, cb.codewords)
    total = prod(qx)
    probs = [Fraction(q, total) for q in qx] + [Fraction(1, total)] * len(padding)
    return DisentangleResult(cb, tree, case, root, inp, ProbMultiset(tuple(probs)))


def _lifted_core(pspec: ProductSpec) -> list[Word]:
    if pspec.t < 3:
        raise ValueError("disentangling needs a partition into at least 3 parts")
    return list(lift_to_base(selvage_core(pspec.product_spec), pspec).codewords)


def case1_channel(inp: DisentangleInput) -> Optional[int]:
    base = inp.spec.base
    part = inp.spec.partition[inp.failing_part]
    return next((i for i in part if inp.witness.x[i] > 0 and base[i] > 2), None)


def disentangle_case1(inp: DisentangleInput) -> DisentangleResult:
    """Rewrite row ``j*`` as ``2^x`` on ``i*`` and ``0^x`` on the rest of ``Q+``."""
    base = inp.spec.base
    i_star = case1_channel(inp)
    if i_star is None:
        raise NoApplicableCase("case 1 needs a size above 2 in the failing part's support")
    j_star = inp.failing_part
    x = inp.witness.x
    core = _lifted_core(inp.spec)
    comps = []
    for i in range(base.n):
        if i == i_star:
            comps.append((2,) * x[i])
        elif x[i] > 0:
            comps.append((0,) * x[i])
        else:
            comps.append(())
    core[j_star] = Word(tuple(comps))

    in_part = set(inp.spec.partition[j_star])
    unit = [1] * base.n
    padding: list[Word] = []
    # slice 0 holds rows j != j*, j*-1; slice 1 holds row j*-1
    for s in (0, 1):
        padding += _padding(base, unit, (i_star, s), [c for c in core if c[i_star][0] == s])
    # slice 2: 2, then x-1 free symbols on i*, x_q on the rest of Q+, one more
    # symbol on every channel of the failing part
    lens2 = [x[i] + (1 if i in in_part else 0) for i in range(base.n)]
    padding += _padding(base, lens2, (i_star, 2), [core[j_star]])
    for s in range(3, base[i_star]):
        padding += _padding(base, unit, (i_star, s), [])
    return _result(inp, core, padding, i_star, 1)


def case2_channels(inp: DisentangleInput) -> Optional[tuple[int, int, int]]:
    """``(i*, i_dagger, r)`` with ``q[i_dagger] == q[i*] ** r``, if any."""
    base = inp.spec.base
    part = inp.spec.partition[inp.failing_part]
    x = inp.witness.x
    stars = [i for i in part if x[i] > 0]
    if not stars or any(base[i] != 2 for i in stars):
        return None
    daggers = [i for i in range(base.n) if i not in part and x[i] == 0]
    for i_star in stars:
        q = base[i_star]
        for i_dag in daggers:
            r, v = 0, 1
            while v < base[i_dag]:
                v *= q
                r += 1
            if v == base[i_dag] and r >= 1:
                return i_star, i_dag, r
    return None


def disentangle_case2(inp: DisentangleInput) -> DisentangleResult:
    """Move the symbol of channel ``i_dagger`` onto ``r`` binary symbols of ``i*``."""
    base = inp.spec.base
    found = case2_channels(inp)
    if found is None:
        raise NoApplicableCase("case 2 needs a power-of-two size outside the support")
    i_star, i_dag, r = found
    t = inp.spec.t
    j_dag = inp.spec.part_of(i_dag)
    core = _lifted_core(inp.spec)
    for j in range(t):
        if j == j_dag:
            continue
        tail = (1,) * r if j == (j_dag - 2) % t else (0,) * r
        comps = list(core[j].components)
        comps[i_star] = comps[i_star] + tail
        comps[i_dag] = ()
        core[j] = Word(tuple(comps))
    lens = [1] * base.n
    lens[i_star] = 1 + r
    lens[i_dag] = 0
    padding = _padding(base, lens, None, core)
    return _result(inp, core, padding, i_star, 2)


def disentangle(base, partition: Sequence[Sequence[int]]) -> DisentangleResult:
    """Scan failing parts and witnesses: first Case 1 hit, else first Case 2 hit."""
    base = base if isinstance(base, ChannelSpec) else ChannelSpec(tuple(base))
    pspec = ProductSpec(base, tuple(tuple(p) for p in partition))
    if pspec.t < 3:
        raise ValueError("disentangling needs a partition into at least 3 parts")
    candidates = []
    for j, part in enumerate(pspec.partition):
        for wit in all_witnesses(part, base):
            candidates.append(DisentangleInput(pspec, j, wit))
    if not candidates:
        raise NoApplicableCase("every part is separated: the partition is a t-separation")
    for inp in candidates:
        if case1_channel(inp) is not None:
            return disentangle_case1(inp)
    for inp in candidates:
        if case2_channels(inp) is not None:
            return disentangle_case2(inp)
    raise NoApplicableCase("no failing part and witness meet either case's premises")


def product_spa(pspec: ProductSpec) -> ProbMultiset:
    return spa(pspec.product_spec)
