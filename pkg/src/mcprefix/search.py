"""Exact optimal tree-decodable codes for a probability multiset.

A decoding tree's cost is ``sum(W(v) * ln q_class(v))`` over internal nodes,
with ``W(v)`` the probability mass below ``v``.  Building the tree bottom up
as a sequence of merges, the cost depends only on the multiset of item
weights still to be merged.  In an optimal tree the costliest leaf has only
leaf siblings, and the k smallest items can be swapped into those slots, so
some optimum merges the k smallest items first, under the smallest alphabet
with at least k symbols.  Memoising over weight multisets therefore visits
every candidate that can be optimal and certifies the minimum.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

from .codes import ChannelSpec, Codebook, ProbMultiset, descriptive_length_of, entropy
from .exactnum import ZERO, ExactReal, exact_compare, exact_sum, ln_int
from .treedec import Leaf, Node, Tree, tree_words

log = logging.getLogger(__name__)


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchResult:
    spec: ChannelSpec
    probs: ProbMultiset
    tree: Tree  # leaf index = index into probs
    expected: ExactReal
    entropy: ExactReal
    certified: bool
    states: int = 0

    @property
    def optimal_is_entropy(self) -> bool:
        return self.expected == self.entropy

    @property
    def redundancy(self) -> ExactReal:
        return self.expected - self.entropy

    def codebook(self) -> Codebook:
        words = tree_words(self.tree, self.spec.n)
        return Codebook(self.spec, tuple(words[j] for j in range(len(self.probs))))

    def leaf_lengths(self) -> dict[int, tuple[int, ...]]:
        return {
            j: tuple(len(c) for c in word.components)
            for j, word in tree_words(self.tree, self.spec.n).items()
        }


def sorted_assignment(probs: Sequence[Fraction], lengths: Sequence[ExactReal]) -> list[tuple[int, int]]:
    """Pairs ``(prob_index, length_index)``: largest mass on the shortest length.

    Ties keep input order on both sides.
    """
    if len(probs) != len(lengths):
        raise ValueError(f"{len(probs)} probabilities for {len(lengths)} lengths")
    by_prob = sorted(range(len(probs)), key=lambda j: -Fraction(probs[j]))
    by_len = _sorted_exact(range(len(lengths)), lengths)
    return list(zip(by_prob, by_len))


def _sorted_exact(indices, values: Sequence[ExactReal]) -> list[int]:
    from functools import cmp_to_key

    def cmp(a, b):
        c = exact_compare(values[a], values[b])
        return c if c else (a > b) - (a < b)

    return sorted(indices, key=cmp_to_key(cmp))


def assignment_cost(probs: Sequence[Fraction], lengths: Sequence[ExactReal],
                    pairs: Sequence[tuple[int, int]]) -> ExactReal:
    return exact_sum(lengths[l] * Fraction(probs[p]) for p, l in pairs)


def _merge_channels(spec: ChannelSpec) -> dict[int, int]:
    """For each arity k >= 2, the cheapest channel with at least k symbols."""
    out = {}
    for k in range(2, max(spec.sizes) + 1):
        best = None
        for i, q in enumerate(spec.sizes):
            if q >= k and (best is None or q < spec[best]):
                best = i
        out[k] = best
    return out


class _MergeDP:
    def __init__(self, spec: ChannelSpec, deadline: Optional[float]):
        self.spec = spec
        self.channel = _merge_channels(spec)
        self.kmax = max(spec.sizes)
        self.deadline = deadline
        self.memo: dict[tuple[int, ...], tuple[ExactReal, int]] = {}

    def best(self, state: tuple[int, ...]) -> ExactReal:
        hit = self.memo.get(state)
        if hit is not None:
            return hit[0]
        if len(state) == 1:
            self.memo[state] = (ZERO, 0)
            return ZERO
        if self.deadline is not None and len(self.memo) % 256 == 0:
            if time.monotonic() > self.deadline:
                raise BudgetExceeded
        choice, value = 0, None
        for k in range(2, min(len(state), self.kmax) + 1):
            s = sum(state[:k])
            rest = tuple(sorted(state[k:] + (s,)))
            cost = ln_int(self.spec[self.channel[k]]) * s + self.best(rest)
            if value is None or exact_compare(cost, value) < 0:
                choice, value = k, cost
        self.memo[state] = (value, choice)
        return value


def _build_tree(spec: ChannelSpec, weights: Sequence[int], choose) -> Tree:
    """Replay merges; ``choose(state)`` gives the arity to merge next."""
    seq = 0
    items = []
    for j, wt in enumerate(weights):
        items.append((wt, seq, Leaf(j)))
        seq += 1
    channel = _merge_channels(spec)
    while len(items) > 1:
        items.sort(key=lambda it: (it[0], it[1]))
        k = choose(tuple(it[0] for it in items))
        group, items = items[:k], items[k:]
        i = channel[k]
        slots = [g[2] for g in group] + [None] * (spec[i] - k)
        items.append((sum(g[0] for g in group), seq, Node(i, tuple(slots))))
        seq += 1
    return items[0][2]


def _greedy_choice(spec: ChannelSpec):
    channel = _merge_channels(spec)
    kmax = max(spec.sizes)

    def choose(state):
        # cheapest merge per item removed, compared exactly
        best_k, best = None, None
        for k in range(2, min(len(state), kmax) + 1):
            rate = ln_int(spec[channel[k]]) * Fraction(sum(state[:k]), k - 1)
            if best is None or exact_compare(rate, best) < 0:
                best_k, best = k, rate
        return best_k

    return choose


def _tree_cost(spec: ChannelSpec, tree: Tree, probs: Sequence[Fraction]) -> tuple[ExactReal, Tree]:
    """Cost after re-pairing leaves by :func:`sorted_assignment`."""
    words = tree_words(tree, spec.n)
    slots = sorted(words)
    lengths = [descriptive_length_of([len(c) for c in words[k].components], spec) for k in slots]
    pairs = sorted_assignment(probs, lengths)
    relabel = {slots[l]: p for p, l in pairs}
    return assignment_cost(probs, lengths, pairs), _relabel_leaves(tree, relabel)


def _relabel_leaves(tree: Tree, mapping: dict[int, int]) -> Tree:
    if isinstance(tree, Leaf):
        return Leaf(mapping[tree.index])
    return Node(tree.cls, tuple(None if c is None else _relabel_leaves(c, mapping) for c in tree.children))


def optimal_tree_code(p, spec, budget: Optional[float] = None) -> SearchResult:
    """Minimum expected descriptive length over all decoding trees with ``len(p)`` leaves.

    ``budget`` is a wall-clock limit in seconds; when it runs out the greedy
    incumbent is returned with ``certified=False``.
    """
    spec = spec if isinstance(spec, ChannelSpec) else ChannelSpec(tuple(spec))
    probs = p if isinstance(p, ProbMultiset) else ProbMultiset(tuple(p))
    probs.require_distribution()
    if len(probs) == 0:
        raise ValueError("empty probability multiset")
    h = entropy(probs)
    if len(probs) == 1:
        return SearchResult(spec, probs, Leaf(0), ZERO, h, True, 1)

    den = lcm(*(x.denominator for x in probs))
    weights = [int(x * den) for x in probs]

    greedy = _build_tree(spec, weights, _greedy_choice(spec))
    greedy_cost, greedy_tree = _tree_cost(spec, greedy, probs.probs)

    deadline = None if budget is None else time.monotonic() + budget
    dp = _MergeDP(spec, deadline)
    start = tuple(sorted(weights))
    try:
        value = dp.best(start) * Fraction(1, den)
    except BudgetExceeded:
        log.warning("search budget of %ss exhausted; returning greedy incumbent", budget)
        return SearchResult(spec, probs, greedy_tree, greedy_cost, h, False, len(dp.memo))

    tree = _build_tree(spec, weights, lambda state: dp.memo[state][1])
    cost, tree = _tree_cost(spec, tree, probs.probs)
    if cost != value:
        raise AssertionError(f"replayed tree cost {cost} differs from optimum {value}")
    if exact_compare(greedy_cost, value) < 0:
        raise AssertionError("greedy incumbent beats the certified optimum")
    return SearchResult(spec, probs, tree, value, h, True, len(dp.memo))
