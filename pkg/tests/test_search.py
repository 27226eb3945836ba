import heapq
import itertools
import math
import random
from fractions import Fraction
from functools import lru_cache

import mpmath
import pytest
from sympy.utilities.iterables import multiset_permutations

from mcprefix.codes import expected_length, is_prefix_code
from mcprefix.exactnum import exact_from_ln, exact_sum, ln_int
from mcprefix.search import assignment_cost, optimal_tree_code, sorted_assignment
from mcprefix.selvage import spa
from mcprefix.treedec import tree_decodes


def leaf_profiles(sizes, m):
    """Every multiset of leaf length vectors over all trees with ``m`` leaves.

    Internal nodes pick a channel and between 2 and q children; unary nodes
    only add cost, so they are left out.
    """
    n = len(sizes)

    @lru_cache(maxsize=None)
    def shapes(m):
        if m == 1:
            return frozenset({((0,) * n,)})
        out = set()
        for c, q in enumerate(sizes):
            for k in range(2, min(q, m) + 1):
                for split in _compositions(m, k):
                    for kids in itertools.product(*(shapes(s) for s in split)):
                        leaves = []
                        for kid in kids:
                            for v in kid:
                                leaves.append(tuple(x + (i == c) for i, x in enumerate(v)))
                        out.add(tuple(sorted(leaves)))
        return frozenset(out)

    return shapes(m)


def _compositions(m, k):
    # non-increasing parts suffice since children are unordered
    def rec(rem, k, top):
        if k == 0:
            if rem == 0:
                yield ()
            return
        for first in range(min(rem - k + 1, top), 0, -1):
            for rest in rec(rem - first, k - 1, first):
                yield (first,) + rest
    return rec(m, k, m)


def brute_optimum(probs, sizes, all_perms=False):
    """Exact values tied for the best tree and assignment.

    Floats shortlist candidates; survivors are ranked at 60 digits.
    """
    flogs = [math.log(q) for q in sizes]
    shortlist, best = [], None
    for prof in leaf_profiles(sizes, len(probs)):
        if all_perms:
            arrangements = multiset_permutations(list(prof))
        else:
            # rearrangement: heaviest probability on the shortest leaf
            by_len = sorted(prof, key=lambda v: sum(l * g for l, g in zip(v, flogs)))
            order_p = sorted(range(len(probs)), key=lambda j: -probs[j])
            arr = [None] * len(probs)
            for j, v in zip(order_p, by_len):
                arr[j] = v
            arrangements = [arr]
        for arr in arrangements:
            val = sum(float(p) * sum(l * g for l, g in zip(v, flogs)) for p, v in zip(probs, arr))
            if best is None or val < best - 1e-9:
                best = val
                shortlist = [c for c in shortlist if c[0] <= best + 1e-9]
            if val <= best + 1e-9:
                shortlist.append((val, tuple(arr)))
    mpmath.mp.dps = 60
    logs = [mpmath.log(q) for q in sizes]
    scored = []
    for _, arr in shortlist:
        hp = sum(mpmath.mpf(p.numerator) / p.denominator * sum(l * g for l, g in zip(v, logs))
                 for p, v in zip(probs, arr))
        scored.append((hp, arr))
    top = min(h for h, _ in scored)
    tol = mpmath.mpf(10) ** -40
    return [
        exact_sum(ln_int(q) * (p * v[i]) for p, v in zip(probs, arr) for i, q in enumerate(sizes))
        for h, arr in scored if h - top <= tol
    ]


def random_distribution(rng, m):
    raw = [rng.randint(1, 12) for _ in range(m)]
    s = sum(raw)
    return [Fraction(r, s) for r in raw]


def huffman_cost(probs, q):
    """Textbook q-ary Huffman with zero padding; returns merged mass sum."""
    items = list(probs)
    while (len(items) - 1) % (q - 1):
        items.append(Fraction(0))
    heapq.heapify(items)
    total = Fraction(0)
    while len(items) > 1:
        merged = sum(heapq.heappop(items) for _ in range(q))
        total += merged
        heapq.heappush(items, merged)
    return ln_int(q) * total


def test_table1_values():
    assert optimal_tree_code(spa((2, 2, 2)), (2, 2, 2)).expected.to_decimal(6) == "1.559581"
    res = optimal_tree_code(spa((5, 3, 2)), (5, 3, 2))
    assert res.certified
    assert res.expected.to_decimal(6) == "2.980124"
    assert res.entropy.to_decimal(6) == "2.976887"
    assert not res.optimal_is_entropy
    assert res.redundancy > exact_from_ln(1)


def test_single_leaf():
    res = optimal_tree_code([Fraction(1)], (2, 3))
    assert res.expected.is_zero() and res.certified


def test_result_codebook_matches_value():
    res = optimal_tree_code(spa((2, 2, 2)), (2, 2, 2))
    cb = res.codebook()
    assert is_prefix_code(cb)
    assert tree_decodes(res.tree, cb)
    assert expected_length(cb, res.probs) == res.expected


def test_sorted_assignment():
    ln2 = exact_from_ln(2)
    probs = [Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)]
    lengths = [ln2 * 2, ln2 * 2, ln2]
    pairs = sorted_assignment(probs, lengths)
    assert pairs == [(1, 2), (0, 0), (2, 1)]
    assert assignment_cost(probs, lengths, pairs) == ln2 * Fraction(3, 2)
    with pytest.raises(ValueError):
        sorted_assignment(probs, lengths[:2])


def test_bad_distribution():
    with pytest.raises(ValueError):
        optimal_tree_code([Fraction(1, 2)], (2,))


def test_brute_force_all_permutations_small():
    rng = random.Random(101)
    for _ in range(30):
        sizes = tuple(rng.randint(2, 3) for _ in range(rng.randint(1, 3)))
        probs = random_distribution(rng, rng.randint(2, 6))
        exacts = brute_optimum(probs, sizes, all_perms=True)
        res = optimal_tree_code(probs, sizes)
        assert res.expected in exacts


def test_brute_force_equivalence():
    rng = random.Random(202)
    for _ in range(60):
        sizes = tuple(rng.randint(2, 3) for _ in range(rng.randint(1, 3)))
        probs = random_distribution(rng, rng.randint(2, 6))
        exacts = brute_optimum(probs, sizes)
        res = optimal_tree_code(probs, sizes)
        assert res.certified
        assert res.expected in exacts


def test_single_channel_huffman():
    rng = random.Random(303)
    for _ in range(50):
        q = rng.randint(2, 5)
        probs = random_distribution(rng, rng.randint(2, 9))
        assert optimal_tree_code(probs, (q,)).expected == huffman_cost(probs, q)


def test_equal_sizes_same_as_one_channel():
    rng = random.Random(404)
    for _ in range(20):
        q = rng.randint(2, 4)
        probs = random_distribution(rng, rng.randint(2, 8))
        assert optimal_tree_code(probs, (q, q, q)).expected == optimal_tree_code(probs, (q,)).expected


def test_expected_at_least_entropy():
    rng = random.Random(505)
    for _ in range(40):
        sizes = tuple(rng.randint(2, 6) for _ in range(rng.randint(1, 3)))
        res = optimal_tree_code(random_distribution(rng, rng.randint(2, 10)), sizes)
        assert res.expected >= res.entropy


def test_budget_returns_incumbent():
    probs = spa((5, 3, 2))
    res = optimal_tree_code(probs, (5, 3, 2), budget=0)
    assert not res.certified
    assert res.expected >= optimal_tree_code(probs, (5, 3, 2)).expected
    assert tree_decodes(res.tree, res.codebook())
