"""Selvage core, selvage code and the probability assembly it is optimal for."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import prod

from .codes import (
    ChannelSpec,
    Codebook,
    ProbMultiset,
    Word,
    is_prefix_code,
    kraft_sum,
    local_redundancies,
    prefix_free_pair,
    redundancy,
)
from .treedec import NotDecodable, decide_tree_decodable, epsilon_locating


@dataclass(frozen=True)
class SelvageOutput:
    core: Codebook
    full: Codebook
    spa: ProbMultiset
    unit_count: int


def _as_spec(spec) -> ChannelSpec:
    return spec if isinstance(spec, ChannelSpec) else ChannelSpec(tuple(spec))


def core_word(j: int, n: int) -> Word:
    comps = []
    for i in range(n):
        if i == j:
            comps.append(())
        elif i == (j + 1) % n:
            comps.append((1,))
        else:
            comps.append((0,))
    return Word(tuple(comps))


def selvage_core(spec) -> Codebook:
    """Cyclic core: empty on the diagonal, 1 just after it, 0 elsewhere."""
    spec = _as_spec(spec)
    n = spec.n
    if n < 3:
        raise ValueError(f"selvage core needs n >= 3 channels, got {n}")
    return Codebook(spec, tuple(core_word(j, n) for j in range(n)))


def unit_words(spec: ChannelSpec):
    for symbols in product(*(range(q) for q in spec.sizes)):
        yield Word(tuple((s,) for s in symbols))


def spa(spec) -> ProbMultiset:
    """Core probabilities ``q_j / prod(Q)`` followed by the unit-word mass."""
    spec = _as_spec(spec)
    total = prod(spec.sizes)
    k = total - sum(spec.sizes)
    probs = [Fraction(q, total) for q in spec.sizes] + [Fraction(1, total)] * k
    return ProbMultiset(tuple(probs))


def selvage_code(spec) -> SelvageOutput:
    """Core plus every unit word prefix-free with all core words.

    Unit words come out in lexicographic order after the ``n`` core rows, so
    ``spa(spec)[j]`` pairs with ``full[j]``.
    """
    spec = _as_spec(spec)
    core = selvage_core(spec)
    units = [u for u in unit_words(spec) if all(prefix_free_pair(u, c) for c in core)]
    expected = prod(spec.sizes) - sum(spec.sizes)
    if len(units) != expected:
        raise AssertionError(
            f"unit word count {len(units)} differs from {expected} for {spec}"
        )
    full = Codebook(spec, core.codewords + tuple(units))
    return SelvageOutput(core, full, spa(spec), len(units))


@dataclass
class SelvageReport:
    spec: ChannelSpec
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def verify_selvage(out: SelvageOutput) -> SelvageReport:
    rep = SelvageReport(out.full.spec)
    rep.checks["core_prefix"] = is_prefix_code(out.core)
    rep.checks["full_prefix"] = is_prefix_code(out.full)
    rep.checks["core_not_tree_decodable"] = (
        rep.checks["core_prefix"]
        and isinstance(decide_tree_decodable(out.core), NotDecodable)
    )
    rep.checks["full_not_tree_decodable"] = (
        rep.checks["full_prefix"]
        and isinstance(decide_tree_decodable(out.full), NotDecodable)
    )
    rep.checks["zero_redundancy"] = redundancy(out.full, out.spa).is_zero()
    rep.checks["zero_local_redundancy"] = all(
        r.is_zero() for r in local_redundancies(out.full, out.spa)
    )
    rep.checks["kraft_one"] = kraft_sum(out.full) == 1
    rep.checks["epsilon_diagonal"] = epsilon_locating(out.core) == tuple(
        frozenset({i}) for i in range(out.core.spec.n)
    )
    return rep
