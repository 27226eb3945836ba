"""Decoding trees and the guillotine-cut decision of tree-decodability."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .codes import ChannelSpec, Codebook, Word, is_prefix_code
from .rpg import Block, Container


class DecodeError(ValueError):
    pass


@dataclass(frozen=True)
class Leaf:
    index: int


@dataclass(frozen=True)
class Node:
    """Internal node of class ``cls``: one slot per symbol of channel ``cls``."""

    cls: int
    children: tuple[Optional["Tree"], ...]

    def __post_init__(self):
        if not any(c is not None for c in self.children):
            raise ValueError("internal node without children")


Tree = Union[Leaf, Node]


@dataclass(frozen=True)
class NotDecodable:
    """An uncuttable trimmed sub-codebook (the interweave witness)."""

    witness: Codebook
    rows: tuple[int, ...]
    channels: tuple[int, ...]


@dataclass(frozen=True)
class TrimResult:
    codebook: Codebook
    prefix: Word
    removed_channels: frozenset[int]
    kept_channels: tuple[int, ...]


Comps = tuple[tuple[int, ...], ...]


def epsilon_locating(cb: Codebook) -> tuple[frozenset[int], ...]:
    """Per channel, the rows whose component on that channel is empty."""
    return tuple(
        frozenset(j for j, c in enumerate(cb) if not c[i]) for i in range(cb.spec.n)
    )


def theorem2_blocked(cb: Codebook) -> bool:
    """Every channel has an empty component somewhere, so no root class works."""
    return len(cb) > 1 and all(epsilon_locating(cb))


def _common_prefix(strings: Sequence[tuple[int, ...]]) -> tuple[int, ...]:
    first = strings[0]
    k = len(first)
    for s in strings[1:]:
        k = min(k, len(s))
        for a in range(k):
            if s[a] != first[a]:
                k = a
                break
    return first[:k]


def _strip(words: Sequence[Comps], n: int) -> tuple[tuple[tuple[int, ...], ...], list[Comps]]:
    prefix = tuple(_common_prefix([c[i] for c in words]) for i in range(n))
    stripped = [
        tuple(c[i][len(prefix[i]):] for i in range(n)) for c in words
    ]
    return prefix, stripped


def trim(cb: Codebook) -> TrimResult:
    """Strip the per-channel common prefix, then drop channels left all-empty.

    When every channel ends up empty (a single codeword) the original channels
    are kept so the result is still a valid codebook.
    """
    n = cb.spec.n
    if len(cb) == 0:
        raise ValueError("cannot trim an empty codebook")
    prefix, stripped = _strip([c.components for c in cb], n)
    dummy = frozenset(i for i in range(n) if all(not s[i] for s in stripped))
    kept = tuple(i for i in range(n) if i not in dummy)
    if not kept:
        reduced = Codebook(cb.spec, (Word(tuple(() for _ in range(n))),))
    else:
        sizes = tuple(cb.spec[i] for i in kept)
        reduced = Codebook(
            ChannelSpec(sizes),
            tuple(Word(tuple(s[i] for i in kept)) for s in stripped),
        )
    return TrimResult(reduced, Word(prefix), dummy, kept)


def _chain(prefix: Sequence[tuple[int, ...]], spec: ChannelSpec, inner: Tree) -> Tree:
    steps = [(i, s) for i, comp in enumerate(prefix) for s in comp]
    node = inner
    for i, s in reversed(steps):
        slots = [None] * spec[i]
        slots[s] = node
        node = Node(i, tuple(slots))
    return node


def _relabel(tree: Tree, mapping: Sequence[int]) -> Tree:
    if isinstance(tree, Leaf):
        return Leaf(mapping[tree.index])
    return Node(
        tree.cls,
        tuple(None if c is None else _relabel(c, mapping) for c in tree.children),
    )


class _Decider:
    def __init__(self, spec: ChannelSpec):
        self.spec = spec
        self.n = spec.n
        self.memo: dict[tuple[Comps, ...], tuple] = {}

    def solve(self, words: tuple[Comps, ...]):
        """``words`` is sorted; leaves of the returned tree index into it.

        Returns ``("tree", tree)`` or ``("fail", local_rows, stripped_words)``.
        """
        hit = self.memo.get(words)
        if hit is not None:
            return hit
        res = self._solve(words)
        self.memo[words] = res
        return res

    def _solve(self, words):
        prefix, stripped = _strip(words, self.n)
        if len(words) == 1:
            return ("tree", _chain(prefix, self.spec, Leaf(0)))
        # any cuttable channel is as good as another: a decoding tree for the
        # whole set restricts to one for each slice of any valid cut
        cut = next(
            (i for i in range(self.n) if all(s[i] for s in stripped)), None
        )
        if cut is None:
            return ("fail", tuple(range(len(words))), tuple(stripped))
        groups: dict[int, list[int]] = {}
        for k, s in enumerate(stripped):
            groups.setdefault(s[cut][0], []).append(k)
        slots: list[Optional[Tree]] = [None] * self.spec[cut]
        for sym in sorted(groups):
            members = groups[sym]
            sub = []
            for k in members:
                s = stripped[k]
                sub.append((tuple(c[1:] if i == cut else c for i, c in enumerate(s)), k))
            sub.sort()
            local = tuple(x for x, _ in sub)
            mapping = [k for _, k in sub]
            res = self.solve(local)
            if res[0] == "fail":
                return ("fail", tuple(mapping[r] for r in res[1]), res[2])
            slots[sym] = _relabel(res[1], mapping)
        return ("tree", _chain(prefix, self.spec, Node(cut, tuple(slots))))


def decide_tree_decodable(cb: Codebook) -> Union[Tree, NotDecodable]:
    """A decoding tree for ``cb`` or the first uncuttable trimmed sub-codebook.

    Raises ``ValueError`` when ``cb`` is not a prefix code.
    """
    if len(cb) == 0:
        raise ValueError("empty codebook")
    if not is_prefix_code(cb):
        raise ValueError("input is not a prefix code")
    order = sorted(range(len(cb)), key=lambda j: cb[j].components)
    words = tuple(cb[j].components for j in order)
    res = _Decider(cb.spec).solve(words)
    if res[0] == "tree":
        return _relabel(res[1], order)
    rows = tuple(sorted(order[k] for k in res[1]))
    by_row = dict(zip((order[k] for k in res[1]), res[2]))
    stripped = [by_row[r] for r in rows]
    n = cb.spec.n
    kept = tuple(i for i in range(n) if any(s[i] for s in stripped))
    witness = Codebook(
        ChannelSpec(tuple(cb.spec[i] for i in kept)),
        tuple(Word(tuple(s[i] for i in kept)) for s in stripped),
    )
    return NotDecodable(witness, rows, kept)


def guillotine_tree(spec: ChannelSpec, words: Sequence[Comps]) -> Tree:
    """Decoding tree over raw component tuples; leaves index into ``words``.

    Raises ``ValueError`` with the uncuttable rows when no tree exists.
    """
    order = sorted(range(len(words)), key=lambda j: words[j])
    res = _Decider(spec).solve(tuple(words[j] for j in order))
    if res[0] == "fail":
        rows = sorted(order[k] for k in res[1])
        raise ValueError(f"rows {rows} admit no guillotine cut")
    return _relabel(res[1], order)


def is_tree_decodable(cb: Codebook) -> bool:
    return not isinstance(decide_tree_decodable(cb), NotDecodable)


def cuttable_channels(cb: Codebook) -> list[int]:
    """Channels on which the trimmed codebook admits a guillotine cut."""
    _, stripped = _strip([c.components for c in cb], cb.spec.n)
    if len(cb) < 2:
        return []
    return [i for i in range(cb.spec.n) if all(s[i] for s in stripped)]


def tree_words(tree: Tree, n: int) -> dict[int, Word]:
    """The codeword spelled along the path to each leaf."""
    out: dict[int, Word] = {}
    stack = [(tree, tuple(() for _ in range(n)))]
    while stack:
        node, acc = stack.pop()
        if isinstance(node, Leaf):
            if node.index in out:
                raise ValueError(f"leaf {node.index} appears twice")
            out[node.index] = Word(acc)
            continue
        for s, child in enumerate(node.children):
            if child is not None:
                nxt = tuple(c + (s,) if i == node.cls else c for i, c in enumerate(acc))
                stack.append((child, nxt))
    return out


def tree_decodes(tree: Tree, cb: Codebook) -> bool:
    """True iff the leaves spell exactly the rows of ``cb``."""
    try:
        spelled = tree_words(tree, cb.spec.n)
    except ValueError:
        return False
    return spelled == {j: c for j, c in enumerate(cb)}


def leaf_count(tree: Tree) -> int:
    if isinstance(tree, Leaf):
        return 1
    return sum(leaf_count(c) for c in tree.children if c is not None)


def encode(cb: Codebook, source: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    """Componentwise concatenation of the codewords for ``source``."""
    streams: list[list[int]] = [[] for _ in range(cb.spec.n)]
    for j in source:
        if not 0 <= j < len(cb):
            raise IndexError(f"source symbol {j} out of range")
        for i, comp in enumerate(cb[j].components):
            streams[i].extend(comp)
    return tuple(tuple(s) for s in streams)


def decode(tree: Tree, streams: Sequence[deque]) -> int:
    """Walk the tree, popping one symbol per step; returns the leaf index."""
    node = tree
    while isinstance(node, Node):
        q = streams[node.cls]
        if not q:
            raise DecodeError(f"channel {node.cls} exhausted")
        s = q.popleft()
        if not 0 <= s < len(node.children) or node.children[s] is None:
            raise DecodeError(f"no branch for symbol {s} on channel {node.cls}")
        node = node.children[s]
    return node.index


def decode_all(tree: Tree, streams: Sequence[Sequence[int]]) -> list[int]:
    qs = [deque(s) for s in streams]
    out = []
    while any(qs):
        out.append(decode(tree, qs))
    return out


def leaf_regions(tree: Tree, container: Container) -> dict[int, Block]:
    """Replay the tree as guillotine cuts; region reached by each leaf."""
    out: dict[int, Block] = {}
    root = Block((0,) * container.spec.n, container.edges)
    stack = [(tree, root)]
    while stack:
        node, box = stack.pop()
        if isinstance(node, Leaf):
            out[node.index] = box
            continue
        i, q = node.cls, container.spec[node.cls]
        if box.size[i] % q:
            raise ValueError(f"cannot cut edge {box.size[i]} into {q} parts")
        step = box.size[i] // q
        for s, child in enumerate(node.children):
            if child is None:
                continue
            origin = list(box.origin)
            size = list(box.size)
            origin[i] += s * step
            size[i] = step
            stack.append((child, Block(tuple(origin), tuple(size))))
    return out


def to_sexpr(tree: Tree) -> str:
    if isinstance(tree, Leaf):
        return f"L{tree.index}"
    inner = " ".join("_" if c is None else to_sexpr(c) for c in tree.children)
    return f"({tree.cls} {inner})"


_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def parse_sexpr(text: str, spec: ChannelSpec | None = None) -> Tree:
    """Inverse of :func:`to_sexpr`; checks slot counts when ``spec`` is given."""
    tokens = _TOKEN.findall(text)
    pos = 0

    def node() -> Optional[Tree]:
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of tree text")
        tok = tokens[pos]
        pos += 1
        if tok == "_":
            return None
        if tok.startswith("L") and tok[1:].isdigit():
            return Leaf(int(tok[1:]))
        if tok != "(":
            raise ValueError(f"unexpected token {tok!r}")
        if pos >= len(tokens) or not tokens[pos].isdigit():
            raise ValueError("internal node must start with its class")
        cls = int(tokens[pos])
        pos += 1
        kids = []
        while pos < len(tokens) and tokens[pos] != ")":
            kids.append(node())
        if pos >= len(tokens):
            raise ValueError("missing ')'")
        pos += 1
        if spec is not None:
            if not 0 <= cls < spec.n:
                raise ValueError(f"class {cls} out of range")
            if len(kids) != spec[cls]:
                raise ValueError(f"class {cls} node needs {spec[cls]} slots, got {len(kids)}")
        return Node(cls, tuple(kids))

    tree = node()
    if tree is None:
        raise ValueError("empty tree")
    if pos != len(tokens):
        raise ValueError("trailing tokens after tree")
    return tree
