"""Rooted plane ternary trees: counting, enumeration, encoding, sampling.

A tree is either a leaf or an internal node with exactly three ordered
children.  The order of a tree is its number of internal nodes; sibling
order is structurally significant and is never normalised away.  These
trees are the canonical encoding of the recursive triangulations handled
in :mod:`ransdist.graph`.

Random generation is deterministic given a seeded ``random.Random``
(Mersenne Twister); all integer draws go through rejection sampling on
``getrandbits`` so sequences are reproducible across Python versions.
Parallel callers should derive independent streams by seeding one
generator per worker, e.g. ``random.Random(base_seed * 100003 + worker)``.
"""

from __future__ import annotations

import math
import random
from functools import lru_cache
from typing import Iterator, Sequence

DEFAULT_ENUMERATION_CAP = 8


class EnumerationCapError(ValueError):
    """Raised when exhaustive enumeration is asked beyond the configured cap."""


class WordParseError(ValueError):
    """Malformed preorder word; ``offset`` is the first offending position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class TernaryTree:
    """A rooted plane ternary tree; ``children`` is empty for a leaf."""

    __slots__ = ("children", "order")

    def __init__(self, children: Sequence["TernaryTree"] = ()):
        children = tuple(children)
        if children and len(children) != 3:
            raise ValueError("an internal node needs exactly three children")
        self.children = children
        self.order = 1 + sum(c.order for c in children) if children else 0

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def __eq__(self, other):
        if not isinstance(other, TernaryTree):
            return NotImplemented
        return self is other or encode_tree(self) == encode_tree(other)

    def __hash__(self):
        return hash(encode_tree(self))

    def __repr__(self):
        return f"TernaryTree(order={self.order})"


LEAF = TernaryTree()


def encode_tree(tree: TernaryTree) -> str:
    """Preorder word of a tree: 'N' per internal node, 'L' per leaf."""
    out: list[str] = []
    stack = [tree]
    while stack:
        node = stack.pop()
        if node.is_leaf:
            out.append("L")
        else:
            out.append("N")
            stack.extend(reversed(node.children))
    return "".join(out)


def decode_tree(word: str) -> TernaryTree:
    """Parse a preorder word back into a tree; inverse of :func:`encode_tree`."""
    if not word:
        raise WordParseError("empty word", 0)
    # stack holds (children-so-far) lists of open internal nodes
    stack: list[list[TernaryTree]] = []
    root: TernaryTree | None = None
    for i, ch in enumerate(word):
        if root is not None:
            raise WordParseError("trailing symbols after a complete tree", i)
        if ch == "N":
            stack.append([])
            continue
        if ch != "L":
            raise WordParseError(f"invalid symbol {ch!r}", i)
        node = LEAF
        while True:
            if not stack:
                root = node
                break
            stack[-1].append(node)
            if len(stack[-1]) < 3:
                break
            node = TernaryTree(stack.pop())
    if root is None:
        raise WordParseError("word ends inside an incomplete tree", len(word))
    return root


def count_trees(n: int) -> int:
    """Number of ternary trees of order n: C(3n, n) / (2n + 1), exactly."""
    if n < 0:
        raise ValueError("order must be nonnegative")
    q, r = divmod(math.comb(3 * n, n), 2 * n + 1)
    assert r == 0
    return q


def count_trees_by_recurrence(limit: int) -> list[int]:
    """Counts T_0..T_limit from the triple-convolution recurrence.

    Independent of :func:`count_trees`; kept as the cross-check oracle for
    the closed form.
    """
    t = [1]
    for n in range(1, limit + 1):
        m = n - 1
        total = 0
        for a in range(m + 1):
            inner = sum(t[b] * t[m - a - b] for b in range(m - a + 1))
            total += t[a] * inner
        t.append(total)
    return t


class TreeCountTable:
    """Memoised table of tree counts, grown on demand.

    Also caches the pair convolutions ``pair(m) = sum_{b+c=m} T_b T_c``
    needed by the count-driven sampler.
    """

    def __init__(self):
        self._counts: list[int] = [1]
        self._pairs: list[int] = [1]

    def count(self, n: int) -> int:
        while len(self._counts) <= n:
            self._counts.append(count_trees(len(self._counts)))
        return self._counts[n]

    def pair(self, m: int) -> int:
        self.count(m)
        while len(self._pairs) <= m:
            k = len(self._pairs)
            self._pairs.append(sum(self._counts[b] * self._counts[k - b] for b in range(k + 1)))
        return self._pairs[m]

    def __getitem__(self, n: int) -> int:
        return self.count(n)


_SHARED_TABLE = TreeCountTable()


@lru_cache(maxsize=None)
def _all_trees(n: int) -> tuple[TernaryTree, ...]:
    if n == 0:
        return (LEAF,)
    out: list[TernaryTree] = []
    m = n - 1
    for a in range(m + 1):
        for b in range(m - a + 1):
            c = m - a - b
            for ta in _all_trees(a):
                for tb in _all_trees(b):
                    for tc in _all_trees(c):
                        out.append(TernaryTree((ta, tb, tc)))
    return tuple(out)


def enumerate_trees(n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[TernaryTree]:
    """Yield every tree of order n exactly once, in a fixed order."""
    if n < 0:
        raise ValueError("order must be nonnegative")
    if n > cap:
        raise EnumerationCapError(
            f"exhaustive enumeration of order {n} exceeds the cap of {cap}; "
            f"raise the cap explicitly if you really want this"
        )
    return iter(_all_trees(n))


def _randbelow(rng: random.Random, bound: int) -> int:
    """Uniform integer in [0, bound) via getrandbits rejection."""
    if bound <= 0:
        raise ValueError("bound must be positive")
    k = bound.bit_length()
    while True:
        r = rng.getrandbits(k)
        if r < bound:
            return r


def _sample_by_counts(n: int, rng: random.Random, table: TreeCountTable) -> TernaryTree:
    # Exact uniform sampling by integer counting: pick the root composition
    # (a, b, c) of n-1 with weight T_a T_b T_c, recurse on each part.
    table.count(n)

    def split(m: int) -> tuple[int, int, int]:
        # m = order of a subtree to build (m >= 1); choose child orders.
        rest = m - 1
        idx = _randbelow(rng, table.count(m))
        for a in range(rest + 1):
            w = table.count(a) * table.pair(rest - a)
            if idx < w:
                break
            idx -= w
        idx //= table.count(a)
        for b in range(rest - a + 1):
            w = table.count(b) * table.count(rest - a - b)
            if idx < w:
                break
            idx -= w
        return a, b, rest - a - b

    # Iterative build: work items are orders; assembled depth-first.
    def build(m: int) -> TernaryTree:
        if m == 0:
            return LEAF
        # explicit stack of (orders, children collected)
        stack: list[tuple[list[int], list[TernaryTree]]] = [([m], [])]
        while True:
            orders, done = stack[-1]
            if not orders:
                if len(stack) == 1:
                    return done[0]
                node = TernaryTree(tuple(done))
                stack.pop()
                stack[-1][1].append(node)
                continue
            m0 = orders.pop(0)
            if m0 == 0:
                done.append(LEAF)
            else:
                a, b, c = split(m0)
                stack.append(([a, b, c], []))
        # unreachable

    return build(n)


def _sample_by_ballot(n: int, rng: random.Random) -> TernaryTree:
    # Cycle lemma: shuffle n up-steps (+2) and 2n+1 down-steps (-1); of the
    # 3n+1 rotations exactly one is a valid preorder walk, namely the one
    # starting just after the last minimum of the prefix sums.  All
    # rotations are distinct (the total sum is -1), so the result is
    # exactly uniform.
    if n == 0:
        return LEAF
    steps = [2] * n + [-1] * (2 * n + 1)
    for i in range(len(steps) - 1, 0, -1):  # Fisher-Yates with our own draws
        j = _randbelow(rng, i + 1)
        steps[i], steps[j] = steps[j], steps[i]
    # Start just after the FIRST attainment of the minimum prefix sum; later
    # ties correspond to the valid word's internal returns to zero and give
    # invalid rotations.
    height = 0
    low, start = 0, 0
    for i, s in enumerate(steps):
        height += s
        if height < low:
            low, start = height, i + 1
    rotated = steps[start:] + steps[:start]
    word = "".join("N" if s == 2 else "L" for s in rotated)
    return decode_tree(word)


def sample_tree(n: int, rng: random.Random, strategy: str = "auto",
                table: TreeCountTable | None = None) -> TernaryTree:
    """Uniform random tree of order n.

    ``strategy`` picks the algorithm: ``"counts"`` (recursive splitting by
    exact subtree counts, needs count tables up to n), ``"ballot"``
    (linear-time shuffled-walk rotation), or ``"auto"`` which uses counts
    for small n and the ballot method beyond.  Both produce the exact
    uniform distribution.
    """
    if n < 0:
        raise ValueError("order must be nonnegative")
    if strategy == "auto":
        strategy = "counts" if n <= 64 else "ballot"
    if strategy == "counts":
        return _sample_by_counts(n, rng, table or _SHARED_TABLE)
    if strategy == "ballot":
        return _sample_by_ballot(n, rng)
    raise ValueError(f"unknown sampling strategy {strategy!r}")
