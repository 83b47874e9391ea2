"""Combinatorics of type-A partial flag varieties.

A shape lambda = (lambda_1, ..., lambda_N) of positive integers fixes the
flag variety of nested subspaces of C^n with n = sum(lambda).  Its torus
fixed points and Schubert cells are indexed by tuples I = (I_1, ..., I_N) of
pairwise disjoint subsets of [n] with |I_j| = lambda_j.  This module supplies
the shapes, the index tuples with their cached invariants, the S_n action,
the subset <-> partition dictionary for Grassmannians, and the two integer
invariants feeding the elliptic weight functions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache


@dataclass(frozen=True)
class FlagShape:
    """A composition lambda of n; jumps of the flags."""

    lambdas: tuple[int, ...]

    def __post_init__(self):
        if not self.lambdas or any(l < 1 for l in self.lambdas):
            raise ValueError("shape parts must be positive integers")

    @classmethod
    def of(cls, *parts: int) -> "FlagShape":
        return cls(tuple(parts))

    @classmethod
    def grassmann(cls, m: int, n: int) -> "FlagShape":
        if not 0 < m < n:
            raise ValueError("Grassmannian needs 0 < m < n")
        return cls((m, n - m))

    @property
    def N(self) -> int:
        return len(self.lambdas)

    @property
    def n(self) -> int:
        return sum(self.lambdas)

    def prefix(self, k: int) -> int:
        """lambda^(k), the k-th initial sum."""
        return sum(self.lambdas[:k])

    @property
    def dim(self) -> int:
        """Dimension of the flag variety: sum of pairwise products."""
        lam = self.lambdas
        return sum(lam[i] * lam[j] for i in range(len(lam)) for j in range(i + 1, len(lam)))

    @property
    def count(self) -> int:
        """Number of index tuples (the multinomial coefficient)."""
        out = math.factorial(self.n)
        for l in self.lambdas:
            out //= math.factorial(l)
        return out

    def __repr__(self):
        return f"FlagShape{self.lambdas}"


@dataclass(frozen=True)
class IndexTuple:
    """An element of I_lambda: disjoint sorted subsets covering [n]."""

    parts: tuple[tuple[int, ...], ...]
    _prefixes: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        seen = set()
        for part in self.parts:
            if list(part) != sorted(part) or seen & set(part):
                raise ValueError(f"invalid index tuple {self.parts}")
            seen |= set(part)
        n = sum(len(p) for p in self.parts)
        if seen != set(range(1, n + 1)):
            raise ValueError(f"parts must partition [{n}]")
        prefixes = []
        acc: tuple[int, ...] = ()
        for part in self.parts:
            acc = tuple(sorted(acc + part))
            prefixes.append(acc)
        object.__setattr__(self, "_prefixes", tuple(prefixes))

    @classmethod
    def of(cls, *parts) -> "IndexTuple":
        return cls(tuple(tuple(sorted(p)) for p in parts))

    @property
    def n(self) -> int:
        return len(self._prefixes[-1])

    @property
    def shape(self) -> FlagShape:
        return FlagShape(tuple(len(p) for p in self.parts))

    def prefix(self, k: int) -> tuple[int, ...]:
        """I^(k) = I_1 u ... u I_k, sorted."""
        return self._prefixes[k - 1]

    def element(self, k: int, a: int) -> int:
        """i^(k)_a, the a-th smallest element of I^(k) (1-based)."""
        return self._prefixes[k - 1][a - 1]

    @property
    def dim(self) -> int:
        """Dimension of the Schubert cell: inversions across parts."""
        count = 0
        for j in range(len(self.parts)):
            for k in range(j + 1, len(self.parts)):
                count += sum(1 for a in self.parts[j] for b in self.parts[k] if a > b)
        return count

    def part_of(self, x: int) -> int:
        """1-based index of the part containing x."""
        for j, part in enumerate(self.parts, start=1):
            if x in part:
                return j
        raise ValueError(f"{x} not in tuple")

    def swap(self, i: int, j: int) -> "IndexTuple":
        """The (i,j)-neighboring tuple: exchange the numbers i and j."""
        mapping = {i: j, j: i}
        return IndexTuple(tuple(tuple(sorted(mapping.get(x, x) for x in p))
                                for p in self.parts))

    def label(self) -> str:
        return "|".join("{" + ",".join(map(str, p)) + "}" for p in self.parts)

    @classmethod
    def from_label(cls, text: str) -> "IndexTuple":
        parts = []
        for chunk in text.split("|"):
            chunk = chunk.strip().strip("{}")
            parts.append(tuple(sorted(int(x) for x in chunk.split(","))))
        return cls(tuple(parts))

    def __repr__(self):
        return f"IndexTuple({self.label()})"


def dim_cell(I: IndexTuple) -> int:
    return I.dim


@lru_cache(maxsize=None)
def enumerate_tuples(shape: FlagShape) -> tuple[IndexTuple, ...]:
    """All of I_lambda, lexicographic on the concatenated parts."""

    def rec(remaining: tuple[int, ...], lams: tuple[int, ...]):
        if not lams:
            yield ()
            return
        for first in itertools.combinations(remaining, lams[0]):
            rest = tuple(x for x in remaining if x not in first)
            for tail in rec(rest, lams[1:]):
                yield (first,) + tail

    items = [IndexTuple(parts) for parts in rec(tuple(range(1, shape.n + 1)), shape.lambdas)]
    return tuple(items)


@lru_cache(maxsize=None)
def tuple_index(shape: FlagShape) -> dict:
    return {I: i for i, I in enumerate(enumerate_tuples(shape))}


@lru_cache(maxsize=None)
def neighbor_pairs(shape: FlagShape) -> tuple:
    """All (i, j, I, J) with i < j and J = I with i and j exchanged, J != I."""
    out = []
    for I in enumerate_tuples(shape):
        for i in range(1, shape.n + 1):
            for j in range(i + 1, shape.n + 1):
                J = I.swap(i, j)
                if J != I:
                    out.append((i, j, I, J))
    return tuple(out)


# -- permutations -----------------------------------------------------------

@dataclass(frozen=True)
class Permutation:
    """A bijection of [n], stored by its one-line images."""

    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise ValueError(f"not a permutation of [n]: {self.images}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def longest(cls, n: int) -> "Permutation":
        """s_0, the order-reversing permutation."""
        return cls(tuple(range(n, 0, -1)))

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, im in enumerate(self.images, start=1):
            inv[im - 1] = i
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """self o other: first apply other."""
        return Permutation(tuple(self(other(i)) for i in range(1, len(self.images) + 1)))

    @property
    def n(self) -> int:
        return len(self.images)

    def __repr__(self):
        return f"Permutation{self.images}"


def act(sigma: Permutation, I: IndexTuple) -> IndexTuple:
    """sigma^{-1} applied elementwise to the parts (a right action)."""
    inv = sigma.inverse()
    return IndexTuple(tuple(tuple(sorted(inv(x) for x in part)) for part in I.parts))


# -- Grassmannian partition dictionary ---------------------------------------

def subset_to_partition(subset, m: int, n: int) -> tuple[int, ...]:
    """Encode an m-subset {i_1 < ... < i_m} of [n] as the partition with
    lambda_j = n - m - (i_j - j), inside the m x (n-m) box."""
    I = tuple(sorted(subset))
    if len(I) != m or any(not 1 <= x <= n for x in I):
        raise ValueError(f"not an m-subset of [n]: {subset}")
    return tuple(n - m - (i - j) for j, i in enumerate(I, start=1))


def partition_to_subset(partition, m: int, n: int) -> tuple[int, ...]:
    """Inverse of subset_to_partition; rejects partitions outside the box."""
    lam = list(partition) + [0] * (m - len(partition))
    if len(lam) > m or any(l < 0 or l > n - m for l in lam) or \
            any(lam[j] < lam[j + 1] for j in range(len(lam) - 1)):
        raise ValueError(f"partition {partition} does not fit the {m}x{n - m} box")
    return tuple(n - m + j - lam[j - 1] for j in range(1, m + 1))


# -- elliptic integer invariants ----------------------------------------------

def p_invariant(I: IndexTuple, j: int, i: int) -> int:
    """|I_j  intersect  {1, ..., i-1}|."""
    return sum(1 for x in I.parts[j - 1] if x < i)


def j_invariant(I: IndexTuple, k: int, a: int) -> int:
    """The part index containing i^(k)_a."""
    return I.part_of(I.element(k, a))
