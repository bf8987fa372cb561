"""Set partitions of boundary points, Catalan counting and the fattening map.

Points are numbered ``0 .. k+l-1``: lower points first (left to right), then
upper points (left to right).  For the crossing predicate the points are read
along the boundary of the rectangle: lower left to right, then upper right to
left.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .tensor import Tensor


def catalan(k: int) -> int:
    if k < 0:
        raise ValueError("catalan needs k >= 0")
    return comb(2 * k, k) // (k + 1)


@dataclass(frozen=True)
class SetPartition:
    n_lower: int
    n_upper: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(sorted((tuple(sorted(b)) for b in self.blocks), key=lambda b: b[0] if b else -1))
        seen = [p for b in blocks for p in b]
        if any(len(b) == 0 for b in blocks):
            raise ValueError("empty block")
        if sorted(seen) != list(range(self.n_lower + self.n_upper)):
            raise ValueError("blocks must cover every point exactly once")
        object.__setattr__(self, "blocks", blocks)

    @property
    def size(self) -> int:
        return self.n_lower + self.n_upper

    def label(self, point: int) -> str:
        if point < self.n_lower:
            return f"L{point + 1}"
        return f"U{point - self.n_lower + 1}"

    def point(self, label: str) -> int:
        side, idx = label[0].upper(), int(label[1:])
        if side == "L" and 1 <= idx <= self.n_lower:
            return idx - 1
        if side == "U" and 1 <= idx <= self.n_upper:
            return self.n_lower + idx - 1
        raise ValueError(f"bad point label {label!r}")

    def boundary_position(self, point: int) -> int:
        """Position of a point along the boundary walk used for crossings."""
        if point < self.n_lower:
            return point
        j = point - self.n_lower
        return self.n_lower + (self.n_upper - 1 - j)

    def labelled_blocks(self) -> list[list[str]]:
        return [[self.label(p) for p in b] for b in self.blocks]

    def to_dict(self) -> dict:
        return {"n_lower": self.n_lower, "n_upper": self.n_upper, "blocks": self.labelled_blocks()}

    @classmethod
    def from_labels(cls, n_lower: int, n_upper: int, blocks) -> "SetPartition":
        probe = cls(n_lower, n_upper, tuple((i,) for i in range(n_lower + n_upper)))
        return cls(n_lower, n_upper, tuple(tuple(probe.point(x) for x in b) for b in blocks))

    @classmethod
    def from_dict(cls, data: dict) -> "SetPartition":
        return cls.from_labels(int(data["n_lower"]), int(data["n_upper"]), data["blocks"])

    def __str__(self):
        return "{" + ", ".join("{" + ",".join(b) + "}" for b in self.labelled_blocks()) + "}"


class Pairing(SetPartition):
    def __post_init__(self):
        super().__post_init__()
        if any(len(b) != 2 for b in self.blocks):
            raise ValueError("a pairing has only blocks of size two")


def identity_partition(n: int) -> SetPartition:
    return SetPartition(n, n, tuple((i, n + i) for i in range(n)))


def _blocks_cross(xs, ys) -> bool:
    marks = sorted([(x, 0) for x in xs] + [(y, 1) for y in ys])
    runs = [m for i, (_, m) in enumerate(marks) if i == 0 or marks[i - 1][1] != m]
    return len(runs) >= 4


def is_noncrossing(p: SetPartition) -> bool:
    pos = [[p.boundary_position(x) for x in b] for b in p.blocks]
    return not any(_blocks_cross(a, b) for a, b in itertools.combinations(pos, 2))


def _nc_blocks(points: list[int]):
    """All non-crossing partitions of an ordered list of points, as block lists."""
    if not points:
        yield []
        return
    first, rest = points[0], points[1:]
    # choose the other members of the block containing `first`
    for r in range(len(rest) + 1):
        for members in itertools.combinations(range(len(rest)), r):
            cuts = [-1, *members, len(rest)]
            gaps = [rest[cuts[i] + 1:cuts[i + 1]] for i in range(len(cuts) - 1)]
            block = [first] + [rest[m] for m in members]
            for parts in itertools.product(*(list(_nc_blocks(g)) for g in gaps)):
                yield [block] + [b for part in parts for b in part]


def _canonical_key(p: SetPartition):
    return p.blocks


def enumerate_nc_partitions(m: int) -> list[SetPartition]:
    """Non-crossing partitions of ``m`` points in a row (returned as ``m`` lower points)."""
    out = {SetPartition(m, 0, tuple(map(tuple, bs))) for bs in _nc_blocks(list(range(m)))}
    return sorted(out, key=_canonical_key)


def enumerate_nc_pairings(m: int) -> list[Pairing]:
    if m % 2:
        return []

    def pairings(points):
        if not points:
            yield []
            return
        first = points[0]
        for j in range(1, len(points), 2):
            for inner in pairings(points[1:j]):
                for outer in pairings(points[j + 1:]):
                    yield [(first, points[j])] + inner + outer

    return sorted((Pairing(m, 0, tuple(ps)) for ps in pairings(list(range(m)))), key=_canonical_key)


def split(p: SetPartition, n_lower: int) -> SetPartition:
    """Re-read a row partition of ``m`` points as ``n_lower`` lower and ``m - n_lower`` upper points.

    The row order is the boundary order, so upper points are taken right to left.
    """
    m = p.size
    n_upper = m - n_lower
    if not 0 <= n_lower <= m:
        raise ValueError("n_lower out of range")

    def relabel(pos):
        return pos if pos < n_lower else n_lower + (n_upper - 1 - (pos - n_lower))

    cls = Pairing if isinstance(p, Pairing) else SetPartition
    order = sorted(range(m), key=p.boundary_position)
    return cls(n_lower, n_upper, tuple(tuple(relabel(order.index(x)) for x in b) for b in p.blocks))


def fatten(p: SetPartition) -> Pairing:
    """Double every point and trace each block's boundary by nested pairs."""
    if not is_noncrossing(p):
        raise ValueError("fatten needs a non-crossing partition")
    k, l = p.n_lower, p.n_upper

    def leg(row: int) -> int:
        if row < 2 * k:
            return row
        return 2 * k + (2 * l - 1 - (row - 2 * k))

    pairs = []
    for block in p.blocks:
        pos = sorted(p.boundary_position(x) for x in block)
        for i, b in enumerate(pos):
            nxt = pos[(i + 1) % len(pos)]
            pairs.append((leg(2 * b + 1), leg(2 * nxt)))
    return Pairing(2 * k, 2 * l, tuple(pairs))


def partition_tensor(p: SetPartition, N: int) -> Tensor:
    """Kronecker-delta tensor: 1 when indices agree inside every block."""
    if N < 1:
        raise ValueError("N must be positive")
    k, l = p.n_lower, p.n_upper
    arr = np.zeros((N,) * (k + l), dtype=np.int64)
    # axes are upper legs first, then lower legs
    axis = [l + i for i in range(k)] + [j for j in range(l)]
    for values in itertools.product(range(N), repeat=len(p.blocks)):
        idx = [0] * (k + l)
        for b, v in zip(p.blocks, values):
            for x in b:
                idx[axis[x]] = v
        arr[tuple(idx)] = 1
    return Tensor(k, l, N, arr)


def compose_partitions(p: SetPartition, q: SetPartition) -> tuple[SetPartition, int]:
    """``p`` after ``q``; also return the number of blocks closed off in the middle."""
    if q.n_upper != p.n_lower:
        raise ValueError("arity mismatch")
    j, k, l = q.n_lower, q.n_upper, p.n_upper
    # nodes: q lower 0..j-1, middle j..j+k-1, p upper j+k..j+k+l-1
    parent = list(range(j + k + l))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        parent[find(a)] = find(b)

    for b in q.blocks:  # q's upper points land on the middle nodes as they are
        for x in b[1:]:
            union(b[0], x)
    for b in p.blocks:
        nodes = [j + x for x in b]  # p lower x<k -> middle, p upper -> outer
        for x in nodes[1:]:
            union(nodes[0], x)
    groups: dict[int, list[int]] = {}
    for x in range(j + k + l):
        groups.setdefault(find(x), []).append(x)
    blocks, closed = [], 0
    for g in groups.values():
        outer = [x if x < j else x - k for x in g if x < j or x >= j + k]
        if outer:
            blocks.append(tuple(outer))
        else:
            closed += 1
    return SetPartition(j, l, tuple(blocks)), closed
