"""Ground data model for partial Steiner triple systems.

Points are dense integer ids ``0..order-1``.  Every system carries a square
``third`` lookup matrix: ``third[x, y]`` is the third point of the block
through ``{x, y}``, ``-1`` when the pair is uncovered, and ``x`` on the
diagonal (the Steiner quasigroup convention ``x o x = x``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import BadBlock, DuplicatePair, Incomplete, NotBijective

Block = tuple[int, int, int]


def is_admissible(v: int) -> bool:
    return v % 6 in (1, 3)


def _normalise_blocks(order: int, blocks: Iterable[Iterable[int]]) -> list[Block]:
    out = []
    for raw in blocks:
        b = tuple(int(p) for p in raw)
        if len(b) != 3 or len(set(b)) != 3:
            raise BadBlock(f"block {b!r} does not have 3 distinct points")
        if min(b) < 0 or max(b) >= order:
            raise BadBlock(f"block {b!r} has a point outside 0..{order - 1}")
        out.append(tuple(sorted(b)))
    return out


class PartialSTS:
    """A partial Steiner triple system; immutable once built.

    Construction validates the pair-at-most-once rule and raises
    :class:`DuplicatePair` or :class:`BadBlock`.
    """

    __slots__ = ("order", "blocks", "labels", "_third", "_complete")

    def __init__(self, order: int, blocks: Iterable[Iterable[int]] = (),
                 labels: Sequence[str] | None = None):
        if order < 0:
            raise BadBlock("order must be nonnegative")
        norm = _normalise_blocks(order, blocks)
        norm.sort()
        third = np.full((order, order), -1, dtype=np.int32)
        if order:
            np.fill_diagonal(third, np.arange(order, dtype=np.int32))
        if norm:
            arr = np.asarray(norm, dtype=np.int64)
            a, b, c = arr[:, 0], arr[:, 1], arr[:, 2]
            keys = np.concatenate([a * order + b, a * order + c, b * order + c])
            uniq, counts = np.unique(keys, return_counts=True)
            if (counts > 1).any():
                key = int(uniq[np.argmax(counts > 1)])
                pair = divmod(key, order)
                clash = [blk for blk in norm if pair[0] in blk and pair[1] in blk]
                raise DuplicatePair(pair, clash)
            third[a, b] = c
            third[b, a] = c
            third[a, c] = b
            third[c, a] = b
            third[b, c] = a
            third[c, b] = a
        third.setflags(write=False)
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != order:
                raise BadBlock("labels must name every point")
        self.order = order
        self.blocks: tuple[Block, ...] = tuple(norm)
        self.labels = labels
        self._third = third
        self._complete = 3 * len(norm) == order * (order - 1) // 2

    # -- basic queries -------------------------------------------------
    @property
    def is_complete(self) -> bool:
        return self._complete

    @property
    def third_matrix(self) -> np.ndarray:
        """Read-only ``order x order`` completion matrix."""
        return self._third

    def third(self, x: int, y: int) -> int | None:
        z = int(self._third[x, y])
        if z < 0 or x == y:
            return None
        return z

    def block_containing(self, x: int, y: int) -> Block | None:
        z = self.third(x, y)
        if z is None:
            return None
        return tuple(sorted((x, y, z)))

    def has_block(self, block: Iterable[int]) -> bool:
        x, y, z = block
        return x != y and int(self._third[x, y]) == z

    def leave_edges(self) -> list[tuple[int, int]]:
        rows, cols = np.nonzero(np.triu(self._third < 0, k=1))
        return list(zip(rows.tolist(), cols.tolist()))

    def __len__(self) -> int:
        return self.order

    def __eq__(self, other) -> bool:
        if not isinstance(other, PartialSTS):
            return NotImplemented
        return self.order == other.order and self.blocks == other.blocks

    def __hash__(self) -> int:
        return hash((self.order, self.blocks))

    def __repr__(self) -> str:
        kind = "complete" if self._complete else "partial"
        return f"PartialSTS(order={self.order}, blocks={len(self.blocks)}, {kind})"


@dataclass(frozen=True)
class LeaveGraph:
    order: int
    edges: frozenset

    def degrees(self) -> list[int]:
        deg = [0] * self.order
        for x, y in self.edges:
            deg[x] += 1
            deg[y] += 1
        return deg

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {}
        for x, y in self.edges:
            adj.setdefault(x, set()).add(y)
            adj.setdefault(y, set()).add(x)
        return adj


def make_partial_system(order: int, blocks: Iterable[Iterable[int]],
                        labels: Sequence[str] | None = None) -> PartialSTS:
    return PartialSTS(order, blocks, labels)


def leave_graph(ps: PartialSTS) -> LeaveGraph:
    return LeaveGraph(ps.order, frozenset(ps.leave_edges()))


def quasigroup_op(sts: PartialSTS, x: int, y: int) -> int:
    if not sts.is_complete:
        raise Incomplete("the quasigroup operation needs a complete system")
    return int(sts.third_matrix[x, y])


def relabel(ps: PartialSTS, perm: Sequence[int]) -> PartialSTS:
    """Image of ``ps`` under the point bijection ``x -> perm[x]``."""
    perm = [int(p) for p in perm]
    if len(perm) != ps.order or sorted(perm) != list(range(ps.order)):
        raise NotBijective("perm is not a bijection on the point set")
    blocks = [(perm[a], perm[b], perm[c]) for a, b, c in ps.blocks]
    labels = None
    if ps.labels is not None:
        labels = [""] * ps.order
        for x, name in enumerate(ps.labels):
            labels[perm[x]] = name
    return PartialSTS(ps.order, blocks, labels)


def glue_injection(a_order: int, b_order: int,
                   identification: Mapping[int, int]) -> list[int]:
    """Where each point of ``b`` lands in ``glued_union(a, b, identification)``.

    ``identification`` maps points of ``a`` to points of ``b``.  Points of
    ``a`` keep their ids; unidentified points of ``b`` are appended in
    increasing order.
    """
    inverse: dict[int, int] = {}
    for pa, pb in identification.items():
        if not (0 <= pa < a_order and 0 <= pb < b_order):
            raise BadBlock(f"identification {pa}->{pb} out of range")
        if pb in inverse:
            raise NotBijective(f"point {pb} of the second system identified twice")
        inverse[pb] = pa
    out = []
    nxt = a_order
    for pb in range(b_order):
        if pb in inverse:
            out.append(inverse[pb])
        else:
            out.append(nxt)
            nxt += 1
    return out


def glued_union(a: PartialSTS, b: PartialSTS,
                identification: Mapping[int, int] | None = None) -> PartialSTS:
    """Union of ``a`` and a copy of ``b`` glued along ``identification``.

    Blocks that appear in both (after gluing) are kept once.  Any pair covered
    by two different blocks raises :class:`DuplicatePair`, which is how an
    overlap that is not a common subsystem shows up.
    """
    identification = dict(identification or {})
    emb = glue_injection(a.order, b.order, identification)
    order = a.order + b.order - len(identification)
    blocks = set(a.blocks)
    for x, y, z in b.blocks:
        blocks.add(tuple(sorted((emb[x], emb[y], emb[z]))))
    return PartialSTS(order, sorted(blocks))


def pad(ps: PartialSTS, order: int) -> PartialSTS:
    """Append isolated points until ``ps`` has ``order`` points."""
    if order < ps.order:
        raise BadBlock("cannot pad to a smaller order")
    return PartialSTS(order, ps.blocks)
