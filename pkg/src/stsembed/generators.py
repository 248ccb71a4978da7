"""Test systems: projective and affine geometries, the Bose and Skolem
constructions, hill-climbed random systems and partial systems whose leave is
a single hexagon."""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .core import PartialSTS, is_admissible
from .errors import BadCongruence, BadDimension, SearchExhausted


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    parameter: int
    seed: int = 0

    def build(self) -> PartialSTS:
        k, p = self.kind, self.parameter
        if k == "pg":
            return projective_triple_system(p)
        if k == "ag":
            return affine_triple_system(p)
        if k == "bose":
            return bose(p)
        if k == "skolem":
            return skolem(p)
        if k in ("hexagon_leave", "hexleave"):
            return partial_with_hexagon_leave(p, self.seed)
        if k == "random_partial":
            return random_partial(p, self.seed)
        if k == "random":
            return random_sts(p, self.seed)
        raise ValueError(f"unknown generator kind {k!r}")


def projective_triple_system(n: int) -> PartialSTS:
    """Points and lines of PG(n, 2); point ``k`` is the nonzero vector ``k+1``."""
    if n < 1:
        raise BadDimension("projective dimension must be at least 1")
    size = 2 ** (n + 1)
    blocks = []
    for a in range(1, size):
        for b in range(a + 1, size):
            c = a ^ b
            if c > b:
                blocks.append((a - 1, b - 1, c - 1))
    return PartialSTS(size - 1, blocks)


def affine_triple_system(n: int) -> PartialSTS:
    """Points and lines of AG(n, 3), points encoded in base 3."""
    if n < 1:
        raise BadDimension("affine dimension must be at least 1")
    size = 3 ** n

    def digits(x):
        return [(x // 3 ** k) % 3 for k in range(n)]

    def encode(ds):
        return sum(d * 3 ** k for k, d in enumerate(ds))

    blocks = set()
    for a in range(size):
        da = digits(a)
        for b in range(a + 1, size):
            db = digits(b)
            c = encode([(-x - y) % 3 for x, y in zip(da, db)])
            blocks.add(tuple(sorted((a, b, c))))
    return PartialSTS(size, sorted(blocks))


def bose(v: int) -> PartialSTS:
    """Bose construction from the idempotent commutative quasigroup
    ``x o y = (x + y) / 2`` on Z_m, m = v / 3."""
    if v % 6 != 3:
        raise BadCongruence(f"Bose construction needs v = 3 mod 6, got {v}")
    m = v // 3
    half = (m + 1) // 2

    def pt(x, i):
        return x + m * (i % 3)

    blocks = [(pt(x, 0), pt(x, 1), pt(x, 2)) for x in range(m)]
    for i in range(3):
        for x, y in combinations(range(m), 2):
            blocks.append((pt(x, i), pt(y, i), pt((x + y) * half % m, i + 1)))
    return PartialSTS(v, blocks)


def skolem(v: int) -> PartialSTS:
    """Skolem construction from a half-idempotent commutative quasigroup on
    Z_{2n}, v = 6n + 1."""
    if v % 6 != 1 or v < 7:
        raise BadCongruence(f"Skolem construction needs v = 1 mod 6, got {v}")
    n = (v - 1) // 6
    m = 2 * n
    inf = v - 1

    def op(x, y):
        s = (x + y) % m
        return s // 2 if s % 2 == 0 else s // 2 + n

    def pt(x, i):
        return x + m * (i % 3)

    blocks = [(pt(x, 0), pt(x, 1), pt(x, 2)) for x in range(n)]
    for x in range(n):
        for i in range(3):
            blocks.append((inf, pt(x + n, i), pt(x, i + 1)))
    for i in range(3):
        for x, y in combinations(range(m), 2):
            blocks.append((pt(x, i), pt(y, i), pt(op(x, y), i + 1)))
    return PartialSTS(v, blocks)


def hill_climb(v: int, rng: random.Random, excluded: Iterable[tuple[int, int]] = (),
               fixed: Sequence[tuple[int, int, int]] = (), max_steps: int | None = None):
    """Stinson-style hill climbing for a triangle decomposition of K_v minus
    ``excluded`` edges and the pairs of the ``fixed`` blocks.

    Returns the list of new blocks, or None if ``max_steps`` runs out.
    """
    third = [[-1] * v for _ in range(v)]
    allowed = [[x != y for y in range(v)] for x in range(v)]
    frozen = set()
    for a, b in excluded:
        allowed[a][b] = allowed[b][a] = False
    for blk in fixed:
        blk = tuple(sorted(blk))
        frozen.add(blk)
        for a, b in combinations(blk, 2):
            allowed[a][b] = allowed[b][a] = False
    unc = [set(y for y in range(v) if allowed[x][y]) for x in range(v)]
    live = set(x for x in range(v) if unc[x])
    blocks: set[tuple[int, int, int]] = set()
    if max_steps is None:
        max_steps = 400 * v * v

    def cover(a, b, c):
        for p, q, r in ((a, b, c), (a, c, b), (b, c, a)):
            third[p][q] = third[q][p] = r
            unc[p].discard(q)
            unc[q].discard(p)
        for p in (a, b, c):
            if not unc[p]:
                live.discard(p)
        blocks.add(tuple(sorted((a, b, c))))

    def uncover(a, b, c):
        for p, q in ((a, b), (a, c), (b, c)):
            third[p][q] = third[q][p] = -1
            unc[p].add(q)
            unc[q].add(p)
        live.update((a, b, c))
        blocks.discard(tuple(sorted((a, b, c))))

    for _ in range(max_steps):
        if not live:
            return sorted(blocks)
        x = rng.choice(sorted(live))
        y, z = rng.sample(sorted(unc[x]), 2)
        if not allowed[y][z]:
            continue
        w = third[y][z]
        if w >= 0:
            if tuple(sorted((y, z, w))) in frozen:
                continue
            uncover(y, z, w)
        cover(x, y, z)
    return None


def random_sts(v: int, seed: int = 0) -> PartialSTS:
    if not is_admissible(v):
        raise BadCongruence(f"no STS of order {v}")
    rng = random.Random(seed)
    for _ in range(20):
        blocks = hill_climb(v, rng)
        if blocks is not None:
            return PartialSTS(v, blocks)
    raise SearchExhausted(f"hill climbing failed for order {v}")


def partial_with_hexagon_leave(v: int, seed: int = 0,
                               planted: PartialSTS | None = None,
                               hexagon: Sequence[int] | None = None,
                               attempts: int = 20) -> PartialSTS:
    """Partial system of order ``v`` whose leave is exactly one 6-cycle.

    With ``planted``, its blocks sit frozen on points ``0..k-1`` and the
    hexagon alternates between planted and free points (an outside point of a
    subsystem of order ``(v-1)/2`` needs a leave edge into it).
    """
    if not is_admissible(v) or v < 13:
        raise BadCongruence(f"hexagon leave needs admissible v >= 13, got {v}")
    rng = random.Random(seed)
    k = planted.order if planted is not None else 0
    fixed = list(planted.blocks) if planted is not None else []
    if planted is not None and (k < 3 or v - k < 3):
        raise BadCongruence("planted system leaves no room for the hexagon")
    for _ in range(attempts):
        if hexagon is not None:
            cyc = list(hexagon)
        elif planted is None:
            cyc = rng.sample(range(v), 6)
        else:
            inner = rng.sample(range(k), 3)
            outer = rng.sample(range(k, v), 3)
            cyc = [p for pair in zip(inner, outer) for p in pair]
        edges = [(cyc[i], cyc[(i + 1) % 6]) for i in range(6)]
        blocks = hill_climb(v, rng, excluded=edges, fixed=fixed)
        if blocks is not None:
            return PartialSTS(v, fixed + blocks)
    raise SearchExhausted(f"no hexagon-leave system of order {v} found (seed {seed})")


def random_partial(v: int, seed: int = 0, fill: float = 1.0,
                   planted: Sequence[tuple[PartialSTS, Sequence[int]]] = ()) -> PartialSTS:
    """Greedy random packing of triples on ``v`` points.

    ``fill`` is the fraction of the greedy maximal packing kept; ``planted``
    systems are placed first through the given point maps.
    """
    rng = random.Random(seed)
    used = set()
    blocks = []
    for sub, where in planted:
        for a, b, c in sub.blocks:
            blk = tuple(sorted((where[a], where[b], where[c])))
            blocks.append(blk)
            used.update(combinations(blk, 2))
    n_planted = len(blocks)
    triples = list(combinations(range(v), 3))
    rng.shuffle(triples)
    extra = []
    for t in triples:
        pairs = ((t[0], t[1]), (t[0], t[2]), (t[1], t[2]))
        if any(p in used for p in pairs):
            continue
        used.update(pairs)
        extra.append(t)
    keep = int(round(fill * len(extra)))
    return PartialSTS(v, blocks[:n_planted] + extra[:keep])


def catalog(order: int, count: int = 8):
    """Complete systems of the given order: classical constructions first,
    then hill-climbed ones with seeds ``0..count-1``."""
    if order % 6 == 3:
        yield bose(order)
    elif order % 6 == 1 and order >= 7:
        yield skolem(order)
    for s in range(count):
        yield random_sts(order, s)
