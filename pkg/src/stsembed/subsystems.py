"""Subsystem closure, enumeration and isomorphism for triple systems.

Everything that certifies a construction in this package goes through
:func:`enumerate_subsystems`, so it is written to be exact first and fast
second.  A *subsystem* of a partial system is a point set ``S`` on which every
pair is covered by a host block lying inside ``S``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .core import Block, PartialSTS
from .errors import Incomplete, NotEmbedded, TrivialForbidden


@dataclass(frozen=True)
class SubsystemRecord:
    points: tuple[int, ...]
    blocks: tuple[Block, ...]

    @property
    def order(self) -> int:
        return len(self.points)

    @property
    def nontrivial(self) -> bool:
        return self.order > 3

    @cached_property
    def mask(self) -> int:
        m = 0
        for p in self.points:
            m |= 1 << p
        return m

    def as_system(self) -> PartialSTS:
        """The subsystem relabelled onto ``0..order-1`` in sorted point order."""
        pos = {p: k for k, p in enumerate(self.points)}
        return PartialSTS(self.order, [(pos[a], pos[b], pos[c]) for a, b, c in self.blocks])

    def report_line(self) -> str:
        return f"subsys order={self.order} points={','.join(map(str, self.points))}"


@dataclass(frozen=True)
class SubsystemLattice:
    host_order: int
    max_order: int
    records: tuple[SubsystemRecord, ...]
    truncated: bool = False
    closures_computed: int = 0

    def of_order(self, k: int) -> list[SubsystemRecord]:
        return [r for r in self.records if r.order == k]

    def nontrivial_proper(self) -> list[SubsystemRecord]:
        return [r for r in self.records if 3 < r.order < self.host_order]

    def point_sets(self, k: int) -> set[int]:
        """Bitmasks of the subsystem point sets of order ``k``."""
        return {r.mask for r in self.records if r.order == k}

    def orders(self) -> Counter:
        return Counter(r.order for r in self.records)

    def report(self) -> str:
        return "".join(r.report_line() + "\n" for r in self.records)


def _record(ps: PartialSTS, pts: Iterable[int]) -> SubsystemRecord:
    pts = tuple(sorted(int(p) for p in pts))
    T = ps.third_matrix
    blocks = []
    for i, a in enumerate(pts):
        for b in pts[i + 1:]:
            c = int(T[a, b])
            if c > b:
                blocks.append((a, b, c))
    return SubsystemRecord(pts, tuple(sorted(blocks)))


def _grow(T: np.ndarray, inside: np.ndarray, frontier: np.ndarray, members: np.ndarray,
          strict: bool, cap: int | None) -> np.ndarray | None:
    """Close ``inside`` (modified in place) under block completion.

    ``members`` lists the current points and ``frontier`` those whose pairs
    have not been examined yet.  With ``strict`` an uncovered pair kills the
    closure (no superset can be a subsystem); ``cap`` kills it past a size.
    """
    while frontier.size:
        sub = T[np.ix_(frontier, members)]
        if strict and (sub < 0).any():
            return None
        cand = sub[sub >= 0]
        new = np.unique(cand[~inside[cand]])
        if not new.size:
            break
        inside[new] = True
        members = np.concatenate([members, new])
        if cap is not None and members.size > cap:
            return None
        frontier = new
    return members


def closure(ps: PartialSTS, seed: Iterable[int]) -> frozenset[int]:
    """Smallest superset of ``seed`` containing the third point of every block
    that meets it in two points."""
    seed = np.array(sorted(set(int(p) for p in seed)), dtype=np.int64)
    if not seed.size:
        return frozenset()
    inside = np.zeros(ps.order, dtype=bool)
    inside[seed] = True
    members = _grow(ps.third_matrix, inside, seed, seed, strict=False, cap=None)
    return frozenset(members.tolist())


def subsystem_from_points(ps: PartialSTS, S: Iterable[int]) -> SubsystemRecord | None:
    pts = np.array(sorted(set(int(p) for p in S)), dtype=np.int64)
    if pts.size:
        sub = ps.third_matrix[np.ix_(pts, pts)]
        if (sub < 0).any():
            return None
        inside = np.zeros(ps.order, dtype=bool)
        inside[pts] = True
        if not inside[sub].all():
            return None
    return _record(ps, pts.tolist())


def enumerate_subsystems(ps: PartialSTS, max_order: int | None = None,
                         node_budget: int | None = None) -> SubsystemLattice:
    """All subsystems of order at least 3 and at most ``max_order``.

    Breadth-first over closures: start from every block, then close ``S + x``
    for each found ``S`` and outside point ``x``.  Every subsystem contains a
    block and is reached by adding its points one at a time, so nothing is
    missed.  For a complete host, proper subsystems have order at most
    ``(v-1)/2`` and growth is cut there.
    """
    v = ps.order
    bound = v if max_order is None else min(max_order, v)
    T = ps.third_matrix
    complete = ps.is_complete
    cap = min(bound, (v - 1) // 2) if complete else min(bound, v - 1)

    found: dict[bytes, np.ndarray] = {}
    queue: list[np.ndarray] = []
    for blk in ps.blocks:
        if bound < 3:
            break
        pts = np.array(blk, dtype=np.int64)
        inside = np.zeros(v, dtype=bool)
        inside[pts] = True
        found[inside.tobytes()] = pts
        queue.append(pts)

    truncated = bound < v
    computed = 0
    head = 0
    while head < len(queue):
        S = queue[head]
        head += 1
        if S.size >= cap:
            continue
        base = np.zeros(v, dtype=bool)
        base[S] = True
        # S + x can only be a subsystem if every pair {x, s} is covered
        covered = (T[:, S] >= 0).all(axis=1) & ~base
        for x in np.flatnonzero(covered):
            if node_budget is not None and computed >= node_budget:
                truncated = True
                head = len(queue)
                break
            computed += 1
            inside = base.copy()
            inside[x] = True
            frontier = np.array([x], dtype=np.int64)
            members = _grow(T, inside, frontier, np.concatenate([S, frontier]), True, cap)
            if members is None:
                continue
            key = inside.tobytes()
            if key not in found:
                found[key] = members
                queue.append(members)

    records = [_record(ps, m.tolist()) for m in found.values()]
    if complete and bound >= v and v > 3:
        records.append(_record(ps, range(v)))
    records.sort(key=lambda r: (r.order, r.points))
    return SubsystemLattice(v, bound, tuple(records), truncated, computed)


def embeds(big: PartialSTS, base: PartialSTS, injection: Sequence[int] | None = None) -> bool:
    """Whether ``injection`` carries every block of ``base`` to a block of ``big``."""
    inj = list(range(base.order)) if injection is None else list(injection)
    if len(inj) != base.order or len(set(inj)) != len(inj):
        return False
    if any(not 0 <= p < big.order for p in inj):
        return False
    return all(big.has_block((inj[a], inj[b], inj[c])) for a, b, c in base.blocks)


def is_embedded_subsystem(host: PartialSTS, sub: PartialSTS,
                          injection: Sequence[int] | None = None) -> bool:
    """``sub`` is complete and its image is exactly a subsystem of ``host``."""
    if not sub.is_complete or not embeds(host, sub, injection):
        return False
    inj = list(range(sub.order)) if injection is None else list(injection)
    rec = subsystem_from_points(host, inj)
    return rec is not None and len(rec.blocks) == len(sub.blocks)


def new_subsystem_violations(big: PartialSTS, base: PartialSTS,
                             base_point_injection: Sequence[int] | None = None,
                             node_budget: int | None = None) -> list[SubsystemRecord]:
    """Nontrivial proper subsystems of ``big`` that are not subsystems of ``base``."""
    inj = list(range(base.order)) if base_point_injection is None else list(base_point_injection)
    if not embeds(big, base, inj):
        raise NotEmbedded("injection does not carry base blocks onto big blocks")
    image = 0
    for p in inj:
        image |= 1 << p
    image_blocks = {tuple(sorted((inj[a], inj[b], inj[c]))) for a, b, c in base.blocks}
    lattice = enumerate_subsystems(big, max_order=big.order - 1, node_budget=node_budget)
    out = []
    for rec in lattice.records:
        if not 3 < rec.order < big.order:
            continue
        if rec.mask & ~image or any(b not in image_blocks for b in rec.blocks):
            out.append(rec)
    return out


def unique_small_subsystem(ps: PartialSTS, R: Iterable[int]) -> SubsystemRecord | None:
    """The subsystem containing ``R`` with order at most ``2|R|``, if any.

    Any such subsystem contains the closure of ``R``, which is then itself a
    subsystem of order at most ``2|R|``; uniqueness forces the two to agree.
    """
    R = set(int(p) for p in R)
    if len(R) <= 1:
        return SubsystemRecord(tuple(sorted(R)), ())
    cl = closure(ps, R)
    if len(cl) > 2 * len(R):
        return None
    return subsystem_from_points(ps, cl)


def is_subsystem_free(sts: PartialSTS) -> bool:
    if not sts.is_complete:
        raise Incomplete("subsystem-freeness is defined for complete systems")
    lattice = enumerate_subsystems(sts, max_order=(sts.order - 1) // 2)
    return not any(r.order > 3 for r in lattice.records)


# -- isomorphism -----------------------------------------------------------

def _table(sts: PartialSTS) -> list[list[int]]:
    return sts.third_matrix.tolist()


def pair_cycle_structures(sts: PartialSTS) -> dict[tuple[int, int], tuple[int, ...]]:
    """Cycle lengths of the union of the two matchings ``w ~ x o w`` and
    ``w ~ y o w`` on the points off the block through ``{x, y}``."""
    if not sts.is_complete:
        raise Incomplete("cycle structure needs a complete system")
    T = _table(sts)
    v = sts.order
    out = {}
    for x in range(v):
        Tx = T[x]
        for y in range(x + 1, v):
            Ty = T[y]
            z = Tx[y]
            seen = [False] * v
            seen[x] = seen[y] = seen[z] = True
            lengths = []
            for w in range(v):
                if seen[w]:
                    continue
                n = 0
                cur = w
                while not seen[cur]:
                    seen[cur] = True
                    nxt = Tx[cur]
                    seen[nxt] = True
                    cur = Ty[nxt]
                    n += 2
                lengths.append(n)
            out[(x, y)] = tuple(sorted(lengths))
    return out


@dataclass(frozen=True)
class CanonicalForm:
    order: int
    blocks: tuple[Block, ...]
    fingerprint: tuple = field(compare=False)
    labelling: tuple[int, ...] = field(compare=False, repr=False)


def fingerprint(sts: PartialSTS) -> tuple:
    cyc = pair_cycle_structures(sts)
    return (sts.order, len(sts.blocks), tuple(sorted(Counter(cyc.values()).items())))


def _ranks(sts: PartialSTS):
    v = sts.order
    cyc = pair_cycle_structures(sts)
    kinds = {k: n for n, k in enumerate(sorted(set(cyc.values())))}
    pair_rank = [[-1] * v for _ in range(v)]
    for (x, y), c in cyc.items():
        pair_rank[x][y] = pair_rank[y][x] = kinds[c]
    point_keys = [tuple(sorted(pair_rank[x][y] for y in range(v) if y != x)) for x in range(v)]
    order = {k: n for n, k in enumerate(sorted(set(point_keys)))}
    return [order[k] for k in point_keys], pair_rank, cyc


def _same_orbit(c: int, done: list[int], fixed: list[int], autos: list[list[int]], v: int) -> bool:
    """Whether ``c`` shares an orbit with a point of ``done`` under the group
    generated by the known automorphisms that fix ``fixed`` pointwise."""
    gens = [g for g in autos if all(g[p] == p for p in fixed)]
    if not gens:
        return False
    orbit = {c}
    stack = [c]
    while stack:
        x = stack.pop()
        for g in gens:
            y = g[x]
            if y not in orbit:
                orbit.add(y)
                stack.append(y)
    return any(d in orbit for d in done)


def canonical_form(sts: PartialSTS) -> CanonicalForm:
    """Canonical block list under a closure-ordered labelling.

    A labelling lists points as generators are picked one at a time; after
    each pick the pairs of labelled points are scanned in a fixed order and
    any unlabelled third point gets the next label.  The code of a labelling
    is the sequence of labels read off during that scan; it determines the
    system, and the minimum over all labellings whose generator choices
    respect isomorphism-invariant point ranks is canonical.  Branches whose
    partial code already exceeds the best one are pruned, and so are
    siblings related by an automorphism found along the way.
    """
    if not sts.is_complete:
        raise Incomplete("canonical forms are computed for complete systems")
    v = sts.order
    if v == 0:
        return CanonicalForm(0, (), (0, 0, ()), ())
    T = _table(sts)
    point_rank, pair_rank, cyc = _ranks(sts)
    fp = (v, len(sts.blocks), tuple(sorted(Counter(cyc.values()).items())))

    best: list[int] | None = None
    best_labels: list[int] | None = None
    autos: list[list[int]] = []

    def run(labels: list[int], pos: list[int], code: list[int], j: int, state: int):
        nonlocal best, best_labels
        # state: 0 = prefix equal to best so far, -1 = strictly smaller
        while True:
            while j < len(labels):
                row = T[labels[j]]
                for i in range(j):
                    z = row[labels[i]]
                    pz = pos[z]
                    if pz < 0:
                        pz = len(labels)
                        pos[z] = pz
                        labels.append(z)
                    if state == 0 and best is not None:
                        b = best[len(code)]
                        if pz > b:
                            return
                        if pz < b:
                            state = -1
                    code.append(pz)
                j += 1
            if len(labels) == v:
                if best is None or state == -1:
                    best = code
                    best_labels = labels
                elif state == 0:
                    g = [0] * v
                    for a, b in zip(best_labels, labels):
                        g[a] = b
                    autos.append(g)
                return
            break
        unl = [p for p in range(v) if pos[p] < 0]
        keys = {p: (point_rank[p], tuple(sorted(pair_rank[p][l] for l in labels))) for p in unl}
        kmin = min(keys.values())
        done: list[int] = []
        for c in (p for p in unl if keys[p] == kmin):
            if done and _same_orbit(c, done, labels, autos, v):
                continue
            done.append(c)
            child_state = state
            if best is not None and state == -1:
                # a sibling may have replaced best; the shared prefix now equals it
                child_state = 0 if best[:len(code)] == code else -1
            lab = labels + [c]
            ps_ = pos[:]
            ps_[c] = len(labels)
            run(lab, ps_, code[:], j, child_state)

    run([], [-1] * v, [], 0, 0)
    lab_of = [0] * v
    for k, p in enumerate(best_labels):
        lab_of[p] = k
    blocks = tuple(sorted(tuple(sorted((lab_of[a], lab_of[b], lab_of[c]))) for a, b, c in sts.blocks))
    return CanonicalForm(v, blocks, fp, tuple(best_labels))


def are_isomorphic(a: PartialSTS, b: PartialSTS) -> bool:
    if not (a.is_complete and b.is_complete):
        raise Incomplete("isomorphism is tested on complete systems")
    if a.order != b.order or len(a.blocks) != len(b.blocks):
        return False
    if fingerprint(a) != fingerprint(b):
        return False
    return canonical_form(a) == canonical_form(b)


def find_isomorphism(a: PartialSTS, b: PartialSTS) -> list[int] | None:
    """A point map ``a -> b`` carrying blocks to blocks, or None."""
    if not are_isomorphic(a, b):
        return None
    la = canonical_form(a).labelling
    lb = canonical_form(b).labelling
    perm = [0] * a.order
    for pa, pb in zip(la, lb):
        perm[pa] = pb
    return perm


def is_class_free(sts: PartialSTS, forbidden: Sequence[PartialSTS]) -> bool:
    return not class_violations(sts, forbidden)


def class_violations(sts: PartialSTS, forbidden: Sequence[PartialSTS]) -> list[tuple[SubsystemRecord, int]]:
    """Subsystems of ``sts`` (itself included when complete) isomorphic to a
    member of ``forbidden``, as ``(record, member index)`` pairs."""
    for f in forbidden:
        if f.order <= 3:
            raise TrivialForbidden(f"forbidden system of order {f.order} is trivial")
        if not f.is_complete:
            raise Incomplete("forbidden systems must be complete")
    if not forbidden:
        return []
    orders = {f.order for f in forbidden}
    lattice = enumerate_subsystems(sts, max_order=max(orders))
    out = []
    for rec in lattice.records:
        if rec.order not in orders:
            continue
        sub = rec.as_system()
        for k, f in enumerate(forbidden):
            if f.order == rec.order and are_isomorphic(sub, f):
                out.append((rec, k))
    return out

