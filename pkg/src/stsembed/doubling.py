"""Order-doubling step: embed a partial system of odd order u >= 11 into one of
order 2u + 1, consuming a hexagon of the leave and adding no subsystems.

Point layout of the output: input points keep ids ``0..u-1``, the element
``k`` of Z_u becomes ``u + k`` and the point at infinity is ``2u``.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import (Coset, CycGroup, admissible_coset_divisors, all_proper_cosets,
                      coset_containing, divisors, standard_one_factorisation)
from .core import Block, PartialSTS, leave_graph
from .errors import (BadCycle, InternalInconsistency, NoSafeChoice, OrderTooSmall,
                     OutOfRange, STSError)
from .subsystems import (SubsystemRecord, enumerate_subsystems, new_subsystem_violations,
                         subsystem_from_points)

# phi'(k) = x_j for these (k, j) pairs; j is 1-based along the hexagon
PINNED = ((1, 1), (0, 2), (2, 3), (4, 4), (6, 5), (5, 6))


@dataclass(frozen=True)
class SixCycle:
    points: tuple[int, int, int, int, int, int]

    def edges(self) -> list[tuple[int, int]]:
        p = self.points
        return [tuple(sorted((p[k], p[(k + 1) % 6]))) for k in range(6)]

    def normalised(self) -> "SixCycle":
        """Rotate to start at the smallest point, heading to its smaller neighbour."""
        p = list(self.points)
        k = p.index(min(p))
        p = p[k:] + p[:k]
        if p[5] < p[1]:
            p = [p[0]] + p[1:][::-1]
        return SixCycle(tuple(p))


def six_cycle(ps: PartialSTS, points: Sequence[int]) -> SixCycle:
    """Validate ``points`` as a hexagon of the leave of ``ps``."""
    pts = tuple(int(p) for p in points)
    if len(pts) != 6 or len(set(pts)) != 6:
        raise BadCycle(f"{pts} is not six distinct points")
    if any(not 0 <= p < ps.order for p in pts):
        raise BadCycle(f"{pts} leaves the point set")
    H = SixCycle(pts)
    for x, y in H.edges():
        if ps.third(x, y) is not None:
            raise BadCycle(f"edge {{{x}, {y}}} is covered by a block")
    return H


def find_six_cycle(ps: PartialSTS) -> SixCycle | None:
    """The lexicographically first hexagon of the leave (as a vertex sequence)."""
    adj = leave_graph(ps).adjacency()
    for start in sorted(adj):
        path = [start]

        def walk():
            if len(path) == 6:
                return start in adj[path[-1]]
            for nxt in sorted(adj[path[-1]]):
                if nxt > start and nxt not in path:
                    path.append(nxt)
                    if walk():
                        return True
                    path.pop()
            return False

        if walk():
            return SixCycle(tuple(path))
    return None


def _order_points(points, rng: random.Random | None) -> list[int]:
    pts = sorted(points)
    if rng is not None:
        rng.shuffle(pts)
    return pts


def initial_injection(ps: PartialSTS, H: SixCycle, seed: int | None = None) -> list[int]:
    """phi' on ``0..(u+1)/2`` with the six hexagon values pinned.

    Free slots take the lowest unused points, or a shuffle of them when a
    seed is given.
    """
    u = ps.order
    if u < 11 or u % 2 == 0:
        raise OrderTooSmall(f"doubling needs odd order >= 11, got {u}")
    H = six_cycle(ps, H.points)
    top = (u + 1) // 2
    phi = [-1] * (top + 1)
    for k, j in PINNED:
        phi[k] = H.points[j - 1]
    rng = random.Random(seed) if seed is not None else None
    pool = iter(_order_points(set(range(u)) - set(H.points), rng))
    for k in range(top + 1):
        if phi[k] < 0:
            phi[k] = next(pool)
    return phi


def counting_audit(u: int, i: int) -> tuple[list[int], Fraction, int]:
    """``(D_i, r_i, u - i - 1)``: the divisors whose coset through ``i`` just
    reached the safety threshold, the bound on forbidden choices, and the
    number of candidates available beyond one."""
    if u < 11 or u % 2 == 0:
        raise OutOfRange(f"u must be odd and at least 11, got {u}")
    if not (u + 3) // 2 <= i <= u - 3:
        raise OutOfRange(f"i={i} outside {(u + 3) // 2}..{u - 3}")
    lo = Fraction(2 * i - u + 2, 3)
    hi = 2 * i - u
    D = [d for d in admissible_coset_divisors(u) if lo <= d <= hi]
    r = Fraction(sum(u // d - 1 for d in D), 2)
    return D, r, u - i - 1


@dataclass
class StepRecord:
    i: int
    D: list[int]
    r: Fraction
    available: int
    forbidden_safety: int
    forbidden_special: int
    choice: int


@dataclass
class BijectionBuilderState:
    u: int
    phi: list[int]
    unused: set[int]
    subsystem_sets: dict[int, set[int]]
    coset_family: list[Coset]
    history: list[StepRecord] = field(default_factory=list)


def _mask(points) -> int:
    m = 0
    for p in points:
        m |= 1 << p
    return m


class BijectionBuilder:
    """Extend phi' to a bijection Z_u -> U mapping no coset of a nontrivial
    proper subgroup onto the point set of a subsystem.

    Indices ``(u+3)/2 .. u-3`` are filled one at a time.  When index ``i``
    brings a coset up to ``(|C|+3)/2`` assigned elements, every candidate that
    would leave the coset's image inside a subsystem of size ``|C|`` is
    rejected; for u = 3 mod 6 one more candidate is rejected at
    ``i = 2u/3 - 1``.  The last two indices are settled by trying both orders.
    """

    def __init__(self, ps: PartialSTS, phi_prime: Sequence[int], seed: int | None = None,
                 subsystems: Sequence[SubsystemRecord] | None = None):
        u = ps.order
        if u < 11 or u % 2 == 0:
            raise OrderTooSmall(f"bijection extension needs odd order >= 11, got {u}")
        top = (u + 1) // 2
        if len(phi_prime) != top + 1 or len(set(phi_prime)) != top + 1:
            raise STSError("phi' must be an injection on 0..(u+1)/2")
        self.ps = ps
        self.u = u
        self.rng = random.Random(seed) if seed is not None else None
        sizes = [u // d for d in divisors(u) if 1 < d < u]
        if subsystems is None:
            subsystems = enumerate_subsystems(ps, max_order=max(sizes)).records if sizes else ()
        sets: dict[int, set[int]] = {}
        for rec in subsystems:
            sets.setdefault(rec.order, set()).add(rec.mask)
        family = [c for d in admissible_coset_divisors(u) for c in CycGroup(u).cosets(d)]
        phi = list(phi_prime) + [-1] * (u - top - 1)
        self.state = BijectionBuilderState(u, phi, set(range(u)) - set(phi_prime), sets, family)

    def _image(self, elements) -> int:
        phi = self.state.phi
        return _mask(phi[e] for e in elements)

    def _safety_forbidden(self, i: int) -> set[int]:
        u = self.u
        out = set()
        for d in admissible_coset_divisors(u):
            C = coset_containing(u, d, i)
            upto = [e for e in C.elements if e <= i]
            if 2 * len(upto) != len(C) + 3:
                continue
            prefix = self._image(e for e in upto if e != i)
            for S in self.state.subsystem_sets.get(len(C), ()):
                if prefix & ~S == 0:
                    out.update(p for p in self.state.unused if S >> p & 1)
        return out

    def _special_forbidden(self, i: int) -> set[int]:
        u = self.u
        if u % 6 != 3 or i != 2 * u // 3 - 1:
            return set()
        phi = self.state.phi
        z = self.ps.third(phi[u // 3 - 2], phi[2 * u // 3 - 2])
        if z is None:
            return set()
        w = self.ps.third(phi[u // 3 - 1], z)
        return {w} if w is not None else set()

    def coset_violations(self, phi: Sequence[int]) -> list[Coset]:
        sets = self.state.subsystem_sets
        return [C for C in all_proper_cosets(self.u)
                if _mask(phi[e] for e in C.elements) in sets.get(len(C), ())]

    def run(self) -> BijectionBuilderState:
        st = self.state
        u = self.u
        for i in range((u + 3) // 2, u - 2):
            bad_b = self._safety_forbidden(i)
            bad_c = self._special_forbidden(i)
            choice = None
            for w in _order_points(st.unused, self.rng):
                if w not in bad_b and w not in bad_c:
                    choice = w
                    break
            if choice is None:
                raise NoSafeChoice(f"no safe image for index {i} (u={u})")
            D, r, _ = counting_audit(u, i)
            st.history.append(StepRecord(i, D, r, len(st.unused), len(bad_b & st.unused),
                                         len(bad_c & st.unused), choice))
            st.phi[i] = choice
            st.unused.discard(choice)
        a, b = sorted(st.unused)
        for first, second in ((a, b), (b, a)):
            trial = st.phi[:u - 2] + [first, second]
            if u % 6 == 3 and any(
                    self.ps.has_block((trial[u // 3 - j], trial[2 * u // 3 - j], trial[u - j]))
                    for j in (1, 2)):
                continue
            if not self.coset_violations(trial):
                st.phi = trial
                st.unused.clear()
                return st
        raise NoSafeChoice(f"neither completion of the last two indices is safe (u={u})")


def extend_bijection(ps: PartialSTS, phi_prime: Sequence[int], seed: int | None = None,
                     subsystems: Sequence[SubsystemRecord] | None = None) -> list[int]:
    return BijectionBuilder(ps, phi_prime, seed, subsystems).run().phi


def coset_violations(ps: PartialSTS, phi: Sequence[int]) -> list[Coset]:
    """Cosets whose image under ``phi`` is a subsystem point set, checked
    directly against the definition of a subsystem."""
    u = ps.order
    return [C for C in all_proper_cosets(u)
            if subsystem_from_points(ps, [phi[e] for e in C.elements]) is not None]


@dataclass
class DoublingResult:
    input_order: int
    output: PartialSTS
    phi: tuple[int, ...]
    cycle: SixCycle
    b_dagger: frozenset
    b_ddagger: frozenset
    b0: frozenset
    b1: frozenset
    b2: frozenset
    seed: int | None = None
    report: "VerificationReport | None" = None

    def certificate_line(self) -> str:
        seed = "none" if self.seed is None else str(self.seed)
        return (f"cert doubling u={self.input_order} seed={seed} "
                f"phi={','.join(map(str, self.phi))} "
                f"cycle={','.join(map(str, self.cycle.points))}")


def _blk(*pts) -> Block:
    return tuple(sorted(pts))


def assemble(ps: PartialSTS, H: SixCycle, phi: Sequence[int], seed: int | None = None) -> DoublingResult:
    """Build the doubled system from an explicit bijection ``phi``.

    No coset-safety check happens here; :func:`double` supplies a safe phi.
    """
    u = ps.order
    if u < 11 or u % 2 == 0:
        raise OrderTooSmall(f"doubling needs odd order >= 11, got {u}")
    H = six_cycle(ps, H.points)
    phi = tuple(int(p) for p in phi)
    if sorted(phi) != list(range(u)):
        raise STSError("phi must be a bijection Z_u -> U")
    inf = 2 * u

    def z(k):
        return u + k % u

    fac = standard_one_factorisation(u)
    dagger = set()
    for i, factor in enumerate(fac.factors):
        for edge in factor:
            a, b = (inf if p == u else z(p) for p in edge)
            dagger.add(_blk(a, b, phi[i]))
    x1, x2, x3, x4, x5, x6 = H.points
    ddagger = {_blk(z(3), z(u - 1), x1), _blk(z(u - 1), z(1), x2), _blk(z(1), z(3), x3),
               _blk(z(3), z(5), x4), _blk(z(5), z(7), x5), _blk(z(7), z(3), x6)}
    if not ddagger <= dagger:
        raise InternalInconsistency("replaced triples are not all in the 1-factor triples")
    b0 = {_blk(z(u - 1), z(1), z(3)), _blk(z(3), z(5), z(7))}
    b2 = {_blk(x1, x2, z(u - 1)), _blk(x2, x3, z(1)), _blk(x3, x4, z(3)),
          _blk(x4, x5, z(5)), _blk(x5, x6, z(7)), _blk(x1, x6, z(3))}
    b1 = dagger - ddagger
    out = PartialSTS(2 * u + 1, list(ps.blocks) + sorted(b0 | b1 | b2))
    return DoublingResult(u, out, phi, H, frozenset(dagger), frozenset(ddagger),
                          frozenset(b0), frozenset(b1), frozenset(b2), seed)


def double(ps: PartialSTS, H: SixCycle, seed: int | None = None,
           subsystems: Sequence[SubsystemRecord] | None = None) -> DoublingResult:
    phi_prime = initial_injection(ps, H, seed)
    phi = extend_bijection(ps, phi_prime, seed, subsystems)
    return assemble(ps, H, phi, seed)


@dataclass
class VerificationReport:
    valid_partial: bool
    leave_delta_exact: bool
    new_subsystems: list[SubsystemRecord]
    unsafe_cosets: list[Coset]
    replaced_inside_dagger: bool
    type_census: dict[int, int]
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def type_census(output: PartialSTS, u: int) -> dict[int, int]:
    """Number of blocks containing exactly k original points, k = 0..3."""
    cnt = Counter(sum(p < u for p in blk) for blk in output.blocks)
    return {k: cnt.get(k, 0) for k in range(4)}


def verify_doubling(input_ps: PartialSTS, result: DoublingResult,
                    H: SixCycle | None = None) -> VerificationReport:
    H = result.cycle if H is None else H
    u = input_ps.order
    out = result.output
    failures = []

    valid = out.order == 2 * u + 1 and all(out.has_block(b) for b in input_ps.blocks)
    if valid:
        try:
            PartialSTS(out.order, out.blocks)
        except STSError:
            valid = False
    if not valid:
        failures.append("output is not a valid partial system extending the input")

    expected = set(input_ps.leave_edges()) - set(H.edges())
    delta = set(out.leave_edges()) == expected
    if not delta:
        failures.append("leave of the output is not the input leave minus the hexagon")

    new = new_subsystem_violations(out, input_ps) if valid else []
    if new:
        failures.append(f"{len(new)} new nontrivial proper subsystem(s)")

    unsafe = coset_violations(input_ps, result.phi)
    if unsafe:
        failures.append(f"{len(unsafe)} coset(s) mapped onto subsystems")

    inside = result.b_ddagger <= result.b_dagger
    if not inside:
        failures.append("replaced triples not contained in the 1-factor triples")

    return VerificationReport(valid, delta, new, unsafe, inside, type_census(out, u), failures)
