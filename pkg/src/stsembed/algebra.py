"""Cyclic-group arithmetic and the standard 1-factorisation of K_{n+1}.

Inside this module the point at infinity of ``Z_n u {inf}`` is the integer
``n``.  Callers may pass :data:`INF` instead; it is translated on the way in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from .errors import BadParity, BadRange, EvenModulus

INF = "inf"


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


@dataclass(frozen=True)
class CycGroup:
    n: int

    def __post_init__(self):
        if self.n < 3 or self.n % 2 == 0:
            raise EvenModulus(f"modulus {self.n} must be odd and at least 3")

    def proper_nontrivial_divisors(self) -> list[int]:
        """Generators ``d`` of the subgroups ``<d>`` other than 0 and Z_n."""
        return [d for d in divisors(self.n) if 1 < d < self.n]

    def cosets(self, d: int) -> list["Coset"]:
        return [Coset(self.n, d, r) for r in range(d)]


@dataclass(frozen=True)
class Coset:
    """The coset ``r + <d>`` of ``Z_n``."""

    n: int
    d: int
    r: int

    @cached_property
    def elements(self) -> tuple[int, ...]:
        return tuple(range(self.r, self.n, self.d))

    def __len__(self) -> int:
        return self.n // self.d

    def __contains__(self, x: int) -> bool:
        return x % self.d == self.r


def coset_containing(n: int, d: int, x: int) -> Coset:
    return Coset(n, d, x % d)


def all_proper_cosets(n: int) -> list[Coset]:
    """Every coset of every nontrivial proper subgroup of Z_n."""
    return [c for d in CycGroup(n).proper_nontrivial_divisors() for c in CycGroup(n).cosets(d)]


@dataclass(frozen=True)
class OneFactorisation:
    n: int
    factors: tuple[frozenset, ...]

    @property
    def infinity(self) -> int:
        return self.n

    def factor_of(self, x: int, y: int) -> int:
        """Index of the factor containing the edge ``{x, y}``."""
        n = self.n
        if x == n:
            return y
        if y == n:
            return x
        # 2i = x + y, and 2 is invertible mod odd n
        return ((x + y) * ((n + 1) // 2)) % n


def standard_one_factorisation(n: int) -> OneFactorisation:
    if n % 2 == 0:
        raise EvenModulus(f"modulus {n} must be odd")
    if n < 3:
        raise BadRange("modulus must be at least 3")
    factors = []
    for i in range(n):
        f = {frozenset((n, i))}
        for x in range(n):
            y = (2 * i - x) % n
            if x < y:
                f.add(frozenset((x, y)))
        factors.append(frozenset(f))
    return OneFactorisation(n, tuple(factors))


def _internal(S: Iterable, n: int) -> set[int]:
    out = set()
    for x in S:
        out.add(n if x == INF or x is None else int(x))
    return out


def closed_under_distinct_sums(S: Iterable[int], n: int) -> bool:
    S = {x % n for x in S}
    return all((a + b) % n in S for a in S for b in S if a != b)


def is_subgroup(S: Iterable[int], n: int) -> bool:
    S = {x % n for x in S}
    if 0 not in S:
        return False
    return all((a + b) % n in S for a in S for b in S)


def induced_sub_factorisation(S: Iterable, fac: OneFactorisation) -> list[int] | None:
    """Indices of the factors used by a sub-1-factorisation on ``S``, or None.

    The edges of K_S split by the factor of ``fac`` holding them; a
    1-factorisation on ``S`` with every factor inside a factor of ``fac`` exists
    exactly when each nonempty class is already a perfect matching of ``S``
    (a matching can only be split into perfect matchings trivially).
    """
    S = _internal(S, fac.n)
    if len(S) < 2 or len(S) % 2:
        return None
    classes: dict[int, set[int]] = {}
    pts = sorted(S)
    for a_idx, x in enumerate(pts):
        for y in pts[a_idx + 1:]:
            cls = classes.setdefault(fac.factor_of(x, y), set())
            if x in cls or y in cls:
                return None
            cls.update((x, y))
    if any(len(cls) != len(S) for cls in classes.values()):
        return None
    return sorted(classes)


def harmonic_bound(d1: int, d2: int) -> tuple[float, float]:
    """``(1/d1 + 1/(d1+2) + ... + 1/d2, ln((d2+1)/(d1-1)) / 2)`` for odd d1 <= d2."""
    if d1 % 2 == 0 or d2 % 2 == 0:
        raise BadParity("both endpoints must be odd")
    if not 3 <= d1 <= d2:
        raise BadRange("need 3 <= d1 <= d2")
    total = math.fsum(1.0 / d for d in range(d1, d2 + 1, 2))
    return total, 0.5 * math.log((d2 + 1) / (d1 - 1))


def admissible_coset_divisors(u: int) -> list[int]:
    """Divisors ``d`` whose subgroup ``<d>`` has order 1 or 3 mod 6."""
    return [d for d in divisors(u) if 1 < d < u and (u // d) % 6 in (1, 3)]
