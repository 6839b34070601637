"""Lens orbifolds L(q; s_1, ..., s_n): parameters, isometry classes, isotropy."""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class InvalidLens(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class OrderMismatch(ValueError):
    pass


class NotADivisor(ValueError):
    pass


def fold(x: int, q: int) -> int:
    r = x % q
    return min(r, q - r)


def units(q: int) -> list[int]:
    """Units t mod q with t <= q/2; -t gives the same folded parameters."""
    if q <= 2:
        return [1]
    return [t for t in range(1, q // 2 + 1) if math.gcd(t, q) == 1]


@dataclass(frozen=True, eq=False)
class LensParams:
    """Parameters of L(q; s) with every s_j folded into [0, q/2].

    The action must be effective: gcd(q, s_1, ..., s_n) = 1. Non-effective
    inputs are rejected rather than renormalised.
    """

    q: int
    s: tuple[int, ...]

    def __init__(self, q: int, s: Iterable[int]):
        q = int(q)
        if q < 1:
            raise InvalidLens(f"q must be positive, got {q}")
        folded = tuple(fold(int(x), q) for x in s)
        if len(folded) < 2:
            raise InvalidLens("need at least two parameters (dimension >= 3)")
        g = q
        for x in folded:
            g = math.gcd(g, x)
        if g != 1:
            raise InvalidLens(f"gcd(q, s) = {g} != 1 for L({q};{','.join(map(str, s))})")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "s", folded)

    def _key(self) -> tuple:
        return (self.q, self.s)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LensParams):
            return NotImplemented
        return self._key() == other._key()

    def __lt__(self, other: LensParams) -> bool:
        return self._key() < other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    @property
    def n(self) -> int:
        return len(self.s)

    @property
    def dim(self) -> int:
        return 2 * self.n - 1

    def is_manifold(self) -> bool:
        return all(math.gcd(self.q, x) == 1 for x in self.s)

    def __str__(self) -> str:
        return f"L({self.q};{','.join(map(str, self.s))})"

    def to_json(self) -> dict:
        return {"q": self.q, "s": list(self.s)}

    @classmethod
    def from_json(cls, data: dict) -> LensParams:
        return cls(data["q"], data["s"])

    @classmethod
    def parse(cls, text: str) -> LensParams:
        m = re.fullmatch(r"\s*L\(\s*(\d+)\s*;\s*([-\d,\s]+)\)\s*", text)
        if not m:
            raise InvalidLens(f"cannot parse lens {text!r}")
        return cls(int(m.group(1)), [int(x) for x in m.group(2).split(",") if x.strip()])

    def padded(self, extra: Sequence[int]) -> LensParams:
        return LensParams(self.q, self.s + tuple(extra))


class CanonicalLens(LensParams):
    """Lexicographically least sorted representative of an isometry class."""


@dataclass(frozen=True)
class IsotropyProfile:
    """Multiset {{gcd(q, s_j)}}, stored sorted."""

    values: tuple[int, ...]

    def is_manifold(self) -> bool:
        return all(v == 1 for v in self.values)

    def __str__(self) -> str:
        return "{{" + ",".join(map(str, self.values)) + "}}"


def _image(s: Sequence[int], t: int, q: int) -> tuple[int, ...]:
    return tuple(sorted(fold(t * x, q) for x in s))


def canonical_form(L: LensParams) -> CanonicalLens:
    q = L.q
    best = min(_image(L.s, t, q) for t in units(q))
    return CanonicalLens(q, best)


def is_isometric(L: LensParams, L2: LensParams) -> bool:
    if L.n != L2.n:
        raise DimensionMismatch(f"{L} and {L2} have different dimensions")
    if L.q != L2.q:
        raise OrderMismatch(f"{L} and {L2} have different q")
    return canonical_form(L) == canonical_form(L2)


def _candidates(q: int, n: int, spaces_only: bool) -> Iterator[tuple[int, ...]]:
    half = q // 2
    if spaces_only:
        pool = [x for x in range(half + 1) if math.gcd(q, x) == 1]
    else:
        pool = list(range(half + 1))
    for s in itertools.combinations_with_replacement(pool, n):
        g = q
        for x in s:
            g = math.gcd(g, x)
        if g == 1:
            yield s


def enumerate_classes(q: int, n: int, spaces_only: bool = False) -> list[CanonicalLens]:
    """All isometry classes of n-parameter lens orbifolds of order q.

    Candidates are visited in lexicographic order, so the first member of an
    orbit seen is its canonical representative; the whole orbit is then
    marked as seen.
    """
    if q < 1 or n < 2:
        raise InvalidLens("need q >= 1 and n >= 2")
    ts = units(q)
    seen: set[tuple[int, ...]] = set()
    reps = []
    for s in _candidates(q, n, spaces_only):
        if s in seen:
            continue
        for t in ts:
            seen.add(_image(s, t, q))
        reps.append(CanonicalLens(q, s))
    return reps


def isotropy_profile(L: LensParams) -> IsotropyProfile:
    return IsotropyProfile(tuple(sorted(math.gcd(L.q, x) for x in L.s)))


def cover(L: LensParams, q1: int) -> CanonicalLens:
    """The cover L(q1; s mod q1) for a divisor q1 of q, canonicalised."""
    if q1 < 1 or L.q % q1:
        raise NotADivisor(f"{q1} does not divide {L.q}")
    return canonical_form(LensParams(q1, L.s))
