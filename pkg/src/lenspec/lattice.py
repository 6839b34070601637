"""One-norm statistics of the congruence lattice {a in Z^n : sum a_j s_j = 0 mod q}.

The finite fingerprint is the reduced-count profile Phi^(l)(z) (vectors with
all |a_i| < q, graded by one-norm and zero count). The full one-norm
generating functions theta^(l) are rebuilt from it in closed form.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from lenspec.exactmath import IntPoly, ONE, RationalFunction, one_minus_zk_pow
from lenspec.kernels import reduced_counts
from lenspec.lens import LensParams

SCHEMA = 1
BRUTE_LIMIT = 10**8


class TooLarge(ValueError):
    pass


def in_lattice(L: LensParams, a) -> bool:
    return sum(x * y for x, y in zip(a, L.s)) % L.q == 0


@dataclass(frozen=True)
class PhiProfile:
    q: int
    n: int
    phi: tuple[IntPoly, ...]  # indexed by zero count l = 0..n

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "q": self.q, "n": self.n,
                "phi": [p.to_json() for p in self.phi]}

    @classmethod
    def from_json(cls, data: dict) -> PhiProfile:
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported PhiProfile schema {data.get('schema')!r}")
        return cls(int(data["q"]), int(data["n"]),
                   tuple(IntPoly.from_json(p) for p in data["phi"]))

    def total_count(self) -> int:
        """Number of lattice points in the box |a_i| < q."""
        return sum(p(1) for p in self.phi)


@dataclass(frozen=True)
class ThetaProfile:
    q: int
    n: int
    theta: tuple[RationalFunction, ...]
    total: RationalFunction


def phi_profile(L: LensParams, backend: str | None = None) -> PhiProfile:
    table = reduced_counts(L.q, L.s, backend=backend)
    phi = tuple(IntPoly(int(x) for x in table[:, l]) for l in range(L.n + 1))
    return PhiProfile(L.q, L.n, phi)


def theta_numerators(P: PhiProfile) -> tuple[IntPoly, ...]:
    """Numerators of theta^(l) over the common denominator (1 - z^q)^n."""
    q, n = P.q, P.n
    out = []
    for l in range(n + 1):
        acc = IntPoly()
        for s in range(n - l + 1):
            c = 2**s * math.comb(l + s, s)
            acc = acc + (P.phi[l + s] * c).shift(s * q)
        out.append(acc * one_minus_zk_pow(q, l))
    return tuple(out)


def theta_profile(P: PhiProfile) -> ThetaProfile:
    q, n = P.q, P.n
    theta = []
    for l in range(n + 1):
        acc = IntPoly()
        for s in range(n - l + 1):
            acc = acc + (P.phi[l + s] * (2**s * math.comb(l + s, s))).shift(s * q)
        theta.append(RationalFunction(acc, one_minus_zk_pow(q, n - l)))
    num = IntPoly()
    for t in range(n + 1):
        inner = IntPoly()
        for l in range(t, n + 1):
            inner = inner + P.phi[l] * math.comb(l, t)
        num = num + inner.shift(t * q)
    total = RationalFunction(num, one_minus_zk_pow(q, n))
    return ThetaProfile(q, n, tuple(theta), total)


def theta_nminus1_orbifold(L: LensParams) -> RationalFunction:
    """theta^(n-1) from the isotropy data alone.

    A vector k e_i lies in the lattice iff (q / gcd(q, s_i)) divides k, and
    both signs of k count, so the term for coordinate i is 2 z^m / (1 - z^m)
    with m = q / gcd(q, s_i).
    """
    acc = RationalFunction(0)
    for x in L.s:
        m = L.q // math.gcd(L.q, x)
        acc = acc + RationalFunction(IntPoly.monomial(m, 2), ONE - IntPoly.monomial(m))
    return acc


def _check_size(kmax: int, n: int) -> None:
    if (2 * kmax + 1) ** n > BRUTE_LIMIT:
        raise TooLarge(f"(2*{kmax}+1)^{n} candidate vectors exceeds {BRUTE_LIMIT}")


def _grid(radius: int, n: int):
    """Yield blocks of integer vectors in the cube [-radius, radius]^n."""
    axis = np.arange(-radius, radius + 1, dtype=np.int64)
    if n == 1:
        yield axis[:, None]
        return
    rest = np.stack(np.meshgrid(*([axis] * (n - 1)), indexing="ij"), axis=-1).reshape(-1, n - 1)
    for a0 in axis:
        yield np.concatenate([np.full((rest.shape[0], 1), a0, dtype=np.int64), rest], axis=1)


def brute_counts(L: LensParams, kmax: int) -> np.ndarray:
    """N(k, l) for k <= kmax by direct enumeration of lattice vectors.

    Returns an object array of shape (kmax + 1, n + 1). Independent of the DP.
    """
    n, q = L.n, L.q
    _check_size(kmax, n)
    s = np.array(L.s, dtype=np.int64)
    out = np.zeros((kmax + 1, n + 1), dtype=np.int64)
    for block in _grid(kmax, n):
        norm = np.abs(block).sum(axis=1)
        keep = (norm <= kmax) & ((block @ s) % q == 0)
        zeros = (block[keep] == 0).sum(axis=1)
        np.add.at(out, (norm[keep], zeros), 1)
    return out


def brute_phi(L: LensParams) -> tuple[IntPoly, ...]:
    """Reduced counts by enumerating the box |a_i| < q directly."""
    n, q = L.n, L.q
    _check_size(q - 1, n)
    s = np.array(L.s, dtype=np.int64)
    K = n * (q - 1)
    out = np.zeros((K + 1, n + 1), dtype=np.int64)
    for block in _grid(q - 1, n):
        keep = (block @ s) % q == 0
        sel = block[keep]
        np.add.at(out, (np.abs(sel).sum(axis=1), (sel == 0).sum(axis=1)), 1)
    return tuple(IntPoly(int(x) for x in out[:, l]) for l in range(n + 1))


def brute_counts_slow(L: LensParams, kmax: int) -> dict[tuple[int, int], int]:
    """Pure-Python enumeration, for tiny cases in tests."""
    _check_size(kmax, L.n)
    out: dict[tuple[int, int], int] = {}
    for a in itertools.product(range(-kmax, kmax + 1), repeat=L.n):
        k = sum(abs(x) for x in a)
        if k <= kmax and in_lattice(L, a):
            key = (k, sum(1 for x in a if x == 0))
            out[key] = out.get(key, 0) + 1
    return out
