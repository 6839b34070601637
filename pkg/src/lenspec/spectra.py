"""Hodge-Laplace generating functions F^p of lens orbifolds.

Production route: closed form in the one-norm generating functions of the
congruence lattice, with orbifold-independent coefficient polynomials A_p^(l).
Oracle route: the character sum over the cyclic group, expanded as a power
series with coefficients in Q(zeta_q).

F^p(z) = sum_k dim V^Gamma_{pi_{k,p+1}} z^k, and the p-spectrum is carried by
the pair (F^(p-1), F^p), with F^(-1) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from lenspec.exactmath import (
    IntPoly,
    CycloElem,
    RationalFunction,
    TruncatedSeries,
    NotRational,
    one_minus_zk_pow,
    series_expand,
)
from lenspec.lattice import PhiProfile, phi_profile, theta_numerators, theta_profile
from lenspec.lens import LensParams, canonical_form


def binom(a: int, b: int) -> int:
    if b < 0 or a < 0 or b > a:
        return 0
    return math.comb(a, b)


def eigenvalue(k: int, p: int, n: int) -> int:
    """lambda_{k,p}: 0 for p = -1, else (k + p)(k + 2n - 2 - p)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if p == -1:
        return 0
    return (k + p) * (k + 2 * n - 2 - p)


@lru_cache(maxsize=None)
def a_poly(n: int, p: int, l: int) -> IntPoly:
    """The coefficient polynomial A_p^(l)(z) for 1 <= p <= n, 0 <= l <= n."""
    coeffs: dict[int, int] = {}
    for j in range(1, p + 1):
        sign = (-1) ** (j - 1)
        for t in range((p - j) // 2 + 1):
            bt = binom(n - p + j + 2 * t, t)
            if not bt:
                continue
            rest = p - j - 2 * t
            for beta in range(rest + 1):
                w = 2 ** (rest - beta) * binom(n - l, beta) * binom(l, rest - beta)
                if not w:
                    continue
                for alpha in range(beta + 1):
                    c = sign * bt * w * binom(beta, alpha)
                    for i in range(j):
                        e = 2 * (p - j - t - alpha + i)
                        coeffs[e] = coeffs.get(e, 0) + c
    if not coeffs:
        return IntPoly()
    top = max(coeffs)
    return IntPoly(coeffs.get(e, 0) for e in range(top + 1))


@dataclass(frozen=True)
class APolyTable:
    n: int
    entries: tuple[tuple[IntPoly, ...], ...]  # entries[p - 1][l]

    def __getitem__(self, key: tuple[int, int]) -> IntPoly:
        p, l = key
        return self.entries[p - 1][l]


def a_poly_table(n: int) -> APolyTable:
    if n < 2:
        raise ValueError("n must be >= 2")
    return APolyTable(n, tuple(tuple(a_poly(n, p, l) for l in range(n + 1))
                               for p in range(1, n + 1)))


@dataclass(frozen=True)
class HodgeGenFun:
    L: LensParams
    p: int
    f: RationalFunction


@dataclass(frozen=True)
class EigenvalueMult:
    eigenvalue: int
    multiplicity: int


def string_numerator(P: PhiProfile, index: int, nums: tuple[IntPoly, ...] | None = None) -> IntPoly:
    """sum_l A_index^(l) * theta-numerator^(l).

    Two orbifolds with the same q and n have equal F^(index-1) iff these
    polynomials agree, because the rest of the closed form only depends on
    (q, n, index).
    """
    if nums is None:
        nums = theta_numerators(P)
    acc = IntPoly()
    for l in range(P.n + 1):
        a = a_poly(P.n, index, l)
        if a and nums[l]:
            acc = acc + a * nums[l]
    return acc


def genfun_from_profile(P: PhiProfile, p: int, nums=None) -> RationalFunction:
    """F^p as a rational function, from a reduced-count profile."""
    n, q = P.n, P.q
    if p == -1:
        return RationalFunction(0)
    if not 0 <= p <= n - 1:
        raise ValueError(f"p must lie in -1..{n - 1}")
    idx = p + 1
    common = one_minus_zk_pow(2, n - 1) * one_minus_zk_pow(q, n)
    num = string_numerator(P, idx, nums) + common * (-1) ** idx
    return RationalFunction(num, common, -idx)


def hodge_genfun_lattice(L: LensParams, p: int, profile: PhiProfile | None = None) -> HodgeGenFun:
    P = profile if profile is not None else phi_profile(L)
    return HodgeGenFun(canonical_form(L), p, genfun_from_profile(P, p))


def ftilde0(L: LensParams, profile: PhiProfile | None = None) -> RationalFunction:
    """q (z F^0 + 1) / (1 - z^2) = q theta / (1 - z^2)^n."""
    P = profile if profile is not None else phi_profile(L)
    total = theta_profile(P).total
    return RationalFunction(total.num * L.q, total.den * one_minus_zk_pow(2, L.n), total.zpow)


# cyclotomic oracle route -----------------------------------------------------


def _cyclo_poly_mul(a: list, b: list, q: int) -> list:
    out = [CycloElem.rational(q, 0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _conj_pair_sum(q: int, d: int, h: int, x: int) -> CycloElem:
    """zeta_d^(hx) + zeta_d^(-hx) inside Q(zeta_q), d | q."""
    e = (q // d) * h * x
    return CycloElem.zeta(q, e) + CycloElem.zeta(q, -e)


def _det_and_chars(q: int, d: int, h: int, s) -> tuple[list, list]:
    """Coefficients (in z) of det(1 - z g)-style quadratic product and of the
    exterior-power characters, for g = gamma^h acting through zeta_d.

    det(z - g) = prod_j (z^2 - c_j z + 1) is palindromic, so its coefficient
    list read as a polynomial in z is the same either way.
    """
    det = [CycloElem.rational(q, 1)]
    chars = [CycloElem.rational(q, 1)]
    for x in s:
        c = _conj_pair_sum(q, d, h, x)
        one = CycloElem.rational(q, 1)
        det = _cyclo_poly_mul(det, [one, -c, one], q)
        chars = _cyclo_poly_mul(chars, [one, c, one], q)
    return det, chars


def _inverse_series(det: list, K: int, q: int) -> list:
    out = [CycloElem.rational(q, 1)]
    for k in range(1, K + 1):
        acc = CycloElem.rational(q, 0)
        for i in range(1, min(k, len(det) - 1) + 1):
            acc = acc + det[i] * out[k - i]
        out.append(-acc)
    return out


def _orbit_weights(q: int):
    """h in 0..q/2 with weight 2 when h and q - h are distinct.

    gamma^h and gamma^(q-h) have the same eigenvalues up to inversion, so they
    contribute identical terms.
    """
    for h in range(q // 2 + 1):
        yield h, (1 if 2 * h % q == 0 else 2)


def character_sums(L: LensParams, K: int, kmax: int) -> list[TruncatedSeries]:
    """G_k(z) = sum_h chi^k(gamma^h) / det(z - gamma^h) to order K, k <= kmax."""
    q = L.q
    zero = CycloElem.rational(q, 0)
    acc = [[zero] * (K + 1) for _ in range(kmax + 1)]
    for h, w in _orbit_weights(q):
        det, chars = _det_and_chars(q, q, h, L.s)
        inv = _inverse_series(det, K, q)
        for k in range(kmax + 1):
            ck = chars[k] * w
            row = acc[k]
            for i in range(K + 1):
                row[i] = row[i] + ck * inv[i]
    out = []
    for row in acc:
        try:
            out.append(TruncatedSeries([c.to_rational() for c in row], K))
        except NotRational as exc:
            raise NotRational(f"character sum for {L} is not rational") from exc
    return out


def hodge_genfun_ikeda_all(L: LensParams, K: int) -> list[TruncatedSeries]:
    """Series of F^0, ..., F^(n-1) to order K from the character-sum formula.

    Computes z^(p+1) F^p = (-1)^(p+1)
      + (1/q) sum_{k<=p} (-1)^(p-k) (z^k - z^(2p-k+2)) G_k(z)
    and strips the leading power of z; the low coefficients must vanish.
    The extra factor 1/z relative to the usual statement is what makes p = 0
    agree with the direct F^0 formula and with the lattice route.
    """
    n, q = L.n, L.q
    M = K + n + 1
    G = character_sums(L, M, n - 1)
    out = []
    for p in range(n):
        c = [Fraction(0)] * (M + 1)
        c[0] += (-1) ** (p + 1)
        for k in range(p + 1):
            sgn = Fraction((-1) ** (p - k), q)
            for i, g in enumerate(G[k].coeffs):
                if not g:
                    continue
                if i + k <= M:
                    c[i + k] += sgn * g
                if i + 2 * p - k + 2 <= M:
                    c[i + 2 * p - k + 2] -= sgn * g
        shift = p + 1
        if any(c[:shift]):
            raise NotRational(f"negative powers of z survive in F^{p} for {L}")
        out.append(TruncatedSeries(c[shift:], K))
    return out


def hodge_genfun_ikeda(L: LensParams, p: int, K: int) -> TruncatedSeries:
    if p == -1:
        return TruncatedSeries([], K)
    if not 0 <= p <= L.n - 1:
        raise ValueError(f"p must lie in -1..{L.n - 1}")
    return hodge_genfun_ikeda_all(L, K)[p]


def genfun0_ikeda_direct(L: LensParams, K: int) -> TruncatedSeries:
    """F^0 from (1/z) ((1 - z^2)/q * sum_h 1/det(z - gamma^h) - 1)."""
    G0 = character_sums(L, K + 1, 0)[0]
    c = [Fraction(0)] * (K + 2)
    for i, g in enumerate(G0.coeffs):
        c[i] += g / L.q
        if i + 2 <= K + 1:
            c[i + 2] -= g / L.q
    c[0] -= 1
    if c[0]:
        raise NotRational(f"constant term survives for {L}")
    return TruncatedSeries(c[1:], K)


def ftilde0_cyclo(L: LensParams, K: int) -> TruncatedSeries:
    """sum_h prod_j 1/((z - zeta^(h s_j))(z - zeta^(-h s_j))) to order K."""
    return character_sums(L, K, 0)[0]


def ftilde0_divisor_block(s, d: int, K: int) -> TruncatedSeries:
    """Terms of the same sum with h running over primitive d-th roots only."""
    zero = CycloElem.rational(d, 0)
    acc = [zero] * (K + 1)
    for h in range(d):
        if math.gcd(h, d) != 1:
            continue
        det, _ = _det_and_chars(d, d, h, s)
        inv = _inverse_series(det, K, d)
        acc = [a + b for a, b in zip(acc, inv)]
    return TruncatedSeries([c.to_rational() for c in acc], K)


# spectra ----------------------------------------------------------------------


def multiplicities(L: LensParams, p: int, kmax: int,
                   profile: PhiProfile | None = None) -> list[EigenvalueMult]:
    """The p-spectrum for k = 1..kmax, as sorted (eigenvalue, multiplicity).

    String p-1 contributes lambda_{k,p-1} with multiplicity coeff_{k-1} of
    F^(p-1), string p contributes lambda_{k,p} with coeff_{k-1} of F^p.
    For p = 0 the first string is just the constants: eigenvalue 0 once.
    Coinciding eigenvalues from the two strings are merged.
    """
    n = L.n
    if not 0 <= p <= n - 1:
        raise ValueError(f"p must lie in 0..{n - 1}")
    P = profile if profile is not None else phi_profile(L)
    K = max(kmax - 1, 0)
    mult: dict[int, int] = {}

    def add(lam: int, m: int) -> None:
        if m:
            mult[lam] = mult.get(lam, 0) + m

    if p == 0:
        add(0, 1)
    else:
        lower = series_expand(genfun_from_profile(P, p - 1), K)
        for k in range(1, kmax + 1):
            add(eigenvalue(k, p - 1, n), int(lower[k - 1]))
    upper = series_expand(genfun_from_profile(P, p), K)
    for k in range(1, kmax + 1):
        add(eigenvalue(k, p, n), int(upper[k - 1]))
    return [EigenvalueMult(lam, m) for lam, m in sorted(mult.items())]
