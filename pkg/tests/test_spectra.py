import itertools
from fractions import Fraction

import pytest
from hypothesis import given

from lenspec.exactmath import IntPoly, series_expand
from lenspec.lattice import phi_profile
from lenspec.lens import LensParams, enumerate_classes
from lenspec.spectra import (
    a_poly,
    a_poly_table,
    eigenvalue,
    ftilde0,
    ftilde0_cyclo,
    ftilde0_divisor_block,
    genfun0_ikeda_direct,
    genfun_from_profile,
    hodge_genfun_ikeda,
    hodge_genfun_ikeda_all,
    hodge_genfun_lattice,
    multiplicities,
)
from tests.conftest import lenses


def weyl_dim(lam):
    """Weyl dimension formula for so(2n) with highest weight lam."""
    n = len(lam)
    rho = [n - 1 - i for i in range(n)]
    l = [a + b for a, b in zip(lam, rho)]
    out = Fraction(1)
    for i in range(n):
        for j in range(i + 1, n):
            out *= Fraction(l[i] ** 2 - l[j] ** 2, rho[i] ** 2 - rho[j] ** 2)
    return int(out)


def sphere_string(n, p, k):
    lam = [k] + [1] * p + [0] * (n - 1 - p)
    if p == n - 1 and n > 1:
        flip = lam[:-1] + [-lam[-1]]
        return weyl_dim(lam) + weyl_dim(flip)
    return weyl_dim(lam)


def invariant_monomials(L, k):
    """Monomials z^a zbar^b of degree k fixed by the generator."""
    n, q = L.n, L.q
    count = 0
    for a in itertools.product(range(k + 1), repeat=2 * n):
        if sum(a) != k:
            continue
        if sum((a[j] - a[n + j]) * L.s[j] for j in range(n)) % q == 0:
            count += 1
    return count


def test_eigenvalue():
    assert eigenvalue(1, 0, 2) == 3
    assert eigenvalue(3, -1, 4) == 0
    assert eigenvalue(2, 1, 3) == 3 * 5
    with pytest.raises(ValueError):
        eigenvalue(0, 0, 3)


def test_a_poly_small():
    assert a_poly(2, 1, 0) == IntPoly([1])
    assert a_poly(2, 2, 0) == IntPoly([1, 0, 1])
    T = a_poly_table(3)
    assert [T[2, l] for l in range(3)] == [IntPoly([2, 0, 2]), IntPoly([1, 0, 3]), IntPoly([0, 0, 4])]
    assert [T[3, l] for l in range(3)] == [IntPoly([1, 0, 4, 0, 1]), IntPoly([0, 0, 4, 0, 2]),
                                           IntPoly([0, 0, 2, 0, 4])]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_sphere_against_weyl_dimension(n):
    L = LensParams(1, [0] * n)
    for p in range(n):
        s = series_expand(hodge_genfun_lattice(L, p).f, 8)
        assert [int(c) for c in s.coeffs] == [sphere_string(n, p, k) for k in range(1, 10)]


@pytest.mark.parametrize("L", [LensParams(5, [1, 2]), LensParams(4, [0, 1]), LensParams(6, [1, 2, 3]),
                               LensParams(3, [1, 1, 1]), LensParams(8, [0, 1, 3])], ids=str)
def test_f0_against_invariant_harmonics(L):
    s = series_expand(hodge_genfun_lattice(L, 0).f, 4)
    for k in range(1, 6):
        assert s[k - 1] == invariant_monomials(L, k) - (invariant_monomials(L, k - 2) if k >= 2 else 0)


CROSS = [c for n in (2, 3) for q in range(1, 8) for c in enumerate_classes(q, n)]


@pytest.mark.parametrize("L", CROSS, ids=str)
def test_lattice_route_matches_character_route(L):
    K = 2 * L.q + 2
    ik = hodge_genfun_ikeda_all(L, K)
    P = phi_profile(L)
    for p in range(L.n):
        assert series_expand(genfun_from_profile(P, p), K) == ik[p]


@pytest.mark.parametrize("L", [LensParams(11, [1, 2, 3]), LensParams(12, [1, 5, 6]), LensParams(9, [0, 1, 3, 4])],
                         ids=str)
def test_direct_f0_formula(L):
    K = 20
    assert genfun0_ikeda_direct(L, K) == hodge_genfun_ikeda(L, 0, K)
    assert hodge_genfun_ikeda(L, -1, K) == series_expand(genfun_from_profile(phi_profile(L), -1), K)


@pytest.mark.parametrize("L", [LensParams(12, [1, 5, 6]), LensParams(10, [1, 2, 5]), LensParams(9, [1, 3])], ids=str)
def test_ftilde0_routes_and_divisor_blocks(L):
    K = 25
    cyc = ftilde0_cyclo(L, K)
    assert series_expand(ftilde0(L), K) == cyc
    acc = None
    for d in range(1, L.q + 1):
        if L.q % d == 0:
            blk = ftilde0_divisor_block([x % d for x in L.s], d, K)
            acc = blk if acc is None else acc + blk
    assert acc == cyc


@pytest.mark.property
@given(lenses(q_max=16, n_max=4))
def test_genfun_coefficients_are_nonnegative_integers(L):
    P = phi_profile(L)
    for p in range(L.n):
        s = series_expand(genfun_from_profile(P, p), 2 * L.q)
        assert s.is_integral()
        assert all(c >= 0 for c in s.coeffs)


@pytest.mark.property
@given(lenses(q_max=10, n_max=3))
def test_lattice_and_character_routes_random(L):
    K = L.q + 3
    ik = hodge_genfun_ikeda_all(L, K)
    for p in range(L.n):
        assert series_expand(hodge_genfun_lattice(L, p).f, K) == ik[p]


def test_genfun_range():
    P = phi_profile(LensParams(5, [1, 2]))
    assert genfun_from_profile(P, -1) == 0
    with pytest.raises(ValueError):
        genfun_from_profile(P, 2)


def test_multiplicities_sphere_functions():
    n = 3
    got = multiplicities(LensParams(1, [0] * n), 0, 5)
    assert got[0].eigenvalue == 0 and got[0].multiplicity == 1
    want = {eigenvalue(k, 0, n): sphere_string(n, 0, k) for k in range(1, 6)}
    assert {m.eigenvalue: m.multiplicity for m in got[1:]} == want


@pytest.mark.parametrize("n,p", [(2, 1), (3, 1), (3, 2), (4, 2)])
def test_multiplicities_union_of_strings(n, p):
    # lambda_{k,p-1} = (k+n-1)^2 - (n-p)^2 and lambda_{j,p} = (j+n-1)^2 - (n-1-p)^2
    # never coincide for k, j >= 1, so the table is the disjoint union of both strings
    got = {m.eigenvalue: m.multiplicity for m in multiplicities(LensParams(1, [0] * n), p, 6)}
    lower = {eigenvalue(k, p - 1, n): sphere_string(n, p - 1, k) for k in range(1, 7)}
    upper = {eigenvalue(k, p, n): sphere_string(n, p, k) for k in range(1, 7)}
    assert not set(lower) & set(upper)
    assert got == {**lower, **upper}


def test_isospectral_pair_same_multiplicities():
    a, b = LensParams(11, [1, 2, 3]), LensParams(11, [1, 2, 4])
    assert multiplicities(a, 0, 30) == multiplicities(b, 0, 30)
    assert multiplicities(a, 1, 30) != multiplicities(b, 1, 30)
