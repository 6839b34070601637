import itertools
import random

import pytest
from hypothesis import given, strategies as st

from lenspec.exactmath import IntPoly
from lenspec.lattice import phi_profile
from lenspec.lens import DimensionMismatch, LensParams, OrderMismatch, canonical_form, enumerate_classes
from lenspec.isospec import (
    FamilyReport,
    NotApplicable,
    NotLensSpace,
    a_matrix,
    a_matrix_minors,
    all_theta_equal,
    bareiss_det,
    classify_families,
    hole_violations,
    ikeda_filtration_level,
    isospec_set,
    iset_from_keys,
    p_isospectral,
    scan_conjectures,
    string_keys,
    summary_rows,
    theta_moment_prefix,
    two_isospectral_system,
    verify_covering,
    verify_hole,
    verify_ikeda_filtration,
    verify_padding,
    zero_isospectral,
)
from lenspec.spectra import string_numerator

L = LensParams


def laplace_det(M):
    if not M:
        return IntPoly([1])
    acc = IntPoly()
    for j, x in enumerate(M[0]):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = x * laplace_det(minor)
        acc = acc + (term if j % 2 == 0 else -term)
    return acc


def test_ikeda_q11_pair():
    a, b = L(11, [1, 2, 3]), L(11, [1, 2, 4])
    assert p_isospectral(a, b, 0)
    assert not p_isospectral(a, b, 1)
    assert not p_isospectral(a, b, 2)
    assert isospec_set(a, b).iset == {0}


def test_q11_family_report():
    rep = classify_families(11, 3, spaces_only=True)
    assert rep.to_json() == {"q": 11, "n": 3,
                             "families": [{"members": ["L(11;1,2,3)", "L(11;1,2,4)"], "I": [0]}]}


def test_q13_families():
    rep = classify_families(13, 4, spaces_only=True)
    fams = {tuple(map(str, f.members)): f.iset for f in rep.families}
    assert fams == {("L(13;1,2,3,4)", "L(13;1,2,3,5)"): (0, 1),
                    ("L(13;1,2,3,4)", "L(13;1,2,3,5)", "L(13;1,2,3,6)"): (0,)}


def test_q13_written_parameters_map_to_canonical():
    # parameters as written for the three q = 13 spaces, before canonicalisation
    l1, l2, l3 = L(13, [3, 4, 5, 6]), L(13, [2, 4, 5, 6]), L(13, [2, 3, 4, 6])
    assert isospec_set(l2, l3).iset == {0, 1}
    assert isospec_set(l1, l2).iset == {0}
    assert isospec_set(l1, l3).iset == {0}
    assert [ikeda_filtration_level(x) for x in (l1, l2, l3)] == [0, 1, 2]


def test_mismatches():
    with pytest.raises(DimensionMismatch):
        p_isospectral(L(5, [1, 2]), L(5, [1, 2, 2]), 0)
    with pytest.raises(OrderMismatch):
        isospec_set(L(5, [1, 2]), L(7, [1, 2]))
    with pytest.raises(ValueError):
        p_isospectral(L(5, [1, 2]), L(5, [1, 2]), 2)


def test_isometric_pairs_share_everything():
    a, b = L(36, [1, 3, 5, 17]), L(36, [1, 7, 11, 15])
    assert isospec_set(a, b).iset == {0, 1, 2, 3}
    assert all_theta_equal(a, b)


def test_dim5_two_pair():
    a, b = L(8, [0, 1, 3]), L(8, [1, 3, 4])
    assert isospec_set(a, b).iset == {2}


def test_all_p_pairs():
    a, b = L(49, [1, 6, 15]), L(49, [1, 6, 20])
    assert isospec_set(a, b).iset == {0, 1, 2}
    for m in (0, 7, 14, 21):
        assert isospec_set(a.padded([m]), b.padded([m])).iset == {0, 1, 2, 3}


def test_dim3_pair_not_zero_isospectral():
    assert not zero_isospectral(L(15, [1, 2]), L(15, [1, 4]))


def test_keys_agree_with_rational_functions():
    for a, b in itertools.combinations(enumerate_classes(8, 3), 2):
        ka, kb = string_keys(phi_profile(a)), string_keys(phi_profile(b))
        assert iset_from_keys(ka, kb) == isospec_set(a, b).iset


def test_keys_bigint_path(monkeypatch):
    import lenspec.isospec as mod

    P = phi_profile(L(13, [1, 2, 3, 5]))
    monkeypatch.setattr(mod, "_int64_safe", lambda P: False)
    slow = string_keys(P)
    assert [IntPoly(s) for s in slow] == [string_numerator(P, i) for i in range(1, 5)]


@pytest.mark.property
@pytest.mark.parametrize("q", [8, 12, 15, 16])
def test_families_brute_force(q):
    """Every pair inside a reported family shares at least its I, and every
    pair with a nonempty isospectral set is covered by some family."""
    rep = classify_families(q, 3)
    classes = enumerate_classes(q, 3)
    covered = set()
    for f in rep.families:
        for a, b in itertools.combinations(f.members, 2):
            assert set(f.iset) <= isospec_set(a, b).iset
            covered.add((a, b))
    for a, b in itertools.combinations(classes, 2):
        if isospec_set(a, b).iset:
            assert (a, b) in covered


def test_family_order_is_deterministic():
    a = classify_families(24, 3).to_json()
    b = classify_families(24, 3, members=list(reversed(enumerate_classes(24, 3)))).to_json()
    assert a == b


@pytest.mark.property
@pytest.mark.parametrize("q", range(1, 41))
def test_hole_free_over_scans(q):
    rep = classify_families(q, 3)
    assert verify_hole(rep).ok


def test_hole_detector_flags_synthetic_sets():
    assert hole_violations({0, 2}, 3) == [1]
    assert hole_violations({1}, 3) == [0]
    assert hole_violations({0, 1}, 3) == []
    a, b = canonical_form(L(8, [0, 1, 3])), canonical_form(L(8, [1, 3, 4]))
    rep = FamilyReport(8, 3, [], pair_isets={(a, b): frozenset({0, 2})})
    res = verify_hole(rep)
    assert not res.ok and "missing [1]" in res.violations[0]
    rep = FamilyReport(8, 3, [], pair_isets={(a, b): frozenset({1})})
    assert not verify_hole(rep).ok


def test_summary_rows_tags():
    rows = {r[0]: r[1:] for r in summary_rows(3, {(0,)}, set())}
    assert rows["{0}"] == ("exists", "not found")
    assert rows["{1}"] == ("hole", "hole")
    assert rows["{0,1}"][0] == "n-1 elements (proved)"
    assert rows["{2}"][0] == "n-2 elements (proved)"


@pytest.mark.property
@given(st.integers(1, 4), st.randoms(use_true_random=False))
def test_bareiss_matches_laplace(size, rnd):
    M = [[IntPoly([rnd.randint(-3, 3) for _ in range(rnd.randint(0, 3))]) for _ in range(size)]
         for _ in range(size)]
    assert bareiss_det(M) == laplace_det(M)


def test_bareiss_needs_pivoting():
    one, zero = IntPoly([1]), IntPoly()
    assert bareiss_det([[zero, one], [one, zero]]) == IntPoly([-1])


def test_minors_n2():
    assert dict(a_matrix_minors(2)) == {1: IntPoly([1, 0, 1]), 2: IntPoly([1])}


@pytest.mark.parametrize("n", range(2, 7))
def test_minors_nonzero(n):
    assert all(det for _, det in a_matrix_minors(n))
    assert len(a_matrix(n)) == n


def test_two_isospectral_reduced_system():
    d = two_isospectral_system()
    z = IntPoly([0, 1])
    assert d["rows"][0] == [2 * z * z + 2, 3 * z * z + 1, 4 * z * z]
    assert d["no_theta0"] == [IntPoly(), z**4 + 1, 4 * z**4]
    assert d["no_theta2"] == [2 * z * z, 2 * z * z - 1, IntPoly()]


def test_ikeda_levels():
    assert ikeda_filtration_level(L(11, [1, 2, 4])) == 0
    assert ikeda_filtration_level(L(11, [3, 4, 5])) == 0
    assert ikeda_filtration_level(L(11, [1, 2, 3])) == 1
    with pytest.raises(NotApplicable):
        ikeda_filtration_level(L(13, [1, 2, 3]))
    with pytest.raises(NotApplicable):
        ikeda_filtration_level(L(11, [1, 1, 2]))
    with pytest.raises(NotApplicable):
        ikeda_filtration_level(L(12, [1, 5, 7, 11]))


@pytest.mark.parametrize("q", [11, 13, 17, 19])
def test_filtration_consistency(q):
    assert verify_ikeda_filtration(q).ok


@pytest.mark.property
@pytest.mark.parametrize("q,n", [(9, 3), (12, 3), (13, 4), (16, 3)])
def test_theta_moment_route_agrees(q, n):
    classes = enumerate_classes(q, n)
    rnd = random.Random(q * 10 + n)
    pairs = list(itertools.combinations(classes, 2))
    for a, b in rnd.sample(pairs, min(60, len(pairs))) + [(classes[0], classes[0])]:
        iset = isospec_set(a, b).iset
        prefix = -1
        while prefix + 1 in iset:
            prefix += 1
        assert theta_moment_prefix(a, b) == prefix


def test_covering():
    res = verify_covering([(L(11, [1, 2, 3]), L(11, [1, 2, 4]))])
    assert res.ok and res.checked == 2
    with pytest.raises(NotLensSpace):
        verify_covering([(L(8, [0, 1, 3]), L(8, [1, 3, 4]))])


def test_padding():
    res = verify_padding(L(11, [1, 2, 3]), L(11, [1, 2, 4]), 2)
    assert res.ok
    res = verify_padding(L(8, [0, 1, 3]), L(8, [1, 3, 4]), 1)
    assert res.ok
    assert not p_isospectral(L(8, [0, 0, 1, 3]), L(8, [0, 1, 3, 4]), 2)


def test_conjecture_scan_reports():
    reps = [classify_families(q, 3) for q in (8, 16, 24)]
    c = scan_conjectures(reps)
    assert c.clean
    assert any("q=8" in x and "(a)" in x for x in c.confirmations)


def test_conjecture_scan_flags_counterexample():
    rep = classify_families(8, 3)
    rep.q = 16  # pretend the {2}-pair turned up at the wrong order
    assert not scan_conjectures([rep]).clean


def test_isometry_invariance_and_orbifold_covers():
    from lenspec.isospec import scan_covering_orbifolds, verify_isometry_invariance

    pairs = [(L(36, [1, 3, 5, 17]), L(36, [1, 7, 11, 15])), (L(11, [1, 2, 3]), L(11, [1, 2, 4]))]
    assert verify_isometry_invariance(pairs).ok
    res = scan_covering_orbifolds([(L(8, [0, 1, 3]), L(8, [1, 3, 4]))])
    assert res.ok and res.checked == 4
