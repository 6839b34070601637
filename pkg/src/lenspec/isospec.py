"""p-isospectrality decisions, I-isospectral families, obstruction checks and
conjecture scanners.

Within fixed (q, n) every F^p shares one denominator, so F^(idx-1) is
identified by the integer polynomial :func:`~lenspec.spectra.string_numerator`
for idx = 1..n. Families are read off by grouping classes on those keys.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from lenspec.exactmath import IntPoly, poly_gcd, rat_equal
from lenspec.lattice import PhiProfile, phi_profile, theta_numerators
from lenspec.lens import (
    CanonicalLens,
    DimensionMismatch,
    LensParams,
    OrderMismatch,
    canonical_form,
    cover,
    enumerate_classes,
    is_isometric,
    isotropy_profile,
)
from lenspec.spectra import a_poly, a_poly_table, ftilde0, genfun_from_profile

ProfileSource = Callable[[LensParams], PhiProfile]


class NotApplicable(ValueError):
    pass


class NotLensSpace(ValueError):
    pass


def _check_pair(L: LensParams, L2: LensParams) -> None:
    if L.n != L2.n:
        raise DimensionMismatch(f"{L} and {L2} have different dimensions")
    if L.q != L2.q:
        raise OrderMismatch(f"{L} and {L2} have different q")


# keys ---------------------------------------------------------------------------


def _int64_safe(P: PhiProfile) -> bool:
    n, q = P.n, P.q
    amax = max(sum(abs(c) for c in a_poly(n, i, l).coeffs)
               for i in range(1, n + 1) for l in range(n + 1))
    bound = (2 * q - 1) ** n * 3**n * 2**n * (n + 1) * max(amax, 1)
    return bound < 2**62


def string_keys(P: PhiProfile) -> tuple:
    """Hashable exact keys of F^0, ..., F^(n-1) for fixed (q, n).

    Key i equals key i of another profile with the same (q, n) iff the two
    F^i coincide. int64 numpy convolution is used when the coefficient bound
    allows it, Python integers otherwise.
    """
    n = P.n
    nums = theta_numerators(P)
    if _int64_safe(P):
        arrs = [np.array(x.coeffs or (0,), dtype=np.int64) for x in nums]
        keys = []
        for idx in range(1, n + 1):
            acc = np.zeros(1, dtype=np.int64)
            for l in range(n + 1):
                a = a_poly(n, idx, l)
                if not a or not nums[l]:
                    continue
                term = np.convolve(np.array(a.coeffs, dtype=np.int64), arrs[l])
                if term.size > acc.size:
                    term[: acc.size] += acc
                    acc = term
                else:
                    acc[: term.size] += term
            nz = np.flatnonzero(acc)
            acc = acc[: nz[-1] + 1] if nz.size else acc[:0]
            keys.append(acc.tobytes())
        return tuple(keys)
    from lenspec.spectra import string_numerator

    return tuple(string_numerator(P, idx, nums).coeffs for idx in range(1, n + 1))


def iset_from_keys(k1: Sequence, k2: Sequence) -> frozenset[int]:
    n = len(k1)
    eq = [True] + [a == b for a, b in zip(k1, k2)]  # eq[p + 1] <-> F^p equal
    return frozenset(p for p in range(n) if eq[p] and eq[p + 1])


# pairwise decisions -------------------------------------------------------------


def p_isospectral(L: LensParams, L2: LensParams, p: int,
                  profile: ProfileSource = phi_profile) -> bool:
    _check_pair(L, L2)
    if not 0 <= p <= L.n - 1:
        raise ValueError(f"p must lie in 0..{L.n - 1}")
    P, P2 = profile(L), profile(L2)
    return all(rat_equal(genfun_from_profile(P, i), genfun_from_profile(P2, i))
               for i in (p - 1, p))


@dataclass(frozen=True)
class IsospecSet:
    pair: tuple[CanonicalLens, CanonicalLens]
    iset: frozenset[int]


def isospec_set(L: LensParams, L2: LensParams, profile: ProfileSource = phi_profile) -> IsospecSet:
    _check_pair(L, L2)
    P, P2 = profile(L), profile(L2)
    eq = [True] + [rat_equal(genfun_from_profile(P, i), genfun_from_profile(P2, i))
                   for i in range(L.n)]
    iset = frozenset(p for p in range(L.n) if eq[p] and eq[p + 1])
    out = IsospecSet((canonical_form(L), canonical_form(L2)), iset)
    if hole_violations(iset, L.n):
        raise AssertionError(f"hole-free closure fails for {L}, {L2}: {sorted(iset)}")
    return out


def theta_moment_prefix(L: LensParams, L2: LensParams, profile: ProfileSource = phi_profile) -> int:
    """Largest p0 with sum_l l^h theta^(l) equal for every h <= p0 (-1 if none).

    Independent route to "p-isospectral for all 0 <= p <= p0"; compare with
    :func:`isospec_set`.
    """
    _check_pair(L, L2)
    a, b = theta_numerators(profile(L)), theta_numerators(profile(L2))
    p0 = -1
    for h in range(L.n):
        sa = sum((x * (l**h) for l, x in enumerate(a)), IntPoly())
        sb = sum((x * (l**h) for l, x in enumerate(b)), IntPoly())
        if sa != sb:
            break
        p0 = h
    return p0


def all_theta_equal(L: LensParams, L2: LensParams, profile: ProfileSource = phi_profile) -> bool:
    _check_pair(L, L2)
    return theta_numerators(profile(L)) == theta_numerators(profile(L2))


def zero_isospectral(L: LensParams, L2: LensParams, profile: ProfileSource = phi_profile) -> bool:
    """0-isospectrality through equality of the normalised F^0."""
    _check_pair(L, L2)
    return rat_equal(ftilde0(L, profile(L)), ftilde0(L2, profile(L2)))


# families -----------------------------------------------------------------------


@dataclass(frozen=True)
class Family:
    members: tuple[CanonicalLens, ...]
    iset: tuple[int, ...]

    def to_json(self) -> dict:
        return {"members": [str(m) for m in self.members], "I": list(self.iset)}


@dataclass
class FamilyReport:
    q: int
    n: int
    families: list[Family]
    n_classes: int = 0
    spaces_only: bool = False
    pair_isets: dict = field(default_factory=dict)  # (L, L2) -> frozenset
    whole_iset: tuple[int, ...] | None = None

    def to_json(self) -> dict:
        return {"q": self.q, "n": self.n, "families": [f.to_json() for f in self.families]}


def _exact_iset(members: Sequence, keys: dict, n: int) -> frozenset[int]:
    first = keys[members[0]]
    eq = [True] + [all(keys[m][i] == first[i] for m in members[1:]) for i in range(n)]
    return frozenset(p for p in range(n) if eq[p] and eq[p + 1])


def families_from_keys(classes: Sequence[CanonicalLens], keys: dict, n: int) -> list[Family]:
    """Maximal I-isospectral families for every nonempty I.

    For fixed I, "p-isospectral for all p in I" is an equivalence relation,
    so its classes of size >= 2 are exactly the membership-maximal families
    whose I contains the given one. Each is labelled with its exact I.
    """
    found: dict[tuple, Family] = {}
    for r in range(1, n + 1):
        for I in itertools.combinations(range(n), r):
            idxs = sorted({i for p in I for i in (p - 1, p) if i >= 0})
            groups: dict[tuple, list] = {}
            for c in classes:
                groups.setdefault(tuple(keys[c][i] for i in idxs), []).append(c)
            for members in groups.values():
                if len(members) < 2:
                    continue
                members = tuple(sorted(members))
                if members in found:
                    continue
                exact = tuple(sorted(_exact_iset(members, keys, n)))
                found[members] = Family(members, exact)
    return sorted(found.values(), key=lambda f: (f.members, f.iset))


def classify_families(q: int, n: int, spaces_only: bool = False,
                      members: Iterable[LensParams] | None = None,
                      profile: ProfileSource = phi_profile,
                      profiles: dict | None = None) -> FamilyReport:
    if members is None:
        classes = enumerate_classes(q, n, spaces_only)
    else:
        classes = sorted({canonical_form(L) for L in members})
        for c in classes:
            if c.q != q or c.n != n:
                raise DimensionMismatch(f"{c} does not match q={q}, n={n}")
    keys = {}
    for c in classes:
        P = profiles[c] if profiles is not None and c in profiles else profile(c)
        keys[c] = string_keys(P)
    fams = families_from_keys(classes, keys, n)
    pair_isets = {}
    for f in fams:
        for a, b in itertools.combinations(f.members, 2):
            if (a, b) not in pair_isets:
                pair_isets[(a, b)] = iset_from_keys(keys[a], keys[b])
    whole = tuple(sorted(_exact_iset(classes, keys, n))) if len(classes) >= 2 else None
    return FamilyReport(q, n, fams, len(classes), spaces_only, pair_isets, whole)


def realised_isets(report: FamilyReport) -> set[tuple[int, ...]]:
    out = {f.iset for f in report.families}
    if report.whole_iset == ():
        out.add(())
    return out


# obstructions and table layout ---------------------------------------------------


def hole_violations(iset: Iterable[int], n: int) -> list[int]:
    """Degrees p missing from iset although p-1 and p+1 are present.

    p = -1 counts as always present (F^(-1) = 0), so {1} without 0 is a hole.
    """
    s = set(iset) | {-1}
    return [p for p in range(n) if p not in s and (p - 1) in s and (p + 1) in s]


def obstruction_tag(I: tuple[int, ...], n: int, spaces: bool) -> str:
    if hole_violations(I, n):
        return "hole"
    if spaces and I == tuple(range(n - 1)):
        return "n-1 elements (proved)"
    if spaces and len(I) == n - 2 and I != tuple(range(n - 2)):
        return "n-2 elements (proved)"
    return "not found"


def summary_rows(n: int, spaces: set | None, orbifolds: set | None) -> list[tuple[str, str, str]]:
    rows = []
    for r in range(n + 1):
        for I in itertools.combinations(range(n), r):
            label = "{" + ",".join(map(str, I)) + "}"
            cells = []
            for found, is_space in ((spaces, True), (orbifolds, False)):
                if found is None:
                    cells.append("n/a")
                elif I in found:
                    cells.append("exists")
                else:
                    cells.append(obstruction_tag(I, n, is_space))
            rows.append((label, cells[0], cells[1]))
    return rows


# verifiers ----------------------------------------------------------------------


@dataclass
class VerificationResult:
    name: str
    ok: bool
    violations: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    checked: int = 0

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"[{status}] {self.name}: {self.checked} checked, {len(self.violations)} violations"


def verify_hole(report: FamilyReport) -> VerificationResult:
    res = VerificationResult("hole", True)
    for (a, b), iset in sorted(report.pair_isets.items()):
        res.checked += 1
        bad = hole_violations(iset, report.n)
        if bad:
            res.ok = False
            res.violations.append(f"{a} / {b}: I={sorted(iset)} missing {bad}")
    for f in report.families:
        res.checked += 1
        bad = hole_violations(f.iset, report.n)
        if bad:
            res.ok = False
            res.violations.append(f"family {[str(m) for m in f.members]}: I={list(f.iset)} missing {bad}")
    return res


def divisors(q: int) -> list[int]:
    return [d for d in range(1, q + 1) if q % d == 0]


def _cover_pair_equal(L: LensParams, L2: LensParams, q1: int, profile: ProfileSource) -> bool:
    c, c2 = cover(L, q1), cover(L2, q1)
    return rat_equal(ftilde0(c, profile(c)), ftilde0(c2, profile(c2)))


def verify_covering(pairs: Iterable[tuple[LensParams, LensParams]],
                    profile: ProfileSource = phi_profile) -> VerificationResult:
    """Covers of 0-isospectral lens spaces of equal degree stay 0-isospectral."""
    res = VerificationResult("covering", True)
    for L, L2 in pairs:
        if not (L.is_manifold() and L2.is_manifold()):
            raise NotLensSpace(f"{L} / {L2} is not a pair of lens spaces")
        if not zero_isospectral(L, L2, profile):
            raise ValueError(f"{L} / {L2} is not 0-isospectral")
        for q1 in divisors(L.q):
            res.checked += 1
            if not _cover_pair_equal(L, L2, q1, profile):
                res.ok = False
                res.violations.append(f"{L} / {L2}: covers of order {q1} differ")
    return res


def scan_covering_orbifolds(pairs: Iterable[tuple[LensParams, LensParams]],
                            profile: ProfileSource = phi_profile) -> VerificationResult:
    """Same descent check for orbifold pairs; findings are notes, never failures."""
    res = VerificationResult("covering (orbifolds, report only)", True)
    for L, L2 in pairs:
        for q1 in divisors(L.q):
            res.checked += 1
            if not _cover_pair_equal(L, L2, q1, profile):
                res.notes.append(f"{L} / {L2}: covers of order {q1} are not 0-isospectral")
        if isotropy_profile(L) != isotropy_profile(L2):
            res.notes.append(f"{L} / {L2}: isotropy profiles differ")
    return res


def verify_padding(L: LensParams, L2: LensParams, m: int,
                   profile: ProfileSource = phi_profile) -> VerificationResult:
    """0-isospectrality is unchanged by appending m zero parameters.

    Also records, as notes, how the full isospectral set changes; degrees
    p > 0 are not expected to survive padding.
    """
    res = VerificationResult(f"padding m={m}", True)
    M, M2 = L.padded([0] * m), L2.padded([0] * m)
    before = zero_isospectral(L, L2, profile)
    after = zero_isospectral(M, M2, profile)
    res.checked = 1
    if before != after:
        res.ok = False
        res.violations.append(f"{L} / {L2}: 0-isospectral {before} but padded {after}")
    ib = sorted(isospec_set(L, L2, profile).iset)
    ia = sorted(isospec_set(M, M2, profile).iset)
    res.notes.append(f"{L} / {L2}: I={ib}; padded {M} / {M2}: I={ia}")
    return res


def verify_isometry_invariance(classes_or_pairs: Iterable[tuple[LensParams, LensParams]],
                               profile: ProfileSource = phi_profile) -> VerificationResult:
    res = VerificationResult("isometry invariance", True)
    for L, L2 in classes_or_pairs:
        res.checked += 1
        if is_isometric(L, L2) and isospec_set(L, L2, profile).iset != frozenset(range(L.n)):
            res.ok = False
            res.violations.append(f"{L} / {L2} isometric but not isospectral for all p")
    return res


# A-matrix -----------------------------------------------------------------------


def bareiss_det(matrix: Sequence[Sequence[IntPoly]]) -> IntPoly:
    """Determinant of a square matrix over Z[z] by fraction-free elimination."""
    M = [list(row) for row in matrix]
    size = len(M)
    if size == 0:
        return IntPoly([1])
    sign = 1
    prev = IntPoly([1])
    for k in range(size - 1):
        if not M[k][k]:
            for i in range(k + 1, size):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return IntPoly()
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]).divexact(prev)
            M[i][k] = IntPoly()
        prev = M[k][k]
    return M[size - 1][size - 1] * sign


def a_matrix(n: int) -> list[list[IntPoly]]:
    """Rows p = 1..n, columns l = 0..n-2 of the coefficient table."""
    T = a_poly_table(n)
    return [[T[p, l] for l in range(n - 1)] for p in range(1, n + 1)]


def a_matrix_minors(n: int) -> list[tuple[int, IntPoly]]:
    """Determinants after deleting each row (reported by its p)."""
    A = a_matrix(n)
    out = []
    for p in range(1, n + 1):
        sub = [row for i, row in enumerate(A, 1) if i != p]
        out.append((p, bareiss_det(sub)))
    return out


def eliminate(rows: Sequence[Sequence[IntPoly]], col: int) -> list[list[IntPoly]]:
    """Cross-multiply rows against the first one to kill column ``col``."""
    pivot = rows[0]
    out = []
    for row in rows[1:]:
        out.append([row[j] * pivot[col] - pivot[j] * row[col] for j in range(len(row))])
    return out


def two_isospectral_system(n: int = 3) -> dict:
    """The linear system behind {F^1, F^2} equality for n = 3, and its reductions.

    Unknowns are the differences theta^(0), theta^(1), theta^(2) (theta^(3)
    always cancels). Returns the two rows, the row with theta^(0) eliminated,
    and the row with theta^(2) eliminated, each divided by the gcd of its entries.
    """
    rows = [[a_poly(n, idx, l) for l in range(n)] for idx in (2, 3)]
    no0 = eliminate(rows, 0)[0]
    no2 = eliminate(rows, 2)[0]

    def normalise(row):
        g = IntPoly()
        for x in row:
            if x:
                g = poly_gcd(g, x) if g else x
        g = g.primitive() if g else IntPoly([1])
        out = [x.divexact(g) if x else x for x in row]
        c = math.gcd(*(x.content() for x in out))
        out = [IntPoly(v // c for v in x.coeffs) for x in out]
        lead = next(x.lead for x in reversed(out) if x)
        return [-x if lead < 0 else x for x in out]

    return {"rows": rows, "no_theta0": normalise(no0),
            "no_theta2": normalise(no2)}


# Ikeda filtration -----------------------------------------------------------------


def _is_prime(q: int) -> bool:
    return q >= 2 and all(q % d for d in range(2, math.isqrt(q) + 1))


def ikeda_filtration_level(L: LensParams) -> int:
    """Largest p0 with a1*sb1 + a2*sb2 != 0 mod q for 1 <= |a1|+|a2| <= p0 + 2.

    Needs q an odd prime with q - 1 = 2n + 4 and the +-s_j pairwise distinct;
    sb1 < sb2 are the two smallest positive residues not hit by +-s.
    """
    q, n = L.q, L.n
    if not (_is_prime(q) and q > 2 and q - 1 == 2 * n + 4):
        raise NotApplicable(f"{L}: need q prime with q - 1 = 2n + 4")
    hit = set()
    for x in L.s:
        r = x % q
        if r == 0 or r in hit or (q - r) in hit:
            raise NotApplicable(f"{L} is not in the base class (parameters repeat up to sign)")
        hit.update({r, q - r})
    rest = [x for x in range(1, q // 2 + 1) if x not in hit]
    sb1, sb2 = rest[:2]
    m = 1
    while True:
        for a1 in range(-m, m + 1):
            r = m - abs(a1)
            for a2 in {r, -r}:
                if (a1 * sb1 + a2 * sb2) % q == 0:
                    return m - 3
        m += 1


def base_class_members(q: int, n: int) -> list[CanonicalLens]:
    """Lens-space classes whose parameters are pairwise distinct up to sign."""
    return [c for c in enumerate_classes(q, n, spaces_only=True) if len(set(c.s)) == n]


def verify_ikeda_filtration(q: int, profile: ProfileSource = phi_profile) -> VerificationResult:
    """Levels bound shared degrees, and distinct levels separate at the next one."""
    n = (q - 5) // 2
    res = VerificationResult(f"filtration q={q}", True)
    members = base_class_members(q, n)
    levels = {c: ikeda_filtration_level(c) for c in members}
    for a, b in itertools.combinations(members, 2):
        res.checked += 1
        iset = isospec_set(a, b, profile).iset
        p0 = min(levels[a], levels[b], n - 1)
        if not set(range(p0 + 1)) <= iset:
            res.ok = False
            res.violations.append(f"{a} / {b}: levels {levels[a]}, {levels[b]} but I={sorted(iset)}")
        if levels[a] != levels[b] and p0 + 1 <= n - 1 and (p0 + 1) in iset:
            res.ok = False
            res.violations.append(f"{a} / {b}: levels differ but {p0 + 1}-isospectral")
    res.notes.extend(f"{c}: level {levels[c]}" for c in members)
    return res


# pattern and obstruction scans ------------------------------------------------------


def conj_two_isospectral_pair(t: int) -> tuple[CanonicalLens, CanonicalLens]:
    q = 8 * t
    return (canonical_form(LensParams(q, [4, t, 3 * t])),
            canonical_form(LensParams(q, [8, t, 3 * t])))


@dataclass
class ConjectureReport:
    confirmations: list[str] = field(default_factory=list)
    counterexamples: list[str] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.counterexamples


def _family_str(f: Family) -> str:
    return "{" + ", ".join(map(str, f.members)) + "} I=" + str(list(f.iset))


def scan_conjectures(reports: Sequence[FamilyReport]) -> ConjectureReport:
    """Report (never assert) three conjectured patterns over orbifold reports.

    (a) n = 3: {2}-families are exactly the pairs L(8t;4,t,3t), L(8t;8,t,3t), t odd.
    (b) n = 4: {2}- resp. {3}-families have 3 | q resp. 5 | q.
    (c) any n: no family with nonempty I mixes a lens space and a singular orbifold.
    """
    out = ConjectureReport()
    for rep in reports:
        q, n = rep.q, rep.n
        if n == 3 and not rep.spaces_only:
            twos = [f for f in rep.families if f.iset == (2,)]
            expected = None
            if q % 8 == 0 and (q // 8) % 2 == 1:
                expected = tuple(sorted(conj_two_isospectral_pair(q // 8)))
            got = [f.members for f in twos]
            if expected is None:
                for f in twos:
                    out.counterexamples.append(f"(a) q={q}: unexpected {_family_str(f)}")
            elif got == [expected]:
                out.confirmations.append(f"(a) q={q}: {{{expected[0]}, {expected[1]}}} is the only {{2}}-family")
            else:
                out.counterexamples.append(f"(a) q={q}: expected only {list(map(str, expected))}, found "
                                           + "; ".join(_family_str(f) for f in twos))
        if n == 4:
            for f in rep.families:
                if f.iset == (2,):
                    (out.confirmations if q % 3 == 0 else out.counterexamples).append(
                        f"(b) q={q}: {_family_str(f)}")
                if f.iset == (3,):
                    (out.confirmations if q % 5 == 0 else out.counterexamples).append(
                        f"(b) q={q}: {_family_str(f)}")
        mixed = 0
        for f in rep.families:
            kinds = {m.is_manifold() for m in f.members}
            if f.iset and len(kinds) == 2:
                mixed += 1
                out.counterexamples.append(f"(c) q={q} n={n}: mixed {_family_str(f)}")
        if not mixed and not rep.spaces_only:
            out.confirmations.append(f"(c) q={q} n={n}: no mixed family")
    return out


def verify_first_n_minus_1(reports: Sequence[FamilyReport]) -> VerificationResult:
    """No lens-space family is exactly {0, ..., n-2}-isospectral."""
    res = VerificationResult("no first-(n-1) lens-space family", True)
    for rep in reports:
        target = tuple(range(rep.n - 1))
        for f in rep.families:
            if not all(m.is_manifold() for m in f.members):
                continue
            res.checked += 1
            if f.iset == target:
                res.ok = False
                res.violations.append(f"q={rep.q}: {_family_str(f)}")
    return res


def verify_n_minus_2(reports: Sequence[FamilyReport]) -> VerificationResult:
    """No lens-space family realises |I| = n-2 with I != {0, ..., n-3}."""
    res = VerificationResult("no off-prefix (n-2)-element lens-space family", True)
    for rep in reports:
        allowed = tuple(range(rep.n - 2))
        for f in rep.families:
            if not all(m.is_manifold() for m in f.members):
                continue
            res.checked += 1
            if len(f.iset) == rep.n - 2 and f.iset != allowed:
                res.ok = False
                res.violations.append(f"q={rep.q}: {_family_str(f)}")
    return res


def verify_orbifold_manifold_zero(reports: Sequence[FamilyReport]) -> VerificationResult:
    """A lens space is never 0-isospectral to a singular orbifold."""
    res = VerificationResult("orbifold/manifold p=0", True)
    for rep in reports:
        for f in rep.families:
            if 0 not in f.iset:
                continue
            res.checked += 1
            if len({m.is_manifold() for m in f.members}) == 2:
                res.ok = False
                res.violations.append(f"q={rep.q}: {_family_str(f)}")
    return res
