"""Command-line frontend: enumerate, compare, classify, verify, oracle.

Exit codes: 0 success, 1 a verification found violations, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from lenspec import isospec
from lenspec.exactmath import series_expand
from lenspec.lattice import SCHEMA, PhiProfile, phi_profile
from lenspec.lens import (
    DimensionMismatch,
    InvalidLens,
    LensParams,
    NotADivisor,
    OrderMismatch,
    canonical_form,
    enumerate_classes,
    is_isometric,
)
from lenspec.spectra import genfun_from_profile, hodge_genfun_ikeda_all, multiplicities

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2


class InputError(Exception):
    pass


# cache ----------------------------------------------------------------------------


def cache_key(L: LensParams) -> str:
    c = canonical_form(L)
    return f"q{c.q}_s{'-'.join(map(str, c.s))}"


class ProfileCache:
    """PhiProfile memo on disk, one JSON record per canonical class.

    Records are written to a temporary file and renamed into place, so a
    concurrent reader sees either nothing or a complete record.
    """

    def __init__(self, root: str | os.PathLike | None):
        self.root = Path(root) if root else None
        if self.root is not None:
            self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def load(self, L: LensParams) -> PhiProfile | None:
        if self.root is None:
            return None
        path = self._path(cache_key(L))
        try:
            rec = json.loads(path.read_text())
        except (FileNotFoundError, json.JSONDecodeError):
            return None
        if rec.get("schema") != SCHEMA or rec.get("key") != cache_key(L):
            return None
        return PhiProfile.from_json(rec["value"])

    def store(self, L: LensParams, P: PhiProfile) -> None:
        if self.root is None:
            return
        key = cache_key(L)
        rec = {"key": key, "schema": SCHEMA, "value": P.to_json()}
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=f".{key}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(rec, fh, sort_keys=True)
            os.replace(tmp, self._path(key))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def get(self, L: LensParams) -> PhiProfile:
        P = self.load(L)
        if P is None:
            P = phi_profile(canonical_form(L))
            self.store(L, P)
        return P


def _worker_profile(args):
    root, q, s = args
    return ProfileCache(root).get(LensParams(q, s))


@dataclass
class RunConfig:
    qs: list[int]
    n: int | None = None
    spaces_only: bool = False
    kmax: int | None = None
    out: str | None = None
    fmt: str = "json"
    workers: int = 1
    cache_dir: str | None = None

    def cache(self) -> ProfileCache:
        return ProfileCache(self.cache_dir)


def profiles_for(classes, cfg: RunConfig) -> dict:
    cache = cfg.cache()
    if cfg.workers > 1 and len(classes) > 1:
        root = str(cache.root) if cache.root else None
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            vals = list(pool.map(_worker_profile, [(root, c.q, c.s) for c in classes], chunksize=16))
        return dict(zip(classes, vals))
    return {c: cache.get(c) for c in classes}


# argument helpers -------------------------------------------------------------------


def parse_qs(args) -> list[int]:
    if getattr(args, "q_range", None):
        try:
            a, b = args.q_range.split("..")
            lo, hi = int(a), int(b)
        except ValueError:
            raise InputError(f"bad --q-range {args.q_range!r}, expected A..B")
        if lo < 1 or hi < lo:
            raise InputError(f"bad --q-range {args.q_range!r}")
        return list(range(lo, hi + 1))
    if getattr(args, "q_max", None):
        return list(range(1, args.q_max + 1))
    if getattr(args, "q", None):
        return [args.q]
    raise InputError("one of --q, --q-range or --q-max is required")


def parse_vector(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"bad parameter vector {text!r}")


def parse_members(text: str) -> list[LensParams]:
    parts = []
    depth, cur = 0, ""
    for ch in text:
        depth += ch == "("
        depth -= ch == ")"
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        parts.append(cur)
    return [LensParams.parse(p) for p in parts]


def config_from(args) -> RunConfig:
    cache_dir = os.environ.get("LENSPEC_CACHE") or getattr(args, "cache_dir", None)
    workers = getattr(args, "workers", 1) or 1
    if workers < 1:
        raise InputError("--workers must be positive")
    return RunConfig(qs=[], n=getattr(args, "n", None), spaces_only=getattr(args, "spaces_only", False),
                     kmax=getattr(args, "kmax", None), out=getattr(args, "out", None),
                     fmt=getattr(args, "format", "json"), workers=workers, cache_dir=cache_dir)


def emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _need_n(cfg: RunConfig) -> int:
    if cfg.n is None or cfg.n < 2:
        raise InputError("--n >= 2 is required")
    return cfg.n


# commands ---------------------------------------------------------------------------


def cmd_enumerate(args) -> int:
    cfg = config_from(args)
    n = _need_n(cfg)
    rows = []
    for q in parse_qs(args):
        for c in enumerate_classes(q, n, cfg.spaces_only):
            iso = [math.gcd(q, x) for x in c.s]
            rows.append({"lens": str(c), "isotropy": iso, "manifold": c.is_manifold()})
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lens", "isotropy", "manifold"])
        for r in rows:
            w.writerow([r["lens"], "{{" + ",".join(map(str, r["isotropy"])) + "}}", r["manifold"]])
        emit(buf.getvalue(), cfg)
    else:
        emit(json.dumps({"n": n, "classes": rows}, indent=1) + "\n", cfg)
    sys.stderr.write(f"{len(rows)} classes\n")
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = config_from(args)
    qs = parse_qs(args)
    if len(qs) != 1:
        raise InputError("compare needs a single --q")
    if not args.a or not args.b:
        raise InputError("compare needs --a and --b")
    L, L2 = LensParams(qs[0], parse_vector(args.a)), LensParams(qs[0], parse_vector(args.b))
    cache = cfg.cache()
    res = isospec.isospec_set(L, L2, cache.get)
    lines = [f"{canonical_form(L)} vs {canonical_form(L2)}"]
    for p in range(L.n):
        lines.append(f"p={p} {'yes' if p in res.iset else 'no'}")
    if is_isometric(L, L2):
        lines.append("isometric")
    lines.append("I = {" + ",".join(map(str, sorted(res.iset))) + "}")
    emit("\n".join(lines) + "\n", cfg)
    return EXIT_OK


def _classify_one(q: int, n: int, cfg: RunConfig, members=None):
    if members is not None:
        classes = sorted({canonical_form(m) for m in members})
    else:
        classes = enumerate_classes(q, n, cfg.spaces_only)
    prof = profiles_for(classes, cfg)
    rep = isospec.classify_families(q, n, cfg.spaces_only, members=classes, profiles=prof)
    rep.spaces_only = cfg.spaces_only if members is None else all(c.is_manifold() for c in classes)
    spaces_rep = None
    if not cfg.spaces_only and members is None:
        spaces = [c for c in classes if c.is_manifold()]
        spaces_rep = isospec.classify_families(q, n, True, members=spaces, profiles=prof) if spaces else \
            isospec.FamilyReport(q, n, [], 0, True)
    return rep, spaces_rep


def summary_csv(n: int, reports, spaces_reports, spaces_only: bool) -> str:
    sp = set()
    orb = None if spaces_only else set()
    for rep, srep in zip(reports, spaces_reports):
        if spaces_only:
            sp |= isospec.realised_isets(rep)
        else:
            orb |= isospec.realised_isets(rep)
            sp |= isospec.realised_isets(srep)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["I", "lens spaces", "lens orbifolds"])
    for row in isospec.summary_rows(n, sp, orb):
        w.writerow(row)
    return buf.getvalue()


def run_classify(qs, n, cfg: RunConfig, members=None):
    reps, sreps = [], []
    for q in qs:
        rep, srep = _classify_one(q, n, cfg, members)
        reps.append(rep)
        sreps.append(srep)
    return reps, sreps


def cmd_classify(args) -> int:
    cfg = config_from(args)
    n = _need_n(cfg)
    qs = parse_qs(args)
    members = None
    if args.members:
        members = parse_members(args.members)
        if len(qs) != 1:
            raise InputError("--members needs a single --q")
        for m in members:
            if m.q != qs[0] or m.n != n:
                raise InputError(f"{m} does not match --q {qs[0]} --n {n}")
    reps, sreps = run_classify(qs, n, cfg, members)
    viol = [v for r in reps for v in isospec.verify_hole(r).violations]
    if cfg.fmt == "csv":
        emit(summary_csv(n, reps, sreps, cfg.spaces_only or members is not None), cfg)
    else:
        data = reps[0].to_json() if len(reps) == 1 else {"n": n, "reports": [r.to_json() for r in reps]}
        emit(json.dumps(data, indent=1) + "\n", cfg)
    nfam = sum(len(r.families) for r in reps)
    sys.stderr.write(f"{sum(r.n_classes for r in reps)} classes, {nfam} families\n")
    if viol:
        sys.stderr.write("\n".join(viol) + "\n")
        return EXIT_VERIFY
    return EXIT_OK


def _oracle_range(q_max: int, n_max: int, kmax: int | None) -> isospec.VerificationResult:
    res = isospec.VerificationResult("oracle", True)
    for n in range(2, n_max + 1):
        for q in range(1, q_max + 1):
            K = kmax if kmax is not None else 3 * q
            for c in enumerate_classes(q, n):
                P = phi_profile(c)
                ik = hodge_genfun_ikeda_all(c, K + 1)
                for p in range(n):
                    res.checked += 1
                    lat = series_expand(genfun_from_profile(P, p), K + 1)
                    if lat.truncate(K + 1) != ik[p].truncate(K + 1):
                        res.ok = False
                        res.violations.append(f"{c} p={p}")
    return res


def cmd_verify(args) -> int:
    cfg = config_from(args)
    check = args.check
    results: list[isospec.VerificationResult] = []
    notes: list[str] = []
    if check == "matrix":
        n_top = cfg.n or 9
        res = isospec.VerificationResult("matrix", True)
        for n in range(2, n_top + 1):
            for p, det in isospec.a_matrix_minors(n):
                res.checked += 1
                notes.append(f"n={n} drop p={p}: {det}")
                if not det:
                    res.ok = False
                    res.violations.append(f"n={n} minor without row {p} vanishes")
        results.append(res)
    elif check == "dim3":
        res = isospec.VerificationResult("dim3", True)
        for q in parse_qs(args):
            rep, _ = _classify_one(q, 2, cfg)
            res.checked += 1
            for f in rep.families:
                res.ok = False
                res.violations.append(isospec._family_str(f))
        results.append(res)
    elif check == "oracle":
        q_max = args.q_max or (args.q if args.q else 12)
        results.append(_oracle_range(q_max, args.n_max or cfg.n or 3, cfg.kmax))
    elif check == "padding":
        qs = parse_qs(args)
        if not args.a or not args.b:
            raise InputError("padding needs --q, --a and --b")
        L, L2 = LensParams(qs[0], parse_vector(args.a)), LensParams(qs[0], parse_vector(args.b))
        cache = cfg.cache()
        res = isospec.verify_padding(L, L2, args.pad, cache.get)
        notes.extend(res.notes)
        results.append(res)
    else:
        n = _need_n(cfg)
        if check in ("covering", "thm44", "thm47"):
            cfg.spaces_only = True
        reps, _ = run_classify(parse_qs(args), n, cfg)
        if check == "hole":
            for r in reps:
                results.append(isospec.verify_hole(r))
        elif check == "covering":
            cache = cfg.cache()
            pairs = sorted({(a, b) for r in reps for f in r.families if 0 in f.iset
                            for i, a in enumerate(f.members) for b in f.members[i + 1:]})
            results.append(isospec.verify_covering(pairs, cache.get))
        elif check == "thm44":
            results.append(isospec.verify_first_n_minus_1(reps))
        elif check == "thm47":
            results.append(isospec.verify_n_minus_2(reps))
        elif check == "conj":
            c = isospec.scan_conjectures(reps)
            res = isospec.VerificationResult("conj (report only)", True, checked=len(reps))
            notes.extend("confirmed " + x for x in c.confirmations)
            notes.extend("COUNTEREXAMPLE " + x for x in c.counterexamples)
            results.append(res)
        else:
            raise InputError(f"unknown check {check!r}")
    lines = [r.line() for r in results]
    for r in results:
        lines.extend("  " + v for v in r.violations)
    lines.extend("  " + x for x in notes)
    emit("\n".join(lines) + "\n", cfg)
    return EXIT_OK if all(r.ok for r in results) else EXIT_VERIFY


def cmd_oracle(args) -> int:
    """Series of F^p by both routes, plus eigenvalue multiplicities."""
    cfg = config_from(args)
    qs = parse_qs(args)
    if not args.a:
        raise InputError("oracle needs --q and --a")
    L = canonical_form(LensParams(qs[0], parse_vector(args.a)))
    K = cfg.kmax if cfg.kmax is not None else 3 * L.q
    P = cfg.cache().get(L)
    ik = hodge_genfun_ikeda_all(L, K + 1)
    out = {"lens": str(L), "kmax": K, "p": []}
    ok = True
    for p in range(L.n):
        lat = series_expand(genfun_from_profile(P, p), K + 1)
        agree = lat.truncate(K + 1) == ik[p].truncate(K + 1)
        ok &= agree
        out["p"].append({
            "p": p,
            "series": [str(lat[k]) for k in range(K + 1)],
            "agree": agree,
            "multiplicities": [[m.eigenvalue, m.multiplicity] for m in multiplicities(L, p, K, P)],
        })
    emit(json.dumps(out, indent=1) + "\n", cfg)
    return EXIT_OK if ok else EXIT_VERIFY


# parser -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lenspec", description="Exact p-spectra of lens orbifolds.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, need_n=True):
        p.add_argument("--q", type=int)
        p.add_argument("--q-range", dest="q_range")
        p.add_argument("--q-max", dest="q_max", type=int)
        if need_n:
            p.add_argument("--n", type=int)
        p.add_argument("--spaces-only", dest="spaces_only", action="store_true")
        p.add_argument("--kmax", type=int)
        p.add_argument("--out")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--cache-dir", dest="cache_dir")
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("enumerate", help="list isometry classes")
    common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("compare", help="per-p verdicts for two parameter vectors")
    common(p, need_n=False)
    p.add_argument("--a")
    p.add_argument("--b")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("classify", help="I-isospectral families")
    common(p)
    p.add_argument("--members")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify", help="run a named check")
    common(p)
    p.add_argument("--check", required=True,
                   choices=["hole", "covering", "padding", "matrix", "dim3", "oracle", "thm44", "thm47", "conj"])
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--pad", type=int, default=1, help="number of zero parameters appended")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="series of F^p by both routes")
    common(p, need_n=False)
    p.add_argument("--a")
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    t0 = time.perf_counter()
    try:
        code = args.func(args)
    except (InputError, InvalidLens, DimensionMismatch, OrderMismatch, NotADivisor,
            isospec.NotApplicable, isospec.NotLensSpace) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    sys.stderr.write(f"done in {time.perf_counter() - t0:.2f}s\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
