"""Hot loops: the reduced-count DP over the congruence lattice.

``reduced_counts(q, s)`` returns ``T[k, l]``, the number of integer vectors a
with |a_i| < q, sum a_i s_i = 0 mod q, one-norm k and exactly l zero
coordinates. Coordinates are processed one at a time with state
(partial residue, one-norm, zeros). The last coordinate only feeds
residue 0, which makes it cheap.

Two interchangeable kernels: a numba one and a numpy one. The numpy kernel
also handles object (bigint) tables when counts could pass int64.
"""

from __future__ import annotations

import numpy as np

from lenspec._accel import HAVE_NUMBA, njit

INT64_SAFE = 2**62


def fits_int64(q: int, n: int) -> bool:
    # every table entry is bounded by the box size (2q-1)^n
    return (2 * q - 1) ** n < INT64_SAFE


@njit(cache=True)
def _reduced_counts_numba(q, s):
    n = s.shape[0]
    K = n * (q - 1)
    cur = np.zeros((q, K + 1, n + 1), dtype=np.int64)
    cur[0, 0, 0] = 1
    kmax = 0
    for j in range(n - 1):
        sj = s[j] % q
        nxt = np.zeros((q, K + 1, n + 1), dtype=np.int64)
        for r in range(q):
            for k in range(kmax + 1):
                for l in range(j + 1):
                    c = cur[r, k, l]
                    if c == 0:
                        continue
                    nxt[r, k, l + 1] += c
                    for m in range(1, q):
                        step = (m * sj) % q
                        nxt[(r + step) % q, k + m, l] += c
                        nxt[(r - step + q) % q, k + m, l] += c
        cur = nxt
        kmax += q - 1
    out = np.zeros((K + 1, n + 1), dtype=np.int64)
    sj = s[n - 1] % q
    for k in range(kmax + 1):
        for l in range(n):
            out[k, l + 1] += cur[0, k, l]
    for m in range(1, q):
        v = (m * sj) % q
        r1 = (q - v) % q
        for k in range(kmax + 1):
            for l in range(n):
                out[k + m, l] += cur[r1, k, l] + cur[v, k, l]
    return out


def _reduced_counts_numpy(q: int, s, dtype=np.int64):
    s = [int(x) for x in s]
    n = len(s)
    K = n * (q - 1)
    cur = np.zeros((q, K + 1, n + 1), dtype=dtype)
    if dtype is object:
        cur[...] = 0
    cur[0, 0, 0] = 1
    kmax = 0
    for j in range(n - 1):
        sj = s[j] % q
        nxt = np.zeros_like(cur)
        if dtype is object:
            nxt[...] = 0
        live = cur[:, : kmax + 1, :]
        nxt[:, : kmax + 1, 1:] += live[:, :, :-1]
        for m in range(1, q):
            step = (m * sj) % q
            nxt[:, m : m + kmax + 1, :] += np.roll(live, step, axis=0)
            nxt[:, m : m + kmax + 1, :] += np.roll(live, -step, axis=0)
        cur = nxt
        kmax += q - 1
    out = np.zeros((K + 1, n + 1), dtype=dtype)
    if dtype is object:
        out[...] = 0
    sj = s[-1] % q
    out[: kmax + 1, 1:] += cur[0, : kmax + 1, :-1]
    for m in range(1, q):
        v = (m * sj) % q
        r1 = (q - v) % q
        out[m : m + kmax + 1, :] += cur[r1, : kmax + 1, :] + cur[v, : kmax + 1, :]
    return out


def reduced_counts(q: int, s, backend: str | None = None) -> np.ndarray:
    """Dispatch to the numba kernel when available and int64 is safe."""
    n = len(s)
    if not fits_int64(q, n):
        return _reduced_counts_numpy(q, s, dtype=object)
    if backend is None:
        backend = "numba" if HAVE_NUMBA else "numpy"
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is disabled")
        return _reduced_counts_numba(q, np.asarray(s, dtype=np.int64))
    if backend == "numpy":
        return _reduced_counts_numpy(q, s)
    raise ValueError(f"unknown backend {backend!r}")
