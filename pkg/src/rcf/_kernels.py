"""Hot loops: CYK tables, batched CYK row combination and the interval DP.

Each kernel exists twice, a numba ``@njit`` version and a plain numpy
version.  Setting ``RCF_NO_NUMBA=1`` (or lacking numba) selects numpy.

Binary rules ``A → B C`` arrive sorted by ``B`` as a CSR triple
``(offs, rA, rC)``: the rules with left child ``B`` are
``offs[B]:offs[B + 1]``.  Nonterminal sets are bit-packed rows in
``np.packbits`` order (bit ``C`` is ``row[C >> 3] & (128 >> (C & 7))``).
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and os.environ.get("RCF_NO_NUMBA", "") not in ("1", "true", "yes")
BACKEND = "numba" if USE_NUMBA else "numpy"

_CHUNK = 1 << 13


def csr_rules(rA, rB, rC, n_nt):
    order = np.argsort(rB, kind="stable")
    counts = np.bincount(np.asarray(rB, dtype=np.int64), minlength=n_nt) if len(rB) else np.zeros(n_nt, np.int64)
    offs = np.zeros(n_nt + 1, dtype=np.int64)
    offs[1:] = np.cumsum(counts)
    return offs, np.asarray(rA, np.int64)[order], np.asarray(rC, np.int64)[order]


def _ranges(starts, lens):
    """Concatenation of ``arange(s, s + l)`` for each pair."""
    total = int(lens.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    base = np.repeat(starts - np.concatenate(([0], np.cumsum(lens)[:-1])), lens)
    return base + np.arange(total, dtype=np.int64)


# numpy -----------------------------------------------------------------


def cyk_table_numpy(rows, offs, rA, rC):
    """``T[l, i]`` is the nonterminal set deriving ``w[i:i+l]``."""
    n, N = rows.shape
    T = np.zeros((n + 1, max(n, 1), N), dtype=np.bool_)
    if n == 0:
        return T
    T[1, :n] = rows
    rB = np.repeat(np.arange(N, dtype=np.int64), np.diff(offs))
    H = np.zeros((len(rA), N), dtype=np.float32)
    H[np.arange(len(rA)), rA] = 1.0
    for length in range(2, n + 1):
        cnt = n - length + 1
        acc = np.zeros((cnt, N), dtype=np.bool_)
        for k in range(1, length):
            P = T[k, 0:cnt]
            S = T[length - k, k : k + cnt]
            hits = (P[:, rB] & S[:, rC]).astype(np.float32)
            acc |= (hits @ H) > 0
        T[length, :cnt] = acc
    return T


def pair_rows_numpy(pre_ptr, pre_idx, suf_packed, pre_ids, suf_ids, offs, rA, rC, n_nt):
    """Rows ``{A : A → B C, B ∈ pre, C ∈ suf}`` for each ``(pre, suf)`` pair."""
    K = len(pre_ids)
    out = np.zeros((K, n_nt), dtype=np.bool_)
    for lo in range(0, K, _CHUNK):
        hi = min(K, lo + _CHUNK)
        ids = pre_ids[lo:hi]
        lens = pre_ptr[ids + 1] - pre_ptr[ids]
        qq = np.repeat(np.arange(hi - lo, dtype=np.int64), lens)
        BB = pre_idx[_ranges(pre_ptr[ids], lens)]
        rl = offs[BB + 1] - offs[BB]
        q2 = np.repeat(qq, rl)
        r = _ranges(offs[BB], rl)
        C = rC[r]
        srow = suf_packed[suf_ids[lo:hi][q2], C >> 3]
        hit = (srow & (128 >> (C & 7))) != 0
        out[lo + q2[hit], rA[r[hit]]] = True
    return out


def interval_dp_numpy(D, m):
    """``clear[i, j]``: every vertex strictly between ``i`` and ``j`` can be removed
    and ``d(v_i, v_j) <= m``.  ``split[i, j]`` is the last vertex removed."""
    n = D.shape[0]
    clear = np.zeros((n, n), dtype=np.bool_)
    split = np.full((n, n), -1, dtype=np.int64)
    for i in range(n - 1):
        clear[i, i + 1] = D[i, i + 1] <= m
    for gap in range(2, n):
        for i in range(0, n - gap):
            j = i + gap
            if D[i, j] > m:
                continue
            ks = np.arange(i + 1, j)
            ok = clear[i, ks] & clear[ks, j]
            if ok.any():
                clear[i, j] = True
                split[i, j] = ks[np.argmax(ok)]
    return clear, split


# numba -----------------------------------------------------------------

if numba is not None:

    @numba.njit(cache=True)
    def cyk_table_numba(rows, offs, rA, rC):
        n, N = rows.shape
        T = np.zeros((n + 1, max(n, 1), N), dtype=np.bool_)
        for i in range(n):
            for a in range(N):
                T[1, i, a] = rows[i, a]
        for length in range(2, n + 1):
            for i in range(n - length + 1):
                for k in range(1, length):
                    for B in range(N):
                        if not T[k, i, B]:
                            continue
                        for r in range(offs[B], offs[B + 1]):
                            if T[length - k, i + k, rC[r]]:
                                T[length, i, rA[r]] = True
        return T

    @numba.njit(cache=True)
    def pair_rows_numba(pre_ptr, pre_idx, suf_packed, pre_ids, suf_ids, offs, rA, rC, n_nt):
        K = pre_ids.shape[0]
        out = np.zeros((K, n_nt), dtype=np.bool_)
        for q in range(K):
            c = pre_ids[q]
            d = suf_ids[q]
            for j in range(pre_ptr[c], pre_ptr[c + 1]):
                B = pre_idx[j]
                for r in range(offs[B], offs[B + 1]):
                    C = rC[r]
                    if suf_packed[d, C >> 3] & (128 >> (C & 7)):
                        out[q, rA[r]] = True
        return out

    @numba.njit(cache=True)
    def interval_dp_numba(D, m):
        n = D.shape[0]
        clear = np.zeros((n, n), dtype=np.bool_)
        split = np.full((n, n), -1, dtype=np.int64)
        for i in range(n - 1):
            clear[i, i + 1] = D[i, i + 1] <= m
        for gap in range(2, n):
            for i in range(0, n - gap):
                j = i + gap
                if D[i, j] > m:
                    continue
                for k in range(i + 1, j):
                    if clear[i, k] and clear[k, j]:
                        clear[i, j] = True
                        split[i, j] = k
                        break
        return clear, split

else:  # pragma: no cover
    cyk_table_numba = cyk_table_numpy
    pair_rows_numba = pair_rows_numpy
    interval_dp_numba = interval_dp_numpy


IMPLS = {
    "numba": {"cyk_table": cyk_table_numba, "pair_rows": pair_rows_numba, "interval_dp": interval_dp_numba},
    "numpy": {"cyk_table": cyk_table_numpy, "pair_rows": pair_rows_numpy, "interval_dp": interval_dp_numpy},
}


def _i64(x):
    return np.ascontiguousarray(x, dtype=np.int64)


def cyk_table(rows, offs, rA, rC, backend=None):
    fn = IMPLS[backend or BACKEND]["cyk_table"]
    return fn(np.ascontiguousarray(rows, dtype=np.bool_), _i64(offs), _i64(rA), _i64(rC))


def pair_rows(pre_ptr, pre_idx, suf_packed, pre_ids, suf_ids, offs, rA, rC, n_nt, backend=None):
    fn = IMPLS[backend or BACKEND]["pair_rows"]
    return fn(
        _i64(pre_ptr),
        _i64(pre_idx),
        np.ascontiguousarray(suf_packed, dtype=np.uint8),
        _i64(pre_ids),
        _i64(suf_ids),
        _i64(offs),
        _i64(rA),
        _i64(rC),
        int(n_nt),
    )


def interval_dp(D, m, backend=None):
    return IMPLS[backend or BACKEND]["interval_dp"](_i64(D), int(m))
