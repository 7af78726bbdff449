import os
import subprocess
import sys

import numpy as np
import pytest

from rcf import _kernels
from rcf.geometry import exhaustive_triangulable, m_triangulate_dp
from rcf.grammar import battery_membership
from rcf.vfgroup import build_wp_pda, d_infinity, free_presentation

needs_numba = pytest.mark.skipif("numba" not in _kernels.IMPLS or not _kernels.USE_NUMBA, reason="numba disabled")


@needs_numba
def test_cyk_table_backends_agree():
    tab = build_wp_pda(free_presentation(2)).grammar.cnf_tables
    rng = np.random.default_rng(1)
    letters = free_presentation(2).alphabet
    for n in (1, 5, 12):
        w = tuple(rng.choice(letters, n))
        rows = tab.rows(w)
        a = _kernels.cyk_table(rows, tab.offs, tab.rA, tab.rC, backend="numpy")
        b = _kernels.cyk_table(rows, tab.offs, tab.rA, tab.rC, backend="numba")
        assert np.array_equal(a, b)


@needs_numba
def test_interval_dp_backends_agree():
    rng = np.random.default_rng(2)
    for _ in range(20):
        n = int(rng.integers(3, 14))
        pts = rng.integers(0, 6, n)
        pts = np.append(pts, pts[0])
        D = np.abs(pts[:, None] - pts[None, :])
        for m in (1, 2, 3):
            a = _kernels.interval_dp(D, m, backend="numpy")
            b = _kernels.interval_dp(D, m, backend="numba")
            assert np.array_equal(a[0], b[0])
            ca = m_triangulate_dp(D, m, backend="numpy")
            assert (ca is not None) == (m_triangulate_dp(D, m, backend="numba") is not None)
            assert (ca is not None) == exhaustive_triangulable(D, m)


@needs_numba
def test_battery_backends_agree(monkeypatch):
    g = build_wp_pda(d_infinity()).grammar
    A = d_infinity().alphabet
    fast = battery_membership(g, A, 6)
    monkeypatch.setattr(_kernels, "BACKEND", "numpy")
    slow = battery_membership(g, A, 6)
    assert all(np.array_equal(x, y) for x, y in zip(fast, slow))


def test_env_flag_selects_numpy():
    env = dict(os.environ, RCF_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "import rcf; print(rcf.BACKEND)"], env=env, capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "numpy"
