"""Derive the extension tables of Z/3 * Z/2 over its rank-2 free kernel.

The group is realised faithfully as PSL(2, Z) with x = [[0,-1],[1,1]] (order 3)
and y = [[0,-1],[1,0]] (order 2).  The kernel of the map onto Z/3 x Z/2 is free
on a = x y x^2 y and b = x^2 y x y.  Every table entry is found by searching
reduced words in a, b for a matrix match up to sign.

Usage: python3 tools/derive_z3z2.py > src/rcf/data/z3z2.json
"""

import itertools
import json

import numpy as np

X = np.array([[0, -1], [1, 1]], dtype=np.int64)
Y = np.array([[0, -1], [1, 0]], dtype=np.int64)
I = np.eye(2, dtype=np.int64)


def mat(word):
    m = I
    for c in word:
        m = m @ {"x": X, "y": Y}[c]
    return m


def key(m):
    """Matrix up to sign: make the first nonzero entry positive."""
    flat = m.ravel()
    lead = flat[np.flatnonzero(flat)[0]]
    return tuple(flat if lead > 0 else -flat)


A = mat("xyxxy")
B = mat("xxyxy")
GEN = {"a": A, "b": B, "a^-1": np.round(np.linalg.inv(A)).astype(np.int64), "b^-1": np.round(np.linalg.inv(B)).astype(np.int64)}
INV = {"a": "a^-1", "a^-1": "a", "b": "b^-1", "b^-1": "b"}

table = {}
frontier = [((), I)]
table[key(I)] = ()
for _ in range(8):
    nxt = []
    for w, m in frontier:
        for g, gm in GEN.items():
            if w and w[-1] == INV[g]:
                continue
            m2 = m @ gm
            k = key(m2)
            if k not in table:
                table[k] = w + (g,)
            nxt.append((w + (g,), m2))
    frontier = nxt


def kernel_word(m):
    return " ".join(table[key(m)]) or "ε"


T = {"1": "", "x": "x", "X": "xx", "y": "y", "xy": "xy", "Xy": "xxy"}
TM = {t: mat(w) for t, w in T.items()}
inv = {t: np.round(np.linalg.inv(m)).astype(np.int64) for t, m in TM.items()}


def coset(m):
    for t, tm in TM.items():
        k = key(m @ inv[t])
        if k in table:
            return t, table[k]
    raise RuntimeError("no coset")


action, action_inv, factor = {}, {}, {}
for t, tm in TM.items():
    action[t] = {g: kernel_word(tm @ GEN[g] @ inv[t]) for g in ("a", "b")}
    action_inv[t] = {g: kernel_word(inv[t] @ GEN[g] @ tm) for g in ("a", "b")}
    factor[t] = {}
    for s, sm in TM.items():
        mt, f = coset(tm @ sm)
        factor[t][s] = [" ".join(f) or "ε", mt]

print(json.dumps({
    "format": "rcf.vf/1",
    "name": "Z3*Z2",
    "kernel": ["a", "b"],
    "transversal": list(T),
    "identity": "1",
    "action": action,
    "action_inverse": action_inv,
    "factor_set": factor,
    "spelling": {"a": "x y X y", "b": "X y x y"},
}, indent=1, ensure_ascii=False))
