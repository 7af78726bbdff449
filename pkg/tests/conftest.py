import itertools

import pytest

from rcf.free import parse_word
from rcf.grammar import battery_membership


def words_upto(alphabet, n):
    for k in range(n + 1):
        yield from itertools.product(alphabet, repeat=k)


def language(rec, alphabet, n):
    """Accepted words of length ≤ n, via the batched CYK battery."""
    g = getattr(rec, "grammar", rec)
    masks = battery_membership(g, tuple(alphabet), n)
    out = set()
    for k, mask in enumerate(masks):
        for w, m in zip(itertools.product(alphabet, repeat=k), mask):
            if m:
                out.add(w)
    return out


@pytest.fixture
def W():
    return parse_word
