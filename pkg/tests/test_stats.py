import pytest

from permqubo.encodings import derangement, perm_encoding, perm_matrix_encoding
from permqubo.stats import degree_fit, stats_report


@pytest.mark.parametrize("n", [2, 3, 8, 16])
def test_matrix_counts(n):
    s = stats_report(perm_matrix_encoding(n))
    assert s.variables == n * n
    assert s.max_degree == 2 * (n - 1)
    assert all(v == 0 for v in s.deltas.values())


@pytest.mark.parametrize("kind", ["batcher", "oet", "bitonic"])
def test_perm_accounting(kind):
    s = stats_report(perm_encoding(8, kind))
    assert s.deltas == {"variables": 0, "auxiliary": 0}
    assert s.inputs == 32


def test_constrained_encodings_have_no_closed_form():
    s = stats_report(derangement(perm_encoding(4)))
    assert s.expected == {}


def test_degree_grows_with_k_not_n():
    a, b = degree_fit()
    for n in (8, 16, 32):
        e = perm_encoding(n)
        assert stats_report(e).max_degree <= a * e.k + b
    assert stats_report(perm_encoding(32)).max_degree < 2 * (32 - 1)
