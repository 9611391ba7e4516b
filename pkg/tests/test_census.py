import math

import networkx as nx
import pytest

from treecount.census import (
    AlphaEntry,
    Unknown,
    alpha,
    alpha_table,
    conjecture_evidence,
    construction_upper_bound,
    enumerate_T,
    euler_bound_holds,
    growth_witness,
    smallest_letter_bound,
    tree_spectrum,
    wedge_witness,
)
from treecount.cfrac import alternating_vector, iter_compositions
from treecount.errors import DomainError, OutOfRange
from treecount.treegraph import Multigraph, build_trimmed, tau

T5 = (1, 3, 4, 5, 8, 9, 11, 12, 16, 20, 21, 24, 40, 45, 75)


@pytest.mark.parametrize(
    "n, values",
    [
        (1, (1,)),
        (2, (1,)),
        (3, (1, 3)),
        (4, (1, 3, 4, 8, 16)),
        (5, T5),
    ],
)
def test_small_censuses(n, values):
    assert enumerate_T(n).values == values


def test_census_payload_uses_decimal_strings():
    payload = enumerate_T(4).to_payload()
    assert payload["values"] == ["1", "3", "4", "8", "16"]
    assert payload["planar"] is True
    assert payload["count"] == enumerate_T(4).graph_count == 6


@pytest.mark.parametrize("n", [0, 8])
def test_census_range(n):
    with pytest.raises(OutOfRange):
        enumerate_T(n)


def test_nesting():
    for n in range(1, 7):
        assert set(enumerate_T(n).values) <= set(enumerate_T(n + 1).values)


def test_cycle_value_present():
    for n in range(3, 8):
        values = enumerate_T(n).values
        assert n in values
        assert 2 not in values


def test_witnesses_are_genuine():
    result = enumerate_T(6)
    for t, g in result.witnesses.items():
        assert tau(g) == t
        assert g.n == 6
        assert g.is_simple() and g.is_planar() and g.is_connected()
        assert euler_bound_holds(g)


@pytest.mark.parametrize("n", range(2, 8))
def test_cayley_maximum_without_planarity(n):
    assert max(enumerate_T(n, planar=False).values) == n ** (n - 2)


def test_planarity_filter_drops_k5():
    assert 125 in enumerate_T(5, planar=False).values
    assert 125 not in enumerate_T(5).values


@pytest.mark.parametrize("t, expected", [(3, 3), (5, 5), (16, 4), (4, 4), (75, 5)])
def test_alpha(t, expected):
    entry = alpha(t)
    assert isinstance(entry, AlphaEntry)
    assert entry.alpha == expected
    assert tau(entry.witness) == t
    assert entry.witness.n == expected


def test_alpha_rejects_small_t():
    with pytest.raises(DomainError):
        alpha(2)


def test_alpha_closed_by_construction_bound():
    # exhaustion stops at 3 vertices; the construction supplies 4
    entry = alpha(4, search_cap=3)
    assert isinstance(entry, AlphaEntry)
    assert entry.alpha == 4
    assert entry.upper_bound_bs is not None
    assert tau(entry.witness) == 4


def test_alpha_beyond_census_reports_only_a_bound():
    entry = alpha(10007)
    assert isinstance(entry, Unknown)
    assert entry.search_cap == 7
    assert entry.upper_bound > 8
    report = build_trimmed(entry.upper_bound_bs)
    assert report.tau == 10007
    assert report.vertex_count == entry.upper_bound
    assert "between 8" in entry.reason


@pytest.mark.parametrize("t, letter", [(3, 1), (4, 2), (5, 3), (8, 1), (21, 1)])
def test_smallest_letter_bound(t, letter):
    found, u, bs = smallest_letter_bound(t, 50)
    assert found == letter
    assert max(bs) == letter
    assert alternating_vector(bs) == (t, u)
    assert math.gcd(t, u) == 1 and u > t


def test_smallest_letter_bound_respects_the_cap():
    assert smallest_letter_bound(5, 2) == (None, None, None)
    with pytest.raises(DomainError):
        smallest_letter_bound(5, 0)


def test_conjecture_evidence():
    rows = conjecture_evidence(40)
    assert [r.t for r in rows] == list(range(3, 41))
    assert {r.t for r in rows if r.min_letter == 1} == {3, 8, 21}
    for r in rows:
        assert r.min_letter is not None
        assert alternating_vector(r.bs) == (r.t, r.u)
        assert r.construction_vertices is not None
        assert r.log_ratio == pytest.approx(r.construction_vertices / math.log(r.t))
        if r.alpha is not None:
            assert r.alpha <= r.construction_vertices


def test_conjecture_evidence_domain():
    with pytest.raises(DomainError):
        conjecture_evidence(2)


def test_parallel_census_matches_inline():
    inline = enumerate_T(6, workers=1)
    pooled = enumerate_T(6, workers=2)
    assert pooled.values == inline.values
    assert pooled.graph_count == inline.graph_count
    assert pooled.witnesses[inline.values[-1]] == inline.witnesses[inline.values[-1]]


def test_census_rejects_negative_workers():
    with pytest.raises(DomainError):
        enumerate_T(4, workers=-1)


def test_construction_upper_bound():
    bound, bs = construction_upper_bound(4)
    assert bound == 4
    assert alternating_vector(bs)[0] == 4


def test_alpha_table():
    rows = alpha_table([3, 4, 5])
    assert [r.alpha for r in rows] == [3, 4, 5]


def test_submultiplicativity_via_wedge():
    for p in (3, 4, 5):
        for q in (3, 4, 5):
            w = wedge_witness(p, q)
            ap, aq = alpha(p).alpha, alpha(q).alpha
            assert tau(w) == p * q
            assert w.n == ap + aq - 1
            joint = alpha(p * q)
            if isinstance(joint, AlphaEntry):
                assert joint.alpha <= ap + aq


def test_tree_spectrum():
    assert tree_spectrum(Multigraph.from_networkx(nx.path_graph(5))) == 0.0
    assert tree_spectrum(Multigraph.from_networkx(nx.complete_graph(4))) == pytest.approx(math.log(2))
    assert tree_spectrum(Multigraph.from_networkx(nx.cycle_graph(3))) == pytest.approx(math.log(3) / 3)
    with pytest.raises(DomainError):
        tree_spectrum(Multigraph(3, ((0, 1),)))


def test_growth_witness_single_letter_is_fibonacci():
    w = growth_witness(1, 7)
    assert w.values == (3, 8, 21, 55, 144)
    assert w.count == w.cases == 5


def test_growth_witness_counts_distinct_values():
    w = growth_witness(2, 10)
    oracle = {
        alternating_vector((1,) + tail)[0]
        for total in range(1, 9)
        for tail in iter_compositions(total, 2)
    }
    assert w.count == len(oracle)
    assert set(w.values) == oracle


@pytest.mark.slow
def test_growth_rate_monotone():
    rates = [growth_witness(3, budget).rate for budget in (10, 12, 14)]
    assert rates[-1] > 1.05
    assert rates == sorted(rates)
