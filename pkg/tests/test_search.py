"""Exhaustive-search oracle: exact values, witnesses, budgets, cache."""

import dataclasses
import json
import math

import pytest

from golden_data import GOLDEN_SIZES
from magset.residues import Instance, divisor_class
from magset.search import (
    Budget,
    SearchCache,
    conflict_graph,
    default_cache_path,
    exact_max,
    exact_max_in_subset,
    is_admissible,
    syndrome_set,
)
from magset.verifier import is_b1_set


def test_syndrome_set_and_admissibility():
    assert syndrome_set(5, 40) == {5, 10, 15, 20}
    assert is_admissible(1, 40)
    assert not is_admissible(10, 40)  # 4*10 = 0 mod 40
    assert not is_admissible(0, 40)


def test_conflict_graph_shape():
    graph = conflict_graph(20, 4)
    assert all(is_admissible(v, 20) for v in graph.vertices)
    for x in graph.vertices:
        for y in graph.neighbors[x]:
            assert syndrome_set(x, 20) & syndrome_set(y, 20)
            assert x in graph.neighbors[y]


@pytest.mark.parametrize("q,size", [(2, 0), (5, 1), (20, 4), (40, 6), (44, 10)])
def test_exact_max_known_values(q, size):
    result = exact_max(q)
    assert result.exact
    assert result.max_size == size
    assert len(result.witness) == size
    assert is_b1_set(result.witness, q).valid


def test_exact_max_golden_sizes():
    for q in (20, 40, 44):
        assert exact_max(q).max_size == GOLDEN_SIZES[q]


def test_witness_is_lexicographically_minimal_and_deterministic():
    first = exact_max(44)
    second = exact_max(44)
    assert dataclasses.replace(first, elapsed=0.0) == \
        dataclasses.replace(second, elapsed=0.0)
    assert list(first.witness) == sorted(first.witness)
    # No valid 10-element set at q=44 starts lexicographically earlier:
    # the witness must contain 1 (unit-scaling puts some optimum through 1).
    assert first.witness[0] == 1


def test_unit_split_agrees_with_unreduced():
    for q in range(2, 61):
        reduced = exact_max(q, unit_split=True)
        plain = exact_max(q, unit_split=False)
        assert reduced.max_size == plain.max_size, q
        assert reduced.witness == plain.witness, q


def test_subset_search_divisor_classes():
    inst = Instance.from_q(190)
    for d, expected in ((19, 9), (5, 2)):
        result = exact_max_in_subset(190, 4, divisor_class(inst, d))
        assert result.exact and result.max_size == expected
        assert is_b1_set(result.witness, 190).valid
        assert all(inst.r // math.gcd(x, inst.r) == d for x in result.witness)


def test_budget_cuts_off_with_lower_bound():
    result = exact_max(106, budget=Budget(max_nodes=5, max_seconds=math.inf))
    assert not result.exact
    assert result.nodes_expanded <= 5
    assert 1 <= result.max_size < 26
    assert is_b1_set(result.witness, 106).valid


def test_budget_is_hashable_value_object():
    assert hash(Budget(10, 1.0)) == hash(Budget(10, 1.0))
    with pytest.raises(dataclasses.FrozenInstanceError):
        Budget(10, 1.0).max_nodes = 3


def test_cache_roundtrip(tmp_path):
    path = tmp_path / "cache.jsonl"
    cache = SearchCache(str(path))
    result = exact_max(44, cache=cache)
    assert result.exact
    assert path.exists()
    fresh = SearchCache(str(path))
    hit = fresh.get(44, 4)
    assert hit is not None
    assert hit.max_size == result.max_size
    assert hit.witness == result.witness
    # A cached call returns the stored record without re-searching.
    again = exact_max(44, cache=fresh)
    assert again.witness == result.witness


def test_cache_skips_inexact_and_foreign_lines(tmp_path):
    path = tmp_path / "cache.jsonl"
    bounded = exact_max(106, budget=Budget(max_nodes=5, max_seconds=math.inf),
                        cache=SearchCache(str(path)))
    assert not bounded.exact
    assert not path.exists()  # only exact results are persisted
    path.write_text('not json\n{"q": 1}\n'
                    + json.dumps(exact_max(20).to_record()) + "\n")
    cache = SearchCache(str(path))
    assert cache.get(20, 4).max_size == 4
    assert cache.get(1, 4) is None


def test_default_cache_path_env_override(monkeypatch):
    monkeypatch.delenv("MAGSET_CACHE", raising=False)
    assert default_cache_path().endswith("magset-cache.jsonl")
    monkeypatch.setenv("MAGSET_CACHE", "/elsewhere/c.jsonl")
    assert default_cache_path() == "/elsewhere/c.jsonl"
