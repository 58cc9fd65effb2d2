import random

import pytest

from hardcore.errors import (CapacityError, ConsistencyError, DomainError,
                             ParseError, ResourceError)
from hardcore.gadgets import (CycleStats, GadgetSpec, Graph, append_trees,
                              build_gadget, build_hg, complete_graph,
                              count_short_cycles, cycle_graph,
                              deserialize_graph, path_graph,
                              proper_colorings_of_cycle, sample_core,
                              serialize_graph)

from oracles import enumerate_cycle_colorings


# ---------------------------------------------------------------------------
# spec
# ---------------------------------------------------------------------------

def test_spec_derivation():
    spec = GadgetSpec.from_params(3 ** 10, 0.12, 0.12, 4, seed=0)
    # log_3(3^10) = 10: floor(1.2) = 1 root exponent, depth 2*floor(0.6) = 0
    assert spec.m == 3
    assert spec.tree_depth == 0
    assert spec.m_prime == 3


def test_spec_tree_depth_nonzero():
    n = 2 ** 20
    spec = GadgetSpec.from_params(n, 0.12, 0.124, 3, seed=0)
    assert spec.tree_depth == 2  # 2 * floor(0.062 * 20)
    assert spec.m_prime == spec.m * 2 ** spec.tree_depth


def test_spec_validation():
    with pytest.raises(DomainError):
        GadgetSpec.from_params(100, 0.2, 0.1, 3, seed=0)  # theta >= 1/8
    with pytest.raises(DomainError):
        GadgetSpec.from_params(100, 0.1, 0.0, 3, seed=0)
    with pytest.raises(ConsistencyError):
        GadgetSpec(n=10, theta=0.1, psi=0.1, d=3, seed=0,
                   m=1, tree_depth=1, m_prime=2)  # odd depth
    with pytest.raises(ConsistencyError):
        GadgetSpec(n=10, theta=0.1, psi=0.1, d=3, seed=0,
                   m=1, tree_depth=2, m_prime=3)  # m' mismatch


def test_spec_roots_override():
    spec = GadgetSpec.from_params(8, 0.12, 0.12, 3, seed=0, roots=4)
    assert spec.m == 4 and spec.m_prime == 4


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def test_core_degrees_and_edge_budget():
    for d, n, seed in ((3, 40, 1), (6, 30, 2), (4, 25, 3)):
        spec = GadgetSpec.from_params(n, 0.12, 0.12, d, seed=seed)
        g = sample_core(spec)
        side = n + spec.m_prime
        # every matching edge either landed or collapsed
        assert g.num_edges() + g.collapsed_parallel == (d - 1) * side + n
        for v in range(g.n_vertices):
            if g.labels[v].startswith("W"):
                assert g.degree(v) <= d
            else:
                assert g.degree(v) <= d - 1
        assert g.two_coloring() is not None


def test_core_determinism():
    spec = GadgetSpec.from_params(20, 0.12, 0.12, 3, seed=9)
    a = serialize_graph(sample_core(spec))
    b = serialize_graph(sample_core(spec))
    assert a == b
    other = GadgetSpec.from_params(20, 0.12, 0.12, 3, seed=10)
    assert serialize_graph(sample_core(other)) != a


def test_append_trees_depth_zero_relabels():
    spec = GadgetSpec.from_params(8, 0.12, 0.12, 3, seed=4)
    g = build_gadget(spec)
    assert len(g.vertices_with_label("V+")) == spec.m
    assert len(g.vertices_with_label("V-")) == spec.m
    assert not g.vertices_with_label("U+")


def test_append_trees_structure():
    # force a depth-2 ternary-tree layer via a hand-built spec
    spec = GadgetSpec(n=50, theta=0.12, psi=0.12, d=4, seed=5,
                      m=2, tree_depth=2, m_prime=2 * 9)
    g = append_trees(sample_core(spec), spec)
    for sign in "+-":
        roots = g.vertices_with_label(f"V{sign}")
        assert len(roots) == 2
        for r in roots:
            assert g.degree(r) == spec.d - 1
        internals = g.vertices_with_label(f"T{sign}")
        assert len(internals) == 2 * 3  # level-1 vertices of two trees
        for t in internals:
            assert g.degree(t) == spec.d
    # former leaves have one extra edge on top of their d-1 matchings
    for u in g.vertices_with_label("U+") + g.vertices_with_label("U-"):
        assert g.degree(u) <= spec.d
    assert g.max_degree() <= spec.d
    assert g.two_coloring() is not None
    expected = 2 * (spec.n + spec.m_prime) + 2 * (2 * (1 + 3))
    assert g.n_vertices == expected


def test_append_trees_consistency_error():
    spec = GadgetSpec.from_params(8, 0.12, 0.12, 3, seed=4)
    g = sample_core(spec)
    bad = GadgetSpec(n=8, theta=0.12, psi=0.12, d=3, seed=4,
                     m=2, tree_depth=0, m_prime=2)
    with pytest.raises(ConsistencyError):
        append_trees(g, bad)


# ---------------------------------------------------------------------------
# outer construction
# ---------------------------------------------------------------------------

def _tiny_gadget(d=3, m=2, n=6, seed=0):
    spec = GadgetSpec.from_params(n, 0.12, 0.12, d, seed=seed, roots=m)
    return build_gadget(spec)


def test_build_hg_single_edge():
    h = path_graph(2)
    gadget = _tiny_gadget(m=2)
    hg = build_hg(h, gadget, k=2)
    assert len(hg.cross_edges()) == 4
    assert hg.max_degree() <= gadget.d
    assert hg.n_vertices == 2 * gadget.n_vertices


def test_build_hg_no_edges_is_disjoint():
    h = Graph(3, 3)
    gadget = _tiny_gadget()
    hg = build_hg(h, gadget, k=2)
    assert hg.cross_edges() == []
    assert hg.n_vertices == 3 * gadget.n_vertices


def test_build_hg_cross_edges_per_sign():
    h = complete_graph(3)
    gadget = _tiny_gadget(m=4)
    k = 2
    hg = build_hg(h, gadget, k=k)
    per_pair = {}
    for u, v in hg.cross_edges():
        key = (min(hg.gadget_index[u], hg.gadget_index[v]),
               max(hg.gadget_index[u], hg.gadget_index[v]),
               hg.labels[u][-1])
        per_pair[key] = per_pair.get(key, 0) + 1
    for x, y in h.edges():
        for sign in "+-":
            assert per_pair[(x, y, sign)] == k
    assert hg.max_degree() <= gadget.d


def test_build_hg_capacity_error():
    h = complete_graph(3)
    gadget = _tiny_gadget(m=1)
    with pytest.raises(CapacityError):
        build_hg(h, gadget, k=1)


# ---------------------------------------------------------------------------
# cycles
# ---------------------------------------------------------------------------

def test_r_formula_matches_coloring_enumeration():
    for d in (3, 4, 6):
        for i in (2, 3, 4, 5, 6):
            assert proper_colorings_of_cycle(d, i) == enumerate_cycle_colorings(d, i)
    assert proper_colorings_of_cycle(6, 2) == 30       # d(d-1)
    assert proper_colorings_of_cycle(6, 3) == 120      # d(d-1)(d-2)
    assert proper_colorings_of_cycle(6, 4) == 630      # 5^4 + 5


def test_tree_has_no_cycles():
    g = path_graph(10, d=6)
    for v in range(10):
        g.labels[v] = "W+" if v % 2 == 0 else "W-"
    stats = count_short_cycles(g, 8)
    assert all(s.count == 0 for s in stats)


def test_cycle_counts_on_labeled_cycles():
    for n in (4, 6, 8):
        g = cycle_graph(n, d=6)
        for v in range(n):
            g.labels[v] = "W+" if v % 2 == 0 else "W-"
        stats = {s.length: s.count for s in count_short_cycles(g, 8)}
        for length in (2, 4, 6, 8):
            assert stats[length] == (1 if length == n else 0)


def test_4cycle_codegree_matches_dfs():
    rng = random.Random(33)
    from hardcore.gadgets import _count_4cycles_in_w, _count_cycles_dfs
    for _ in range(20):
        n = rng.randint(6, 12)
        g = Graph(n, 6)
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < 0.35:
                    g.add_edge(u, v)
        for v in range(n):
            g.labels[v] = rng.choice(["W+", "W-"])
        assert _count_4cycles_in_w(g) == _count_cycles_dfs(g, 4).get(4, 0)


def test_cycle_stats_mean_prediction_smoke():
    # light version of the Poisson-mean check (the acceptance run is larger)
    counts = []
    for seed in range(40):
        spec = GadgetSpec.from_params(600, 0.05, 0.05, 6, seed=seed)
        g = sample_core(spec)
        stats = {s.length: s.count for s in count_short_cycles(g, 4)}
        counts.append(stats[4])
    mean = sum(counts) / len(counts)
    lam4 = proper_colorings_of_cycle(6, 4) / 4
    assert abs(mean - lam4) < 0.3 * lam4


def test_cycle_stats_fields(fp61):
    g = cycle_graph(4, d=6)
    stats = count_short_cycles(g, 6, alpha_beta=(fp61.p_minus, fp61.p_plus))
    for s in stats:
        assert s.delta_perturbation == pytest.approx(
            CycleStats.delta_for(fp61.p_minus, fp61.p_plus, s.length))
        assert 0 < s.delta_perturbation < 1


def test_imax_cap():
    with pytest.raises(ResourceError):
        count_short_cycles(cycle_graph(4), 14)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_round_trip_core():
    spec = GadgetSpec.from_params(12, 0.12, 0.12, 3, seed=6)
    g = sample_core(spec)
    back = deserialize_graph(serialize_graph(g))
    assert g.structurally_equal(back)


def test_round_trip_hg_preserves_labels():
    hg = build_hg(path_graph(2), _tiny_gadget(), k=1)
    back = deserialize_graph(serialize_graph(hg))
    assert back.labels == hg.labels
    assert back.gadget_index == hg.gadget_index
    assert back.structurally_equal(hg)


def test_empty_graph_header_only():
    g = Graph(0, 3)
    text = serialize_graph(g)
    assert text == "hgg 1 0 3\n"
    assert deserialize_graph(text).n_vertices == 0


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as err:
        deserialize_graph("hgg 1 2 3\nv 0 W+ 0\nv 1 QQ 0\n")
    assert "line 3" in str(err.value)
    with pytest.raises(ParseError) as err:
        deserialize_graph("nope\n")
    assert "line 1" in str(err.value)
    with pytest.raises(ParseError) as err:
        deserialize_graph("hgg 1 2 3\nv 0 W+ 0\nv 1 W- 0\ne 0 5\n")
    assert "line 4" in str(err.value)
    with pytest.raises(ParseError):
        deserialize_graph("hgg 1 2 3\nv 0 W+ 0\n")  # vertex 1 missing
