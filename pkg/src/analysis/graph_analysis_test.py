import itertools

import pydot

from abstract.message_graph import MessageGraph
from abstract.topology import TopologyMatrix
from analysis import fixtures
from analysis.graph_analysis import (
    addable_link,
    alignment_components,
    alignment_sets,
    build_message_graph,
    has_internal_conflict,
    internal_conflicts,
    is_dof_half_optimal,
    is_maximal_by_definition,
    to_dot,
)


def test_identity_has_no_edges():
    g = build_message_graph(TopologyMatrix.identity(3))
    assert g.alignment_edges == frozenset()
    assert g.conflict_edges == frozenset()


def test_two_users_cannot_align():
    g = build_message_graph(TopologyMatrix.ones(2))
    assert g.conflict_edges == {(0, 1), (1, 0)}
    assert g.alignment_edges == frozenset()


def test_two_alliance_graph():
    t = fixtures.TWO_BY_TWO
    g = build_message_graph(t)
    assert g.alignment_edges == {(0, 1), (2, 3)}
    off_diagonal = {(i, j) for i in range(4) for j in range(4) if i != j and t.entries[i][j]}
    assert g.conflict_edges == off_diagonal
    assert alignment_sets(g).sets == ((0, 1), (2, 3))


def test_alignment_sets_are_components():
    assert alignment_sets(MessageGraph(k=3)).sets == ((0,), (1,), (2,))
    chained = MessageGraph(k=3, alignment_edges=frozenset({(0, 1), (1, 2)}))
    assert alignment_sets(chained).sets == ((0, 1, 2),)


def test_internal_conflicts():
    g = build_message_graph(TopologyMatrix.identity(4))
    assert internal_conflicts(g, alignment_sets(g)) == []

    g = build_message_graph(fixtures.SIX_USER_CONFLICT)
    found = internal_conflicts(g, alignment_sets(g))
    assert any({i, j} == {3, 4} for _, i, j in found)

    g = build_message_graph(fixtures.SIX_USER)
    assert internal_conflicts(g, alignment_sets(g)) == []


def test_dof_half_optimal():
    assert is_dof_half_optimal(TopologyMatrix.identity(5))
    assert not is_dof_half_optimal(fixtures.SIX_USER_CONFLICT)


def test_maximal_by_definition():
    assert is_maximal_by_definition(TopologyMatrix.ones(2)).is_maximal
    assert is_maximal_by_definition(fixtures.TWO_BY_TWO).is_maximal
    assert is_maximal_by_definition(fixtures.THREE_PLUS_ONE).is_maximal

    verdict = is_maximal_by_definition(TopologyMatrix.identity(4))
    assert verdict.is_dof_optimal and not verdict.is_maximal
    assert verdict.witness.kind == "addable-link"
    assert verdict.witness.link == (0, 1)

    verdict = is_maximal_by_definition(fixtures.SIX_USER_CONFLICT)
    assert verdict.witness.kind == "internal-conflict"


def test_single_user_is_degenerate():
    verdict = is_maximal_by_definition(TopologyMatrix.identity(1))
    assert verdict.is_maximal
    assert verdict.witness.kind == "degenerate"


def test_only_all_ones_is_maximal_for_two_users():
    maximal = [code for code in range(4) if is_maximal_by_definition(TopologyMatrix.from_code(2, code)).is_maximal]
    assert maximal == [TopologyMatrix.ones(2).code]


def test_three_users_have_five_maximal_topologies():
    topologies = [TopologyMatrix.from_code(3, code) for code in range(64)]
    found = [t for t in topologies if is_maximal_by_definition(t).is_maximal]
    assert len(found) == 5
    assert all(is_dof_half_optimal(t) for t in found)


def test_flipping_any_zero_breaks_a_maximal_topology():
    for t in (fixtures.TWO_BY_TWO, fixtures.SIX_USER, fixtures.NINE_USER, fixtures.EIGHT_USER_MERGED):
        assert is_maximal_by_definition(t).is_maximal
        for i, j in itertools.product(range(t.k), repeat=2):
            if not t.entries[i][j]:
                assert not is_dof_half_optimal(t.with_link(i, j))


def test_kernel_agrees_with_graph_operations():
    for code in range(4096):
        t = TopologyMatrix.from_code(4, code)
        g = build_message_graph(t)
        sets = alignment_sets(g).sets
        labels = alignment_components(t.masks)
        assert tuple(sorted({tuple(m for m in range(4) if labels[m] == label) for label in labels})) == sets
        assert has_internal_conflict(t.masks) == bool(internal_conflicts(g, alignment_sets(g)))


def test_addable_link_leaves_maximal_topology_alone():
    assert addable_link(fixtures.SIX_USER.masks) is None
    assert addable_link(TopologyMatrix.identity(3).masks) == (0, 1)


def test_dot_export_styles_edges():
    g = build_message_graph(fixtures.SIX_USER_CONFLICT)
    graph = pydot.graph_from_dot_data(to_dot(g, alignment_sets(g)))[0]
    assert graph.get_type() == "digraph"
    assert graph.get_name().strip('"') == "messages"

    edges = {
        (e.get_source(), e.get_destination(), e.get("style").strip('"'), (e.get("dir") or "").strip('"'))
        for e in graph.get_edges()
    }
    assert ("W5", "W4", "dashed", "") in edges
    assert ("W4", "W5", "solid", "none") in edges
    assert len(edges) == len(g.alignment_edges) + len(g.conflict_edges)

    clusters = [s.get_name().strip('"') for s in graph.get_subgraphs()]
    assert clusters == [f"cluster_{s + 1}" for s in range(len(alignment_sets(g).sets))]
    assert "cluster_2" in clusters
