"""Message graph, alignment sets, internal conflicts and definitional maximality.

The public operations work on pydantic types. The bitmask kernel below them
(`alignment_components`, `has_internal_conflict`, `addable_link`) takes one
integer per receiver, bit j set iff the receiver hears transmitter j, and is
what the exhaustive oracle calls in its inner loop.
"""

import logging
from typing import Sequence

import networkx as nx
import pydot
from networkx.drawing import nx_pydot

from abstract.message_graph import AlignmentPartition, MessageGraph
from abstract.topology import TopologyMatrix
from abstract.verdict import MaximalityVerdict, Witness

logger = logging.getLogger(__name__)


def build_message_graph(t: TopologyMatrix) -> MessageGraph:
    conflicts = {(i, j) for i in range(t.k) for j in t.heard_by(i)}
    alignments = set()
    for r in range(t.k):
        heard = t.heard_by(r)
        alignments.update((a, b) for x, a in enumerate(heard) for b in heard[x + 1 :])
    return MessageGraph(k=t.k, alignment_edges=frozenset(alignments), conflict_edges=frozenset(conflicts))


def alignment_sets(g: MessageGraph) -> AlignmentPartition:
    graph = nx.Graph()
    graph.add_nodes_from(range(g.k))
    graph.add_edges_from(g.alignment_edges)
    sets = sorted(tuple(sorted(c)) for c in nx.connected_components(graph))
    return AlignmentPartition(sets=tuple(sets))


def internal_conflicts(g: MessageGraph, p: AlignmentPartition) -> list[tuple[int, int, int]]:
    """Every (set index, i, j) where receiver i hears j and both lie in the same alignment set."""
    found = []
    for i, j in sorted(g.conflict_edges):
        s = p.set_of(i)
        if j in p.sets[s]:
            found.append((s, i, j))
    return found


def is_dof_half_optimal(t: TopologyMatrix) -> bool:
    return not has_internal_conflict(t.masks)


def is_maximal_by_definition(t: TopologyMatrix) -> MaximalityVerdict:
    if t.k == 1:
        return MaximalityVerdict(is_dof_optimal=True, is_maximal=True, witness=Witness(kind="degenerate"))

    g = build_message_graph(t)
    conflicts = internal_conflicts(g, alignment_sets(g))
    if conflicts:
        s, i, j = conflicts[0]
        return MaximalityVerdict(
            is_dof_optimal=False,
            is_maximal=False,
            witness=Witness(kind="internal-conflict", alignment_set=s, messages=(i, j)),
        )

    link = addable_link(t.masks)
    if link is not None:
        return MaximalityVerdict(is_dof_optimal=True, is_maximal=False, witness=Witness(kind="addable-link", link=link))
    return MaximalityVerdict(is_dof_optimal=True, is_maximal=True)


def to_dot(g: MessageGraph, p: AlignmentPartition | None = None) -> str:
    """Render alignment edges solid and undirected, conflict edges dashed and directed."""
    graph = nx.MultiDiGraph(name="messages")
    graph.graph["node"] = {"shape": "circle"}
    graph.add_nodes_from(f"W{m + 1}" for m in range(g.k))
    for i, j in sorted(g.alignment_edges):
        graph.add_edge(f"W{i + 1}", f"W{j + 1}", key="alignment", dir="none", style="solid", color="black")
    # edge drawn from the interfering source to the message it conflicts
    for i, j in sorted(g.conflict_edges):
        graph.add_edge(f"W{j + 1}", f"W{i + 1}", key="conflict", style="dashed", color="red")

    dot = nx_pydot.to_pydot(graph)
    if p is not None:
        for s, members in enumerate(p.sets):
            cluster = pydot.Cluster(str(s + 1), label=f"alignment set {s + 1}")
            for m in members:
                cluster.add_node(pydot.Node(f"W{m + 1}"))
            dot.add_subgraph(cluster)
    return dot.to_string()


def alignment_components(masks: Sequence[int]) -> list[int]:
    """Component label per message (the smallest member of its alignment set)."""
    k = len(masks)
    parent = list(range(k))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for r in range(k):
        heard = masks[r] & ~(1 << r)
        first = -1
        while heard:
            low = heard & -heard
            j = low.bit_length() - 1
            heard ^= low
            if first < 0:
                first = j
                continue
            a, b = find(first), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)

    return [find(m) for m in range(k)]


def component_masks(labels: Sequence[int]) -> dict[int, int]:
    masks: dict[int, int] = {}
    for m, label in enumerate(labels):
        masks[label] = masks.get(label, 0) | (1 << m)
    return masks


def has_internal_conflict(masks: Sequence[int]) -> bool:
    labels = alignment_components(masks)
    members = component_masks(labels)
    return any(masks[r] & ~(1 << r) & members[labels[r]] for r in range(len(masks)))


def addable_link(masks: Sequence[int]) -> tuple[int, int] | None:
    """First (receiver, transmitter) in row-major order whose link keeps the topology conflict-free."""
    k = len(masks)
    trial = list(masks)
    for i in range(k):
        for j in range(k):
            if (masks[i] >> j) & 1:
                continue
            trial[i] = masks[i] | (1 << j)
            if not has_internal_conflict(trial):
                return (i, j)
        trial[i] = masks[i]
    return None


def is_maximal_masks(masks: Sequence[int]) -> bool:
    return not has_internal_conflict(masks) and addable_link(masks) is None
