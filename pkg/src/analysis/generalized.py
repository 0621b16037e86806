"""Generalized alliances: sub-alliances interfered by several alliances at once,
DoF 1/(E_M + 1), its block discriminant, and the acyclic-subset upper bound."""

import itertools
import logging
from fractions import Fraction
from typing import Iterator

import networkx as nx

from abstract.alliance_spec import (
    AllianceSpec,
    GeneralizedAlliance,
    GeneralizedAllianceSpec,
    GeneralizedSubAlliance,
    GeneralizedViolation,
)
from abstract.dof_report import DemandGraph, DofReport
from abstract.errors import SearchLimitError, SpecMismatchError, SpecValidationError
from abstract.topology import TopologyMatrix
from abstract.verdict import MaximalityVerdict, Witness
from analysis.alliance_construction import set_partitions
from analysis.matrix_analysis import decompose, interference_classes

logger = logging.getLogger(__name__)


def lift(s: AllianceSpec) -> GeneralizedAllianceSpec:
    """Express a plain spec with singleton interferer sets."""
    alliances = []
    for alliance in s.alliances:
        subs = [
            GeneralizedSubAlliance(messages=tuple(sorted(ms)), interferers=(partner,))
            for partner, ms in sorted(alliance.suballiances.items())
            if ms
        ]
        if alliance.unassigned:
            subs.append(GeneralizedSubAlliance(messages=tuple(sorted(alliance.unassigned)), interferers=()))
        alliances.append(GeneralizedAlliance(suballiances=tuple(subs)))
    return GeneralizedAllianceSpec(k=s.k, alliances=tuple(alliances))


def validate_generalized_spec(
    s: GeneralizedAllianceSpec, strict_intersection: bool = False
) -> list[GeneralizedViolation]:
    """Empty list iff the spec satisfies every generalized construction condition.

    Sibling interferer sets that share no alliance are only logged unless
    `strict_intersection` is set.
    """
    n = s.n
    if n == 0:
        return [GeneralizedViolation(condition="coverage-mismatch")]
    if n == 1 and s.k == 1 and s.alliances[0].members == (0,):
        return []

    violations = []
    for i, alliance in enumerate(s.alliances):
        if not alliance.members:
            violations.append(GeneralizedViolation(condition="empty-alliance", indices=(i,)))
        for sub in alliance.suballiances:
            if not sub.interferers:
                violations.append(GeneralizedViolation(condition="empty-interferers", indices=(i,)))
        for (a, first), (b, second) in itertools.permutations(enumerate(alliance.suballiances), 2):
            if set(first.interferers) <= set(second.interferers):
                violations.append(GeneralizedViolation(condition="interferer-subset", indices=(i, a, b)))
        for (a, first), (b, second) in itertools.combinations(enumerate(alliance.suballiances), 2):
            if first.interferers and second.interferers and not set(first.interferers) & set(second.interferers):
                if strict_intersection:
                    violations.append(GeneralizedViolation(condition="disjoint-interferers", indices=(i, a, b)))
                else:
                    logger.debug("alliance %d: sub-alliances %d and %d share no interferer", i + 1, a + 1, b + 1)

    heard = [set().union(*(sub.interferers for sub in alliance.suballiances)) for alliance in s.alliances]
    for i, j in itertools.combinations(range(n), 2):
        if j not in heard[i] and i not in heard[j]:
            violations.append(GeneralizedViolation(condition="pair-not-hostile", indices=(i, j)))

    if sum(len(a.members) for a in s.alliances) != s.k:
        violations.append(GeneralizedViolation(condition="coverage-mismatch"))
    return violations


def derive_generalized_topology(s: GeneralizedAllianceSpec, strict_intersection: bool = False) -> TopologyMatrix:
    violations = validate_generalized_spec(s, strict_intersection)
    if violations:
        raise SpecValidationError(
            "generalized spec is invalid: " + "; ".join(v.describe() for v in violations), violations
        )
    return TopologyMatrix.from_masks(derived_generalized_masks(s))


def derived_generalized_masks(s: GeneralizedAllianceSpec) -> list[int]:
    """Per-receiver bitmask of heard transmitters, without validating the spec."""
    members = [sum(1 << m for m in a.members) for a in s.alliances]
    masks = [1 << m for m in range(s.k)]
    for alliance in s.alliances:
        for sub in alliance.suballiances:
            heard = 0
            for e in sub.interferers:
                heard |= members[e]
            for m in sub.messages:
                masks[m] |= heard
    return masks


def compute_e_max(s: GeneralizedAllianceSpec) -> int:
    return max((len(sub.interferers) for a in s.alliances for sub in a.suballiances), default=0)


def is_maximal_for_dof(s: GeneralizedAllianceSpec) -> bool:
    e_max = compute_e_max(s)
    return all(len(sub.interferers) == e_max for a in s.alliances for sub in a.suballiances)


def explain_topology(t: TopologyMatrix) -> GeneralizedAllianceSpec | None:
    """Coarsest generalized spec deriving `t`, or None when no spec explains it.

    Alliances are the interference classes; a receiver must hear whole classes
    and at least one of them.
    """
    if t.k == 1:
        return GeneralizedAllianceSpec(
            k=1, alliances=(GeneralizedAlliance(suballiances=(GeneralizedSubAlliance(messages=(0,), interferers=()),)),)
        )

    classes = interference_classes(t)
    owner = {m: c for c, members in enumerate(classes) for m in members}
    grouped: list[dict[tuple[int, ...], list[int]]] = [{} for _ in classes]
    for r in range(t.k):
        heard = set(t.heard_by(r))
        interferers = []
        for c, members in enumerate(classes):
            overlap = heard.intersection(members)
            if not overlap:
                continue
            if len(overlap) != len(members):
                logger.debug("receiver %d hears part of class %d", r + 1, c + 1)
                return None
            interferers.append(c)
        if not interferers:
            return None
        grouped[owner[r]].setdefault(tuple(interferers), []).append(r)

    alliances = tuple(
        GeneralizedAlliance(
            suballiances=tuple(
                GeneralizedSubAlliance(messages=tuple(ms), interferers=e) for e, ms in sorted(subs.items())
            )
        )
        for subs in grouped
    )
    return GeneralizedAllianceSpec(k=t.k, alliances=alliances)


def is_mtm_for_dof(t: TopologyMatrix, e_m: int) -> MaximalityVerdict:
    """Every column carries exactly `e_m` interference blocks and every block pair is linked.

    `is_dof_optimal` reports whether some generalized spec with interferer sets of
    at most `e_m` alliances explains the topology, so DoF 1/(e_m + 1) is achievable.
    """
    if t.k == 1:
        return MaximalityVerdict(is_dof_optimal=True, is_maximal=True, witness=Witness(kind="degenerate"))

    explanation = explain_topology(t)
    dof_optimal = explanation is not None and compute_e_max(explanation) <= e_m
    _, _, violations = decompose(t, interference_classes(t), expected=e_m)
    if not violations:
        return MaximalityVerdict(is_dof_optimal=dof_optimal, is_maximal=dof_optimal)
    return MaximalityVerdict(
        is_dof_optimal=dof_optimal,
        is_maximal=False,
        witness=Witness(kind="block-violation", violations=tuple(violations)),
    )


def build_demand_graph(t: TopologyMatrix) -> DemandGraph:
    edges = frozenset((p, q) for p in range(t.k) for q in range(t.k) if p != q and not t.entries[p][q])
    return DemandGraph(k=t.k, edges=edges)


def max_acyclic_subset(d: DemandGraph, limit: int = 20) -> int:
    """Size of the largest vertex subset inducing no directed cycle, by exhaustive search."""
    if d.k > limit:
        raise SearchLimitError(f"exhaustive acyclic-subset search is limited to {limit} users, got {d.k}")

    graph = nx.DiGraph()
    graph.add_nodes_from(range(d.k))
    graph.add_edges_from(d.edges)
    for size in range(d.k, 0, -1):
        for nodes in itertools.combinations(range(d.k), size):
            if nx.is_directed_acyclic_graph(graph.subgraph(nodes)):
                logger.debug("acyclic subset %s", [v + 1 for v in nodes])
                return size
    return 1


def dof_report(t: TopologyMatrix, s: GeneralizedAllianceSpec, limit: int = 20) -> DofReport:
    """Achievable DoF from the spec against the acyclic-subset bound of the topology."""
    if s.k != t.k or TopologyMatrix.from_masks(derived_generalized_masks(s)) != t:
        raise SpecMismatchError("the spec does not derive this topology")

    if t.k == 1:
        return DofReport(
            e_max=0, dof_achievable=Fraction(1), psi=1, dof_upper=Fraction(1), tight=True, degenerate=True
        )

    e_max = compute_e_max(s)
    psi = max_acyclic_subset(build_demand_graph(t), limit)
    achievable = Fraction(1, e_max + 1)
    upper = Fraction(1, psi)
    if upper < achievable:
        logger.warning("acyclic-subset bound 1/%d is below achievable 1/%d", psi, e_max + 1)
    return DofReport(e_max=e_max, dof_achievable=achievable, psi=psi, dof_upper=upper, tight=achievable == upper)


def enumerate_generalized_specs(k: int, n: int, e_m: int) -> Iterator[GeneralizedAllianceSpec]:
    """Valid specs over k messages and n alliances whose interferer sets all have size e_m."""
    if n < 2 or not (1 <= e_m <= n - 1):
        return
    for blocks in set_partitions(k, n):
        owner = {m: b for b, members in enumerate(blocks) for m in members}
        choices = [list(itertools.combinations([a for a in range(n) if a != owner[m]], e_m)) for m in range(k)]
        for picks in itertools.product(*choices):
            grouped: list[dict[tuple[int, ...], list[int]]] = [{} for _ in range(n)]
            for m, e in enumerate(picks):
                grouped[owner[m]].setdefault(e, []).append(m)
            spec = GeneralizedAllianceSpec(
                k=k,
                alliances=tuple(
                    GeneralizedAlliance(
                        suballiances=tuple(
                            GeneralizedSubAlliance(messages=tuple(ms), interferers=e) for e, ms in sorted(g.items())
                        )
                    )
                    for g in grouped
                ),
            )
            if not validate_generalized_spec(spec):
                yield spec
