"""Matrix-side analysis: canonical ordering, alliance and interference blocks, the
block discriminant for maximality, and repair of non-maximal topologies.

Block language follows the transmitter-by-receiver drawing: "column c" is the
receiver of message c, and an interference block from block U onto column c
means receiver c hears every transmitter of U. In `TopologyMatrix` terms that
is row c.
"""

import itertools
import logging
from typing import Literal, Sequence

from abstract.alliance_spec import Alliance, AllianceSpec
from abstract.block_decomposition import BlockDecomposition, BlockViolation, InterferenceBlock, Permutation
from abstract.errors import InternalConflictError, NotCanonicalError, PermutationError, SearchLimitError, WorkbenchError
from abstract.topology import TopologyMatrix
from abstract.verdict import MaximalityVerdict, Witness
from analysis.alliance_construction import derive_topology, set_partitions, validate_spec
from analysis.graph_analysis import alignment_components, component_masks, has_internal_conflict

logger = logging.getLogger(__name__)

Strategy = Literal["merge", "add-links", "auto"]


def apply_permutation(t: TopologyMatrix, p: Permutation) -> TopologyMatrix:
    """Relabel rows and columns together: entry (i, j) moves to (p(i), p(j))."""
    if p.k != t.k:
        raise PermutationError(f"permutation over {p.k} indices applied to a {t.k}-user topology")
    rows = [[0] * t.k for _ in range(t.k)]
    for i, row in enumerate(t.entries):
        for j, v in enumerate(row):
            rows[p.mapping[i]][p.mapping[j]] = v
    return TopologyMatrix.from_rows(rows)


def alignment_set_list(t: TopologyMatrix) -> list[tuple[int, ...]]:
    labels = alignment_components(t.masks)
    return sorted(tuple(m for m in range(t.k) if labels[m] == root) for root in set(labels))


def canonicalize(t: TopologyMatrix) -> tuple[TopologyMatrix, Permutation]:
    """Put each alignment set on consecutive indices, sets ordered by smallest member."""
    order = [m for s in alignment_set_list(t) for m in s]
    p = Permutation.from_order(order)
    return apply_permutation(t, p), p


def interference_classes(t: TopologyMatrix, messages: Sequence[int] | None = None) -> list[tuple[int, ...]]:
    """Group mutually unlinked messages that are heard by exactly the same receivers."""
    pool = sorted(range(t.k) if messages is None else messages)
    hearers = {m: frozenset(t.hearers_of(m)) for m in pool}
    classes: list[list[int]] = []
    for m in pool:
        for members in classes:
            rep = members[0]
            if hearers[rep] == hearers[m] and not t.entries[m][rep] and not t.entries[rep][m]:
                members.append(m)
                break
        else:
            classes.append([m])
    return [tuple(c) for c in classes]


def decompose(
    t: TopologyMatrix, tentative: Sequence[tuple[int, ...]], expected: int
) -> tuple[list[tuple[int, ...]], list[InterferenceBlock], list[BlockViolation]]:
    """Classify tentative blocks, then every column segment against them.

    A tentative block with links inside it is reported and refined into its
    interference classes so that column counts stay meaningful.
    """
    violations: list[BlockViolation] = []
    units: list[tuple[int, ...]] = []
    for b, block in enumerate(tentative):
        inside = False
        for i in block:
            heard = tuple(j for j in block if j != i and t.entries[i][j])
            if heard:
                inside = True
                violations.append(BlockViolation(kind="non-identity-block", blocks=(b,), receiver=i, messages=heard))
        units.extend(interference_classes(t, block) if inside else [block])
    units.sort()

    interference: list[InterferenceBlock] = []
    for c in range(t.k):
        full = []
        for u, unit in enumerate(units):
            if c in unit:
                continue
            heard = tuple(m for m in unit if t.entries[c][m])
            if len(heard) == len(unit):
                full.append(u)
                interference.append(InterferenceBlock(source=u, receiver=c, messages=unit))
            elif heard:
                violations.append(
                    BlockViolation(kind="incomplete-interference-block", blocks=(u,), receiver=c, messages=heard)
                )
        if len(full) != expected:
            violations.append(
                BlockViolation(
                    kind="column-block-count",
                    blocks=tuple(full),
                    receiver=c,
                    messages=tuple(m for u in full for m in units[u]),
                    count=len(full),
                    expected=expected,
                )
            )

    owner = {m: u for u, unit in enumerate(units) for m in unit}
    linked = {(block.source, owner[block.receiver]) for block in interference}
    for u, v in itertools.combinations(range(len(units)), 2):
        if (u, v) not in linked and (v, u) not in linked:
            violations.append(BlockViolation(kind="uncovered-pair", blocks=(u, v)))
    sources = {block.source for block in interference}
    for u, unit in enumerate(units):
        if u not in sources:
            violations.append(BlockViolation(kind="silent-alliance", blocks=(u,), messages=unit))

    return units, interference, violations


def find_blocks(t: TopologyMatrix) -> BlockDecomposition:
    """Block decomposition of a canonicalized topology."""
    _, p = canonicalize(t)
    if not p.is_identity:
        raise NotCanonicalError("topology is not in canonical order; canonicalize it first")

    tentative = alignment_set_list(t)
    units, interference, violations = decompose(t, tentative, expected=1)
    blocks = tuple((block[0], len(block)) for block in tentative)
    return BlockDecomposition(
        permutation=p,
        blocks=blocks,
        units=tuple(units),
        interference_blocks=tuple(interference),
        violations=tuple(violations),
    )


def is_mtm(t: TopologyMatrix) -> MaximalityVerdict:
    """Block discriminant: every tentative block an alliance block, one interference
    block per column, and an interference block between every pair of blocks."""
    if t.k == 1:
        return MaximalityVerdict(is_dof_optimal=True, is_maximal=True, witness=Witness(kind="degenerate"))

    _, _, violations = decompose(t, alignment_set_list(t), expected=1)
    dof_optimal = not has_internal_conflict(t.masks)
    if not violations:
        return MaximalityVerdict(is_dof_optimal=dof_optimal, is_maximal=True)
    return MaximalityVerdict(
        is_dof_optimal=dof_optimal,
        is_maximal=False,
        witness=Witness(kind="block-violation", violations=tuple(violations)),
    )


def render_blocks(decomposition: BlockDecomposition, t: TopologyMatrix) -> str:
    """Canonical grid, rows are receivers, with lines at alliance block boundaries."""
    grid = apply_permutation(t, decomposition.permutation)
    order = decomposition.permutation.inverse().mapping
    starts = {start for start, _ in decomposition.blocks if start}

    header = "     "
    for j in range(grid.k):
        header += ("| " if j in starts else "") + f"{order[j] + 1:<3}"
    lines = [header.rstrip()]
    for i, row in enumerate(grid.entries):
        if i in starts:
            lines.append("-" * len(header.rstrip()))
        cells = ""
        for j, v in enumerate(row):
            cells += ("| " if j in starts else "") + f"{v:<3}"
        lines.append(f"W{order[i] + 1:<3} " + cells.rstrip())
    return "\n".join(lines)


class _Plan:
    """Alliances under construction: member lists plus the alliance each message hears."""

    def __init__(self, groups: list[list[int]], partner: list[int | None]):
        self.groups = groups
        self.partner = partner

    def owner(self, m: int) -> int:
        return next(g for g, members in enumerate(self.groups) if m in members)

    def silent(self, g: int) -> bool:
        return all(p != g for p in self.partner)

    def linked(self, a: int, b: int) -> bool:
        return any(self.partner[m] == b for m in self.groups[a]) or any(self.partner[m] == a for m in self.groups[b])

    def first_unlinked(self) -> tuple[int, int] | None:
        for a, b in itertools.combinations(range(len(self.groups)), 2):
            if not self.linked(a, b):
                return a, b
        return None

    def merge(self, a: int, b: int) -> None:
        """Fold alliance b into a (a < b); order by smallest member is preserved."""
        self.groups[a] = sorted(self.groups[a] + self.groups[b])
        del self.groups[b]
        self.partner = [None if p is None else a if p == b else p - 1 if p > b else p for p in self.partner]

    def spec(self, k: int) -> AllianceSpec:
        alliances = []
        for members in self.groups:
            suballiances: dict[int, list[int]] = {}
            unassigned = []
            for m in members:
                if self.partner[m] is None:
                    unassigned.append(m)
                else:
                    suballiances.setdefault(self.partner[m], []).append(m)
            alliances.append(Alliance(suballiances=_frozen([suballiances])[0], unassigned=tuple(unassigned)))
        return AllianceSpec(k=k, alliances=tuple(alliances))


def transform_to_mtm(t: TopologyMatrix, strategy: Strategy = "auto", search_limit: int = 200_000) -> TopologyMatrix:
    """Add links until the topology is maximal; existing links are never removed.

    Args:
        t (TopologyMatrix): a topology without internal conflict
        strategy (Strategy): how an unlinked pair of alliances is resolved, by merging them
            or by making one uninterfered message hear the other alliance
        search_limit (int): candidate completions tried before giving up, used only when
            the direct construction does not yield a maximal topology

    Returns:
        TopologyMatrix: a maximal topology dominating `t`
    """
    if t.k == 1:
        return t

    masks = t.masks
    labels = alignment_components(masks)
    members = component_masks(labels)
    for r in range(t.k):
        inner = masks[r] & ~(1 << r) & members[labels[r]]
        if inner:
            j = (inner & -inner).bit_length() - 1
            raise InternalConflictError(f"receiver {r + 1} hears W{j + 1} inside its own alignment set", (r, j))

    if is_mtm(t).is_maximal:
        return t

    sets = alignment_set_list(t)
    set_of = {m: s for s, ms in enumerate(sets) for m in ms}
    # every receiver hears at most one alignment set; complete it
    partner: list[int | None] = []
    for r in range(t.k):
        heard = t.heard_by(r)
        partner.append(set_of[heard[0]] if heard else None)
    plan = _Plan([list(s) for s in sets], list(partner))

    while (pair := plan.first_unlinked()) is not None:
        a, b = pair
        free = [m for m in sorted(plan.groups[a] + plan.groups[b]) if plan.partner[m] is None]
        if len(plan.groups) >= 3 and (strategy == "merge" or not free):
            logger.debug("merging alliances %d and %d", a + 1, b + 1)
            plan.merge(a, b)
        elif free:
            target = {m: b if m in plan.groups[a] else a for m in free}
            w = min(free, key=lambda m: (not plan.silent(target[m]), m))
            logger.debug("W%d now hears alliance %d", w + 1, target[w] + 1)
            plan.partner[w] = target[w]
        else:
            break

    for m in range(t.k):
        if plan.partner[m] is not None:
            continue
        own = plan.owner(m)
        others = [g for g in range(len(plan.groups)) if g != own]
        if not others:
            break
        silent = [g for g in others if plan.silent(g)]
        plan.partner[m] = silent[0] if silent else others[0]
        logger.debug("uninterfered W%d hears alliance %d", m + 1, plan.partner[m] + 1)

    spec = plan.spec(t.k)
    if not validate_spec(spec):
        result = derive_topology(spec)
        if result.dominates(t) and is_mtm(result).is_maximal:
            return result

    logger.debug("direct construction did not close; searching completions")
    return _search_completion(t, sets, partner, search_limit)


def _search_completion(
    t: TopologyMatrix, sets: list[tuple[int, ...]], heard: list[int | None], limit: int
) -> TopologyMatrix:
    """Try groupings of mutually unlinked alignment sets, fewest merges first, then
    every choice of alliance for each uninterfered message."""
    n = len(sets)
    set_of = {m: s for s, ms in enumerate(sets) for m in ms}
    linked = {(set_of[r], heard[r]) for r in range(t.k) if heard[r] is not None}
    linked |= {(b, a) for a, b in linked}

    tried = 0
    for groups in range(n, 1, -1):
        for grouping in set_partitions(n, groups):
            if any((a, b) in linked for g in grouping for a, b in itertools.combinations(g, 2)):
                continue
            group_of = {s: g for g, ss in enumerate(grouping) for s in ss}
            owner = [group_of[set_of[m]] for m in range(t.k)]
            choices = [
                [group_of[heard[m]]] if heard[m] is not None else [g for g in range(groups) if g != owner[m]]
                for m in range(t.k)
            ]
            for partners in itertools.product(*choices):
                tried += 1
                if tried > limit:
                    raise SearchLimitError(f"no maximal completion within {limit} candidates")
                suballiances: list[dict[int, list[int]]] = [{} for _ in range(groups)]
                for m, p in enumerate(partners):
                    suballiances[owner[m]].setdefault(p, []).append(m)
                spec = AllianceSpec(k=t.k, alliances=tuple(Alliance(suballiances=s) for s in _frozen(suballiances)))
                if validate_spec(spec):
                    continue
                result = derive_topology(spec)
                if result.dominates(t) and is_mtm(result).is_maximal:
                    return result
    raise WorkbenchError("no maximal completion exists for this topology")


def _frozen(suballiances: list[dict[int, list[int]]]) -> list[dict[int, tuple[int, ...]]]:
    return [{p: tuple(sorted(ms)) for p, ms in sorted(s.items())} for s in suballiances]
