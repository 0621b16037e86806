import itertools
import logging
from math import comb
from typing import Iterator

from abstract.alliance_spec import Alliance, AllianceSpec, PartitionViolation
from abstract.errors import SpecMismatchError, SpecValidationError, WorkbenchError
from abstract.topology import TopologyMatrix
from analysis.graph_analysis import alignment_components

logger = logging.getLogger(__name__)


def validate_spec(s: AllianceSpec) -> list[PartitionViolation]:
    """Check the four construction conditions; an empty list means the spec is valid."""
    n = s.n
    if n == 0:
        return [PartitionViolation(condition="coverage-mismatch")]
    if n == 1 and s.k == 1 and s.alliances[0].members == (0,):
        return []

    violations = []
    for i in range(n):
        if not any(s.alliances[j].suballiance(i) for j in range(n) if j != i):
            violations.append(PartitionViolation(condition="no-common-conflict", indices=(i,)))
    for i, alliance in enumerate(s.alliances):
        if not any(alliance.suballiances.values()):
            violations.append(PartitionViolation(condition="empty-alliance", indices=(i,)))
    for i, j in itertools.combinations(range(n), 2):
        if not s.alliances[i].suballiance(j) and not s.alliances[j].suballiance(i):
            violations.append(PartitionViolation(condition="pair-uncovered", indices=(i, j)))

    assigned = sum(len(ms) for a in s.alliances for ms in a.suballiances.values())
    if assigned != s.k:
        violations.append(PartitionViolation(condition="coverage-mismatch"))
    return violations


def derive_topology(s: AllianceSpec) -> TopologyMatrix:
    """Receiver n in A[i][j] hears every transmitter of alliance j."""
    violations = validate_spec(s)
    if violations:
        raise SpecValidationError(
            "spec violates construction conditions: " + "; ".join(v.describe() for v in violations), violations
        )
    return TopologyMatrix.from_masks(derived_masks(s))


def derived_masks(s: AllianceSpec) -> list[int]:
    """Per-receiver bitmask of heard transmitters, without validating the spec."""
    members = [sum(1 << m for m in a.members) for a in s.alliances]
    masks = [1 << m for m in range(s.k)]
    for alliance in s.alliances:
        for partner, messages in alliance.suballiances.items():
            for m in messages:
                masks[m] |= members[partner]
    return masks


def min_messages(n: int) -> int:
    """Fewest messages that can form `n` mutually hostile alliances."""
    if n < 1:
        raise WorkbenchError(f"alliance count must be positive, got {n}")
    if n <= 2:
        return n
    return comb(n, 2)


def max_alliances(k: int) -> int:
    if k < 1:
        raise WorkbenchError(f"message count must be positive, got {k}")
    n = 1
    while min_messages(n + 1) <= k:
        n += 1
    return n


def set_partitions(k: int, n: int) -> Iterator[list[tuple[int, ...]]]:
    """Partitions of range(k) into exactly n blocks, blocks ordered by smallest member."""

    def extend(m: int, labels: list[int], used: int) -> Iterator[list[int]]:
        if m == k:
            if used == n:
                yield labels
            return
        if n - used > k - m:
            return
        for label in range(min(used + 1, n)):
            labels.append(label)
            yield from extend(m + 1, labels, max(used, label + 1))
            labels.pop()

    for labels in extend(0, [], 0):
        yield [tuple(m for m in range(k) if labels[m] == b) for b in range(n)]


def enumerate_specs(k: int, n: int) -> Iterator[AllianceSpec]:
    """Every valid labeled spec with exactly `n` alliances, each once, normalized."""
    if n < 1 or n > max_alliances(k):
        return
    if n == 1:
        if k == 1:
            yield AllianceSpec(k=1, alliances=(Alliance(unassigned=(0,)),))
        return

    for blocks in set_partitions(k, n):
        logger.debug("partition %s", [[m + 1 for m in b] for b in blocks])
        owner = {m: b for b, members in enumerate(blocks) for m in members}
        choices = [[p for p in range(n) if p != owner[m]] for m in range(k)]
        for partners in itertools.product(*choices):
            suballiances: list[dict[int, list[int]]] = [{} for _ in range(n)]
            for m, partner in enumerate(partners):
                suballiances[owner[m]].setdefault(partner, []).append(m)
            spec = AllianceSpec(k=k, alliances=tuple(_alliance(s) for s in suballiances))
            if not validate_spec(spec):
                yield spec


def count_specs(k: int, n: int) -> int:
    return sum(1 for _ in enumerate_specs(k, n))


def spec_from_topology(t: TopologyMatrix) -> AllianceSpec:
    """The alliance spec whose derivation is `t`; alliances are the alignment sets."""
    if t.k == 1:
        return AllianceSpec(k=1, alliances=(Alliance(unassigned=(0,)),))

    masks = t.masks
    labels = alignment_components(masks)
    roots = sorted(set(labels))
    index = {root: i for i, root in enumerate(roots)}
    members = [sum(1 << m for m in range(t.k) if labels[m] == root) for root in roots]

    suballiances: list[dict[int, list[int]]] = [{} for _ in roots]
    for r in range(t.k):
        heard = masks[r] & ~(1 << r)
        matches = [i for i, mask in enumerate(members) if mask == heard]
        if not matches:
            raise SpecMismatchError(f"receiver {r + 1} does not hear exactly one whole alliance")
        suballiances[index[labels[r]]].setdefault(matches[0], []).append(r)

    spec = AllianceSpec(k=t.k, alliances=tuple(_alliance(s) for s in suballiances))
    violations = validate_spec(spec)
    if violations:
        raise SpecMismatchError("topology is not maximal: " + "; ".join(v.describe() for v in violations))
    return spec


def _alliance(suballiances: dict[int, list[int]]) -> Alliance:
    return Alliance(suballiances={p: tuple(sorted(ms)) for p, ms in sorted(suballiances.items())})
