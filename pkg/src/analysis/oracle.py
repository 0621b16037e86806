"""Brute-force ground truth over every small topology.

Verdicts are invariant under relabeling, so each relabeling orbit is classified
once through its canonical (numerically smallest) code and the result is
broadcast to the whole orbit.
"""

import csv
import itertools
import logging
import math
from collections.abc import Sequence
from typing import Iterator, overload

import numpy as np

from abstract.catalog import CatalogEntry, TheoremCheck, TheoremReport
from abstract.config_container import WorkbenchConfig
from abstract.errors import SearchLimitError, WorkbenchError
from abstract.topology import TopologyMatrix, code_from_masks, masks_from_code
from analysis.alliance_construction import derive_topology, enumerate_specs, max_alliances, spec_from_topology
from analysis.generalized import (
    build_demand_graph,
    derive_generalized_topology,
    enumerate_generalized_specs,
    max_acyclic_subset,
)
from analysis.graph_analysis import addable_link, alignment_components, has_internal_conflict, is_maximal_masks
from analysis.matrix_analysis import is_mtm, transform_to_mtm

logger = logging.getLogger(__name__)

# from this size on the block and transformation checks run on orbit representatives only
_REPRESENTATIVES_FROM = 5

# room left in an int64 code
_MAX_SAMPLED_BITS = 62


class Catalog(Sequence[CatalogEntry]):
    """Every K-user topology in code order, backed by flat arrays.

    Entry i is the topology with code i; entries are built on access.
    """

    def __init__(
        self,
        k: int,
        canonical: np.ndarray,
        dof_optimal: np.ndarray,
        maximal: np.ndarray,
        alliance_count: np.ndarray,
        orbit_size: np.ndarray,
    ):
        self.k = k
        self.canonical = canonical
        self.dof_optimal = dof_optimal
        self.maximal = maximal
        self.alliance_count = alliance_count
        self.orbit_size = orbit_size

    def __len__(self) -> int:
        return len(self.canonical)

    @overload
    def __getitem__(self, index: int) -> CatalogEntry: ...

    @overload
    def __getitem__(self, index: slice) -> list[CatalogEntry]: ...

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(len(self)))]
        if index < 0:
            index += len(self)
        if not (0 <= index < len(self)):
            raise IndexError(index)
        count = int(self.alliance_count[index])
        return CatalogEntry(
            matrix=TopologyMatrix.from_code(self.k, index),
            canonical_form=TopologyMatrix.from_code(self.k, int(self.canonical[index])),
            dof_optimal=bool(self.dof_optimal[index]),
            maximal=bool(self.maximal[index]),
            alliance_count=count if count > 0 else None,
            orbit_size=int(self.orbit_size[index]),
        )

    @property
    def orbits(self) -> int:
        return int(np.count_nonzero(self.is_representative))

    @property
    def is_representative(self) -> np.ndarray:
        return self.canonical == np.arange(len(self))

    def codes(self, where: np.ndarray | None = None, representatives: bool = False) -> list[int]:
        """Codes selected by a boolean mask, optionally only the canonical ones."""
        selected = np.ones(len(self), dtype=bool) if where is None else where.copy()
        if representatives:
            selected &= self.is_representative
        return [int(c) for c in np.flatnonzero(selected)]


def enumerate_topologies(k: int, limit: int = 5) -> Iterator[TopologyMatrix]:
    """Every unit-diagonal K x K matrix once, in code order."""
    if k > limit:
        raise SearchLimitError(f"exhaustive enumeration is limited to {limit} users, got {k}")
    return (TopologyMatrix.from_code(k, code) for code in range(2 ** (k * (k - 1))))


def _bit_slots(k: int) -> dict[tuple[int, int], int]:
    """Shift of entry (i, j) inside a code."""
    width = k * (k - 1)
    pairs = [(i, j) for i in range(k) for j in range(k) if i != j]
    return {pair: width - 1 - n for n, pair in enumerate(pairs)}


def canonical_codes(k: int) -> np.ndarray:
    """Smallest relabeled code for every code of size k."""
    codes = np.arange(2 ** (k * (k - 1)), dtype=np.int64)
    slots = _bit_slots(k)
    best = codes.copy()
    for perm in itertools.permutations(range(k)):
        if perm == tuple(range(k)):
            continue
        moved = np.zeros_like(codes)
        for (i, j), shift in slots.items():
            moved |= ((codes >> shift) & 1) << slots[perm[i], perm[j]]
        np.minimum(best, moved, out=best)
    return best


def classify_all(k: int, limit: int = 5) -> Catalog:
    """Definition verdicts for every K-user topology, one kernel run per orbit."""
    if k > limit:
        raise SearchLimitError(f"exhaustive classification is limited to {limit} users, got {k}")

    canonical = canonical_codes(k)
    reps, inverse, counts = np.unique(canonical, return_inverse=True, return_counts=True)
    logger.debug("k = %d: %d matrices in %d orbits", k, len(canonical), len(reps))

    rep_optimal = np.zeros(len(reps), dtype=bool)
    rep_maximal = np.zeros(len(reps), dtype=bool)
    rep_alliances = np.zeros(len(reps), dtype=np.int32)
    for n, code in enumerate(reps):
        masks = masks_from_code(k, int(code))
        if has_internal_conflict(masks):
            continue
        rep_optimal[n] = True
        if addable_link(masks) is None:
            rep_maximal[n] = True
            rep_alliances[n] = len(set(alignment_components(masks)))

    return Catalog(
        k=k,
        canonical=canonical,
        dof_optimal=rep_optimal[inverse],
        maximal=rep_maximal[inverse],
        alliance_count=rep_alliances[inverse],
        orbit_size=counts[inverse],
    )


def canonical_label(t: TopologyMatrix, limit: int = 8) -> TopologyMatrix:
    """Lexicographically least relabeling of `t`."""
    if t.k > limit:
        raise SearchLimitError(f"canonical labeling is limited to {limit} users, got {t.k}")

    masks = t.masks
    best = t.code
    for perm in itertools.permutations(range(t.k)):
        moved = [0] * t.k
        for i, mask in enumerate(masks):
            moved[perm[i]] = sum(1 << perm[j] for j in range(t.k) if (mask >> j) & 1)
        best = min(best, code_from_masks(moved))
    return TopologyMatrix.from_code(t.k, best)


def verify_iff_theorems(k: int, config: WorkbenchConfig | None = None) -> TheoremReport:
    """Cross-check the definition of maximality against construction, block structure,
    transformation and the acyclic-subset bound."""
    config = config or WorkbenchConfig()
    catalog = classify_all(k, config.max_exhaustive_k)
    on_reps = k >= _REPRESENTATIVES_FROM
    maximal = set(catalog.codes(catalog.maximal))

    checks = [
        _check_construction(k, maximal),
        _check_blocks(catalog, on_reps),
        _check_fixpoints(catalog, on_reps, config.search_limit),
        _check_totality(catalog, on_reps, config.search_limit),
        _check_converse(catalog, config.max_acyclic_k),
        _check_orbits(catalog),
    ]
    for check in checks:
        if not check.passed:
            logger.warning("k = %d: %s failed on %d matrices", k, check.name, len(check.mismatches))

    return TheoremReport(
        k=k,
        total=len(catalog),
        dof_optimal=int(np.count_nonzero(catalog.dof_optimal)),
        maximal=len(maximal),
        orbits=catalog.orbits,
        checks=tuple(checks),
    )


def _grid(k: int, code: int) -> str:
    return TopologyMatrix.from_code(k, code).one_line()


def _scope(on_reps: bool) -> str:
    return "orbit representatives only" if on_reps else "every matrix"


def _check_construction(k: int, maximal: set[int]) -> TheoremCheck:
    constructed = set()
    for n in range(1, max_alliances(k) + 1):
        for spec in enumerate_specs(k, n):
            constructed.add(derive_topology(spec).code)
    mismatches = tuple(_grid(k, c) for c in sorted(maximal ^ constructed))
    return TheoremCheck(
        name="definition-vs-construction",
        passed=not mismatches,
        checked=len(maximal | constructed),
        mismatches=mismatches,
        detail=f"{len(constructed)} constructed, {len(maximal)} maximal by definition",
    )


def _check_blocks(catalog: Catalog, on_reps: bool) -> TheoremCheck:
    codes = catalog.codes(representatives=on_reps)
    mismatches = []
    for code in codes:
        t = TopologyMatrix.from_code(catalog.k, code)
        if is_mtm(t).is_maximal != bool(catalog.maximal[code]):
            mismatches.append(t.one_line())
    return TheoremCheck(
        name="definition-vs-blocks",
        passed=not mismatches,
        checked=len(codes),
        mismatches=tuple(mismatches),
        detail=_scope(on_reps),
    )


def _check_fixpoints(catalog: Catalog, on_reps: bool, search_limit: int) -> TheoremCheck:
    codes = catalog.codes(catalog.maximal, representatives=on_reps)
    mismatches = []
    for code in codes:
        t = TopologyMatrix.from_code(catalog.k, code)
        if transform_to_mtm(t, search_limit=search_limit) != t:
            mismatches.append(t.one_line())
    return TheoremCheck(
        name="transform-fixpoint",
        passed=not mismatches,
        checked=len(codes),
        mismatches=tuple(mismatches),
        detail=_scope(on_reps),
    )


def _check_totality(catalog: Catalog, on_reps: bool, search_limit: int) -> TheoremCheck:
    codes = catalog.codes(catalog.dof_optimal & ~catalog.maximal, representatives=on_reps)
    mismatches = []
    for code in codes:
        t = TopologyMatrix.from_code(catalog.k, code)
        try:
            out = transform_to_mtm(t, search_limit=search_limit)
        except WorkbenchError as e:
            logger.debug("transform failed on %s: %s", t.one_line(), e)
            mismatches.append(t.one_line())
            continue
        if not (out.dominates(t) and is_maximal_masks(out.masks) and is_mtm(out).is_maximal):
            mismatches.append(t.one_line())
    return TheoremCheck(
        name="transform-totality",
        passed=not mismatches,
        checked=len(codes),
        mismatches=tuple(mismatches),
        detail=_scope(on_reps),
    )


def _check_converse(catalog: Catalog, limit: int) -> TheoremCheck:
    if catalog.k == 1:
        return TheoremCheck(name="acyclic-bound", passed=True, detail="single user: nothing to bound")
    codes = catalog.codes(catalog.maximal, representatives=True)
    mismatches = []
    for code in codes:
        t = TopologyMatrix.from_code(catalog.k, code)
        if max_acyclic_subset(build_demand_graph(t), limit) != 2:
            mismatches.append(t.one_line())
    return TheoremCheck(name="acyclic-bound", passed=not mismatches, checked=len(codes), mismatches=tuple(mismatches))


def _check_orbits(catalog: Catalog) -> TheoremCheck:
    reps = catalog.codes(catalog.maximal, representatives=True)
    summed = int(sum(catalog.orbit_size[c] for c in reps))
    raw = int(np.count_nonzero(catalog.maximal))
    group = math.factorial(catalog.k)
    bad = tuple(_grid(catalog.k, c) for c in reps if group % int(catalog.orbit_size[c]))
    return TheoremCheck(
        name="orbit-sizes",
        passed=summed == raw and not bad,
        checked=len(reps),
        mismatches=bad,
        detail=f"{len(reps)} maximal classes covering {summed} of {raw} matrices",
    )


def verify_sampled(k: int, samples: int, seed: int = 0) -> TheoremReport:
    """Definition against block structure and construction on uniformly drawn matrices."""
    bits = k * (k - 1)
    if bits > _MAX_SAMPLED_BITS:
        raise SearchLimitError(f"sampled verification supports codes up to {_MAX_SAMPLED_BITS} bits, got {bits}")
    if samples < 1:
        raise WorkbenchError(f"sample count must be positive, got {samples}")

    rng = np.random.default_rng(seed)
    codes = rng.integers(0, 2**bits, size=samples, dtype=np.int64) if bits else np.zeros(samples, dtype=np.int64)

    block_mismatches, construction_mismatches = [], []
    optimal = maximal = 0
    for code in codes:
        masks = masks_from_code(k, int(code))
        dof_optimal = not has_internal_conflict(masks)
        is_maximal = dof_optimal and addable_link(masks) is None
        optimal += dof_optimal
        maximal += is_maximal

        t = TopologyMatrix.from_masks(masks)
        if is_mtm(t).is_maximal != is_maximal:
            block_mismatches.append(t.one_line())
        if is_maximal and derive_topology(spec_from_topology(t)) != t:
            construction_mismatches.append(t.one_line())

    return TheoremReport(
        k=k,
        total=samples,
        dof_optimal=optimal,
        maximal=maximal,
        checks=(
            TheoremCheck(
                name="definition-vs-blocks",
                passed=not block_mismatches,
                checked=samples,
                mismatches=tuple(block_mismatches),
            ),
            TheoremCheck(
                name="maximal-has-construction",
                passed=not construction_mismatches,
                checked=maximal,
                mismatches=tuple(construction_mismatches),
            ),
        ),
    )


def probe_converse(k: int, e_m: int, limit: int = 20) -> TheoremCheck:
    """Compare the acyclic-subset size with E_M + 1 on every uniform generalized spec."""
    seen: set[int] = set()
    mismatches = []
    for n in range(e_m + 1, k + 1):
        for spec in enumerate_generalized_specs(k, n, e_m):
            t = derive_generalized_topology(spec)
            if t.code in seen:
                continue
            seen.add(t.code)
            psi = max_acyclic_subset(build_demand_graph(t), limit)
            if psi != e_m + 1:
                logger.warning("acyclic subset of %d against E_M + 1 = %d on %s", psi, e_m + 1, t.one_line())
                mismatches.append(t.one_line())
    return TheoremCheck(
        name=f"converse-e{e_m}",
        passed=not mismatches,
        checked=len(seen),
        mismatches=tuple(mismatches),
        detail=f"{len(seen)} distinct topologies from uniform specs",
    )


def write_catalog_csv(catalog: Catalog, path: str, canonical_only: bool = False) -> int:
    """Write one row per topology (or per orbit); returns the row count."""
    k = catalog.k
    rows = 0
    with open(path, "w", newline="") as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(["matrix", "dof_optimal", "maximal", "alliance_count", "canonical"])
        for code in catalog.codes(representatives=canonical_only):
            count = int(catalog.alliance_count[code])
            writer.writerow(
                [
                    _bitstring(k, code),
                    int(catalog.dof_optimal[code]),
                    int(catalog.maximal[code]),
                    count if count > 0 else "",
                    _bitstring(k, int(catalog.canonical[code])),
                ]
            )
            rows += 1
    return rows


def _bitstring(k: int, code: int) -> str:
    """Full K x K grid, row-major."""
    return "".join(str((mask >> j) & 1) for mask in masks_from_code(k, code) for j in range(k))
