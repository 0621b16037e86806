import itertools
import random

import pytest

from abstract.block_decomposition import Permutation
from abstract.errors import InternalConflictError, NotCanonicalError, PermutationError
from abstract.topology import TopologyMatrix
from analysis import fixtures
from analysis.alliance_construction import derive_topology
from analysis.graph_analysis import is_dof_half_optimal, is_maximal_by_definition
from analysis.matrix_analysis import (
    apply_permutation,
    canonicalize,
    find_blocks,
    interference_classes,
    is_mtm,
    render_blocks,
    transform_to_mtm,
)


def kinds(t: TopologyMatrix) -> set[str]:
    return {v.kind for v in is_mtm(t).witness.violations}


def test_identity_permutation_changes_nothing():
    t = fixtures.NINE_USER
    assert apply_permutation(t, Permutation.identity(9)) == t


def test_permutation_then_inverse():
    rng = random.Random(7)
    for t in (fixtures.SIX_USER, fixtures.EIGHT_USER, fixtures.SEVEN_USER_SPARSE):
        mapping = list(range(t.k))
        rng.shuffle(mapping)
        p = Permutation.from_sequence(mapping)
        assert apply_permutation(apply_permutation(t, p), p.inverse()) == t


def test_bad_permutations():
    with pytest.raises(PermutationError):
        Permutation.from_sequence([0, 0, 1])
    with pytest.raises(PermutationError):
        apply_permutation(TopologyMatrix.identity(3), Permutation.identity(2))


def test_swap_brings_aligned_messages_together():
    swap = Permutation.from_sequence([0, 2, 1, 3, 4])
    swapped = apply_permutation(fixtures.FIVE_USER_UNSORTED, swap)
    assert swapped.heard_by(3) == [0, 1]

    canonical, p = canonicalize(fixtures.FIVE_USER_UNSORTED)
    assert p == swap
    assert canonical == swapped


def test_canonicalize_is_idempotent():
    for t in (fixtures.EIGHT_USER, fixtures.FIVE_USER_UNSORTED, fixtures.SIX_USER):
        canonical, _ = canonicalize(t)
        again, p = canonicalize(canonical)
        assert p.is_identity
        assert again == canonical
    _, p = canonicalize(fixtures.SIX_USER)
    assert p.is_identity


def test_find_blocks_flags_the_conflicting_range():
    d = find_blocks(fixtures.SIX_USER_CONFLICT)
    assert d.blocks == ((0, 3), (3, 2), (5, 1))
    non_identity = [v for v in d.violations if v.kind == "non-identity-block"]
    assert {v.blocks for v in non_identity} == {(1,)}
    assert non_identity[0].receiver == 3
    assert non_identity[0].messages == (4,)


def test_find_blocks_on_derived_topology():
    d = find_blocks(fixtures.TWO_BY_TWO)
    assert d.blocks == ((0, 2), (2, 2))
    assert d.violations == ()
    assert len(d.interference_blocks) == 4

    d = find_blocks(derive_topology(fixtures.six_user_spec()))
    assert [length for _, length in d.blocks] == [2, 2, 2]
    # one interference block per (sub-alliance message, hostile alliance)
    assert {(b.receiver, b.source) for b in d.interference_blocks} == {(0, 1), (1, 2), (2, 0), (3, 2), (4, 0), (5, 1)}


def test_find_blocks_identity():
    d = find_blocks(TopologyMatrix.identity(3))
    assert d.blocks == ((0, 1), (1, 1), (2, 1))
    assert d.interference_blocks == ()


def test_find_blocks_requires_canonical_order():
    with pytest.raises(NotCanonicalError):
        find_blocks(fixtures.FIVE_USER_UNSORTED)


def test_mtm_worked_examples():
    assert is_mtm(fixtures.NINE_USER).is_maximal
    assert is_mtm(fixtures.EIGHT_USER_MERGED).is_maximal
    assert is_mtm(fixtures.EIGHT_USER_LINKED).is_maximal
    assert is_mtm(TopologyMatrix.identity(1)).is_maximal


def test_column_with_two_interference_blocks():
    verdict = is_mtm(fixtures.NINE_USER_DOUBLE)
    assert not verdict.is_maximal
    counts = [v for v in verdict.witness.violations if v.kind == "column-block-count"]
    assert len(counts) == 1
    assert counts[0].receiver == 5
    assert counts[0].count == 2
    assert set(counts[0].messages) == {0, 1, 2, 3, 7, 8}


def test_identity_has_empty_columns():
    assert "column-block-count" in kinds(TopologyMatrix.identity(4))


def test_mtm_matches_definition_exhaustively():
    for k in (2, 3, 4):
        for code in range(2 ** (k * (k - 1))):
            t = TopologyMatrix.from_code(k, code)
            assert is_mtm(t).is_maximal == is_maximal_by_definition(t).is_maximal, t.one_line()


def test_verdicts_survive_relabeling():
    rng = random.Random(11)
    for t in (fixtures.NINE_USER, fixtures.NINE_USER_DOUBLE, fixtures.EIGHT_USER, fixtures.SIX_USER_CONFLICT):
        for _ in range(5):
            mapping = list(range(t.k))
            rng.shuffle(mapping)
            relabeled = apply_permutation(t, Permutation.from_sequence(mapping))
            assert is_mtm(relabeled).is_maximal == is_mtm(t).is_maximal
            assert is_maximal_by_definition(relabeled).is_maximal == is_maximal_by_definition(t).is_maximal


def test_interference_classes():
    assert interference_classes(fixtures.TWO_BY_TWO) == [(0, 1), (2, 3)]
    assert interference_classes(TopologyMatrix.identity(3)) == [(0, 1, 2)]


def test_transform_by_merging():
    assert transform_to_mtm(fixtures.EIGHT_USER, "merge") == fixtures.EIGHT_USER_MERGED


def test_transform_by_adding_links():
    assert transform_to_mtm(fixtures.EIGHT_USER, "add-links") == fixtures.EIGHT_USER_LINKED
    assert transform_to_mtm(fixtures.EIGHT_USER, "auto") == fixtures.EIGHT_USER_LINKED


def test_transform_leaves_maximal_topology_alone():
    for t in (fixtures.NINE_USER, fixtures.SIX_USER, TopologyMatrix.ones(2), TopologyMatrix.identity(1)):
        assert transform_to_mtm(t) == t


def test_transform_rejects_internal_conflict():
    with pytest.raises(InternalConflictError) as info:
        transform_to_mtm(fixtures.SIX_USER_CONFLICT)
    assert info.value.pair == (3, 4)


def test_transform_is_total_on_four_users():
    for code in range(4096):
        t = TopologyMatrix.from_code(4, code)
        if not is_dof_half_optimal(t):
            continue
        for strategy in ("merge", "auto"):
            out = transform_to_mtm(t, strategy)
            assert out.dominates(t)
            assert is_maximal_by_definition(out).is_maximal, t.one_line()
            assert transform_to_mtm(out, strategy) == out


def test_render_blocks_marks_boundaries():
    canonical, _ = canonicalize(fixtures.TWO_BY_TWO)
    text = render_blocks(find_blocks(canonical), canonical)
    lines = text.splitlines()
    assert lines[0].split() == ["1", "2", "|", "3", "4"]
    assert set(lines[3]) == {"-"}
    assert lines[1].startswith("W1")


def test_relabeled_grid_keeps_original_labels():
    canonical, p = canonicalize(fixtures.FIVE_USER_UNSORTED)
    d = find_blocks(canonical).model_copy(update={"permutation": p})
    header = render_blocks(d, fixtures.FIVE_USER_UNSORTED).splitlines()[0]
    assert header.split() == ["1", "3", "|", "2", "|", "4", "|", "5"]
    assert list(itertools.chain(*d.units)) == [0, 1, 2, 3, 4]
