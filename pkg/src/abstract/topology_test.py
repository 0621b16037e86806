import pytest
from pydantic import ValidationError

from abstract.topology import TopologyMatrix, masks_from_code, parse_topology, serialize_topology
from abstract.errors import TopologyParseError


def test_parse_small_grids():
    assert parse_topology("11\n11") == TopologyMatrix.ones(2)
    assert parse_topology("10\n01\n") == TopologyMatrix.identity(2)
    cyclic = parse_topology("110\n011\n101")
    assert cyclic.heard_by(0) == [1]
    assert cyclic.heard_by(2) == [0]


def test_serialize():
    assert serialize_topology(TopologyMatrix.identity(2)) == "10\n01"
    assert serialize_topology(TopologyMatrix.ones(2)) == "11\n11"


def test_round_trip_all_three_user_topologies():
    for code in range(64):
        t = TopologyMatrix.from_code(3, code)
        assert parse_topology(serialize_topology(t)) == t
        assert t.code == code


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("11\n1", "line 2"),
        ("12\n11", "non-binary"),
        ("11\n10", "index 2"),
        ("", "empty"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(TopologyParseError, match=fragment):
        parse_topology(text)


def test_constructor_enforces_diagonal():
    with pytest.raises(ValidationError):
        TopologyMatrix(k=2, entries=((0, 1), (1, 1)))


def test_code_order_is_lexicographic():
    grids = sorted(serialize_topology(TopologyMatrix.from_code(3, c)) for c in range(64))
    assert grids == [serialize_topology(TopologyMatrix.from_code(3, c)) for c in range(64)]
    assert masks_from_code(2, 0b10) == [0b11, 0b10]


def test_link_helpers():
    base = TopologyMatrix.identity(3)
    linked = base.with_link(0, 2)
    assert linked.dominates(base)
    assert not base.dominates(linked)
    assert linked.added_links(base) == [(0, 2)]
    assert linked.one_line() == "101/010/001"
