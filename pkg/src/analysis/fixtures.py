"""Worked topologies and specs rebuilt from their textual alliance descriptions.

Rows are receivers: row i lists which transmitters receiver i hears.
"""

from abstract.alliance_spec import (
    Alliance,
    AllianceSpec,
    GeneralizedAlliance,
    GeneralizedAllianceSpec,
    GeneralizedSubAlliance,
)
from abstract.topology import TopologyMatrix, parse_topology


def grid(*rows: str) -> TopologyMatrix:
    return parse_topology("\n".join(rows))


# two alliances {W1, W2} and {W3, W4}, mutually hostile
TWO_BY_TWO = grid("1011", "0111", "1110", "1101")

# alliances {W1, W2, W3} and {W4}
THREE_PLUS_ONE = grid("1001", "0101", "0011", "1111")

CYCLIC_3 = grid("110", "011", "101")
CYCLIC_3_REVERSED = grid("101", "110", "011")

SIX_USER = grid("101100", "010011", "111000", "000111", "110010", "001101")

# receiver 4 hears W5 inside alignment set {W4, W5}
SIX_USER_CONFLICT = grid("100001", "010001", "001001", "000110", "111010", "000111")

EIGHT_USER = grid(
    "11010000",
    "01000001",
    "00100001",
    "00010000",
    "10101010",
    "00000101",
    "00001110",
    "10100001",
)
EIGHT_USER_MERGED = grid(
    "11011100",
    "01000001",
    "00100001",
    "10110010",
    "10101010",
    "00000101",
    "01011110",
    "10100011",
)
EIGHT_USER_LINKED = grid(
    "11010000",
    "01000001",
    "00100001",
    "00011100",
    "10101010",
    "00000101",
    "00001110",
    "10100011",
)

NINE_USER = grid(
    "100011100",
    "010011100",
    "001000011",
    "000100011",
    "111110000",
    "111101000",
    "000000111",
    "111100010",
    "000011101",
)
# receiver 6 also hears {W8, W9}
NINE_USER_DOUBLE = grid(
    "100011100",
    "010011100",
    "001000011",
    "000100011",
    "111110000",
    "111101011",
    "000000111",
    "111100010",
    "000011101",
)

FIVE_USER_UNSORTED = grid("10000", "01000", "00100", "10110", "01001")

SEVEN_USER_DOF_THIRD = grid("1011110", "0100111", "1110001", "0001111", "1111100", "0011011", "1111001")
SEVEN_USER_SPARSE = grid("1011110", "0100110", "1110001", "0001001", "1111100", "0011011", "1100001")


def two_by_two_spec() -> AllianceSpec:
    return AllianceSpec(
        k=4,
        alliances=(
            Alliance(suballiances={1: (0, 1)}),
            Alliance(suballiances={0: (2, 3)}),
        ),
    )


def three_plus_one_spec() -> AllianceSpec:
    return AllianceSpec(
        k=4,
        alliances=(
            Alliance(suballiances={1: (0, 1, 2)}),
            Alliance(suballiances={0: (3,)}),
        ),
    )


def cyclic_spec() -> AllianceSpec:
    return AllianceSpec(
        k=3,
        alliances=(
            Alliance(suballiances={1: (0,)}),
            Alliance(suballiances={2: (1,)}),
            Alliance(suballiances={0: (2,)}),
        ),
    )


def six_user_spec() -> AllianceSpec:
    return AllianceSpec(
        k=6,
        alliances=(
            Alliance(suballiances={1: (0,), 2: (1,)}),
            Alliance(suballiances={0: (2,), 2: (3,)}),
            Alliance(suballiances={0: (4,), 1: (5,)}),
        ),
    )


def single_user_spec() -> AllianceSpec:
    return AllianceSpec(k=1, alliances=(Alliance(unassigned=(0,)),))


def seven_user_spec() -> GeneralizedAllianceSpec:
    """Four alliances, every sub-alliance interfered by exactly two of them."""

    def sub(messages: tuple[int, ...], interferers: tuple[int, ...]) -> GeneralizedSubAlliance:
        return GeneralizedSubAlliance(messages=messages, interferers=interferers)

    return GeneralizedAllianceSpec(
        k=7,
        alliances=(
            GeneralizedAlliance(suballiances=(sub((0,), (1, 2)), sub((1,), (2, 3)))),
            GeneralizedAlliance(suballiances=(sub((2,), (0, 3)), sub((3,), (2, 3)))),
            GeneralizedAlliance(suballiances=(sub((4,), (0, 1)), sub((5,), (1, 3)))),
            GeneralizedAlliance(suballiances=(sub((6,), (0, 1)),)),
        ),
    )


def fully_connected_spec() -> GeneralizedAllianceSpec:
    return GeneralizedAllianceSpec(
        k=3,
        alliances=tuple(
            GeneralizedAlliance(
                suballiances=(GeneralizedSubAlliance(messages=(i,), interferers=tuple(j for j in range(3) if j != i)),)
            )
            for i in range(3)
        ),
    )
