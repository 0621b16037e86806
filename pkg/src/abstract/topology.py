from typing import Iterable, Self, Sequence

from pydantic import BaseModel, ConfigDict, Field, model_validator

from abstract.errors import TopologyParseError


class TopologyMatrix(BaseModel):
    """K x K connectivity between transmitters and receivers.

    `entries[i][j] == 1` iff receiver i hears transmitter j. Indices are 0-based;
    anything shown to a user adds one.
    """

    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    entries: tuple[tuple[int, ...], ...]

    @model_validator(mode="after")
    def _check_grid(self) -> Self:
        if len(self.entries) != self.k:
            raise ValueError(f"expected {self.k} rows, got {len(self.entries)}")
        for i, row in enumerate(self.entries):
            if len(row) != self.k:
                raise ValueError(f"row {i + 1} has {len(row)} entries, expected {self.k}")
            if any(v not in (0, 1) for v in row):
                raise ValueError(f"row {i + 1} holds a non-binary entry")
            if row[i] != 1:
                raise ValueError(f"direct link missing on the diagonal at index {i + 1}")
        return self

    @classmethod
    def identity(cls, k: int) -> Self:
        return cls(k=k, entries=tuple(tuple(int(i == j) for j in range(k)) for i in range(k)))

    @classmethod
    def ones(cls, k: int) -> Self:
        return cls(k=k, entries=tuple((1,) * k for _ in range(k)))

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]]) -> Self:
        entries = tuple(tuple(int(v) for v in row) for row in rows)
        return cls(k=len(entries), entries=entries)

    @classmethod
    def from_masks(cls, masks: Sequence[int]) -> Self:
        """Build from per-receiver bitmasks (bit j set iff the receiver hears transmitter j)."""
        k = len(masks)
        return cls(k=k, entries=tuple(tuple((m >> j) & 1 for j in range(k)) for m in masks))

    @classmethod
    def from_code(cls, k: int, code: int) -> Self:
        return cls.from_masks(masks_from_code(k, code))

    @property
    def masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << j for j, v in enumerate(row) if v) for row in self.entries)

    @property
    def code(self) -> int:
        """Row-major off-diagonal bitstring as an integer, first entry most significant."""
        return code_from_masks(self.masks)

    def heard_by(self, receiver: int) -> list[int]:
        """Transmitters other than its own that `receiver` hears."""
        return [j for j, v in enumerate(self.entries[receiver]) if v and j != receiver]

    def hearers_of(self, transmitter: int) -> list[int]:
        return [i for i in range(self.k) if i != transmitter and self.entries[i][transmitter]]

    def with_link(self, receiver: int, transmitter: int) -> Self:
        rows = [list(row) for row in self.entries]
        rows[receiver][transmitter] = 1
        return type(self).from_rows(rows)

    def dominates(self, other: "TopologyMatrix") -> bool:
        """True iff every link of `other` is also a link here."""
        if other.k != self.k:
            return False
        return all(a >= b for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb))

    def added_links(self, original: "TopologyMatrix") -> list[tuple[int, int]]:
        """(receiver, transmitter) pairs present here but absent from `original`."""
        return [
            (i, j)
            for i in range(self.k)
            for j in range(self.k)
            if self.entries[i][j] and not original.entries[i][j]
        ]

    def one_line(self) -> str:
        return "/".join("".join(str(v) for v in row) for row in self.entries)


def masks_from_code(k: int, code: int) -> list[int]:
    masks = [1 << i for i in range(k)]
    bit = k * (k - 1) - 1
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            if (code >> bit) & 1:
                masks[i] |= 1 << j
            bit -= 1
    return masks


def code_from_masks(masks: Sequence[int]) -> int:
    k = len(masks)
    code = 0
    for i in range(k):
        for j in range(k):
            if i != j:
                code = (code << 1) | ((masks[i] >> j) & 1)
    return code


def parse_topology(text: str) -> TopologyMatrix:
    """Read the K-line '0'/'1' grid format.

    Args:
        text (str): K lines of exactly K characters each, optionally newline-terminated

    Returns:
        TopologyMatrix: the parsed matrix
    """
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise TopologyParseError("empty topology")

    k = len(lines)
    rows: list[tuple[int, ...]] = []
    for i, line in enumerate(lines):
        if len(line) != k:
            raise TopologyParseError(f"line {i + 1} has {len(line)} characters, expected {k}")
        for j, ch in enumerate(line):
            if ch not in "01":
                raise TopologyParseError(f"non-binary character {ch!r} at row {i + 1}, column {j + 1}")
        if line[i] != "1":
            raise TopologyParseError(f"zero on the diagonal at index {i + 1}")
        rows.append(tuple(int(ch) for ch in line))

    return TopologyMatrix(k=k, entries=tuple(rows))


def serialize_topology(t: TopologyMatrix) -> str:
    return "\n".join("".join(str(v) for v in row) for row in t.entries)


def read_topology(path: str) -> TopologyMatrix:
    with open(path, "r", encoding="utf-8") as file:
        return parse_topology(file.read())


def write_topology(t: TopologyMatrix, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        file.write(serialize_topology(t) + "\n")
