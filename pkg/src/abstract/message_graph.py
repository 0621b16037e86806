from typing import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator


class MessageGraph(BaseModel):
    """Alignment and conflict edges between messages.

    `alignment_edges` holds unordered pairs as (low, high). A conflict edge (i, j)
    means receiver i hears transmitter j.
    """

    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    alignment_edges: frozenset[tuple[int, int]] = frozenset()
    conflict_edges: frozenset[tuple[int, int]] = frozenset()

    @model_validator(mode="after")
    def _check_edges(self) -> Self:
        for i, j in self.alignment_edges:
            if i == j:
                raise ValueError(f"alignment self-loop on message {i + 1}")
            if not (0 <= i < j < self.k):
                raise ValueError(f"alignment edge ({i + 1}, {j + 1}) out of order or range")
        for i, j in self.conflict_edges:
            if i == j:
                raise ValueError(f"conflict self-loop on message {i + 1}")
            if not (0 <= i < self.k and 0 <= j < self.k):
                raise ValueError(f"conflict edge ({i + 1}, {j + 1}) out of range")
        return self


class AlignmentPartition(BaseModel):
    """Alignment sets, each sorted, ordered by smallest member."""

    model_config = ConfigDict(frozen=True)

    sets: tuple[tuple[int, ...], ...]

    @model_validator(mode="after")
    def _check_partition(self) -> Self:
        seen = [m for s in self.sets for m in s]
        if any(not s for s in self.sets):
            raise ValueError("alignment sets must be non-empty")
        if sorted(seen) != list(range(len(seen))):
            raise ValueError("alignment sets must be disjoint and cover every message")
        return self

    @property
    def k(self) -> int:
        return sum(len(s) for s in self.sets)

    def set_of(self, message: int) -> int:
        for index, members in enumerate(self.sets):
            if message in members:
                return index
        raise KeyError(message)
