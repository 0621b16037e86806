from typing import Literal, Self, Sequence

from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from abstract.errors import PermutationError


class Permutation(BaseModel):
    """Message relabeling: `mapping[i]` is the new index of message i."""

    model_config = ConfigDict(frozen=True)

    mapping: tuple[int, ...]

    @model_validator(mode="after")
    def _check_bijective(self) -> Self:
        if sorted(self.mapping) != list(range(len(self.mapping))):
            raise ValueError(f"mapping {[m + 1 for m in self.mapping]} is not a bijection")
        return self

    @classmethod
    def from_sequence(cls, values: Sequence[int]) -> Self:
        try:
            return cls(mapping=tuple(values))
        except ValidationError as e:
            raise PermutationError(f"not a permutation of 1..{len(values)}") from e

    @classmethod
    def identity(cls, k: int) -> Self:
        return cls(mapping=tuple(range(k)))

    @classmethod
    def from_order(cls, order: Sequence[int]) -> Self:
        """The permutation that places message `order[pos]` at position `pos`."""
        mapping = [0] * len(order)
        for pos, message in enumerate(order):
            mapping[message] = pos
        return cls.from_sequence(mapping)

    @property
    def k(self) -> int:
        return len(self.mapping)

    @property
    def is_identity(self) -> bool:
        return all(i == m for i, m in enumerate(self.mapping))

    def inverse(self) -> "Permutation":
        inverse = [0] * self.k
        for i, m in enumerate(self.mapping):
            inverse[m] = i
        return Permutation(mapping=tuple(inverse))


class BlockViolation(BaseModel):
    """One defect in the block structure. Message and block indices are 0-based."""

    model_config = ConfigDict(frozen=True)

    kind: Literal[
        "non-identity-block",
        "incomplete-interference-block",
        "column-block-count",
        "uncovered-pair",
        "silent-alliance",
    ]
    blocks: tuple[int, ...] = ()
    receiver: int | None = None
    messages: tuple[int, ...] = ()
    count: int | None = None
    expected: int | None = None

    def describe(self) -> str:
        ms = "{" + ", ".join(f"W{m + 1}" for m in self.messages) + "}"
        match self.kind:
            case "non-identity-block":
                return f"non-identity block: receiver {self.receiver + 1} hears {ms} inside its own block"
            case "incomplete-interference-block":
                return f"incomplete interference block: column W{self.receiver + 1} hears only {ms} of its block"
            case "column-block-count":
                return (
                    f"column W{self.receiver + 1} carries {self.count} interference blocks "
                    f"(expected {self.expected}){' from ' + ms if self.messages else ''}"
                )
            case "uncovered-pair":
                a, b = self.blocks
                return f"blocks {a + 1} and {b + 1} share no interference block"
            case _:
                return f"block {self.blocks[0] + 1} {ms} interferes with no column"


class InterferenceBlock(BaseModel):
    """Column `receiver` hears every transmitter of block `source`."""

    model_config = ConfigDict(frozen=True)

    source: int
    receiver: int
    messages: tuple[int, ...]


class BlockDecomposition(BaseModel):
    model_config = ConfigDict(frozen=True)

    permutation: Permutation
    blocks: tuple[tuple[int, int], ...]
    units: tuple[tuple[int, ...], ...]
    interference_blocks: tuple[InterferenceBlock, ...]
    violations: tuple[BlockViolation, ...]

    @model_validator(mode="after")
    def _check_ranges(self) -> Self:
        position = 0
        for start, length in self.blocks:
            if start != position or length < 1:
                raise ValueError("blocks must be contiguous, disjoint and non-empty")
            position += length
        if position != self.permutation.k:
            raise ValueError("blocks must cover every index")
        return self
