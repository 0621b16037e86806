from typing import Literal, Self

from pydantic import BaseModel, ConfigDict, model_validator

from abstract.block_decomposition import BlockViolation


class Witness(BaseModel):
    """Why a verdict came out the way it did. Indices are 0-based."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["internal-conflict", "addable-link", "degenerate", "block-violation", "unclassified"]
    alignment_set: int | None = None
    messages: tuple[int, ...] = ()
    link: tuple[int, int] | None = None
    violations: tuple[BlockViolation, ...] = ()
    detail: str = ""

    def describe(self) -> str:
        match self.kind:
            case "internal-conflict":
                i, j = self.messages
                return f"internal conflict: receiver {i + 1} hears W{j + 1} in alignment set {self.alignment_set + 1}"
            case "addable-link":
                r, tx = self.link
                return f"link from transmitter {tx + 1} to receiver {r + 1} can be added"
            case "degenerate":
                return "degenerate single-user channel"
            case "block-violation":
                return "; ".join(v.describe() for v in self.violations)
            case _:
                return self.detail or "no alliance structure explains this topology"


class MaximalityVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    is_dof_optimal: bool
    is_maximal: bool
    witness: Witness | None = None

    @model_validator(mode="after")
    def _maximal_needs_optimal(self) -> Self:
        if self.is_maximal and not self.is_dof_optimal:
            raise ValueError("a maximal topology must be DoF-optimal")
        return self
