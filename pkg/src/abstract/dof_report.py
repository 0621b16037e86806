from fractions import Fraction
from typing import Self

from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator


class DemandGraph(BaseModel):
    """Edge (p, q): receiver p does not hear transmitter q."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    edges: frozenset[tuple[int, int]] = frozenset()

    @model_validator(mode="after")
    def _no_self_loops(self) -> Self:
        if any(p == q for p, q in self.edges):
            raise ValueError("demand graph must not contain self-loops")
        return self


class DofReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    e_max: int = Field(ge=0)
    dof_achievable: Fraction
    psi: int = Field(ge=1)
    dof_upper: Fraction
    tight: bool
    degenerate: bool = False

    @field_serializer("dof_achievable", "dof_upper")
    def _fraction_text(self, value: Fraction) -> str:
        return str(value)

    def describe(self) -> str:
        text = f"achievable {self.dof_achievable}, upper {self.dof_upper}, {'tight' if self.tight else 'not tight'}"
        if self.degenerate:
            text += " (degenerate single-user channel)"
        return text
