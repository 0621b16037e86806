from fractions import Fraction
from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator


class BeamformingPlan(BaseModel):
    """Per-alliance beamformers over `extension` slots and one sampled channel."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n_alliances: int = Field(ge=1)
    extension: int = Field(ge=1)
    vectors: np.ndarray
    channel: np.ndarray

    @model_validator(mode="after")
    def _check_shapes(self) -> Self:
        if self.vectors.shape != (self.n_alliances, self.extension):
            raise ValueError(f"vectors must be {self.n_alliances} x {self.extension}, got {self.vectors.shape}")
        if self.channel.ndim != 2 or self.channel.shape[0] != self.channel.shape[1]:
            raise ValueError("channel must be a square matrix")
        return self


class ReceiverDecode(BaseModel):
    model_config = ConfigDict(frozen=True)

    receiver: int
    separable: bool
    margin: float
    interference_dim: int


class DecodeReport(BaseModel):
    """Worst case per receiver over all trials. `dof` is None when any receiver failed."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    extension: int
    trials: int
    tol: float
    receivers: tuple[ReceiverDecode, ...]
    dof: Fraction | None

    @field_serializer("dof")
    def _dof_text(self, dof: Fraction | None) -> str | None:
        return None if dof is None else str(dof)

    @property
    def all_separable(self) -> bool:
        return all(r.separable for r in self.receivers)

    @property
    def worst_margin(self) -> float:
        return min((r.margin for r in self.receivers), default=1.0)

    @property
    def failing(self) -> list[int]:
        return [r.receiver for r in self.receivers if not r.separable]
