import json
import os
from typing import Literal, Self

from pydantic import BaseModel, ConfigDict, Field, model_validator


class WorkbenchConfig(BaseModel):
    """Tunables shared by every command. Sources: defaults, JSON file, `TIM_*` environment, CLI flags."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int = 0
    trials: int = Field(default=10, ge=1)
    tol: float = Field(default=1e-9, gt=0)
    channel_low: float = Field(default=0.5, gt=0)
    channel_high: float = Field(default=2.0, gt=0)
    sampling_retries: int = Field(default=100, ge=1)
    max_exhaustive_k: int = Field(default=5, ge=1)
    max_acyclic_k: int = Field(default=20, ge=1)
    max_canonical_k: int = Field(default=8, ge=1)
    search_limit: int = Field(default=200_000, ge=1)
    strict_intersection: bool = False
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = "INFO"

    @model_validator(mode="after")
    def _check_channel_range(self) -> Self:
        if self.channel_high < self.channel_low:
            raise ValueError(f"channel_high {self.channel_high} is below channel_low {self.channel_low}")
        return self

    @classmethod
    def from_file(cls, file_path: str) -> Self:
        """Read config from file

        Args:
            file_path (str): Path to a JSON object with any subset of the fields

        Returns:
            Self: WorkbenchConfig
        """
        try:
            with open(file_path, "r") as file:
                json_data = json.load(file)
        except (FileNotFoundError, json.JSONDecodeError) as e:
            raise ValueError(f"Error reading file: {e}")

        try:
            return cls(**json_data)
        except Exception as e:
            raise ValueError(f"Error processing configuration: {e}")

    def with_env(self, prefix: str = "TIM_") -> Self:
        """Overlay `TIM_<FIELD>` environment variables. Call `dotenv.load_dotenv()` first."""
        updates = {}
        for name in type(self).model_fields:
            value = os.getenv(prefix + name.upper())
            if value is not None:
                updates[name] = value
        return self.with_overrides(**updates)

    def with_overrides(self, **updates) -> Self:
        merged = self.model_dump() | {k: v for k, v in updates.items() if v is not None}
        return type(self).model_validate(merged)
