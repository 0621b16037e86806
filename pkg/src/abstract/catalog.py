from typing import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from abstract.topology import TopologyMatrix


class CatalogEntry(BaseModel):
    """One enumerated topology with its verdicts and relabeling class."""

    model_config = ConfigDict(frozen=True)

    matrix: TopologyMatrix
    canonical_form: TopologyMatrix
    dof_optimal: bool
    maximal: bool
    alliance_count: int | None = None
    orbit_size: int = Field(ge=1)

    @model_validator(mode="after")
    def _maximal_needs_optimal(self) -> Self:
        if self.maximal and not self.dof_optimal:
            raise ValueError("a maximal topology must be DoF-optimal")
        return self


class TheoremCheck(BaseModel):
    """One set comparison. `mismatches` holds one-line grids of the offending matrices."""

    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    checked: int = 0
    mismatches: tuple[str, ...] = ()
    detail: str = ""


class TheoremReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int
    total: int
    dof_optimal: int
    maximal: int
    orbits: int | None = None
    checks: tuple[TheoremCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def describe(self) -> str:
        head = f"{self.maximal} maximal / {self.total} total"
        if self.passed:
            return f"{head}, all iff checks pass"
        failed = ", ".join(c.name for c in self.checks if not c.passed)
        return f"{head}, failed: {failed}"
