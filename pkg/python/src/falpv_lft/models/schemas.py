from typing import Annotated, Any, Literal, Union

from pydantic import BaseModel, ConfigDict, Field

from falpv_lft.models.models import (
    AssembledLft,
    FalpvDims,
    FalpvModel,
    LftModel,
    MinimalityVerdict,
    PsiRealization,
    PsiTaylor,
    Signals,
    Trajectory,
)
from falpv_lft.models.types import Matrix


class FalpvFile(BaseModel):
    kind: Literal["falpv"] = "falpv"
    dims: FalpvDims
    system: FalpvModel

    def model_post_init(self, __context: Any) -> None:
        if self.dims != self.system.dims:
            raise ValueError(f"Declared dims {self.dims} do not match the matrices {self.system.dims}")


class LftFile(BaseModel):
    kind: Literal["lft"] = "lft"
    blocks: tuple[int, ...]
    p_out: int
    m_in: int
    lft: LftModel
    provenance: FalpvDims | None = None
    scheduling_scale: float = 1.0

    def model_post_init(self, __context: Any) -> None:
        if self.blocks != self.lft.blocks.dims or (self.p_out, self.m_in) != (self.lft.p_out, self.lft.m_in):
            raise ValueError("Declared block structure or signature does not match the matrices")
        if self.provenance is not None:
            self.assembled()

    @classmethod
    def of(cls, lft: LftModel, assembled: AssembledLft | None = None) -> "LftFile":
        return cls(
            blocks=lft.blocks.dims,
            p_out=lft.p_out,
            m_in=lft.m_in,
            lft=lft,
            provenance=assembled.provenance if assembled else None,
            scheduling_scale=assembled.scheduling_scale if assembled else 1.0,
        )

    def assembled(self) -> AssembledLft:
        if self.provenance is None:
            raise ValueError("This LFT carries no FALPV provenance")
        return AssembledLft(lft=self.lft, provenance=self.provenance, scheduling_scale=self.scheduling_scale)


class PsiRealizationFile(BaseModel):
    kind: Literal["psi-realization"] = "psi-realization"
    n_psi: int
    n_p: int
    blocks: tuple[int, ...]
    realization: PsiRealization
    expressions: list[str] | None = None

    def model_post_init(self, __context: Any) -> None:
        realization = self.realization
        if (self.n_psi, self.n_p, self.blocks) != (realization.n_psi, realization.n_p, realization.lft.blocks.dims):
            raise ValueError("Declared dims do not match the realization")
        if self.expressions is not None and len(self.expressions) != self.n_psi:
            raise ValueError(f"Expected {self.n_psi} expressions, got {len(self.expressions)}")


class PsiTaylorFile(BaseModel):
    kind: Literal["psi-taylor"] = "psi-taylor"
    n_psi: int
    n_p: int
    taylor: PsiTaylor
    expressions: list[str] | None = None

    def model_post_init(self, __context: Any) -> None:
        if (self.n_psi, self.n_p) != (self.taylor.n_psi, self.taylor.n_p):
            raise ValueError("Declared dims do not match the Taylor data")
        if self.expressions is not None and len(self.expressions) != self.n_psi:
            raise ValueError(f"Expected {self.n_psi} expressions, got {len(self.expressions)}")


class SignalsFile(BaseModel):
    kind: Literal["signals"] = "signals"
    n_u: int
    n_p: int
    signals: Signals

    def model_post_init(self, __context: Any) -> None:
        if (self.n_u, self.n_p) != (self.signals.u.shape[1], self.signals.p.shape[1]):
            raise ValueError("Declared dims do not match the signals")


class TrajectoryFile(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: Literal["trajectory"] = "trajectory"
    source: Literal["falpv", "lft"]
    trajectory: Trajectory
    z: Matrix | None = None


ModelFile = Annotated[
    Union[FalpvFile, LftFile, PsiRealizationFile, PsiTaylorFile, SignalsFile, TrajectoryFile],
    Field(discriminator="kind"),
]


class RealizationReport(BaseModel):
    n_psi: int
    n_p: int
    order_bound: int | None = None
    depth: int | None = None
    hankel_rank: int | None = None
    blocks: tuple[int, ...]
    minimality: MinimalityVerdict
    scheduling_scale: float
    margin: float | None
    certificate_method: str | None


class FastPathReport(BaseModel):
    rank: int
    blocks: tuple[int, ...]
    agrees: bool
    separating_word: list[int] | None = None
    minimality: MinimalityVerdict


class VerificationSummary(BaseModel):
    series_depth: int
    series_max_error: float
    points: int
    point_max_error: float
    point_radius: float
    seed: int | None
    passed: bool


class TransformReport(BaseModel):
    dims: FalpvDims
    psi_source: Literal["realization", "taylor"]
    psi: RealizationReport
    lifted_blocks: tuple[int, ...]
    minimal_blocks: tuple[int, ...]
    assembled_blocks: tuple[int, ...]
    lifted_minimality: MinimalityVerdict
    minimal_minimality: MinimalityVerdict
    assembled_minimality: MinimalityVerdict
    coefficient_full_column_rank: bool | None = None
    lifted_margin: float
    minimal_margin: float | None
    fast_path: FastPathReport | None = None
    verification: VerificationSummary


class VerifyReport(BaseModel):
    """Errors are relative: each trial divides by ``max(1, max |y|)`` (``max(1, max |x|)`` for states)."""

    horizon: int
    trials: int
    seed: int | None
    tolerance: float
    tolerance_kind: Literal["relative"] = "relative"
    max_trajectory_error: float
    max_state_error: float
    words_checked: int
    first_failing_word: list[int] | None = None
    passed: bool


class CompareReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    depth: int
    equivalent: bool
    separating_word: list[int] | None = None
    both_minimal: bool
    similarity: list[Matrix] | None = None


class MinimizeReport(BaseModel):
    blocks_before: tuple[int, ...]
    blocks_after: tuple[int, ...]
    minimality: MinimalityVerdict
    equivalence_depth: int
    equivalent: bool


class StabilityReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    blocks: tuple[int, ...]
    certified: bool
    margin: float | None = None
    method: str | None = None
    P: list[Matrix] | None = None


class SimulationReport(BaseModel):
    source: Literal["falpv", "lft"]
    horizon: int
    seed: int | None
    max_abs_output: float


Report = Union[
    RealizationReport, TransformReport, VerifyReport, CompareReport, MinimizeReport, StabilityReport, SimulationReport
]

__all__ = [
    "CompareReport",
    "FalpvFile",
    "FastPathReport",
    "LftFile",
    "MinimizeReport",
    "ModelFile",
    "PsiRealizationFile",
    "PsiTaylorFile",
    "RealizationReport",
    "Report",
    "SignalsFile",
    "SimulationReport",
    "StabilityReport",
    "TrajectoryFile",
    "TransformReport",
    "VerificationSummary",
    "VerifyReport",
]
