from __future__ import annotations

from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field, model_validator

from pptcanon.config import SCHEMA_VERSION

FiniteFloat = Annotated[float, Field(allow_inf_nan=False)]
ComplexPair = tuple[FiniteFloat, FiniteFloat]
VectorDoc = list[ComplexPair]
MatrixDoc = list[list[ComplexPair]]
Dims = tuple[Annotated[int, Field(ge=2)], Annotated[int, Field(ge=2)], Annotated[int, Field(ge=1)]]


class _Doc(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _checkSquare(m: MatrixDoc, side: int, name: str) -> None:
    if len(m) != side or any(len(row) != side for row in m):
        raise ValueError(f"{name} must be {side}x{side}")


class StateFile(_Doc):
    schema_version: str = SCHEMA_VERSION
    dims: Dims
    matrix: MatrixDoc
    metadata: dict[str, str] | None = None

    @model_validator(mode="after")
    def _shape(self) -> StateFile:
        K, M, N = self.dims
        _checkSquare(self.matrix, K * M * N, "matrix")
        return self


class EnsembleTermDoc(_Doc):
    p: FiniteFloat
    vecA: VectorDoc
    vecB: VectorDoc
    vecC: VectorDoc


class EnsembleFile(_Doc):
    schema_version: str = SCHEMA_VERSION
    dims: Dims
    terms: list[EnsembleTermDoc]
    metadata: dict[str, str] | None = None

    @model_validator(mode="after")
    def _lengths(self) -> EnsembleFile:
        for i, t in enumerate(self.terms):
            for name, vec, d in (("vecA", t.vecA, self.dims[0]), ("vecB", t.vecB, self.dims[1]), ("vecC", t.vecC, self.dims[2])):
                if len(vec) != d:
                    raise ValueError(f"term {i} {name} has length {len(vec)}, expected {d}")
        return self


class DiagnosticsDoc(_Doc):
    delta_norm: FiniteFloat
    commutator_max: FiniteFloat
    reconstruction_residual: FiniteFloat
    kernel_residual_max: FiniteFloat
    corner_rank: int
    state_rank: int
    f_condition: FiniteFloat
    ill_conditioned: bool


class CanonicalFile(_Doc):
    schema_version: str = SCHEMA_VERSION
    dims: Dims
    A_list: list[MatrixDoc]
    B_list: list[MatrixDoc]
    F: MatrixDoc
    localU_A: MatrixDoc
    localU_B: MatrixDoc
    diagnostics: DiagnosticsDoc | None = None

    @model_validator(mode="after")
    def _shapes(self) -> CanonicalFile:
        K, M, N = self.dims
        if len(self.A_list) != M - 1 or len(self.B_list) != K - 1:
            raise ValueError(f"expected {M - 1} A generators and {K - 1} B generators")
        for G in (*self.A_list, *self.B_list, self.F):
            _checkSquare(G, N, "generator")
        _checkSquare(self.localU_A, K, "localU_A")
        _checkSquare(self.localU_B, M, "localU_B")
        return self


class MaskVerdictDoc(_Doc):
    mask: str
    min_eigenvalue: float
    passed: bool


class PptReportDoc(_Doc):
    state_min_eigenvalue: float
    state_psd: bool
    masks: list[MaskVerdictDoc]
    overall_ppt: bool
    tol_used: float


class DecomposeSummary(_Doc):
    terms: int
    weights: list[float]
    residual: float
    tol: float
    witness: str
    out: str
    diagnostics: DiagnosticsDoc


class VerifySummary(_Doc):
    residual: float
    passed: bool
    tol: float
    violations: list[str] = Field(default_factory=list)


class GenerateSummary(_Doc):
    kind: str
    dims: Dims
    out: str
    truth: str | None = None


class ErrorDoc(_Doc):
    error: str
    message: str
