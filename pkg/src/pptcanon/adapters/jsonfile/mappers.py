from __future__ import annotations

import numpy as np
import numpy.typing as npt

from pptcanon.adapters.jsonfile.models import (
    CanonicalFile,
    DiagnosticsDoc,
    EnsembleFile,
    EnsembleTermDoc,
    MaskVerdictDoc,
    MatrixDoc,
    PptReportDoc,
    StateFile,
    VectorDoc,
)
from pptcanon.domain.canonical import CanonicalForm, ExtractionDiagnostics
from pptcanon.domain.decompose import EnsembleTerm, SeparableEnsemble
from pptcanon.domain.ppt import PptReport
from pptcanon.domain.tensor import ComplexMatrix, TripartiteDims, TripartiteState


def toPairs(X: npt.ArrayLike) -> list:
    """Complex array to nested ``[re, im]`` lists of Python floats."""
    arr = np.asarray(X, dtype=np.complex128)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def fromPairs(doc: VectorDoc | MatrixDoc) -> np.ndarray:
    # view, not arithmetic: signed zeros survive
    arr = np.ascontiguousarray(doc, dtype=np.float64)
    return arr.view(np.complex128)[..., 0]


def toDomainState(f: StateFile, *, require_normalized: bool = True) -> TripartiteState:
    return TripartiteState(TripartiteDims(*f.dims), fromPairs(f.matrix), require_normalized)


def fromDomainState(state: TripartiteState, metadata: dict[str, str] | None = None) -> StateFile:
    return StateFile(dims=state.dims.asTuple(), matrix=toPairs(state.rho), metadata=metadata)


def toDomainEnsemble(f: EnsembleFile) -> SeparableEnsemble:
    terms = tuple(
        EnsembleTerm(p=t.p, vecA=fromPairs(t.vecA), vecB=fromPairs(t.vecB), vecC=fromPairs(t.vecC))
        for t in f.terms
    )
    return SeparableEnsemble(dims=TripartiteDims(*f.dims), terms=terms)


def fromDomainEnsemble(ens: SeparableEnsemble, metadata: dict[str, str] | None = None) -> EnsembleFile:
    terms = [
        EnsembleTermDoc(p=float(t.p), vecA=toPairs(t.vecA), vecB=toPairs(t.vecB), vecC=toPairs(t.vecC))
        for t in ens.terms
    ]
    return EnsembleFile(dims=ens.dims.asTuple(), terms=terms, metadata=metadata)


def fromDiagnostics(d: ExtractionDiagnostics) -> DiagnosticsDoc:
    return DiagnosticsDoc(
        delta_norm=d.delta_norm,
        commutator_max=d.commutator_max,
        reconstruction_residual=d.reconstruction_residual,
        kernel_residual_max=d.kernel_residual_max,
        corner_rank=d.corner_rank,
        state_rank=d.state_rank,
        # inf is not representable in the file format
        f_condition=min(d.f_condition, np.finfo(float).max),
        ill_conditioned=d.ill_conditioned,
    )


def fromDomainCanonical(cf: CanonicalForm, diagnostics: ExtractionDiagnostics | None = None) -> CanonicalFile:
    return CanonicalFile(
        dims=cf.dims.asTuple(),
        A_list=[toPairs(G) for G in cf.A_list],
        B_list=[toPairs(G) for G in cf.B_list],
        F=toPairs(cf.F),
        localU_A=toPairs(cf.localU_A),
        localU_B=toPairs(cf.localU_B),
        diagnostics=fromDiagnostics(diagnostics) if diagnostics is not None else None,
    )


def toDomainCanonical(f: CanonicalFile) -> CanonicalForm:
    def mat(doc: MatrixDoc) -> ComplexMatrix:
        return fromPairs(doc).reshape(len(doc), len(doc))

    return CanonicalForm(
        dims=TripartiteDims(*f.dims),
        A_list=tuple(mat(G) for G in f.A_list),
        B_list=tuple(mat(G) for G in f.B_list),
        F=mat(f.F),
        localU_A=mat(f.localU_A),
        localU_B=mat(f.localU_B),
    )


def fromPptReport(r: PptReport) -> PptReportDoc:
    return PptReportDoc(
        state_min_eigenvalue=r.state_min_eigenvalue,
        state_psd=r.state_psd,
        masks=[MaskVerdictDoc(mask=e.mask.label, min_eigenvalue=e.min_eigenvalue, passed=e.passed) for e in r.entries],
        overall_ppt=r.overall_ppt,
        tol_used=r.tol_used,
    )
