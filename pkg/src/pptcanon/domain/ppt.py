from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy import linalg

from pptcanon import config
from pptcanon.domain.errors import NotHermitianError
from pptcanon.domain.tensor import (
    GENERATING_MASKS,
    NONTRIVIAL_MASKS,
    SubsystemMask,
    TripartiteState,
    frobenius,
    hermitian_part,
    partial_transpose,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MaskVerdict:
    mask: SubsystemMask
    min_eigenvalue: float
    passed: bool


@dataclass(frozen=True)
class PptReport:
    state_min_eigenvalue: float
    state_psd: bool
    entries: tuple[MaskVerdict, ...]
    overall_ppt: bool
    tol_used: float

    def entry(self, mask: SubsystemMask | str) -> MaskVerdict:
        if isinstance(mask, str):
            mask = SubsystemMask.fromLabel(mask)
        for e in self.entries:
            if e.mask == mask:
                return e
        raise KeyError(mask.label)

    @property
    def failed_masks(self) -> list[str]:
        return [e.mask.label for e in self.entries if not e.passed]


def is_psd(
    X: npt.ArrayLike,
    tol: float,
    *,
    herm_tol: float = config.HERM_TOL,
) -> tuple[bool, float]:
    """Return ``(X >= -tol, smallest eigenvalue)`` for a Hermitian matrix ``X``."""
    arr = np.asarray(X, dtype=np.complex128)
    scale = max(frobenius(arr), np.finfo(float).tiny)
    if frobenius(arr - arr.conj().T) > herm_tol * scale:
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    lowest = float(linalg.eigvalsh(hermitian_part(arr), subset_by_index=[0, 0])[0])
    return lowest >= -tol, lowest


def default_tol(state: TripartiteState) -> float:
    return config.PPT_RTOL * abs(state.trace)


def ppt_report(state: TripartiteState, tol: float | None = None) -> PptReport:
    if tol is None:
        tol = default_tol(state)

    state_psd, state_min = is_psd(state.rho, tol)
    entries = []
    for mask in NONTRIVIAL_MASKS:
        ok, lowest = is_psd(partial_transpose(state, mask), tol)
        logger.debug("mask %s: min eigenvalue %.3e (%s)", mask.label, lowest, "pass" if ok else "fail")
        entries.append(MaskVerdict(mask=mask, min_eigenvalue=lowest, passed=ok))

    # spectrum(rho^{t_m}) == spectrum(rho^{t_complement(m)}), so {A}, {B}, {C} decide.
    generating = [e for e in entries if e.mask in GENERATING_MASKS]
    overall = state_psd and all(e.passed for e in generating)
    return PptReport(
        state_min_eigenvalue=state_min,
        state_psd=state_psd,
        entries=tuple(entries),
        overall_ppt=overall,
        tol_used=tol,
    )
