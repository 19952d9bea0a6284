from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
from scipy import linalg

from pptcanon import config
from pptcanon.domain.canonical import (
    CanonicalForm,
    ExtractionDiagnostics,
    WitnessMode,
    canonicalize,
    commutator_max,
    commutator_scale,
)
from pptcanon.domain.errors import (
    CertificationFailure,
    CommutatorViolation,
    DegeneracyUnresolved,
    DimensionMismatch,
)
from pptcanon.domain.tensor import (
    ComplexMatrix,
    ComplexVector,
    TripartiteDims,
    TripartiteState,
    dagger,
    frobenius,
    hermitian_part,
    psd_sqrt,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EnsembleTerm:
    p: float
    vecA: ComplexVector
    vecB: ComplexVector
    vecC: ComplexVector


@dataclass(frozen=True, eq=False)
class SeparableEnsemble:
    dims: TripartiteDims
    terms: tuple[EnsembleTerm, ...]

    @property
    def weights(self) -> np.ndarray:
        return np.array([t.p for t in self.terms], dtype=float)


@dataclass(frozen=True, eq=False)
class EigenTable:
    U: ComplexMatrix
    values: ComplexMatrix  # one row per generator, column-aligned with U


@dataclass(frozen=True)
class EnsembleCheck:
    residual: float
    passed: bool
    violations: list[str] = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class Decomposition:
    ensemble: SeparableEnsemble
    canonical: CanonicalForm
    diagnostics: ExtractionDiagnostics
    table: EigenTable
    check: EnsembleCheck


def _hermitian_pieces(G: ComplexMatrix) -> tuple[ComplexMatrix, ComplexMatrix]:
    return hermitian_part(G), (G - dagger(G)) / 2j


def _offdiag_residual(U: ComplexMatrix, generators: list[ComplexMatrix]) -> float:
    worst = 0.0
    for G in generators:
        D = dagger(U) @ G @ U
        worst = max(worst, frobenius(D - np.diag(np.diag(D))))
    return worst


def _clusters(keys: np.ndarray, tol: float) -> list[list[int]]:
    """Group row indices of ``keys`` whose entries agree within ``tol``."""
    keys = keys.reshape(keys.shape[0], -1)
    groups: list[list[int]] = []
    for i in range(keys.shape[0]):
        for g in groups:
            if np.max(np.abs(keys[i] - keys[g[0]]), initial=0.0) <= tol:
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def _refine(V: ComplexMatrix, ops: list[ComplexMatrix], gap: float) -> ComplexMatrix:
    # Diagonalize each Hermitian op in turn inside the current degenerate subspace.
    if not ops or V.shape[1] == 1:
        return V
    w, Y = linalg.eigh(hermitian_part(dagger(V) @ ops[0] @ V))
    V = V @ Y
    out = V.copy()
    for g in _clusters(w, gap):
        if len(g) > 1:
            out[:, g] = _refine(V[:, g], ops[1:], gap)
    return out


def _fix_phases(U: ComplexMatrix) -> ComplexMatrix:
    idx = np.argmax(np.abs(U), axis=0)
    lead = U[idx, np.arange(U.shape[1])]
    return U * (np.abs(lead) / lead)


def simultaneous_diagonalize(
    generators: list[npt.ArrayLike],
    tol: float = config.DIAG_TOL,
    seed: int = 0,
    *,
    size: int | None = None,
    tiebreak: ComplexMatrix | None = None,
    gap_tol: float = config.GAP_TOL,
    max_retries: int = config.SIMDIAG_MAX_RETRIES,
) -> EigenTable:
    """Common orthonormal eigenbasis of a commuting normal family.

    A random real combination of the Hermitian and anti-Hermitian parts is
    diagonalized; if the off-diagonal residual stays above ``tol`` after
    ``max_retries`` fresh combinations, degenerate eigenspaces are refined one
    operator at a time. Columns of a joint degenerate eigenspace are rotated to
    eigenvectors of ``tiebreak`` when given. Columns are phase-fixed so their
    largest-magnitude entry is real positive.
    """
    gens = [np.asarray(G, dtype=np.complex128) for G in generators]
    if not gens and size is None:
        raise ValueError("size is required for an empty generator family")
    n = gens[0].shape[0] if gens else int(size)  # type: ignore[arg-type]
    for G in gens:
        if G.shape != (n, n):
            raise DimensionMismatch(f"generator of shape {G.shape}, expected ({n}, {n})")

    scale = commutator_scale(gens)
    comm = commutator_max(gens)
    if comm > tol * scale:
        raise CommutatorViolation(f"family is not commuting and normal (residual {comm:.3e})")

    diag_tol = tol * np.sqrt(scale)
    pieces = [P for G in gens for P in _hermitian_pieces(G)]
    rng = np.random.default_rng(seed)
    U = np.eye(n, dtype=np.complex128)
    w = np.zeros(n)
    residual = 0.0
    for attempt in range(max_retries + 1):
        if not pieces:
            break
        coeffs = rng.standard_normal(len(pieces))
        H = sum(c * P for c, P in zip(coeffs, pieces))
        w, U = linalg.eigh(H)
        residual = _offdiag_residual(U, gens)
        if residual <= diag_tol:
            break
        logger.debug("simultaneous diagonalization retry %d, residual %.3e", attempt + 1, residual)
    else:
        logger.warning("random mixing left residual %.3e, refining degenerate blocks", residual)
        refined = U.copy()
        for g in _clusters(w, gap_tol * np.sqrt(scale)):
            if len(g) > 1:
                refined[:, g] = _refine(U[:, g], pieces, gap_tol * np.sqrt(scale))
        U = refined
        residual = _offdiag_residual(U, gens)
        if residual > diag_tol:
            raise DegeneracyUnresolved(f"off-diagonal residual {residual:.3e} after refinement")

    values = np.array([np.diag(dagger(U) @ G @ U) for G in gens]).reshape(len(gens), n)

    if tiebreak is not None:
        T = np.asarray(tiebreak, dtype=np.complex128)
        for g in _clusters(values.T, diag_tol):
            if len(g) > 1:
                _, Y = linalg.eigh(hermitian_part(dagger(U[:, g]) @ T @ U[:, g]))
                U[:, g] = U[:, g] @ Y
        values = np.array([np.diag(dagger(U) @ G @ U) for G in gens]).reshape(len(gens), n)

    U = _fix_phases(U)
    drift = frobenius(dagger(U) @ U - np.eye(n))
    if drift > config.UNIT_TOL * np.sqrt(n):
        raise DegeneracyUnresolved(f"common eigenbasis lost unitarity ({drift:.3e})")
    return EigenTable(U=U, values=values)


def canonical_ensemble(cf: CanonicalForm, table: EigenTable) -> SeparableEnsemble:
    """Product ensemble of ``cf`` from a common eigenbasis of its generators."""
    K, M, N = cf.dims.asTuple()
    sqrtF = psd_sqrt(cf.F)
    a_vals = table.values[: M - 1]
    b_vals = table.values[M - 1:]
    terms = []
    for n in range(N):
        vecA = np.append(np.conj(b_vals[:, n]), 1.0).astype(np.complex128)
        vecB = np.append(np.conj(a_vals[:, n]), 1.0).astype(np.complex128)
        vecC = sqrtF @ table.U[:, n]
        norms = [float(np.linalg.norm(v)) for v in (vecA, vecB, vecC)]
        p = float(np.prod(np.square(norms)))
        terms.append(
            EnsembleTerm(
                p=p,
                vecA=dagger(cf.localU_A) @ (vecA / norms[0]),
                vecB=dagger(cf.localU_B) @ (vecB / norms[1]),
                vecC=vecC / norms[2],
            )
        )
    return SeparableEnsemble(dims=cf.dims, terms=tuple(terms))


def reconstruct(ens: SeparableEnsemble) -> ComplexMatrix:
    """``sum_n p_n |a><a| x |b><b| x |c><c|``."""
    if not ens.terms:
        return np.zeros((ens.dims.total, ens.dims.total), dtype=np.complex128)
    psi = np.array([np.kron(np.kron(t.vecA, t.vecB), t.vecC) for t in ens.terms])
    p = ens.weights
    return (psi.T * p) @ psi.conj()


def verify_ensemble(
    state: TripartiteState,
    ens: SeparableEnsemble,
    tol: float = config.RECON_TOL,
) -> EnsembleCheck:
    if ens.dims != state.dims:
        raise DimensionMismatch(f"ensemble dims {ens.dims.asTuple()} differ from state dims {state.dims.asTuple()}")
    K, M, N = ens.dims.asTuple()
    violations = []
    for i, t in enumerate(ens.terms):
        for name, v, d in (("vecA", t.vecA, K), ("vecB", t.vecB, M), ("vecC", t.vecC, N)):
            if np.shape(v) != (d,):
                raise DimensionMismatch(f"term {i} {name} has shape {np.shape(v)}, expected ({d},)")
            norm = float(np.linalg.norm(v))
            if abs(norm - 1.0) > config.VEC_TOL:
                violations.append(f"term {i} {name} has norm {norm!r}")
        if not t.p > 0:
            violations.append(f"term {i} has non-positive weight {t.p!r}")
    total = float(np.sum(ens.weights))
    if abs(total - 1.0) > config.NORM_TOL:
        violations.append(f"weights sum to {total!r}, expected 1")

    scale = max(frobenius(state.rho), np.finfo(float).tiny)
    residual = frobenius(state.rho - reconstruct(ens)) / scale
    return EnsembleCheck(residual=residual, passed=residual <= tol and not violations, violations=violations)


def decompose_detailed(
    state: TripartiteState,
    tol: float = config.RECON_TOL,
    witness_mode: WitnessMode = "search",
    seed: int = 0,
    *,
    eA: npt.ArrayLike | None = None,
    fB: npt.ArrayLike | None = None,
    samples: int = config.WITNESS_SAMPLES,
    comm_tol: float = config.COMM_TOL,
    rank_tol: float | None = None,
) -> Decomposition:
    cf, diag = canonicalize(
        state, tol, witness_mode=witness_mode, seed=seed, samples=samples,
        eA=eA, fB=fB, comm_tol=comm_tol, rank_tol=rank_tol,
    )
    table = simultaneous_diagonalize(cf.generators, comm_tol, seed, size=state.dims.N, tiebreak=cf.F)
    ens = canonical_ensemble(cf, table)

    cert_tol = tol
    if diag.ill_conditioned:
        cert_tol = tol * np.sqrt(config.F_CONDITION_CAP / diag.f_condition)
        logger.warning("tightening certification tolerance to %.3e", cert_tol)
    check = verify_ensemble(state, ens, cert_tol)
    if not check.passed:
        detail = "; ".join(check.violations) or f"residual {check.residual:.3e} > {cert_tol:.3e}"
        raise CertificationFailure(f"ensemble does not certify the state: {detail}")
    logger.debug("certified %d-term ensemble, residual %.3e", len(ens.terms), check.residual)
    return Decomposition(ensemble=ens, canonical=cf, diagnostics=diag, table=table, check=check)


def decompose(
    state: TripartiteState,
    tol: float = config.RECON_TOL,
    witness_mode: WitnessMode = "search",
    seed: int = 0,
    *,
    eA: npt.ArrayLike | None = None,
    fB: npt.ArrayLike | None = None,
    samples: int = config.WITNESS_SAMPLES,
    comm_tol: float = config.COMM_TOL,
    rank_tol: float | None = None,
) -> SeparableEnsemble:
    """Certified separable decomposition of a rank-N PPT state.

    Raises :class:`NoWitness`, :class:`RankMismatch`, :class:`StructureViolation`
    or :class:`CertificationFailure`; an uncertified ensemble is never returned.
    """
    return decompose_detailed(
        state, tol, witness_mode, seed,
        eA=eA, fB=fB, samples=samples, comm_tol=comm_tol, rank_tol=rank_tol,
    ).ensemble
