from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt

from pptcanon import config
from pptcanon.domain.errors import NoWitness, NotPptError, RankMismatch, StructureViolation
from pptcanon.domain.ppt import ppt_report
from pptcanon.domain.tensor import (
    ComplexMatrix,
    ComplexVector,
    TripartiteDims,
    TripartiteState,
    block,
    block_of,
    check_unit,
    condition_number,
    dagger,
    frobenius,
    hermitian_part,
    local_conjugate,
    numeric_rank,
    psd_inv_sqrt,
    psd_sqrt,
    sandwich_AB,
)

logger = logging.getLogger(__name__)

WitnessMode = Literal["corner", "search", "explicit"]


@dataclass(frozen=True, eq=False)
class CanonicalForm:
    """Generators and filter of ``rho = sqrt(F) T^dag T sqrt(F)``.

    ``A_list[v]`` is attached to B-basis column ``v`` and ``B_list[u]`` to
    A-basis row ``u``; column ``M-1`` and row ``K-1`` carry the identity.
    ``sqrt(F)`` acts on subsystem C only.
    """

    dims: TripartiteDims
    A_list: tuple[ComplexMatrix, ...]
    B_list: tuple[ComplexMatrix, ...]
    F: ComplexMatrix
    localU_A: ComplexMatrix
    localU_B: ComplexMatrix

    @property
    def generators(self) -> list[ComplexMatrix]:
        return [*self.A_list, *self.B_list]

    def generatorA(self, v: int) -> ComplexMatrix:
        if v == self.dims.M - 1:
            return np.eye(self.dims.N, dtype=np.complex128)
        return self.A_list[v]

    def generatorB(self, u: int) -> ComplexMatrix:
        if u == self.dims.K - 1:
            return np.eye(self.dims.N, dtype=np.complex128)
        return self.B_list[u]

    def monomial(self, u: int, v: int) -> ComplexMatrix:
        return self.generatorB(u) @ self.generatorA(v)

    def row_operator(self) -> ComplexMatrix:
        """The ``N x KMN`` block row ``T`` of monomials in composite order."""
        K, M, _ = self.dims.asTuple()
        return np.hstack([self.monomial(u, v) for u in range(K) for v in range(M)])

    def filtered_matrix(self) -> ComplexMatrix:
        T = self.row_operator()
        return dagger(T) @ T

    def state_matrix(self) -> ComplexMatrix:
        return unfilter_matrix(self.filtered_matrix(), self.dims.N, psd_sqrt(self.F))


@dataclass(frozen=True)
class ExtractionDiagnostics:
    delta_norm: float
    commutator_max: float
    reconstruction_residual: float
    kernel_residual_max: float
    corner_rank: int
    state_rank: int
    f_condition: float
    ill_conditioned: bool


@dataclass(frozen=True, eq=False)
class ProductWitness:
    eA: ComplexVector
    fB: ComplexVector
    sandwich_rank: int


def filter_matrix(rho: ComplexMatrix, N: int, S: ComplexMatrix) -> ComplexMatrix:
    """Apply ``(I x I x S) rho (I x I x S)^dag`` on subsystem C."""
    nb = rho.shape[0] // N
    t = rho.reshape(nb, N, nb, N)
    out = np.einsum("ik,akbl,jl->aibj", S, t, S.conj())
    return hermitian_part(out.reshape(nb * N, nb * N))


def unfilter_matrix(rho_f: ComplexMatrix, N: int, sqrtF: ComplexMatrix) -> ComplexMatrix:
    return filter_matrix(rho_f, N, sqrtF)


def filter_state(state: TripartiteState, F: ComplexMatrix) -> TripartiteState:
    """``(I x I x F^{-1/2}) rho (I x I x F^{-1/2})``; the result is not trace-normalized."""
    rho_f = filter_matrix(state.rho, state.dims.N, psd_inv_sqrt(F))
    return TripartiteState(state.dims, rho_f, require_normalized=False)


def unfilter_state(filtered: TripartiteState, F: ComplexMatrix) -> TripartiteState:
    rho = unfilter_matrix(filtered.rho, filtered.dims.N, psd_sqrt(F))
    return TripartiteState(filtered.dims, rho, require_normalized=False)


def commutator_max(generators: list[ComplexMatrix]) -> float:
    """Largest ``||[G, H]||_F`` and ``||[G, H^dag]||_F`` over the family, normality included."""
    worst = 0.0
    for i, G in enumerate(generators):
        for H in generators[i:]:
            Hd = dagger(H)
            worst = max(worst, frobenius(G @ H - H @ G), frobenius(G @ Hd - Hd @ G))
    return worst


def commutator_scale(generators: list[ComplexMatrix]) -> float:
    if not generators:
        return 1.0
    return max(1.0, max(frobenius(G) for G in generators) ** 2)


def _unitary_to_last(e: ComplexVector) -> ComplexMatrix:
    """Unitary ``U`` with ``U @ e = |d-1>``."""
    d = e.size
    nz = np.flatnonzero(e)
    if nz.size == 1:
        i = int(nz[0])
        W = np.zeros((d, d), dtype=np.complex128)
        others = [j for j in range(d) if j != i]
        for col, j in enumerate(others):
            W[j, col] = 1.0
        W[:, d - 1] = e
        return dagger(W)
    pivot = int(np.argmax(np.abs(e)))
    X = np.column_stack([e] + [np.eye(d, dtype=np.complex128)[:, j] for j in range(d) if j != pivot])
    Q, R = np.linalg.qr(X)
    diag = np.diag(R)
    Q = Q * (diag / np.abs(diag))
    W = np.roll(Q, -1, axis=1)
    W[:, d - 1] = e
    return dagger(W)


def _haar_unit(rng: np.random.Generator, d: int) -> ComplexVector:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def _pair_witness(state: TripartiteState, eA, fB, rank_tol: float | None) -> ProductWitness:
    S = sandwich_AB(state, eA, fB)
    return ProductWitness(eA=np.asarray(eA, dtype=np.complex128), fB=np.asarray(fB, dtype=np.complex128),
                          sandwich_rank=numeric_rank(S, rank_tol))


def find_witness(
    state: TripartiteState,
    mode: WitnessMode = "corner",
    *,
    samples: int = config.WITNESS_SAMPLES,
    seed: int = 0,
    eA: npt.ArrayLike | None = None,
    fB: npt.ArrayLike | None = None,
    rank_tol: float | None = None,
) -> ProductWitness | None:
    """Find a product pair whose sandwich has rank ``N``.

    Corner mode tries the ``K*M`` computational pairs, starting at
    ``(|K-1>, |M-1>)`` so an input already in corner position needs no
    rotation. Search mode then samples Haar-random product pairs.
    """
    K, M, N = state.dims.asTuple()

    if mode == "explicit":
        if eA is None or fB is None:
            raise ValueError("explicit witness mode needs both eA and fB")
        w = _pair_witness(state, check_unit(eA, K, "eA"), check_unit(fB, M, "fB"), rank_tol)
        return w if w.sandwich_rank == N else None
    if mode not in ("corner", "search"):
        raise ValueError(f"unknown witness mode {mode!r}")

    eyeA, eyeB = np.eye(K, dtype=np.complex128), np.eye(M, dtype=np.complex128)
    for iA in reversed(range(K)):
        for iB in reversed(range(M)):
            w = _pair_witness(state, eyeA[iA], eyeB[iB], rank_tol)
            logger.debug("corner candidate (%d, %d): sandwich rank %d", iA, iB, w.sandwich_rank)
            if w.sandwich_rank == N:
                return w

    if mode == "search":
        rng = np.random.default_rng(seed)
        for n in range(samples):
            w = _pair_witness(state, _haar_unit(rng, K), _haar_unit(rng, M), rank_tol)
            if w.sandwich_rank == N:
                logger.debug("random witness found after %d samples", n + 1)
                return w
    return None


def rotate_to_corner(
    state: TripartiteState, w: ProductWitness
) -> tuple[TripartiteState, ComplexMatrix, ComplexMatrix]:
    K, M, _ = state.dims.asTuple()
    eA = check_unit(w.eA, K, "eA")
    fB = check_unit(w.fB, M, "fB")
    UA, UB = _unitary_to_last(eA), _unitary_to_last(fB)
    if np.array_equal(UA, np.eye(K)) and np.array_equal(UB, np.eye(M)):
        return state, UA, UB
    return local_conjugate(state, UA, UB), UA, UB


def kernel_residual_filtered(rho_f: ComplexMatrix, cf: CanonicalForm) -> float:
    K, M, N = cf.dims.asTuple()
    corner = K * M - 1
    cols = lambda b: rho_f[:, b * N:(b + 1) * N]  # noqa: E731
    worst = 0.0
    attached = [((K - 1) * M + v, G) for v, G in enumerate(cf.A_list)]
    attached += [(u * M + (M - 1), G) for u, G in enumerate(cf.B_list)]
    for b, G in attached:
        image = cols(b) - cols(corner) @ G
        psi_norms = np.sqrt(1.0 + np.linalg.norm(G, axis=0) ** 2)
        worst = max(worst, float(np.max(np.linalg.norm(image, axis=0) / psi_norms)))
    return worst


def verify_kernel_vectors(state: TripartiteState, cf: CanonicalForm) -> float:
    """Max of ``||rho_f Psi|| / ||Psi||`` over the kernel vectors implied by ``cf``."""
    rotated = local_conjugate(state, cf.localU_A, cf.localU_B)
    rho_f = filter_matrix(rotated.rho, cf.dims.N, psd_inv_sqrt(cf.F))
    return kernel_residual_filtered(rho_f, cf)


def extract_canonical(
    state: TripartiteState,
    tol: float = config.RECON_TOL,
    *,
    comm_tol: float = config.COMM_TOL,
    rank_tol: float | None = None,
    ppt_tol: float | None = None,
    localU_A: ComplexMatrix | None = None,
    localU_B: ComplexMatrix | None = None,
) -> tuple[CanonicalForm, ExtractionDiagnostics]:
    """Read the canonical form off a state whose corner block has rank ``N``.

    ``localU_A``/``localU_B`` record a rotation the caller already applied;
    they are stored on the form, not applied again.
    """
    dims = state.dims
    K, M, N = dims.asTuple()
    corner = dims.cornerBlock

    report = ppt_report(state, ppt_tol)
    if not report.overall_ppt:
        raise NotPptError(f"state is not PPT (failing masks: {', '.join(report.failed_masks) or 'rho'})")

    state_rank = numeric_rank(state.rho, rank_tol)
    if state_rank != N:
        raise RankMismatch(f"r(rho) = {state_rank}, expected N = {N}")
    F = hermitian_part(block(state, corner, corner))
    corner_rank = numeric_rank(F, rank_tol)
    if corner_rank != N:
        raise RankMismatch(f"corner block has rank {corner_rank}, expected N = {N}")

    f_condition = condition_number(F)
    ill = f_condition > config.F_CONDITION_CAP
    if ill:
        logger.warning("filter block is ill-conditioned (cond %.3e)", f_condition)

    rho_f = filter_matrix(state.rho, N, psd_inv_sqrt(F))
    A_list = tuple(block_of(rho_f, N, corner, (K - 1) * M + v) for v in range(M - 1))
    B_list = tuple(block_of(rho_f, N, corner, u * M + (M - 1)) for u in range(K - 1))
    cf = CanonicalForm(
        dims=dims,
        A_list=A_list,
        B_list=B_list,
        F=F,
        localU_A=np.eye(K, dtype=np.complex128) if localU_A is None else np.asarray(localU_A),
        localU_B=np.eye(M, dtype=np.complex128) if localU_B is None else np.asarray(localU_B),
    )

    T = cf.row_operator()
    scale_f = max(frobenius(rho_f), np.finfo(float).tiny)
    recon = frobenius(rho_f - dagger(T) @ T) / scale_f

    d = (K - 2) * M + (M - 2)
    Td = cf.monomial(K - 2, M - 2)
    delta = frobenius(block_of(rho_f, N, d, d) - dagger(Td) @ Td)

    comm = commutator_max(cf.generators)
    kernel = kernel_residual_filtered(rho_f, cf)

    diag = ExtractionDiagnostics(
        delta_norm=delta,
        commutator_max=comm,
        reconstruction_residual=recon,
        kernel_residual_max=kernel,
        corner_rank=corner_rank,
        state_rank=state_rank,
        f_condition=f_condition,
        ill_conditioned=ill,
    )
    logger.debug("extraction diagnostics: %s", diag)

    problems = []
    if recon > tol:
        problems.append(f"reconstruction residual {recon:.3e}")
    if delta > tol * max(1.0, scale_f):
        problems.append(f"delta norm {delta:.3e}")
    if comm > comm_tol * commutator_scale(cf.generators):
        problems.append(f"commutator {comm:.3e}")
    if kernel > tol * max(1.0, scale_f):
        problems.append(f"kernel residual {kernel:.3e}")
    if problems:
        raise StructureViolation("state is not of canonical form at tolerance: " + ", ".join(problems))
    return cf, diag


def canonicalize(
    state: TripartiteState,
    tol: float = config.RECON_TOL,
    *,
    witness_mode: WitnessMode = "corner",
    seed: int = 0,
    samples: int = config.WITNESS_SAMPLES,
    eA: npt.ArrayLike | None = None,
    fB: npt.ArrayLike | None = None,
    comm_tol: float = config.COMM_TOL,
    rank_tol: float | None = None,
) -> tuple[CanonicalForm, ExtractionDiagnostics]:
    """Witness search, rotation to the corner and extraction in one call."""
    w = find_witness(state, witness_mode, samples=samples, seed=seed, eA=eA, fB=fB, rank_tol=rank_tol)
    if w is None:
        raise NoWitness(f"no product pair with a rank-{state.dims.N} sandwich ({witness_mode} mode)")
    rotated, UA, UB = rotate_to_corner(state, w)
    return extract_canonical(
        rotated, tol, comm_tol=comm_tol, rank_tol=rank_tol, localU_A=UA, localU_B=UB
    )
