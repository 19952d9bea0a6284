from __future__ import annotations

from dataclasses import InitVar, dataclass

import numpy as np
import numpy.typing as npt
from scipy import linalg

from pptcanon import config
from pptcanon.domain.errors import (
    DimensionMismatch,
    NormalizationError,
    NotHermitianError,
    NotPsdError,
    SingularError,
)

ComplexMatrix = npt.NDArray[np.complex128]
ComplexVector = npt.NDArray[np.complex128]


@dataclass(frozen=True)
class TripartiteDims:
    K: int
    M: int
    N: int

    def __post_init__(self) -> None:
        if self.K < 2 or self.M < 2 or self.N < 1:
            raise DimensionMismatch(
                f"dims must satisfy K >= 2, M >= 2, N >= 1 (got {self.K}, {self.M}, {self.N})"
            )

    @property
    def total(self) -> int:
        return self.K * self.M * self.N

    @property
    def blocks(self) -> int:
        return self.K * self.M

    @property
    def cornerBlock(self) -> int:
        return self.K * self.M - 1

    def asTuple(self) -> tuple[int, int, int]:
        return (self.K, self.M, self.N)


@dataclass(frozen=True)
class SubsystemMask:
    transposeA: bool = False
    transposeB: bool = False
    transposeC: bool = False

    @property
    def label(self) -> str:
        name = "".join(
            s for s, on in zip("ABC", (self.transposeA, self.transposeB, self.transposeC)) if on
        )
        return name or "none"

    def complement(self) -> SubsystemMask:
        return SubsystemMask(not self.transposeA, not self.transposeB, not self.transposeC)

    @classmethod
    def fromLabel(cls, label: str) -> SubsystemMask:
        label = label.strip().upper()
        if label in ("", "NONE"):
            return cls()
        if set(label) - set("ABC"):
            raise ValueError(f"unknown subsystem label {label!r}")
        return cls("A" in label, "B" in label, "C" in label)


# Ordered A, B, C, AB, AC, BC, ABC.
NONTRIVIAL_MASKS: tuple[SubsystemMask, ...] = tuple(
    SubsystemMask.fromLabel(s) for s in ("A", "B", "C", "AB", "AC", "BC", "ABC")
)
GENERATING_MASKS: tuple[SubsystemMask, ...] = NONTRIVIAL_MASKS[:3]


@dataclass(frozen=True, eq=False)
class TripartiteState:
    """A density matrix on C^K x C^M x C^N.

    The composite index is ``(iA*M + iB)*N + iC``, so the matrix is a
    ``KM x KM`` grid of ``N x N`` blocks. The stored array is read-only.
    """

    dims: TripartiteDims
    rho: ComplexMatrix
    require_normalized: InitVar[bool] = True

    def __post_init__(self, require_normalized: bool) -> None:
        rho = as_matrix(self.rho)
        side = self.dims.total
        if rho.shape != (side, side):
            raise DimensionMismatch(
                f"state matrix has shape {rho.shape}, dims {self.dims.asTuple()} need ({side}, {side})"
            )
        scale = max(frobenius(rho), np.finfo(float).tiny)
        if frobenius(rho - rho.conj().T) > config.HERM_TOL * scale:
            raise NotHermitianError("state matrix is not Hermitian within tolerance")
        if require_normalized:
            tr = np.trace(rho).real
            if abs(tr - 1.0) > config.NORM_TOL:
                raise NormalizationError(f"state trace is {tr!r}, expected 1")
        rho = rho.copy()
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def trace(self) -> float:
        return float(np.trace(self.rho).real)


def as_matrix(X: npt.ArrayLike) -> ComplexMatrix:
    arr = np.asarray(X, dtype=np.complex128)
    if arr.ndim != 2 or 0 in arr.shape:
        raise DimensionMismatch(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return arr


def frobenius(X: npt.ArrayLike) -> float:
    return float(np.linalg.norm(X))


def hermitian_part(X: ComplexMatrix) -> ComplexMatrix:
    return (X + X.conj().T) / 2


def dagger(X: ComplexMatrix) -> ComplexMatrix:
    return X.conj().T


def compose_index(iA: int, iB: int, iC: int, dims: TripartiteDims) -> int:
    for name, i, d in (("iA", iA, dims.K), ("iB", iB, dims.M), ("iC", iC, dims.N)):
        if not 0 <= i < d:
            raise IndexError(f"{name}={i} out of range [0, {d})")
    return (iA * dims.M + iB) * dims.N + iC


def kron(X: npt.ArrayLike, Y: npt.ArrayLike) -> ComplexMatrix:
    return np.kron(np.asarray(X, dtype=np.complex128), np.asarray(Y, dtype=np.complex128))


def partial_transpose_matrix(rho: ComplexMatrix, dims: TripartiteDims, mask: SubsystemMask) -> ComplexMatrix:
    """Partial transpose of a raw ``KMN x KMN`` matrix as a pure index permutation."""
    K, M, N = dims.asTuple()
    axes = [0, 1, 2, 3, 4, 5]
    for pos, on in enumerate((mask.transposeA, mask.transposeB, mask.transposeC)):
        if on:
            axes[pos], axes[pos + 3] = axes[pos + 3], axes[pos]
    t = np.asarray(rho).reshape(K, M, N, K, M, N).transpose(axes)
    return np.ascontiguousarray(t).reshape(dims.total, dims.total)


def partial_transpose(state: TripartiteState, mask: SubsystemMask) -> ComplexMatrix:
    return partial_transpose_matrix(state.rho, state.dims, mask)


def block_of(rho: ComplexMatrix, N: int, rowBlock: int, colBlock: int) -> ComplexMatrix:
    nb = rho.shape[0] // N
    if not (0 <= rowBlock < nb and 0 <= colBlock < nb):
        raise IndexError(f"block ({rowBlock}, {colBlock}) out of range [0, {nb})")
    return rho[rowBlock * N:(rowBlock + 1) * N, colBlock * N:(colBlock + 1) * N].copy()


def block(state: TripartiteState, rowBlock: int, colBlock: int) -> ComplexMatrix:
    return block_of(state.rho, state.dims.N, rowBlock, colBlock)


def check_unit(v: npt.ArrayLike, size: int, name: str, tol: float = config.VEC_TOL) -> ComplexVector:
    vec = np.asarray(v, dtype=np.complex128).reshape(-1)
    if vec.size != size:
        raise DimensionMismatch(f"{name} has length {vec.size}, expected {size}")
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > tol:
        raise NormalizationError(f"{name} has norm {norm!r}, expected 1")
    return vec


def sandwich_AB(
    state: TripartiteState,
    eA: npt.ArrayLike,
    fB: npt.ArrayLike,
    *,
    vec_tol: float = config.VEC_TOL,
) -> ComplexMatrix:
    """Return the ``N x N`` matrix ``<eA, fB| rho |eA, fB>``."""
    K, M, N = state.dims.asTuple()
    e = check_unit(eA, K, "eA", vec_tol)
    f = check_unit(fB, M, "fB", vec_tol)
    t = state.rho.reshape(K, M, N, K, M, N)
    return np.einsum("i,j,ijakls,k,l->as", e.conj(), f.conj(), t, e, f)


def numeric_rank(X: npt.ArrayLike, tol: float | None = None) -> int:
    arr = np.asarray(X, dtype=np.complex128)
    if arr.size == 0:
        return 0
    s = linalg.svdvals(arr)
    if s.size == 0 or s[0] == 0.0:
        return 0
    if tol is None:
        tol = max(arr.shape) * np.finfo(float).eps * s[0]
    return int(np.count_nonzero(s > tol))


def _psd_eigh(X: npt.ArrayLike, tol: float) -> tuple[np.ndarray, ComplexMatrix]:
    arr = as_matrix(X)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {arr.shape}")
    scale = max(frobenius(arr), np.finfo(float).tiny)
    if frobenius(arr - arr.conj().T) > tol * scale:
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    w, V = linalg.eigh(hermitian_part(arr))
    if w[0] < -tol:
        raise NotPsdError(f"matrix has eigenvalue {w[0]!r} below {-tol!r}")
    return np.clip(w, 0.0, None), V


def psd_sqrt(X: npt.ArrayLike, tol: float = config.SQRT_TOL) -> ComplexMatrix:
    w, V = _psd_eigh(X, tol)
    Y = (V * np.sqrt(w)) @ V.conj().T
    return hermitian_part(Y)


def psd_inv_sqrt(X: npt.ArrayLike, tol: float = config.SQRT_TOL) -> ComplexMatrix:
    w, V = _psd_eigh(X, tol)
    cutoff = len(w) * np.finfo(float).eps * max(float(w[-1]), np.finfo(float).tiny)
    if w[0] <= cutoff:
        raise SingularError(f"smallest eigenvalue {w[0]!r} is below the rank threshold {cutoff!r}")
    Y = (V / np.sqrt(w)) @ V.conj().T
    return hermitian_part(Y)


def condition_number(X: npt.ArrayLike) -> float:
    s = linalg.svdvals(np.asarray(X, dtype=np.complex128))
    if s[-1] == 0.0:
        return float("inf")
    return float(s[0] / s[-1])


def local_operator(dims: TripartiteDims, UA=None, UB=None, UC=None) -> ComplexMatrix:
    ops = [
        np.eye(d, dtype=np.complex128) if U is None else np.asarray(U, dtype=np.complex128)
        for U, d in ((UA, dims.K), (UB, dims.M), (UC, dims.N))
    ]
    for op, d in zip(ops, dims.asTuple()):
        if op.shape != (d, d):
            raise DimensionMismatch(f"local operator of shape {op.shape} does not act on C^{d}")
    return kron(kron(ops[0], ops[1]), ops[2])


def local_conjugate(state: TripartiteState, UA=None, UB=None, UC=None) -> TripartiteState:
    """Return ``(UA x UB x UC) rho (UA x UB x UC)^dag`` as a new state."""
    L = local_operator(state.dims, UA, UB, UC)
    rho = hermitian_part(L @ state.rho @ L.conj().T)
    return TripartiteState(state.dims, rho)
