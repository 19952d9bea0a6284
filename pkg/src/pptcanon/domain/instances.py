from __future__ import annotations

import logging
from dataclasses import replace
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from pptcanon.domain.canonical import CanonicalForm
from pptcanon.domain.decompose import EnsembleTerm, SeparableEnsemble
from pptcanon.domain.errors import PreconditionError
from pptcanon.domain.tensor import (
    ComplexMatrix,
    ComplexVector,
    TripartiteDims,
    TripartiteState,
    dagger,
    hermitian_part,
    kron,
)

logger = logging.getLogger(__name__)

ExampleId = Literal["example-i", "example-ii", "example-iii"]
Variant = Literal["corrected", "literal"]
PhiKind = Literal["random", "ghz"]


class GenSpec(BaseModel):
    """Everything a generated canonical instance depends on."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dims: TripartiteDims
    seed: int = Field(0, ge=0, lt=2**64)
    generator_scale: float = Field(1.0, ge=0.0, allow_inf_nan=False)
    F_condition_cap: float = Field(100.0, ge=1.0, allow_inf_nan=False)


# Stream layout: SeedSequence(seed).spawn(2) -> (generator family, filter block);
# each of those spawns (unitary, spectrum).
def _streams(seed: int) -> tuple[np.random.SeedSequence, np.random.SeedSequence]:
    family, filt = np.random.SeedSequence(seed).spawn(2)
    return family, filt


def haar_unitary(n: int, rng: np.random.Generator) -> ComplexMatrix:
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def _family(
    N: int,
    count: int,
    scale: float,
    seq: np.random.SeedSequence,
    real_spectrum: bool,
) -> list[ComplexMatrix]:
    if N < 1 or count < 0:
        raise PreconditionError(f"need N >= 1 and count >= 0 (got N={N}, count={count})")
    if count == 0:
        return []
    u_seq, l_seq = seq.spawn(2)
    U0 = haar_unitary(N, np.random.default_rng(u_seq))
    rng = np.random.default_rng(l_seq)
    if real_spectrum:
        lam = rng.standard_normal((count, N)) * scale
    else:
        lam = (rng.standard_normal((count, N)) + 1j * rng.standard_normal((count, N))) * scale / np.sqrt(2)
    return [(U0 * row) @ dagger(U0) for row in lam.astype(np.complex128)]


def gen_commuting_family(
    N: int,
    count: int,
    spec: GenSpec,
    *,
    real_spectrum: bool = False,
) -> list[ComplexMatrix]:
    """``count`` matrices ``U0 diag(lambda_k) U0^dag`` sharing one Haar unitary ``U0``."""
    family, _ = _streams(spec.seed)
    return _family(N, count, spec.generator_scale, family, real_spectrum)


def _sample_filter(N: int, cap: float, seq: np.random.SeedSequence) -> ComplexMatrix:
    q_seq, mu_seq = seq.spawn(2)
    Q = haar_unitary(N, np.random.default_rng(q_seq))
    half = 0.5 * np.log(cap)
    mu = np.exp(np.random.default_rng(mu_seq).uniform(-half, half, N))
    return hermitian_part((Q * mu) @ dagger(Q))


def gen_canonical_state(spec: GenSpec) -> tuple[TripartiteState, CanonicalForm]:
    """A random state ``sqrt(F) T^dag T sqrt(F)`` and the form that built it."""
    K, M, N = spec.dims.asTuple()
    family, filt = _streams(spec.seed)
    gens = _family(N, (M - 1) + (K - 1), spec.generator_scale, family, False)
    F = _sample_filter(N, spec.F_condition_cap, filt)
    cf = CanonicalForm(
        dims=spec.dims,
        A_list=tuple(gens[: M - 1]),
        B_list=tuple(gens[M - 1:]),
        F=F,
        localU_A=np.eye(K, dtype=np.complex128),
        localU_B=np.eye(M, dtype=np.complex128),
    )
    rho = cf.state_matrix()
    t = float(np.trace(rho).real)
    logger.debug("generated canonical state dims=%s seed=%d trace before normalization %.6g",
                 spec.dims.asTuple(), spec.seed, t)
    return TripartiteState(spec.dims, rho / t), replace(cf, F=F / t)


def _ket(label: str) -> ComplexVector:
    s = 1 / np.sqrt(2)
    kets = {"0": [1, 0], "1": [0, 1], "+": [s, s], "-": [s, -s]}
    return np.asarray(kets[label], dtype=np.complex128)


def _proj(label: str) -> ComplexMatrix:
    # Exact dyadic entries, so sums of Kronecker products stay exact.
    projs = {
        "0": [[1, 0], [0, 0]],
        "1": [[0, 0], [0, 1]],
        "+": [[0.5, 0.5], [0.5, 0.5]],
        "-": [[0.5, -0.5], [-0.5, 0.5]],
    }
    return np.asarray(projs[label], dtype=np.complex128)


_EXAMPLE_III_LABELS = {
    "corrected": ("01+", "1+0", "+01", "---"),
    "literal": ("01+", "1+0", "+10", "---"),
}


def _labels(variant: Variant) -> tuple[str, ...]:
    try:
        return _EXAMPLE_III_LABELS[variant]
    except KeyError:
        raise PreconditionError(f"unknown example-iii variant {variant!r}") from None


def example_iii_vectors(variant: Variant = "corrected") -> list[ComplexVector]:
    return [np.kron(np.kron(_ket(a), _ket(b)), _ket(c)) for a, b, c in _labels(variant)]


def gram_matrix(vectors: list[ComplexVector]) -> ComplexMatrix:
    V = np.column_stack(vectors)
    return dagger(V) @ V


def example_i(dims: TripartiteDims) -> TripartiteState:
    N = dims.N
    rho = np.zeros((dims.total, dims.total), dtype=np.complex128)
    rho[:N, :N] = np.eye(N) / N
    return TripartiteState(dims, rho)


def example_ii(a: float) -> TripartiteState:
    if not np.isfinite(a) or abs(a) > 0.5:
        raise PreconditionError(f"example-ii needs |a| <= 1/2 for a positive state (got a={a})")
    dims = TripartiteDims(2, 2, 2)
    rho = np.zeros((8, 8), dtype=np.complex128)
    rho[:2, :2] = [[0.5, a], [a, 0.5]]
    return TripartiteState(dims, rho)


def example_iii(variant: Variant = "corrected") -> TripartiteState:
    """Complement of four three-qubit product projectors, scaled to unit trace."""
    P = sum(kron(kron(_proj(a), _proj(b)), _proj(c)) for a, b, c in _labels(variant))
    rho = (np.eye(8, dtype=np.complex128) - P) / 4
    return TripartiteState(TripartiteDims(2, 2, 2), rho)


def gen_reference_example(
    example: ExampleId,
    *,
    dims: TripartiteDims | None = None,
    a: float = 0.0,
    variant: Variant = "corrected",
) -> TripartiteState:
    if example == "example-i":
        return example_i(dims or TripartiteDims(2, 2, 2))
    if example == "example-ii":
        return example_ii(a)
    if example == "example-iii":
        return example_iii(variant)
    raise PreconditionError(f"unknown example {example!r}")


def printed_example_ii_ensemble(a: float) -> SeparableEnsemble:
    """The two-term ensemble with equal weights; it reconstructs the state only at ``a = 0``."""
    if abs(a) > 0.5:
        raise PreconditionError(f"example-ii needs |a| <= 1/2 (got a={a})")
    zero = _ket("0")
    terms = tuple(EnsembleTerm(p=0.5, vecA=zero, vecB=zero, vecC=_ket(s)) for s in "+-")
    return SeparableEnsemble(dims=TripartiteDims(2, 2, 2), terms=terms)


def gen_npt_control(
    dims: TripartiteDims,
    p: float,
    seed: int = 0,
    phi: PhiKind = "random",
) -> TripartiteState:
    """``(1-p)|phi><phi| + p I / KMN`` for an entangled pure ``phi``."""
    if not 0.0 <= p <= 1.0:
        raise PreconditionError(f"noise p must lie in [0, 1] (got {p})")
    D = dims.total
    if phi == "ghz":
        d = min(dims.asTuple())
        psi = np.zeros(D, dtype=np.complex128)
        for i in range(d):
            psi[(i * dims.M + i) * dims.N + i] = 1.0
    elif phi == "random":
        rng = np.random.default_rng(seed)
        psi = rng.standard_normal(D) + 1j * rng.standard_normal(D)
    else:
        raise PreconditionError(f"unknown phi kind {phi!r}")
    psi = psi / np.linalg.norm(psi)
    rho = (1 - p) * np.outer(psi, psi.conj()) + p * np.eye(D) / D
    return TripartiteState(dims, hermitian_part(rho))
