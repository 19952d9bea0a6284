import numpy as np
import pytest

from pptcanon.domain.canonical import extract_canonical
from pptcanon.domain.decompose import decompose_detailed
from pptcanon.domain.instances import GenSpec, gen_canonical_state, haar_unitary
from pptcanon.domain.ppt import ppt_report
from pptcanon.domain.tensor import TripartiteDims, local_conjugate

DIMS = [(2, 2, 2), (3, 3, 2), (3, 3, 4), (3, 4, 3), (4, 4, 3)]


def _roundTrip(dims, seed):
    state, _ = gen_canonical_state(GenSpec(dims=TripartiteDims(*dims), seed=seed))
    assert ppt_report(state, tol=1e-10).overall_ppt

    _, diag = extract_canonical(state)
    assert diag.commutator_max <= 1e-8
    assert diag.delta_norm <= 1e-8
    assert diag.reconstruction_residual <= 1e-8
    assert diag.kernel_residual_max <= 1e-8

    result = decompose_detailed(state)
    assert result.check.residual <= 1e-8
    assert result.ensemble.weights.sum() == pytest.approx(1.0, abs=1e-10)
    assert np.all(result.ensemble.weights > 0)


@pytest.mark.parametrize("dims", DIMS)
def test_round_trip_smoke(dims):
    _roundTrip(dims, 0)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(25))
@pytest.mark.parametrize("dims", DIMS)
def test_round_trip_suite(dims, seed):
    _roundTrip(dims, seed)


@pytest.mark.parametrize("seed", range(10))
def test_local_unitary_equivariance(seed):
    dims = TripartiteDims(3, 3, 3)
    state, _ = gen_canonical_state(GenSpec(dims=dims, seed=seed))
    rng = np.random.default_rng(1000 + seed)
    UA, UB, UC = (haar_unitary(3, rng) for _ in range(3))
    turned = local_conjugate(state, UA, UB, UC)

    result = decompose_detailed(turned, tol=1e-7, witness_mode="search", seed=seed)
    assert result.check.residual <= 1e-7
    assert result.ensemble.weights.sum() == pytest.approx(1.0, abs=1e-10)
