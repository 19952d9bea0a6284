"""End-to-end reproduction of the three worked three-party examples."""
import numpy as np
import pytest

from pptcanon.domain.decompose import decompose, verify_ensemble
from pptcanon.domain.errors import RankMismatch
from pptcanon.domain.instances import example_iii_vectors, gen_reference_example, gram_matrix
from pptcanon.domain.ppt import ppt_report
from pptcanon.domain.tensor import NONTRIVIAL_MASKS, TripartiteDims, numeric_rank, partial_transpose


@pytest.mark.parametrize("a", [0.0, 0.1, 0.25, 0.3, 0.49])
def test_example_ii(a):
    state = gen_reference_example("example-ii", a=a)
    assert np.linalg.eigvalsh(state.rho)[0] >= -1e-15
    for mask in NONTRIVIAL_MASKS:
        assert np.allclose(partial_transpose(state, mask), state.rho, atol=1e-12)
    assert numeric_rank(state.rho) == 2

    ens = decompose(state)
    assert len(ens.terms) == 2
    assert sorted(ens.weights) == pytest.approx([0.5 - a, 0.5 + a], abs=1e-12)
    assert verify_ensemble(state, ens, 1e-12).passed


@pytest.mark.parametrize("N", [2, 3, 4, 8])
@pytest.mark.parametrize("KM", [(2, 2), (3, 3), (3, 4)])
def test_example_i(KM, N):
    state = gen_reference_example("example-i", dims=TripartiteDims(*KM, N))
    ens = decompose(state)
    assert len(ens.terms) == N
    assert ens.weights == pytest.approx([1 / N] * N, abs=1e-12)
    for t in ens.terms:
        assert abs(t.vecA[0]) == pytest.approx(1.0, abs=1e-12)
        assert abs(t.vecB[0]) == pytest.approx(1.0, abs=1e-12)
    C = np.column_stack([t.vecC for t in ens.terms])
    assert np.allclose(C.conj().T @ C, np.eye(N), atol=1e-10)
    assert verify_ensemble(state, ens, 1e-10).passed


def test_example_iii():
    state = gen_reference_example("example-iii", variant="corrected")
    assert state.trace == pytest.approx(1.0)
    assert numeric_rank(state.rho) == 4
    assert ppt_report(state, tol=1e-12).overall_ppt
    with pytest.raises(RankMismatch):
        decompose(state)
    literal = gram_matrix(example_iii_vectors("literal"))
    assert abs(literal[0, 2]) == pytest.approx(0.5)
