import numpy as np
import pytest

from pptcanon.domain.canonical import (
    CanonicalForm,
    canonicalize,
    commutator_max,
    extract_canonical,
    filter_state,
    find_witness,
    rotate_to_corner,
    unfilter_state,
    verify_kernel_vectors,
)
from pptcanon.domain.errors import NoWitness, NotPptError, RankMismatch
from pptcanon.domain.instances import GenSpec, gen_canonical_state, gen_reference_example, haar_unitary
from pptcanon.domain.tensor import TripartiteDims, TripartiteState, block, local_conjugate


def test_corner_block_is_filter(canonical332):
    state, truth = canonical332
    assert np.allclose(block(state, 8, 8), truth.F, atol=1e-12)


def test_extract_recovers_generators():
    state, truth = gen_canonical_state(GenSpec(dims=TripartiteDims(4, 4, 3), seed=11))
    cf, diag = extract_canonical(state)
    assert diag.reconstruction_residual <= 1e-8
    assert diag.delta_norm <= 1e-8
    assert diag.commutator_max <= 1e-8
    assert diag.kernel_residual_max <= 1e-8
    assert diag.state_rank == diag.corner_rank == 3
    assert not diag.ill_conditioned
    for got, want in zip(cf.generators, truth.generators):
        assert np.allclose(got, want, atol=1e-8)
    assert np.allclose(cf.state_matrix(), state.rho, atol=1e-10)


def test_corner_witness_needs_no_rotation(canonical332):
    state, _ = canonical332
    w = find_witness(state, "corner")
    assert w is not None and w.sandwich_rank == 2
    assert np.array_equal(w.eA, [0, 0, 1]) and np.array_equal(w.fB, [0, 0, 1])
    rotated, UA, UB = rotate_to_corner(state, w)
    assert rotated is state
    assert np.array_equal(UA, np.eye(3)) and np.array_equal(UB, np.eye(3))


def test_basis_witness_rotates_exactly(exampleII):
    w = find_witness(exampleII, "corner")
    assert np.array_equal(w.eA, [1, 0]) and np.array_equal(w.fB, [1, 0])
    rotated, UA, UB = rotate_to_corner(exampleII, w)
    assert np.array_equal(UA @ w.eA, [0, 1])
    assert np.array_equal(block(rotated, 3, 3), [[0.5, 0.3], [0.3, 0.5]])


def test_search_witness_for_rotated_state(canonical332):
    state, _ = canonical332
    rng = np.random.default_rng(12)
    UA, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    turned = local_conjugate(state, UA=UA)
    w = find_witness(turned, "search", seed=1)
    assert w is not None and w.sandwich_rank == 2


def test_explicit_witness(exampleII):
    assert find_witness(exampleII, "explicit", eA=[1, 0], fB=[1, 0]) is not None
    assert find_witness(exampleII, "explicit", eA=[0, 1], fB=[1, 0]) is None
    with pytest.raises(ValueError):
        find_witness(exampleII, "explicit")


def test_no_witness_for_product_pure_state():
    dims = TripartiteDims(2, 2, 2)
    rho = np.zeros((8, 8))
    rho[0, 0] = 1.0
    state = TripartiteState(dims, rho)
    assert find_witness(state, "search", samples=16) is None
    with pytest.raises(NoWitness):
        canonicalize(state, witness_mode="corner")


def test_extract_rejects_npt(ghz):
    with pytest.raises(NotPptError):
        extract_canonical(ghz)


def test_extract_rejects_rank_four(exampleIII):
    with pytest.raises(RankMismatch):
        canonicalize(exampleIII)


def test_extract_rejects_singular_corner(exampleII):
    # block (0, 0) carries the state; the corner block is zero
    with pytest.raises(RankMismatch):
        extract_canonical(exampleII)


def test_canonicalize_example_i_records_rotation():
    state = gen_reference_example("example-i", dims=TripartiteDims(3, 2, 2))
    cf, diag = canonicalize(state)
    assert np.array_equal(cf.localU_A @ [1, 0, 0], [0, 0, 1])
    assert np.array_equal(cf.localU_B @ [1, 0], [0, 1])
    assert all(not np.any(G) for G in cf.generators)
    assert diag.reconstruction_residual <= 1e-12


def test_kernel_vectors_clean_and_perturbed(canonical332):
    state, _ = canonical332
    cf, _ = extract_canonical(state)
    assert verify_kernel_vectors(state, cf) <= 1e-10

    delta = np.zeros((18, 18), dtype=complex)
    delta[16:18, 16:18] = 1e-2 * np.diag([1.0, -1.0])
    perturbed = TripartiteState(state.dims, state.rho + delta)
    assert verify_kernel_vectors(perturbed, cf) > 1e-4


@pytest.mark.parametrize("seed", range(3))
def test_extraction_follows_c_unitaries(seed):
    state, _ = gen_canonical_state(GenSpec(dims=TripartiteDims(3, 3, 3), seed=seed))
    U = haar_unitary(3, np.random.default_rng(70 + seed))
    cf, _ = extract_canonical(state)
    turned, diag = extract_canonical(local_conjugate(state, UC=U))
    assert diag.reconstruction_residual <= 1e-8
    assert np.allclose(turned.F, U @ cf.F @ U.conj().T, atol=1e-10)
    for got, G in zip(turned.generators, cf.generators):
        assert np.allclose(got, U @ G @ U.conj().T, atol=1e-8)


def test_filter_round_trip(canonical332):
    state, truth = canonical332
    filtered = filter_state(state, truth.F)
    assert np.allclose(filtered.rho, truth.filtered_matrix(), atol=1e-10)
    assert np.allclose(block(filtered, 8, 8), np.eye(2), atol=1e-10)
    assert np.allclose(unfilter_state(filtered, truth.F).rho, state.rho, atol=1e-12)


def test_commutator_max_detects_non_normal():
    nilpotent = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert commutator_max([nilpotent]) == pytest.approx(np.sqrt(2))
    assert commutator_max([np.diag([1.0, 2.0]), np.diag([3.0j, 4.0])]) == 0.0


def test_row_operator_layout():
    dims = TripartiteDims(2, 3, 1)
    cf = CanonicalForm(
        dims=dims,
        A_list=(np.array([[2.0]]), np.array([[3.0]])),
        B_list=(np.array([[5.0]]),),
        F=np.eye(1),
        localU_A=np.eye(2),
        localU_B=np.eye(3),
    )
    assert np.array_equal(cf.row_operator(), [[10.0, 15.0, 5.0, 2.0, 3.0, 1.0]])
