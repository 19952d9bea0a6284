import numpy as np
import pytest
from typer.testing import CliRunner

from pptcanon.domain.instances import GenSpec, gen_canonical_state, gen_npt_control, gen_reference_example
from pptcanon.domain.tensor import TripartiteDims, TripartiteState


def _randomState(dims: TripartiteDims, seed: int) -> TripartiteState:
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((dims.total, dims.total)) + 1j * rng.standard_normal((dims.total, dims.total))
    rho = G @ G.conj().T
    return TripartiteState(dims, rho / np.trace(rho).real)


@pytest.fixture()
def randomState():
    """Full-rank random density matrix factory."""
    return _randomState


@pytest.fixture()
def exampleII():
    return gen_reference_example("example-ii", a=0.3)


@pytest.fixture()
def exampleIII():
    return gen_reference_example("example-iii", variant="corrected")


@pytest.fixture()
def ghz():
    return gen_npt_control(TripartiteDims(2, 2, 2), 0.0, phi="ghz")


@pytest.fixture()
def canonical332():
    return gen_canonical_state(GenSpec(dims=TripartiteDims(3, 3, 2), seed=3))


# CLI invocations write into a per-test directory
@pytest.fixture()
def runner():
    return CliRunner()
