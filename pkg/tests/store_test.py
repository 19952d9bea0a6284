import json

import numpy as np
import pytest

from pptcanon.adapters.jsonfile.models import StateFile
from pptcanon.adapters.jsonfile.store import (
    atomic_write,
    load_canonical,
    load_ensemble,
    load_state,
    parse,
    save_canonical,
    save_ensemble,
    save_state,
    truth_path,
)
from pptcanon.domain.decompose import decompose
from pptcanon.domain.errors import FileFormatError, NormalizationError
from pptcanon.domain.tensor import TripartiteDims, TripartiteState


def test_state_round_trip_is_bit_exact(tmp_path, canonical332):
    state, _ = canonical332
    path = tmp_path / "state.json"
    save_state(path, state, {"kind": "canonical"})
    loaded = load_state(path)
    assert np.array_equal(loaded.rho, state.rho)
    first = path.read_bytes()
    save_state(path, loaded, {"kind": "canonical"})
    assert path.read_bytes() == first


def test_signed_zero_survives(tmp_path):
    rho = np.eye(8, dtype=complex) / 8
    rho[0, 1] = complex(-0.0, 0.0)
    rho[1, 0] = complex(-0.0, -0.0)
    path = tmp_path / "z.json"
    save_state(path, TripartiteState(TripartiteDims(2, 2, 2), rho))
    first = path.read_text()
    assert "-0.0" in first
    save_state(path, load_state(path))
    assert path.read_text() == first


def test_ensemble_round_trip(tmp_path, exampleII):
    ens = decompose(exampleII)
    path = tmp_path / "ens.json"
    save_ensemble(path, ens)
    loaded = load_ensemble(path)
    assert loaded.dims == ens.dims
    assert np.array_equal(loaded.weights, ens.weights)
    for a, b in zip(loaded.terms, ens.terms):
        assert np.array_equal(a.vecC, b.vecC)


def test_canonical_round_trip(tmp_path, canonical332):
    _, cf = canonical332
    path = tmp_path / "truth.json"
    save_canonical(path, cf)
    loaded = load_canonical(path)
    for a, b in zip(loaded.generators, cf.generators):
        assert np.array_equal(a, b)
    assert np.array_equal(loaded.F, cf.F)


def test_files_are_plain_json(tmp_path, exampleII):
    path = tmp_path / "s.json"
    save_state(path, exampleII)
    raw = json.loads(path.read_text())
    assert raw["schema_version"] == "1"
    assert raw["dims"] == [2, 2, 2]
    assert raw["matrix"][0][1] == [0.3, 0.0]
    assert "metadata" not in raw


@pytest.mark.parametrize(
    "text",
    [
        '{"schema_version": "1", "dims": [2, 2, 2], "matrix": [',
        '{"schema_version": "1", "dims": [2, 2, 2], "matrix": [[[1.0, 0.0]]]}',
        '{"dims": [1, 2, 2], "matrix": []}',
    ],
)
def test_malformed_documents(text):
    with pytest.raises(FileFormatError):
        parse(text, StateFile)


def test_non_finite_entries_rejected(tmp_path):
    doc = {"dims": [2, 2, 1], "matrix": [[[0.25, 0.0]] * 4] * 4}
    doc["matrix"] = [list(row) for row in doc["matrix"]]
    doc["matrix"][0][0] = [float("nan"), 0.0]
    path = tmp_path / "nan.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(FileFormatError):
        load_state(path)


def test_missing_file(tmp_path):
    with pytest.raises(FileFormatError):
        load_state(tmp_path / "absent.json")


def test_unnormalized_needs_flag(tmp_path):
    path = tmp_path / "big.json"
    save_state(path, TripartiteState(TripartiteDims(2, 2, 2), np.eye(8), require_normalized=False))
    with pytest.raises(NormalizationError):
        load_state(path)
    assert load_state(path, require_normalized=False).trace == 8.0


def test_atomic_write_keeps_original_on_failure(tmp_path):
    path = tmp_path / "keep.json"
    path.write_text("original")
    with pytest.raises(RuntimeError):
        with atomic_write(path) as fh:
            fh.write("partial")
            raise RuntimeError("boom")
    assert path.read_text() == "original"
    assert [p.name for p in tmp_path.iterdir()] == ["keep.json"]


def test_truth_path():
    assert truth_path("out/state.json").as_posix() == "out/state.truth.json"


def test_unknown_schema_version():
    doc = {"schema_version": "2", "dims": [2, 2, 2], "matrix": [[[0.0, 0.0]] * 8] * 8}
    with pytest.raises(FileFormatError, match="schema_version"):
        parse(json.dumps(doc), StateFile)
