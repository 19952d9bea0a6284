from __future__ import annotations

import json

import numpy as np
from typer.testing import CliRunner

from pptcanon.adapters.jsonfile.store import load_canonical, load_ensemble, load_state
from pptcanon.cli.main import app
from pptcanon.domain.decompose import reconstruct


def test_end_to_end_workflow(tmp_path):
    runner = CliRunner()
    state = tmp_path / "state.json"
    ens = tmp_path / "ens.json"

    res = runner.invoke(app, ["generate", "--kind", "canonical", "--dims", "3", "4", "3", "--seed", "17", "--out", str(state)])
    assert res.exit_code == 0, res.output
    summary = json.loads(res.stdout)
    assert summary["truth"].endswith("state.truth.json")

    assert runner.invoke(app, ["check-ppt", str(state)]).exit_code == 0

    res = runner.invoke(app, ["decompose", str(state), "--out", str(ens), "--witness", "corner"])
    assert res.exit_code == 0, res.output
    assert json.loads(res.stdout)["residual"] <= 1e-8

    res = runner.invoke(app, ["verify", str(state), str(ens), "--tol", "1e-8"])
    assert res.exit_code == 0, res.output

    rho = load_state(state).rho
    assert np.allclose(reconstruct(load_ensemble(ens)), rho, atol=1e-9)
    truth = load_canonical(tmp_path / "state.truth.json")
    assert np.allclose(truth.state_matrix(), rho, atol=1e-12)
