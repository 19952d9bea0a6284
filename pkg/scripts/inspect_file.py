#!/usr/bin/env python3
from __future__ import annotations
import json
import sys
from pathlib import Path
import numpy as np
from pptcanon.adapters.jsonfile.store import load_ensemble, load_state
from pptcanon.domain.errors import PptCanonError
from pptcanon.domain.tensor import numeric_rank

def main(path: str) -> None:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if "terms" in raw:
        ens = load_ensemble(path)
        print(f"ensemble dims {ens.dims.asTuple()} with {len(ens.terms)} terms, weight sum {ens.weights.sum():.12f}")
        for i, t in enumerate(ens.terms):
            print(f"{i:>3} p={t.p:.6f} |a|={np.linalg.norm(t.vecA):.3f} |b|={np.linalg.norm(t.vecB):.3f} |c|={np.linalg.norm(t.vecC):.3f}")
        return
    state = load_state(path, require_normalized=False)
    w = np.linalg.eigvalsh(state.rho)
    print(f"state dims {state.dims.asTuple()} trace {state.trace:.12f} rank {numeric_rank(state.rho)}")
    print(f"eigenvalues min {w[0]:.3e} max {w[-1]:.3e}")
    if raw.get("metadata"):
        print("metadata:", ", ".join(f"{k}={v}" for k, v in raw["metadata"].items()))

if __name__ == "__main__":
    if len(sys.argv) != 2:
        print("usage: inspect_file.py FILE", file=sys.stderr)
        sys.exit(2)
    try:
        main(sys.argv[1])
    except (PptCanonError, OSError, json.JSONDecodeError) as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        sys.exit(2)
