#!/usr/bin/env python3
from __future__ import annotations
import numpy as np
from pptcanon.domain.decompose import decompose_detailed, verify_ensemble
from pptcanon.domain.errors import PptCanonError
from pptcanon.domain.instances import gen_reference_example, printed_example_ii_ensemble
from pptcanon.domain.ppt import ppt_report
from pptcanon.domain.tensor import TripartiteDims, numeric_rank

def _row(name: str, state) -> None:
    report = ppt_report(state)
    rank = numeric_rank(state.rho)
    try:
        result = decompose_detailed(state)
        weights = ", ".join(f"{p:.4f}" for p in result.ensemble.weights)
        outcome = f"{len(result.ensemble.terms)} terms [{weights}] residual {result.check.residual:.1e}"
    except PptCanonError as e:
        outcome = type(e).__name__
    print(f'{name:<26} rank {rank:>2}  ppt: {"yes" if report.overall_ppt else "no ":<3}  {outcome}')

def main() -> None:
    for N in (2, 3, 4):
        _row(f"example-i (3,3,{N})", gen_reference_example("example-i", dims=TripartiteDims(3, 3, N)))
    for a in (0.0, 0.1, 0.3, 0.49):
        _row(f"example-ii a={a}", gen_reference_example("example-ii", a=a))
    _row("example-iii corrected", gen_reference_example("example-iii", variant="corrected"))

    a = 0.3
    check = verify_ensemble(gen_reference_example("example-ii", a=a), printed_example_ii_ensemble(a))
    print(f"equal-weight example-ii ensemble at a={a}: residual {check.residual:.4f} passed: {check.passed}")

    literal = gen_reference_example("example-iii", variant="literal")
    lowest = float(np.linalg.eigvalsh(literal.rho)[0])
    print(f"example-iii literal vectors: smallest eigenvalue {lowest:.4f}")

if __name__ == "__main__":
    main()
