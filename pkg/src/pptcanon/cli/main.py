from __future__ import annotations

import json
import logging
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Iterator

import numpy as np
import typer
from pydantic import BaseModel
from rich.console import Console
from rich.logging import RichHandler

from pptcanon import config
from pptcanon.adapters.jsonfile.mappers import fromDiagnostics, fromDomainCanonical, fromPptReport
from pptcanon.adapters.jsonfile.models import DecomposeSummary, ErrorDoc, GenerateSummary, VerifySummary
from pptcanon.adapters.jsonfile.store import (
    dumps,
    load_ensemble,
    load_state,
    save_canonical,
    save_ensemble,
    save_state,
    truth_path,
    writeDoc,
)
from pptcanon.domain.canonical import canonicalize
from pptcanon.domain.decompose import decompose_detailed, verify_ensemble
from pptcanon.domain.errors import (
    DimensionMismatch,
    FileFormatError,
    NormalizationError,
    NotHermitianError,
    NotPsdError,
    PptCanonError,
    PreconditionError,
    SingularError,
)
from pptcanon.domain.instances import GenSpec, gen_canonical_state, gen_npt_control, gen_reference_example
from pptcanon.domain.ppt import ppt_report
from pptcanon.domain.tensor import TripartiteDims

app = typer.Typer(help="Canonical form and separability certificates for rank-N PPT states")
stderr = Console(stderr=True)

EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_PRECONDITION = 3

INPUT_ERRORS = (
    FileFormatError,
    DimensionMismatch,
    PreconditionError,
    NotHermitianError,
    NormalizationError,
    NotPsdError,
    SingularError,
)


class Witness(str, Enum):
    corner = "corner"
    search = "search"
    explicit = "explicit"


class Kind(str, Enum):
    canonical = "canonical"
    example_i = "example-i"
    example_ii = "example-ii"
    example_iii = "example-iii"
    npt = "npt"


class Variant(str, Enum):
    corrected = "corrected"
    literal = "literal"


class Phi(str, Enum):
    random = "random"
    ghz = "ghz"


@app.callback()
def main(
    verbose: int = typer.Option(0, "--verbose", "-v", count=True, help="-v for info, -vv for debug logging"),
):
    level = {0: config.LOG_LEVEL, 1: "INFO"}.get(verbose, "DEBUG")
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def _emit(doc: BaseModel) -> None:
    typer.echo(dumps(doc), nl=False)


def _fail(error: str, msg: str, code: int):
    stderr.print(f"[red]{error}[/red]: {msg}")
    _emit(ErrorDoc(error=error, message=msg))
    raise typer.Exit(code)


@contextmanager
def _typedErrors() -> Iterator[None]:
    """Map typed failures to exit codes 2 (input) and 3 (precondition)."""
    try:
        yield
    except INPUT_ERRORS as e:
        _fail(type(e).__name__, str(e), EXIT_INPUT)
    except PptCanonError as e:
        _fail(type(e).__name__, str(e), EXIT_PRECONDITION)
    except (ValueError, IndexError) as e:
        _fail(type(e).__name__, str(e), EXIT_INPUT)


def _parseVector(text: str | None, name: str) -> np.ndarray | None:
    if text is None:
        return None
    try:
        arr = np.asarray(json.loads(text), dtype=np.float64)
    except (json.JSONDecodeError, TypeError, ValueError) as e:
        raise FileFormatError(f"{name}: expected a JSON list of numbers or [re, im] pairs ({e})") from e
    if arr.ndim == 2 and arr.shape[1] == 2:
        return arr[:, 0] + 1j * arr[:, 1]
    if arr.ndim == 1:
        return arr.astype(np.complex128)
    raise FileFormatError(f"{name}: expected a JSON list of numbers or [re, im] pairs")


@app.command("check-ppt", help="Report the smallest eigenvalue of every partial transpose.")
def checkPpt(
    file: Path = typer.Argument(..., help="StateFile to check"),
    tol: float | None = typer.Option(None, "--tol", help="PSD tolerance (default 1e-9 * trace)"),
    allow_unnormalized: bool = typer.Option(False, "--allow-unnormalized", help="Accept trace != 1"),
):
    with _typedErrors():
        state = load_state(file, require_normalized=not allow_unnormalized)
        report = ppt_report(state, tol)
    _emit(fromPptReport(report))
    if not report.overall_ppt:
        raise typer.Exit(EXIT_NEGATIVE)


@app.command("decompose", help="Write a certified separable ensemble for a rank-N PPT state.")
def decomposeCmd(
    file: Path = typer.Argument(..., help="StateFile to decompose"),
    out: Path = typer.Option(..., "--out", "-o", help="EnsembleFile to write"),
    tol: float = typer.Option(config.RECON_TOL, "--tol", help="Certification tolerance"),
    witness: Witness = typer.Option(Witness.search, "--witness", help="Product witness strategy"),
    seed: int = typer.Option(0, "--seed", min=0),
    samples: int = typer.Option(config.WITNESS_SAMPLES, "--samples", min=0, help="Random witness samples"),
    ea: str | None = typer.Option(None, "--ea", help="Explicit eA as JSON"),
    fb: str | None = typer.Option(None, "--fb", help="Explicit fB as JSON"),
):
    with _typedErrors():
        state = load_state(file)
        result = decompose_detailed(
            state, tol, witness.value, seed, samples=samples,
            eA=_parseVector(ea, "--ea"), fB=_parseVector(fb, "--fb"),
        )
        save_ensemble(out, result.ensemble, {"witness": witness.value, "seed": str(seed)})
    _emit(
        DecomposeSummary(
            terms=len(result.ensemble.terms),
            weights=result.ensemble.weights.tolist(),
            residual=result.check.residual,
            tol=tol,
            witness=witness.value,
            out=str(out),
            diagnostics=fromDiagnostics(result.diagnostics),
        )
    )


@app.command("extract", help="Print the canonical form (generators, filter, local unitaries).")
def extractCmd(
    file: Path = typer.Argument(..., help="StateFile to canonicalize"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Also write the CanonicalFile here"),
    tol: float = typer.Option(config.RECON_TOL, "--tol"),
    witness: Witness = typer.Option(Witness.search, "--witness"),
    seed: int = typer.Option(0, "--seed", min=0),
    ea: str | None = typer.Option(None, "--ea"),
    fb: str | None = typer.Option(None, "--fb"),
):
    with _typedErrors():
        state = load_state(file)
        cf, diag = canonicalize(
            state, tol, witness_mode=witness.value, seed=seed,
            eA=_parseVector(ea, "--ea"), fB=_parseVector(fb, "--fb"),
        )
        doc = fromDomainCanonical(cf, diag)
        if out is not None:
            writeDoc(out, doc)
    _emit(doc)


@app.command("generate", help="Write a generated or reference StateFile.")
def generate(
    kind: Kind = typer.Option(..., "--kind"),
    out: Path = typer.Option(..., "--out", "-o"),
    dims: tuple[int, int, int] = typer.Option((2, 2, 2), "--dims", help="K M N"),
    seed: int = typer.Option(0, "--seed", min=0),
    a: float | None = typer.Option(None, "--a", help="example-ii off-diagonal entry"),
    variant: Variant | None = typer.Option(None, "--variant", help="example-iii vector set"),
    p: float | None = typer.Option(None, "--p", help="npt noise weight"),
    phi: Phi | None = typer.Option(None, "--phi", help="npt pure state"),
    generator_scale: float | None = typer.Option(None, "--generator-scale"),
    f_cap: float | None = typer.Option(None, "--f-cap", help="Max condition number of F"),
):
    allowed = {
        Kind.canonical: {"dims", "generator_scale", "f_cap"},
        Kind.example_i: {"dims"},
        Kind.example_ii: {"a"},
        Kind.example_iii: {"variant"},
        Kind.npt: {"dims", "p", "phi"},
    }[kind]
    given = {
        name for name, value in (
            ("dims", None if dims == (2, 2, 2) else dims), ("a", a), ("variant", variant), ("p", p),
            ("phi", phi), ("generator_scale", generator_scale), ("f_cap", f_cap),
        ) if value is not None
    }
    if given - allowed:
        _fail("UsageError", f"--kind {kind.value} does not take {', '.join(sorted(given - allowed))}", EXIT_INPUT)

    truth = None
    with _typedErrors():
        tdims = TripartiteDims(*dims)
        meta = {"kind": kind.value, "seed": str(seed)}
        if kind is Kind.canonical:
            spec = GenSpec(
                dims=tdims,
                seed=seed,
                generator_scale=1.0 if generator_scale is None else generator_scale,
                F_condition_cap=100.0 if f_cap is None else f_cap,
            )
            state, cf = gen_canonical_state(spec)
            truth = truth_path(out)
            save_canonical(truth, cf)
        elif kind is Kind.npt:
            if p is None:
                raise PreconditionError("--kind npt needs --p")
            state = gen_npt_control(tdims, p, seed, (phi or Phi.random).value)
            meta["p"] = repr(p)
        elif kind is Kind.example_ii:
            state = gen_reference_example("example-ii", a=0.0 if a is None else a)
            meta["a"] = repr(0.0 if a is None else a)
        elif kind is Kind.example_iii:
            state = gen_reference_example("example-iii", variant=(variant or Variant.corrected).value)
        else:
            state = gen_reference_example("example-i", dims=tdims)
        save_state(out, state, meta)
    _emit(GenerateSummary(kind=kind.value, dims=state.dims.asTuple(), out=str(out), truth=str(truth) if truth else None))


@app.command("verify", help="Check an ensemble against a state by reconstruction.")
def verify(
    state_file: Path = typer.Argument(..., help="StateFile"),
    ensemble_file: Path = typer.Argument(..., help="EnsembleFile"),
    tol: float = typer.Option(config.RECON_TOL, "--tol"),
):
    with _typedErrors():
        state = load_state(state_file)
        ens = load_ensemble(ensemble_file)
        check = verify_ensemble(state, ens, tol)
    _emit(VerifySummary(residual=check.residual, passed=check.passed, tol=tol, violations=check.violations))
    if not check.passed:
        raise typer.Exit(EXIT_NEGATIVE)


if __name__ == "__main__":
    app()
