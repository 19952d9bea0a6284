from __future__ import annotations

import json
import logging
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Iterator, TypeVar

from pydantic import BaseModel, ValidationError

from pptcanon.adapters.jsonfile.mappers import (
    fromDomainCanonical,
    fromDomainEnsemble,
    fromDomainState,
    toDomainCanonical,
    toDomainEnsemble,
    toDomainState,
)
from pptcanon.adapters.jsonfile.models import CanonicalFile, EnsembleFile, StateFile
from pptcanon.config import SCHEMA_VERSION
from pptcanon.domain.canonical import CanonicalForm, ExtractionDiagnostics
from pptcanon.domain.decompose import SeparableEnsemble
from pptcanon.domain.errors import FileFormatError
from pptcanon.domain.tensor import TripartiteState

logger = logging.getLogger(__name__)

DocT = TypeVar("DocT", bound=BaseModel)


def dumps(doc: BaseModel) -> str:
    """Serialize with shortest round-trip floats; NaN and inf are rejected."""
    return json.dumps(doc.model_dump(mode="python", exclude_none=True), allow_nan=False, indent=2) + "\n"


def parse(text: str, model: type[DocT], source: str = "<string>") -> DocT:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise FileFormatError(f"{source}: invalid JSON ({e})") from e
    try:
        doc = model.model_validate(raw)
    except ValidationError as e:
        raise FileFormatError(f"{source}: {e.error_count()} schema error(s): {e.errors()[0]['msg']}") from e
    version = getattr(doc, "schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise FileFormatError(f"{source}: unsupported schema_version {version!r}")
    return doc


def readDoc(path: Path | str, model: type[DocT]) -> DocT:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise FileFormatError(f"{path}: cannot read ({e.strerror})") from e
    return parse(text, model, str(path))


@contextmanager
def atomic_write(path: Path | str) -> Iterator[IO[str]]:
    """Write to a sibling temporary file and rename it over ``path`` on success."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def writeDoc(path: Path | str, doc: BaseModel) -> None:
    text = dumps(doc)
    with atomic_write(path) as fh:
        fh.write(text)
    logger.debug("wrote %s (%d bytes)", path, len(text))


def load_state(path: Path | str, *, require_normalized: bool = True) -> TripartiteState:
    return toDomainState(readDoc(path, StateFile), require_normalized=require_normalized)


def save_state(path: Path | str, state: TripartiteState, metadata: dict[str, str] | None = None) -> None:
    writeDoc(path, fromDomainState(state, metadata))


def load_ensemble(path: Path | str) -> SeparableEnsemble:
    return toDomainEnsemble(readDoc(path, EnsembleFile))


def save_ensemble(path: Path | str, ens: SeparableEnsemble, metadata: dict[str, str] | None = None) -> None:
    writeDoc(path, fromDomainEnsemble(ens, metadata))


def load_canonical(path: Path | str) -> CanonicalForm:
    return toDomainCanonical(readDoc(path, CanonicalFile))


def save_canonical(
    path: Path | str, cf: CanonicalForm, diagnostics: ExtractionDiagnostics | None = None
) -> None:
    writeDoc(path, fromDomainCanonical(cf, diagnostics))


def truth_path(path: Path | str) -> Path:
    """``state.json`` -> ``state.truth.json``."""
    path = Path(path)
    return path.with_name(f"{path.stem}.truth{path.suffix or '.json'}")
