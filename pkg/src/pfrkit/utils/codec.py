"""JSON reading and writing for bodies, sets, progressions and reports.

Exact numbers travel as "p/q" strings; plain JSON integers are accepted on input.
"""

import json
from pathlib import Path
from typing import Any, Optional, TextIO, Union

from ..core.errors import DomainError
from ..modules.bodies import SymmetricBody
from ..modules.groups import AmbientGroup, CoordinateKind, FiniteSet
from ..modules.progressions import Frame, Progression, ProgressionKind
from . import rational as rq


def load_json(path: Union[str, Path]) -> Any:
    """Read a JSON document, mapping I/O and syntax errors to DomainError."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise DomainError(f"Input file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise DomainError(f"Invalid JSON in {path}: {e}") from e


def dumps(document: Any) -> str:
    """Deterministic rendering: sorted keys, two-space indent, trailing newline."""
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_document(document: Any, out: Optional[Union[str, Path]] = None, stream: Optional[TextIO] = None) -> None:
    text = dumps(document)
    if out is not None:
        Path(out).write_text(text, encoding="utf-8")
    if stream is not None:
        stream.write(text)


def _field(data: dict, key: str, what: str) -> Any:
    try:
        return data[key]
    except (KeyError, TypeError) as e:
        raise DomainError(f"{what} JSON is missing '{key}'") from e


def body_from_dict(data: dict) -> SymmetricBody:
    kind = _field(data, "type", "Body")
    if kind == "ellipsoid":
        return SymmetricBody.ellipsoid(_field(data, "gram", "Ellipsoid"))
    if kind == "polytope":
        return SymmetricBody.polytope(_field(data, "forms", "Polytope"))
    if kind == "box":
        return SymmetricBody.box(_field(data, "radii", "Box"))
    raise DomainError(f"Unknown body type: {kind!r}")


def _group(data: dict, points) -> AmbientGroup:
    m = int(_field(data, "m", "Set"))
    kind = data.get("kind") or data.get("group")
    if kind is None:
        integral = all(rq.is_integral(rq.vector(p)) for p in points)
        kind = CoordinateKind.INTEGER if integral else CoordinateKind.RATIONAL
    try:
        return AmbientGroup(m, CoordinateKind(kind))
    except ValueError as e:
        raise DomainError(f"Unknown coordinate kind: {kind!r}") from e


def set_from_dict(data: dict) -> FiniteSet:
    elements = _field(data, "elements", "Set")
    group = _group(data, elements)
    return FiniteSet.of(group, elements)


def frame_from_dict(data: dict) -> Frame:
    a0 = _field(data, "a0", "Frame")
    gens = _field(data, "gens", "Frame")
    if "m" not in data:
        data = {**data, "m": len(a0)}
    group = _group(data, [a0, *gens])
    return Frame.of(group, a0, gens)


def progression_from_dict(data: dict) -> Progression:
    frame = frame_from_dict(_field(data, "frame", "Progression"))
    body = body_from_dict(_field(data, "body", "Progression"))
    center = data.get("center")
    center = rq.vector(center) if center is not None else tuple(rq.vector([0] * body.dim))
    try:
        kind = ProgressionKind(_field(data, "kind", "Progression"))
    except ValueError as e:
        raise DomainError(f"Unknown progression kind: {data.get('kind')!r}") from e
    return Progression(frame, body, center, kind)


def load_body(path) -> SymmetricBody:
    return body_from_dict(load_json(path))


def load_set(path) -> FiniteSet:
    return set_from_dict(load_json(path))


def load_progression(path) -> Progression:
    return progression_from_dict(load_json(path))
