"""Challenge-reporting schema: the parameter registry and description documents.

A description document is a JSON object with one object per category id;
each parameter id maps to ``null`` (not reported) or ``{"value": ..., "notes": ...}``.
An optional top-level ``"metadata"`` object carries ``document_id`` and
``version``.  Absent categories and parameters count as not reported.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from ..errors import SchemaParseError, SchemaValidationError

ESSENTIAL_GATE_PCT = 90.0
METADATA_KEY = "metadata"


@dataclass(frozen=True)
class Parameter:
    number: int
    id: str
    name: str
    category: str
    essential: bool
    description: str


@dataclass(frozen=True)
class ParameterRegistry:
    version: str
    categories: tuple[tuple[str, str], ...]  # (id, display name)
    parameters: tuple[Parameter, ...]
    notes: tuple[str, ...] = ()

    @property
    def category_ids(self) -> tuple[str, ...]:
        return tuple(c for c, _ in self.categories)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.parameters)

    @property
    def essential_ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.parameters if p.essential)

    def by_id(self, pid: str) -> Parameter:
        return self._index()[pid]

    def in_category(self, cid: str) -> tuple[Parameter, ...]:
        return tuple(p for p in self.parameters if p.category == cid)

    def _index(self):
        return {p.id: p for p in self.parameters}


@lru_cache(maxsize=None)
def registry() -> ParameterRegistry:
    """The embedded parameter registry (``registry.json`` in this package)."""
    raw = json.loads(resources.files(__package__).joinpath("registry.json").read_text("utf-8"))
    params = tuple(Parameter(**p) for p in raw["parameters"])
    cats = tuple((c["id"], c["name"]) for c in raw["categories"])
    return ParameterRegistry(raw["registry_version"], cats, params, tuple(raw.get("notes", ())))


@dataclass(frozen=True)
class Instantiation:
    value: object
    notes: str | None = None

    def as_dict(self) -> dict:
        out = {"value": self.value}
        if self.notes is not None:
            out["notes"] = self.notes
        return out


@dataclass(frozen=True)
class ChallengeDescription:
    """Status of every registry parameter: an :class:`Instantiation` or ``None``."""

    entries: dict[str, Instantiation | None]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        reg = registry()
        unknown = set(self.entries) - set(reg.ids)
        if unknown:
            raise SchemaValidationError(f"unknown parameter id(s): {sorted(unknown)}")
        full = {pid: self.entries.get(pid) for pid in reg.ids}
        object.__setattr__(self, "entries", full)

    @classmethod
    def empty(cls, **metadata) -> "ChallengeDescription":
        return cls({}, dict(metadata))

    def instantiated(self, pid: str) -> bool:
        return self.entries[pid] is not None

    def with_value(self, pid: str, value, notes=None) -> "ChallengeDescription":
        entries = dict(self.entries)
        entries[pid] = Instantiation(value, notes) if _reported(value) else None
        return ChallengeDescription(entries, dict(self.metadata))


def _reported(value) -> bool:
    if value is None:
        return False
    if isinstance(value, str):
        return bool(value.strip())
    if isinstance(value, (list, dict)):
        return bool(value)
    return True


def _parse(document):
    if isinstance(document, (bytes, bytearray)):
        document = document.decode("utf-8")
    if isinstance(document, str):
        try:
            return json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    return document


def load_description(document) -> ChallengeDescription:
    """Validate and normalize a description given as JSON text or a parsed dict."""
    doc = _parse(document)
    if not isinstance(doc, dict):
        raise SchemaValidationError("description must be a JSON object")
    reg = registry()
    entries: dict[str, Instantiation | None] = {}
    metadata = doc.get(METADATA_KEY) or {}
    if not isinstance(metadata, dict):
        raise SchemaValidationError("'metadata' must be an object")
    for key, body in doc.items():
        if key == METADATA_KEY:
            continue
        if key not in reg.category_ids:
            raise SchemaValidationError(f"unknown category {key!r}")
        if not isinstance(body, dict):
            raise SchemaValidationError(f"category {key!r} must be an object")
        allowed = {p.id for p in reg.in_category(key)}
        for pid, item in body.items():
            if pid not in allowed:
                where = next((p.category for p in reg.parameters if p.id == pid), None)
                hint = f" (belongs to {where!r})" if where else ""
                raise SchemaValidationError(f"unknown parameter {pid!r} in category {key!r}{hint}")
            if item is None:
                entries[pid] = None
                continue
            if not isinstance(item, dict) or "value" not in item or set(item) - {"value", "notes"}:
                raise SchemaValidationError(f"parameter {pid!r} must be null or an object with 'value' and optional 'notes'")
            notes = item.get("notes")
            if notes is not None and not isinstance(notes, str):
                raise SchemaValidationError(f"notes of {pid!r} must be text")
            entries[pid] = Instantiation(item["value"], notes) if _reported(item["value"]) else None
    return ChallengeDescription(entries, dict(metadata))


def read_description(path) -> ChallengeDescription:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return load_description(text)
    except SchemaParseError as exc:
        raise SchemaParseError(f"{path}: {exc}") from None


def serialize_description(desc: ChallengeDescription) -> dict:
    reg = registry()
    out = {}
    if desc.metadata:
        out[METADATA_KEY] = dict(desc.metadata)
    for cid in reg.category_ids:
        out[cid] = {
            p.id: (None if desc.entries[p.id] is None else desc.entries[p.id].as_dict())
            for p in reg.in_category(cid)
        }
    return out


def dumps_description(desc: ChallengeDescription) -> str:
    return json.dumps(serialize_description(desc), indent=2, ensure_ascii=False) + "\n"


@dataclass(frozen=True)
class CompletenessReport:
    overall_pct: float
    per_category_pct: dict[str, float]
    essential_pct: float
    essential_gate_passed: bool
    instantiated: int
    essential_instantiated: int
    missing: tuple[str, ...]

    def as_dict(self) -> dict:
        return {
            "overall_pct": self.overall_pct,
            "per_category_pct": dict(self.per_category_pct),
            "essential_pct": self.essential_pct,
            "essential_gate_pct": ESSENTIAL_GATE_PCT,
            "essential_gate_passed": self.essential_gate_passed,
            "instantiated": self.instantiated,
            "essential_instantiated": self.essential_instantiated,
            "missing": list(self.missing),
        }


def completeness(desc: ChallengeDescription) -> CompletenessReport:
    reg = registry()
    done = [pid for pid in reg.ids if desc.instantiated(pid)]
    ess = [pid for pid in reg.essential_ids if desc.instantiated(pid)]
    per_cat = {}
    for cid in reg.category_ids:
        members = reg.in_category(cid)
        per_cat[cid] = 100 * sum(desc.instantiated(p.id) for p in members) / len(members)
    essential_pct = 100 * len(ess) / len(reg.essential_ids)
    return CompletenessReport(
        overall_pct=100 * len(done) / len(reg.ids),
        per_category_pct=per_cat,
        essential_pct=essential_pct,
        essential_gate_passed=essential_pct >= ESSENTIAL_GATE_PCT,
        instantiated=len(done),
        essential_instantiated=len(ess),
        missing=tuple(pid for pid in reg.ids if not desc.instantiated(pid)),
    )


def coverage_band(pct: float) -> str:
    """Traffic-light band; 50 and 90 themselves are orange."""
    if pct < 50:
        return "red"
    if pct <= 90:
        return "orange"
    return "green"


@dataclass(frozen=True)
class ParameterCoverage:
    parameter: str
    pct: float
    band: str
    instantiated: int
    total: int


def coverage_stats(descs) -> list[ParameterCoverage]:
    descs = list(descs)
    if not descs:
        raise SchemaValidationError("coverage needs at least one description")
    out = []
    for pid in registry().ids:
        k = sum(d.instantiated(pid) for d in descs)
        pct = 100 * k / len(descs)
        out.append(ParameterCoverage(pid, pct, coverage_band(pct), k, len(descs)))
    return out
