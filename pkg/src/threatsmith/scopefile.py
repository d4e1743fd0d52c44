"""On-disk scope representation (scope.json). Load/save round-trips."""
from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path

from .model import (
    DEFAULT_KEYWORDS,
    Component,
    ComponentKind,
    Scope,
)


class MissingScopeFile(FileNotFoundError):
    pass


class MalformedScopeFile(ValueError):
    pass


def _parse_timestamp(text: str) -> datetime:
    # Accept the JS toISOString() "Z" suffix, which Python 3.10 rejects.
    return datetime.fromisoformat(text.replace("Z", "+00:00"))


def scope_to_document(scope: Scope) -> dict:
    return {
        "name": scope.name,
        "created": scope.created.isoformat(),
        "components": [
            {
                "id": c.id,
                "kind": {
                    "name": c.kind.name,
                    "description": c.kind.description,
                    "custom": c.kind.custom,
                },
                "label": c.label,
                "keywords": list(c.keywords),
            }
            for c in scope.components
        ],
    }


def scope_from_document(doc: dict) -> Scope:
    try:
        components = tuple(
            Component(
                id=c["id"],
                kind=ComponentKind(
                    name=c["kind"]["name"],
                    description=c["kind"].get("description", ""),
                    custom=c["kind"].get("custom", False),
                ),
                label=c["label"],
                keywords=tuple(c["keywords"]),
            )
            for c in doc["components"]
        )
        return Scope(
            name=doc["name"],
            components=components,
            created=_parse_timestamp(doc["created"]),
        )
    except (KeyError, TypeError) as exc:
        raise MalformedScopeFile(str(exc)) from exc


def save_scope(scope: Scope, path: str | Path) -> None:
    text = json.dumps(scope_to_document(scope), sort_keys=True, indent=2) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def load_scope(path: str | Path) -> Scope:
    path = Path(path)
    if not path.exists():
        raise MissingScopeFile(str(path))
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedScopeFile(str(exc)) from exc
    return scope_from_document(doc)


def new_component_id(scope: Scope) -> str:
    existing = {c.id for c in scope.components}
    n = len(scope.components) + 1
    while f"c{n}" in existing:
        n += 1
    return f"c{n}"


def default_keywords_for(kind: ComponentKind) -> tuple[str, ...]:
    if kind.custom:
        return (kind.name.strip(),)
    return DEFAULT_KEYWORDS[kind.name]


def empty_scope(name: str) -> Scope:
    return Scope(name=name, components=(), created=datetime.now(timezone.utc))
