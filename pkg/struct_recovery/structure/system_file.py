#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
System file I/O.

Schema (UTF-8 JSON)::

    {
      "n": 3,
      "edges": [[1, 2], [2, 3]],
      "sensors": [{"id": "s1", "states": [3]}]
    }

``edges`` holds ``[j, i]`` pairs meaning ``x_j -> x_i``. Sensor ids are strings;
integer ids are accepted and stringified. Serialization is canonical: ``n``
first, edges sorted, sensors sorted by id with sorted states, two-space indent
and a trailing newline.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..errors import SystemFileError
from .pattern import SystemPattern

logger = logging.getLogger(__name__)


class SensorEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: str
    states: List[int] = Field(min_length=1)

    @field_validator("id", mode="before")
    @classmethod
    def _stringify_id(cls, value):
        if isinstance(value, bool):
            raise ValueError("sensor id must be a string or an integer")
        if isinstance(value, int):
            return str(value)
        return value


class SystemFileModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(ge=1)
    edges: List[Tuple[int, int]] = Field(default_factory=list)
    sensors: List[SensorEntry] = Field(default_factory=list)

    def to_pattern(self) -> SystemPattern:
        return SystemPattern.from_dict(self.model_dump())


def describe_validation_error(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err.get("loc", ()))
        parts.append(f"{loc or '<root>'}: {err.get('msg')}")
    return "; ".join(parts)


def load_json_document(text: str, path: Optional[str] = None):
    """Parse JSON text, mapping decode errors to ``SystemFileError`` with line/column."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SystemFileError(f"invalid JSON: {e.msg}", path=path, line=e.lineno, column=e.colno)


def read_text(path: Union[str, Path]) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise SystemFileError(f"cannot read file: {e}", path=str(path))


def parse_system(text: str, path: Optional[str] = None) -> SystemPattern:
    """Parse system-file text into a validated ``SystemPattern``."""
    document = load_json_document(text, path)
    return system_from_document(document, path)


def system_from_document(document, path: Optional[str] = None) -> SystemPattern:
    try:
        model = SystemFileModel.model_validate(document)
    except ValidationError as e:
        raise SystemFileError(describe_validation_error(e), path=path)
    return model.to_pattern()


def serialize_system(pattern: SystemPattern) -> str:
    return json.dumps(pattern.to_dict(), indent=2) + "\n"


def load_system(path: Union[str, Path]) -> SystemPattern:
    logger.debug(f"Loading system file {path}")
    return parse_system(read_text(path), str(path))


def save_system(pattern: SystemPattern, path: Union[str, Path]) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(serialize_system(pattern), encoding="utf-8")
    return target
