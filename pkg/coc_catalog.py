#!/usr/bin/env python3
"""
COC Algebra Catalog
===================

Reference Lie algebras shipped as JSON in catalog/, in the same format the CLI
accepts, each with a one-line description and the structure it must have:

    {"name": ..., "dim": ..., "basis": [...], "brackets": [...],
     "description": "...",
     "expected": {"radical_dim": 3, "semisimple_dim": 3,
                  "simple_ideals": [{"dim": 3, "compact": true}],
                  "gn_dim": 3, "solvable": false}}

Usage:
    from coc_catalog import catalog_get, catalog_names

    for name in catalog_names():
        entry = catalog_get(name)
        print(entry.name, entry.algebra.dim, entry.description)
"""

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional

from coc_algebra import LieAlgebra, to_raw, validate_algebra
from coc_config import Tolerances
from coc_errors import AlgebraFormatError, UnknownAlgebra

CATALOG_DIR = Path(__file__).parent / "catalog"


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    algebra: LieAlgebra
    expected: Dict[str, Any]
    description: str
    path: Path

    def to_dict(self) -> Dict[str, Any]:
        raw = to_raw(self.algebra)
        raw["description"] = self.description
        raw["expected"] = self.expected
        return raw

    def matches(self, report) -> Dict[str, Any]:
        """Expected fields that disagree with a structure report (empty if none)"""
        actual = {
            "radical_dim": report.radical.dim,
            "semisimple_dim": report.semisimple_dim,
            "simple_ideals": report.signature(),
            "gn_dim": report.g_n.dim,
            "solvable": report.solvable,
        }
        return {key: {"expected": value, "actual": actual[key]}
                for key, value in self.expected.items() if actual.get(key) != value}


@lru_cache(maxsize=1)
def _load_catalog() -> Dict[str, CatalogEntry]:
    entries: Dict[str, CatalogEntry] = {}
    for path in sorted(CATALOG_DIR.glob("*.json")):
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise AlgebraFormatError(f"Catalog file {path.name} is not valid JSON: {e}")
        algebra = validate_algebra(raw)
        if algebra.name in entries:
            raise AlgebraFormatError(f"Catalog name {algebra.name!r} is defined twice")
        entries[algebra.name] = CatalogEntry(
            name=algebra.name,
            algebra=algebra,
            expected=dict(raw.get("expected", {})),
            description=str(raw.get("description", "")),
            path=path,
        )
    return entries


def catalog_names() -> List[str]:
    return sorted(_load_catalog(), key=lambda name: (_load_catalog()[name].algebra.dim, name))


def catalog_get(name: str) -> CatalogEntry:
    entries = _load_catalog()
    if name not in entries:
        raise UnknownAlgebra(f"Unknown catalog algebra {name!r}; valid names: {', '.join(catalog_names())}",
                             {"valid": catalog_names()})
    return entries[name]


def catalog_algebra(name: str, tol: Optional[Tolerances] = None) -> LieAlgebra:
    """Catalog algebra, re-validated under the given tolerances"""
    entry = catalog_get(name)
    if tol is None:
        return entry.algebra
    return validate_algebra(json.loads(entry.path.read_text(encoding="utf-8")), tol)
