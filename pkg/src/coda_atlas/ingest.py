"""CSV ingestion, unit harmonization, the ratio catalog and report writing.

Input tables arrive as CSV with a fixed header prefix (id, label,
sector_code) followed by one column per part. Cells are parsed per locale
(point-decimal, or EU style with dot as thousands separator and comma as
decimal), converted to canonical units through an extensible registry, run
through the configured zero strategy and finally validated into an
IndicatorTable.

All numeric output uses point decimals with 17 significant digits, which
round-trips IEEE doubles exactly; report writing produces a manifest of
content hashes so reruns can be compared byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ._fmt import dumps_json, fmt_float
from .composition import (
    ClrMatrix,
    Entity,
    IndicatorTable,
    Part,
    RatioDefinition,
    replace_zeros,
    validate_table,
)
from .errors import (
    EmptyInput,
    InvalidOptions,
    IoFailure,
    ParseError,
    UnknownUnit,
)

LOCALES = ("point_decimal", "eu")

#: canonical unit → role used when a part is absent from the schema
_ROLE_FOR_UNIT = {
    "EUR_MM": "financial",
    "MWh": "environmental",
    "m3": "environmental",
    "t": "environmental",
    "headcount": "social",
}

#: part name → (canonical unit, role); the built-in eight-part layout
DEFAULT_PART_SCHEMA: dict[str, tuple[str, str]] = {
    "net_revenue": ("EUR_MM", "financial"),
    "total_assets": ("EUR_MM", "financial"),
    "total_liabilities": ("EUR_MM", "financial"),
    "energy_consumption": ("MWh", "environmental"),
    "water_consumption": ("m3", "environmental"),
    "waste_generation": ("t", "environmental"),
    "male_employees": ("headcount", "social"),
    "female_employees": ("headcount", "social"),
}


class UnitRegistry:
    """Canonical units plus multiplicative conversions into them.

    The default registry knows EUR_MM, MWh, m3, t, headcount and unitless,
    with the common prefixed neighbours (EUR, GWh, kWh, L, kg, kt). More
    canonical units and conversions can be registered at runtime; factors
    must be strictly positive and conversions compose by plain
    multiplication.
    """

    def __init__(self):
        self._canonical: set[str] = set()
        self._conversions: dict[str, tuple[str, float]] = {}

    @classmethod
    def default(cls) -> "UnitRegistry":
        reg = cls()
        for unit in ("EUR_MM", "MWh", "m3", "t", "headcount", "unitless"):
            reg.add_canonical(unit)
        reg.add_conversion("EUR", "EUR_MM", 1e-6)
        reg.add_conversion("GWh", "MWh", 1e3)
        reg.add_conversion("kWh", "MWh", 1e-3)
        reg.add_conversion("L", "m3", 1e-3)
        reg.add_conversion("kg", "t", 1e-3)
        reg.add_conversion("kt", "t", 1e3)
        return reg

    def add_canonical(self, unit: str) -> None:
        if not unit:
            raise InvalidOptions("canonical unit name must be non-empty")
        self._canonical.add(unit)

    def add_conversion(self, unit: str, canonical: str, factor: float) -> None:
        if canonical not in self._canonical:
            raise UnknownUnit(f"target unit {canonical!r} is not canonical")
        if not (factor > 0.0 and np.isfinite(factor)):
            raise InvalidOptions(f"conversion factor must be positive, got {factor}")
        self._conversions[unit] = (canonical, float(factor))

    def is_canonical(self, unit: str) -> bool:
        return unit in self._canonical

    def resolve(self, unit: str) -> tuple[str, float]:
        """Map a declared unit to (canonical unit, multiplicative factor)."""
        if unit in self._canonical:
            return unit, 1.0
        if unit in self._conversions:
            return self._conversions[unit]
        raise UnknownUnit(f"unit {unit!r} is not registered")


def default_ratio_catalog() -> tuple[RatioDefinition, ...]:
    """The five built-in named ratios over the default part layout."""
    return (
        RatioDefinition(
            "solvency", "total_assets", "total_liabilities",
            "total assets over total liabilities",
        ),
        RatioDefinition(
            "energy_intensity", "energy_consumption", "net_revenue",
            "energy consumed per million EUR of revenue",
        ),
        RatioDefinition(
            "water_intensity", "water_consumption", "net_revenue",
            "water consumed per million EUR of revenue",
        ),
        RatioDefinition(
            "waste_intensity", "waste_generation", "net_revenue",
            "waste generated per million EUR of revenue",
        ),
        RatioDefinition(
            "gender_employment_gap", "male_employees", "female_employees",
            "male employees per female employee",
        ),
    )


@dataclass(frozen=True)
class IngestConfig:
    """Parsing options: locale, declared units, zero strategy, ratio catalog.

    zero_strategy is either the string "reject" or a mapping
    {"multiplicative": delta} with delta in (0, 1]. extra_canonical_units and
    extra_conversions extend the default unit registry; extra_conversions
    maps a unit name to (canonical unit, factor).
    """

    locale: str = "point_decimal"
    unit_map: dict[str, str] = field(default_factory=dict)
    zero_strategy: str | dict = "reject"
    ratio_catalog: tuple[RatioDefinition, ...] = field(
        default_factory=default_ratio_catalog
    )
    extra_canonical_units: tuple[str, ...] = ()
    extra_conversions: dict[str, tuple[str, float]] = field(default_factory=dict)

    def __post_init__(self):
        if self.locale not in LOCALES:
            raise InvalidOptions(f"locale {self.locale!r} not in {LOCALES}")
        self._zero_mode()  # validates
        registry = self.registry()
        for column, unit in self.unit_map.items():
            try:
                registry.resolve(unit)
            except UnknownUnit as exc:
                raise UnknownUnit(f"column {column!r}: {exc.detail()}") from exc

    def _zero_mode(self) -> tuple[str, float]:
        strategy = self.zero_strategy
        if strategy == "reject":
            return "reject", 0.0
        if isinstance(strategy, Mapping) and set(strategy) == {"multiplicative"}:
            delta = float(strategy["multiplicative"])
            if not 0.0 < delta <= 1.0:
                raise InvalidOptions(f"delta must be in (0, 1], got {delta}")
            return "multiplicative", delta
        raise InvalidOptions(f"unrecognized zero strategy {strategy!r}")

    def registry(self) -> UnitRegistry:
        reg = UnitRegistry.default()
        for unit in self.extra_canonical_units:
            reg.add_canonical(unit)
        for unit, (canonical, factor) in self.extra_conversions.items():
            reg.add_conversion(unit, canonical, factor)
        return reg

    def to_json(self) -> str:
        doc = {
            "locale": self.locale,
            "unit_map": dict(self.unit_map),
            "zero_strategy": self.zero_strategy,
            "ratio_catalog": [
                {
                    "name": r.name,
                    "numerator": r.numerator,
                    "denominator": r.denominator,
                    "description": r.description,
                }
                for r in self.ratio_catalog
            ],
            "extra_canonical_units": list(self.extra_canonical_units),
            "extra_conversions": {
                unit: [canonical, factor]
                for unit, (canonical, factor) in self.extra_conversions.items()
            },
        }
        return dumps_json(doc)

    @classmethod
    def from_json(cls, text: str | bytes) -> "IngestConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(
                line=exc.lineno, column=exc.colno, token="", reason=exc.msg
            ) from exc
        if not isinstance(doc, dict):
            raise InvalidOptions("config document must be a JSON object")
        known = {
            "locale", "unit_map", "zero_strategy", "ratio_catalog",
            "extra_canonical_units", "extra_conversions",
        }
        unknown = set(doc) - known
        if unknown:
            raise InvalidOptions(f"unrecognized config keys: {sorted(unknown)}")
        kwargs: dict = {}
        if "locale" in doc:
            kwargs["locale"] = doc["locale"]
        if "unit_map" in doc:
            kwargs["unit_map"] = dict(doc["unit_map"])
        if "zero_strategy" in doc:
            kwargs["zero_strategy"] = doc["zero_strategy"]
        if "ratio_catalog" in doc:
            kwargs["ratio_catalog"] = tuple(
                RatioDefinition(
                    name=r["name"],
                    numerator=r["numerator"],
                    denominator=r["denominator"],
                    description=r.get("description", ""),
                )
                for r in doc["ratio_catalog"]
            )
        if "extra_canonical_units" in doc:
            kwargs["extra_canonical_units"] = tuple(doc["extra_canonical_units"])
        if "extra_conversions" in doc:
            kwargs["extra_conversions"] = {
                unit: (pair[0], float(pair[1]))
                for unit, pair in doc["extra_conversions"].items()
            }
        return cls(**kwargs)


def _parse_number(token: str, locale: str, line: int, column: int) -> float:
    text = token.strip()
    if not text:
        raise ParseError(line=line, column=column, token=token, reason="empty cell")
    if locale == "point_decimal":
        if "," in text:
            raise ParseError(
                line=line, column=column, token=token,
                reason="comma in point-decimal locale",
            )
        normalized = text
    else:
        normalized = text.replace(".", "").replace(",", ".")
    try:
        return float(normalized)
    except ValueError:
        raise ParseError(
            line=line, column=column, token=token, reason="not a number"
        ) from None


def parse_table(data: bytes | str, config: IngestConfig | None = None) -> IndicatorTable:
    """Parse a CSV indicator table into a validated IndicatorTable.

    The header must read id,label,sector_code followed by at least two part
    columns. Cell failures raise ParseError with 1-based line and column;
    value-contract failures surface as the usual validation errors with
    0-based row/column indices into the data block.
    """
    if config is None:
        config = IngestConfig()
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(
                line=1, column=1, token="", reason=f"not UTF-8: {exc.reason}"
            ) from exc

    rows = list(csv.reader(io.StringIO(data)))
    if not rows:
        raise EmptyInput("no CSV content")
    header = [cell.strip() for cell in rows[0]]
    for position, expected in enumerate(("id", "label", "sector_code")):
        got = header[position] if position < len(header) else ""
        if got != expected:
            raise ParseError(
                line=1, column=position + 1, token=got,
                reason=f"expected header column {expected!r}",
            )
    part_names = header[3:]

    registry = config.registry()
    parts = []
    factors = []
    for index, name in enumerate(part_names):
        if name in config.unit_map:
            canonical, factor = registry.resolve(config.unit_map[name])
            role = DEFAULT_PART_SCHEMA.get(name, (None, None))[1]
            if role is None:
                role = _ROLE_FOR_UNIT.get(canonical, "financial")
        elif name in DEFAULT_PART_SCHEMA:
            canonical, role = DEFAULT_PART_SCHEMA[name]
            factor = 1.0
        else:
            canonical, factor = "unitless", 1.0
            role = "financial"
        parts.append(Part(index=index, name=name, unit=canonical, role=role))
        factors.append(factor)

    entities = []
    values = []
    for row_number, row in enumerate(rows[1:], start=2):
        cells = [cell.strip() for cell in row]
        if len(cells) != len(header):
            raise ParseError(
                line=row_number, column=min(len(cells) + 1, len(header)),
                token="", reason=f"expected {len(header)} cells, got {len(cells)}",
            )
        if not cells[0]:
            raise ParseError(
                line=row_number, column=1, token="", reason="empty entity id"
            )
        entities.append(Entity(id=cells[0], label=cells[1], sector_code=cells[2]))
        values.append(
            [
                _parse_number(cells[3 + k], config.locale, row_number, 4 + k)
                for k in range(len(part_names))
            ]
        )
    if not entities:
        raise EmptyInput("no data rows")

    raw = np.asarray(values, dtype=float) * np.asarray(factors, dtype=float)
    mode, delta = config._zero_mode()
    raw = replace_zeros(raw, strategy=mode, delta=delta)
    return validate_table(raw, parts, entities)


def serialize_table(table: IndicatorTable) -> str:
    """Render a table as CSV in canonical units and point-decimal notation.

    Values use 17 significant digits, so parse(serialize(t)) reproduces t
    exactly (pass table_config(t) when t uses non-default part names).
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["id", "label", "sector_code"] + list(table.part_names))
    for r, entity in enumerate(table.entities):
        writer.writerow(
            [entity.id, entity.label, entity.sector_code]
            + [fmt_float(v) for v in table.values[r]]
        )
    return buffer.getvalue()


def table_config(table: IndicatorTable) -> IngestConfig:
    """A config under which serialize_table(table) parses back exactly.

    Declares each part's canonical unit and registers any units the default
    registry does not know.
    """
    default_registry = UnitRegistry.default()
    extra = tuple(
        sorted({p.unit for p in table.parts if not default_registry.is_canonical(p.unit)})
    )
    return IngestConfig(
        unit_map={p.name: p.unit for p in table.parts},
        extra_canonical_units=extra,
    )


def clr_csv(clr: ClrMatrix) -> str:
    """CSV rendering of a CLR matrix: id column plus one column per part."""
    lines = [",".join(["id"] + [p.name for p in clr.parts])]
    for r, eid in enumerate(clr.entity_ids):
        lines.append(",".join([eid] + [fmt_float(v) for v in clr.values[r]]))
    return "\n".join(lines) + "\n"


def write_reports(outputs: Mapping[str, str | bytes], directory: str) -> dict:
    """Write report files plus a manifest.json of name, sha256 and size.

    Returns the manifest document. Writing the same outputs twice yields
    byte-identical files and manifest.
    """
    try:
        os.makedirs(directory, exist_ok=True)
        entries = []
        for name in sorted(outputs):
            content = outputs[name]
            blob = content.encode("utf-8") if isinstance(content, str) else content
            with open(os.path.join(directory, name), "wb") as handle:
                handle.write(blob)
            entries.append(
                {
                    "name": name,
                    "sha256": hashlib.sha256(blob).hexdigest(),
                    "bytes": len(blob),
                }
            )
        manifest = {"files": entries}
        with open(os.path.join(directory, "manifest.json"), "wb") as handle:
            handle.write(dumps_json(manifest).encode("utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot write reports to {directory!r}: {exc}") from exc
    return manifest
