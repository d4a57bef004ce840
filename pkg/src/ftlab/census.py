"""Location censuses for extended rectangles on the bilinear array.

An extended rectangle (exRec) is a logical gadget bracketed by leading
and trailing error-correction stages.  Its census records how many
fault locations of each kind it contains and how many time steps it
occupies.  Level-1 counts depend on the physical readout latency, so
every entry is affine in ``t_r``; level-n counts are constants.
"""

from __future__ import annotations

import enum
import json
import os
from dataclasses import dataclass, field
from typing import Mapping, Union


class LocationKind(enum.Enum):
    """Fault-location classes distinguished by the failure model."""

    Memory = "memory"
    Swap = "swap"
    TGate = "tgate"
    Readout = "readout"


# Canonical serialization order for gadgets and count fields.
GADGET_ORDER: tuple[str, ...] = ("memory", "swap", "tgate", "readout")
_KIND_ORDER: tuple[LocationKind, ...] = (
    LocationKind.Memory,
    LocationKind.Swap,
    LocationKind.TGate,
    LocationKind.Readout,
)

# Depth of each gadget's exRec as a multiple of the memory exRec depth.
DEPTH_RATIOS: Mapping[str, int] = {
    "memory": 1,
    "swap": 1,
    "tgate": 5,
    "readout": 2,
}

# Readout locations come in units of one transversal measurement of a
# seven-qubit block plus the verification readout of its replacement.
READOUT_QUANTUM = 14


class CensusError(ValueError):
    """Raised when census data violates the storage schema."""


@dataclass(frozen=True)
class AffineCount:
    """A location count of the form ``base + slope * t_r``."""

    base: float
    slope: float = 0.0

    def __post_init__(self) -> None:
        if self.base < 0:
            raise ValueError(f"negative count: base={self.base}")
        if self.slope < 0:
            raise ValueError(f"negative count: slope={self.slope}")

    def at(self, t_r: float) -> float:
        """Evaluate the count at readout latency ``t_r``."""
        if t_r < 0:
            raise ValueError(f"readout latency must be nonnegative, got {t_r}")
        return self.base + self.slope * t_r


@dataclass(frozen=True)
class ExRecCensus:
    """Fault-location census of a single extended rectangle."""

    gadget: str
    counts: Mapping[LocationKind, AffineCount]
    depth: AffineCount

    def __post_init__(self) -> None:
        if self.gadget not in GADGET_ORDER:
            raise ValueError(f"unknown gadget: {self.gadget!r}")
        object.__setattr__(self, "counts", dict(self.counts))


@dataclass(frozen=True)
class CensusSet:
    """Censuses for every gadget at level 1 and at a generic level n."""

    level1: Mapping[str, ExRecCensus]
    leveln: Mapping[str, ExRecCensus]

    def __post_init__(self) -> None:
        object.__setattr__(self, "level1", dict(self.level1))
        object.__setattr__(self, "leveln", dict(self.leveln))


def count_at(census: ExRecCensus, kind: LocationKind, t_r: float) -> float:
    """Number of ``kind`` locations in ``census`` at readout latency ``t_r``.

    A kind absent from the census contributes zero locations.
    """
    entry = census.counts.get(kind)
    if entry is None:
        if t_r < 0:
            raise ValueError(f"readout latency must be nonnegative, got {t_r}")
        return 0.0
    return entry.at(t_r)


def paper_census() -> CensusSet:
    """The published census for the bilinear-array exRec constructions."""
    _m, _s, _t, _r = _KIND_ORDER

    def row(gadget: str, counts: dict, depth: AffineCount) -> ExRecCensus:
        return ExRecCensus(gadget=gadget, counts=counts, depth=depth)

    level1 = {
        "memory": row(
            "memory",
            {_m: AffineCount(654, 28), _s: AffineCount(408), _r: AffineCount(40)},
            AffineCount(41, 2),
        ),
        "swap": row(
            "swap",
            {_m: AffineCount(1002, 56), _s: AffineCount(1122), _r: AffineCount(80)},
            AffineCount(41, 2),
        ),
        "tgate": row(
            "tgate",
            {_m: AffineCount(3032, 133), _s: AffineCount(1228), _r: AffineCount(128)},
            AffineCount(205, 10),
        ),
        "readout": row(
            "readout",
            {_m: AffineCount(1045, 42), _s: AffineCount(510), _r: AffineCount(57)},
            AffineCount(82, 4),
        ),
    }
    leveln = {
        "memory": row(
            "memory",
            {_m: AffineCount(558), _s: AffineCount(204), _t: AffineCount(0), _r: AffineCount(28)},
            AffineCount(38),
        ),
        "swap": row(
            "swap",
            {_m: AffineCount(824), _s: AffineCount(603), _t: AffineCount(0), _r: AffineCount(56)},
            AffineCount(38),
        ),
        "tgate": row(
            "tgate",
            {_m: AffineCount(2605), _s: AffineCount(619), _t: AffineCount(28), _r: AffineCount(98)},
            AffineCount(190),
        ),
        "readout": row(
            "readout",
            {_m: AffineCount(974), _s: AffineCount(255), _t: AffineCount(0), _r: AffineCount(42)},
            AffineCount(76),
        ),
    }
    return CensusSet(level1=level1, leveln=leveln)


# ---------------------------------------------------------------------------
# JSON persistence


def _count_to_json(count: AffineCount) -> dict:
    return {"base": float(count.base), "slope": float(count.slope)}


def _census_to_json(census: ExRecCensus) -> dict:
    out: dict = {}
    for kind in _KIND_ORDER:
        if kind in census.counts:
            out[kind.value] = _count_to_json(census.counts[kind])
    out["depth"] = _count_to_json(census.depth)
    return out


def save_census(census_set: CensusSet, path: Union[str, os.PathLike]) -> None:
    """Write ``census_set`` to ``path`` in the canonical JSON layout."""
    doc = {
        "level1": {
            g: _census_to_json(census_set.level1[g])
            for g in GADGET_ORDER
            if g in census_set.level1
        },
        "leveln": {
            g: _census_to_json(census_set.leveln[g])
            for g in GADGET_ORDER
            if g in census_set.leveln
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _parse_count(obj: object, where: str) -> AffineCount:
    if not isinstance(obj, dict):
        raise CensusError(f"{where}: expected an object with base/slope")
    unknown = set(obj) - {"base", "slope"}
    if unknown:
        raise CensusError(f"{where}: unknown field {sorted(unknown)[0]!r}")
    for key in ("base", "slope"):
        if key not in obj:
            raise CensusError(f"{where}: missing field {key!r}")
        value = obj[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise CensusError(f"{where}.{key}: expected a number, got {value!r}")
        if value < 0:
            raise CensusError(f"{where}.{key}: negative count {value!r}")
    return AffineCount(base=float(obj["base"]), slope=float(obj["slope"]))


def _parse_census(gadget: str, obj: object, where: str) -> ExRecCensus:
    if not isinstance(obj, dict):
        raise CensusError(f"{where}: expected an object")
    allowed = {k.value for k in _KIND_ORDER} | {"depth"}
    unknown = set(obj) - allowed
    if unknown:
        raise CensusError(f"{where}: unknown field {sorted(unknown)[0]!r}")
    required = {"memory", "swap", "readout", "depth"}
    missing = required - set(obj)
    if missing:
        raise CensusError(f"{where}: missing field {sorted(missing)[0]!r}")
    counts = {
        kind: _parse_count(obj[kind.value], f"{where}.{kind.value}")
        for kind in _KIND_ORDER
        if kind.value in obj
    }
    depth = _parse_count(obj["depth"], f"{where}.depth")
    return ExRecCensus(gadget=gadget, counts=counts, depth=depth)


def _parse_level(obj: object, where: str) -> dict[str, ExRecCensus]:
    if not isinstance(obj, dict):
        raise CensusError(f"{where}: expected an object keyed by gadget")
    unknown = set(obj) - set(GADGET_ORDER)
    if unknown:
        raise CensusError(f"{where}: unknown gadget {sorted(unknown)[0]!r}")
    missing = set(GADGET_ORDER) - set(obj)
    if missing:
        raise CensusError(f"{where}: missing gadget {sorted(missing)[0]!r}")
    return {g: _parse_census(g, obj[g], f"{where}.{g}") for g in GADGET_ORDER}


def load_census(path: Union[str, os.PathLike]) -> CensusSet:
    """Read a census set from the JSON layout written by :func:`save_census`."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CensusError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise CensusError("top level: expected an object")
    unknown = set(doc) - {"level1", "leveln"}
    if unknown:
        raise CensusError(f"top level: unknown field {sorted(unknown)[0]!r}")
    for key in ("level1", "leveln"):
        if key not in doc:
            raise CensusError(f"top level: missing field {key!r}")
    return CensusSet(
        level1=_parse_level(doc["level1"], "level1"),
        leveln=_parse_level(doc["leveln"], "leveln"),
    )


# ---------------------------------------------------------------------------
# Structural validation


def _affine_repr(count: AffineCount) -> str:
    if count.slope == 0:
        return f"{count.base:g}"
    return f"{count.base:g}+{count.slope:g}*t_r"


def validate(census_set: CensusSet) -> list[str]:
    """Check structural invariants; returns one message per violation.

    The rules are: every gadget's depth is a fixed multiple of the
    memory-gadget depth at every readout latency, level-n entries carry
    no latency dependence, and level-n readout counts for the memory
    and swap gadgets are whole multiples of one block measurement.
    """
    violations: list[str] = []

    for level_name, level in (("level1", census_set.level1), ("leveln", census_set.leveln)):
        base_row = level.get("memory")
        if base_row is None:
            violations.append(f"{level_name}: missing gadget 'memory'")
            continue
        for gadget, ratio in DEPTH_RATIOS.items():
            row = level.get(gadget)
            if row is None:
                violations.append(f"{level_name}: missing gadget {gadget!r}")
                continue
            want_base = ratio * base_row.depth.base
            want_slope = ratio * base_row.depth.slope
            if (row.depth.base, row.depth.slope) != (want_base, want_slope):
                violations.append(
                    f"{level_name}.{gadget}: depth {_affine_repr(row.depth)} is not "
                    f"{ratio}x memory depth (expected "
                    f"{_affine_repr(AffineCount(want_base, want_slope))})"
                )

    for gadget, row in census_set.leveln.items():
        for kind, count in row.counts.items():
            if count.slope != 0:
                violations.append(
                    f"leveln.{gadget}.{kind.value}: slope {count.slope:g} "
                    f"(level-n counts must be constant)"
                )
        if row.depth.slope != 0:
            violations.append(
                f"leveln.{gadget}.depth: slope {row.depth.slope:g} "
                f"(level-n depths must be constant)"
            )

    for gadget in ("memory", "swap"):
        row = census_set.leveln.get(gadget)
        if row is None:
            continue
        readout = row.counts.get(LocationKind.Readout)
        if readout is None:
            violations.append(f"leveln.{gadget}: missing readout count")
            continue
        if readout.base % READOUT_QUANTUM != 0:
            violations.append(
                f"leveln.{gadget}.readout: count {readout.base:g} is not a "
                f"multiple of {READOUT_QUANTUM}"
            )

    return violations
