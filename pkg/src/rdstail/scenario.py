"""Scenario files: a single JSON document declaring named driving systems,
metric spaces, bundle systems, covers/partitions, measures, subshifts, and
factor maps, with exact rationals encoded as strings ("1/2").

Loading resolves every reference and validates every object; any violation
is reported with the object's name and the invariant it breaks.  The format
is versioned (``schema_version``) and documented in ``scenarios/SCHEMA.md``.
Point ids in scenario files are strings; composite points only arise from
derived systems constructed in code.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .covers import RandomCover, RandomPartition, RandomSet, validate_cover
from .errors import RdstailError
from .measures import FiberedMeasure
from .model import BundleRDS, DrivingSystem, FactorMap, MetricSpace, point_key, sort_points
from .symbolic import RandomSFT, SFTComponent

SCHEMA_VERSION = 1


class ScenarioError(RdstailError):
    """Malformed, dangling, or invalid scenario content."""


def _frac(value: Any, where: str) -> Fraction:
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise ScenarioError(f"{where}: cannot parse exact rational from {value!r}") from exc


@dataclass
class Scenario:
    driving: dict[str, DrivingSystem] = field(default_factory=dict)
    spaces: dict[str, MetricSpace] = field(default_factory=dict)
    systems: dict[str, BundleRDS] = field(default_factory=dict)
    covers: dict[str, RandomCover] = field(default_factory=dict)
    cover_system: dict[str, str] = field(default_factory=dict)
    measures: dict[str, FiberedMeasure] = field(default_factory=dict)
    measure_system: dict[str, str] = field(default_factory=dict)
    sfts: dict[str, RandomSFT] = field(default_factory=dict)
    factor_maps: dict[str, FactorMap] = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    def digest(self) -> str:
        return canonical_digest(self.raw)

    def system_of_cover(self, name: str) -> BundleRDS:
        return self.systems[self.cover_system[name]]


def _lookup(table: dict, name: str, kind: str, owner: str) -> Any:
    if name not in table:
        raise ScenarioError(f"{owner}: unknown {kind} {name!r}")
    return table[name]


def loads_scenario(text: str, source: str = "<string>") -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ScenarioError(f"{source}: top level must be an object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"{source}: unsupported schema_version {version!r}")
    sc = Scenario(raw=doc)

    for name, spec in doc.get("driving_systems", {}).items():
        where = f"driving system {name!r}"
        prob = tuple(_frac(v, where) for v in spec["prob"])
        theta = tuple(int(v) for v in spec["theta"])
        try:
            sc.driving[name] = DrivingSystem(prob=prob, theta=theta)
        except ValueError as exc:
            raise ScenarioError(f"{where}: {exc}") from exc

    for name, spec in doc.get("metric_spaces", {}).items():
        where = f"metric space {name!r}"
        points = tuple(spec["points"])
        matrix = [[_frac(v, where) for v in row] for row in spec["dist"]]
        space = MetricSpace.from_matrix(points, matrix)
        bad = space.validate()
        if bad:
            raise ScenarioError(f"{where}: " + "; ".join(bad))
        sc.spaces[name] = space

    for name, spec in doc.get("systems", {}).items():
        where = f"system {name!r}"
        base = _lookup(sc.driving, spec["base"], "driving system", where)
        space = _lookup(sc.spaces, spec["space"], "metric space", where) if "space" in spec else None
        fibers = tuple(frozenset(f) for f in spec["fibers"])
        maps = tuple(dict(m) for m in spec["maps"])
        try:
            rds = BundleRDS(base=base, fibers=fibers, maps=maps, space=space)
        except ValueError as exc:
            raise ScenarioError(f"{where}: {exc}") from exc
        from .model import validate_system

        bad = validate_system(rds)
        if bad:
            raise ScenarioError(f"{where}: " + "; ".join(bad))
        sc.systems[name] = rds

    for name, spec in doc.get("covers", {}).items():
        where = f"cover {name!r}"
        system_name = spec["system"]
        rds = _lookup(sc.systems, system_name, "system", where)
        elements = tuple(
            RandomSet(tuple(frozenset(sec) for sec in elem)) for elem in spec["elements"]
        )
        cls = RandomPartition if spec.get("partition") else RandomCover
        cover = cls(elements, label=name)
        bad = validate_cover(cover, rds)
        if bad:
            raise ScenarioError(f"{where}: " + "; ".join(bad))
        sc.covers[name] = cover
        sc.cover_system[name] = system_name

    for name, spec in doc.get("measures", {}).items():
        where = f"measure {name!r}"
        system_name = spec["system"]
        rds = _lookup(sc.systems, system_name, "system", where)
        weights = tuple(
            {x: _frac(v, where) for x, v in w.items()} for w in spec["weights"]
        )
        mu = FiberedMeasure(weights)
        bad = mu.validate(rds)
        if bad:
            raise ScenarioError(f"{where}: " + "; ".join(bad))
        sc.measures[name] = mu
        sc.measure_system[name] = system_name

    for name, spec in doc.get("sfts", {}).items():
        where = f"sft {name!r}"
        base = _lookup(sc.driving, spec["base"], "driving system", where)
        comps = tuple(
            SFTComponent(
                alphabet=int(c["alphabet"]),
                matrices=tuple(tuple(tuple(int(v) for v in row) for row in m) for m in c["matrices"]),
            )
            for c in spec["components"]
        )
        try:
            sft = RandomSFT(base=base, components=comps)
        except ValueError as exc:
            raise ScenarioError(f"{where}: {exc}") from exc
        bad = sft.validate()
        if bad:
            raise ScenarioError(f"{where}: " + "; ".join(bad))
        sc.sfts[name] = sft

    for name, spec in doc.get("factor_maps", {}).items():
        where = f"factor map {name!r}"
        source = _lookup(sc.systems, spec["source"], "system", where)
        target = _lookup(sc.systems, spec["target"], "system", where)
        maps = tuple(dict(m) for m in spec["maps"])
        pi = FactorMap(source=source, target=target, maps=maps)
        bad = pi.validate()
        if bad:
            raise ScenarioError(f"{where}: " + "; ".join(bad))
        sc.factor_maps[name] = pi

    return sc


def load_scenario(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_scenario(fh.read(), source=str(path))


# ---------------------------------------------------------------------------
# serialization (round-trips through the same format; also used for digests)


def _point(p) -> str:
    return p if isinstance(p, str) else point_key(p)


def driving_payload(ds: DrivingSystem) -> dict:
    return {"prob": [str(p) for p in ds.prob], "theta": list(ds.theta)}


def system_payload(rds: BundleRDS) -> dict:
    out: dict[str, Any] = {
        "base": driving_payload(rds.base),
        "fibers": [[_point(x) for x in sort_points(f)] for f in rds.fibers],
        "maps": [
            {_point(x): _point(m[x]) for x in sort_points(f)}
            for f, m in zip(rds.fibers, rds.maps)
        ],
    }
    if rds.space is not None:
        pts = sort_points(rds.space.points)
        out["space"] = {
            "points": [_point(p) for p in pts],
            "dist": [[str(rds.space.d(p, q)) for q in pts] for p in pts],
        }
    return out


def cover_payload(cover: RandomCover) -> dict:
    return {
        "partition": isinstance(cover, RandomPartition),
        "elements": [
            [[_point(x) for x in sort_points(sec)] for sec in e.sections] for e in cover.elements
        ],
    }


def measure_payload(mu: FiberedMeasure) -> dict:
    return {
        "weights": [
            {_point(x): str(w[x]) for x in sort_points(w)} for w in mu.weights
        ]
    }


def canonical_digest(payload: Any) -> str:
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
