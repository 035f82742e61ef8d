"""
Scenario files: JSON descriptions of a group, a target cone and its
chambers, plus the optional inputs individual commands need.

Loading never stops at the first problem. Every error found is collected,
anchored either as ``<file>:<line>:<col>`` (JSON syntax) or as
``<file>: <json path>: message``, and raised together in one
:class:`ScenarioError`.
"""

import hashlib
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .action import ActionGroup, make_group
from .chambers import Chamber, ChamberSystem, DecompositionKind, Marking, lift_chamber_tile
from .cone import PolyCone, sum_of
from .conf import BUILTIN_BUDGETS
from .exceptions import ConetoolError, ContractError, DichotomyViolation, ScenarioError
from .linalg import matrix
from .tiling import AmbientRegion

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parent / "data"
BUNDLED_SCENARIOS = ("pell", "quadrant-swap", "dihedral", "schoen-toy")


@dataclass(frozen=True)
class ProductData:
    eff1: PolyCone
    eff2: Optional[PolyCone]
    p1: Tuple[tuple, ...]
    p2: Tuple[tuple, ...]


@dataclass(frozen=True)
class Scenario:
    name: str
    path: str
    digest: str
    system: ChamberSystem
    budgets: Dict[str, int]
    tile: Optional[PolyCone] = None
    polytope: Optional[PolyCone] = None
    face: Optional[Tuple[Marking, PolyCone]] = None
    product: Optional[ProductData] = None

    @property
    def rank(self) -> int:
        return self.system.ambient_rank

    @property
    def group(self) -> ActionGroup:
        return self.system.group

    @property
    def target(self) -> AmbientRegion:
        return self.system.target

    def tile_or_default(self) -> Optional[PolyCone]:
        """The scenario tile, or the sum of the chamber tiles."""
        if self.tile is not None:
            return self.tile
        tiles = [ch.tile for ch in self.system.chambers if ch.tile is not None]
        if not tiles:
            return None
        return sum_of(tiles, self.rank)


def resolve_scenario_path(path_or_name: str) -> Path:
    path = Path(path_or_name)
    if path.exists():
        return path
    if path_or_name in BUNDLED_SCENARIOS:
        return DATA_DIR / f"{path_or_name}.json"
    raise ScenarioError([f"{path_or_name}: no such file or bundled scenario"])


class _Collector:
    """Accumulates located errors while parsing one file."""

    def __init__(self, label: str):
        self.label = label
        self.errors: List[str] = []

    def add(self, where: str, message: str):
        self.errors.append(f"{self.label}: {where}: {message}")

    def attempt(self, where: str, build, *args, **kwargs):
        """Call ``build``; on a conetool error record it under ``where`` and return None."""
        try:
            return build(*args, **kwargs)
        except DichotomyViolation:
            raise
        except ConetoolError as e:
            self.add(where, f"{type(e).__name__}: {e}")
        except (TypeError, ValueError, KeyError, IndexError) as e:
            self.add(where, f"malformed value ({e})")
        return None


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _cone(data, rank: int) -> PolyCone:
    if isinstance(data, dict) and "rank" not in data:
        data = dict(data, rank=rank)
    cone = PolyCone.from_literal(data)
    if cone.ambient_rank != rank:
        raise ContractError(f"expected a rank-{rank} cone, got rank {cone.ambient_rank}")
    return cone


def _quadratic_form(data, rank: int):
    m = matrix(data)
    if len(m) != rank or any(len(row) != rank for row in m):
        raise ValueError(f"quadratic form must be {rank}x{rank}")
    if any(x.denominator != 1 for row in m for x in row):
        raise ValueError("quadratic form entries must be integers")
    if any(m[i][j] != m[j][i] for i in range(rank) for j in range(rank)):
        raise ValueError("quadratic form must be symmetric")
    return tuple(tuple(int(x) for x in row) for row in m)


def _target(data, rank: int) -> Tuple[str, AmbientRegion]:
    if not isinstance(data, dict):
        raise ValueError("target must be an object with 'kind' and 'cone'")
    kind = data.get("kind", DecompositionKind.EFFECTIVE)
    if kind not in (DecompositionKind.EFFECTIVE, DecompositionKind.MOVABLE):
        raise ValueError(f"unknown target kind {kind!r}")
    cone_data = data["cone"]
    form = None
    if isinstance(cone_data, dict) and "quadratic_form" in cone_data:
        form = _quadratic_form(cone_data["quadratic_form"], rank)
        cone_data = {k: v for k, v in cone_data.items() if k != "quadratic_form"}
    return kind, AmbientRegion(_cone(cone_data, rank), form)


def _chamber(data, rank: int, collector: _Collector, where: str) -> Optional[Chamber]:
    if not isinstance(data, dict):
        collector.add(where, "chamber must be an object")
        return None
    missing = [key for key in ("id", "pullback", "target_nef") if key not in data]
    for key in missing:
        collector.add(where, f"missing '{key}'")
    if missing:
        return None

    marking = collector.attempt(
        f"{where}.pullback",
        Marking,
        str(data["id"]),
        data["pullback"],
        tuple(data.get("exc_rays", ())),
        data.get("kind"),
    )
    if marking is None:
        return None
    target_nef = collector.attempt(f"{where}.target_nef", _cone, data["target_nef"], marking.target_rank)
    tile = None
    if "tile" in data:
        tile = collector.attempt(f"{where}.tile", _cone, data["tile"], rank)
    if target_nef is None:
        return None

    chamber = collector.attempt(where, Chamber, marking, target_nef, tile)
    if chamber is not None and "nef_tile" in data:
        nef_tile = collector.attempt(f"{where}.nef_tile", _cone, data["nef_tile"], marking.target_rank)
        if nef_tile is not None:
            lifted = collector.attempt(f"{where}.nef_tile", lift_chamber_tile, chamber, nef_tile)
            if lifted is not None:
                chamber = Chamber(marking, target_nef, lifted)
    return chamber


def _budgets(data, collector: _Collector) -> Dict[str, int]:
    if not isinstance(data, dict):
        collector.add("$.budgets", "budgets must be an object")
        return {}
    budgets = {}
    for key, value in data.items():
        if key not in BUILTIN_BUDGETS:
            collector.add(f"$.budgets.{key}", f"unknown budget (known: {', '.join(sorted(BUILTIN_BUDGETS))})")
            continue
        minimum = 0 if key in ("radius", "seed") else 1
        if not _is_int(value) or value < minimum:
            collector.add(f"$.budgets.{key}", f"must be an integer >= {minimum}, got {value!r}")
            continue
        budgets[key] = value
    return budgets


def _product(data, collector: _Collector) -> Optional[ProductData]:
    if not isinstance(data, dict) or "eff1" not in data or "p1" not in data:
        collector.add("$.product", "product needs at least 'eff1' and 'p1'")
        return None
    p1 = collector.attempt("$.product.p1", matrix, data["p1"])
    p2 = collector.attempt("$.product.p2", matrix, data.get("p2") or [])
    if p1 is None or p2 is None:
        return None
    width1 = len(p1[0]) if p1 else 0
    width2 = len(p2[0]) if p2 else 0
    eff1 = collector.attempt("$.product.eff1", _cone, data["eff1"], width1)
    eff2 = None
    if width2:
        if "eff2" not in data:
            collector.add("$.product.eff2", "missing although p2 is given")
            return None
        eff2 = collector.attempt("$.product.eff2", _cone, data["eff2"], width2)
        if eff2 is None:
            return None
    if eff1 is None:
        return None
    return ProductData(eff1, eff2, p1, p2)


def parse_scenario(raw: dict, label: str, digest: str, name: str) -> Scenario:
    """Validate a decoded scenario document. Raises ScenarioError with every problem found."""
    collector = _Collector(label)
    if not isinstance(raw, dict):
        raise ScenarioError([f"{label}: $: scenario must be a JSON object"])

    rank = raw.get("rank")
    if not _is_int(rank) or rank < 1:
        raise ScenarioError([f"{label}: $.rank: must be a positive integer, got {rank!r}"])

    group = None
    group_data = raw.get("group", {"gens": []})
    if not isinstance(group_data, dict):
        collector.add("$.group", "group must be an object with 'gens'")
    else:
        invariant = None
        if group_data.get("invariant_cone") is not None:
            invariant = collector.attempt("$.group.invariant_cone", _cone, group_data["invariant_cone"], rank)
        group = collector.attempt(
            "$.group.gens", make_group, group_data.get("gens", []), invariant, ambient_rank=rank
        )

    kind = target = None
    if "target" not in raw:
        collector.add("$.target", "missing")
    else:
        parsed = collector.attempt("$.target", _target, raw["target"], rank)
        if parsed is not None:
            kind, target = parsed

    chambers = []
    chamber_data = raw.get("chambers", [])
    if not isinstance(chamber_data, list):
        collector.add("$.chambers", "chambers must be a list")
    else:
        for index, item in enumerate(chamber_data):
            chamber = _chamber(item, rank, collector, f"$.chambers[{index}]")
            if chamber is not None:
                chambers.append(chamber)

    budgets = _budgets(raw.get("budgets", {}), collector)

    optional = {}
    for key in ("tile", "polytope"):
        if key in raw:
            optional[key] = collector.attempt(f"$.{key}", _cone, raw[key], rank)

    if "face" in raw:
        face = raw["face"]
        if not isinstance(face, dict) or "pullback" not in face or "target_nef" not in face:
            collector.add("$.face", "face needs 'pullback' and 'target_nef'")
        else:
            marking = collector.attempt("$.face.pullback", Marking, "face", face["pullback"])
            if marking is not None:
                face_nef = collector.attempt("$.face.target_nef", _cone, face["target_nef"], marking.target_rank)
                if face_nef is not None:
                    optional["face"] = (marking, face_nef)

    if "product" in raw:
        optional["product"] = _product(raw["product"], collector)

    if collector.errors:
        raise ScenarioError(collector.errors)

    system = collector.attempt("$.chambers", ChamberSystem, group, tuple(chambers), target, kind)
    if system is None:
        raise ScenarioError(collector.errors)

    logger.info(f"Loaded scenario '{name}': rank {rank}, {len(chambers)} chamber(s), {len(group.generators)} generator(s)")
    return Scenario(name=name, path=label, digest=digest, system=system, budgets=budgets, **optional)


def load_scenario(path_or_name: str) -> Scenario:
    """
    Load and validate a scenario file or a bundled scenario by name.

    Raises:
        ScenarioError: listing every problem found
        DichotomyViolation: if the group maps a chamber onto a cone overlapping another
    """
    path = resolve_scenario_path(path_or_name)
    try:
        content = path.read_bytes()
    except OSError as e:
        raise ScenarioError([f"{path}: cannot read ({e.strerror})"]) from e

    label = path.name if path.parent == DATA_DIR else str(path)
    try:
        raw = json.loads(content.decode("utf-8"))
    except UnicodeDecodeError as e:
        raise ScenarioError([f"{label}: not UTF-8 text"]) from e
    except json.JSONDecodeError as e:
        raise ScenarioError([f"{label}:{e.lineno}:{e.colno}: {e.msg}"]) from e

    name = path_or_name if path_or_name in BUNDLED_SCENARIOS and not os.path.exists(path_or_name) else path.stem
    return parse_scenario(raw, label, hashlib.sha256(content).hexdigest(), name)
