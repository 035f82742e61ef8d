"""
Mori chambers built from marking data, and the pipelines that turn
chamber-level tiles into tilings of the effective, movable and nef cones.

Scenario data describes every chamber through a marking (the pullback of a
birational contraction plus its exceptional rays) and a polyhedral model of
the target's nef cone. Nothing here computes those cones from geometry;
the dichotomy and permutation checks only reject data that cannot come
from geometry.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from . import conf
from .action import ActionGroup, GroupElement, enumerate_ball, stabilizer_in_ball
from .cone import (
    PolyCone,
    conic_combination,
    interiors_intersect,
    intersect,
    linear_image,
    sum_of,
)
from .exceptions import (
    ContractError,
    DichotomyViolation,
    DimensionMismatch,
    DomainError,
    ExceptionalSubconeViolation,
    FaceValidationError,
    MarkingError,
)
from .linalg import (
    IntVector,
    format_vector,
    identity,
    inverse,
    mat_mul,
    mat_vec,
    matrix,
    primitive,
    rank,
    transpose,
)
from .tiling import (
    BOUNDED_WINDOW_NOTE,
    AmbientRegion,
    Certificate,
    CertificateKind,
    TiledCone,
    Verdict,
    canonical_witness,
    descend_to_face,
    digest,
    dirichlet_carving,
    glue_chambers,
    group_literal,
    sample_interior,
    sample_relative_interior,
    verify_fundamental_domain,
)
from .warnings import SpanHypothesisWarning, warn_once

logger = logging.getLogger(__name__)


# ============================================================================
# MARKINGS AND CHAMBERS
# ============================================================================

class MarkingKind:
    SQM = 'SQM'
    QBC = 'QBC'

    CHOICES = [
        (SQM, 'Small modification - square pullback, nothing contracted'),
        (QBC, 'Birational contraction - may contract exceptional divisors'),
    ]


class DecompositionKind:
    EFFECTIVE = 'effective'
    MOVABLE = 'movable'

    CHOICES = [
        (EFFECTIVE, 'Effective cone - chambers of all contractions'),
        (MOVABLE, 'Movable cone - chambers of small modifications only'),
    ]


def _columns(m: Sequence[Sequence]) -> List[tuple]:
    return [tuple(col) for col in transpose(m)]


@dataclass(frozen=True)
class Marking:
    """
    A birational contraction f: X --> Y recorded as data.

    ``pullback`` is the n x m matrix of f^*, columns in the source lattice;
    ``exceptional_rays`` are the classes of the contracted divisors.
    """

    id: str
    pullback: Tuple[tuple, ...]
    exceptional_rays: Tuple[IntVector, ...] = ()
    declared_kind: Optional[str] = None

    def __post_init__(self):
        pullback = matrix(self.pullback)
        object.__setattr__(self, "pullback", pullback)
        object.__setattr__(self, "exceptional_rays", tuple(primitive(e) for e in self.exceptional_rays))

        n = len(pullback)
        m = len(pullback[0]) if pullback else 0
        if n == 0 or m == 0:
            raise MarkingError(f"marking '{self.id}': pullback must be a non-empty matrix")
        if m > n:
            raise MarkingError(f"marking '{self.id}': target rank {m} exceeds source rank {n}")
        if rank(pullback) != m:
            raise MarkingError(f"marking '{self.id}': pullback has rank {rank(pullback)} < {m}, so it is not injective")
        for e in self.exceptional_rays:
            if len(e) != n:
                raise MarkingError(f"marking '{self.id}': exceptional ray {list(e)} does not have length {n}")
            if not any(e):
                raise MarkingError(f"marking '{self.id}': exceptional ray is zero")
        spanned = rank(_columns(pullback) + list(self.exceptional_rays))
        if spanned != m + len(self.exceptional_rays):
            raise MarkingError(
                f"marking '{self.id}': pullback columns and exceptional rays span dimension {spanned}, "
                f"not the direct sum of dimension {m + len(self.exceptional_rays)}"
            )
        if self.declared_kind is not None:
            if self.declared_kind not in (MarkingKind.SQM, MarkingKind.QBC):
                raise MarkingError(f"marking '{self.id}': unknown kind {self.declared_kind!r}")
            if self.declared_kind == MarkingKind.SQM and self.kind != MarkingKind.SQM:
                raise MarkingError(
                    f"marking '{self.id}': declared SQM but pullback is {n}x{m} "
                    f"with {len(self.exceptional_rays)} exceptional ray(s)"
                )

    @classmethod
    def from_element(cls, g: GroupElement, marking_id: Optional[str] = None) -> "Marking":
        return cls(marking_id or g.label(), g.matrix, (), MarkingKind.SQM)

    @property
    def source_rank(self) -> int:
        return len(self.pullback)

    @property
    def target_rank(self) -> int:
        return len(self.pullback[0])

    @property
    def kind(self) -> str:
        if not self.exceptional_rays and self.source_rank == self.target_rank:
            return MarkingKind.SQM
        return MarkingKind.QBC

    @property
    def is_identity(self) -> bool:
        return self.kind == MarkingKind.SQM and self.pullback == identity(self.source_rank)

    def pushforward(self) -> Tuple[tuple, ...]:
        """
        Left inverse of the pullback (m x n) that kills the exceptional rays.

        When pullback columns and exceptional rays do not span, standard basis
        vectors complete them to a basis and are killed as well.
        """
        n = self.source_rank
        basis = _columns(self.pullback) + list(self.exceptional_rays)
        for i in range(n):
            if len(basis) == n:
                break
            unit = tuple(1 if j == i else 0 for j in range(n))
            if rank(basis + [unit]) > len(basis):
                basis.append(unit)
        inv = inverse(transpose(basis))
        return tuple(inv[:self.target_rank])

    def to_report(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "pullback": [format_vector(row) for row in self.pullback],
            "exc_rays": [format_vector(e) for e in self.exceptional_rays],
        }


@dataclass(frozen=True)
class Chamber:
    marking: Marking
    target_nef: PolyCone
    # chamber-level tile; a cone inside the chamber cone, or None
    tile: Optional[PolyCone] = None
    cone: PolyCone = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        label = self.marking.id
        if self.target_nef.ambient_rank != self.marking.target_rank:
            raise DimensionMismatch(
                f"chamber '{label}': target nef cone has rank {self.target_nef.ambient_rank}, "
                f"pullback expects {self.marking.target_rank}"
            )
        if not self.target_nef.is_full_dimensional or not self.target_nef.is_strictly_convex:
            raise ContractError(f"chamber '{label}': target nef cone must be full-dimensional and strictly convex")

        cone = chamber_cone(self)
        if not cone.is_full_dimensional:
            raise MarkingError(
                f"chamber '{label}': chamber cone has dimension {cone.dim} < {cone.ambient_rank}; "
                f"pullback and exceptional rays must form a basis"
            )
        object.__setattr__(self, "cone", cone)

        if self.tile is not None and not cone.contains_cone(self.tile):
            raise ContractError(f"chamber '{label}': tile is not contained in the chamber cone")

    @property
    def id(self) -> str:
        return self.marking.id

    @property
    def nef_face(self) -> PolyCone:
        """Image of the target nef cone under the pullback."""
        return linear_image(self.target_nef, self.marking.pullback)

    def to_report(self) -> dict:
        report = {"marking": self.marking.to_report(), "cone": self.cone.to_literal()}
        if self.tile is not None:
            report["tile"] = self.tile.to_literal()
        return report


def chamber_cone(ch: Chamber) -> PolyCone:
    n = ch.marking.source_rank
    parts = [linear_image(ch.target_nef, ch.marking.pullback)]
    if ch.marking.exceptional_rays:
        parts.append(PolyCone.from_rays(ch.marking.exceptional_rays, n))
    return sum_of(parts, n)


def lift_chamber_tile(chamber: Chamber, nef_tile: PolyCone) -> PolyCone:
    """Chamber-level tile from a tile of the target nef model."""
    if not chamber.target_nef.contains_cone(nef_tile):
        raise ContractError(f"chamber '{chamber.id}': nef tile is not contained in the target nef cone")
    n = chamber.marking.source_rank
    parts = [linear_image(nef_tile, chamber.marking.pullback)]
    if chamber.marking.exceptional_rays:
        parts.append(PolyCone.from_rays(chamber.marking.exceptional_rays, n))
    return sum_of(parts, n)


def compose_marking(outer: Marking, inner_sqm: Marking) -> Marking:
    """
    The marking of ``outer`` precomposed with a small modification.

    Pullbacks compose contravariantly: the composite pulls back by
    inner . outer, and exceptional rays move through the inner pullback.
    """
    if inner_sqm.kind != MarkingKind.SQM:
        raise MarkingError(f"marking '{inner_sqm.id}' is not a small modification")
    if inner_sqm.source_rank != outer.source_rank:
        raise DimensionMismatch(
            f"cannot compose rank-{outer.source_rank} marking '{outer.id}' "
            f"with rank-{inner_sqm.source_rank} modification '{inner_sqm.id}'"
        )
    pullback = mat_mul(inner_sqm.pullback, outer.pullback)
    exceptional = tuple(mat_vec(inner_sqm.pullback, e) for e in outer.exceptional_rays)
    return Marking(f"{outer.id}.{inner_sqm.id}", pullback, exceptional)


def compose_chamber(ch: Chamber, inner_sqm: Marking) -> Chamber:
    tile = linear_image(ch.tile, inner_sqm.pullback) if ch.tile is not None else None
    return Chamber(compose_marking(ch.marking, inner_sqm), ch.target_nef, tile)


def chambers_equivalent(c1: Chamber, c2: Chamber) -> bool:
    """
    Whether two chambers describe the same model.

    Chambers from geometry are equal or meet along their boundaries; when the
    interiors meet, the cones and their nef faces must coincide.

    Raises:
        DichotomyViolation: interiors meet but cones or nef faces differ
    """
    n1, n2 = c1.cone, c2.cone
    if not interiors_intersect(n1, n2):
        return False
    if n1 != n2:
        overlap = intersect(n1, n2).relative_interior_point()
        raise DichotomyViolation(
            f"chambers '{c1.id}' and '{c2.id}' overlap in {format_vector(overlap)} but differ",
            c1.id,
            c2.id,
            witness=overlap,
        )
    f1, f2 = c1.nef_face, c2.nef_face
    if f1 != f2:
        stray = [g for g in f1.generators if not f2.contains(g)] or [g for g in f2.generators if not f1.contains(g)]
        raise DichotomyViolation(
            f"chambers '{c1.id}' and '{c2.id}' share a cone but pull back different nef cones",
            c1.id,
            c2.id,
            witness=stray[0] if stray else None,
        )
    return True


# ============================================================================
# CHAMBER SYSTEMS
# ============================================================================

@dataclass(frozen=True)
class ChamberSystem:
    group: ActionGroup
    chambers: Tuple[Chamber, ...]
    target: AmbientRegion
    kind: str = DecompositionKind.EFFECTIVE

    def __post_init__(self):
        n = self.group.ambient_rank
        if self.target.ambient_rank != n:
            raise DimensionMismatch(f"target cone has rank {self.target.ambient_rank}, group has rank {n}")
        if self.kind not in (DecompositionKind.EFFECTIVE, DecompositionKind.MOVABLE):
            raise ContractError(f"unknown decomposition kind {self.kind!r}")

        seen = set()
        for ch in self.chambers:
            if ch.id in seen:
                raise ContractError(f"duplicate chamber id '{ch.id}'")
            seen.add(ch.id)
            if ch.marking.source_rank != n:
                raise DimensionMismatch(f"chamber '{ch.id}' has rank {ch.marking.source_rank}, system has rank {n}")
            if self.kind == DecompositionKind.MOVABLE and ch.marking.kind != MarkingKind.SQM:
                raise ContractError(f"movable system holds non-SQM chamber '{ch.id}'")

        self._check_permutation()

    def _check_permutation(self):
        """Generators must send listed chambers to listed chambers or to cones meeting them only on the boundary."""
        for ch in self.chambers:
            for step in self.group.steps:
                image = step.act_on_cone(ch.cone)
                for other in self.chambers:
                    if interiors_intersect(image, other.cone) and image != other.cone:
                        overlap = intersect(image, other.cone).relative_interior_point()
                        raise DichotomyViolation(
                            f"{step.label()} maps chamber '{ch.id}' onto a cone overlapping '{other.id}'",
                            f"{step.label()} * {ch.id}",
                            other.id,
                            witness=overlap,
                        )

    @property
    def ambient_rank(self) -> int:
        return self.group.ambient_rank

    def chamber(self, chamber_id: str) -> Chamber:
        for ch in self.chambers:
            if ch.id == chamber_id:
                return ch
        raise ContractError(f"no chamber with id '{chamber_id}'")

    def literal(self) -> dict:
        return {
            "group": group_literal(self.group),
            "kind": self.kind,
            "target": self.target.to_literal(),
            "chambers": [ch.to_report() for ch in self.chambers],
        }


class PipelineStatement:
    MOVABLE = 'movable-cone'
    EFFECTIVE = 'effective-cone'
    EFFECTIVE_TILE = 'effective-tile'
    NEF = 'nef-cone-and-finiteness'
    CHAMBER = 'chamber-tile-and-finiteness'

    CHOICES = [
        (MOVABLE, 'Movable cone has a polyhedral fundamental domain'),
        (EFFECTIVE, 'Effective cone has a polyhedral fundamental domain'),
        (EFFECTIVE_TILE, 'Effective cone is covered by translates of a polyhedral cone'),
        (NEF, 'Nef cone is tiled, with finitely many targets up to translation'),
        (CHAMBER, 'Chambers are tiled, with finitely many chambers up to translation'),
    ]


@dataclass(frozen=True)
class PipelineCertificate:
    statement: str
    components: Tuple[Certificate, ...]
    references: Dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return Verdict.combine(c.verdict for c in self.components)

    def to_dict(self) -> dict:
        return {
            "statement": self.statement,
            "verdict": self.verdict,
            "references": dict(self.references),
            "components": [c.to_dict() for c in self.components],
        }


# ============================================================================
# VALIDATION AND DECOMPOSITION
# ============================================================================

def _translates(sys: ChamberSystem, radius: int):
    """Distinct chamber cones g.N over listed chambers and ball elements."""
    ball = enumerate_ball(sys.group, radius)
    found: List[Tuple[Chamber, GroupElement, PolyCone]] = []
    for ch in sys.chambers:
        for g in ball.elements:
            cone = g.act_on_cone(ch.cone)
            if any(cone == other for _, _, other in found):
                continue
            found.append((ch, g, cone))
    return ball, found


def _dichotomy_witness(e: DichotomyViolation) -> dict:
    return {
        "first": e.first,
        "second": e.second,
        "point": format_vector(e.witness) if e.witness is not None else None,
    }


def validate_system(sys: ChamberSystem, samples: int, seed: int, *, radius: Optional[int] = None) -> Certificate:
    """
    Check the dichotomy between listed chambers, and that sampled interior
    points of the target cone fall in some translate of a listed chamber.

    ``radius`` defaults to the configured budget.
    """
    radius = radius if radius is not None else conf.get_default_budgets()["radius"]
    witnesses = {}
    notes = [BOUNDED_WINDOW_NOTE]
    verdict = Verdict.VERIFIED
    drawn = 0

    outside = [
        (ch.id, g) for ch in sys.chambers for g in ch.cone.generators if not sys.target.contains_closure(g)
    ]
    if outside:
        verdict = Verdict.REFUTED
        witnesses["chamber"] = outside[0][0]
        witnesses["generator_outside_target"] = format_vector(outside[0][1])

    if verdict == Verdict.VERIFIED:
        chambers = list(sys.chambers)
        for i, c1 in enumerate(chambers):
            for c2 in chambers[i + 1:]:
                try:
                    chambers_equivalent(c1, c2)
                except DichotomyViolation as e:
                    verdict = Verdict.REFUTED
                    witnesses["dichotomy"] = _dichotomy_witness(e)
                    break
            if verdict != Verdict.VERIFIED:
                break

    if verdict == Verdict.VERIFIED:
        ball, translates = _translates(sys, radius)
        points = sample_interior(sys.target, samples, seed)
        drawn = len(points)
        uncovered = [p for p in points if not any(cone.contains(p) for _, _, cone in translates)]
        if uncovered:
            witnesses["uncovered_point"] = format_vector(canonical_witness(uncovered))
            witnesses["uncovered_count"] = len(uncovered)
            if ball.complete:
                verdict = Verdict.REFUTED
                notes.append("the orbit ball is the whole group, so uncovered points are exact gaps")
            else:
                verdict = Verdict.BUDGET_EXHAUSTED
                notes.append("uncovered points may be covered by translates beyond the radius")

    logger.info(f"Validated {len(sys.chambers)} chamber(s): {verdict}")
    return Certificate(
        kind=CertificateKind.CHAMBER_SYSTEM,
        inputs_digest=digest(sys.literal()),
        parameters={"radius": radius, "samples": samples, "drawn": drawn, "seed": seed},
        verdict=verdict,
        witnesses=witnesses,
        notes=tuple(notes),
        bounded_window=True,
    )


class Piece(NamedTuple):
    chamber_id: str
    element: GroupElement
    chamber: PolyCone
    cone: PolyCone

    def to_report(self) -> dict:
        return {
            "chamber": self.chamber_id,
            "element": self.element.to_report(),
            "chamber_cone": self.chamber.to_literal(),
            "piece": self.cone.to_literal(),
        }


def decompose_polytope_cone(polytope: PolyCone, sys: ChamberSystem, radius: int, samples: int,
                            seed: int) -> Tuple[List[Piece], Certificate]:
    """
    Cut a polyhedral cone along the chamber translates that meet it.

    Raises:
        ContractError: if the cone leaves the target closure
        DomainError: if no chamber translate meets the cone
    """
    if polytope.ambient_rank != sys.ambient_rank:
        raise DimensionMismatch(f"polytope cone has rank {polytope.ambient_rank}, system has rank {sys.ambient_rank}")
    outside = [g for g in polytope.generators if not sys.target.contains_closure(g)]
    if outside:
        raise ContractError(f"polytope generator {format_vector(outside[0])} lies outside the target closure")

    _, translates = _translates(sys, radius)
    pieces = []
    for ch, g, cone in translates:
        meet = intersect(polytope, cone)
        if meet.dim == polytope.dim:
            pieces.append(Piece(ch.id, g, cone, meet))
    if not pieces:
        raise DomainError(f"no chamber within radius {radius} meets {polytope!r}")

    witnesses = {"pieces": [p.to_report() for p in pieces]}
    notes = [BOUNDED_WINDOW_NOTE]
    verdict = Verdict.VERIFIED
    drawn = 0
    for i, first in enumerate(pieces):
        for second in pieces[i + 1:]:
            meet = intersect(first.cone, second.cone)
            if meet.dim == polytope.dim and verdict == Verdict.VERIFIED:
                verdict = Verdict.REFUTED
                witnesses["overlapping_pieces"] = [first.element.label(), second.element.label()]
                witnesses["overlap_point"] = format_vector(meet.relative_interior_point())

    if verdict == Verdict.VERIFIED:
        points = sample_relative_interior(polytope, samples, seed)
        drawn = len(points)
        uncovered = [p for p in points if not any(piece.cone.contains(p) for piece in pieces)]
        if uncovered:
            verdict = Verdict.BUDGET_EXHAUSTED
            witnesses["unreduced_point"] = format_vector(canonical_witness(uncovered))
            witnesses["unreduced_count"] = len(uncovered)
            notes.append("chambers covering the rest lie beyond the radius")

    logger.info(f"Decomposed {polytope!r} into {len(pieces)} piece(s): {verdict}")
    certificate = Certificate(
        kind=CertificateKind.DECOMPOSITION,
        inputs_digest=digest({"system": sys.literal(), "polytope": polytope.to_literal()}),
        parameters={"radius": radius, "samples": samples, "drawn": drawn, "seed": seed},
        verdict=verdict,
        witnesses=witnesses,
        notes=tuple(notes),
        bounded_window=True,
    )
    return pieces, certificate


@dataclass(frozen=True)
class StabilizerWindow:
    chamber_id: str
    elements: Tuple[GroupElement, ...]
    # ball elements fixing the chamber cone but not its exceptional rays
    violations: Tuple[GroupElement, ...] = ()

    def raise_for_violations(self):
        if self.violations:
            words = [g.label() for g in self.violations]
            raise ExceptionalSubconeViolation(
                f"chamber '{self.chamber_id}': {', '.join(words)} fix the chamber but move its exceptional rays",
                self.chamber_id,
                words,
            )


def chamber_stabilizer(sys: ChamberSystem, ch: Chamber, radius: int) -> StabilizerWindow:
    if ch.marking.source_rank != sys.ambient_rank:
        raise DimensionMismatch(f"chamber '{ch.id}' does not live in the system's rank {sys.ambient_rank}")
    exceptional = set(ch.marking.exceptional_rays)
    elements = []
    violations = []
    for g in stabilizer_in_ball(sys.group, ch.cone, radius):
        images = {primitive(g.apply(e)) for e in exceptional}
        if images == exceptional:
            elements.append(g)
        else:
            logger.warning(f"{g.label()} stabilizes chamber '{ch.id}' but not its exceptional rays")
            violations.append(g)
    return StabilizerWindow(ch.id, tuple(elements), tuple(violations))


# ============================================================================
# PIPELINES
# ============================================================================

class NefDescent(NamedTuple):
    stabilizer: List[GroupElement]
    face_tile: PolyCone
    target_tile: PolyCone
    certificate: Certificate


def nef_descent(sys: ChamberSystem, nef_tiling: TiledCone, face_marking: Marking, face_nef: PolyCone,
                radius: int) -> NefDescent:
    """
    Descend a tiling of the nef cone to the face pulled back from a contraction.

    The face tile is pushed down to the target lattice by the marking's
    pushforward.

    Raises:
        FaceValidationError: if the pulled-back face is not a face of the tiled structure
    """
    if face_marking.source_rank != sys.ambient_rank or nef_tiling.tile.ambient_rank != sys.ambient_rank:
        raise DimensionMismatch("face marking, nef tiling and chamber system must share the source rank")
    if face_nef.ambient_rank != face_marking.target_rank:
        raise DimensionMismatch(f"face nef cone has rank {face_nef.ambient_rank}, marking targets {face_marking.target_rank}")

    face = linear_image(face_nef, face_marking.pullback)
    outside = [g for g in face.generators if not sys.target.contains_closure(g)]
    if outside:
        raise FaceValidationError(f"pulled-back face generator {format_vector(outside[0])} leaves the target closure")

    descent = descend_to_face(nef_tiling, face, radius)
    push = face_marking.pushforward()
    target_tile = linear_image(descent.tile, push) if not descent.tile.is_zero else PolyCone.zero(face_marking.target_rank)
    logger.info(f"Nef descent onto '{face_marking.id}': target tile {target_tile!r}")
    return NefDescent(descent.stabilizer, descent.tile, target_tile, descent.certificate)


def _chamber_tile_certificate(sys: ChamberSystem, ch: Chamber, radius: int, samples: int, seed: int) -> Certificate:
    """Sampled check that the chamber stabilizer window covers the chamber by tile translates."""
    window = chamber_stabilizer(sys, ch, radius)
    points = sample_relative_interior(ch.cone, samples, seed)
    uncovered = [p for p in points if not any(ch.tile.contains(h.apply(p)) for h in window.elements)]

    witnesses = {"tile": ch.tile.to_literal(), "stabilizer_window": [g.to_report() for g in window.elements]}
    if window.violations:
        verdict = Verdict.REFUTED
        witnesses["exceptional_violation"] = window.violations[0].to_report()
    elif uncovered:
        verdict = Verdict.BUDGET_EXHAUSTED
        witnesses["unreduced_point"] = format_vector(canonical_witness(uncovered))
        witnesses["unreduced_count"] = len(uncovered)
    else:
        verdict = Verdict.VERIFIED

    return Certificate(
        kind=CertificateKind.CHAMBER_TILE,
        inputs_digest=digest({"group": group_literal(sys.group), "chamber": ch.to_report()}),
        parameters={"chamber": ch.id, "radius": radius, "samples": samples, "seed": seed},
        verdict=verdict,
        witnesses=witnesses,
        notes=(BOUNDED_WINDOW_NOTE,),
        bounded_window=True,
    )


def build_effective_certificate(sys: ChamberSystem, radius: int, samples: int, seed: int,
                                fuel: int) -> PipelineCertificate:
    """
    Glue the chamber tiles of the orbit representatives into one tile for
    the target cone and, when that succeeds, carve and verify a
    fundamental domain from it.
    """
    reps = [ch for ch in sys.chambers if ch.tile is not None]
    if not reps:
        raise ContractError("no chamber carries a tile; list a tile for every orbit representative")

    components = [_chamber_tile_certificate(sys, ch, radius, samples, seed) for ch in reps]
    glued, glue_certificate = glue_chambers(
        sys.group, [(ch.cone, ch.tile) for ch in reps], sys.target, samples, fuel, seed
    )
    components.append(glue_certificate)
    references = {"representatives": [ch.id for ch in reps], "tile": glued.to_literal()}

    if glue_certificate.verified:
        if glued.is_full_dimensional and glued.is_strictly_convex:
            tiling = TiledCone(sys.group, glued, sys.target)
            carving = dirichlet_carving(tiling, radius)
            components.append(verify_fundamental_domain(tiling, carving.domain, radius, samples, seed, fuel))
            references["fundamental_domain"] = carving.domain.to_literal()
            references["dirichlet_center"] = format_vector(carving.xi)
            references["cuts"] = [format_vector(a) for a in carving.cuts]
        else:
            logger.warning("Glued tile is not a full-dimensional pointed cone; skipping the fundamental domain")

    statement = PipelineStatement.MOVABLE if sys.kind == DecompositionKind.MOVABLE else PipelineStatement.EFFECTIVE
    return PipelineCertificate(statement, tuple(components), references)


def _ample_chamber(sys: ChamberSystem) -> Chamber:
    for ch in sys.chambers:
        if ch.marking.is_identity:
            return ch
    raise ContractError("the nef pipeline needs an ample-model chamber (identity small modification)")


def extract_nef_certificates(sys: ChamberSystem, eff_tile: PolyCone, radius: int, samples: int,
                             seed: int) -> PipelineCertificate:
    """
    From a tile of the effective (or movable) cone, build a tile for the nef
    cone and list the small-modification targets up to translation.
    Target chambers that overlap without being equal refute the nef
    certificate, which then carries the dichotomy witness.

    Raises:
        DomainError: if no translate of ``eff_tile`` meets the nef cone
    """
    ample = _ample_chamber(sys)
    nef = ample.cone
    n = sys.ambient_rank
    ball = enumerate_ball(sys.group, radius)

    translated_by = sys.group.identity
    if intersect(eff_tile, nef).dim != n:
        moved = next((g for g in ball.elements if intersect(g.act_on_cone(eff_tile), nef).dim == n), None)
        if moved is None:
            raise DomainError(f"no translate of {eff_tile!r} within radius {radius} meets the nef cone")
        translated_by = moved
        eff_tile = moved.act_on_cone(eff_tile)

    sqm_chambers = tuple(ch for ch in sys.chambers if ch.marking.kind == MarkingKind.SQM)
    sqm_system = replace(sys, chambers=sqm_chambers, kind=DecompositionKind.MOVABLE)
    pieces, decomposition = decompose_polytope_cone(eff_tile, sqm_system, radius, samples, seed)

    gammas: List[GroupElement] = []
    for piece in pieces:
        gamma = next((g for g in ball.elements if g.act_on_cone(nef) == piece.chamber), None)
        if gamma is not None and gamma not in gammas:
            gammas.append(gamma)
    sigma = sum_of([intersect(g.inverse().act_on_cone(eff_tile), nef) for g in gammas], n)

    # target classes up to translation; overlapping pieces end the search
    classes: List[Chamber] = []
    dichotomy = None
    for piece in pieces:
        source = sqm_system.chamber(piece.chamber_id)
        translated = compose_chamber(source, Marking.from_element(piece.element))
        try:
            known = any(
                chambers_equivalent(compose_chamber(translated, Marking.from_element(h)), rep)
                for rep in classes for h in ball.elements
            )
        except DichotomyViolation as e:
            logger.warning(f"Target chambers {e.first} and {e.second} overlap without being equal")
            dichotomy = _dichotomy_witness(e)
            break
        if not known:
            classes.append(translated)

    window = stabilizer_in_ball(sys.group, nef, radius)
    points = sample_relative_interior(nef, samples, seed)
    uncovered = [p for p in points if not any(sigma.contains(h.apply(p)) for h in window)]

    witnesses = {"sigma": sigma.to_literal(), "stabilizer_window": [g.to_report() for g in window]}
    if dichotomy is not None:
        verdict = Verdict.REFUTED
        witnesses["dichotomy"] = dichotomy
    elif uncovered:
        verdict = Verdict.BUDGET_EXHAUSTED
        witnesses["unreduced_point"] = format_vector(canonical_witness(uncovered))
        witnesses["unreduced_count"] = len(uncovered)
    else:
        verdict = Verdict.VERIFIED
    nef_certificate = Certificate(
        kind=CertificateKind.NEF_TILE,
        inputs_digest=digest({"system": sys.literal(), "eff_tile": eff_tile.to_literal()}),
        parameters={"radius": radius, "samples": samples, "seed": seed},
        verdict=verdict,
        witnesses=witnesses,
        notes=(BOUNDED_WINDOW_NOTE,),
        bounded_window=True,
    )

    logger.info(f"Nef pipeline: {len(gammas)} translate(s), {len(classes)} target class(es)")
    references = {
        "ample_chamber": ample.id,
        "translated_by": translated_by.to_report(),
        "gammas": [g.to_report() for g in gammas],
        "sigma": sigma.to_literal(),
        "target_classes": [ch.cone.to_literal() for ch in classes],
    }
    return PipelineCertificate(PipelineStatement.NEF, (decomposition, nef_certificate), references)


# ============================================================================
# PRODUCTS
# ============================================================================

@dataclass(frozen=True)
class SpanReport:
    ambient_rank: int
    span_rank: int

    @property
    def holds(self) -> bool:
        return self.span_rank == self.ambient_rank

    def to_dict(self) -> dict:
        return {"ambient_rank": self.ambient_rank, "span_rank": self.span_rank, "holds": self.holds}


def _check_pullback(name: str, cone: Optional[PolyCone], pullback, n: int) -> int:
    if not pullback or not pullback[0]:
        return 0
    if len(pullback) != n:
        raise DimensionMismatch(f"{name} has {len(pullback)} rows, expected {n}")
    width = len(pullback[0])
    if cone is None or cone.ambient_rank != width:
        raise DimensionMismatch(f"{name} has {width} columns but its cone does not have rank {width}")
    if rank(_columns(pullback)) != width:
        raise ContractError(f"{name} does not have full column rank")
    return width


def product_effective_cone(eff1: PolyCone, eff2: Optional[PolyCone], p1_pullback, p2_pullback) -> Tuple[PolyCone, SpanReport]:
    """
    Sum of the two pulled-back effective cones.

    The sum is the effective cone of the product only when the two pullback
    spaces span; otherwise the cone is still returned and a warning raised.
    """
    p1 = matrix(p1_pullback)
    p2 = matrix(p2_pullback) if p2_pullback else ()
    n = len(p1)
    if _check_pullback("p1", eff1, p1, n) == 0:
        raise ContractError("p1 must be a non-empty matrix")
    width2 = _check_pullback("p2", eff2, p2, n)

    images = [linear_image(eff1, p1)]
    columns = _columns(p1)
    if width2:
        images.append(linear_image(eff2, p2))
        columns += _columns(p2)
    report = SpanReport(n, rank(columns))
    if not report.holds:
        message = f"pullbacks span rank {report.span_rank} < {n}; the sum need not be the product cone"
        logger.warning(message)
        warn_once(("span", n, report.span_rank), message, SpanHypothesisWarning)
    return sum_of(images, n), report


def split_product_point(eff1: PolyCone, eff2: Optional[PolyCone], p1_pullback, p2_pullback,
                        x: Sequence) -> Tuple[tuple, tuple]:
    """
    Exact (u1, u2) with u1 in eff1, u2 in eff2 and p1 u1 + p2 u2 = x.

    Raises:
        DomainError: if x is not in the product cone
    """
    p1 = matrix(p1_pullback)
    p2 = matrix(p2_pullback) if p2_pullback else ()
    gens1 = list(eff1.generators)
    gens2 = list(eff2.generators) if (eff2 is not None and p2 and p2[0]) else []
    images = [mat_vec(p1, g) for g in gens1] + [mat_vec(p2, g) for g in gens2]
    coefficients = conic_combination(images, x)
    if coefficients is None:
        raise DomainError(f"{format_vector(x)} is not in the product cone")

    def combine(gens, coeffs, width):
        point = [0] * width
        for c, g in zip(coeffs, gens):
            for i, v in enumerate(g):
                point[i] += c * v
        return tuple(point)

    u1 = combine(gens1, coefficients[:len(gens1)], eff1.ambient_rank)
    u2 = combine(gens2, coefficients[len(gens1):], eff2.ambient_rank) if gens2 else ()
    return u1, u2


def certify_product(eff1: PolyCone, eff2: Optional[PolyCone], p1_pullback, p2_pullback, samples: int,
                    seed: int) -> Tuple[PolyCone, SpanReport, Certificate]:
    """Product cone plus a sampled check that members split into the two pulled-back parts."""
    cone, report = product_effective_cone(eff1, eff2, p1_pullback, p2_pullback)
    p1 = matrix(p1_pullback)
    p2 = matrix(p2_pullback) if p2_pullback else ()

    failures = []
    for point in sample_relative_interior(cone, samples, seed):
        try:
            u1, u2 = split_product_point(eff1, eff2, p1, p2, point)
        except DomainError:
            failures.append(point)
            continue
        total = mat_vec(p1, u1)
        if u2:
            total = tuple(a + b for a, b in zip(total, mat_vec(p2, u2)))
        if total != tuple(point):
            failures.append(point)

    witnesses = {"cone": cone.to_literal(), "span": report.to_dict()}
    notes = []
    if failures:
        verdict = Verdict.REFUTED
        witnesses["unsplit_point"] = format_vector(canonical_witness(failures))
    else:
        verdict = Verdict.VERIFIED
    if not report.holds:
        notes.append("the pullback spaces do not span; the sum is not claimed to be the product cone")

    certificate = Certificate(
        kind=CertificateKind.PRODUCT,
        inputs_digest=digest({
            "eff1": eff1.to_literal(),
            "eff2": eff2.to_literal() if eff2 is not None else None,
            "p1": [format_vector(row) for row in p1],
            "p2": [format_vector(row) for row in p2],
        }),
        parameters={"samples": samples, "seed": seed},
        verdict=verdict,
        witnesses=witnesses,
        notes=tuple(notes),
    )
    return cone, report, certificate
