"""
Exact rational polyhedral cones.

A :class:`PolyCone` always carries both descriptions: generators (rays,
including a +/- pair for every lineality basis vector) and inequality normals
``a`` with ``cone = {x : a . x >= 0}``. Both are stored as primitive integer
vectors in lexicographic order, so every cone built from the same input is
built identically.

Conversion between the descriptions uses the incremental double description
method with a rank-based adjacency test.
"""

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .exceptions import (
    ContractError,
    DimensionMismatch,
    NotFullDimensional,
    RepresentationMismatch,
)
from .linalg import (
    IntVector,
    dot,
    format_vector,
    inverse,
    is_zero,
    mat_vec,
    nullspace,
    primitive,
    rank,
    solve_combination,
    transpose,
    vector,
)

logger = logging.getLogger(__name__)


# ============================================================================
# DOUBLE DESCRIPTION
# ============================================================================

def _negate(v: Sequence[int]) -> IntVector:
    return tuple(-x for x in v)


def _double_description(rows: Iterable[Sequence], n: int) -> Tuple[List[IntVector], List[IntVector]]:
    """
    Extreme rays and lineality basis of ``{x : a . x >= 0 for a in rows}``.

    The rays returned are those of the pointed part, i.e. the cone
    intersected with the orthogonal complement of the lineality space.
    """
    rows = sorted({primitive(r) for r in rows if not is_zero(r)})
    lineality = nullspace(rows, n)
    d = n - len(lineality)
    if d == 0:
        return [], lineality

    # d independent rows plus the lineality equations form an invertible
    # system; its inverse columns are the rays of the initial simplicial cone.
    selected: List[int] = []
    for i, row in enumerate(rows):
        if rank([rows[j] for j in selected] + [row]) > len(selected):
            selected.append(i)
            if len(selected) == d:
                break

    basis_inverse = inverse(list(lineality) + [rows[i] for i in selected])
    offset = len(lineality)
    rays: List[Tuple[IntVector, FrozenSet[int]]] = []
    for k in range(d):
        column = [basis_inverse[r][offset + k] for r in range(n)]
        zeros = frozenset(selected[j] for j in range(d) if j != k)
        rays.append((primitive(column), zeros))

    processed = set(selected)
    for i, normal in enumerate(rows):
        if i in processed:
            continue

        values = [dot(normal, r) for r, _ in rays]
        positive = [k for k, v in enumerate(values) if v > 0]
        negative = [k for k, v in enumerate(values) if v < 0]
        zero = [k for k, v in enumerate(values) if v == 0]

        created = []
        for p in positive:
            for q in negative:
                common = rays[p][1] & rays[q][1]
                if len(common) < d - 2:
                    continue
                # adjacent iff the common active constraints cut out a 2-face
                if rank(list(lineality) + [rows[j] for j in common]) != n - 2:
                    continue
                vp, vq = values[p], values[q]
                combined = tuple(vp * xq - vq * xp for xp, xq in zip(rays[p][0], rays[q][0]))
                created.append((primitive(combined), common | {i}))

        rays = (
            [rays[k] for k in positive]
            + [(rays[k][0], rays[k][1] | {i}) for k in zero]
            + created
        )
        processed.add(i)

    extreme = sorted({r for r, _ in rays if not is_zero(r)})
    return extreme, lineality


def _generators_from(rays: Sequence[IntVector], lineality: Sequence[IntVector]) -> Tuple[IntVector, ...]:
    gens = set(rays)
    for v in lineality:
        gens.add(tuple(v))
        gens.add(_negate(v))
    return tuple(sorted(gens))


def _facets(generators: Sequence[IntVector], n: int) -> Tuple[IntVector, ...]:
    """Irredundant inequality normals of the cone spanned by ``generators``."""
    rays, lineality = _double_description(generators, n)
    return _generators_from(rays, lineality)


# ============================================================================
# POLYCONE
# ============================================================================

class PolyCone:
    """
    A rational polyhedral cone in a lattice of rank ``ambient_rank``.

    Instances are immutable; use the ``from_*`` constructors or
    :func:`dual_description`.
    """

    __slots__ = ("ambient_rank", "generators", "inequalities", "lineality", "dim")

    def __init__(self, ambient_rank: int, generators, inequalities, lineality):
        object.__setattr__(self, "ambient_rank", ambient_rank)
        object.__setattr__(self, "generators", tuple(sorted(generators)))
        object.__setattr__(self, "inequalities", tuple(sorted(inequalities)))
        object.__setattr__(self, "lineality", tuple(lineality))
        object.__setattr__(self, "dim", rank(self.generators))

    def __setattr__(self, name, value):
        raise AttributeError("PolyCone is immutable")

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------

    @classmethod
    def from_rays(cls, rays: Iterable[Sequence], ambient_rank: Optional[int] = None) -> "PolyCone":
        vectors = [vector(r) for r in rays]
        n = _resolve_rank(vectors, ambient_rank)
        generators = [primitive(v) for v in vectors if not is_zero(v)]
        inequalities = _facets(generators, n)
        rays_, lineality = _double_description(inequalities, n)
        return cls(n, _generators_from(rays_, lineality), inequalities, lineality)

    @classmethod
    def from_inequalities(cls, normals: Iterable[Sequence], ambient_rank: Optional[int] = None) -> "PolyCone":
        vectors = [vector(a) for a in normals]
        n = _resolve_rank(vectors, ambient_rank)
        rays_, lineality = _double_description(vectors, n)
        generators = _generators_from(rays_, lineality)
        return cls(n, generators, _facets(generators, n), lineality)

    @classmethod
    def zero(cls, ambient_rank: int) -> "PolyCone":
        return cls.from_rays([], ambient_rank)

    @classmethod
    def whole_space(cls, ambient_rank: int) -> "PolyCone":
        return cls.from_inequalities([], ambient_rank)

    @classmethod
    def from_literal(cls, data: dict) -> "PolyCone":
        """Build a cone from ``{"rank": n, "rays": [...]}`` or ``{"rank": n, "ineqs": [...]}``."""
        if not isinstance(data, dict) or "rank" not in data:
            raise ContractError("cone literal must be an object with a 'rank' key")
        n = data["rank"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ContractError(f"cone rank must be a positive integer, got {n!r}")
        rays = data.get("rays")
        ineqs = data.get("ineqs")
        if rays is None and ineqs is None:
            raise ContractError("cone literal needs 'rays' or 'ineqs'")
        return dual_description(rays=rays, inequalities=ineqs, ambient_rank=n)

    def transformed(self, m: Sequence[Sequence[int]], m_inverse_transpose: Sequence[Sequence[int]]) -> "PolyCone":
        """
        Image under an invertible integer matrix, without re-running double description.

        Unimodular maps send primitive vectors to primitive vectors and facets
        to facets, so both descriptions transform directly.
        """
        return PolyCone(
            self.ambient_rank,
            [tuple(mat_vec(m, g)) for g in self.generators],
            [tuple(mat_vec(m_inverse_transpose, a)) for a in self.inequalities],
            [tuple(mat_vec(m, v)) for v in self.lineality],
        )

    # ------------------------------------------------------------------
    # queries
    # ------------------------------------------------------------------

    def contains(self, p: Sequence) -> bool:
        if len(p) != self.ambient_rank:
            raise DimensionMismatch(f"point of length {len(p)} tested against a rank-{self.ambient_rank} cone")
        return all(dot(a, p) >= 0 for a in self.inequalities)

    def contains_cone(self, other: "PolyCone") -> bool:
        _check_same_rank(self, other)
        return all(self.contains(g) for g in other.generators)

    def in_relative_interior(self, p: Sequence) -> bool:
        """Strict test: p satisfies every inequality that is not an implicit equality."""
        if not self.contains(p):
            return False
        center = self.relative_interior_point()
        return all(dot(a, p) > 0 for a in self.inequalities if dot(a, center) > 0)

    def in_interior(self, p: Sequence) -> bool:
        return self.contains(p) and all(dot(a, p) > 0 for a in self.inequalities)

    @property
    def is_full_dimensional(self) -> bool:
        return self.dim == self.ambient_rank

    @property
    def is_strictly_convex(self) -> bool:
        return not self.lineality

    @property
    def is_zero(self) -> bool:
        return not self.generators

    def relative_interior_point(self) -> IntVector:
        point = [0] * self.ambient_rank
        for g in self.generators:
            for i, x in enumerate(g):
                point[i] += x
        return tuple(point)

    def rays(self) -> Tuple[IntVector, ...]:
        """Generators that are not part of a lineality pair."""
        pairs = set()
        for v in self.lineality:
            pairs.add(tuple(v))
            pairs.add(_negate(v))
        return tuple(g for g in self.generators if g not in pairs)

    def to_literal(self) -> dict:
        return {
            "rank": self.ambient_rank,
            "rays": [format_vector(g) for g in self.generators],
        }

    def __eq__(self, other):
        if not isinstance(other, PolyCone):
            return NotImplemented
        if self.ambient_rank != other.ambient_rank or self.dim != other.dim:
            return False
        if self.generators == other.generators:
            return True
        return self.contains_cone(other) and other.contains_cone(self)

    def __hash__(self):
        return hash((self.ambient_rank, self.dim))

    def __repr__(self):
        rays = ", ".join("(" + ", ".join(str(x) for x in g) + ")" for g in self.generators)
        return f"PolyCone(rank={self.ambient_rank}, rays=[{rays}])"


def _resolve_rank(vectors: Sequence[Sequence], ambient_rank: Optional[int]) -> int:
    lengths = {len(v) for v in vectors}
    if ambient_rank is None:
        if not lengths:
            raise ContractError("cannot infer the ambient rank of an empty description")
        if len(lengths) != 1:
            raise DimensionMismatch(f"vectors of different lengths {sorted(lengths)}")
        ambient_rank = lengths.pop()
    elif lengths and lengths != {ambient_rank}:
        raise DimensionMismatch(f"vectors of lengths {sorted(lengths)} in a rank-{ambient_rank} cone")
    if ambient_rank < 1:
        raise ContractError("ambient rank must be at least 1")
    return ambient_rank


def _check_same_rank(c1: PolyCone, c2: PolyCone):
    if c1.ambient_rank != c2.ambient_rank:
        raise DimensionMismatch(f"cones of ranks {c1.ambient_rank} and {c2.ambient_rank}")


# ============================================================================
# OPERATIONS
# ============================================================================

def dual_description(rays=None, inequalities=None, ambient_rank: Optional[int] = None) -> PolyCone:
    """
    Canonical cone from generators, from inequalities, or from both.

    An empty generator list gives the zero cone. When both descriptions are
    supplied they must describe the same set.

    Raises:
        RepresentationMismatch: if the two supplied descriptions disagree
    """
    if rays is None and inequalities is None:
        raise ContractError("dual_description needs generators or inequalities")
    if inequalities is None:
        return PolyCone.from_rays(rays, ambient_rank)
    if rays is None:
        return PolyCone.from_inequalities(inequalities, ambient_rank)

    from_rays = PolyCone.from_rays(rays, ambient_rank)
    from_ineqs = PolyCone.from_inequalities(inequalities, from_rays.ambient_rank)
    if from_rays != from_ineqs:
        outside = [g for g in from_rays.generators if not from_ineqs.contains(g)]
        detail = f"generator {outside[0]} violates an inequality" if outside else "inequalities admit extra rays"
        raise RepresentationMismatch(f"generators and inequalities describe different cones: {detail}")
    return from_rays


def contains(c: PolyCone, p: Sequence) -> bool:
    return c.contains(p)


def dim(c: PolyCone) -> int:
    return c.dim


def is_strictly_convex(c: PolyCone) -> bool:
    return c.is_strictly_convex


def relative_interior_point(c: PolyCone) -> IntVector:
    return c.relative_interior_point()


def intersect(c1: PolyCone, c2: PolyCone) -> PolyCone:
    _check_same_rank(c1, c2)
    return PolyCone.from_inequalities(c1.inequalities + c2.inequalities, c1.ambient_rank)


def cone_sum(c1: PolyCone, c2: PolyCone) -> PolyCone:
    """Minkowski sum; the union of the generator lists."""
    _check_same_rank(c1, c2)
    return PolyCone.from_rays(c1.generators + c2.generators, c1.ambient_rank)


def sum_of(cones: Sequence[PolyCone], ambient_rank: int) -> PolyCone:
    gens = []
    for c in cones:
        if c.ambient_rank != ambient_rank:
            raise DimensionMismatch(f"rank-{c.ambient_rank} cone in a rank-{ambient_rank} sum")
        gens.extend(c.generators)
    return PolyCone.from_rays(gens, ambient_rank)


def linear_image(c: PolyCone, m: Sequence[Sequence]) -> PolyCone:
    """Image under the linear map with matrix ``m`` (rows = target coordinates)."""
    if not m or len(m[0]) != c.ambient_rank:
        cols = len(m[0]) if m else 0
        raise DimensionMismatch(f"{len(m)}x{cols} matrix cannot map a rank-{c.ambient_rank} cone")
    return PolyCone.from_rays([mat_vec(m, g) for g in c.generators], len(m))


def linear_preimage(c: PolyCone, m: Sequence[Sequence]) -> PolyCone:
    """Preimage ``{x : m x in c}``; each normal ``a`` pulls back to ``m^T a``."""
    if len(m) != c.ambient_rank or not m:
        raise DimensionMismatch(f"matrix with {len(m)} rows cannot pull back a rank-{c.ambient_rank} cone")
    mt = transpose(m)
    return PolyCone.from_inequalities([mat_vec(mt, a) for a in c.inequalities], len(m[0]))


def interiors_intersect(c1: PolyCone, c2: PolyCone) -> bool:
    """
    Whether two full-dimensional cones have overlapping interiors.

    Raises:
        NotFullDimensional: if either cone is lower-dimensional
    """
    _check_same_rank(c1, c2)
    for c in (c1, c2):
        if not c.is_full_dimensional:
            raise NotFullDimensional(f"{c!r} has dimension {c.dim} < {c.ambient_rank}")
    return intersect(c1, c2).dim == c1.ambient_rank


def plus_closure(c: PolyCone) -> PolyCone:
    """
    The cone generated by lattice points of the closure.

    For a rational polyhedral cone this is the cone itself; cones with
    irrational boundary are represented by tilings instead.
    """
    return c


# ============================================================================
# FACES
# ============================================================================

@dataclass(frozen=True)
class Face:
    parent: PolyCone
    active_inequalities: FrozenSet[int]
    cone: PolyCone

    @property
    def dim(self) -> int:
        return self.cone.dim


def faces(c: PolyCone) -> List[Face]:
    """
    All faces of ``c``, from the minimal face (the lineality space, {0} for
    pointed cones) up to ``c`` itself, ordered by dimension then generators.
    """
    gens = c.generators
    normals = c.inequalities
    all_normals = frozenset(range(len(normals)))
    zero_sets = [frozenset(i for i, a in enumerate(normals) if dot(a, g) == 0) for g in gens]

    def close(gen_indices):
        active = all_normals
        for g in gen_indices:
            active = active & zero_sets[g]
        closed = frozenset(g for g in range(len(gens)) if active <= zero_sets[g])
        return active, closed

    start = close(range(len(gens)))
    found: Dict[FrozenSet[int], FrozenSet[int]] = {start[1]: start[0]}
    queue = deque([start])
    while queue:
        active, closed = queue.popleft()
        for i in range(len(normals)):
            if i in active:
                continue
            active_sub, closed_sub = close([g for g in closed if i in zero_sets[g]])
            if closed_sub not in found:
                found[closed_sub] = active_sub
                queue.append((active_sub, closed_sub))

    result = []
    for closed, active in found.items():
        face_gens = [gens[g] for g in sorted(closed)]
        result.append(Face(c, active, PolyCone.from_rays(face_gens, c.ambient_rank)))
    result.sort(key=lambda f: (f.cone.dim, f.cone.generators))
    return result


def is_face(parent: PolyCone, candidate: PolyCone) -> bool:
    """Whether ``candidate`` is a face of ``parent`` (the empty face is not modelled)."""
    _check_same_rank(parent, candidate)
    if not parent.contains_cone(candidate):
        return False
    center = candidate.relative_interior_point()
    active = [a for a in parent.inequalities if dot(a, center) == 0]
    spanned = [g for g in parent.generators if all(dot(a, g) == 0 for a in active)]
    return PolyCone.from_rays(spanned, parent.ambient_rank) == candidate


# ============================================================================
# CONIC COMBINATIONS
# ============================================================================

def conic_combination(generators: Sequence[Sequence], p: Sequence) -> Optional[Tuple[Fraction, ...]]:
    """
    Nonnegative coefficients expressing ``p`` in the span of ``generators``,
    or None when ``p`` is outside their cone.

    By Carathéodory's theorem a member lies in the cone of some linearly
    independent subset; maximal independent subsets are tried in
    lexicographic order and solved exactly.
    """
    gens = [tuple(g) for g in generators]
    if is_zero(p):
        return tuple(Fraction(0) for _ in gens)
    nonzero = [i for i, g in enumerate(gens) if not is_zero(g)]
    r = rank([gens[i] for i in nonzero])
    if r == 0 or rank([gens[i] for i in nonzero] + [tuple(p)]) > r:
        return None

    for subset in itertools.combinations(nonzero, r):
        chosen = [gens[i] for i in subset]
        if rank(chosen) < r:
            continue
        coefficients = solve_combination(chosen, p)
        if coefficients is None or any(x < 0 for x in coefficients):
            continue
        full = [Fraction(0)] * len(gens)
        for i, x in zip(subset, coefficients):
            full[i] = x
        return tuple(full)
    return None
