"""
Unimodular integer matrix groups acting on the lattice.

Groups are given by finite generating sets and are never assumed finite:
every enumeration goes through :func:`orbit_ball`, which takes an explicit
radius and stops at the configured element cap.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

from flint import fmpz_mat

from . import conf
from .cone import PolyCone
from .exceptions import (
    BudgetExceeded,
    ContractError,
    DimensionMismatch,
    InvariantConeViolation,
    NotUnimodular,
)
from .linalg import IntVector, determinant, identity, inverse, mat_vec, matrix, transpose

logger = logging.getLogger(__name__)

IntMatrix = Tuple[IntVector, ...]


def _fmpz_square(m: IntMatrix) -> fmpz_mat:
    n = len(m)
    return fmpz_mat(n, n, [x for row in m for x in row])


def _from_fmpz(m: fmpz_mat) -> IntMatrix:
    n = m.nrows()
    entries = [int(x) for x in m.entries()]
    return tuple(tuple(entries[i * n:(i + 1) * n]) for i in range(n))


def _reduce_word(word: Sequence[int]) -> Tuple[int, ...]:
    """Cancel adjacent letter/inverse pairs."""
    reduced: List[int] = []
    for letter in word:
        if reduced and reduced[-1] == -letter:
            reduced.pop()
        else:
            reduced.append(letter)
    return tuple(reduced)


@dataclass(frozen=True, eq=False)
class GroupElement:
    """
    An element of GL_n(Z) together with a word in the group generators.

    Letter ``k`` stands for generator ``k`` (1-based), ``-k`` for its inverse.
    Equality and hashing use the matrix only.
    """

    matrix: IntMatrix
    word: Tuple[int, ...] = ()

    @property
    def rank(self) -> int:
        return len(self.matrix)

    @property
    def is_identity(self) -> bool:
        return self.matrix == identity(self.rank)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if other.rank != self.rank:
            raise DimensionMismatch(f"cannot compose rank {self.rank} with rank {other.rank}")
        product = _fmpz_square(self.matrix) * _fmpz_square(other.matrix)
        return GroupElement(_from_fmpz(product), _reduce_word(self.word + other.word))

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def inverse(self) -> "GroupElement":
        inv = inverse(self.matrix)
        return GroupElement(
            tuple(tuple(int(x) for x in row) for row in inv),
            tuple(-letter for letter in reversed(self.word)),
        )

    def apply(self, x: Sequence) -> tuple:
        if len(x) != self.rank:
            raise DimensionMismatch(f"rank-{self.rank} element cannot act on a vector of length {len(x)}")
        return mat_vec(self.matrix, x)

    def act_on_cone(self, c: PolyCone) -> PolyCone:
        if c.ambient_rank != self.rank:
            raise DimensionMismatch(f"rank-{self.rank} element cannot act on a rank-{c.ambient_rank} cone")
        inverse_transpose = transpose(self.inverse().matrix)
        return c.transformed(self.matrix, inverse_transpose)

    def label(self) -> str:
        if not self.word:
            return "id"
        letters = []
        for letter in self.word:
            letters.append(f"g{letter}" if letter > 0 else f"g{-letter}^-1")
        return " ".join(letters)

    def to_report(self) -> dict:
        return {
            "word": self.label(),
            "matrix": [[str(x) for x in row] for row in self.matrix],
        }


@dataclass(frozen=True)
class ActionGroup:
    """
    A group given by generators, acting on a rank-``ambient_rank`` lattice.

    ``steps`` holds the generators and their inverses (deduplicated, identity
    dropped) in the order g1, g1^-1, g2, g2^-1, ...; BFS and greedy reduction
    try them in this order.
    """

    ambient_rank: int
    generators: Tuple[GroupElement, ...]
    invariant_cone: Optional[PolyCone] = None
    steps: Tuple[GroupElement, ...] = field(init=False)

    def __post_init__(self):
        steps = []
        seen = {identity(self.ambient_rank)}
        for g in self.generators:
            for candidate in (g, g.inverse()):
                if candidate.matrix not in seen:
                    seen.add(candidate.matrix)
                    steps.append(candidate)
        object.__setattr__(self, "steps", tuple(steps))

    @property
    def identity(self) -> GroupElement:
        return GroupElement(identity(self.ambient_rank), ())

    @property
    def is_trivial(self) -> bool:
        return not self.steps

    def matrix_of_word(self, word: Sequence[int]) -> IntMatrix:
        """Multiply generator matrices along a word."""
        result = self.identity
        for letter in word:
            g = self.generators[abs(letter) - 1]
            result = result * (g if letter > 0 else g.inverse())
        return result.matrix


def make_group(gens: Sequence[Sequence[Sequence]], invariant_cone: Optional[PolyCone] = None,
               ambient_rank: Optional[int] = None) -> ActionGroup:
    """
    Build an action group from integer matrices.

    Args:
        gens: square integer matrices of equal size
        invariant_cone: optional cone every generator must map into itself
        ambient_rank: required only when ``gens`` is empty

    Raises:
        NotUnimodular: a generator is not an integer matrix of determinant +/-1
        InvariantConeViolation: a generator maps a ray of ``invariant_cone`` outside it
    """
    if ambient_rank is None:
        if gens:
            ambient_rank = len(gens[0])
        elif invariant_cone is not None:
            ambient_rank = invariant_cone.ambient_rank
        else:
            raise DimensionMismatch("cannot infer the rank of a group with no generators")

    elements = []
    for index, raw in enumerate(gens):
        m = matrix(raw)
        if len(m) != ambient_rank or any(len(row) != ambient_rank for row in m):
            raise DimensionMismatch(f"generator {index}: expected a {ambient_rank}x{ambient_rank} matrix")
        if any(x.denominator != 1 for row in m for x in row):
            raise NotUnimodular(f"generator {index}: entries must be integers")
        det = determinant(m)
        if det not in (1, -1):
            raise NotUnimodular(f"generator {index}: determinant {det}")
        elements.append(GroupElement(tuple(tuple(int(x) for x in row) for row in m), (index + 1,)))

    if invariant_cone is not None:
        if invariant_cone.ambient_rank != ambient_rank:
            raise DimensionMismatch(
                f"invariant cone has rank {invariant_cone.ambient_rank}, group has rank {ambient_rank}"
            )
        for index, g in enumerate(elements):
            for ray in invariant_cone.generators:
                image = g.apply(ray)
                if not invariant_cone.contains(image):
                    raise InvariantConeViolation(
                        f"generator {index}: maps {list(ray)} to {list(image)}, outside the invariant cone"
                    )

    group = ActionGroup(ambient_rank, tuple(elements), invariant_cone)
    logger.debug(f"Group of rank {ambient_rank} with {len(group.steps)} steps")
    return group


# ============================================================================
# ORBIT BALLS
# ============================================================================

@dataclass(frozen=True)
class OrbitBall:
    elements: Tuple[GroupElement, ...]
    radius: int
    # True when the ball is closed under the generators, i.e. the whole group
    complete: bool


def enumerate_ball(group: ActionGroup, radius: int, cap: Optional[int] = None) -> OrbitBall:
    """
    Breadth-first enumeration of all elements with word length <= radius.

    Raises:
        BudgetExceeded: if the ball would hold more than ``cap`` elements
    """
    if radius < 0:
        raise ContractError(f"radius must be >= 0, got {radius}")
    cap = cap if cap is not None else conf.get_budget_cap()
    return _enumerate_ball(group, radius, cap)


@lru_cache(maxsize=64)
def _enumerate_ball(group: ActionGroup, radius: int, cap: int) -> OrbitBall:
    ball = [group.identity]
    seen = {group.identity.matrix}
    frontier = [group.identity]
    for level in range(radius):
        next_frontier = []
        for element in frontier:
            for step in group.steps:
                candidate = element * step
                if candidate.matrix in seen:
                    continue
                seen.add(candidate.matrix)
                ball.append(candidate)
                next_frontier.append(candidate)
                if len(ball) > cap:
                    raise BudgetExceeded(
                        f"orbit ball of radius {radius} exceeds the cap of {cap} elements "
                        f"(reached {len(ball)} at level {level + 1})",
                        cap=cap,
                        reached=len(ball),
                    )
        frontier = next_frontier
        if not frontier:
            break

    complete = all((element * step).matrix in seen for element in frontier for step in group.steps)
    return OrbitBall(tuple(ball), radius, complete)


def orbit_ball(group: ActionGroup, radius: int, cap: Optional[int] = None) -> List[GroupElement]:
    return list(enumerate_ball(group, radius, cap).elements)


def act(g: GroupElement, x: Union[Sequence, PolyCone]):
    if isinstance(x, PolyCone):
        return g.act_on_cone(x)
    return g.apply(x)


def stabilizer_in_ball(group: ActionGroup, c: PolyCone, radius: int) -> List[GroupElement]:
    """Ball elements mapping ``c`` onto itself; a finite window into the stabilizer."""
    return [g for g in orbit_ball(group, radius) if g.act_on_cone(c) == c]
