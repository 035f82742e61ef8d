"""Shared fixtures for the conetool test suite."""

from conetool.action import make_group
from conetool.cone import PolyCone
from conetool.tiling import AmbientRegion, TiledCone

PELL_MATRIX = ((3, 4), (2, 3))
PELL_INVERSE = ((3, -4), (-2, 3))
SWAP = ((0, 1), (1, 0))


def cone(*rays, rank=None):
    return PolyCone.from_rays(rays, rank)


def quadrant():
    return cone((1, 0), (0, 1))


def octant():
    return cone((1, 0, 0), (0, 1, 0), (0, 0, 1))


def trivial_group(rank):
    return make_group([], ambient_rank=rank)


def swap_group():
    return make_group([SWAP], quadrant())


def pell_group():
    return make_group([PELL_MATRIX])


def pell_tile():
    return cone((1, 0), (3, 2))


def pell_ambient():
    return AmbientRegion(PolyCone.from_inequalities([(3, -4), (3, 4)]), ((1, 0), (0, -2)))


def pell_tiling(tile=None):
    return TiledCone(pell_group(), tile or pell_tile(), pell_ambient())


def pell_powers(bound):
    """(k, g^k) for |k| <= bound, as a list of group elements."""
    group = pell_group()
    g = group.generators[0]
    g_inv = g.inverse()
    powers = [(0, group.identity)]
    up = down = group.identity
    for k in range(1, bound + 1):
        up = g * up
        down = g_inv * down
        powers.append((k, up))
        powers.append((-k, down))
    return powers


def dihedral_group():
    square = cone((1, 1, 1), (1, -1, 1), (-1, 1, 1), (-1, -1, 1))
    return make_group(
        [
            [[0, 1, 0], [1, 0, 0], [0, 0, 1]],
            [[1, 0, 0], [0, -1, 0], [0, 0, 1]],
        ],
        square,
    )


def square_cone():
    return cone((1, 1, 1), (1, -1, 1), (-1, 1, 1), (-1, -1, 1))


def dihedral_tile():
    return cone((0, 0, 1), (1, 0, 1), (1, 1, 1))


def dihedral_tiling():
    return TiledCone(dihedral_group(), dihedral_tile(), AmbientRegion(square_cone()))
