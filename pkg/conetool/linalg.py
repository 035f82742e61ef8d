"""
Exact linear algebra over the rationals.

Vectors are tuples of ``Fraction`` (or ``int``), matrices are tuples of rows.
Rank, kernel, determinant and inverse are computed by python-flint on
integer matrices obtained by clearing denominators row by row, which leaves
row spaces and kernels unchanged.
"""

import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from flint import fmpq_mat, fmpz_mat

from .exceptions import ContractError, DimensionMismatch

Scalar = Union[int, Fraction]
Vector = Tuple[Scalar, ...]
Matrix = Tuple[Vector, ...]
IntVector = Tuple[int, ...]


# ============================================================================
# SCALARS, VECTORS, MATRICES
# ============================================================================

def to_fraction(value) -> Fraction:
    """
    Parse an exact rational from an int, a Fraction, a flint ``fmpq`` or a
    decimal-integer / ``"p/q"`` string.

    Raises:
        ContractError: for floats, booleans and malformed strings
    """
    if isinstance(value, bool):
        raise ContractError(f"boolean {value!r} is not a rational number")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise ContractError(f"floating-point entry {value!r} is not exact; write it as a \"p/q\" string")
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            raise ContractError(f"entry {value!r} must be an integer or \"p/q\" string")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as e:
            raise ContractError(f"entry {value!r} is not a rational number") from e
    if hasattr(value, "p") and hasattr(value, "q"):
        return Fraction(int(value.p), int(value.q))
    raise ContractError(f"entry {value!r} of type {type(value).__name__} is not a rational number")


def vector(entries: Sequence) -> Tuple[Fraction, ...]:
    return tuple(to_fraction(e) for e in entries)


def matrix(rows: Sequence[Sequence]) -> Tuple[Tuple[Fraction, ...], ...]:
    result = tuple(vector(row) for row in rows)
    if result and len({len(row) for row in result}) != 1:
        raise DimensionMismatch("matrix rows have different lengths")
    return result


def identity(n: int) -> Tuple[IntVector, ...]:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def shape(m: Sequence[Sequence]) -> Tuple[int, int]:
    rows = len(m)
    return rows, (len(m[0]) if rows else 0)


def transpose(m: Sequence[Sequence], ncols: Optional[int] = None) -> Tuple[tuple, ...]:
    if not m:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*m))


def dot(a: Sequence, b: Sequence):
    if len(a) != len(b):
        raise DimensionMismatch(f"cannot pair vectors of lengths {len(a)} and {len(b)}")
    return sum((x * y for x, y in zip(a, b)), 0)


def mat_vec(m: Sequence[Sequence], v: Sequence) -> tuple:
    if m and len(m[0]) != len(v):
        raise DimensionMismatch(f"matrix with {len(m[0])} columns cannot act on a vector of length {len(v)}")
    return tuple(dot(row, v) for row in m)


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple:
    if a and len(a[0]) != len(b):
        raise DimensionMismatch(f"cannot multiply {len(a)}x{len(a[0])} by {len(b)}x{shape(b)[1]}")
    columns = transpose(b)
    return tuple(tuple(dot(row, col) for col in columns) for row in a)


def is_zero(v: Sequence) -> bool:
    return all(x == 0 for x in v)


def l1_norm(v: Sequence):
    return sum((abs(x) for x in v), 0)


def sup_norm(v: Sequence):
    return max((abs(x) for x in v), default=0)


def primitive(v: Sequence) -> IntVector:
    """
    Scale a rational vector to the primitive integer vector spanning the same ray.

    The zero vector is returned unchanged (as integers).
    """
    fractions = [to_fraction(x) for x in v]
    denominator = math.lcm(*[f.denominator for f in fractions]) if fractions else 1
    ints = [int(f * denominator) for f in fractions]
    divisor = math.gcd(*ints) if ints else 0
    if divisor == 0:
        return tuple(ints)
    return tuple(x // divisor for x in ints)


def format_vector(v: Sequence) -> List[str]:
    """Exact string form used in reports: ``"3"`` or ``"-1/2"``."""
    return [str(to_fraction(x)) for x in v]


# ============================================================================
# FLINT-BACKED COMPUTATIONS
# ============================================================================

def _integer_row(row: Sequence) -> List[int]:
    fractions = [to_fraction(x) for x in row]
    denominator = math.lcm(*[f.denominator for f in fractions]) if fractions else 1
    return [int(f * denominator) for f in fractions]


def _fmpz(rows: Sequence[Sequence], ncols: int) -> fmpz_mat:
    flat = [x for row in rows for x in _integer_row(row)]
    return fmpz_mat(len(rows), ncols, flat)


def rank(rows: Sequence[Sequence]) -> int:
    rows = [row for row in rows if not is_zero(row)]
    if not rows:
        return 0
    return int(_fmpz(rows, len(rows[0])).rank())


def nullspace(rows: Sequence[Sequence], ncols: int) -> List[IntVector]:
    """
    Primitive integer basis of ``{x : row . x = 0 for every row}``.

    An empty row list has the whole space as kernel (standard basis).
    """
    rows = [row for row in rows if not is_zero(row)]
    if not rows:
        return [tuple(1 if i == j else 0 for i in range(ncols)) for j in range(ncols)]
    kernel, nullity = _fmpz(rows, ncols).nullspace()
    nullity = int(nullity)
    basis = []
    for j in range(nullity):
        basis.append(primitive([int(kernel[i, j]) for i in range(ncols)]))
    return basis


def determinant(m: Sequence[Sequence]) -> Fraction:
    n, ncols = shape(m)
    if n != ncols:
        raise DimensionMismatch(f"determinant of a non-square {n}x{ncols} matrix")
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    for row in m:
        fractions = [to_fraction(x) for x in row]
        scale *= math.lcm(*[f.denominator for f in fractions])
    return Fraction(int(_fmpz(m, n).det())) / scale


def inverse(m: Sequence[Sequence]) -> Tuple[Tuple[Fraction, ...], ...]:
    """
    Exact inverse of a square rational matrix.

    Rows are scaled to integers (M = D^-1 N), so M^-1 = N^-1 D.

    Raises:
        DimensionMismatch: if the matrix is not square
        ZeroDivisionError: if the matrix is singular
    """
    n, ncols = shape(m)
    if n != ncols:
        raise DimensionMismatch(f"inverse of a non-square {n}x{ncols} matrix")
    scales = []
    for row in m:
        fractions = [to_fraction(x) for x in row]
        scales.append(math.lcm(*[f.denominator for f in fractions]))
    integer = _fmpz(m, n)
    if int(integer.det()) == 0:
        raise ZeroDivisionError("matrix is singular")
    inv = fmpq_mat(integer).inv()
    return tuple(
        tuple(to_fraction(inv[i, j]) * scales[j] for j in range(n))
        for i in range(n)
    )


def solve_combination(vectors: Sequence[Sequence], target: Sequence) -> Optional[Tuple[Fraction, ...]]:
    """
    Coefficients c with sum(c_j * vectors[j]) == target, or None.

    The vectors must be linearly independent; the answer is then unique.
    Solved through the kernel of the augmented system [v_1 ... v_k | target].
    """
    k = len(vectors)
    n = len(target)
    rows = [[vec[i] for vec in vectors] + [target[i]] for i in range(n)]
    for basis_vector in nullspace(rows, k + 1):
        t = basis_vector[k]
        if t != 0:
            return tuple(Fraction(-basis_vector[j], t) for j in range(k))
    if is_zero(target):
        return tuple(Fraction(0) for _ in range(k))
    return None
