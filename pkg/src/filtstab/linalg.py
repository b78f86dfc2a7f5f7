"""Exact linear algebra over the rationals.

Subspaces of Q^r are stored in reduced row echelon form, which is a canonical
representative of the row space: two subspaces are equal exactly when their
stored bases are identical, so they can be hashed, deduplicated and compared
deterministically.  All arithmetic uses ``fractions.Fraction``; there is no
floating point anywhere in this module.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Iterable, Sequence

from .errors import DimensionMismatchError, InvariantError

Rat = Fraction

_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def rational_from_string(text: str) -> Fraction:
    """Parse a rational literal ``"p"`` or ``"p/q"`` (q > 0) exactly."""
    stripped = text.strip()
    if not _RATIONAL_RE.match(stripped):
        raise ValueError(f"not a rational literal: {text!r}")
    if "/" in stripped:
        num, den = stripped.split("/")
        if int(den) == 0:
            raise ValueError(f"zero denominator in rational literal: {text!r}")
        return Fraction(int(num), int(den))
    return Fraction(int(stripped))


def rational_to_string(value: Fraction | int) -> str:
    """Format a rational as ``"p"`` or ``"p/q"``; inverse of parsing."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _as_row(row: Sequence, width: int) -> tuple[Fraction, ...]:
    if len(row) != width:
        raise DimensionMismatchError(
            f"row has length {len(row)}, expected {width}"
        )
    return tuple(Fraction(x) for x in row)


def _rref(rows: Iterable[Sequence[Fraction]], width: int) -> tuple[tuple[Fraction, ...], ...]:
    """Reduced row echelon form of the given rows, zero rows dropped."""
    work = [list(_as_row(r, width)) for r in rows]
    pivot_row = 0
    for col in range(width):
        pivot = None
        for i in range(pivot_row, len(work)):
            if work[i][col] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        work[pivot_row], work[pivot] = work[pivot], work[pivot_row]
        lead = work[pivot_row][col]
        if lead != 1:
            work[pivot_row] = [x / lead for x in work[pivot_row]]
        for i in range(len(work)):
            if i != pivot_row and work[i][col] != 0:
                factor = work[i][col]
                work[i] = [a - factor * b for a, b in zip(work[i], work[pivot_row])]
        pivot_row += 1
        if pivot_row == len(work):
            break
    return tuple(tuple(r) for r in work[:pivot_row] if any(x != 0 for x in r))


def _primitive_int_row(row: Sequence[Fraction]) -> tuple[int, ...]:
    scale = lcm(*(x.denominator for x in row)) if row else 1
    ints = [int(x * scale) for x in row]
    common = gcd(*ints) if ints else 1
    if common > 1:
        ints = [v // common for v in ints]
    return tuple(ints)


@lru_cache(maxsize=1 << 16)
def _integer_rows(subspace: "Subspace") -> tuple[tuple[int, ...], ...]:
    return tuple(_primitive_int_row(row) for row in subspace.rows)


@lru_cache(maxsize=1 << 17)
def _stacked_rank(
    rows_a: tuple[tuple[int, ...], ...],
    rows_b: tuple[tuple[int, ...], ...],
    width: int,
) -> int:
    # fraction-free integer elimination; only the rank is needed
    work = [list(r) for r in rows_a + rows_b]
    rank = 0
    for col in range(width):
        pivot = None
        for i in range(rank, len(work)):
            if work[i][col]:
                pivot = i
                break
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        lead = work[rank][col]
        for i in range(rank + 1, len(work)):
            entry = work[i][col]
            if entry:
                row = work[i]
                top = work[rank]
                work[i] = [lead * x - entry * y for x, y in zip(row, top)]
        rank += 1
        if rank == len(work):
            break
    return rank


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of Q^r, held as a reduced-row-echelon basis.

    Construct through :func:`span`, :meth:`zero` or :meth:`full`; the raw
    constructor only accepts rows that are already in canonical form.
    """

    ambient_dim: int
    rows: tuple[tuple[Fraction, ...], ...] = ()

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise InvariantError("ambient dimension must be positive")
        rows = tuple(_as_row(r, self.ambient_dim) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        last_pivot = -1
        for r_index, row in enumerate(rows):
            pivot = next((j for j, x in enumerate(row) if x != 0), None)
            if pivot is None:
                raise InvariantError("zero row in subspace basis")
            if pivot <= last_pivot:
                raise InvariantError("basis rows are not in echelon order")
            if row[pivot] != 1:
                raise InvariantError("pivot entries must be 1")
            for other_index, other in enumerate(rows):
                if other_index != r_index and other[pivot] != 0:
                    raise InvariantError("pivot columns must be cleared")
            last_pivot = pivot

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        rows = tuple(
            tuple(Fraction(1 if i == j else 0) for j in range(ambient_dim))
            for i in range(ambient_dim)
        )
        return cls(ambient_dim, rows)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def is_zero(self) -> bool:
        return not self.rows

    def is_full(self) -> bool:
        return len(self.rows) == self.ambient_dim

    def contains_vector(self, vector: Sequence) -> bool:
        vec = list(_as_row(vector, self.ambient_dim))
        for row in self.rows:
            pivot = next(j for j, x in enumerate(row) if x != 0)
            if vec[pivot] != 0:
                factor = vec[pivot]
                vec = [a - factor * b for a, b in zip(vec, row)]
        return all(x == 0 for x in vec)

    def contains(self, other: "Subspace") -> bool:
        self._check_ambient(other)
        return all(self.contains_vector(row) for row in other.rows)

    def intersect(self, other: "Subspace") -> "Subspace":
        self._check_ambient(other)
        return _intersect_cached(self, other)

    def intersection_dim(self, other: "Subspace") -> int:
        """dim(self ∩ other), via ranks over the integers (fast path)."""
        self._check_ambient(other)
        if self.is_zero() or other.is_zero():
            return 0
        if self.is_full():
            return other.dim
        if other.is_full():
            return self.dim
        joined = _stacked_rank(
            _integer_rows(self), _integer_rows(other), self.ambient_dim
        )
        return self.dim + other.dim - joined

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check_ambient(other)
        return span(self.rows + other.rows, self.ambient_dim)

    def __and__(self, other: "Subspace") -> "Subspace":
        return self.intersect(other)

    def sort_key(self) -> tuple:
        """Deterministic total order: by dimension, then by basis entries."""
        return (self.dim, self.rows)

    def _check_ambient(self, other: "Subspace") -> None:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatchError(
                f"ambient dimensions differ: {self.ambient_dim} vs {other.ambient_dim}"
            )

    def __repr__(self) -> str:
        body = "; ".join(
            " ".join(rational_to_string(x) for x in row) for row in self.rows
        )
        return f"Subspace({self.dim}d in Q^{self.ambient_dim}: [{body}])"


def span(rows: Iterable[Sequence], ambient_dim: int) -> Subspace:
    """The subspace spanned by ``rows``, in canonical echelon form.

    Idempotent and invariant under row shuffles and invertible row
    operations; dependent rows collapse.
    """
    return Subspace(ambient_dim, _rref(rows, ambient_dim))


@lru_cache(maxsize=1 << 16)
def _intersect_cached(a: Subspace, b: Subspace) -> Subspace:
    # Zassenhaus: row-reduce [A | A; B | 0]; rows whose left half vanishes
    # carry a basis of the intersection in their right half.
    n = a.ambient_dim
    if a.is_zero() or b.is_zero():
        return Subspace.zero(n)
    if a.is_full():
        return b
    if b.is_full():
        return a
    zero = (Fraction(0),) * n
    stacked = [row + row for row in a.rows] + [row + zero for row in b.rows]
    reduced = _rref(stacked, 2 * n)
    inter_rows = [row[n:] for row in reduced if all(x == 0 for x in row[:n])]
    return span(inter_rows, n)
