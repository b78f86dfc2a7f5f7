"""Worked example configurations used by the demo command and the tests."""

from __future__ import annotations

from fractions import Fraction

from .filtration import FilteredConfiguration, Filtration
from .linalg import Subspace, span
from .surface import DivisorConfiguration, PlaneArrangement


def _two_step_line(rank: int, line: Subspace, top: Fraction = Fraction(1, 2)) -> Filtration:
    return Filtration(rank, ((top, line), (-top, Subspace.full(rank))))


def two_lines() -> tuple[DivisorConfiguration, FilteredConfiguration]:
    """Two distinct lines in the plane, rank 2, weights +-1/2, distinct flag lines."""
    config = DivisorConfiguration(
        ("L1", "L2"), (Fraction(1), Fraction(1)), ((1, 1), (1, 1))
    )
    fc = FilteredConfiguration(
        2,
        (
            _two_step_line(2, span([[1, 0]], 2)),
            _two_step_line(2, span([[0, 1]], 2)),
        ),
    )
    return config, fc


def three_generic_lines() -> tuple[DivisorConfiguration, FilteredConfiguration]:
    """A triangle of lines, rank 2, weights +-1/2, pairwise-distinct flag lines."""
    config = DivisorConfiguration(
        ("L1", "L2", "L3"),
        (Fraction(1), Fraction(1), Fraction(1)),
        ((1, 1, 1), (1, 1, 1), (1, 1, 1)),
    )
    fc = FilteredConfiguration(
        2,
        (
            _two_step_line(2, span([[1, 0]], 2)),
            _two_step_line(2, span([[0, 1]], 2)),
            _two_step_line(2, span([[1, 1]], 2)),
        ),
    )
    return config, fc


def three_concurrent_lines() -> PlaneArrangement:
    """Three lines through a common point, to be resolved by one blow-up."""
    return PlaneArrangement(
        (("L1", 1), ("L2", 1), ("L3", 1)),
        (("p", ("L1", "L2", "L3")),),
    )
