"""Chern numbers of filtered data on a divisor configuration.

Two routes are implemented and cross-checked against each other:

* the table-driven route (:func:`c2_number`) consumes abstract graded
  dimension tables, one per component and one per crossing point, and
  assembles c2 from c1^2, the self-intersection terms and the local
  crossing contributions;
* the pairing route (:func:`c2_trivial`) applies only when the tables come
  from a single configuration of flags on the trivial system, where c2
  collapses to -1/2 * sum_{i,j} <F_i, F_j> D_i.D_j.

Both must agree exactly on balanced configurations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    DegenerateDegreeError,
    InvariantError,
    MissingCrossingTableError,
    ShapeMismatchError,
    UnbalancedFiltrationError,
)
from .filtration import (
    FilteredConfiguration,
    GrSpectrum,
    joint_multiplicity_table,
    product,
)
from .surface import DivisorConfiguration, crossing_points


@dataclass(frozen=True)
class CrossingTable:
    """Joint graded dimensions at one crossing point of components (i, j).

    Entries are (weight on the i side, weight on the j side, multiplicity),
    with i < j fixing the orientation; multiplicities sum to the rank.
    """

    pair: tuple[int, int]
    entries: tuple[tuple[Fraction, Fraction, int], ...]

    def __post_init__(self):
        i, j = self.pair
        object.__setattr__(self, "pair", (int(i), int(j)))
        object.__setattr__(
            self,
            "entries",
            tuple((Fraction(a), Fraction(b), int(m)) for a, b, m in self.entries),
        )
        if not self.pair[0] < self.pair[1]:
            raise InvariantError("crossing pair must be ordered i < j")
        if any(m < 1 for _, _, m in self.entries):
            raise InvariantError("crossing multiplicities must be positive")


@dataclass(frozen=True)
class FilteredSystemData:
    """Abstract graded dimension tables of a filtered system of given rank."""

    rank: int
    component_tables: tuple[GrSpectrum, ...]
    crossing_tables: tuple[CrossingTable, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "component_tables", tuple(self.component_tables)
        )
        object.__setattr__(self, "crossing_tables", tuple(self.crossing_tables))
        if self.rank < 1:
            raise InvariantError("rank must be positive")
        for index, table in enumerate(self.component_tables):
            if table.rank() != self.rank:
                raise InvariantError(
                    f"component table {index} sums to {table.rank()}, "
                    f"expected rank {self.rank}"
                )
        for table in self.crossing_tables:
            total = sum(m for _, _, m in table.entries)
            if total != self.rank:
                raise InvariantError(
                    f"crossing table for pair {table.pair} sums to {total}, "
                    f"expected rank {self.rank}"
                )


@dataclass(frozen=True)
class ChernReport:
    """First and second Chern data of a filtered system on a configuration."""

    c1_coefficients: tuple[Fraction, ...]
    c1_squared: Fraction
    c2: Fraction


def _check_component_count(data: FilteredSystemData, config: DivisorConfiguration) -> None:
    if len(data.component_tables) != config.n_components:
        raise ShapeMismatchError(
            f"{len(data.component_tables)} component tables for "
            f"{config.n_components} components"
        )


def c1_cycle(
    data: FilteredSystemData, config: DivisorConfiguration
) -> tuple[Fraction, ...]:
    """Coefficients of the first Chern cycle, one per component.

    The coefficient of D_i is minus the weight moment of its graded table;
    it vanishes for every component exactly when each table is balanced.
    """
    _check_component_count(data, config)
    return tuple(-table.moment() for table in data.component_tables)


def c2_local(entries: Iterable[Sequence]) -> Fraction:
    """Local second-Chern contribution of one crossing point.

    Minus the weighted sum of the joint graded dimensions:
    -sum_{a,b} a*b*dim(gr_a gr_b).  Zero whenever either side puts all of
    its weight at 0.
    """
    return -sum((Fraction(a) * Fraction(b) * int(m) for a, b, m in entries), Fraction(0))


def c2_number(data: FilteredSystemData, config: DivisorConfiguration) -> ChernReport:
    """Assemble the Chern report from graded dimension tables.

    c2 combines half the square of c1, self-intersection terms weighted by
    the second moments of the component tables, and the local contributions
    at the crossing points.  The crossing tables must cover exactly the
    crossings of the configuration, point by point.  The local contributions
    enter with the sign that makes this assembly agree with the pairing form
    -1/2 sum <F_i,F_j> D_i.D_j on balanced flag configurations (c2_local
    already carries a minus sign).
    """
    _check_component_count(data, config)
    expected = dict(crossing_points(config))
    seen: dict[tuple[int, int], int] = {}
    for table in data.crossing_tables:
        if table.pair not in expected:
            raise ShapeMismatchError(
                f"crossing table given for non-crossing pair {table.pair}"
            )
        seen[table.pair] = seen.get(table.pair, 0) + 1
    for pair, count in expected.items():
        have = seen.get(pair, 0)
        if have != count:
            raise MissingCrossingTableError(
                f"pair {pair} meets in {count} points but has {have} tables"
            )

    coefficients = c1_cycle(data, config)
    c1_sq = config.pairing(coefficients)
    self_term = sum(
        (
            table.second_moment() * config.intersection[i][i]
            for i, table in enumerate(data.component_tables)
        ),
        Fraction(0),
    )
    crossing_term = sum(
        (c2_local(table.entries) for table in data.crossing_tables), Fraction(0)
    )
    c2 = Fraction(1, 2) * c1_sq - Fraction(1, 2) * self_term + crossing_term
    return ChernReport(coefficients, c1_sq, c2)


def derive_tables(
    fc: FilteredConfiguration, config: DivisorConfiguration
) -> FilteredSystemData:
    """Graded dimension tables of a flag configuration on the trivial system.

    Component tables are the graded spectra of the flags; the crossing table
    of a pair is its joint multiplicity table, repeated once per intersection
    point (the trivial system has the same fiber everywhere).
    """
    if len(fc.filtrations) != config.n_components:
        raise ShapeMismatchError(
            f"{len(fc.filtrations)} filtrations for {config.n_components} components"
        )
    component_tables = tuple(f.gr_spectrum() for f in fc.filtrations)
    tables: list[CrossingTable] = []
    for (i, j), count in crossing_points(config):
        entries = joint_multiplicity_table(fc.filtrations[i], fc.filtrations[j])
        for _ in range(count):
            tables.append(CrossingTable((i, j), entries))
    return FilteredSystemData(fc.rank, component_tables, tuple(tables))


def c2_trivial(fc: FilteredConfiguration, config: DivisorConfiguration) -> Fraction:
    """Second Chern number of a balanced flag configuration, via the pairing.

    Equals ``c2_number(derive_tables(fc, config), config).c2`` exactly; the
    equality of the two routes is the package's central cross-check.
    """
    if len(fc.filtrations) != config.n_components:
        raise ShapeMismatchError(
            f"{len(fc.filtrations)} filtrations for {config.n_components} components"
        )
    for index, f in enumerate(fc.filtrations):
        if not f.is_balanced():
            raise UnbalancedFiltrationError(
                f"component {index} carries an unbalanced filtration"
            )
    total = Fraction(0)
    n = config.n_components
    pairings: dict[tuple[int, int], Fraction] = {}
    for i in range(n):
        for j in range(n):
            count = config.intersection[i][j]
            if count == 0:
                continue
            key = (min(i, j), max(i, j))
            if key not in pairings:
                pairings[key] = product(fc.filtrations[key[0]], fc.filtrations[key[1]])
            total += pairings[key] * count
    return -Fraction(1, 2) * total


def norm_sq(fc: FilteredConfiguration, config: DivisorConfiguration) -> Fraction:
    """Squared norm of a flag configuration: sum of alpha^2 * mult * degree.

    Non-negative; zero exactly when every component carrying any weight has
    degree zero or no weight at all.  A nontrivial filtration on a
    degree-zero component is rejected, since it would contribute data the
    norm cannot see.
    """
    if len(fc.filtrations) != config.n_components:
        raise ShapeMismatchError(
            f"{len(fc.filtrations)} filtrations for {config.n_components} components"
        )
    total = Fraction(0)
    for index, f in enumerate(fc.filtrations):
        degree = config.degrees[index]
        if degree == 0 and not f.is_trivial:
            raise DegenerateDegreeError(
                f"component {config.names[index]!r} has degree 0 but carries a "
                "nontrivial filtration"
            )
        total += f.gr_spectrum().second_moment() * degree
    return total
