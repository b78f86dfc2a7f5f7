"""Shared generators and independent oracles for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction
from math import gcd

from filtstab import (
    DivisorConfiguration,
    FilteredConfiguration,
    Filtration,
    PlaneArrangement,
    Status,
    Subspace,
    blow_up,
    parabolic_degree,
    span,
)


def random_invertible_rows(rng: random.Random, rank: int, height: int = 5) -> list[list[int]]:
    while True:
        rows = [[rng.randint(-height, height) for _ in range(rank)] for _ in range(rank)]
        if span(rows, rank).dim == rank:
            return rows


def random_subspace(rng: random.Random, rank: int, dim: int, height: int = 5) -> Subspace:
    while True:
        rows = [[rng.randint(-height, height) for _ in range(rank)] for _ in range(dim)]
        candidate = span(rows, rank)
        if candidate.dim == dim:
            return candidate


def random_balanced_filtration(
    rng: random.Random,
    rank: int,
    height: int = 5,
    steps: int | None = None,
) -> Filtration:
    """Balanced filtration whose weights have denominator dividing 12.

    Weights are (n_s * rank - K) / 12 for distinct decreasing integers n_s
    and K the mult-weighted sum of the n_s, which is balanced by
    construction.
    """
    k = steps if steps is not None else rng.randint(1, rank)
    if k == 1:
        return Filtration.trivial(rank)
    rows = random_invertible_rows(rng, rank, height)
    dims = sorted(rng.sample(range(1, rank), k - 1)) + [rank]
    spaces = [span(rows[:d], rank) for d in dims]
    numerators = sorted(rng.sample(range(-4, 5), k), reverse=True)
    mults = []
    prev = 0
    for d in dims:
        mults.append(d - prev)
        prev = d
    offset = sum(n * m for n, m in zip(numerators, mults))
    weights = [Fraction(n * rank - offset, 12) for n in numerators]
    return Filtration(rank, tuple(zip(weights, spaces)))


def random_balanced_weights_for(rng: random.Random, filt: Filtration) -> list[Fraction]:
    """Fresh balanced weights (denominator | 12) for an existing flag's shape."""
    k = len(filt.steps)
    mults = [m for _, m in filt.gr_spectrum().entries]
    numerators = sorted(rng.sample(range(-4, 5), k), reverse=True)
    offset = sum(n * m for n, m in zip(numerators, mults))
    rank = filt.ambient_dim
    return [Fraction(n * rank - offset, 12) for n in numerators]


def random_divisor_config(
    rng: random.Random, n_components: int, max_crossing: int = 3
) -> DivisorConfiguration:
    names = tuple(f"C{i}" for i in range(n_components))
    degrees = tuple(
        Fraction(rng.randint(1, 6), rng.choice((1, 2))) for _ in range(n_components)
    )
    matrix = [[0] * n_components for _ in range(n_components)]
    for i in range(n_components):
        matrix[i][i] = rng.randint(-2, 4)
        for j in range(i + 1, n_components):
            matrix[i][j] = matrix[j][i] = rng.randint(0, max_crossing)
    return DivisorConfiguration(names, degrees, tuple(tuple(r) for r in matrix))


def random_balanced_configuration(
    rng: random.Random,
    rank: int,
    n_components: int,
    height: int = 5,
    nontrivial: bool = False,
) -> FilteredConfiguration:
    if nontrivial and rank < 2:
        raise ValueError("balance forces rank-1 filtrations to be trivial")
    while True:
        flags = tuple(
            random_balanced_filtration(rng, rank, height) for _ in range(n_components)
        )
        fc = FilteredConfiguration(rank, flags)
        if not nontrivial or not fc.is_trivial:
            return fc


def random_arrangement(rng: random.Random) -> PlaneArrangement:
    """Random plane curves with transversally-compatible marked points."""
    n_curves = rng.randint(2, 4)
    curves = tuple((f"C{i}", rng.randint(1, 3)) for i in range(n_curves))
    degrees = dict(curves)
    points = []
    budget = {
        (a, b): degrees[f"C{a}"] * degrees[f"C{b}"]
        for a in range(n_curves)
        for b in range(a + 1, n_curves)
    }
    for p in range(rng.randint(0, 3)):
        members = sorted(rng.sample(range(n_curves), rng.randint(2, n_curves)))
        pairs = [(a, b) for k, a in enumerate(members) for b in members[k + 1:]]
        if all(budget[pair] > 0 for pair in pairs):
            for pair in pairs:
                budget[pair] -= 1
            points.append((f"p{p}", tuple(f"C{i}" for i in members)))
    return PlaneArrangement(curves, tuple(points))


def random_realizable_config(rng: random.Random) -> DivisorConfiguration:
    """A geometrically realizable configuration: a blown-up plane arrangement.

    Unlike :func:`random_divisor_config` (arbitrary abstract matrices, which
    can violate surface geometry such as the Hodge index theorem), these come
    from an actual surface, so inequality harnesses are meaningful on them.
    """
    return blow_up(random_arrangement(rng), Fraction(1, 100))


def all_lines(height: int) -> list[Subspace]:
    """Every line of Q^2 spanned by a primitive vector of coordinate height <= height."""
    lines = []
    seen = set()
    for a in range(-height, height + 1):
        for b in range(-height, height + 1):
            if (a, b) == (0, 0) or gcd(a, b) != 1:
                continue
            if a < 0 or (a == 0 and b < 0):
                continue
            line = span([[a, b]], 2)
            if line not in seen:
                seen.add(line)
                lines.append(line)
    return lines


def brute_force_rank2(
    fc: FilteredConfiguration, config: DivisorConfiguration, height: int = 5
) -> tuple[Status, Fraction]:
    """Exhaustive stability verdict over all lines of bounded height."""
    best = None
    for line in all_lines(height):
        degree = parabolic_degree(line, fc, config)
        if best is None or degree > best:
            best = degree
    if best > 0:
        return Status.UNSTABLE, best
    if best == 0:
        return Status.SEMISTABLE, best
    return Status.STABLE, best
