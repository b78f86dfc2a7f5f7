"""Slope stability of flag configurations.

A configuration is destabilized by a proper subspace V whose parabolic
degree

    sum_i  deg(D_i) * sum_a a * dim(gr_a of the filtration F_i induced on V)

is non-negative; stability demands a strictly negative degree for every
proper V.  For rank 2 the degree of a line depends only on which flag lines
contain it, so the condition can be decided exactly by checking each distinct
flag line plus one generic line.  For higher rank the oracle is one-sided:
witnesses of non-stability are exact certificates, while a clean sweep over
the explored subspaces (flag-step closure plus seeded random samples) only
supports a heuristic verdict.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    DegenerateDegreeError,
    DimensionMismatchError,
    ImproperSubspaceError,
    ShapeMismatchError,
)
from .filtration import FilteredConfiguration
from .linalg import Subspace, span
from .surface import DivisorConfiguration


class Status(Enum):
    STABLE = "stable"
    SEMISTABLE = "semistable"
    UNSTABLE = "unstable"


class Certainty(Enum):
    EXACT = "exact"
    HEURISTIC = "heuristic"


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of a stability check.

    ``witness`` carries a destabilizing subspace: degree zero for a
    semistable verdict, positive degree for an unstable one.  A stable
    verdict has no witness and a strictly negative maximal observed degree.
    ``max_observed_degree`` is None only in the vacuous rank-1 case, where
    there are no proper subspaces at all.
    """

    status: Status
    certainty: Certainty
    witness: Optional[Subspace]
    witness_degree: Optional[Fraction]
    max_observed_degree: Optional[Fraction]
    observed_degrees: tuple[Fraction, ...] = ()
    metadata: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.status is Status.UNSTABLE:
            if self.witness is None or self.witness_degree is None or self.witness_degree <= 0:
                raise ShapeMismatchError(
                    "an unstable verdict needs a witness of positive degree"
                )
        if self.status is Status.SEMISTABLE:
            if self.witness is None or self.witness_degree != 0:
                raise ShapeMismatchError(
                    "a semistable verdict needs a witness of degree zero"
                )
        if self.status is Status.STABLE:
            if self.max_observed_degree is not None and self.max_observed_degree >= 0:
                raise ShapeMismatchError(
                    "a stable verdict requires a negative maximal degree"
                )


def parabolic_degree(
    subspace: Subspace,
    fc: FilteredConfiguration,
    config: DivisorConfiguration,
) -> Fraction:
    """Weighted degree of a proper subspace against the configuration."""
    if subspace.ambient_dim != fc.rank:
        raise DimensionMismatchError(
            f"subspace in Q^{subspace.ambient_dim}, configuration of rank {fc.rank}"
        )
    if subspace.is_zero() or subspace.is_full():
        raise ImproperSubspaceError(
            "parabolic degree is defined for proper nonzero subspaces only"
        )
    if len(fc.filtrations) != config.n_components:
        raise ShapeMismatchError(
            f"{len(fc.filtrations)} filtrations for {config.n_components} components"
        )
    total = Fraction(0)
    for filt, degree in zip(fc.filtrations, config.degrees):
        if degree == 0:
            continue
        for weight, mult in filt.induced_degree_vector(subspace):
            total += weight * mult * degree
    return total


def _proper_flag_steps(fc: FilteredConfiguration) -> list[Subspace]:
    steps = {
        space
        for filt in fc.filtrations
        for _, space in filt.steps
        if 0 < space.dim < fc.rank
    }
    return sorted(steps, key=Subspace.sort_key)


def _closure(
    fc: FilteredConfiguration, depth: int, cap: int
) -> tuple[list[Subspace], bool]:
    current = set(_proper_flag_steps(fc))
    capped = False
    for _ in range(depth):
        fresh: set[Subspace] = set()
        ordered = sorted(current, key=Subspace.sort_key)
        for a_index, a in enumerate(ordered):
            for b in ordered[a_index + 1:]:
                for candidate in (a.intersect(b), a + b):
                    if 0 < candidate.dim < fc.rank and candidate not in current:
                        fresh.add(candidate)
                if len(current) + len(fresh) >= cap:
                    capped = True
                    break
            if capped:
                break
        if capped or not fresh:
            current |= fresh
            break
        current |= fresh
    ordered = sorted(current, key=Subspace.sort_key)
    if len(ordered) > cap:
        ordered = ordered[:cap]
        capped = True
    return ordered, capped


def candidate_subspaces(
    fc: FilteredConfiguration, depth: int = 3, cap: int = 512
) -> tuple[Subspace, ...]:
    """Proper flag steps closed under pairwise intersection and sum.

    The closure is iterated at most ``depth`` times and silently truncated at
    ``cap`` elements (the truncation is reported in verdict metadata when
    used through :func:`check_stability`).  Every proper flag step is always
    included.
    """
    subspaces, _ = _closure(fc, depth, cap)
    return tuple(subspaces)


def _generic_line(avoid: Sequence[Subspace], rank: int) -> Subspace:
    """A line distinct from every line in ``avoid``."""
    taken = {s for s in avoid if s.dim == 1}
    for k in range(len(taken) + 1):
        candidate = span([[1] + [k**j for j in range(1, rank)]], rank)
        if candidate not in taken:
            return candidate
    raise AssertionError("unreachable: tried more lines than were avoided")


def _random_subspace(
    rng: random.Random, rank: int, dim: int, height: int
) -> Optional[Subspace]:
    for _ in range(20):
        rows = [
            [rng.randint(-height, height) for _ in range(rank)] for _ in range(dim)
        ]
        candidate = span(rows, rank)
        if candidate.dim == dim:
            return candidate
    return None


def _evaluate(
    candidates: Iterable[Subspace],
    fc: FilteredConfiguration,
    config: DivisorConfiguration,
) -> tuple[Optional[Subspace], Optional[Fraction], list[Fraction]]:
    best: Optional[Subspace] = None
    best_degree: Optional[Fraction] = None
    degrees: list[Fraction] = []
    for candidate in candidates:
        degree = parabolic_degree(candidate, fc, config)
        degrees.append(degree)
        if (
            best_degree is None
            or degree > best_degree
            or (degree == best_degree and candidate.sort_key() < best.sort_key())
        ):
            best, best_degree = candidate, degree
    return best, best_degree, degrees


def _verdict_from(
    best: Subspace,
    best_degree: Fraction,
    degrees: list[Fraction],
    certainty: Certainty,
    metadata: dict,
) -> StabilityVerdict:
    observed = tuple(sorted(set(degrees)))
    if best_degree > 0:
        return StabilityVerdict(
            Status.UNSTABLE, Certainty.EXACT, best, best_degree, best_degree,
            observed, metadata,
        )
    if best_degree == 0:
        # A degree-zero witness exactly certifies the failure of strict
        # stability, so the verdict is exact even when found by sampling.
        return StabilityVerdict(
            Status.SEMISTABLE, Certainty.EXACT,
            best, best_degree, best_degree, observed, metadata,
        )
    return StabilityVerdict(
        Status.STABLE, certainty, None, None, best_degree, observed, metadata
    )


def _check_degrees_positive(
    fc: FilteredConfiguration, config: DivisorConfiguration
) -> None:
    for index, filt in enumerate(fc.filtrations):
        if not filt.is_trivial and config.degrees[index] <= 0:
            raise DegenerateDegreeError(
                f"component {config.names[index]!r} carries a nontrivial "
                "filtration but has non-positive degree"
            )


def check_stability(
    fc: FilteredConfiguration,
    config: DivisorConfiguration,
    mode: str = "auto",
    samples: int = 2000,
    seed: int = 0,
    depth: int = 3,
    cap: int = 512,
    sample_height: int = 5,
) -> StabilityVerdict:
    """Decide stability of a flag configuration.

    ``mode`` is one of ``"auto"``, ``"exact2"`` or ``"heuristic"``.  The
    rank-2 decision is exact: the degree of a line depends only on which
    flag lines contain it, so every distinct flag line plus one generic line
    exhausts the possible values.  The heuristic mode explores the flag-step
    closure plus ``samples`` seeded random subspaces of every intermediate
    dimension; destabilizing witnesses it finds are exact, a stable verdict
    is not.
    """
    if len(fc.filtrations) != config.n_components:
        raise ShapeMismatchError(
            f"{len(fc.filtrations)} filtrations for {config.n_components} components"
        )
    _check_degrees_positive(fc, config)
    if mode not in ("auto", "exact2", "heuristic"):
        raise ValueError(f"unknown stability mode {mode!r}")
    if mode == "exact2" and fc.rank != 2:
        raise ShapeMismatchError("exact2 mode requires rank 2")

    if fc.rank == 1:
        # No proper nonzero subspaces exist; the condition holds vacuously.
        return StabilityVerdict(
            Status.STABLE, Certainty.EXACT, None, None, None, (),
            {"mode": "vacuous"},
        )

    if mode == "exact2" or (mode == "auto" and fc.rank == 2):
        flag_lines = _proper_flag_steps(fc)
        candidates = list(flag_lines) + [_generic_line(flag_lines, fc.rank)]
        best, best_degree, degrees = _evaluate(candidates, fc, config)
        metadata = {"mode": "exact2", "explored": len(candidates)}
        return _verdict_from(best, best_degree, degrees, Certainty.EXACT, metadata)

    closure, capped = _closure(fc, depth, cap)
    rng = random.Random(seed)
    sampled: list[Subspace] = []
    seen = set(closure)
    for dim in range(1, fc.rank):
        for _ in range(samples):
            candidate = _random_subspace(rng, fc.rank, dim, sample_height)
            if candidate is not None and candidate not in seen:
                seen.add(candidate)
                sampled.append(candidate)
    candidates = list(closure) + sampled
    if not candidates:
        candidates = [_generic_line([], fc.rank)]
    best, best_degree, degrees = _evaluate(candidates, fc, config)
    metadata = {
        "mode": "heuristic",
        "explored": len(candidates),
        "closure_size": len(closure),
        "closure_capped": capped,
        "samples": samples,
        "seed": seed,
        "sample_height": sample_height,
    }
    return _verdict_from(best, best_degree, degrees, Certainty.HEURISTIC, metadata)
