"""Weighted flags of rational subspaces and their graded calculus.

A filtration is a decreasing family F_a of subspaces of Q^r indexed by
rational weights, with finitely many jumps.  It is stored as its jump data:
a list of (weight, space) steps with strictly decreasing weights and strictly
increasing spaces, the last space being all of Q^r.  The associated graded
piece gr_a = F_a / F_{>a} is nonzero exactly at the step weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DimensionMismatchError, InvariantError
from .linalg import Subspace, rational_to_string


@dataclass(frozen=True)
class GrSpectrum:
    """Weights and multiplicities of the graded pieces of a filtration."""

    entries: tuple[tuple[Fraction, int], ...]

    def __post_init__(self):
        entries = tuple((Fraction(w), int(m)) for w, m in self.entries)
        object.__setattr__(self, "entries", entries)
        for (w, m), (w_next, _) in zip(entries, entries[1:]):
            if w <= w_next:
                raise InvariantError("spectrum weights must strictly decrease")
        if any(m < 1 for _, m in entries):
            raise InvariantError("multiplicities must be positive")

    def rank(self) -> int:
        return sum(m for _, m in self.entries)

    def moment(self) -> Fraction:
        """Sum of weight * multiplicity; zero exactly when balanced."""
        return sum((w * m for w, m in self.entries), Fraction(0))

    def second_moment(self) -> Fraction:
        return sum((w * w * m for w, m in self.entries), Fraction(0))

    def weights(self) -> tuple[Fraction, ...]:
        return tuple(w for w, _ in self.entries)


@dataclass(frozen=True)
class Filtration:
    """A weighted flag in Q^r: strictly decreasing weights on a strictly
    increasing chain of subspaces ending at the full space."""

    ambient_dim: int
    steps: tuple[tuple[Fraction, Subspace], ...]

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise InvariantError("rank must be positive")
        steps = tuple((Fraction(w), space) for w, space in self.steps)
        object.__setattr__(self, "steps", steps)
        if not steps:
            raise InvariantError("a filtration needs at least one step")
        if len(steps) > self.ambient_dim:
            raise InvariantError("more steps than the rank allows")
        previous: Subspace | None = None
        for weight, space in steps:
            if space.ambient_dim != self.ambient_dim:
                raise DimensionMismatchError(
                    f"step space lives in Q^{space.ambient_dim}, "
                    f"filtration in Q^{self.ambient_dim}"
                )
            if previous is not None:
                if not (space.dim > previous.dim and space.contains(previous)):
                    raise InvariantError("step spaces must strictly increase")
            previous = space
        for (w, _), (w_next, _) in zip(steps, steps[1:]):
            if w <= w_next:
                raise InvariantError("step weights must strictly decrease")
        if steps[0][1].is_zero():
            raise InvariantError("first step space must be nonzero")
        if not steps[-1][1].is_full():
            raise InvariantError("last step space must be the full space")

    @classmethod
    def trivial(cls, ambient_dim: int, weight: Fraction | int = 0) -> "Filtration":
        """Single-step filtration putting the whole space at one weight."""
        return cls(ambient_dim, ((Fraction(weight), Subspace.full(ambient_dim)),))

    def weights(self) -> tuple[Fraction, ...]:
        return tuple(w for w, _ in self.steps)

    def spaces(self) -> tuple[Subspace, ...]:
        return tuple(s for _, s in self.steps)

    def space_at(self, alpha: Fraction) -> Subspace:
        """F_alpha: the largest step space whose weight is >= alpha."""
        alpha = Fraction(alpha)
        result = Subspace.zero(self.ambient_dim)
        for weight, space in self.steps:
            if weight >= alpha:
                result = space
            else:
                break
        return result

    def space_above(self, alpha: Fraction) -> Subspace:
        """F_{>alpha}: the largest step space whose weight is > alpha."""
        alpha = Fraction(alpha)
        result = Subspace.zero(self.ambient_dim)
        for weight, space in self.steps:
            if weight > alpha:
                result = space
            else:
                break
        return result

    def gr_spectrum(self) -> GrSpectrum:
        entries = []
        prev_dim = 0
        for weight, space in self.steps:
            entries.append((weight, space.dim - prev_dim))
            prev_dim = space.dim
        return GrSpectrum(tuple(entries))

    def scale(self, factor: Fraction | int) -> "Filtration":
        """Multiply every weight by a positive factor; spaces unchanged."""
        factor = Fraction(factor)
        if factor <= 0:
            raise InvariantError("scaling factor must be positive")
        return Filtration(
            self.ambient_dim, tuple((factor * w, s) for w, s in self.steps)
        )

    def is_balanced(self) -> bool:
        return self.gr_spectrum().moment() == 0

    def balance_shift(self) -> "Filtration":
        """Shift all weights by a constant so the weight moment vanishes.

        This is the effect of twisting by a rank-one filtered system; the
        flag itself is untouched.
        """
        shift = -self.gr_spectrum().moment() / self.ambient_dim
        if shift == 0:
            return self
        return Filtration(
            self.ambient_dim, tuple((w + shift, s) for w, s in self.steps)
        )

    def with_weights(self, weights: Sequence[Fraction]) -> "Filtration":
        """Same flag, new weights (must still strictly decrease)."""
        if len(weights) != len(self.steps):
            raise DimensionMismatchError(
                f"{len(weights)} weights for {len(self.steps)} steps"
            )
        return Filtration(
            self.ambient_dim,
            tuple((Fraction(w), s) for w, (_, s) in zip(weights, self.steps)),
        )

    def induced_degree_vector(self, subspace: Subspace) -> tuple[tuple[Fraction, int], ...]:
        """Graded dimensions of the filtration induced on a subspace V.

        The multiplicity at a step weight a is
        dim(V ∩ F_a) - dim(V ∩ F_{>a}); zero entries are dropped, and the
        remaining multiplicities sum to dim V.
        """
        if subspace.ambient_dim != self.ambient_dim:
            raise DimensionMismatchError(
                f"subspace in Q^{subspace.ambient_dim}, filtration in Q^{self.ambient_dim}"
            )
        entries = []
        prev_dim = 0
        for weight, space in self.steps:
            here = subspace.intersection_dim(space)
            if here > prev_dim:
                entries.append((weight, here - prev_dim))
            prev_dim = here
        return tuple(entries)

    @property
    def is_trivial(self) -> bool:
        """True for the single-step filtration at weight zero."""
        return len(self.steps) == 1 and self.steps[0][0] == 0

    def sort_key(self) -> tuple:
        return tuple((w, s.rows) for w, s in self.steps)

    def __repr__(self) -> str:
        body = ", ".join(
            f"{rational_to_string(w)}: {s.dim}d" for w, s in self.steps
        )
        return f"Filtration(Q^{self.ambient_dim}; {body})"


def _check_common_ambient(f: Filtration, g: Filtration) -> None:
    if f.ambient_dim != g.ambient_dim:
        raise DimensionMismatchError(
            f"filtrations in Q^{f.ambient_dim} and Q^{g.ambient_dim}"
        )


def joint_gr_dim(f: Filtration, g: Filtration, a: Fraction, b: Fraction) -> int:
    """dim gr_a^F gr_b^G of the full space, by bigraded inclusion-exclusion:

        dim(F_a ∩ G_b) - dim(F_{>a} ∩ G_b) - dim(F_a ∩ G_{>b})
            + dim(F_{>a} ∩ G_{>b}).

    Summing over all weight pairs gives the rank.
    """
    _check_common_ambient(f, g)
    fa, fa_up = f.space_at(a), f.space_above(a)
    gb, gb_up = g.space_at(b), g.space_above(b)
    return (
        fa.intersection_dim(gb)
        - fa_up.intersection_dim(gb)
        - fa.intersection_dim(gb_up)
        + fa_up.intersection_dim(gb_up)
    )


def joint_step_multiplicities(f: Filtration, g: Filtration) -> tuple[tuple[int, ...], ...]:
    """Matrix of joint graded dimensions indexed by (step of f, step of g).

    Entry (s, t) is dim gr^F gr^G at the weight pair of those steps.  It
    depends only on the two flags, not on the weights, and the entries of
    the matrix sum to the rank.
    """
    _check_common_ambient(f, g)
    f_spaces = [Subspace.zero(f.ambient_dim)] + list(f.spaces())
    g_spaces = [Subspace.zero(g.ambient_dim)] + list(g.spaces())
    dims = [
        [fs.intersection_dim(gs) for gs in g_spaces] for fs in f_spaces
    ]
    return tuple(
        tuple(
            dims[s + 1][t + 1] - dims[s][t + 1] - dims[s + 1][t] + dims[s][t]
            for t in range(len(g.steps))
        )
        for s in range(len(f.steps))
    )


def joint_multiplicity_table(
    f: Filtration, g: Filtration
) -> tuple[tuple[Fraction, Fraction, int], ...]:
    """Nonzero (weight of f, weight of g, multiplicity) triples, in step order."""
    matrix = joint_step_multiplicities(f, g)
    fw, gw = f.weights(), g.weights()
    return tuple(
        (fw[s], gw[t], matrix[s][t])
        for s in range(len(fw))
        for t in range(len(gw))
        if matrix[s][t] != 0
    )


def product(f: Filtration, g: Filtration) -> Fraction:
    """The bilinear pairing sum_{a,b} a*b*dim(gr_a^F gr_b^G) of two flags."""
    return sum(
        (a * b * m for a, b, m in joint_multiplicity_table(f, g)), Fraction(0)
    )


@dataclass(frozen=True)
class FilteredConfiguration:
    """One filtration per divisor component, all of a common rank."""

    rank: int
    filtrations: tuple[Filtration, ...]

    def __post_init__(self):
        object.__setattr__(self, "filtrations", tuple(self.filtrations))
        if self.rank < 1:
            raise InvariantError("rank must be positive")
        if not self.filtrations:
            raise InvariantError("a configuration needs at least one component")
        for filt in self.filtrations:
            if filt.ambient_dim != self.rank:
                raise DimensionMismatchError(
                    f"component filtration has rank {filt.ambient_dim}, expected {self.rank}"
                )

    def __len__(self) -> int:
        return len(self.filtrations)

    def is_balanced(self) -> bool:
        return all(f.is_balanced() for f in self.filtrations)

    def balance_shift(self) -> "FilteredConfiguration":
        return FilteredConfiguration(
            self.rank, tuple(f.balance_shift() for f in self.filtrations)
        )

    def scale(self, factor: Fraction | int) -> "FilteredConfiguration":
        return FilteredConfiguration(
            self.rank, tuple(f.scale(factor) for f in self.filtrations)
        )

    @property
    def is_trivial(self) -> bool:
        return all(f.is_trivial for f in self.filtrations)

    def sort_key(self) -> tuple:
        return tuple(f.sort_key() for f in self.filtrations)
