import random
from fractions import Fraction

import pytest

from filtstab import (
    DegenerateDegreeError,
    DivisorConfiguration,
    FilteredConfiguration,
    Filtration,
    NoStableConfigurationError,
    OrderingCollapseError,
    SingularFormError,
    Status,
    Subspace,
    assemble_quadratics,
    c2_trivial,
    canonical_weights,
    check_stability,
    inner_minimize,
    norm_sq,
    outer_search,
    rationalize,
    shape_of,
    span,
)
from filtstab.fixtures import three_generic_lines, two_lines
from helpers import (
    random_balanced_configuration,
    random_balanced_weights_for,
    random_divisor_config,
)

F = Fraction


def two_step(line, top=F(1, 2)):
    return Filtration(2, ((top, line), (-top, Subspace.full(2))))


class TestAssembleQuadratics:
    def test_single_trivial_filtration(self):
        config = DivisorConfiguration(("C",), (F(3),), ((0,),))
        fc = FilteredConfiguration(2, (Filtration.trivial(2),))
        qp = assemble_quadratics(fc, config)
        assert qp.a == ((F(0),),)
        assert qp.b_diag == (F(6),)  # rank * degree

    def test_two_lines_reproduces_zero(self):
        config, fc = two_lines()
        qp = assemble_quadratics(fc, config)
        w = (F(1, 2), F(-1, 2), F(1, 2), F(-1, 2))
        assert qp.c2_value(w) == 0
        assert qp.norm_value(w) == norm_sq(fc, config)

    def test_three_lines_value(self):
        config, fc = three_generic_lines()
        qp = assemble_quadratics(fc, config)
        w = (F(1, 2), F(-1, 2)) * 3
        assert qp.c2_value(w) == F(3, 4)
        assert qp.norm_value(w) == F(3, 2)

    def test_quadratics_agree_with_exact_routes(self):
        rng = random.Random(211)
        for _ in range(25):
            rank = rng.randint(1, 3)
            n = rng.randint(1, 4)
            config = random_divisor_config(rng, n)
            fc = random_balanced_configuration(rng, rank, n)
            qp = assemble_quadratics(fc, config)
            # a second, independent weight assignment on the same flags
            reweighted = []
            for filt in fc.filtrations:
                weights = random_balanced_weights_for(rng, filt)
                reweighted.append(filt.with_weights(weights))
            other = FilteredConfiguration(rank, tuple(reweighted))
            flat = tuple(w for f in other.filtrations for w in f.weights())
            assert qp.c2_value(flat) == c2_trivial(other, config)
            degenerate = any(
                d == 0 and not f.is_trivial
                for d, f in zip(config.degrees, other.filtrations)
            )
            if not degenerate:
                assert qp.norm_value(flat) == norm_sq(other, config)

    def test_balance_rows_encode_multiplicities(self):
        config, fc = three_generic_lines()
        qp = assemble_quadratics(fc, config)
        assert len(qp.balance) == 3
        for i, row in enumerate(qp.balance):
            base = qp.shape.offsets[i]
            assert row[base] == 1 and row[base + 1] == 1


class TestInnerMinimize:
    def test_identical_forms_give_ratio_one(self):
        # self-intersection -2 with degree 1 makes A equal to B exactly
        config = DivisorConfiguration(("C",), (F(1),), ((-2,),))
        fc = FilteredConfiguration(2, (two_step(span([(1, 0)], 2)),))
        qp = assemble_quadratics(fc, config)
        assert qp.a == ((F(1), F(0)), (F(0), F(1)))
        assert qp.b_diag == (F(1), F(1))
        result = inner_minimize(qp)
        assert result.ratio == pytest.approx(1.0, abs=1e-9)
        assert not result.boundary

    def test_negative_definite_defers_to_stability(self):
        # a single conic: the quotient is constantly -1, no weights are
        # stable, so a stability screen forces the boundary path and the
        # reported feasible value cannot beat the eigenvalue
        config = DivisorConfiguration(("Q",), (F(2),), ((4,),))
        fc = FilteredConfiguration(2, (two_step(span([(1, 0)], 2)),))
        qp = assemble_quadratics(fc, config)
        shape = qp.shape

        def screen(weights):
            rationalized = rationalize(weights, shape, 64)
            candidate = FilteredConfiguration(
                2, (fc.filtrations[0].with_weights(rationalized),)
            )
            verdict = check_stability(candidate, config)
            return verdict.status is Status.STABLE

        result = inner_minimize(qp, stability_check=screen)
        assert result.boundary
        assert result.eigen_ratio == pytest.approx(-1.0, abs=1e-9)
        assert result.ratio >= result.eigen_ratio - 1e-9
        # cross-check: the returned weights are indeed not stable
        rationalized = rationalize(result.weights, shape, 64)
        candidate = FilteredConfiguration(
            2, (fc.filtrations[0].with_weights(rationalized),)
        )
        assert check_stability(candidate, config).status is Status.UNSTABLE

    def test_three_lines_feasible_value(self):
        config, fc = three_generic_lines()
        qp = assemble_quadratics(fc, config)
        result = inner_minimize(qp)
        assert result.ratio <= 0.5 + 1e-9

    def test_all_trivial_shape_is_singular(self):
        config = DivisorConfiguration(("C",), (F(1),), ((1,),))
        fc = FilteredConfiguration(2, (Filtration.trivial(2),))
        qp = assemble_quadratics(fc, config)
        with pytest.raises(SingularFormError):
            inner_minimize(qp)

    def test_degree_zero_component_makes_norm_singular(self):
        config = DivisorConfiguration(("A", "B"), (F(1), F(0)), ((1, 1), (1, 1)))
        fc = FilteredConfiguration(
            2, (two_step(span([(1, 0)], 2)), two_step(span([(0, 1)], 2)))
        )
        qp = assemble_quadratics(fc, config)
        with pytest.raises(SingularFormError):
            inner_minimize(qp)

    def test_canonical_weights_are_feasible(self):
        config, fc = three_generic_lines()
        qp = assemble_quadratics(fc, config)
        weights = canonical_weights(qp.shape)
        assert qp.shape.ordering_ok([float(w) for w in weights])
        assert all(
            sum(w * m for w, m in zip(weights[qp.shape.offsets[i]:], mults)) == 0
            for i, mults in enumerate(qp.shape.mults)
        )


class TestRationalize:
    def test_small_rationals_unchanged(self):
        config, fc = three_generic_lines()
        shape = shape_of(fc, config)
        w = (F(1, 2), F(-1, 2)) * 3
        assert rationalize(w, shape, 64) == w

    def test_nearest_rational(self):
        config, fc = two_lines()
        shape = shape_of(fc, config)
        out = rationalize((0.4999999, -0.4999999, 0.5, -0.5), shape, 10)
        assert out == (F(1, 2), F(-1, 2), F(1, 2), F(-1, 2))

    def test_balance_reprojection_is_exact(self):
        config, fc = two_lines()
        shape = shape_of(fc, config)
        out = rationalize((0.52, -0.48, 0.26, -0.27), shape, 50)
        for i, mults in enumerate(shape.mults):
            base = shape.offsets[i]
            chunk = out[base : base + len(mults)]
            assert sum(w * m for w, m in zip(chunk, mults)) == 0

    def test_ordering_collapse(self):
        config, fc = two_lines()
        shape = shape_of(fc, config)
        with pytest.raises(OrderingCollapseError):
            rationalize((0.26, 0.24, 0.5, -0.5), shape, 4)


class TestOuterSearch:
    def test_rank_one_finds_nothing(self):
        config = DivisorConfiguration(("C",), (F(1),), ((1,),))
        with pytest.raises(NoStableConfigurationError) as info:
            outer_search(config, rank=1, budget=5, seed=3)
        assert info.value.search_log["budget"] == 5

    def test_three_lines_beats_one_half(self):
        config, _ = three_generic_lines()
        estimate = outer_search(config, rank=2, budget=40, seed=11)
        assert estimate.ratio <= F(1, 2)
        assert estimate.verdict.status is Status.STABLE
        assert estimate.c2 >= 0
        assert estimate.norm_sq > 0
        assert estimate.ratio == estimate.c2 / estimate.norm_sq

    def test_two_lines_has_no_stable_configuration(self):
        config, _ = two_lines()
        with pytest.raises(NoStableConfigurationError):
            outer_search(config, rank=2, budget=25, seed=5)

    def test_coincident_only_is_never_stable_here(self):
        config, _ = three_generic_lines()
        with pytest.raises(NoStableConfigurationError):
            outer_search(
                config, rank=2, budget=1, seed=1, strategies=("coincident",)
            )

    def test_user_supplied_shape(self):
        config, fc = three_generic_lines()
        estimate = outer_search(
            config, rank=2, budget=3, seed=0, strategies=("user",), supplied=(fc,)
        )
        assert estimate.ratio <= F(1, 2)
        spaces = {f.steps[0][1] for f in estimate.configuration.filtrations}
        assert spaces == {f.steps[0][1] for f in fc.filtrations}

    def test_deterministic_for_fixed_seed(self):
        config, _ = three_generic_lines()
        first = outer_search(config, rank=2, budget=15, seed=23)
        second = outer_search(config, rank=2, budget=15, seed=23)
        assert first.configuration == second.configuration
        assert first.ratio == second.ratio
        assert first.search_log == second.search_log

    def test_budget_monotonicity(self):
        config, _ = three_generic_lines()
        ratios = []
        for budget in (10, 25, 40):
            try:
                ratios.append(outer_search(config, rank=2, budget=budget, seed=29).ratio)
            except NoStableConfigurationError:
                ratios.append(None)
        known = [r for r in ratios if r is not None]
        assert known == sorted(known, reverse=True) or all(
            a >= b for a, b in zip(known, known[1:])
        )

    def test_ratio_scale_invariance(self):
        config, _ = three_generic_lines()
        estimate = outer_search(config, rank=2, budget=20, seed=31)
        for lam in (F(2), F(1, 3)):
            scaled = estimate.configuration.scale(lam)
            assert c2_trivial(scaled, config) / norm_sq(scaled, config) == estimate.ratio

    def test_exactness_bridge(self):
        config, _ = three_generic_lines()
        estimate = outer_search(config, rank=2, budget=20, seed=37)
        qp = assemble_quadratics(estimate.configuration, config)
        flat = tuple(
            w for f in estimate.configuration.filtrations for w in f.weights()
        )
        float_ratio = qp.ratio_float([float(x) for x in flat])
        exact = float(estimate.ratio)
        assert abs(float_ratio - exact) <= 1e-6 * max(1.0, abs(exact))

    def test_positive_degrees_required(self):
        config = DivisorConfiguration(("A", "B"), (F(1), F(0)), ((1, 1), (1, 1)))
        with pytest.raises(DegenerateDegreeError):
            outer_search(config, rank=2, budget=2, seed=0)

    def test_user_strategy_needs_supplied(self):
        config, _ = three_generic_lines()
        with pytest.raises(ValueError):
            outer_search(config, rank=2, budget=2, seed=0, strategies=("user",))
