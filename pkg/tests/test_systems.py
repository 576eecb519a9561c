"""Tests for src.data.systems: quota rule, simple majority, LT index, invariance detection."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.data.systems import (
    ExplicitVotingSystem,
    WeightedVotingSystem,
    detect_invariant,
    is_winning,
    laakso_taagepera,
    simple_majority,
    unit_weight_system,
    weight_of,
)
from src.config import Settings
from src.errors import CapExceededError, DomainError, StructureError

F = Fraction
W321 = WeightedVotingSystem((3, 2, 1), 4)


class TestWeightedVotingSystem:
    def test_is_winning_ties_win(self):
        assert is_winning(WeightedVotingSystem((1, 1, 1), 2), {1, 2})

    def test_is_winning_examples(self):
        assert not is_winning(W321, {1, 2})
        assert is_winning(W321, {0, 2})

    def test_voter_out_of_range(self):
        with pytest.raises(DomainError):
            is_winning(W321, {3})

    def test_weight_of(self):
        assert weight_of(W321, [0, 1]) == 5

    def test_rational_weights(self):
        system = WeightedVotingSystem(("1/2", "1/3"), "1/2")
        assert system.integer_form() == ((3, 2), 3)

    def test_integer_form_includes_quota_denominator(self):
        system = WeightedVotingSystem((1, 1, 1, 1), F(5, 2))
        assert system.integer_form() == ((2, 2, 2, 2), 5)

    def test_relative_quota_exact(self):
        system = WeightedVotingSystem.from_relative_quota((1,) * 10, "3/5")
        assert system.quota == 6
        assert system.relative_quota == F(3, 5)

    @pytest.mark.parametrize("quota", [0, 7, -1])
    def test_quota_out_of_range(self, quota):
        with pytest.raises(StructureError):
            WeightedVotingSystem((3, 2, 1), quota)

    def test_negative_weight(self):
        with pytest.raises(StructureError):
            WeightedVotingSystem((3, -1), 1)

    def test_all_zero_weights(self):
        with pytest.raises(StructureError):
            WeightedVotingSystem((0, 0), 1)

    def test_relative_quota_domain(self):
        with pytest.raises(DomainError):
            WeightedVotingSystem.from_relative_quota((1, 1), "3/2")

    def test_zero_weight_voter_allowed(self):
        assert WeightedVotingSystem((1, 0), 1).n_voters == 2

    def test_unit_weights(self):
        assert unit_weight_system(5, "1/2").has_unit_weights()
        assert not W321.has_unit_weights()


class TestSimpleMajority:
    def test_odd(self):
        system = simple_majority(3)
        assert system.quota == 2
        assert is_winning(system, {0, 1})
        assert not is_winning(system, {2})

    def test_even_is_strict(self):
        system = simple_majority(4)
        assert system.quota == F(5, 2)
        assert not is_winning(system, {0, 1})
        assert is_winning(system, {0, 1, 2})

    def test_single_voter_dictator(self):
        system = simple_majority(1)
        assert is_winning(system, {0})
        assert not is_winning(system, set())

    def test_zero_voters(self):
        with pytest.raises(DomainError):
            simple_majority(0)


class TestLaaksoTaagepera:
    def test_equal_weights(self):
        assert laakso_taagepera([1, 1, 1, 1]) == F(1, 4)

    def test_unequal_weights(self):
        assert laakso_taagepera([3, 2, 1]) == F(7, 18)

    def test_dictator(self):
        assert laakso_taagepera([1, 0, 0]) == 1

    def test_all_zero(self):
        with pytest.raises(StructureError):
            laakso_taagepera([0, 0])

    @settings(max_examples=50, deadline=None)
    @given(
        weights=st.lists(st.integers(0, 50), min_size=1, max_size=10).filter(any),
        scale=st.fractions(min_value=F(1, 100), max_value=100),
    )
    def test_scale_invariant(self, weights, scale):
        assert laakso_taagepera([scale * w for w in weights]) == laakso_taagepera(weights)


class TestExplicitVotingSystem:
    def test_from_weighted(self):
        family = ExplicitVotingSystem.from_weighted(W321)
        assert frozenset({0, 2}) in family.winning
        assert frozenset({1, 2}) not in family.winning

    def test_upward_closure(self):
        family = ExplicitVotingSystem.upward_closure(3, [[0]])
        assert len(family.winning) == 4

    def test_grand_coalition_required(self):
        with pytest.raises(StructureError):
            ExplicitVotingSystem(2, frozenset({frozenset({0})}))

    def test_empty_coalition_losing(self):
        with pytest.raises(StructureError):
            ExplicitVotingSystem.upward_closure(2, [[]])

    def test_not_monotone(self):
        winning = frozenset({frozenset({0}), frozenset({0, 1, 2})})
        with pytest.raises(StructureError, match="monotone"):
            ExplicitVotingSystem(3, winning)

    def test_cap(self):
        with pytest.raises(CapExceededError):
            ExplicitVotingSystem.from_weighted(simple_majority(25))

    def test_upward_closure_cap_before_enumeration(self):
        with pytest.raises(CapExceededError):
            ExplicitVotingSystem.upward_closure(40, [[0]])

    def test_upward_closure_needs_voters(self):
        with pytest.raises(StructureError):
            ExplicitVotingSystem.upward_closure(0, [[0]])

    def test_caller_settings_cap(self):
        tight = Settings(explicit_max_voters=3)
        with pytest.raises(CapExceededError):
            ExplicitVotingSystem.from_weighted(simple_majority(5), tight)
        with pytest.raises(CapExceededError):
            ExplicitVotingSystem.upward_closure(4, [[0]], tight)

    def test_caller_settings_raise_cap(self):
        loose = Settings(explicit_max_voters=26)
        unanimity = frozenset({frozenset(range(25))})
        with pytest.raises(CapExceededError):
            ExplicitVotingSystem(25, unanimity)
        assert ExplicitVotingSystem(25, unanimity, loose).n_voters == 25

    def test_is_winning(self):
        family = ExplicitVotingSystem.from_weighted(simple_majority(3))
        assert is_winning(family, [0, 1])
        assert not is_winning(family, [2])

    def test_monotone_over_corpus(self, small_corpus):
        """Weighted systems are monotone with V winning and the empty set losing."""
        for system in [s for s in small_corpus if s.n_voters <= 8][:30]:
            n = system.n_voters
            assert is_winning(system, range(n))
            assert not is_winning(system, [])
            for size in range(n):
                for coalition in itertools.combinations(range(n), size):
                    if is_winning(system, coalition):
                        for v in set(range(n)) - set(coalition):
                            assert is_winning(system, (*coalition, v))


class TestDetectInvariant:
    def test_majority(self):
        equivalent = detect_invariant(ExplicitVotingSystem.from_weighted(simple_majority(3)))
        assert equivalent == WeightedVotingSystem((1, 1, 1), 2)

    def test_dictator(self):
        family = ExplicitVotingSystem.upward_closure(3, [[0]])
        assert detect_invariant(family) is None

    def test_unequal_weights(self):
        assert detect_invariant(ExplicitVotingSystem.from_weighted(W321)) is None

    @pytest.mark.parametrize("n", range(1, 13))
    def test_unit_weight_round_trip(self, n):
        for quota in range(1, n + 1):
            family = ExplicitVotingSystem.from_weighted(WeightedVotingSystem((1,) * n, quota))
            equivalent = detect_invariant(family)
            assert equivalent is not None
            assert ExplicitVotingSystem.from_weighted(equivalent).winning == family.winning
