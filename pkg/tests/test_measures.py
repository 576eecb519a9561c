"""Tests for src.data.measures: construction, reflection, kernels and tail integrals."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.data.measures import (
    Atom,
    BeliefMeasure,
    Segment,
    _segment_integrals_by_expansion,
    _segment_integrals_by_tails,
    common_belief,
    kernel,
    penrose_banzhaf,
    point_mass,
    shapley_shubik,
    tail_integrals,
    unanimity,
    validate_reflection,
)
from src.errors import DomainError, ParseError, StructureError
from tests.conftest import CORPUS_MEASURES, mixture_measure

F = Fraction


class TestBeliefMeasure:
    def test_named_constructors(self):
        assert penrose_banzhaf().atoms == (Atom(F(1, 2), F(1)),)
        assert shapley_shubik().segments == (Segment(F(0), F(1), F(1)),)
        assert [a.location for a in unanimity().atoms] == [0, 1]

    def test_accepts_strings_and_dicts(self):
        mu = common_belief(atoms=[{"p": "3/10", "mass": "1/2"}, ("7/10", "1/2")])
        assert [a.location for a in mu.atoms] == [F(3, 10), F(7, 10)]

    def test_components_sorted(self):
        mu = common_belief(atoms=[("7/10", "1/2"), ("3/10", "1/2")])
        assert mu.atoms[0].location == F(3, 10)

    def test_zero_mass_dropped(self):
        mu = common_belief(atoms=[("1/2", 1), ("1/4", 0)])
        assert mu == penrose_banzhaf()

    def test_equality_ignores_name(self):
        assert common_belief(atoms=[("1/2", 1)], name="other") == penrose_banzhaf()

    def test_mass_must_sum_to_one(self):
        with pytest.raises(StructureError, match="exactly 1"):
            common_belief(atoms=[("1/2", "9/10")])

    def test_negative_mass(self):
        with pytest.raises(StructureError):
            common_belief(atoms=[("1/4", "3/2"), ("3/4", "-1/2")])

    def test_location_outside_unit_interval(self):
        with pytest.raises(StructureError):
            common_belief(atoms=[("3/2", 1)])

    def test_degenerate_segment(self):
        with pytest.raises(StructureError):
            common_belief(segments=[("1/2", "1/2", 1)])

    def test_overlapping_segments(self):
        with pytest.raises(StructureError, match="overlap"):
            common_belief(segments=[(0, "3/5", "1/2"), ("2/5", 1, "1/2")])

    def test_touching_segments_allowed(self):
        mu = common_belief(segments=[(0, "1/2", "1/2"), ("1/2", 1, "1/2")])
        assert len(mu.segments) == 2

    def test_duplicate_atoms(self):
        with pytest.raises(StructureError, match="distinct"):
            BeliefMeasure(atoms=(Atom(F(1, 2), F(1, 2)), Atom(F(1, 2), F(1, 2))))

    def test_float_rejected(self):
        with pytest.raises(ParseError):
            common_belief(atoms=[(0.5, 1)])

    def test_malformed_rational(self):
        with pytest.raises(ParseError):
            common_belief(atoms=[("1//2", 1)])


class TestValidateReflection:
    @pytest.mark.parametrize("name", sorted(CORPUS_MEASURES))
    def test_corpus_measures_symmetric(self, name):
        assert validate_reflection(CORPUS_MEASURES[name]())

    def test_reflected_atom_pair(self):
        assert validate_reflection(common_belief(atoms=[("3/10", "1/2"), ("7/10", "1/2")]))

    def test_single_off_centre_atom(self):
        assert not validate_reflection(point_mass("3/10"))

    def test_unequal_atom_masses(self):
        assert not validate_reflection(common_belief(atoms=[("3/10", "1/3"), ("7/10", "2/3")]))

    def test_split_uniform_is_symmetric(self):
        mu = common_belief(segments=[(0, "1/5", "1/5"), ("1/5", 1, "4/5")])
        assert validate_reflection(mu)

    def test_mirrored_segments(self):
        mu = common_belief(segments=[("1/10", "3/10", "1/2"), ("7/10", "9/10", "1/2")])
        assert validate_reflection(mu)

    def test_lopsided_segments(self):
        mu = common_belief(segments=[(0, "1/2", "1/3"), ("1/2", 1, "2/3")])
        assert not validate_reflection(mu)


class TestKernel:
    def test_penrose_banzhaf(self):
        assert kernel(penrose_banzhaf(), 3).values == (F(1, 8),) * 4

    def test_shapley_shubik(self):
        assert kernel(shapley_shubik(), 3)[2] == F(1, 12)

    def test_unanimity(self):
        assert kernel(unanimity(), 4).values == (F(1, 2), 0, 0, 0, F(1, 2))

    def test_shapley_size_classes_equally_likely(self):
        kern = kernel(shapley_shubik(), 9)
        assert all(kern.coalition_class_mass(k) == F(1, 10) for k in range(10))

    def test_non_positive_n(self):
        with pytest.raises(DomainError):
            kernel(penrose_banzhaf(), 0)

    @pytest.mark.parametrize("name", sorted(CORPUS_MEASURES))
    def test_normalised_and_symmetric(self, name):
        mu = CORPUS_MEASURES[name]()
        for n in range(1, 21):
            kern = kernel(mu, n)
            assert kern.total() == 1
            assert kern.is_symmetric()
            assert all(v >= 0 for v in kern.values)

    @pytest.mark.parametrize("name", sorted(CORPUS_MEASURES))
    def test_pascal_identity(self, name):
        mu = CORPUS_MEASURES[name]()
        for n in range(1, 20):
            small, big = kernel(mu, n), kernel(mu, n + 1)
            assert all(small[k] == big[k] + big[k + 1] for k in range(n + 1))

    def test_large_n_path_normalised(self):
        kern = kernel(mixture_measure(), 101)
        assert kern.total() == 1
        assert kern.is_symmetric()

    @pytest.mark.parametrize("bounds", [(0, 1), ("1/5", "3/5"), ("1/3", "1/2")])
    def test_tail_identity_matches_expansion(self, bounds):
        lower, upper = (F(b) for b in bounds)
        for n in (1, 5, 17, 40):
            assert _segment_integrals_by_tails(lower, upper, n) == _segment_integrals_by_expansion(
                lower, upper, n
            )

    def test_uniform_beta_integral(self):
        """integral_0^1 p^k (1-p)^(N-k) dp = k! (N-k)! / (N+1)!."""
        n = 80
        kern = kernel(shapley_shubik(), n)
        for k in (0, 13, 40):
            assert kern[k] == F(math.factorial(k) * math.factorial(n - k), math.factorial(n + 1))

    @settings(max_examples=30, deadline=None)
    @given(
        p=st.fractions(min_value=0, max_value=F(1, 2), max_denominator=20),
        mass=st.fractions(min_value=0, max_value=F(1, 2), max_denominator=20),
        n=st.integers(min_value=1, max_value=12),
    )
    def test_symmetric_mixtures_normalised(self, p, mass, n):
        atoms = [(p, mass / 2), (1 - p, mass / 2)] if p != F(1, 2) else [(p, mass)]
        mu = common_belief(atoms=atoms, segments=[(0, 1, 1 - mass)])
        kern = kernel(mu, n)
        assert kern.total() == 1
        assert kern.is_symmetric()


class TestTailIntegrals:
    def test_uniform(self):
        tails = tail_integrals(shapley_shubik(), "3/10")
        assert tails.mass_tail == F(7, 10)
        assert tails.first_moment_tail == F(91, 200)

    def test_atom_below_r(self):
        tails = tail_integrals(penrose_banzhaf(), "3/5")
        assert tails == (0, 0, F(1, 2), 0)

    def test_endpoint_atoms(self):
        tails = tail_integrals(unanimity(), "1/2")
        assert tails.mass_tail == F(1, 2)
        assert tails.first_moment_tail == F(1, 2)
        assert tails.complement_moment_tail == F(1, 2)

    def test_mixture_at_half(self):
        tails = tail_integrals(mixture_measure(), "1/2")
        assert tails.mass_tail == F(1, 2)
        assert tails.first_moment_tail == F(3, 16) + F(7, 40)
        assert tails.complement_moment_tail == tails.first_moment_tail

    def test_atom_at_r_included_and_warned(self, caplog):
        tails = tail_integrals(penrose_banzhaf(), "1/2")
        assert tails.mass_tail == 1
        assert tails.atom_at_r == 1
        assert "atom" in caplog.text

    @pytest.mark.parametrize("r", [0, 1, "3/2"])
    def test_r_outside_open_interval(self, r):
        with pytest.raises(DomainError):
            tail_integrals(shapley_shubik(), r)
