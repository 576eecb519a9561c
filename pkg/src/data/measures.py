"""Common-belief voting measures and their size kernels.

An exchangeable voting measure on the coalitions of N voters is a mixture of
independent Bernoulli(p) votes, with p drawn from a mixing measure mu on [0, 1]:

    P_mu(A) = integral of p^|A| (1 - p)^(N - |A|) dmu(p)

mu is represented as a finite mixture of point atoms and uniform segments with
rational data, so every coalition probability is an exact rational. Since
P_mu(A) depends on A only through |A|, the vector

    w_N(k) = integral of p^k (1 - p)^(N - k) dmu(p),   k = 0..N

(the kernel) carries everything the engine needs.

Special cases:
    - Penrose-Banzhaf: mu = point mass at 1/2
    - Shapley-Shubik:  mu = uniform on [0, 1]
    - unanimity:       mu = 1/2 point mass at 0 + 1/2 point mass at 1
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from src.data.rationals import as_rational
from src.errors import DomainError, StructureError

logger = logging.getLogger(__name__)

# Segment integrals use the term-wise binomial expansion up to this N and the
# binomial-tail form of the incomplete Beta integral above it. Both are exact.
EXPANSION_MAX_N = 64

ONE = Fraction(1)
HALF = Fraction(1, 2)


@dataclass(frozen=True, order=True)
class Atom:
    """Point mass ``mass`` at ``location``."""

    location: Fraction
    mass: Fraction


@dataclass(frozen=True, order=True)
class Segment:
    """Uniform mass ``mass`` spread over ``[lower, upper]``."""

    lower: Fraction
    upper: Fraction
    mass: Fraction

    @property
    def density(self) -> Fraction:
        return self.mass / (self.upper - self.lower)


def _coerce_atom(atom) -> Atom:
    if isinstance(atom, Atom):
        location, mass = atom.location, atom.mass
    elif isinstance(atom, dict):
        location, mass = atom.get("p"), atom.get("mass")
    else:
        location, mass = atom
    return Atom(as_rational(location, "atom location"), as_rational(mass, "atom mass"))


def _coerce_segment(segment) -> Segment:
    if isinstance(segment, Segment):
        lower, upper, mass = segment.lower, segment.upper, segment.mass
    elif isinstance(segment, dict):
        lower, upper, mass = segment.get("a"), segment.get("b"), segment.get("mass")
    else:
        lower, upper, mass = segment
    return Segment(
        as_rational(lower, "segment lower end"),
        as_rational(upper, "segment upper end"),
        as_rational(mass, "segment mass"),
    )


@dataclass(frozen=True)
class BeliefMeasure:
    """Mixing measure mu: rational point atoms plus uniform segments on [0, 1].

    Components are stored sorted; zero-mass components are dropped. Construction
    checks the structural invariants (non-negative masses summing to exactly 1,
    locations inside [0, 1], distinct atoms, segments with disjoint interiors).
    Reflection symmetry is checked separately by ``validate_reflection``.
    """

    atoms: tuple[Atom, ...] = ()
    segments: tuple[Segment, ...] = ()
    name: str = field(default="common-belief", compare=False)

    def __post_init__(self):
        atoms = tuple(sorted(_coerce_atom(a) for a in self.atoms))
        segments = tuple(sorted(_coerce_segment(s) for s in self.segments))

        for atom in atoms:
            if atom.mass < 0:
                raise StructureError(f"Negative atom mass {atom.mass} at {atom.location}")
            if not 0 <= atom.location <= 1:
                raise StructureError(f"Atom location {atom.location} outside [0, 1]")
        for seg in segments:
            if seg.mass < 0:
                raise StructureError(
                    f"Negative segment mass {seg.mass} on [{seg.lower}, {seg.upper}]"
                )
            if not 0 <= seg.lower < seg.upper <= 1:
                raise StructureError(
                    f"Segment [{seg.lower}, {seg.upper}] must satisfy 0 <= a < b <= 1"
                )

        atoms = tuple(a for a in atoms if a.mass > 0)
        segments = tuple(s for s in segments if s.mass > 0)

        locations = [a.location for a in atoms]
        if len(set(locations)) != len(locations):
            raise StructureError(f"Atom locations must be distinct: {locations}")
        for left, right in zip(segments, segments[1:]):
            if right.lower < left.upper:
                raise StructureError(
                    f"Segments [{left.lower}, {left.upper}] and "
                    f"[{right.lower}, {right.upper}] overlap"
                )

        total = sum((a.mass for a in atoms), Fraction(0)) + sum(
            (s.mass for s in segments), Fraction(0)
        )
        if total != 1:
            raise StructureError(f"Total mass must be exactly 1, got {total}")

        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "segments", segments)

    def components(self) -> list[Atom | Segment]:
        """Atoms then segments, in storage order."""
        return [*self.atoms, *self.segments]

    def atom_mass_at(self, location: Fraction) -> Fraction:
        for atom in self.atoms:
            if atom.location == location:
                return atom.mass
        return Fraction(0)


def penrose_banzhaf() -> BeliefMeasure:
    """mu = point mass at 1/2: every coalition equally likely."""
    return BeliefMeasure(atoms=(Atom(HALF, ONE),), name="penrose-banzhaf")


def shapley_shubik() -> BeliefMeasure:
    """mu = uniform on [0, 1]: every coalition size equally likely."""
    return BeliefMeasure(segments=(Segment(Fraction(0), ONE, ONE),), name="shapley-shubik")


def unanimity() -> BeliefMeasure:
    """mu = 1/2 at 0 + 1/2 at 1: only the empty and grand coalitions occur."""
    return BeliefMeasure(atoms=(Atom(Fraction(0), HALF), Atom(ONE, HALF)), name="unanimity")


def point_mass(p) -> BeliefMeasure:
    """mu = point mass at p (not a voting measure unless p = 1/2)."""
    p = as_rational(p, "p")
    return BeliefMeasure(atoms=(Atom(p, ONE),), name=f"point-mass-{p}")


def common_belief(atoms=(), segments=(), name: str = "common-belief") -> BeliefMeasure:
    """Mixture from ``(p, mass)`` atoms and ``(a, b, mass)`` segments."""
    return BeliefMeasure(atoms=tuple(atoms), segments=tuple(segments), name=name)


MEASURE_FACTORIES = {
    "penrose-banzhaf": penrose_banzhaf,
    "shapley-shubik": shapley_shubik,
    "unanimity": unanimity,
    # short forms
    "banzhaf": penrose_banzhaf,
    "shapley": shapley_shubik,
}


def validate_reflection(mu: BeliefMeasure) -> bool:
    """True iff mu([1/2 + a, 1/2 + b]) = mu([1/2 - b, 1/2 - a]) for all a < b.

    Atoms must pair up under p -> 1 - p with equal masses. For the segment
    part, all breakpoints and their reflections are merged into one symmetric
    grid; on that grid the density of every cell must equal the density of
    its mirror cell. This makes the check independent of how the uniform
    pieces were split up.
    """
    reflected_atoms = tuple(sorted(Atom(1 - a.location, a.mass) for a in mu.atoms))
    if reflected_atoms != mu.atoms:
        return False

    breakpoints = {Fraction(0), ONE}
    for seg in mu.segments:
        breakpoints.update((seg.lower, seg.upper, 1 - seg.lower, 1 - seg.upper))
    grid = sorted(breakpoints)

    def density_on(lower: Fraction, upper: Fraction) -> Fraction:
        for seg in mu.segments:
            if seg.lower <= lower and upper <= seg.upper:
                return seg.density
        return Fraction(0)

    for lower, upper in zip(grid, grid[1:]):
        if density_on(lower, upper) != density_on(1 - upper, 1 - lower):
            return False
    return True


@dataclass(frozen=True)
class Kernel:
    """Per-size coalition probabilities w_N(k), k = 0..N."""

    n_voters: int
    values: tuple[Fraction, ...]

    def __getitem__(self, k: int) -> Fraction:
        return self.values[k]

    def __len__(self) -> int:
        return len(self.values)

    def coalition_class_mass(self, k: int) -> Fraction:
        """Probability that the coalition has exactly k members: C(N, k) w_N(k)."""
        return math.comb(self.n_voters, k) * self.values[k]

    def total(self) -> Fraction:
        return sum(
            (self.coalition_class_mass(k) for k in range(self.n_voters + 1)), Fraction(0)
        )

    def is_symmetric(self) -> bool:
        return all(self.values[k] == self.values[-1 - k] for k in range(len(self.values)))


def _atom_kernel(atom: Atom, n: int) -> list[Fraction]:
    p = atom.location
    num, den = p.numerator, p.denominator
    comp = den - num
    num_pows = [1] * (n + 1)
    comp_pows = [1] * (n + 1)
    for k in range(1, n + 1):
        num_pows[k] = num_pows[k - 1] * num
        comp_pows[k] = comp_pows[k - 1] * comp
    scale = atom.mass / den**n
    return [scale * (num_pows[k] * comp_pows[n - k]) for k in range(n + 1)]


def _segment_integrals_by_expansion(lower: Fraction, upper: Fraction, n: int) -> list[Fraction]:
    """integral_a^b p^k (1 - p)^(n - k) dp by expanding (1 - p)^(n - k) term by term."""
    lower_pows = [ONE]
    upper_pows = [ONE]
    for _ in range(n + 1):
        lower_pows.append(lower_pows[-1] * lower)
        upper_pows.append(upper_pows[-1] * upper)

    integrals = []
    for k in range(n + 1):
        total = Fraction(0)
        m = n - k
        for i in range(m + 1):
            degree = k + i + 1
            term = Fraction(math.comb(m, i), degree) * (upper_pows[degree] - lower_pows[degree])
            total += -term if i % 2 else term
        integrals.append(total)
    return integrals


def _binomial_upper_tails(x: Fraction, trials: int) -> list[Fraction]:
    """tails[j] = P(Bin(trials, x) >= j) for j = 0..trials + 1."""
    if x == 0:
        return [ONE] + [Fraction(0)] * (trials + 1)
    if x == 1:
        return [ONE] * (trials + 1) + [Fraction(0)]

    num, den = x.numerator, x.denominator
    comp = den - num
    num_pows = [1] * (trials + 1)
    comp_pows = [1] * (trials + 1)
    for j in range(1, trials + 1):
        num_pows[j] = num_pows[j - 1] * num
        comp_pows[j] = comp_pows[j - 1] * comp

    suffix = [0] * (trials + 2)
    binom = 1
    terms = []
    for j in range(trials + 1):
        terms.append(binom * num_pows[j] * comp_pows[trials - j])
        binom = binom * (trials - j) // (j + 1)
    for j in range(trials, -1, -1):
        suffix[j] = suffix[j + 1] + terms[j]

    scale = den**trials
    return [Fraction(s, scale) for s in suffix]


def _segment_integrals_by_tails(lower: Fraction, upper: Fraction, n: int) -> list[Fraction]:
    """Same integrals via the binomial-tail form of the incomplete Beta integral:

        integral_0^x p^k (1-p)^(n-k) dp = P(Bin(n+1, x) >= k+1) / ((n+1) C(n, k))
    """
    upper_tails = _binomial_upper_tails(upper, n + 1)
    lower_tails = _binomial_upper_tails(lower, n + 1)
    return [
        (upper_tails[k + 1] - lower_tails[k + 1]) / ((n + 1) * math.comb(n, k))
        for k in range(n + 1)
    ]


def segment_integrals(lower: Fraction, upper: Fraction, n: int) -> list[Fraction]:
    if n <= EXPANSION_MAX_N:
        return _segment_integrals_by_expansion(lower, upper, n)
    return _segment_integrals_by_tails(lower, upper, n)


def kernel(mu: BeliefMeasure, n_voters: int) -> Kernel:
    """Exact w_N(k) for k = 0..N under mu."""
    if isinstance(n_voters, bool) or not isinstance(n_voters, int) or n_voters < 1:
        raise DomainError(f"Kernel needs a positive voter count, got {n_voters!r}")
    n = n_voters

    values = [Fraction(0)] * (n + 1)
    for atom in mu.atoms:
        for k, v in enumerate(_atom_kernel(atom, n)):
            values[k] += v
    for seg in mu.segments:
        density = seg.density
        for k, v in enumerate(segment_integrals(seg.lower, seg.upper, n)):
            values[k] += density * v

    logger.debug("Kernel for %s at N=%d computed", mu.name, n)
    return Kernel(n_voters=n, values=tuple(values))


class TailIntegrals(NamedTuple):
    """Upper-tail functionals of mu at a threshold r."""

    mass_tail: Fraction  # mu([r, 1])
    first_moment_tail: Fraction  # integral over [r, 1] of p dmu
    complement_moment_tail: Fraction  # integral over [0, r) of (1 - p) dmu
    atom_at_r: Fraction  # mu({r})


def tail_integrals(mu: BeliefMeasure, r) -> TailIntegrals:
    """mu([r, 1]), the first moment over [r, 1] and the (1 - p) moment over [0, r).

    The limit theorems these feed assume mu({r}) = 0; an atom at r is still
    counted in the closed upper interval and a warning is logged.
    """
    r = as_rational(r, "r")
    if not 0 < r < 1:
        raise DomainError(f"Threshold r must lie in (0, 1), got {r}")

    mass_tail = Fraction(0)
    first_moment = Fraction(0)
    complement_moment = Fraction(0)

    for atom in mu.atoms:
        if atom.location >= r:
            mass_tail += atom.mass
            first_moment += atom.mass * atom.location
        else:
            complement_moment += atom.mass * (1 - atom.location)

    for seg in mu.segments:
        density = seg.density
        lo, hi = max(seg.lower, r), seg.upper
        if hi > lo:
            mass_tail += density * (hi - lo)
            first_moment += density * (hi * hi - lo * lo) / 2
        lo, hi = seg.lower, min(seg.upper, r)
        if hi > lo:
            complement_moment += density * ((hi - lo) - (hi * hi - lo * lo) / 2)

    atom_at_r = mu.atom_mass_at(r)
    if atom_at_r > 0:
        logger.warning(
            "mu has an atom of mass %s at r=%s; the large-N limits assume mu({r}) = 0",
            atom_at_r, r,
        )
    return TailIntegrals(mass_tail, first_moment, complement_moment, atom_at_r)
