"""Exact measures on the bundle with prescribed base marginal, their
disintegration, conditional and relative entropies against finite
sub-sigma-algebras, the upper-semicontinuity defect surrogate, and the
entropy inequalities used by the verification suites.

Masses are exact rationals; sigma-algebras are finite and represented by
their atom partitions, so conditional expectations are exact ratio
computations.  Only logarithms are floating point; every inequality check
carries the module tolerance.  The convention ``0 * log 0 = 0`` applies
throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .budgets import Budgets, DEFAULTS
from .covers import (
    ContainmentWitness,
    RandomCover,
    RandomPartition,
    RandomSet,
    SigmaAlgebra,
    delta_contains,
    fiber_partition,
    iterate_cover,
    join,
    pullback,
    refines,
    sigma_refines,
    state_partition,
)
from .errors import PreconditionError
from .model import BundleRDS, FactorMap, Point
from .tail_entropy import EntropyEstimate, TOL, check_subadditive, integrated_log_count


@dataclass(frozen=True, eq=False)
class FiberedMeasure:
    """Nonnegative rational weights on bundle states.

    ``weights[omega]`` maps fiber points to masses.  Membership in the space
    of measures with base marginal P means the weights over each fiber sum
    exactly to the base mass there; :meth:`validate` checks this.
    """

    weights: tuple[Mapping[Point, Fraction], ...]

    @property
    def size(self) -> int:
        return len(self.weights)

    def get(self, omega: int, x: Point) -> Fraction:
        return self.weights[omega].get(x, Fraction(0))

    def total(self) -> Fraction:
        return sum((v for w in self.weights for v in w.values()), Fraction(0))

    def validate(self, rds: BundleRDS) -> list[str]:
        out = []
        if self.size != rds.size:
            return [f"measure spans {self.size} base points, system has {rds.size}"]
        for w in range(rds.size):
            stray = set(self.weights[w]) - set(rds.fibers[w])
            if stray:
                out.append(f"mass outside the fiber at omega={w}: {sorted(map(repr, stray))}")
            if any(v < 0 for v in self.weights[w].values()):
                out.append(f"negative mass at omega={w}")
            fiber_mass = sum(self.weights[w].values(), Fraction(0))
            if fiber_mass != rds.base.prob[w]:
                out.append(
                    f"marginal violated at omega={w}: {fiber_mass} != {rds.base.prob[w]}"
                )
        return out

    @classmethod
    def uniform(cls, rds: BundleRDS) -> "FiberedMeasure":
        return cls(
            tuple(
                {x: rds.base.prob[w] / len(rds.fibers[w]) for x in rds.fibers[w]}
                for w in range(rds.size)
            )
        )

    @classmethod
    def from_fiber_weights(cls, weights: Iterable[Mapping[Point, Fraction]]) -> "FiberedMeasure":
        return cls(tuple({x: Fraction(v) for x, v in w.items()} for w in weights))


def measures_equal(a: FiberedMeasure, b: FiberedMeasure) -> bool:
    """Exact equality, insensitive to explicitly stored zeros."""
    if a.size != b.size:
        return False
    for wa, wb in zip(a.weights, b.weights):
        for x in set(wa) | set(wb):
            if wa.get(x, Fraction(0)) != wb.get(x, Fraction(0)):
                return False
    return True


def total_variation(a: FiberedMeasure, b: FiberedMeasure) -> Fraction:
    """Unnormalized L1 distance (a single moved unit of mass costs 2)."""
    out = Fraction(0)
    for wa, wb in zip(a.weights, b.weights):
        for x in set(wa) | set(wb):
            out += abs(wa.get(x, Fraction(0)) - wb.get(x, Fraction(0)))
    return out


def mix(parts: Sequence[tuple[Fraction, FiberedMeasure]]) -> FiberedMeasure:
    """Exact affine combination of measures over one bundle."""
    size = parts[0][1].size
    acc: list[dict[Point, Fraction]] = [{} for _ in range(size)]
    for coeff, mu in parts:
        for w in range(size):
            for x, v in mu.weights[w].items():
                acc[w][x] = acc[w].get(x, Fraction(0)) + Fraction(coeff) * v
    return FiberedMeasure(tuple(acc))


def mass_of_sections(mu: FiberedMeasure, sections: Sequence[frozenset]) -> Fraction:
    return sum(
        (mu.weights[w].get(x, Fraction(0)) for w in range(len(sections)) for x in sections[w]),
        Fraction(0),
    )


def mass_of_set(mu: FiberedMeasure, rs: RandomSet) -> Fraction:
    return mass_of_sections(mu, rs.sections)


def disintegrate(mu: FiberedMeasure, rds: BundleRDS) -> tuple[dict[Point, Fraction] | None, ...]:
    """Fiber conditionals: weights divided by the base mass, summing to one
    on every fiber of positive base mass.  Fibers with zero base mass get
    ``None`` (flagged, not an error); the measure is reproduced exactly as
    the base-mass-weighted combination of the conditionals."""
    out: list[dict[Point, Fraction] | None] = []
    for w in range(rds.size):
        p = rds.base.prob[w]
        if p == 0:
            out.append(None)
        else:
            out.append({x: v / p for x, v in mu.weights[w].items()})
    return tuple(out)


def skew_pushforward(mu: FiberedMeasure, rds: BundleRDS) -> FiberedMeasure:
    """Image of the measure under one step of the skew map."""
    acc: list[dict[Point, Fraction]] = [{} for _ in range(rds.size)]
    for w in range(rds.size):
        wn = rds.base.theta[w]
        for x, v in mu.weights[w].items():
            if v == 0:
                continue
            y = rds.apply(w, x)
            acc[wn][y] = acc[wn].get(y, Fraction(0)) + v
    return FiberedMeasure(tuple(acc))


def pushforward_measure(pi: FactorMap, mu: FiberedMeasure) -> FiberedMeasure:
    """Transport a measure through a factor map (exact, affine, marginal
    preserving; sends invariant measures to invariant measures)."""
    acc: list[dict[Point, Fraction]] = [{} for _ in range(pi.source.size)]
    for w in range(pi.source.size):
        for y, v in mu.weights[w].items():
            if v == 0:
                continue
            x = pi.apply(w, y)
            acc[w][x] = acc[w].get(x, Fraction(0)) + v
    return FiberedMeasure(tuple(acc))


def _plogq(mass: Fraction, given: Fraction) -> float:
    # one conditional-entropy term: mass * log(given / mass), 0 at mass 0
    if mass == 0:
        return 0.0
    return float(mass) * (math.log(float(given)) - math.log(float(mass)))


def conditional_entropy(mu: FiberedMeasure, r: RandomCover, s: SigmaAlgebra) -> float:
    """Entropy of the partition ``r`` conditioned on the atoms of ``s``:
    the exact finite formula over joint atom masses, zero-mass cells
    contributing nothing.  Lies in ``[0, log len(r)]``."""
    total = 0.0
    for atom in s.atoms.elements:
        atom_mass = mass_of_set(mu, atom)
        if atom_mass == 0:
            continue
        for cell in r.elements:
            joint = mass_of_sections(
                mu, tuple(a & c for a, c in zip(atom.sections, cell.sections))
            )
            total += _plogq(joint, atom_mass)
    return total



@dataclass(frozen=True)
class Filtration:
    """Increasing chain of finite sub-sigma-algebras."""

    stages: tuple[SigmaAlgebra, ...]

    def validate_chain(self) -> bool:
        return all(
            sigma_refines(self.stages[i + 1], self.stages[i]) for i in range(len(self.stages) - 1)
        )


def sigma_backward_compatible(s: SigmaAlgebra, rds: BundleRDS) -> bool:
    """Does the one-step dynamical pullback of the algebra sit inside it?
    Needed for the subadditivity of the conditioned sequence."""
    pulled = pullback(s.atoms, rds, 1)
    return refines(s.atoms, pulled, fiberwise=True)


def relative_entropy_sequence(
    mu: FiberedMeasure,
    r: RandomPartition,
    s: SigmaAlgebra,
    rds: BundleRDS,
    n_max: int,
    budgets: Budgets = DEFAULTS,
) -> EntropyEstimate:
    """Conditional entropies of the depth-n iterates of ``r`` given ``s``,
    with the running-infimum bracket.

    Preconditions are verified, not assumed: the measure must be exactly
    invariant under the skew map and the algebra must contain its own
    dynamical pullback; both are needed for subadditivity.
    """
    if not measures_equal(skew_pushforward(mu, rds), mu):
        raise PreconditionError("invariant_measure", "measure is not skew-invariant")
    if not sigma_backward_compatible(s, rds):
        raise PreconditionError("backward_compatible_algebra", "pullback of the algebra escapes it")
    values = []
    for n in range(1, n_max + 1):
        rn = iterate_cover(r, rds, n, budgets)
        values.append(conditional_entropy(mu, rn, s))
    return EntropyEstimate(
        values=tuple(values), requested=n_max, subadditive_ok=check_subadditive(values)
    )


def transformation_relative_entropy(
    mu: FiberedMeasure,
    s: SigmaAlgebra,
    rds: BundleRDS,
    n_max: int,
    budgets: Budgets = DEFAULTS,
) -> float:
    """Bracket of the supremum over partitions, evaluated at the state
    partition, which dominates every partition's sequence at each depth on
    finite fibers (refinement monotonicity of conditional entropy)."""
    return transformation_relative_entropy_sequence(mu, s, rds, n_max, budgets).value


def transformation_relative_entropy_sequence(
    mu: FiberedMeasure,
    s: SigmaAlgebra,
    rds: BundleRDS,
    n_max: int,
    budgets: Budgets = DEFAULTS,
) -> EntropyEstimate:
    return relative_entropy_sequence(mu, state_partition(rds), s, rds, n_max, budgets)


@dataclass(frozen=True)
class DefectEstimate:
    """Family surrogate for the upper-semicontinuity defect at a measure.

    ``value`` is floored at zero; ``raw`` keeps the sign.  ``truncated[k]``
    compares the depth-(k+1) terms directly (the finite-depth structure the
    asymptotic defect hides).  When no family member falls in the
    neighborhood, the defect is zero with ``neighborhood_empty`` set.
    """

    value: float
    raw: float
    truncated: tuple[float, ...]
    neighborhood_empty: bool


def defect(
    m: FiberedMeasure,
    s: SigmaAlgebra,
    rds: BundleRDS,
    family: Sequence[FiberedMeasure],
    epsilon: Fraction,
    n_max: int,
    budgets: Budgets = DEFAULTS,
) -> DefectEstimate:
    """Largest entropy excess over ``m`` among family members within
    ``epsilon`` total variation.  All measures must be invariant."""
    for cand in (m, *family):
        if not measures_equal(skew_pushforward(cand, rds), m if cand is m else cand):
            raise PreconditionError("invariant_measure", "defect needs invariant measures")
    base_seq = transformation_relative_entropy_sequence(m, s, rds, n_max, budgets)
    near = [mu for mu in family if total_variation(mu, m) <= epsilon]
    if not near:
        return DefectEstimate(
            value=0.0,
            raw=0.0,
            truncated=tuple(0.0 for _ in range(n_max)),
            neighborhood_empty=True,
        )
    seqs = [transformation_relative_entropy_sequence(mu, s, rds, n_max, budgets) for mu in near]
    raw = max(seq.value for seq in seqs) - base_seq.value
    truncated = tuple(
        max(seq.ratios[k] for seq in seqs) - base_seq.ratios[k] for k in range(n_max)
    )
    return DefectEstimate(value=max(raw, 0.0), raw=raw, truncated=truncated, neighborhood_empty=False)


@dataclass(frozen=True)
class BoundCheck:
    ok: bool
    left: float
    right: float

    @property
    def slack(self) -> float:
        return self.right - self.left


def entropy_count_bound_check(
    mu: FiberedMeasure, r: RandomPartition, q: RandomPartition, rds: BundleRDS
) -> BoundCheck:
    """Conditional entropy of ``r`` given the algebra joining ``q`` with the
    base-point partition never exceeds the integrated log relative count."""
    s = SigmaAlgebra(join(q, fiber_partition(rds)))
    left = conditional_entropy(mu, r, s)
    right = integrated_log_count(rds, r, q, 1)
    return BoundCheck(ok=left <= right + TOL, left=left, right=right)


def two_partition_count_bound_check(
    mu: FiberedMeasure,
    r: RandomPartition,
    q: RandomPartition,
    rds: BundleRDS,
    s: SigmaAlgebra,
) -> BoundCheck:
    """Conditioned comparison of two partitions: the entropy of ``r`` given
    ``s`` is bounded by that of ``q`` plus the integrated log relative count.
    Valid whenever ``s`` contains the base-point algebra."""
    left = conditional_entropy(mu, r, s)
    right = conditional_entropy(mu, q, s) + integrated_log_count(rds, r, q, 1)
    return BoundCheck(ok=left <= right + TOL, left=left, right=right)


@dataclass(frozen=True)
class ContainmentBound:
    ok: bool
    entropy: float
    bound: float
    # the alternative sign variant, reported alongside for comparison
    bound_plus_variant: float
    delta_in_range: bool
    witness: ContainmentWitness


def containment_entropy_bound_check(
    mu: FiberedMeasure,
    p: RandomPartition,
    q: RandomPartition,
    delta: Fraction,
    budgets: Budgets = DEFAULTS,
) -> ContainmentBound:
    """If some coarsening of ``p`` matches ``q`` to within ``delta`` in total
    symmetric-difference mass, the conditional entropy of ``q`` given ``p``
    is at most ``-d log d - (1-d) log(1-d) + d log k`` with ``k = len(q)``.

    The bound envelope is increasing only for ``delta < 1/e``, so
    ``delta_in_range`` gates when ``ok`` is a theorem rather than a numeric
    observation.  The variant with ``+(1-d)log(1-d)`` is reported alongside.
    """
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise ValueError("delta must lie strictly between 0 and 1")
    witness = delta_contains(p, q, mu, delta, budgets)
    if not witness.contained:
        raise PreconditionError("delta_containment", f"best achievable sum {witness.best_sum} >= {delta}")
    d = float(delta)
    k = len(q.elements)
    mixing = -d * math.log(d) - (1 - d) * math.log(1 - d)
    bound = mixing + d * math.log(k)
    bound_plus = -d * math.log(d) + (1 - d) * math.log(1 - d) + d * math.log(k)
    entropy = conditional_entropy(mu, q, SigmaAlgebra(p))
    return ContainmentBound(
        ok=entropy <= bound + TOL,
        entropy=entropy,
        bound=bound,
        bound_plus_variant=bound_plus,
        delta_in_range=float(delta) < 1 / math.e,
        witness=witness,
    )


@dataclass(frozen=True)
class FiltrationCheck:
    ok: bool
    entropies: tuple[float, ...]
    target_entropy: float


def filtration_limit_check(
    mu: FiberedMeasure,
    r: RandomPartition,
    filt: Filtration,
    target: SigmaAlgebra,
) -> FiltrationCheck:
    """Along a refining chain whose last stage generates the target algebra,
    the conditional entropies decrease monotonically to the target value
    (finite chains terminate, so the limit is attained exactly)."""
    if not filt.validate_chain():
        raise PreconditionError("refining_chain", "stages do not refine in order")
    last = filt.stages[-1]
    if not (sigma_refines(last, target) and sigma_refines(target, last)):
        raise PreconditionError("chain_generates_target", "last stage does not generate the target")
    entropies = tuple(conditional_entropy(mu, r, s) for s in filt.stages)
    monotone = all(entropies[i + 1] <= entropies[i] + TOL for i in range(len(entropies) - 1))
    target_entropy = conditional_entropy(mu, r, target)
    ok = monotone and abs(entropies[-1] - target_entropy) <= TOL
    return FiltrationCheck(ok=ok, entropies=entropies, target_entropy=target_entropy)
