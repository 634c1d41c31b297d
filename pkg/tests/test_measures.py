"""Measures: disintegration, conditional entropy, relative entropy
sequences, defect surrogate, entropy bounds, pushforwards."""

import math
from fractions import Fraction

import pytest

from rdstail import (
    FiberedMeasure,
    Filtration,
    PreconditionError,
    RandomPartition,
    RandomSet,
    SigmaAlgebra,
    conditional_entropy,
    containment_entropy_bound_check,
    cycle_system,
    defect,
    disintegrate,
    entropy_count_bound_check,
    extend_with_tags,
    fiber_sigma,
    filtration_limit_check,
    identity_factor,
    join,
    measures_equal,
    mix,
    pair_system,
    point_partition,
    pushforward_measure,
    relative_entropy_sequence,
    sigma_join,
    skew_pushforward,
    state_partition,
    state_sigma,
    swap_system,
    total_variation,
    transformation_relative_entropy,
    transformation_relative_entropy_sequence,
    trivial_cover,
    two_partition_count_bound_check,
    vertex_enumeration,
)
from rdstail.covers import pullback_cover
from rdstail.verify import _rng, random_measure, random_partition, random_system

SWAP = swap_system()
TOL = 1e-9


def swap_invariant() -> FiberedMeasure:
    return FiberedMeasure(({"a": Fraction(1, 2)}, {"c": Fraction(1, 2)}))


def partition(*elements) -> RandomPartition:
    return RandomPartition(tuple(RandomSet(tuple(frozenset(s) for s in e)) for e in elements))


def test_validate_and_marginal():
    mu = FiberedMeasure.uniform(SWAP)
    assert mu.validate(SWAP) == []
    bad = FiberedMeasure(({"a": Fraction(1, 2)}, {"c": Fraction(1, 4)}))
    assert any("marginal" in v for v in bad.validate(SWAP))
    stray = FiberedMeasure(({"zzz": Fraction(1, 2)}, {"c": Fraction(1, 2)}))
    assert any("outside the fiber" in v for v in stray.validate(SWAP))


def test_disintegrate_uniform_and_point_mass():
    mu = FiberedMeasure.uniform(SWAP)
    conds = disintegrate(mu, SWAP)
    assert conds[0] == {"a": Fraction(1, 2), "b": Fraction(1, 2)}
    point = swap_invariant()
    conds2 = disintegrate(point, SWAP)
    assert conds2[0] == {"a": Fraction(1)}
    # reconstruction: base-mass-weighted conditionals give back total mass one
    total = sum(
        SWAP.base.prob[w] * sum(conds[w].values(), Fraction(0)) for w in range(SWAP.size)
    )
    assert total == 1


def test_disintegrate_flags_zero_mass_fiber():
    from rdstail import BundleRDS, DrivingSystem

    base = DrivingSystem((Fraction(1), Fraction(0)), (0, 1))
    rds = BundleRDS(base=base, fibers=(frozenset({"x"}), frozenset({"y"})), maps=({"x": "x"}, {"y": "y"}))
    mu = FiberedMeasure(({"x": Fraction(1)}, {}))
    assert disintegrate(mu, rds)[1] is None


def test_conditional_entropy_basics():
    mu = FiberedMeasure.uniform(SWAP)
    pts = point_partition(SWAP)
    assert conditional_entropy(mu, pts, SigmaAlgebra(pts)) == 0.0
    # uniform two cells against the trivial algebra
    two = partition([{"a"}, {"c"}], [{"b"}, {"d"}])
    triv = SigmaAlgebra(trivial_cover(SWAP))
    assert abs(conditional_entropy(mu, two, triv) - math.log(2)) <= TOL
    # conditioning on the base point: fiberwise uniform over two points each
    assert abs(conditional_entropy(mu, pts, fiber_sigma(SWAP)) - math.log(2)) <= TOL
    assert conditional_entropy(mu, pts, state_sigma(SWAP)) == 0.0


def test_conditional_entropy_range():
    for trial in range(10):
        rds = random_system(_rng(51, trial))
        mu = random_measure(_rng(52, trial), rds)
        r = random_partition(_rng(53, trial), rds)
        s = SigmaAlgebra(random_partition(_rng(54, trial), rds))
        h = conditional_entropy(mu, r, s)
        assert -TOL <= h <= math.log(len(r.elements)) + TOL


def test_fiber_conditioning_matches_disintegration():
    mu = FiberedMeasure.uniform(SWAP)
    pts = point_partition(SWAP)
    lhs = conditional_entropy(mu, pts, fiber_sigma(SWAP))
    conds = disintegrate(mu, SWAP)
    rhs = 0.0
    for w in range(SWAP.size):
        for x, v in conds[w].items():
            if v:
                rhs -= float(SWAP.base.prob[w]) * float(v) * math.log(float(v))
    assert abs(lhs - rhs) <= TOL


def test_chain_rule_exact():
    for trial in range(10):
        rds = random_system(_rng(61, trial), max_fiber=4)
        mu = random_measure(_rng(62, trial), rds)
        r = random_partition(_rng(63, trial), rds)
        q = random_partition(_rng(64, trial), rds)
        s = SigmaAlgebra(random_partition(_rng(65, trial), rds))
        lhs = conditional_entropy(mu, join(r, q), s)
        rhs = conditional_entropy(mu, r, s) + conditional_entropy(mu, q, sigma_join(SigmaAlgebra(r), s))
        assert abs(lhs - rhs) <= TOL


def test_relative_entropy_sequence_zero_when_measurable():
    mu = swap_invariant()
    two = partition([{"a"}, {"c"}], [{"b"}, {"d"}])
    est = relative_entropy_sequence(mu, two, state_sigma(SWAP), SWAP, 4)
    assert est.values == (0.0, 0.0, 0.0, 0.0)


def test_relative_entropy_sequence_fiber_conditioning():
    mu = swap_invariant()
    est = relative_entropy_sequence(mu, point_partition(SWAP), fiber_sigma(SWAP), SWAP, 5)
    # the invariant measure is a point mass on each fiber: no uncertainty
    assert est.values == tuple(0.0 for _ in range(5))
    assert est.subadditive_ok


def test_relative_entropy_preconditions():
    mu = FiberedMeasure.uniform(SWAP)  # not invariant
    with pytest.raises(PreconditionError) as err:
        relative_entropy_sequence(mu, point_partition(SWAP), fiber_sigma(SWAP), SWAP, 3)
    assert err.value.name == "invariant_measure"

    cyc = cycle_system()
    halves = SigmaAlgebra(partition([{"p0", "p1"}], [{"p2", "p3"}]))
    inv = FiberedMeasure(({p: Fraction(1, 4) for p in cyc.fibers[0]},))
    with pytest.raises(PreconditionError) as err2:
        relative_entropy_sequence(inv, point_partition(cyc), halves, cyc, 3)
    assert err2.value.name == "backward_compatible_algebra"


def test_relative_entropy_depth_one_is_conditional_entropy():
    mu = swap_invariant()
    two = partition([{"a"}, {"c"}], [{"b"}, {"d"}])
    s = fiber_sigma(SWAP)
    est = relative_entropy_sequence(mu, two, s, SWAP, 1)
    assert abs(est.values[0] - conditional_entropy(mu, two, s)) <= TOL


def test_entropy_continuous_along_tv_converging_sequences():
    # blend the invariant measure toward a perturbation with geometrically
    # shrinking weight: total variation halves each step and the entropy gap
    # follows it down
    m = swap_invariant()
    other = FiberedMeasure(({"b": Fraction(1, 2)}, {"d": Fraction(1, 2)}))
    pts = point_partition(SWAP)
    s = fiber_sigma(SWAP)
    base = conditional_entropy(m, pts, s)
    gaps = []
    for j in range(1, 16):
        eps = Fraction(1, 2**j)
        mu_j = mix([(1 - eps, m), (eps, other)])
        assert total_variation(mu_j, m) == 2 * eps
        gaps.append(abs(conditional_entropy(mu_j, pts, s) - base))
    assert gaps[-1] < 1e-3
    assert gaps[-1] < gaps[0]
    assert all(b <= a + TOL for a, b in zip(gaps, gaps[1:]))


def test_transformation_relative_entropy_full_algebra_zero():
    mu = swap_invariant()
    assert transformation_relative_entropy(mu, state_sigma(SWAP), SWAP, 4) == 0.0


def test_transformation_on_diagonal_pair_measure():
    cyc = cycle_system()
    pair = pair_system(cyc)
    diag = FiberedMeasure(({(p, p): Fraction(1, 4) for p in cyc.fibers[0]},))
    assert diag.validate(pair.system) == []
    first_algebra = SigmaAlgebra(pullback_cover(pair.first, state_partition(cyc)))
    est = transformation_relative_entropy_sequence(diag, first_algebra, pair.system, 4)
    assert est.values == tuple(0.0 for _ in range(4))


def test_defect_trivial_and_truncated():
    mu = swap_invariant()
    s = fiber_sigma(SWAP)
    d = defect(mu, s, SWAP, [mu], Fraction(1), 4)
    assert d.value == 0.0 and d.raw == 0.0 and not d.neighborhood_empty
    assert d.truncated == (0.0, 0.0, 0.0, 0.0)
    empty = defect(mu, s, SWAP, [], Fraction(1), 3)
    assert empty.neighborhood_empty and empty.value == 0.0


def test_defect_requires_invariance():
    with pytest.raises(PreconditionError):
        defect(FiberedMeasure.uniform(SWAP), fiber_sigma(SWAP), SWAP, [], Fraction(1), 2)


def test_entropy_count_bound():
    mu = FiberedMeasure.uniform(SWAP)
    pts = point_partition(SWAP)
    same = entropy_count_bound_check(mu, pts, pts, SWAP)
    assert same.ok and same.left == 0.0 and same.right == 0.0
    # uniform cells against the trivial conditioning: both sides log 2
    two = partition([{"a"}, {"c"}], [{"b"}, {"d"}])
    triv = RandomPartition((RandomSet((frozenset({"a", "b"}), frozenset({"c", "d"}))),))
    chk = entropy_count_bound_check(mu, two, triv, SWAP)
    assert chk.ok
    assert abs(chk.left - math.log(2)) <= TOL and abs(chk.right - math.log(2)) <= TOL
    mixed = entropy_count_bound_check(mu, pts, two, SWAP)
    assert mixed.ok and mixed.slack >= -TOL


def test_two_partition_count_bound_random():
    for trial in range(10):
        rds = random_system(_rng(71, trial))
        mu = random_measure(_rng(72, trial), rds)
        r = random_partition(_rng(73, trial), rds)
        q = random_partition(_rng(74, trial), rds)
        chk = two_partition_count_bound_check(mu, r, q, rds, fiber_sigma(rds))
        assert chk.ok


def test_containment_bound_cases():
    mu = FiberedMeasure.uniform(SWAP)
    pts = point_partition(SWAP)
    two = partition([{"a"}, {"c"}], [{"b"}, {"d"}])
    res = containment_entropy_bound_check(mu, pts, two, Fraction(1, 8))
    assert res.ok and res.delta_in_range
    assert res.entropy == 0.0
    assert res.witness.best_sum == 0
    # the alternative sign variant is reported and differs
    assert res.bound != res.bound_plus_variant

    far = partition([{"a", "b"}, set()], [set(), {"c", "d"}])
    with pytest.raises(PreconditionError):
        containment_entropy_bound_check(mu, two, far, Fraction(1, 16))
    with pytest.raises(ValueError):
        containment_entropy_bound_check(mu, pts, two, Fraction(2))


def test_filtration_limit():
    mu = FiberedMeasure.uniform(SWAP)
    pts = point_partition(SWAP)
    triv = SigmaAlgebra(trivial_cover(SWAP))
    full = state_sigma(SWAP)
    two_step = Filtration((triv, full))
    chk = filtration_limit_check(mu, pts, two_step, full)
    assert chk.ok
    assert abs(chk.entropies[0] - math.log(4)) <= TOL  # four uniform states
    assert chk.entropies[-1] == 0.0

    const = Filtration((triv, triv))
    chk2 = filtration_limit_check(mu, pts, const, triv)
    assert chk2.ok and chk2.entropies[0] == chk2.entropies[1]

    mid = sigma_join(triv, fiber_sigma(SWAP))
    three = Filtration((triv, mid, full))
    chk3 = filtration_limit_check(mu, pts, three, full)
    assert chk3.ok
    assert chk3.entropies[0] >= chk3.entropies[1] >= chk3.entropies[2]

    bad = Filtration((full, triv))
    with pytest.raises(PreconditionError):
        filtration_limit_check(mu, pts, bad, triv)


def test_pushforward_identity_affinity_and_collapse():
    ident = identity_factor(SWAP)
    mu = FiberedMeasure.uniform(SWAP)
    assert measures_equal(pushforward_measure(ident, mu), mu)

    pi = extend_with_tags(SWAP, tags=2, rotate=False)
    up1 = random_measure(_rng(81, 0), pi.source)
    up2 = random_measure(_rng(81, 1), pi.source)
    blended = mix([(Fraction(1, 2), up1), (Fraction(1, 2), up2)])
    lhs = pushforward_measure(pi, blended)
    rhs = mix([(Fraction(1, 2), pushforward_measure(pi, up1)), (Fraction(1, 2), pushforward_measure(pi, up2))])
    assert measures_equal(lhs, rhs)

    uniform_up = FiberedMeasure.uniform(pi.source)
    down = pushforward_measure(pi, uniform_up)
    # two preimages per point collapse onto doubled weight
    assert down.get(0, "a") == 2 * uniform_up.get(0, ("a", "t0"))
    assert down.validate(SWAP) == []


def test_pushforward_preserves_invariance():
    pi = extend_with_tags(SWAP, tags=2, rotate=True)
    poly = vertex_enumeration(pi.source)
    for v in poly.vertices:
        image = pushforward_measure(pi, v)
        assert measures_equal(skew_pushforward(image, SWAP), image)


def test_total_variation_convention():
    a = FiberedMeasure(({"a": Fraction(1, 2)}, {"c": Fraction(1, 2)}))
    b = FiberedMeasure(({"b": Fraction(1, 2)}, {"c": Fraction(1, 2)}))
    assert total_variation(a, b) == 1
