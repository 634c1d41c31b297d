"""Invariant measures: defect, Cesaro limits, lifts, polytope vertices,
Bowen balls, separated empirical measures, diagonal construction."""

from fractions import Fraction

import pytest

from rdstail import (
    BundleRDS,
    DrivingSystem,
    FiberedMeasure,
    PreconditionError,
    bowen_ball,
    cesaro_limit,
    cycle_coefficients,
    cycle_system,
    diagonal_measure,
    extend_with_tags,
    hull_certificate,
    identity_factor,
    invariance_defect,
    lebesgue_number,
    lift_invariant,
    measures_equal,
    mix,
    point_partition,
    pushforward_measure,
    separated_empirical,
    swap_system,
    trivial_cover,
    vertex_enumeration,
)
from rdstail.verify import _rng, random_measure, random_system

SWAP = swap_system()
CYCLE = cycle_system()


def test_invariance_defect_cases():
    uniform_cycle = FiberedMeasure(({p: Fraction(1, 4) for p in CYCLE.fibers[0]},))
    assert invariance_defect(uniform_cycle, CYCLE) == 0
    point = FiberedMeasure(({"p0": Fraction(1)},))
    assert invariance_defect(point, CYCLE) == 2
    ident = BundleRDS(
        base=DrivingSystem((Fraction(1),), (0,)),
        fibers=(frozenset({"x", "y"}),),
        maps=({"x": "x", "y": "y"},),
    )
    any_mu = FiberedMeasure(({"x": Fraction(1, 3), "y": Fraction(2, 3)},))
    assert invariance_defect(any_mu, ident) == 0


def test_cesaro_point_mass_spreads_over_cycle():
    point = FiberedMeasure(({"p0": Fraction(1)},))
    lim = cesaro_limit(point, CYCLE)
    assert dict(lim.weights[0]) == {p: Fraction(1, 4) for p in CYCLE.fibers[0]}
    assert invariance_defect(lim, CYCLE) == 0


def test_cesaro_fixes_invariant_and_is_idempotent():
    inv = FiberedMeasure(({"a": Fraction(1, 2)}, {"c": Fraction(1, 2)}))
    assert measures_equal(cesaro_limit(inv, SWAP), inv)
    nu = FiberedMeasure.uniform(SWAP)
    once = cesaro_limit(nu, SWAP)
    assert measures_equal(cesaro_limit(once, SWAP), once)


def test_cesaro_transient_to_fixed_point():
    rds = BundleRDS(
        base=DrivingSystem((Fraction(1),), (0,)),
        fibers=(frozenset({"t", "f"}),),
        maps=({"t": "f", "f": "f"},),
    )
    nu = FiberedMeasure(({"t": Fraction(1)},))
    lim = cesaro_limit(nu, rds)
    assert dict(lim.weights[0]) == {"f": Fraction(1)}


def test_lift_identity_and_tagged_extensions():
    inv = FiberedMeasure(({"a": Fraction(1, 2)}, {"c": Fraction(1, 2)}))
    assert measures_equal(lift_invariant(identity_factor(SWAP), inv), inv)
    for rotate in (False, True):
        pi = extend_with_tags(SWAP, tags=2, rotate=rotate)
        lifted = lift_invariant(pi, inv)
        assert invariance_defect(lifted, pi.source) == 0
        assert measures_equal(pushforward_measure(pi, lifted), inv)
        # mass splits evenly over the tag coordinate
        tag_mass = sum(
            (v for w in range(lifted.size) for (x, t), v in lifted.weights[w].items() if t == "t0"),
            Fraction(0),
        )
        assert tag_mass == Fraction(1, 2)


def test_lift_rejects_noninvariant():
    with pytest.raises(PreconditionError):
        lift_invariant(identity_factor(SWAP), FiberedMeasure.uniform(SWAP))


def test_vertices_of_swap_and_cycle_match_hand_derivation():
    poly = vertex_enumeration(SWAP)
    assert len(poly.vertices) == 1
    v = poly.vertices[0]
    assert dict(v.weights[0]) == {"a": Fraction(1, 2)}
    assert dict(v.weights[1]) == {"c": Fraction(1, 2)}

    poly2 = vertex_enumeration(CYCLE)
    assert len(poly2.vertices) == 1
    assert dict(poly2.vertices[0].weights[0]) == {p: Fraction(1, 4) for p in CYCLE.fibers[0]}


def test_vertices_of_two_fixed_points():
    rds = BundleRDS(
        base=DrivingSystem((Fraction(1),), (0,)),
        fibers=(frozenset({"x", "y"}),),
        maps=({"x": "x", "y": "y"},),
    )
    poly = vertex_enumeration(rds)
    weights = sorted(str(dict(v.weights[0])) for v in poly.vertices)
    assert len(poly.vertices) == 2
    assert weights == sorted([str({"x": Fraction(1)}), str({"y": Fraction(1)})])


def test_hull_certificate_reconstructs_random_invariants():
    for trial in range(15):
        rds = random_system(_rng(91, trial))
        poly = vertex_enumeration(rds)
        mu = cesaro_limit(random_measure(_rng(92, trial), rds), rds)
        cert = hull_certificate(poly, mu)
        assert cert is not None
        assert sum(cert.values(), Fraction(0)) == 1
        assert all(c > 0 for c in cert.values())
        rebuilt = mix([(c, poly.vertices[i]) for i, c in cert.items()])
        assert measures_equal(rebuilt, mu)


def test_cycle_coefficients_rejects_noninvariant():
    poly = vertex_enumeration(SWAP)
    assert cycle_coefficients(poly, FiberedMeasure.uniform(SWAP)) is None


def test_bowen_ball_cases():
    # radius beyond the fiber diameter: everything
    assert bowen_ball(SWAP, 0, "a", 1, Fraction(2)) == frozenset({"a", "b"})
    # radius below every positive distance: only the center
    assert bowen_ball(SWAP, 0, "a", 1, Fraction(1, 2)) == frozenset({"a"})
    # strictness decides at radius exactly one on the discrete metric
    assert bowen_ball(SWAP, 0, "a", 2, Fraction(1)) == frozenset({"a"})


def test_lebesgue_number():
    assert lebesgue_number(SWAP, point_partition(SWAP), 0) == Fraction(1)
    assert lebesgue_number(SWAP, trivial_cover(SWAP), 0) is None


def test_separated_empirical_on_swap():
    se = separated_empirical(
        SWAP, point_partition(SWAP), trivial_cover(SWAP), n=2, delta=Fraction(1, 2)
    )
    assert se.lebesgue_ok
    assert se.card_ok
    assert len(se.separated[0]) == 2
    assert se.counts[0] == 2
    assert se.support_mass_mu_n == 1
    assert invariance_defect(se.mu_limit, se.pair.system) == 0


def test_separated_maximality_certificate():
    se = separated_empirical(
        SWAP, point_partition(SWAP), trivial_cover(SWAP), n=2, delta=Fraction(1, 2)
    )
    for w in range(SWAP.size):
        covered = set()
        for y in se.separated[w]:
            covered |= bowen_ball(SWAP, w, y, se.n, se.deltas)
        assert se.chosen[w] <= covered


def test_separated_with_everything_apart():
    # tiny radii separate every pair: the separated set is the whole fiber
    se = separated_empirical(
        CYCLE, point_partition(CYCLE), trivial_cover(CYCLE), n=1, delta=Fraction(1, 3)
    )
    assert set(se.separated[0]) == set(CYCLE.fibers[0])
    assert len(se.separated[0]) == se.counts[0]


def test_diagonal_measure_on_cycle():
    res = diagonal_measure(
        CYCLE,
        [point_partition(CYCLE)],
        [point_partition(CYCLE)],
        n=2,
        delta=Fraction(1),
        entropy_depth=4,
    )
    assert res.invariance == 0
    assert res.support_diagonal is True
    assert res.entropy_zero
    assert res.entropy.values == (0.0, 0.0, 0.0, 0.0)
    # uniform over the diagonal cycle
    assert dict(res.measure.weights[0]) == {(p, p): Fraction(1, 4) for p in CYCLE.fibers[0]}


def test_diagonal_measure_on_swap():
    res = diagonal_measure(
        SWAP,
        [point_partition(SWAP)],
        [point_partition(SWAP)],
        n=2,
        delta=Fraction(1, 2),
        entropy_depth=3,
    )
    assert res.invariance == 0
    assert res.support_diagonal is True
    assert res.entropy_zero


def test_vertex_enumeration_budget():
    import pytest as _pytest

    from rdstail import BudgetExceededError, Budgets

    big = cycle_system(length=30)
    with _pytest.raises(BudgetExceededError):
        vertex_enumeration(big, Budgets(polytope_points=24))


def test_separated_reports_atom_isolation():
    se = separated_empirical(
        SWAP, point_partition(SWAP), trivial_cover(SWAP), n=2, delta=Fraction(1, 2)
    )
    # singleton atoms hold one point each, so isolation is automatic
    assert se.atoms_isolate_separated is True
    from rdstail import RandomCover, RandomSet

    loose = RandomCover(
        (
            RandomSet((frozenset({"a", "b"}), frozenset({"c", "d"}))),
            RandomSet((frozenset({"a"}), frozenset({"c"}))),
        )
    )
    se2 = separated_empirical(SWAP, loose, trivial_cover(SWAP), n=1, delta=Fraction(1, 2))
    assert se2.atoms_isolate_separated is None  # refining family is not a partition


def test_diagonal_rejects_nonrefining_chain():
    with pytest.raises(PreconditionError):
        diagonal_measure(
            SWAP,
            [point_partition(SWAP), trivial_cover(SWAP)],
            [point_partition(SWAP), point_partition(SWAP)],
            n=1,
            delta=Fraction(1),
        )
