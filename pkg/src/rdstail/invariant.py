"""Invariant measures of the skew map: invariance defect, exact Cesaro
limits via cycle structure, invariant lifts along factor maps, polytope
vertex enumeration, Bowen balls, separated-set empirical measures, and the
diagonal pair-measure construction.

The skew map is a function on the finite set of bundle states, so every
forward orbit falls into a cycle; Cesaro averages therefore have exact
limits (each state's mass spreads uniformly over its terminal cycle) and no
numerical limit is ever taken.  The invariant measures with the prescribed
base marginal form a polytope whose vertices are computed exactly; they play
the role the extreme (ergodic-like) measures play in general.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import _linalg
from .budgets import Budgets, DEFAULTS
from .counting import minimal_subcover
from .covers import (
    RandomCover,
    RandomPartition,
    SigmaAlgebra,
    iterate_cover,
    pullback_cover,
    refines,
    state_partition,
)
from .errors import BudgetExceededError, PreconditionError
from .measures import (
    FiberedMeasure,
    measures_equal,
    mix,
    pushforward_measure,
    skew_pushforward,
    total_variation,
    transformation_relative_entropy_sequence,
)
from .model import BundleRDS, FactorMap, PairSystem, Point, State, pair_system, sort_points
from .tail_entropy import EntropyEstimate


def invariance_defect(mu: FiberedMeasure, rds: BundleRDS) -> Fraction:
    """Exact L1 distance between the measure and its one-step image; zero
    exactly on invariant measures."""
    return total_variation(skew_pushforward(mu, rds), mu)


def _cycle_structure(rds: BundleRDS) -> tuple[list[list[State]], dict[State, int]]:
    """Terminal cycles of the skew map and, for every state, the index of
    the cycle its orbit falls into."""
    nxt = {
        (w, x): (rds.base.theta[w], rds.apply(w, x))
        for w in range(rds.size)
        for x in rds.fibers[w]
    }
    cycles: list[list[State]] = []
    terminal: dict[State, int] = {}
    for start in rds.states():
        if start in terminal:
            continue
        path: list[State] = []
        on_path: dict[State, int] = {}
        s = start
        while s not in terminal and s not in on_path:
            on_path[s] = len(path)
            path.append(s)
            s = nxt[s]
        if s in on_path:
            cycle = path[on_path[s]:]
            cycles.append(cycle)
            cid = len(cycles) - 1
        else:
            cid = terminal[s]
        for p in path:
            terminal[p] = cid
    return cycles, terminal


def cesaro_limit(nu: FiberedMeasure, rds: BundleRDS) -> FiberedMeasure:
    """Exact limit of the running averages of the iterated images: each
    state's mass distributes uniformly over its terminal cycle.  The output
    always has invariance defect zero and the same base marginal."""
    cycles, terminal = _cycle_structure(rds)
    acc: list[dict[Point, Fraction]] = [{} for _ in range(rds.size)]
    for w in range(rds.size):
        for x, v in nu.weights[w].items():
            if v == 0:
                continue
            cycle = cycles[terminal[(w, x)]]
            share = v / len(cycle)
            for cw, cx in cycle:
                acc[cw][cx] = acc[cw].get(cx, Fraction(0)) + share
    return FiberedMeasure(tuple(acc))


def lift_invariant(pi: FactorMap, mu: FiberedMeasure) -> FiberedMeasure:
    """Invariant preimage measure along a factor map.

    Starts from the lift with uniform conditional weights on every
    point-preimage, then projects onto the invariant set by the exact Cesaro
    limit.  Equivariance makes the projection commute with the pushforward,
    so the result pushes forward to the input exactly; both certificates are
    verified before returning.
    """
    if invariance_defect(mu, pi.target) != 0:
        raise PreconditionError("invariant_measure", "lift needs an invariant input")
    acc: list[dict[Point, Fraction]] = [{} for _ in range(pi.source.size)]
    for w in range(pi.source.size):
        for x, v in mu.weights[w].items():
            if v == 0:
                continue
            pre = sort_points(pi.preimage(w, x))
            share = v / len(pre)
            for y in pre:
                acc[w][y] = acc[w].get(y, Fraction(0)) + share
    lifted = cesaro_limit(FiberedMeasure(tuple(acc)), pi.source)
    if invariance_defect(lifted, pi.source) != 0:
        raise AssertionError("cesaro projection failed to produce an invariant measure")
    if not measures_equal(pushforward_measure(pi, lifted), mu):
        raise AssertionError("lifted measure does not push forward to the input")
    return lifted


@dataclass(frozen=True, eq=False)
class InvariantPolytope:
    """Vertices of the invariant measures with the prescribed marginal.

    ``cycles`` are the terminal cycles of the skew map; every invariant
    measure is a nonnegative combination of the uniform cycle measures, so
    the polytope lives in cycle-coefficient space where the marginal
    constraints are linear.  ``vertex_weights[i]`` gives vertex i's cycle
    coefficients.
    """

    vertices: tuple[FiberedMeasure, ...]
    cycles: tuple[tuple[State, ...], ...]
    vertex_weights: tuple[tuple[Fraction, ...], ...]


def _uniform_on_cycle(rds: BundleRDS, cycle: Sequence[State]) -> FiberedMeasure:
    acc: list[dict[Point, Fraction]] = [{} for _ in range(rds.size)]
    share = Fraction(1, len(cycle))
    for w, x in cycle:
        acc[w][x] = acc[w].get(x, Fraction(0)) + share
    return FiberedMeasure(tuple(acc))


def vertex_enumeration(rds: BundleRDS, budgets: Budgets = DEFAULTS) -> InvariantPolytope:
    """Exact vertex list of the invariant-measure polytope.

    Works in cycle-coefficient coordinates: vertices are the basic feasible
    solutions of the marginal equations, found by enumerating independent
    column subsets and solving exactly.  Every vertex is checked to be
    invariant with the right marginal before it is returned.
    """
    npoints = sum(len(f) for f in rds.fibers)
    if npoints > budgets.polytope_points:
        raise BudgetExceededError("polytope_points", budgets.polytope_points, npoints)
    cycles, _ = _cycle_structure(rds)
    ncy = len(cycles)
    m = [
        [
            Fraction(sum(1 for (cw, _) in cycles[c] if cw == w), len(cycles[c]))
            for c in range(ncy)
        ]
        for w in range(rds.size)
    ]
    b = list(rds.base.prob)
    r = _linalg.rank(m)
    from itertools import combinations

    found: list[tuple[tuple[Fraction, ...], FiberedMeasure]] = []
    for k in range(1, r + 1):
        for cols in combinations(range(ncy), k):
            sub = [[row[c] for c in cols] for row in m]
            if _linalg.rank(sub) < k:
                continue
            sol = _linalg.solve(sub, b)
            if sol is None or any(v <= 0 for v in sol):
                # support must be exactly the chosen columns; zero entries
                # re-appear as smaller supports
                continue
            lam = [Fraction(0)] * ncy
            for c, v in zip(cols, sol):
                lam[c] = v
            # consistency: the full system must hold, not just the square part
            if any(sum(m[w][c] * lam[c] for c in range(ncy)) != b[w] for w in range(rds.size)):
                continue
            mu = mix([(lam[c], _uniform_on_cycle(rds, cycles[c])) for c in range(ncy) if lam[c]])
            if invariance_defect(mu, rds) != 0 or mu.validate(rds):
                raise AssertionError("enumerated vertex fails its own certificates")
            found.append((tuple(lam), mu))
    return InvariantPolytope(
        vertices=tuple(v for _, v in found),
        cycles=tuple(tuple(c) for c in cycles),
        vertex_weights=tuple(w for w, _ in found),
    )


def cycle_coefficients(polytope: InvariantPolytope, mu: FiberedMeasure) -> tuple[Fraction, ...] | None:
    """Cycle-coefficient coordinates of an invariant measure, or None when
    the measure is not a combination of uniform cycle measures (i.e., not
    invariant)."""
    coeffs = []
    seen_mass = Fraction(0)
    for cycle in polytope.cycles:
        masses = {mu.get(w, x) for (w, x) in cycle}
        if len(masses) != 1:
            return None
        lam = masses.pop() * len(cycle)
        coeffs.append(lam)
        seen_mass += lam
    if seen_mass != mu.total():
        return None  # mass off the cycles
    return tuple(coeffs)


def hull_certificate(
    polytope: InvariantPolytope, mu: FiberedMeasure
) -> dict[int, Fraction] | None:
    """Exact convex combination of vertices reproducing ``mu`` (an explicit
    feasibility certificate), or None when the measure lies outside.

    Constructive Caratheodory over cycle coefficients: walk along kernel
    directions to the boundary, shrinking the support each step.
    """
    lam = cycle_coefficients(polytope, mu)
    if lam is None:
        return None
    vertex_index = {vw: i for i, vw in enumerate(polytope.vertex_weights)}
    ncy = len(polytope.cycles)
    m = [
        [
            Fraction(sum(1 for (cw, _) in polytope.cycles[c] if cw == w), len(polytope.cycles[c]))
            for c in range(ncy)
        ]
        for w in range(len(mu.weights))
    ]

    def decompose(vec: tuple[Fraction, ...]) -> dict[int, Fraction] | None:
        if vec in vertex_index:
            return {vertex_index[vec]: Fraction(1)}
        support = [c for c in range(ncy) if vec[c] > 0]
        sub = [[row[c] for c in support] for row in m]
        kernel = _linalg.nullspace(sub)
        if not kernel:
            return None  # independent support but not a listed vertex: outside
        d = [Fraction(0)] * ncy
        for c, v in zip(support, kernel[0]):
            d[c] = v
        steps_pos = [vec[c] / -d[c] for c in support if d[c] < 0]
        steps_neg = [vec[c] / d[c] for c in support if d[c] > 0]
        if not steps_pos or not steps_neg:
            return None  # unbounded direction cannot occur in a polytope
        tp, tn = min(steps_pos), min(steps_neg)
        plus = tuple(v + tp * dv for v, dv in zip(vec, d))
        minus = tuple(v - tn * dv for v, dv in zip(vec, d))
        left, right = decompose(plus), decompose(minus)
        if left is None or right is None:
            return None
        alpha = tn / (tp + tn)
        out: dict[int, Fraction] = {}
        for idx, c in left.items():
            out[idx] = out.get(idx, Fraction(0)) + alpha * c
        for idx, c in right.items():
            out[idx] = out.get(idx, Fraction(0)) + (1 - alpha) * c
        return {i: c for i, c in out.items() if c != 0}

    return decompose(lam)


def _deltas(rds: BundleRDS, delta) -> list[Fraction]:
    if isinstance(delta, (Fraction, int)):
        return [Fraction(delta)] * rds.size
    out = [Fraction(d) for d in delta]
    if len(out) != rds.size:
        raise ValueError("need one radius per base point")
    return out


def bowen_ball(
    rds: BundleRDS, omega: int, y: Point, n: int, delta
) -> frozenset:
    """Points staying strictly within the per-step radii of the orbit of
    ``y`` for ``n`` steps (the intersection of pulled-back open balls)."""
    space = rds.requires_metric()
    deltas = _deltas(rds, delta)
    if y not in rds.fibers[omega]:
        raise PreconditionError("center_in_fiber", f"{y!r} not in fiber {omega}")
    ball = []
    for x in rds.fibers[omega]:
        xi, yi, w = x, y, omega
        ok = True
        for _ in range(n):
            if not space.d(xi, yi) < deltas[w]:
                ok = False
                break
            xi, yi, w = rds.apply(w, xi), rds.apply(w, yi), rds.base.theta[w]
        if ok:
            ball.append(x)
    return frozenset(ball)


def lebesgue_number(rds: BundleRDS, cover: RandomCover, omega: int) -> Fraction | None:
    """Largest radius such that every open ball of that radius in the fiber
    lies inside some cover element (exact finite minimax).  ``None`` means
    unconstrained (some element contains the whole fiber)."""
    space = rds.requires_metric()
    best_over_fiber: Fraction | None = None
    for z in rds.fibers[omega]:
        best_here: Fraction | None = Fraction(0)
        for sec in cover.sections(omega):
            outside = rds.fibers[omega] - sec
            if not outside:
                best_here = None
                break
            reach = min(space.d(z, w) for w in outside)
            if best_here is not None and reach > best_here:
                best_here = reach
        if best_here is not None and (best_over_fiber is None or best_here < best_over_fiber):
            best_over_fiber = best_here
    return best_over_fiber


def _separation_at_least_one(rds: BundleRDS, omega: int, x: Point, y: Point, n: int, deltas) -> bool:
    # normalized orbit distance >= 1, i.e. some step reaches its radius
    space = rds.space
    xi, yi, w = x, y, omega
    for _ in range(n):
        if space.d(xi, yi) >= deltas[w]:
            return True
        xi, yi, w = rds.apply(w, xi), rds.apply(w, yi), rds.base.theta[w]
    return False


@dataclass(frozen=True, eq=False)
class SeparatedEmpirical:
    """Separated-set empirical construction on the pair system.

    Per base point: the iterated conditioning cover element with the largest
    relative count, a deterministic anchor inside it, and a greedy maximal
    separated subset.  ``sigma`` pairs the anchor with every separated point;
    ``mu_n`` is its n-step running average, and ``mu_limit`` the exact Cesaro
    projection standing in for a subsequence accumulation point.
    """

    n: int
    deltas: tuple[Fraction, ...]
    chosen: tuple[frozenset, ...]
    anchors: tuple[Point, ...]
    separated: tuple[tuple[Point, ...], ...]
    counts: tuple[int, ...]
    pair: PairSystem
    sigma: FiberedMeasure
    mu_n: FiberedMeasure
    mu_n_defect: Fraction
    mu_limit: FiberedMeasure
    support_mass_mu_n: Fraction
    support_mass_limit: Fraction
    lebesgue_ok: bool
    card_ok: bool
    # when the refining cover is a partition: does every section of its
    # depth-n iterate hold at most one separated point?  The entropy-equals-
    # log-cardinality identity for the empirical measure needs this; callers
    # must skip that identity when the flag is False.  None for non-partitions.
    atoms_isolate_separated: bool | None


def _pair_support_mass(mu: FiberedMeasure, q: RandomCover) -> Fraction:
    out = Fraction(0)
    for w in range(mu.size):
        secs = q.sections(w)
        for (x, y), v in mu.weights[w].items():
            if any(x in sec and y in sec for sec in secs):
                out += v
    return out


def separated_empirical(
    rds: BundleRDS,
    p: RandomCover,
    q: RandomCover,
    n: int,
    delta,
    budgets: Budgets = DEFAULTS,
) -> SeparatedEmpirical:
    """Build the pair-system empirical measure witnessing that conditioned
    complexity is captured by measure-theoretic entropy.

    The separated-set cardinality dominates the relative count whenever the
    radii are fiberwise Lebesgue-number witnesses for ``p`` (every small ball
    fits in one element); ``lebesgue_ok`` records whether that gate held and
    ``card_ok`` whether the domination did.
    """
    rds.requires_metric()
    deltas = _deltas(rds, delta)
    pn = iterate_cover(p, rds, n, budgets)
    qn = iterate_cover(q, rds, n, budgets)
    pair = pair_system(rds)

    chosen: list[frozenset] = []
    anchors: list[Point] = []
    separated: list[tuple[Point, ...]] = []
    counts: list[int] = []
    sigma_weights: list[dict[Point, Fraction]] = [{} for _ in range(rds.size)]
    for w in range(rds.size):
        best_sec, best_count = None, 0
        for elem in qn.elements:
            if not elem.sections[w]:
                continue
            c = minimal_subcover(elem, pn, w, rds)
            if c > best_count:
                best_sec, best_count = elem.sections[w], c
        assert best_sec is not None  # covers have a nonempty section somewhere
        anchor = sort_points(best_sec)[0]
        sep: list[Point] = []
        for x in sort_points(best_sec):
            if all(_separation_at_least_one(rds, w, x, y, n, deltas) for y in sep):
                sep.append(x)
        chosen.append(best_sec)
        anchors.append(anchor)
        separated.append(tuple(sep))
        counts.append(best_count)
        share = rds.base.prob[w] / len(sep) if sep else Fraction(0)
        for y in sep:
            sigma_weights[w][(anchor, y)] = share

    sigma = FiberedMeasure(tuple(sigma_weights))
    terms = []
    current = sigma
    for _ in range(n):
        terms.append((Fraction(1, n), current))
        current = skew_pushforward(current, pair.system)
    mu_n = mix(terms)
    mu_limit = cesaro_limit(mu_n, pair.system)

    etas = [lebesgue_number(rds, p, w) for w in range(rds.size)]
    lebesgue_ok = all(eta is None or deltas[w] <= eta for w, eta in enumerate(etas))
    card_ok = all(len(separated[w]) >= counts[w] for w in range(rds.size))
    isolate: bool | None = None
    if isinstance(p, RandomPartition):
        isolate = all(
            sum(1 for y in separated[w] if y in sec) <= 1
            for w in range(rds.size)
            for sec in pn.sections(w)
        )
    return SeparatedEmpirical(
        n=n,
        deltas=tuple(deltas),
        chosen=tuple(chosen),
        anchors=tuple(anchors),
        separated=tuple(separated),
        counts=tuple(counts),
        pair=pair,
        sigma=sigma,
        mu_n=mu_n,
        mu_n_defect=invariance_defect(mu_n, pair.system),
        mu_limit=mu_limit,
        support_mass_mu_n=_pair_support_mass(mu_n, q),
        support_mass_limit=_pair_support_mass(mu_limit, q),
        lebesgue_ok=lebesgue_ok,
        card_ok=card_ok,
        atoms_isolate_separated=isolate,
    )


@dataclass(frozen=True, eq=False)
class DiagonalMeasureResult:
    """Invariant pair measure concentrating on the diagonal.

    ``support_diagonal`` is None when the final chain stage does not have
    vanishing (zero) section diameters, in which case the diagonal claim is
    not asserted.  ``entropy_values`` is the conditioned sequence against the
    first-coordinate algebra; on diagonal support every term is exactly zero
    because the second coordinate is determined by the first.
    """

    measure: FiberedMeasure
    stages: tuple[SeparatedEmpirical, ...]
    invariance: Fraction
    support_diagonal: bool | None
    entropy: EntropyEstimate
    entropy_zero: bool


def diagonal_measure(
    rds: BundleRDS,
    cover_chain: Sequence[RandomCover],
    p_chain: Sequence[RandomCover],
    n: int,
    delta,
    entropy_depth: int | None = None,
    budgets: Budgets = DEFAULTS,
) -> DiagonalMeasureResult:
    """Run the separated-set construction along a refining conditioning
    chain and take the exact finite-model limit of the final stage."""
    if len(cover_chain) != len(p_chain) or not cover_chain:
        raise ValueError("need matching nonempty chains")
    for earlier, later in zip(cover_chain, cover_chain[1:]):
        if not refines(later, earlier, fiberwise=True):
            raise PreconditionError("refining_chain", "conditioning chain must refine in order")
    stages = tuple(
        separated_empirical(rds, pc, qc, n, delta, budgets)
        for pc, qc in zip(p_chain, cover_chain)
    )
    last = stages[-1]
    m = last.mu_limit
    final_cover = cover_chain[-1]
    vanishing = all(
        len(sec) <= 1 for e in final_cover.elements for sec in e.sections
    )
    support_diagonal: bool | None = None
    if vanishing:
        support_diagonal = all(
            x == y for w in range(m.size) for (x, y), v in m.weights[w].items() if v != 0
        )
    first_algebra = SigmaAlgebra(pullback_cover(last.pair.first, state_partition(rds)))
    est = transformation_relative_entropy_sequence(
        m, first_algebra, last.pair.system, entropy_depth or n, budgets
    )
    return DiagonalMeasureResult(
        measure=m,
        stages=stages,
        invariance=invariance_defect(m, last.pair.system),
        support_diagonal=support_diagonal,
        entropy=est,
        entropy_zero=all(v == 0.0 for v in est.values),
    )
