"""Small hand-checkable systems used by the tests, demos, and packaged
scenario files.

``swap_system``: two base points exchanged by the base map, fibers {a,b} and
{c,d}; the first fiber map collapses both points onto c, the second sends c
back to a and d to b.  Its skew map has the single cycle (0,a) -> (1,c) ->
(0,a), with b and d transient, which makes invariant-measure questions exact
one-liners.

``cycle_system``: a single base point whose fiber is one four-cycle; the
canonical positive-recurrence example with a unique invariant measure.
"""

from __future__ import annotations

from fractions import Fraction

from .model import BundleRDS, DrivingSystem, FactorMap, MetricSpace


def swap_system(with_metric: bool = True) -> BundleRDS:
    base = DrivingSystem(prob=(Fraction(1, 2), Fraction(1, 2)), theta=(1, 0))
    fibers = (frozenset({"a", "b"}), frozenset({"c", "d"}))
    maps = ({"a": "c", "b": "c"}, {"c": "a", "d": "b"})
    space = MetricSpace.discrete(("a", "b", "c", "d")) if with_metric else None
    return BundleRDS(base=base, fibers=fibers, maps=maps, space=space)


def cycle_system(length: int = 4, with_metric: bool = True) -> BundleRDS:
    base = DrivingSystem(prob=(Fraction(1),), theta=(0,))
    pts = tuple(f"p{i}" for i in range(length))
    fibers = (frozenset(pts),)
    maps = ({pts[i]: pts[(i + 1) % length] for i in range(length)},)
    space = MetricSpace.discrete(pts) if with_metric else None
    return BundleRDS(base=base, fibers=fibers, maps=maps, space=space)


def one_point_system(base: DrivingSystem) -> BundleRDS:
    """Single-point fibers over a given base: the unit for products."""
    fibers = tuple(frozenset({"*"}) for _ in range(base.size))
    maps = tuple({"*": "*"} for _ in range(base.size))
    return BundleRDS(base=base, fibers=fibers, maps=maps, space=MetricSpace.discrete(("*",)))


def extend_with_tags(rds: BundleRDS, tags: int, rotate: bool) -> FactorMap:
    """Extension with fibers ``fiber x {t0..t_{tags-1}}``; the tag coordinate
    is either frozen or cyclically rotated each step.  Returns the projection
    factor map from the extension onto the input system."""
    names = tuple(f"t{i}" for i in range(tags))
    fibers = tuple(
        frozenset((x, t) for x in rds.fibers[w] for t in names) for w in range(rds.size)
    )

    def step(t: str) -> str:
        if not rotate:
            return t
        return names[(names.index(t) + 1) % tags]

    maps = tuple(
        {(x, t): (rds.apply(w, x), step(t)) for (x, t) in fibers[w]} for w in range(rds.size)
    )
    space = None
    if rds.space is not None:
        pts = tuple((x, t) for x in rds.space.points for t in names)
        dist = {
            ((x, t), (y, u)): max(rds.space.d(x, y), Fraction(0) if t == u else Fraction(1))
            for (x, t) in pts
            for (y, u) in pts
        }
        space = MetricSpace(pts, dist)
    source = BundleRDS(base=rds.base, fibers=fibers, maps=maps, space=space)
    proj = tuple({(x, t): x for (x, t) in fibers[w]} for w in range(rds.size))
    return FactorMap(source=source, target=rds, maps=proj)
