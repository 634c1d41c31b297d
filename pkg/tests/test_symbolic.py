"""Driven subshift backend: word counts against recurrence and enumeration
oracles, cylinder-cover sequences against the set-cover cross-check."""

import math
import random
from fractions import Fraction

import pytest

from rdstail import (
    BudgetExceededError,
    Budgets,
    CylinderCoverSpec,
    DrivingSystem,
    PreconditionError,
    RandomSFT,
    SFTComponent,
    admissible_word_count,
    relative_word_count,
    sft_tail_sequence,
)
from rdstail.symbolic import enumerate_words, relative_word_count_enumerated

POINT_BASE = DrivingSystem((Fraction(1),), (0,))
FULL2 = SFTComponent(2, (((1, 1), (1, 1)),))
GOLDEN = SFTComponent(2, (((1, 1), (1, 0)),))


def golden_counts(n_max: int) -> list[int]:
    """Independent oracle: the two-term recurrence with w1=2, w2=3."""
    w = [2, 3]
    while len(w) < n_max:
        w.append(w[-1] + w[-2])
    return w[:n_max]


def test_full_shift_counts():
    sft = RandomSFT(POINT_BASE, (FULL2,))
    assert admissible_word_count(sft, 0, 0, 1) == 2
    assert admissible_word_count(sft, 0, 0, 5) == 32


def test_golden_mean_counts_match_recurrence():
    sft = RandomSFT(POINT_BASE, (GOLDEN,))
    oracle = golden_counts(20)
    for n in range(1, 21):
        assert admissible_word_count(sft, 0, 0, n) == oracle[n - 1]
    assert admissible_word_count(sft, 0, 0, 5) == 13
    assert oracle[19] == 17711


def test_word_count_matches_enumeration_on_driven_base():
    rng = random.Random(7)
    for _ in range(10):
        size = rng.randint(1, 3)
        theta = [rng.randrange(size) for _ in range(size)]
        cycles_mass = [Fraction(1, size)] * size
        # make the base mass uniform-invariant only when theta is a bijection;
        # the word count does not involve the masses at all
        base = DrivingSystem(tuple([Fraction(1, size)] * size), tuple(theta)) if sorted(theta) == list(range(size)) else DrivingSystem(tuple([Fraction(1)] + [Fraction(0)] * (size - 1)), tuple(theta))
        alphabet = rng.randint(2, 3)
        mats = []
        for _ in range(size):
            while True:
                m = tuple(
                    tuple(rng.randint(0, 1) for _ in range(alphabet)) for _ in range(alphabet)
                )
                if all(any(row) for row in m) and all(
                    any(m[i][j] for i in range(alphabet)) for j in range(alphabet)
                ):
                    mats.append(m)
                    break
        sft = RandomSFT(base, (SFTComponent(alphabet, tuple(mats)),))
        assert sft.validate() == []
        for omega in range(size):
            for n in range(1, 6):
                assert admissible_word_count(sft, 0, omega, n) == len(
                    enumerate_words(sft, 0, omega, n)
                )


def test_submultiplicativity_and_full_shift_equality():
    sft = RandomSFT(POINT_BASE, (GOLDEN,))
    for n in range(1, 10):
        assert admissible_word_count(sft, 0, 0, n + 1) <= 2 * admissible_word_count(sft, 0, 0, n)
    full = RandomSFT(POINT_BASE, (FULL2,))
    for n in range(1, 6):
        for m in range(1, 6):
            assert admissible_word_count(full, 0, 0, n + m) == admissible_word_count(
                full, 0, 0, n
            ) * admissible_word_count(full, 0, 0, m)


def test_two_full_shifts_product_gives_log2():
    sft = RandomSFT(POINT_BASE, (FULL2, FULL2))
    est = sft_tail_sequence(
        sft, CylinderCoverSpec(frozenset({0, 1}), 1), CylinderCoverSpec(frozenset({0}), 1), 12
    )
    assert est.subadditive_ok
    assert all(abs(r - math.log(2)) <= 1e-9 for r in est.ratios)


def test_equal_specs_give_exact_zero():
    sft = RandomSFT(POINT_BASE, (GOLDEN,))
    spec = CylinderCoverSpec(frozenset({0}), 1)
    est = sft_tail_sequence(sft, spec, spec, 10)
    assert est.values == tuple(0.0 for _ in range(10))


def test_golden_mean_against_trivial_conditioning():
    sft = RandomSFT(POINT_BASE, (GOLDEN,))
    est = sft_tail_sequence(
        sft, CylinderCoverSpec(frozenset({0}), 1), CylinderCoverSpec(frozenset(), 1), 20
    )
    oracle = golden_counts(20)
    for n in range(1, 21):
        assert abs(est.values[n - 1] - math.log(oracle[n - 1])) <= 1e-9
    assert abs(est.ratios[19] - math.log(17711) / 20) <= 1e-9
    assert abs(est.ratios[19] - math.log((1 + math.sqrt(5)) / 2)) < 0.02


def test_refinement_precondition():
    sft = RandomSFT(POINT_BASE, (FULL2, FULL2))
    with pytest.raises(PreconditionError):
        relative_word_count(
            sft, CylinderCoverSpec(frozenset({0}), 1), CylinderCoverSpec(frozenset({1}), 1), 2, 0
        )


def _random_valid_matrix(rng, alphabet):
    while True:
        m = tuple(tuple(rng.randint(0, 1) for _ in range(alphabet)) for _ in range(alphabet))
        if all(any(row) for row in m) and all(
            any(m[i][j] for i in range(alphabet)) for j in range(alphabet)
        ):
            return m


def test_matrix_counts_match_enumeration_cross_check():
    rng = random.Random(23)
    for _ in range(12):
        size = rng.randint(1, 2)
        theta = list(range(size))
        rng.shuffle(theta)
        base = DrivingSystem(tuple([Fraction(1, size)] * size), tuple(theta))
        comps = tuple(
            SFTComponent(2, tuple(_random_valid_matrix(rng, 2) for _ in range(size)))
            for _ in range(rng.randint(1, 2))
        )
        sft = RandomSFT(base, comps)
        all_comps = frozenset(range(len(comps)))
        q_opts = [frozenset(), all_comps, frozenset({0})]
        for q_members in q_opts:
            if not q_members <= all_comps:
                continue
            r_spec = CylinderCoverSpec(all_comps, rng.choice([1, 2]))
            q_spec = CylinderCoverSpec(q_members, rng.choice([1, 2]))
            for omega in range(size):
                for n in range(1, 5):
                    fast = relative_word_count(sft, r_spec, q_spec, n, omega)
                    slow = relative_word_count_enumerated(sft, r_spec, q_spec, n, omega)
                    assert fast == slow


def test_sequences_subadditive_on_random_driven_shifts():
    rng = random.Random(314)
    for _ in range(60):
        size = rng.randint(1, 3)
        theta = list(range(size))
        rng.shuffle(theta)
        base = DrivingSystem(tuple([Fraction(1, size)] * size), tuple(theta))
        ncomp = rng.randint(1, 2)
        comps = tuple(
            SFTComponent(2, tuple(_random_valid_matrix(rng, 2) for _ in range(size)))
            for _ in range(ncomp)
        )
        sft = RandomSFT(base, comps)
        allc = frozenset(range(ncomp))
        r = CylinderCoverSpec(allc, rng.choice([1, 2]))
        q = CylinderCoverSpec(rng.choice([frozenset(), allc, frozenset({0})]), rng.choice([1, 2]))
        assert sft_tail_sequence(sft, r, q, 8).subadditive_ok


def test_enumeration_budget():
    sft = RandomSFT(POINT_BASE, (FULL2, FULL2))
    tiny = Budgets(sft_enumeration=8)
    with pytest.raises(BudgetExceededError):
        relative_word_count_enumerated(
            sft,
            CylinderCoverSpec(frozenset({0, 1}), 1),
            CylinderCoverSpec(frozenset(), 1),
            6,
            0,
            tiny,
        )


def test_validate_catches_dead_symbols():
    dead_row = SFTComponent(2, (((0, 0), (1, 1)),))
    sft = RandomSFT(POINT_BASE, (dead_row,))
    assert any("row 0" in v for v in sft.validate())
    dead_col = SFTComponent(2, (((1, 0), (1, 0)),))
    assert any("column 1" in v for v in RandomSFT(POINT_BASE, (dead_col,)).validate())
