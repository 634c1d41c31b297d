"""The verification suites, end to end.

Each suite is a deterministic function of its seed: randomized scenarios
exercise the count inequalities and entropy lemmas, the theorem suite runs
the named instances in their degenerate exact form plus the finite-depth
proof skeleton, and the principal-extension suite certifies conservation of
the tail entropy across three packaged extensions.

The same suites are reachable from the command line:

    rdstail verify --suite cover --seed 1 --trials 100 --out out/
"""

from rdstail import (
    run_cover_suite,
    run_entropy_suite,
    run_invariant_suite,
    run_principal_suite,
    run_theorem_suite,
)

for report in (
    run_cover_suite(seed=1, trials=40),
    run_entropy_suite(seed=1, trials=40),
    run_invariant_suite(seed=1, trials=40),
    run_theorem_suite(),
    run_principal_suite(),
):
    print(report.summary())
    print()

print("reports serialize deterministically; rerunning any suite with the same")
print("seed reproduces the JSON byte for byte.")
