"""Batch command-line surface: load a scenario, dispatch one command, emit
CSV/JSON artifacts plus a run manifest.

Identical (scenario, command, flags, seed) runs produce byte-identical
artifacts; the manifest records the sha256 of every output so reruns can be
verified.  Exit codes: 0 success, 1 a verification check failed, 2 unknown
name or parse/validation error, 3 a budget was exceeded (partial artifacts
are still written).  Budgets come from ``RDSTAIL_BUDGETS`` and can be
overridden per run with ``--budget name=value``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .budgets import Budgets, from_env, parse_overrides
from .counting import count_profile
from .covers import (
    RandomCover,
    RandomPartition,
    SigmaAlgebra,
    fiber_partition,
    point_partition,
    state_partition,
    trivial_cover,
)
from .errors import BudgetExceededError, RdstailError
from .invariant import cesaro_limit, diagonal_measure, lift_invariant, separated_empirical, vertex_enumeration
from .measures import FiberedMeasure, conditional_entropy, relative_entropy_sequence
from .model import BundleRDS, validate_system
from .scenario import Scenario, ScenarioError, load_scenario, measure_payload
from .symbolic import CylinderCoverSpec, sft_tail_sequence
from .tail_entropy import EntropyEstimate, tail_entropy_estimate, tail_entropy_total
from .verify import run_suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_BUDGET = 3

COLUMN_CONVENTION = (
    "every value column header names the producing operation; "
    "rows carry (scenario object names, omega or n index, value)"
)

_BUILTINS = {
    "@points": point_partition,
    "@trivial": trivial_cover,
    "@fibers": fiber_partition,
    "@states": state_partition,
}


class _Run:
    """Collects artifacts, then writes them with a digest manifest."""

    def __init__(self, out_dir: str, command: str, args: dict, budgets: Budgets, scenario_digest: str | None):
        self.out_dir = out_dir
        self.command = command
        self.args = args
        self.budgets = budgets
        self.scenario_digest = scenario_digest
        self.files: dict[str, bytes] = {}
        self.error: str | None = None

    def add_json(self, name: str, payload) -> None:
        self.files[name] = (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode()

    def add_text(self, name: str, text: str) -> None:
        self.files[name] = text.encode()

    def add_csv(self, name: str, header: list[str], rows: list[list]) -> None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        self.files[name] = buf.getvalue().encode()

    def flush(self) -> None:
        os.makedirs(self.out_dir, exist_ok=True)
        for name, blob in self.files.items():
            with open(os.path.join(self.out_dir, name), "wb") as fh:
                fh.write(blob)
        manifest = {
            "command": self.command,
            "args": self.args,
            "budgets": {k: getattr(self.budgets, k) for k in vars(self.budgets)},
            "version": __version__,
            "scenario_digest": self.scenario_digest,
            "column_convention": COLUMN_CONVENTION,
            "outputs": {name: hashlib.sha256(blob).hexdigest() for name, blob in self.files.items()},
            "error": self.error,
        }
        with open(os.path.join(self.out_dir, "manifest.json"), "wb") as fh:
            fh.write((json.dumps(manifest, sort_keys=True, indent=2) + "\n").encode())


def _resolve_cover(sc: Scenario, name: str, system: str | None) -> tuple[RandomCover, BundleRDS, str]:
    if name.startswith("@"):
        if name not in _BUILTINS:
            raise ScenarioError(f"unknown builtin cover {name!r} (have {sorted(_BUILTINS)})")
        if system is None:
            raise ScenarioError(f"builtin cover {name!r} needs --system")
        if system not in sc.systems:
            raise ScenarioError(f"unknown system {system!r}")
        rds = sc.systems[system]
        return _BUILTINS[name](rds), rds, system
    if name not in sc.covers:
        raise ScenarioError(f"unknown cover {name!r}")
    return sc.covers[name], sc.system_of_cover(name), sc.cover_system[name]


def _resolve_sigma(sc: Scenario, name: str, system_name: str) -> SigmaAlgebra:
    cover, _, sysname = _resolve_cover(sc, name, system_name)
    if sysname != system_name:
        raise ScenarioError(f"sigma algebra {name!r} lives on {sysname!r}, expected {system_name!r}")
    if not isinstance(cover, RandomPartition):
        raise ScenarioError(f"sigma algebra {name!r} must come from a partition")
    return SigmaAlgebra(cover)


def _estimate_rows(label: str, names: dict[str, str], est: EntropyEstimate) -> tuple[list[str], list[list]]:
    header = [*names.keys(), "n", "integrated_log_count", "ratio", "running_inf"]
    rows = [
        [*names.values(), n + 1, est.values[n], est.ratios[n], est.running_inf[n]]
        for n in range(est.n_max)
    ]
    return header, rows


def _estimate_payload(est: EntropyEstimate) -> dict:
    return {
        "values": list(est.values),
        "ratios": list(est.ratios),
        "running_inf": list(est.running_inf),
        "n_max": est.n_max,
        "requested": est.requested,
        "subadditive_ok": est.subadditive_ok,
        "value": est.value,
    }


def _measure_rows(scenario: str, name: str, mu: FiberedMeasure) -> tuple[list[str], list[list]]:
    header = ["scenario", "measure", "omega", "point", "mass"]
    rows = []
    for w in range(mu.size):
        for x in sorted(mu.weights[w], key=repr):
            rows.append([scenario, name, w, repr(x), str(mu.weights[w][x])])
    return header, rows


def _parse_cylinder_spec(text: str) -> CylinderCoverSpec:
    comps, _, depth = text.partition(":")
    comps = comps.strip()
    members = frozenset(int(c) for c in comps.split(",") if c.strip() not in ("", "-"))
    return CylinderCoverSpec(components=members, depth=int(depth) if depth else 1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rdstail",
        description="exact desk-scale calculus for driven fiberwise dynamics",
    )
    parser.add_argument("--budget", action="append", default=[], metavar="NAME=VALUE",
                        help="override a budget for this run (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scenario_required=True):
        p.add_argument("--scenario", required=scenario_required, help="scenario JSON file")
        p.add_argument("--out", default="out", help="artifact directory (default: ./out)")
        p.add_argument("--system", default=None, help="system name for builtin covers (@points etc.)")

    common(sub.add_parser("validate", help="load and validate a scenario"))

    p = sub.add_parser("count", help="relative counts of iterated covers")
    common(p)
    p.add_argument("--r", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("tail", help="integrated log-count sequence")
    common(p)
    p.add_argument("--r", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--nmax", type=int, required=True)

    p = sub.add_parser("tail-total", help="min over conditioning family of max over refining family")
    common(p)
    p.add_argument("--qfamily", required=True, help="comma-separated cover names")
    p.add_argument("--rfamily", required=True, help="comma-separated cover names")
    p.add_argument("--nmax", type=int, required=True)

    p = sub.add_parser("sft-tail", help="cylinder-cover sequence on a driven subshift")
    common(p)
    p.add_argument("--sft", required=True)
    p.add_argument("--rspec", required=True, help="components:depth, e.g. 0,1:1 (use -:1 for trivial)")
    p.add_argument("--qspec", required=True)
    p.add_argument("--nmax", type=int, required=True)

    p = sub.add_parser("entropy", help="conditional entropy, or its depth sequence with --nmax")
    common(p)
    p.add_argument("--mu", required=True)
    p.add_argument("--r", required=True)
    p.add_argument("--sigma", required=True, help="partition name or builtin (@fibers, @states)")
    p.add_argument("--nmax", type=int, default=None)

    p = sub.add_parser("invariant", help="invariant-measure machinery")
    common(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--vertices", action="store_true")
    g.add_argument("--cesaro", metavar="MU")
    g.add_argument("--lift", nargs=2, metavar=("PI", "MU"))

    p = sub.add_parser("construct", help="empirical pair-measure constructions")
    common(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--separated", action="store_true")
    g.add_argument("--diagonal", action="store_true")
    p.add_argument("--p", dest="p_cover", help="refining cover (or comma chain for --diagonal)")
    p.add_argument("--q", dest="q_cover", help="conditioning cover (or comma chain for --diagonal)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", required=True, help="exact rational radius, e.g. 1/2")

    p = sub.add_parser("verify", help="run a verification suite")
    common(p, scenario_required=False)
    p.add_argument("--suite", required=True, choices=["cover", "entropy", "invariant", "theorem", "principal"])
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--trials", type=int, default=100)
    return parser


def _dispatch(args: argparse.Namespace, budgets: Budgets, run: _Run, sc: Scenario | None) -> int:
    name = args.command
    if name == "validate":
        report = {}
        for sysname, rds in sc.systems.items():
            report[sysname] = validate_system(rds)
        run.add_json("validate.json", {"violations": report, "ok": all(not v for v in report.values())})
        return EXIT_OK

    if name == "count":
        r, rds, sysname = _resolve_cover(sc, args.r, args.system)
        q, rds_q, _ = _resolve_cover(sc, args.q, sysname)
        if rds_q is not rds:
            raise ScenarioError("covers live on different systems")
        rows = []
        for n in range(1, args.n + 1):
            prof = count_profile(rds, r, q, n, budgets)
            rows.extend([sysname, args.r, args.q, w, n, c] for w, c in enumerate(prof.per_omega))
        run.add_csv("count.csv", ["system", "r", "q", "omega", "n", "relative_count"], rows)
        run.add_json("count.json", {"rows": [[*row] for row in rows]})
        return EXIT_OK

    if name == "tail":
        r, rds, sysname = _resolve_cover(sc, args.r, args.system)
        q, rds_q, _ = _resolve_cover(sc, args.q, sysname)
        if rds_q is not rds:
            raise ScenarioError("covers live on different systems")
        est = tail_entropy_estimate(rds, r, q, args.nmax, budgets)
        header, rows = _estimate_rows("tail", {"system": sysname, "r": args.r, "q": args.q}, est)
        run.add_csv("tail.csv", header, rows)
        run.add_json("tail.json", _estimate_payload(est))
        return EXIT_OK

    if name == "tail-total":
        q_names = [s for s in args.qfamily.split(",") if s]
        r_names = [s for s in args.rfamily.split(",") if s]
        rds, sysname = None, args.system

        def resolve_family(names):
            nonlocal rds, sysname
            out = []
            for nm in names:
                c, c_sys, c_sysname = _resolve_cover(sc, nm, sysname)
                if rds is None:
                    rds, sysname = c_sys, c_sysname
                elif c_sys is not rds:
                    raise ScenarioError("family covers live on different systems")
                out.append(c)
            return out

        q_fam = resolve_family(q_names)
        r_fam = resolve_family(r_names)
        value = tail_entropy_total(rds, q_fam, r_fam, args.nmax, budgets)
        rows = []
        for nm, q in zip(q_names, q_fam):
            for rn, r in zip(r_names, r_fam):
                est = tail_entropy_estimate(rds, r, q, args.nmax, budgets)
                rows.append([sysname, nm, rn, args.nmax, est.value])
        run.add_csv("tail_total.csv", ["system", "q", "r", "n_max", "tail_estimate"], rows)
        run.add_json("tail_total.json", {"value": value, "n_max": args.nmax})
        return EXIT_OK

    if name == "sft-tail":
        if args.sft not in sc.sfts:
            raise ScenarioError(f"unknown sft {args.sft!r}")
        sft = sc.sfts[args.sft]
        est = sft_tail_sequence(sft, _parse_cylinder_spec(args.rspec), _parse_cylinder_spec(args.qspec), args.nmax, budgets)
        header, rows = _estimate_rows("sft", {"sft": args.sft, "rspec": args.rspec, "qspec": args.qspec}, est)
        run.add_csv("sft_tail.csv", header, rows)
        run.add_json("sft_tail.json", _estimate_payload(est))
        return EXIT_OK

    if name == "entropy":
        if args.mu not in sc.measures:
            raise ScenarioError(f"unknown measure {args.mu!r}")
        mu = sc.measures[args.mu]
        sysname = sc.measure_system[args.mu]
        rds = sc.systems[sysname]
        r, rds_r, _ = _resolve_cover(sc, args.r, sysname)
        if rds_r is not rds:
            raise ScenarioError("partition lives on a different system than the measure")
        if not isinstance(r, RandomPartition):
            raise ScenarioError(f"--r {args.r!r} must be a partition")
        sigma = _resolve_sigma(sc, args.sigma, sysname)
        if args.nmax is None:
            value = conditional_entropy(mu, r, sigma)
            run.add_csv(
                "entropy.csv",
                ["system", "mu", "r", "sigma", "conditional_entropy"],
                [[sysname, args.mu, args.r, args.sigma, value]],
            )
            run.add_json("entropy.json", {"conditional_entropy": value})
        else:
            est = relative_entropy_sequence(mu, r, sigma, rds, args.nmax, budgets)
            header, rows = _estimate_rows(
                "entropy", {"system": sysname, "mu": args.mu, "r": args.r, "sigma": args.sigma}, est
            )
            run.add_csv("entropy.csv", header, rows)
            run.add_json("entropy.json", _estimate_payload(est))
        return EXIT_OK

    if name == "invariant":
        if args.vertices:
            if args.system is None or args.system not in sc.systems:
                raise ScenarioError("--vertices needs --system NAME")
            rds = sc.systems[args.system]
            poly = vertex_enumeration(rds, budgets)
            rows, payloads = [], []
            for i, v in enumerate(poly.vertices):
                payloads.append(measure_payload(v))
                h, r = _measure_rows(args.system, f"vertex{i}", v)
                rows.extend(r)
            run.add_csv("vertices.csv", ["scenario", "measure", "omega", "point", "mass"], rows)
            run.add_json("vertices.json", {"count": len(poly.vertices), "vertices": payloads})
            return EXIT_OK
        if args.cesaro is not None:
            if args.cesaro not in sc.measures:
                raise ScenarioError(f"unknown measure {args.cesaro!r}")
            sysname = sc.measure_system[args.cesaro]
            out = cesaro_limit(sc.measures[args.cesaro], sc.systems[sysname])
            header, rows = _measure_rows(sysname, "cesaro", out)
            run.add_csv("cesaro.csv", header, rows)
            run.add_json("cesaro.json", measure_payload(out))
            return EXIT_OK
        pi_name, mu_name = args.lift
        if pi_name not in sc.factor_maps:
            raise ScenarioError(f"unknown factor map {pi_name!r}")
        if mu_name not in sc.measures:
            raise ScenarioError(f"unknown measure {mu_name!r}")
        lifted = lift_invariant(sc.factor_maps[pi_name], sc.measures[mu_name])
        header, rows = _measure_rows(pi_name, "lift", lifted)
        run.add_csv("lift.csv", header, rows)
        run.add_json("lift.json", measure_payload(lifted))
        return EXIT_OK

    if name == "construct":
        delta = Fraction(args.delta)
        if args.separated:
            p, rds, sysname = _resolve_cover(sc, args.p_cover, args.system)
            q, rds_q, _ = _resolve_cover(sc, args.q_cover, sysname)
            if rds_q is not rds:
                raise ScenarioError("covers live on different systems")
            se = separated_empirical(rds, p, q, args.n, delta, budgets)
            run.add_json(
                "separated.json",
                {
                    "counts": list(se.counts),
                    "cardinalities": [len(s) for s in se.separated],
                    "lebesgue_ok": se.lebesgue_ok,
                    "card_ok": se.card_ok,
                    "mu_n_defect": str(se.mu_n_defect),
                    "support_mass_mu_n": str(se.support_mass_mu_n),
                    "support_mass_limit": str(se.support_mass_limit),
                    "measure_limit": measure_payload(se.mu_limit),
                },
            )
            header, rows = _measure_rows(sysname, "mu_n", se.mu_n)
            run.add_csv("separated_mu_n.csv", header, rows)
            return EXIT_OK
        chain_names = [s for s in (args.q_cover or "").split(",") if s]
        p_names = [s for s in (args.p_cover or "").split(",") if s]
        if not chain_names or len(chain_names) != len(p_names):
            raise ScenarioError("--diagonal needs matching comma-separated --p and --q chains")
        chain, p_chain, rds, sysname = [], [], None, None
        for nm in chain_names:
            c, r_sys, sysname = _resolve_cover(sc, nm, args.system)
            rds = r_sys
            chain.append(c)
        for nm in p_names:
            c, r_sys, _ = _resolve_cover(sc, nm, sysname)
            p_chain.append(c)
        diag = diagonal_measure(rds, chain, p_chain, args.n, delta, budgets=budgets)
        run.add_json(
            "diagonal.json",
            {
                "invariance_defect": str(diag.invariance),
                "support_diagonal": diag.support_diagonal,
                "entropy_values": list(diag.entropy.values),
                "entropy_zero": diag.entropy_zero,
                "measure": measure_payload(diag.measure),
            },
        )
        header, rows = _measure_rows(sysname, "diagonal", diag.measure)
        run.add_csv("diagonal.csv", header, rows)
        return EXIT_OK

    if name == "verify":
        report = run_suite(args.suite, args.seed, args.trials, budgets)
        run.add_json("report.json", report.to_dict())
        run.add_text("report.txt", report.summary() + "\n")
        return EXIT_OK if report.passed else EXIT_CHECK_FAILED

    raise ScenarioError(f"unknown command {name!r}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        overrides = {}
        for item in args.budget:
            overrides.update(parse_overrides(item))
        budgets = from_env().with_overrides(overrides)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT

    sc: Scenario | None = None
    scenario_digest = None
    # the output directory is not semantic: reruns into different directories
    # must stay byte-identical, so it is excluded from the manifest
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "out") and v is not None}
    run = _Run(args.out, args.command, {k: str(v) for k, v in flags.items()}, budgets, scenario_digest)
    try:
        if getattr(args, "scenario", None):
            sc = load_scenario(args.scenario)
            run.scenario_digest = sc.digest()
        elif args.command != "verify":
            raise ScenarioError("this command needs --scenario")
        code = _dispatch(args, budgets, run, sc)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        run.error = str(exc)
        run.flush()
        return EXIT_BAD_INPUT
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        run.error = str(exc)
        run.flush()
        return EXIT_BUDGET
    except RdstailError as exc:
        print(f"error: {exc}", file=sys.stderr)
        run.error = str(exc)
        run.flush()
        return EXIT_BAD_INPUT
    run.flush()
    return code


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
