"""Command line front end.

Subcommands: characters, validate, hurwitz, steer, approx, separate,
replicate, count.  Pipeline failures exit with the failing stage's code
(see ``zerosep separate --help``); other library errors exit 1.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .characters import dirichlet_characters, export_character_table
from .combalg import support_prime
from .errors import StageError, ZerosepError
from .euler import (estimate_orthogonality, eval_dirichlet_sum,
                    eval_partial_euler, lfunction_spec, sparse_zeta_spec,
                    validate_axioms, zeta_spec)
from .hurwitz import hurwitz_as_combination, hurwitz_eval
from .lattice import almost_periods, simultaneous_approx
from .locate import CombEvaluator, count_zeros_in_strip
from .pipeline import (STAGE_EXIT_CODES, PipelineConfig, RunRecord,
                       builtin_config, export_certificate,
                       run_separation_pipeline, _load_problem)
from .steering import SteerOptions, SteeringTarget, solve_phases
from .combalg import comb_eval


def _spec_from_name(name: str):
    if name == "zeta":
        return zeta_spec()
    if name == "sparse_Z":
        return sparse_zeta_spec()
    if name.startswith("dirichlet_L:"):
        _, q_s, idx_s = name.split(":")
        return lfunction_spec(dirichlet_characters(int(q_s))[int(idx_s)])
    raise ZerosepError(
        f"unknown spec {name!r}; use zeta, sparse_Z, or dirichlet_L:<q>:<index>")


def _parse_complex(text: str) -> complex:
    re_s, im_s = text.split(",") if "," in text else (text, "0")
    return complex(float(re_s), float(im_s))


def cmd_characters(args) -> int:
    chars = dirichlet_characters(args.modulus)
    print(f"# {len(chars)} characters mod {args.modulus} (principal first)")
    for i, chi in enumerate(chars):
        row = " ".join(f"{chi.value(n):+.3f}" for n in range(args.modulus or 1))
        print(f"chi_{i}: {row}")
    if args.csv:
        export_character_table(args.modulus, args.csv)
        print(f"wrote {args.csv}")
    return 0


def cmd_validate(args) -> int:
    F = _spec_from_name(args.spec)
    report = validate_axioms(F, args.prime_limit, args.depth)
    print(f"spec {F.label}: max |a(p)| = {report.max_ap:.6f} at p = "
          f"{report.argmax_prime} (bound {report.prime_bound})")
    for x, s in report.higher_sum_checkpoints:
        print(f"  higher-power sum through {x}: {s:.8f}")
    print(f"prime-coefficient bound: {'ok' if report.prime_bound_ok else 'VIOLATED'}")
    print(f"higher-power sum stabilizing: {'ok' if report.higher_sum_ok else 'NO'}")
    report.raise_if_failed()
    return 0


def cmd_hurwitz(args) -> int:
    s = _parse_complex(args.s)
    direct = hurwitz_eval(args.a, args.q, s, args.cutoff)
    poly, specs, pref = hurwitz_as_combination(args.a, args.q)
    comb = comb_eval(poly, specs, s, args.prime_cutoff)
    adj = comb.value * pref.value(s)
    print(f"direct sum:      {direct.value:.12g} (bound {direct.abs_error_bound:.3e})")
    print(f"combination:     {comb.value:.12g} (bound {comb.abs_error_bound:.3e})")
    print(f"prefactor:       {pref.describe()}")
    print(f"prefactor * comb {adj:.12g}")
    print(f"difference:      {abs(adj - direct.value):.3e}")
    return 0


def cmd_steer(args) -> int:
    config = _config_from_args(args)
    problem, _ = _load_problem(config)
    targets = tuple(_parse_complex(t) for t in args.targets.split(";"))
    target = SteeringTarget(targets, R=args.R, sigma=config.sigma,
                            eta=config.sigma - 1.0, y=args.y, P=config.P)
    res = solve_phases(problem.variable_order, target,
                       options=SteerOptions(tol=config.steer_tol,
                                            seed=config.seed))
    print(f"converged: {res.converged} after {res.iterations} iterations")
    for j, (a, r) in enumerate(zip(res.achieved, res.residuals)):
        print(f"  target {j}: achieved {a:.9g}, residual {r:.3e}")
    if args.out:
        res.assignment.to_csv(args.out, meta={
            "sigma": config.sigma, "y": args.y, "P": config.P,
            "seed": config.seed,
            "residuals": ";".join(f"{r:.3e}" for r in res.residuals)})
        print(f"wrote {args.out}")
    return 0


def cmd_approx(args) -> int:
    phases = {}
    for part in args.phases.split(","):
        p_s, ph_s = part.split(":")
        phases[int(p_s)] = float(ph_s)
    res = simultaneous_approx(phases, args.accuracy)
    print(f"t = {res.t}")
    print(f"max phase error = {res.max_phase_error:.6f} (method {res.method}, "
          f"{res.precision_bits} bits)")
    print(f"independently recomputed error = {res.recompute_error():.6f}")
    return 0


def _config_from_args(args) -> PipelineConfig:
    if getattr(args, "config", None):
        with open(args.config) as fh:
            config = PipelineConfig.from_json(fh.read())
    elif getattr(args, "builtin", None):
        config = builtin_config(args.builtin)
    elif getattr(args, "file", None):
        config = PipelineConfig(problem=f"file:{args.file}")
    else:
        raise ZerosepError("pass --builtin, --file, or --config")
    overrides = {}
    for name in ("sigma", "P", "K", "seed", "out_dir", "replicate_count",
                 "approx_accuracy", "steer_tol"):
        v = getattr(args, name, None)
        if v is not None:
            overrides[name] = v
    if overrides:
        config = PipelineConfig(**{**json.loads(config.to_json()), **overrides})
    return config


def cmd_separate(args) -> int:
    import os
    config = _config_from_args(args)
    record = run_separation_pipeline(config)
    for st in record.stages:
        line = f"[{st.status:>7}] {st.name:<20} {st.seconds:8.2f}s"
        print(line)
    os.makedirs(config.out_dir, exist_ok=True)
    path = os.path.join(config.out_dir, "run_record.json")
    with open(path, "w") as fh:
        fh.write(record.to_json())
    print(f"wrote {path}")
    paths = export_certificate(record, "text")
    paths += export_certificate(record, "csv")
    for p in paths:
        print(f"wrote {p}")
    return 0


def cmd_replicate(args) -> int:
    with open(args.record) as fh:
        record = RunRecord.from_json(fh.read())
    config = PipelineConfig(**{**json.loads(record.config.to_json()),
                               "replicate_count": args.count})
    new_record = run_separation_pipeline(config)
    rep = new_record.stage("replicate")
    print(json.dumps(rep.data, indent=2, default=str))
    return 0


def cmd_count(args) -> int:
    config = _config_from_args(args)
    problem, _ = _load_problem(config)
    ev = CombEvaluator(problem.f_on_full_vars(), problem.variable_order,
                       P=config.locate_P or min(config.P, 200_000))
    s_lo, s_hi = (float(x) for x in args.sigma_range.split(":"))
    t_lo, t_hi = (float(x) for x in args.t_range.split(":"))
    result = count_zeros_in_strip(ev.at, (s_lo, s_hi), (t_lo, t_hi),
                                  subdivision=args.subdivision)
    print(f"zeros (with multiplicity): {result.total}")
    print(f"cells evaluated: {result.cells}, flagged: {len(result.flagged)}")
    for cell, reason in result.flagged:
        print(f"  unresolved {cell}: {reason}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="zerosep",
        description="Constructive zero separation for combinations of Euler "
                    "products in Re(s) > 1.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("characters", help="print or export a character table")
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--csv", help="write the table to this CSV path")
    p.set_defaults(fn=cmd_characters)

    p = sub.add_parser("validate", help="scan a spec's coefficient bounds")
    p.add_argument("--spec", required=True,
                   help="zeta | sparse_Z | dirichlet_L:<q>:<index>")
    p.add_argument("--prime-limit", type=int, default=100_000, dest="prime_limit")
    p.add_argument("--depth", type=int, default=12)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("hurwitz", help="compare the shifted zeta sum with its "
                                       "character combination")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--s", default="2,0", help="evaluation point re,im")
    p.add_argument("--cutoff", type=int, default=1_000_000,
                   help="direct-sum cutoff N")
    p.add_argument("--prime-cutoff", type=int, default=100_000,
                   dest="prime_cutoff", help="Euler-product cutoff P")
    p.set_defaults(fn=cmd_hurwitz)

    def add_problem_args(p):
        p.add_argument("--builtin", help="builtin problem name")
        p.add_argument("--file", help="combination definition file")
        p.add_argument("--config", help="pipeline config JSON")
        p.add_argument("--sigma", type=float)
        p.add_argument("--P", type=int)
        p.add_argument("--K", type=int)
        p.add_argument("--seed", type=int)

    p = sub.add_parser("steer", help="steer tail products onto targets")
    add_problem_args(p)
    p.add_argument("--targets", required=True,
                   help="semicolon-separated complex targets re,im;re,im;...")
    p.add_argument("--R", type=float, default=2.0)
    p.add_argument("--y", type=int, default=1)
    p.add_argument("--steer-tol", type=float, dest="steer_tol")
    p.add_argument("--out", help="write the phase assignment CSV here")
    p.set_defaults(fn=cmd_steer)

    p = sub.add_parser("approx", help="simultaneous phase approximation")
    p.add_argument("--phases", required=True,
                   help="comma list p:theta, e.g. 2:1.0,3:2.5")
    p.add_argument("--accuracy", type=float, default=0.05)
    p.set_defaults(fn=cmd_approx)

    p = sub.add_parser("separate", help="run the full separation pipeline")
    add_problem_args(p)
    p.add_argument("--out-dir", dest="out_dir", default=None)
    p.add_argument("--replicate", type=int, dest="replicate_count")
    p.add_argument("--approx-accuracy", type=float, dest="approx_accuracy")
    p.add_argument("--steer-tol", type=float, dest="steer_tol")
    p.set_defaults(fn=cmd_separate)

    p = sub.add_parser("replicate", help="re-run replication from a run record")
    p.add_argument("--record", required=True)
    p.add_argument("--count", type=int, default=3)
    p.set_defaults(fn=cmd_replicate)

    p = sub.add_parser("count", help="count zeros in a rectangle")
    add_problem_args(p)
    p.add_argument("--sigma-range", dest="sigma_range", required=True,
                   help="lo:hi with lo > 1")
    p.add_argument("--t-range", dest="t_range", required=True, help="lo:hi")
    p.add_argument("--subdivision", type=int, default=4)
    p.set_defaults(fn=cmd_count)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return STAGE_EXIT_CODES.get(exc.stage, 1)
    except ZerosepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
