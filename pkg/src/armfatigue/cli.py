"""Command-line interface: ``armfatigue {simulate,strength,met,validate}``."""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np
import yaml

from .anthropometry import Gender
from .fatigue import GuardViolation, met_static
from .kinematics import KinematicsError
from .scenario import ScenarioError, export, load_scenario, run, validate
from .strength import StrengthModel, strength_elbow, strength_shoulder, window_warnings

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3
EXIT_IO = 4

OUT_ENV = "ARMFATIGUE_OUT"


def _gender(value: str) -> Gender:
    v = value.lower()
    if v in ("m", "male"):
        return Gender.MALE
    if v in ("f", "female"):
        return Gender.FEMALE
    raise argparse.ArgumentTypeError(f"gender must be m or f, got {value!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="armfatigue", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a push/pull scenario and export results")
    sim.add_argument("--scenario", required=True,
                     help="scenario YAML file, or the name of a bundled scenario (e.g. paper_case_study)")
    sim.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./armfatigue_out)")
    sim.add_argument("--dt", type=float, help="override the integration step, in seconds")
    sim.add_argument("--plot", action="store_true", help="also write SVG figures")

    st = sub.add_parser("strength", help="evaluate the elbow/shoulder strength regressions (N m)")
    st.add_argument("--alpha-e", type=float, default=90.0, help="regression angle a_e in degrees")
    st.add_argument("--alpha-s", type=float, default=90.0, help="regression angle a_s in degrees")
    st.add_argument("--gender", type=_gender, default=Gender.MALE, help="m or f; selects default G factors")
    st.add_argument("--g", type=float, help="use this G (dimensionless) for both joints instead")
    st.add_argument("--sweep", action="store_true",
                    help="emit CSV of strength (N m) over a_e, a_s in [0, 180] deg for both genders")
    st.add_argument("--step", type=float, default=10.0, help="sweep step in degrees")
    st.add_argument("--out", help="sweep CSV destination (default: stdout)")

    met = sub.add_parser("met", help="maximum endurance time under a constant load")
    met.add_argument("--mvc", type=float, required=True, help="maximum voluntary contraction, N m")
    met.add_argument("--load", type=float, required=True, help="constant load, N m")
    met.add_argument("--k", type=float, default=1.0, help="fatigue rate, 1/min")

    val = sub.add_parser("validate", help="check a scenario file and list every problem")
    val.add_argument("--scenario", required=True, help="scenario YAML file or bundled scenario name")
    return parser


def _cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.dt is not None:
        scenario = scenario.with_dt(args.dt)
    out = args.out or os.environ.get(OUT_ENV) or "armfatigue_out"
    result = run(scenario)
    paths = export(result, out)
    if args.plot:
        from .plots import write_plots

        paths += write_plots(result, out)
    print(f"scenario: {scenario.name}  dt = {scenario.dt:.6f} s  horizon = {scenario.horizon:.1f} s")
    for joint, c in result.crossings.items():
        if c is None:
            print(f"{joint:<9} crossing: none")
        else:
            print(f"{joint:<9} crossing: {c.minutes:.4f} min ({c.time:.3f} s)")
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def _model(gender: Gender, g):
    model = StrengthModel.for_gender(gender)
    return model if g is None else model.with_g(g)


def _cmd_strength(args) -> int:
    if args.sweep:
        if not args.step > 0:
            raise ValueError("--step must be > 0")
        angles = np.arange(0.0, 180.0 + 1e-9, args.step)
        fh = open(args.out, "w", newline="") if args.out else sys.stdout
        try:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["gender", "alpha_e_deg", "alpha_s_deg", "elbow_Nm", "shoulder_Nm"])
            for gender in (Gender.MALE, Gender.FEMALE):
                model = _model(gender, args.g)
                for a_e in angles:
                    for a_s in angles:
                        writer.writerow([gender.value, f"{a_e:.4f}", f"{a_s:.4f}",
                                         f"{strength_elbow(a_e, a_s, model):.4f}",
                                         f"{strength_shoulder(a_e, a_s, model):.4f}"])
        finally:
            if args.out:
                fh.close()
        return EXIT_OK
    model = _model(args.gender, args.g)
    print(f"alpha_e     {args.alpha_e:.4f} deg")
    print(f"alpha_s     {args.alpha_s:.4f} deg")
    print(f"G_elbow     {model.G_elbow:.4f}")
    print(f"G_shoulder  {model.G_shoulder:.4f}")
    print(f"elbow       {strength_elbow(args.alpha_e, args.alpha_s, model):.4f} N m")
    print(f"shoulder    {strength_shoulder(args.alpha_e, args.alpha_s, model):.4f} N m")
    for w in window_warnings(args.alpha_e, args.alpha_s):
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def _cmd_met(args) -> int:
    result = met_static(args.mvc, args.load, args.k)
    if result.immediate_risk:
        print(f"immediate risk: load {args.load:.4f} N m exceeds MVC {args.mvc:.4f} N m; MET = 0.0000 min")
    elif result.unbounded:
        print("unbounded: no fatigue accumulates (zero load or k = 0); MET = inf")
    else:
        print(f"MET = {result.minutes:.4f} min")
    return EXIT_OK


def _cmd_validate(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except ScenarioError as exc:
        for p in exc.problems:
            print(p)
        return EXIT_VALIDATION
    problems = validate(scenario)
    for p in problems:
        print(p)
    if problems:
        return EXIT_VALIDATION
    print(f"{scenario.name}: ok")
    return EXIT_OK


COMMANDS = {"simulate": _cmd_simulate, "strength": _cmd_strength, "met": _cmd_met, "validate": _cmd_validate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except yaml.YAMLError as exc:
        print(f"error: malformed scenario file: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (GuardViolation, KinematicsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
