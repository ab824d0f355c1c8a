"""Command line front end: reproducible pipelines over scenario files.

Subcommands: extract, rollout, fit, predict, attack, eval, render, bench.
Exit codes: 0 success, 2 input error, 3 pipeline error, 4 partial corpus
failure. Every command is deterministic for identical inputs and flags; the
bench aggregate is byte-identical regardless of --jobs.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import io as artifacts
from .attack import AttackSpec, apply_attack, attack_grid
from .boundaries import boundary_set_for
from .errors import GraphIntegrityError, LaneboundError, ProfileError, ScenarioParseError
from .fitting import best_fit
from .map_graph import load_scenario_file
from .metrics import evaluate_predictions, feasibility_check, offroad_flags
from .motion import Trajectory
from .predictor import MODES, nms_predictions, predict, predict_constant_velocity
from .pursuit import PursuitParams, rollout
from .render import render_svg
from .superposition import superimpose

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PIPELINE = 3
EXIT_PARTIAL = 4

CONFIG_ENV = "LANEBOUND_CONFIG"
_INPUT_ERRORS = (ScenarioParseError, GraphIntegrityError, ProfileError, OSError)

_COMMON_FLAGS = {
    "nb": dict(type=int, default=6, help="max boundaries per scenario"),
    "modes": dict(type=int, default=len(MODES), help="prediction modes per boundary"),
    "ld": dict(type=float, default=10.0, help="pure-pursuit look-ahead, m"),
    "kappa_max": dict(type=float, default=0.3, help="curvature limit, 1/m"),
    "amax": dict(type=float, default=8.0, help="acceleration limit, m/s^2"),
    "eps_nms": dict(type=float, default=2.0, help="NMS endpoint radius, m"),
    "miss_threshold": dict(type=float, default=2.0, help="miss-rate FDE threshold, m"),
    "k": dict(type=int, default=6, help="top-k for displacement metrics"),
    "seed": dict(type=int, default=0, help="accepted for interface parity; unused"),
}


def _add_common(sp: argparse.ArgumentParser):
    for dest, spec in _COMMON_FLAGS.items():
        sp.add_argument("--" + dest.replace("_", "-"), dest=dest, **spec)


def _load_env_config() -> dict:
    """Flag defaults from the JSON file named by LANEBOUND_CONFIG, if any."""
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise ScenarioParseError(CONFIG_ENV, "config file must hold an object of flag defaults")
    unknown = set(config) - set(_COMMON_FLAGS)
    if unknown:
        raise ScenarioParseError(CONFIG_ENV, f"unknown config keys {sorted(unknown)}")
    return config


def _params(args) -> PursuitParams:
    return PursuitParams(lookahead=args.ld, kappa_max=args.kappa_max, a_max=args.amax)


def _out_path(args, input_path: str, suffix: str) -> Path:
    if getattr(args, "output", None):
        return Path(args.output)
    p = Path(input_path)
    return p.with_name(p.stem + suffix)


def _boundaries(scenario, args):
    return boundary_set_for(scenario, max_count=args.nb)


def _predict(scenario, args):
    preds = predict(scenario.focal_agent, _boundaries(scenario, args), _params(args), args.modes)
    return nms_predictions(preds, epsilon=args.eps_nms)


def _gt_with_start(scenario) -> Trajectory:
    """Recorded future prefixed with the observed current state."""
    future = scenario.ground_truth_future
    if future is None:
        raise ScenarioParseError("ground_truth_future", "required by this command")
    agent = scenario.focal_agent
    rows = np.vstack([[agent.x, agent.y, agent.heading, agent.speed], future.data])
    return Trajectory(rows, dt=future.dt, t0=future.t0 - future.dt)


def _cmd_extract(args) -> int:
    scenario = load_scenario_file(args.scenario)
    boundaries = _boundaries(scenario, args)
    out = _out_path(args, args.scenario, ".boundaries.json")
    artifacts.dump_json(artifacts.boundaries_to_dict(boundaries), out)
    print(f"extract: {len(boundaries)} boundaries -> {out}")
    return EXIT_OK


def _cmd_rollout(args) -> int:
    scenario = load_scenario_file(args.scenario)
    boundaries = _boundaries(scenario, args)
    if not (0 <= args.boundary < len(boundaries)):
        raise ScenarioParseError(
            "boundary", f"index {args.boundary} out of range, set has {len(boundaries)}")
    weights = artifacts.load_profile(args.weights, "weights")
    accels = artifacts.load_profile(args.accels, "accels")
    path = superimpose(boundaries[args.boundary], weights)
    traj = rollout(scenario.focal_agent, path, accels, _params(args))
    out = _out_path(args, args.scenario, ".rollout.json")
    artifacts.dump_json(artifacts.trajectory_to_dict(traj), out)
    print(f"rollout: {len(traj)} states on boundary {args.boundary} -> {out}")
    return EXIT_OK


def _cmd_fit(args) -> int:
    scenario = load_scenario_file(args.scenario)
    gt = _gt_with_start(scenario)
    boundaries = _boundaries(scenario, args)
    index, result = best_fit(boundaries, gt, _params(args))
    prefix = Path(args.out_prefix) if args.out_prefix else Path(args.scenario).with_suffix("")
    w_path = prefix.with_name(prefix.name + ".weights.json")
    a_path = prefix.with_name(prefix.name + ".accels.json")
    artifacts.dump_json(artifacts.profile_to_dict(result.weights, "weights"), w_path)
    artifacts.dump_json(artifacts.profile_to_dict(result.accels, "accels"), a_path)
    fde = float(np.linalg.norm(result.trajectory.xy[-1] - gt.xy[-1]))
    print(f"fit: boundary={index} ade={result.ade:.4f} fde={fde:.4f}")
    print(f"fit: ade_history={[round(a, 4) for a in result.ade_history]}")
    print(f"fit: profiles -> {w_path} {a_path}")
    return EXIT_OK


def _cmd_predict(args) -> int:
    scenario = load_scenario_file(args.scenario)
    preds = _predict(scenario, args)
    out = _out_path(args, args.scenario, ".predictions.json")
    artifacts.dump_json(artifacts.predictions_to_dict(preds), out)
    print(f"predict: {len(preds)} modes -> {out}")
    return EXIT_OK


def _cmd_attack(args) -> int:
    scenario = load_scenario_file(args.scenario)
    if args.grid:
        specs = attack_grid(args.sign)
    else:
        if args.kind is None or args.power is None:
            raise ScenarioParseError("attack", "either --grid or both --kind and --power")
        specs = [AttackSpec(args.kind, args.power, args.sign)]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.scenario).stem
    for spec in specs:
        warped = apply_attack(scenario, spec)
        artifacts.save_scenario(warped, out_dir / f"{stem}@{spec.label}.json")
    print(f"attack: {len(specs)} warped scenarios -> {out_dir}")
    return EXIT_OK


def _report_lines(name: str, report: dict) -> list[str]:
    lines = [f"[{name}]"]
    for key in sorted(report):
        value = report[key]
        if isinstance(value, dict):
            for sub in sorted(value):
                lines.append(f"  {key}.{sub} = {value[sub]}")
        else:
            lines.append(f"  {key} = {value}")
    return lines


def _cmd_eval(args) -> int:
    if len(args.files) % 2 != 0:
        raise ScenarioParseError("files", "expected prediction/scenario file pairs")
    pairs = [(args.files[i], args.files[i + 1]) for i in range(0, len(args.files), 2)]
    reports = {}
    for pred_path, scn_path in pairs:
        preds = artifacts.load_predictions(pred_path)
        scenario = load_scenario_file(scn_path)
        report = evaluate_predictions(
            preds, scenario.graph, scenario.ground_truth_future,
            k=args.k, miss_threshold=args.miss_threshold).to_dict()
        if args.feasibility:
            report = {"feasibility": report["feasibility"]}
        name = scenario.scenario_id or scn_path
        reports[name] = report
        print("\n".join(_report_lines(name, report)))

    aggregate: dict = {"scenarios": len(pairs)}
    numeric: dict[str, list] = {}
    for report in reports.values():
        flat = dict(report)
        flat.update({f"feasibility.{k}": v for k, v in flat.pop("feasibility", {}).items()})
        for key, value in flat.items():
            if isinstance(value, bool):
                numeric.setdefault(key, []).append(float(value))
            elif isinstance(value, (int, float)) and value is not None:
                numeric.setdefault(key, []).append(float(value))
    for key in sorted(numeric):
        aggregate[f"mean_{key}"] = float(np.mean(numeric[key]))
    print("\n".join(_report_lines("aggregate", aggregate)))
    if args.report:
        artifacts.dump_json(
            {"schema": "lanebound/eval@1", "aggregate": aggregate, "scenarios": reports},
            args.report)
    return EXIT_OK


def _cmd_render(args) -> int:
    scenario = load_scenario_file(args.scenario)
    try:
        boundaries = _boundaries(scenario, args)
    except LaneboundError:
        boundaries = []
    preds = artifacts.load_predictions(args.predictions) if args.predictions else None
    svg = render_svg(scenario, boundaries, preds)
    out = _out_path(args, args.scenario, ".svg")
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    print(f"render: {out}")
    return EXIT_OK


def _feasibility_counts(trajectories, params: PursuitParams) -> dict[str, int]:
    c = dict.fromkeys(
        ("accel_steps", "curvature_steps", "any_steps", "steps",
         "accel_trajs", "curvature_trajs", "any_trajs", "trajs"), 0)
    for traj in trajectories:
        flags = feasibility_check(traj, a_max=params.a_max, kappa_max=params.kappa_max)
        c["steps"] += len(flags.accel)
        c["trajs"] += 1
        c["accel_steps"] += int(flags.accel.sum())
        c["curvature_steps"] += int(flags.curvature.sum())
        c["any_steps"] += int(flags.any.sum())
        c["accel_trajs"] += int(flags.accel.any())
        c["curvature_trajs"] += int(flags.curvature.any())
        c["any_trajs"] += int(flags.any.any())
    return c


def _offroad_counts(pred_set, graph) -> dict[str, int]:
    flags, _ = offroad_flags(pred_set, graph)
    return {
        "off_points": int(sum(f.sum() for f in flags)),
        "points": int(sum(len(f) for f in flags)),
        "off_trajs": int(sum(f.any() for f in flags)),
        "trajs": len(flags),
    }


def _bench_one(task) -> tuple[str, dict]:
    """All measurements for one scenario file; runs in a worker process."""
    path, flags = task
    args = argparse.Namespace(**flags)
    params = _params(args)
    result: dict = {}
    try:
        scenario = load_scenario_file(path)
        preds = _predict(scenario, args)
        clean: dict = {
            "feas": _feasibility_counts([e.trajectory for e in preds.entries], params),
            "off": _offroad_counts(preds, scenario.graph),
            "cv_off": _offroad_counts(predict_constant_velocity(scenario.focal_agent, params),
                                      scenario.graph),
        }
        if scenario.ground_truth_future is not None:
            report = evaluate_predictions(
                preds, scenario.graph, scenario.ground_truth_future,
                k=args.k, miss_threshold=args.miss_threshold)
            clean["metrics"] = {
                "min_ade": report.min_ade, "min_fde": report.min_fde,
                "brier_min_ade": report.brier_min_ade, "brier_min_fde": report.brier_min_fde,
                "miss": int(report.miss),
            }
        result["clean"] = clean
        if args.attack == "grid":
            attacks = {}
            for spec in attack_grid():
                warped = apply_attack(scenario, spec)
                wpreds = _predict(warped, args)
                attacks[spec.label] = {
                    "kind": spec.kind,
                    "feas": _feasibility_counts([e.trajectory for e in wpreds.entries], params),
                    "off": _offroad_counts(wpreds, warped.graph),
                    "cv_off": _offroad_counts(
                        predict_constant_velocity(warped.focal_agent, params), warped.graph),
                }
            result["attacks"] = attacks
    except LaneboundError as exc:
        return Path(path).name, {"error": f"{type(exc).__name__}: {exc}"}
    return Path(path).name, result


def _merge_counts(total: dict, part: dict):
    for key, value in part.items():
        total[key] = total.get(key, 0) + value


def _rates(off: dict) -> dict:
    return {
        "soft_offroad_rate": off["off_points"] / max(off["points"], 1),
        "hard_offroad_rate": off["off_trajs"] / max(off["trajs"], 1),
        "trajectories": off.get("trajs", 0),
    }


def _cmd_bench(args) -> int:
    corpus = Path(args.corpus)
    files = sorted(str(p) for p in corpus.glob("*.json"))
    if not files:
        raise ScenarioParseError("corpus", f"no scenario files in {corpus}")
    flags = {dest: getattr(args, dest) for dest in _COMMON_FLAGS}
    flags["attack"] = args.attack
    tasks = [(path, flags) for path in files]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = dict(pool.map(_bench_one, tasks))
    else:
        results = dict(map(_bench_one, tasks))

    failures = {}
    feas: dict = {}
    offroad_groups: dict[str, dict] = {}
    metric_sums: dict[str, list] = {}
    for name in sorted(results):
        result = results[name]
        if "error" in result:
            failures[name] = result["error"]
            continue
        clean = result["clean"]
        _merge_counts(feas, clean["feas"])
        _merge_counts(offroad_groups.setdefault("clean", {}), clean["off"])
        _merge_counts(offroad_groups.setdefault("clean_cv", {}), clean["cv_off"])
        for key, value in clean.get("metrics", {}).items():
            metric_sums.setdefault(key, []).append(value)
        for entry in result.get("attacks", {}).values():
            _merge_counts(feas, entry["feas"])
            _merge_counts(offroad_groups.setdefault(entry["kind"], {}), entry["off"])
            _merge_counts(offroad_groups.setdefault("all_attacks", {}), entry["off"])
            _merge_counts(offroad_groups.setdefault(entry["kind"] + "_cv", {}), entry["cv_off"])
            _merge_counts(offroad_groups.setdefault("all_attacks_cv", {}), entry["cv_off"])

    evaluated = len(results) - len(failures)
    steps = max(feas.get("steps", 0), 1)
    trajs = max(feas.get("trajs", 0), 1)
    report = {
        "schema": "lanebound/bench@1",
        "scenarios": len(results),
        "scenarios_evaluated": evaluated,
        "failures": failures,
        "feasibility": {
            "accel_step_fraction": feas.get("accel_steps", 0) / steps,
            "curvature_step_fraction": feas.get("curvature_steps", 0) / steps,
            "any_step_fraction": feas.get("any_steps", 0) / steps,
            "accel_trajectory_fraction": feas.get("accel_trajs", 0) / trajs,
            "curvature_trajectory_fraction": feas.get("curvature_trajs", 0) / trajs,
            "any_trajectory_fraction": feas.get("any_trajs", 0) / trajs,
        },
        "offroad": {name: _rates(group) for name, group in sorted(offroad_groups.items())},
        "displacement": {
            f"mean_{key}": float(np.mean(values)) for key, values in sorted(metric_sums.items())
        },
    }
    out = Path(args.output) if args.output else corpus / "bench_report.json"
    artifacts.dump_json(report, out)
    print(f"bench: {evaluated}/{len(results)} scenarios -> {out}")
    for name, group in sorted(offroad_groups.items()):
        rates = _rates(group)
        print(f"bench: {name}: SOR={rates['soft_offroad_rate']:.5f} "
              f"HOR={rates['hard_offroad_rate']:.5f} n={rates['trajectories']}")
    if failures:
        for name in sorted(failures):
            print(f"bench: FAILED {name}: {failures[name]}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def build_parser(config: dict | None = None) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lanebound",
        description="Boundary-constrained trajectory prediction pipelines.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("extract", help="scenario -> boundary-set file")
    sp.add_argument("scenario")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=_cmd_extract)

    sp = sub.add_parser("rollout", help="track one boundary under given profiles")
    sp.add_argument("scenario")
    sp.add_argument("--boundary", type=int, default=0)
    sp.add_argument("--weights", required=True)
    sp.add_argument("--accels", required=True)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=_cmd_rollout)

    sp = sub.add_parser("fit", help="fit profiles to the recorded future")
    sp.add_argument("scenario")
    sp.add_argument("--out-prefix")
    sp.set_defaults(func=_cmd_fit)

    sp = sub.add_parser("predict", help="scenario -> multimodal prediction file")
    sp.add_argument("scenario")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=_cmd_predict)

    sp = sub.add_parser("attack", help="write warped scenario variants")
    sp.add_argument("scenario")
    sp.add_argument("--kind", choices=("smooth_turn", "double_turn", "ripple_road"))
    sp.add_argument("--power", type=int)
    sp.add_argument("--sign", type=int, choices=(-1, 1), default=1)
    sp.add_argument("--grid", action="store_true", help="all 54 kind/power variants")
    sp.add_argument("--out-dir", default=".")
    sp.set_defaults(func=_cmd_attack)

    sp = sub.add_parser("eval", help="metrics for prediction/scenario file pairs")
    sp.add_argument("files", nargs="+", metavar="PREDICTIONS SCENARIO")
    sp.add_argument("--report", help="also write a JSON report")
    sp.add_argument("--feasibility", action="store_true", help="feasibility table only")
    sp.set_defaults(func=_cmd_eval)

    sp = sub.add_parser("render", help="scenario (+ predictions) -> SVG")
    sp.add_argument("scenario")
    sp.add_argument("predictions", nargs="?")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=_cmd_render)

    sp = sub.add_parser("bench", help="predict + eval over a scenario directory")
    sp.add_argument("corpus")
    sp.add_argument("--attack", choices=("none", "grid"), default="none")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=_cmd_bench)

    for sp_action in sub.choices.values():
        _add_common(sp_action)
        if config:
            # subparser defaults would shadow top-level ones, so apply here
            sp_action.set_defaults(**config)
    return parser


def main(argv=None) -> int:
    try:
        parser = build_parser(_load_env_config())
        args = parser.parse_args(argv)
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except LaneboundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
