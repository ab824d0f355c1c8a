"""Artifact files: scenarios, boundary sets, profiles, trajectories, predictions.

All artifacts are JSON with a versioned ``schema`` header and sorted keys, so
identical inputs always serialize to identical bytes. Loaders also accept the
bare payload (no header) for hand-written files.
"""
from __future__ import annotations

import json

import numpy as np

from .boundaries import Boundary
from .errors import ScenarioParseError
from .map_graph import ScenarioRecord, scenario_from_dict
from .motion import Trajectory, timed_rows_to_trajectory
from .predictor import PredictionEntry, PredictionSet


def dump_json(payload: dict, path=None) -> str:
    """Canonical serialization; the same payload always gives the same bytes."""
    text = json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def load_json(path) -> dict | list:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioParseError(str(path), f"not valid JSON: {exc}") from exc


def _unwrap(data, kind: str, key: str):
    """Accept {"schema": "lanebound/<kind>@n", <key>: payload} or the bare payload.

    Hand-written files may keep the payload key and drop the header.
    """
    if isinstance(data, dict) and "schema" in data:
        schema = str(data["schema"])
        if not schema.startswith(f"lanebound/{kind}@"):
            raise ScenarioParseError("schema", f"expected a lanebound/{kind} file, got {schema!r}")
        if key not in data:
            raise ScenarioParseError(key, "missing payload field")
        return data[key]
    if isinstance(data, dict) and key in data:
        return data[key]
    return data


def _polyline(pts) -> list:
    return np.asarray(pts, dtype=float).tolist()


def _timed_rows(traj: Trajectory) -> list:
    return np.column_stack([traj.times, traj.data]).tolist()


def scenario_to_dict(scenario: ScenarioRecord) -> dict:
    lanes = []
    for lane in scenario.graph.lanes():
        entry = {
            "id": lane.lane_id,
            "centerline": _polyline(lane.centerline),
            "left_edge": _polyline(lane.left_edge),
            "right_edge": _polyline(lane.right_edge),
            "successors": list(lane.successors),
            "predecessors": list(lane.predecessors),
        }
        if lane.left_neighbor is not None:
            entry["left_neighbor"] = lane.left_neighbor
        if lane.right_neighbor is not None:
            entry["right_neighbor"] = lane.right_neighbor
        lanes.append(entry)
    agent = scenario.focal_agent
    payload = {
        "schema": "lanebound/scenario@1",
        "scenario_id": scenario.scenario_id,
        "lanes": lanes,
        "focal_agent": {"x": agent.x, "y": agent.y, "heading": agent.heading, "speed": agent.speed},
        "focal_history": _timed_rows(scenario.focal_history),
        "other_agents": [_timed_rows(t) for t in scenario.other_agents],
        "ground_truth_future": (
            _timed_rows(scenario.ground_truth_future)
            if scenario.ground_truth_future is not None else None),
    }
    return payload


def save_scenario(scenario: ScenarioRecord, path) -> str:
    return dump_json(scenario_to_dict(scenario), path)


def load_scenario_artifact(path) -> ScenarioRecord:
    record = scenario_from_dict(load_json(path))
    record.scenario_id = record.scenario_id or str(path)
    return record


def boundaries_to_dict(boundaries) -> dict:
    return {
        "schema": "lanebound/boundary_set@1",
        "boundaries": [
            {
                "left": _polyline(b.left),
                "right": _polyline(b.right),
                "left_lane_path": list(b.left_lane_path),
                "right_lane_path": list(b.right_lane_path),
            }
            for b in boundaries
        ],
    }


def boundaries_from_payload(data) -> list[Boundary]:
    entries = _unwrap(data, "boundary_set", "boundaries")
    if not isinstance(entries, list):
        raise ScenarioParseError("boundaries", "expected an array of {left, right} objects")
    out = []
    for i, e in enumerate(entries):
        if not isinstance(e, dict) or "left" not in e or "right" not in e:
            raise ScenarioParseError(f"boundaries[{i}]", "expected an object with left and right")
        b = Boundary(
            left=np.asarray(e["left"], dtype=float),
            right=np.asarray(e["right"], dtype=float),
            left_lane_path=tuple(e.get("left_lane_path", ())),
            right_lane_path=tuple(e.get("right_lane_path", ())),
        )
        b.validate()
        out.append(b)
    return out


def load_boundaries(path) -> list[Boundary]:
    return boundaries_from_payload(load_json(path))


def profile_to_dict(values, kind: str) -> dict:
    return {"schema": f"lanebound/{kind}@1", kind: np.asarray(values, dtype=float).tolist()}


def profile_from_payload(data, kind: str) -> np.ndarray:
    values = _unwrap(data, kind, kind)
    try:
        arr = np.asarray(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ScenarioParseError(kind, f"expected a flat array of reals: {exc}") from exc
    if arr.ndim != 1:
        raise ScenarioParseError(kind, f"expected a flat array of reals, got shape {arr.shape}")
    return arr


def load_profile(path, kind: str) -> np.ndarray:
    return profile_from_payload(load_json(path), kind)


def trajectory_to_dict(traj: Trajectory) -> dict:
    return {"schema": "lanebound/trajectory@1", "trajectory": _timed_rows(traj)}


def trajectory_from_payload(data) -> Trajectory:
    return timed_rows_to_trajectory(_unwrap(data, "trajectory", "trajectory"), "trajectory")


def load_trajectory(path) -> Trajectory:
    return trajectory_from_payload(load_json(path))


def predictions_to_dict(pred_set: PredictionSet) -> dict:
    return {
        "schema": "lanebound/predictions@1",
        "predictions": [
            {
                "trajectory": _timed_rows(e.trajectory),
                "likelihood": float(e.likelihood),
                "boundary": int(e.boundary_index),
                "mode": e.mode,
                "mode_index": int(e.mode_index),
            }
            for e in pred_set.entries
        ],
    }


def predictions_from_payload(data) -> PredictionSet:
    entries = _unwrap(data, "predictions", "predictions")
    if not isinstance(entries, list):
        raise ScenarioParseError("predictions", "expected an array of prediction objects")
    out = []
    for i, e in enumerate(entries):
        if not isinstance(e, dict) or "trajectory" not in e or "likelihood" not in e:
            raise ScenarioParseError(
                f"predictions[{i}]", "expected an object with trajectory and likelihood")
        out.append(PredictionEntry(
            trajectory=timed_rows_to_trajectory(e["trajectory"], f"predictions[{i}].trajectory"),
            likelihood=float(e["likelihood"]),
            boundary_index=int(e.get("boundary", -1)),
            mode_index=int(e.get("mode_index", i)),
            mode=str(e.get("mode", f"mode-{i}")),
        ))
    return PredictionSet(out)


def load_predictions(path) -> PredictionSet:
    return predictions_from_payload(load_json(path))
