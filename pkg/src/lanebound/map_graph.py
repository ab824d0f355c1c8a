"""Lane-graph scene model: lanes, connectivity, and drivable-area queries.

A scenario is a directed graph of lane segments plus the focal agent, other
agents, and an optional recorded future. Scenario payloads are JSON with
top-level keys ``lanes``, ``focal_agent``, ``focal_history``, ``other_agents``
and optional ``ground_truth_future``. Distances are meters, angles radians,
timestamps seconds at a 0.1 s step.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import shapely

from .errors import GraphIntegrityError, NoStartLaneError, ScenarioParseError
from .geometry import (
    as_polyline,
    cum_arclength,
    min_distance_to_polyline,
    points_in_ring,
    polyline_length,
    project_to_polyline,
    sample_at_arclengths,
    tangent_at_arclength,
    wrap_angle,
)
from .motion import AgentState, Trajectory, timed_rows_to_trajectory

# Start-lane matching thresholds. Exposed as keyword arguments on
# find_start_lanes for scenes with ambiguous headings mid-turn.
START_LATERAL_MAX = 3.0
START_HEADING_MAX = math.radians(60.0)
GRID_CELL = 10.0
GT_STEPS = 60


@dataclass
class LaneSegment:
    """One directed lane with its geometry and graph links.

    The polygon formed by ``left_edge`` plus the reversed ``right_edge`` must
    be simple; both edges and the centerline run in the travel direction.
    """

    lane_id: str
    centerline: np.ndarray
    left_edge: np.ndarray
    right_edge: np.ndarray
    successors: tuple[str, ...] = ()
    predecessors: tuple[str, ...] = ()
    left_neighbor: str | None = None
    right_neighbor: str | None = None

    @property
    def polygon_ring(self) -> np.ndarray:
        return np.vstack([self.left_edge, self.right_edge[::-1]])

    @property
    def length(self) -> float:
        return polyline_length(self.centerline)

    def validate(self, field_prefix: str = "lane"):
        if not isinstance(self.lane_id, str) or not self.lane_id:
            raise ScenarioParseError(f"{field_prefix}.id", "lane id must be a non-empty string")
        self.centerline = as_polyline(self.centerline, f"{field_prefix}.centerline")
        self.left_edge = as_polyline(self.left_edge, f"{field_prefix}.left_edge")
        self.right_edge = as_polyline(self.right_edge, f"{field_prefix}.right_edge")
        for name, edge in (("left_edge", self.left_edge), ("right_edge", self.right_edge)):
            if not _same_travel_direction(self.centerline, edge):
                raise ScenarioParseError(f"{field_prefix}.{name}", "travel direction opposes the centerline")
        poly = shapely.Polygon(self.polygon_ring)
        if (not poly.is_valid) or poly.area <= 0.0:
            raise ScenarioParseError(f"{field_prefix}", "left/right edges form a self-intersecting polygon")


def _same_travel_direction(a: np.ndarray, b: np.ndarray, samples: int = 8) -> bool:
    """Compare chord directions of two polylines at matching arc fractions."""
    fa = sample_at_arclengths(a, np.linspace(0, polyline_length(a), samples))
    fb = sample_at_arclengths(b, np.linspace(0, polyline_length(b), samples))
    da = np.diff(fa, axis=0)
    db = np.diff(fb, axis=0)
    return bool(np.all(np.einsum("ij,ij->i", da, db) > 0.0))


class LaneGraph:
    """Immutable collection of lane segments with a uniform-grid index.

    The grid maps 10 m cells to the lanes whose polygon bounding box touches
    the cell; containment queries only test those candidates.
    """

    def __init__(self, lanes: list[LaneSegment], cell_size: float = GRID_CELL):
        self._lanes: dict[str, LaneSegment] = {}
        for lane in lanes:
            if lane.lane_id in self._lanes:
                raise GraphIntegrityError(f"duplicate lane id {lane.lane_id!r}")
            self._lanes[lane.lane_id] = lane
        self._check_links()
        self.cell_size = float(cell_size)
        self._grid: dict[tuple[int, int], list[str]] = {}
        self._bboxes: dict[str, tuple[float, float, float, float]] = {}
        for lane_id in self.lane_ids:
            ring = self._lanes[lane_id].polygon_ring
            xmin, ymin = ring.min(axis=0)
            xmax, ymax = ring.max(axis=0)
            self._bboxes[lane_id] = (xmin, ymin, xmax, ymax)
            for ix in range(int(math.floor(xmin / cell_size)), int(math.floor(xmax / cell_size)) + 1):
                for iy in range(int(math.floor(ymin / cell_size)), int(math.floor(ymax / cell_size)) + 1):
                    self._grid.setdefault((ix, iy), []).append(lane_id)
        self._drivable_boundary = None

    def _check_links(self):
        for lane in self._lanes.values():
            refs = list(lane.successors) + list(lane.predecessors)
            refs += [n for n in (lane.left_neighbor, lane.right_neighbor) if n is not None]
            for ref in refs:
                if ref not in self._lanes:
                    raise GraphIntegrityError(f"lane {lane.lane_id!r} references unknown lane {ref!r}")
            if lane.left_neighbor is not None:
                nb = self._lanes[lane.left_neighbor]
                if nb.right_neighbor is not None and nb.right_neighbor != lane.lane_id:
                    raise GraphIntegrityError(
                        f"left/right neighbor mismatch between {lane.lane_id!r} and {nb.lane_id!r}")
            if lane.right_neighbor is not None:
                nb = self._lanes[lane.right_neighbor]
                if nb.left_neighbor is not None and nb.left_neighbor != lane.lane_id:
                    raise GraphIntegrityError(
                        f"left/right neighbor mismatch between {lane.lane_id!r} and {nb.lane_id!r}")

    @property
    def lane_ids(self) -> list[str]:
        return sorted(self._lanes)

    def __len__(self) -> int:
        return len(self._lanes)

    def __contains__(self, lane_id: str) -> bool:
        return lane_id in self._lanes

    def lane(self, lane_id: str) -> LaneSegment:
        try:
            return self._lanes[lane_id]
        except KeyError:
            raise GraphIntegrityError(f"unknown lane id {lane_id!r}") from None

    def lanes(self) -> list[LaneSegment]:
        return [self._lanes[i] for i in self.lane_ids]

    def candidate_lanes(self, point, pad: float = 0.0) -> list[str]:
        """Lanes whose cell neighborhood may contain the point."""
        x, y = float(point[0]), float(point[1])
        reach = int(math.ceil(pad / self.cell_size))
        ix0 = int(math.floor(x / self.cell_size))
        iy0 = int(math.floor(y / self.cell_size))
        found: set[str] = set()
        for ix in range(ix0 - reach, ix0 + reach + 1):
            for iy in range(iy0 - reach, iy0 + reach + 1):
                found.update(self._grid.get((ix, iy), ()))
        return sorted(found)

    def same_direction(self, a: str, b: str) -> bool:
        """True when two lanes share an overall travel direction."""
        ta = np.diff(self.lane(a).centerline, axis=0)
        tb = np.diff(self.lane(b).centerline, axis=0)
        ta = ta / np.linalg.norm(ta, axis=1, keepdims=True)
        tb = tb / np.linalg.norm(tb, axis=1, keepdims=True)
        return bool(np.dot(ta.sum(axis=0), tb.sum(axis=0)) > 0.0)

    def drivable_boundary(self):
        """Boundary of the union of all lane polygons (cached shapely geometry)."""
        if self._drivable_boundary is None:
            polys = [shapely.Polygon(l.polygon_ring) for l in self._lanes.values()]
            polys = [p if p.is_valid else p.buffer(0) for p in polys]
            self._drivable_boundary = shapely.union_all(polys).boundary
            shapely.prepare(self._drivable_boundary)
        return self._drivable_boundary


@dataclass
class ScenarioRecord:
    """A complete prediction problem: map, focal agent, context, optional truth."""

    graph: LaneGraph
    focal_agent: AgentState
    focal_history: Trajectory
    other_agents: list[Trajectory] = field(default_factory=list)
    ground_truth_future: Trajectory | None = None
    scenario_id: str = ""


def _parse_lane(entry: dict, idx: int) -> LaneSegment:
    prefix = f"lanes[{idx}]"
    if not isinstance(entry, dict):
        raise ScenarioParseError(prefix, "lane entry must be an object")
    for key in ("id", "centerline", "left_edge", "right_edge"):
        if key not in entry:
            raise ScenarioParseError(f"{prefix}.{key}", "missing required field")
    lane = LaneSegment(
        lane_id=entry["id"],
        centerline=entry["centerline"],
        left_edge=entry["left_edge"],
        right_edge=entry["right_edge"],
        successors=tuple(entry.get("successors", ())),
        predecessors=tuple(entry.get("predecessors", ())),
        left_neighbor=entry.get("left_neighbor"),
        right_neighbor=entry.get("right_neighbor"),
    )
    lane.validate(prefix)
    return lane


def scenario_from_dict(payload: dict, scenario_id: str = "") -> ScenarioRecord:
    """Build a validated ScenarioRecord from a parsed scenario payload."""
    if not isinstance(payload, dict):
        raise ScenarioParseError("scenario", "payload must be an object")
    for key in ("lanes", "focal_agent", "focal_history"):
        if key not in payload:
            raise ScenarioParseError(key, "missing required field")
    lanes = [_parse_lane(e, i) for i, e in enumerate(payload["lanes"])]
    if not lanes:
        raise ScenarioParseError("lanes", "scenario needs at least one lane")
    graph = LaneGraph(lanes)

    agent = payload["focal_agent"]
    if not isinstance(agent, dict):
        raise ScenarioParseError("focal_agent", "must be an object with x, y, heading, speed")
    for key in ("x", "y", "heading", "speed"):
        if key not in agent:
            raise ScenarioParseError(f"focal_agent.{key}", "missing required field")
        if not np.isfinite(float(agent[key])):
            raise ScenarioParseError(f"focal_agent.{key}", "must be finite")
    focal = AgentState.make(agent["x"], agent["y"], agent["heading"], agent["speed"])

    history = timed_rows_to_trajectory(payload["focal_history"], "focal_history")
    if len(history) > 50:
        raise ScenarioParseError("focal_history", f"at most 50 steps allowed, got {len(history)}")

    others = [
        timed_rows_to_trajectory(rows, f"other_agents[{i}]")
        for i, rows in enumerate(payload.get("other_agents", []))
    ]

    future = None
    if payload.get("ground_truth_future") is not None:
        future = timed_rows_to_trajectory(payload["ground_truth_future"], "ground_truth_future")
        if len(future) != GT_STEPS:
            raise ScenarioParseError(
                "ground_truth_future", f"expected {GT_STEPS} steps, got {len(future)}")
        if history.times[-1] >= future.times[0]:
            raise ScenarioParseError(
                "ground_truth_future", "history timestamps must precede future timestamps")

    return ScenarioRecord(
        graph=graph,
        focal_agent=focal,
        focal_history=history,
        other_agents=others,
        ground_truth_future=future,
        scenario_id=scenario_id or str(payload.get("scenario_id", "")),
    )


def load_scenario(data) -> ScenarioRecord:
    """Parse a scenario from JSON bytes or text."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        payload = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError("scenario", f"not valid JSON: {exc}") from exc
    return scenario_from_dict(payload)


def load_scenario_file(path) -> ScenarioRecord:
    with open(path, "rb") as fh:
        record = load_scenario(fh.read())
    record.scenario_id = record.scenario_id or str(path)
    return record


def find_start_lanes(
    graph: LaneGraph,
    agent: AgentState,
    lateral_max: float = START_LATERAL_MAX,
    heading_max: float = START_HEADING_MAX,
) -> list[str]:
    """Lanes the agent could currently occupy, nearest first.

    A lane qualifies when the agent position is inside its polygon or within
    ``lateral_max`` of its centerline, and the local centerline direction is
    within ``heading_max`` of the agent heading. Ties in lateral distance
    break on lane id.
    """
    p = agent.xy
    matches = []
    for lane_id in graph.candidate_lanes(p, pad=lateral_max + graph.cell_size):
        lane = graph.lane(lane_id)
        xmin, ymin, xmax, ymax = graph._bboxes[lane_id]
        if not (xmin - lateral_max <= p[0] <= xmax + lateral_max
                and ymin - lateral_max <= p[1] <= ymax + lateral_max):
            continue
        s, lateral, _ = project_to_polyline(lane.centerline, p)
        covered = bool(points_in_ring(p[None, :], lane.polygon_ring)[0])
        if not covered and lateral > lateral_max:
            continue
        tangent = tangent_at_arclength(lane.centerline, s)
        if abs(wrap_angle(math.atan2(tangent[1], tangent[0]) - agent.heading)) > heading_max:
            continue
        matches.append((lateral, lane_id))
    if not matches:
        raise NoStartLaneError(
            f"no lane within {lateral_max} m and {math.degrees(heading_max):.0f} deg of the agent pose")
    matches.sort()
    return [lane_id for _, lane_id in matches]


def on_road(graph: LaneGraph, point) -> tuple[bool, float]:
    """Whether a point is on the drivable area, plus signed clearance.

    Clearance is the distance to the nearest drivable-area boundary, positive
    inside and negative outside. Points exactly on a lane edge count as on
    the road.
    """
    inside_arr, clear_arr = on_road_batch(graph, np.asarray(point, dtype=float)[None, :])
    return bool(inside_arr[0]), float(clear_arr[0])


def on_road_batch(graph: LaneGraph, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized on_road over an (N, 2) array of points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    inside = np.zeros(len(pts), dtype=bool)
    for lane_id in graph.lane_ids:
        xmin, ymin, xmax, ymax = graph._bboxes[lane_id]
        mask = ~inside
        mask &= (pts[:, 0] >= xmin - 1e-9) & (pts[:, 0] <= xmax + 1e-9)
        mask &= (pts[:, 1] >= ymin - 1e-9) & (pts[:, 1] <= ymax + 1e-9)
        if not mask.any():
            continue
        inside[mask] |= points_in_ring(pts[mask], graph.lane(lane_id).polygon_ring)
    distance = shapely.distance(graph.drivable_boundary(), shapely.points(pts))
    return inside, np.where(inside, distance, -distance)
