"""Driving-corridor boundary extraction from a lane graph.

A boundary is a pair of polylines, the leftmost and rightmost drivable edges
of one reachable corridor. The pipeline is: find start lanes under the agent,
walk the graph forward to collect goal lanes, cluster adjacent goals, trace
the leftmost and rightmost lane paths per cluster with a priority
depth-first search, then smooth, resample and pair the edge geometry.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
import shapely
from scipy.interpolate import splev, splprep

from .errors import (
    AlignmentError,
    DegenerateBoundaryError,
    DegenerateClusterError,
    EmptyBoundarySetError,
    TooShortError,
    UnreachableGoalError,
)
from .geometry import (
    cross2,
    cum_arclength,
    dedupe_points,
    min_distance_to_polyline,
    polygon_area,
    polyline_length,
    polylines_cross,
    resample_at_spacing,
    sample_at_arclengths,
)
from .map_graph import (
    START_HEADING_MAX,
    START_LATERAL_MAX,
    LaneGraph,
    ScenarioRecord,
    find_start_lanes,
)
from .motion import AgentState

MAX_ARC_LENGTH = 150.0     # forward traversal budget, meters
SAMPLE_SPACING = 1.0
MAX_POINTS = 150
MAX_SMOOTH_DEVIATION = 0.5
IOU_THRESHOLD = 0.8
MAX_BOUNDARIES = 6
MIN_RAW_LENGTH = 2.0


@dataclass
class Boundary:
    """Aligned left/right corridor edges with equal point counts.

    Point i of ``left`` corresponds to point i of ``right``; corresponding
    points sit at equal arc-length fractions of their polylines.
    """

    left: np.ndarray
    right: np.ndarray
    left_lane_path: tuple[str, ...] = ()
    right_lane_path: tuple[str, ...] = ()

    def __post_init__(self):
        self.left = np.asarray(self.left, dtype=float)
        self.right = np.asarray(self.right, dtype=float)

    def __len__(self) -> int:
        return len(self.left)

    @property
    def polygon_ring(self) -> np.ndarray:
        return np.vstack([self.left, self.right[::-1]])

    @property
    def midline(self) -> np.ndarray:
        return (self.left + self.right) / 2.0

    @property
    def area(self) -> float:
        return polygon_area(self.polygon_ring)

    def validate(self):
        if len(self.left) != len(self.right):
            raise AlignmentError(
                f"point counts differ: {len(self.left)} left vs {len(self.right)} right")
        if len(self.left) < 2:
            raise DegenerateBoundaryError("boundary needs at least two point pairs")
        if len(self.left) > MAX_POINTS:
            raise DegenerateBoundaryError(f"boundary exceeds {MAX_POINTS} points")
        if not (np.all(np.isfinite(self.left)) and np.all(np.isfinite(self.right))):
            raise DegenerateBoundaryError("non-finite boundary coordinate")
        # left points must sit left of the travel direction, right points right
        mid = self.midline
        tangents = np.diff(mid, axis=0)
        tangents = np.vstack([tangents, tangents[-1]])
        across = self.left - self.right
        if not np.all(cross2(tangents, across) > 0.0):
            raise DegenerateBoundaryError("left/right sides are swapped or pinched")
        if polylines_cross(self.left, self.right):
            raise DegenerateBoundaryError("left and right edges cross")
        if self.area <= 0.0:
            raise DegenerateBoundaryError("boundary polygon has no area")


@dataclass
class RawBoundary:
    """Lane paths and unsmoothed edge geometry for one goal cluster."""

    left_path: tuple[str, ...]
    right_path: tuple[str, ...]
    left_points: np.ndarray
    right_points: np.ndarray


def reachable_lanes(graph: LaneGraph, start_lanes, max_arc_length: float = MAX_ARC_LENGTH) -> dict[str, float]:
    """Shortest cumulative arc length to every lane reachable from the starts.

    Successor moves cost the current lane's centerline length; moves to a
    same-direction left/right neighbor cost nothing. Successors are only
    expanded while the budget covers the current lane.
    """
    dist: dict[str, float] = {}
    heap: list[tuple[float, str]] = []
    for lane_id in sorted(start_lanes):
        dist[lane_id] = 0.0
        heapq.heappush(heap, (0.0, lane_id))
    while heap:
        d, lane_id = heapq.heappop(heap)
        if d > dist.get(lane_id, math.inf) + 1e-12:
            continue
        lane = graph.lane(lane_id)
        moves = []
        for nb in (lane.left_neighbor, lane.right_neighbor):
            if nb is not None and graph.same_direction(lane_id, nb):
                moves.append((nb, d))
        if d + lane.length <= max_arc_length + 1e-9:
            for suc in sorted(lane.successors):
                moves.append((suc, d + lane.length))
        for nxt, nd in moves:
            if nd < dist.get(nxt, math.inf) - 1e-12:
                dist[nxt] = nd
                heapq.heappush(heap, (nd, nxt))
    return dist


def reachable_goal_lanes(graph: LaneGraph, start_lanes, max_arc_length: float = MAX_ARC_LENGTH) -> set[str]:
    """Traversal-frontier lanes: no successor, or the arc budget ends on them."""
    dist = reachable_lanes(graph, start_lanes, max_arc_length)
    goals = set()
    for lane_id, d in dist.items():
        lane = graph.lane(lane_id)
        if not lane.successors or d + lane.length > max_arc_length + 1e-9:
            goals.add(lane_id)
    return goals


def cluster_goals(graph: LaneGraph, goal_ids) -> list[tuple[str, str]]:
    """Group goal lanes laterally adjacent to each other.

    Returns one (leftmost, rightmost) pair per connected component of the
    goal set under same-direction left/right neighbor edges, sorted by the
    leftmost lane id.
    """
    goals = sorted(set(goal_ids))
    goalset = set(goals)
    adjacency: dict[str, set[str]] = {g: set() for g in goals}
    for g in goals:
        lane = graph.lane(g)
        for nb in (lane.left_neighbor, lane.right_neighbor):
            if nb in goalset and graph.same_direction(g, nb):
                adjacency[g].add(nb)
                adjacency[nb].add(g)
    clusters = []
    seen: set[str] = set()
    for g in goals:
        if g in seen:
            continue
        component = []
        stack = [g]
        seen.add(g)
        while stack:
            cur = stack.pop()
            component.append(cur)
            for nb in sorted(adjacency[cur]):
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        comp = set(component)
        leftmost = [c for c in component if graph.lane(c).left_neighbor not in comp]
        rightmost = [c for c in component if graph.lane(c).right_neighbor not in comp]
        if not leftmost or not rightmost:
            raise DegenerateClusterError(
                f"cyclic neighbor relation in goal cluster {sorted(comp)}")
        clusters.append((min(leftmost), min(rightmost)))
    clusters.sort()
    return clusters


def _priority_dfs(graph: LaneGraph, start: str, goal: str, lateral_attr: str) -> tuple[str, ...] | None:
    """First simple path from start to goal, preferring one lateral side.

    Children of a lane are its same-direction lateral neighbor on the
    preferred side, then its successors in id order, then the opposite
    neighbor as a last resort (so goals on either side of the start stay
    reachable). Backtracking makes the result the lexicographically first
    simple path under that child ordering: the path hugs the preferred side
    as long as the goal remains reachable from it.
    """
    opposite_attr = "right_neighbor" if lateral_attr == "left_neighbor" else "left_neighbor"

    def children(lane_id: str) -> list[str]:
        lane = graph.lane(lane_id)
        out = []
        nb = getattr(lane, lateral_attr)
        if nb is not None and graph.same_direction(lane_id, nb):
            out.append(nb)
        out.extend(sorted(lane.successors))
        nb = getattr(lane, opposite_attr)
        if nb is not None and graph.same_direction(lane_id, nb):
            out.append(nb)
        return out

    path = [start]
    on_path = {start}
    iterators = [iter(children(start))]
    if start == goal:
        return (start,)
    while iterators:
        try:
            nxt = next(iterators[-1])
        except StopIteration:
            iterators.pop()
            on_path.discard(path.pop())
            continue
        if nxt in on_path:
            continue
        path.append(nxt)
        if nxt == goal:
            return tuple(path)
        on_path.add(nxt)
        iterators.append(iter(children(nxt)))
    return None


def _path_edge_geometry(graph: LaneGraph, path: tuple[str, ...], edge_attr: str) -> np.ndarray:
    """Concatenated edge polylines of a lane path.

    A lane exited sideways is skipped: its neighbor spans the same
    longitudinal extent, so keeping both would fold the polyline back on
    itself. Coincident junction points are dropped.
    """
    pieces = []
    for i, lane_id in enumerate(path):
        lane = graph.lane(lane_id)
        if i + 1 < len(path) and path[i + 1] not in lane.successors:
            continue
        pieces.append(getattr(lane, edge_attr))
    out = pieces[0]
    for piece in pieces[1:]:
        if np.linalg.norm(piece[0] - out[-1]) <= 1e-6:
            piece = piece[1:]
        out = np.vstack([out, piece])
    return dedupe_points(out, tol=1e-9)


def extract_boundary(graph: LaneGraph, start: str, cluster: tuple[str, str]) -> RawBoundary:
    """Leftmost and rightmost lane paths from a start lane to a goal cluster.

    The left path targets the cluster's leftmost lane and prefers
    left-neighbor moves over successor moves at every step; the right path is
    symmetric. Raises UnreachableGoalError when either target cannot be
    reached, which signals an inconsistent cluster.
    """
    leftmost, rightmost = cluster
    left_path = _priority_dfs(graph, start, leftmost, "left_neighbor")
    if left_path is None:
        raise UnreachableGoalError(f"no left path from {start!r} to {leftmost!r}")
    right_path = _priority_dfs(graph, start, rightmost, "right_neighbor")
    if right_path is None:
        raise UnreachableGoalError(f"no right path from {start!r} to {rightmost!r}")
    return RawBoundary(
        left_path=left_path,
        right_path=right_path,
        left_points=_path_edge_geometry(graph, left_path, "left_edge"),
        right_points=_path_edge_geometry(graph, right_path, "right_edge"),
    )


def sample_and_smooth(
    raw: np.ndarray,
    spacing: float = SAMPLE_SPACING,
    max_points: int = MAX_POINTS,
    max_deviation: float = MAX_SMOOTH_DEVIATION,
) -> np.ndarray:
    """Smooth a raw polyline and resample it at a fixed arc-length step.

    Fits a cubic smoothing spline, loosest first, and tightens it until the
    curve stays within ``max_deviation`` of the raw polyline. The result is
    sampled every ``spacing`` meters and truncated at
    ``(max_points - 1) * spacing`` so at most ``max_points`` points remain;
    shorter inputs keep their true end point.
    """
    pts = dedupe_points(np.asarray(raw, dtype=float), tol=1e-9)
    if len(pts) < 2 or polyline_length(pts) < MIN_RAW_LENGTH:
        raise TooShortError(
            f"raw boundary is {polyline_length(pts) if len(pts) > 1 else 0.0:.2f} m, need {MIN_RAW_LENGTH} m")
    dense = resample_at_spacing(pts, spacing / 2.0)
    u = cum_arclength(dense)
    u /= u[-1]
    k = min(3, len(dense) - 1)
    smooth = dense
    for rms in (0.25, 0.125, 0.0625, 0.0):
        tck, _ = splprep([dense[:, 0], dense[:, 1]], u=u, k=k, s=len(dense) * rms * rms)
        uu = np.linspace(0.0, 1.0, max(4 * len(dense), 200))
        candidate = np.stack(splev(uu, tck), axis=1)
        check = np.stack(splev(u, tck), axis=1)
        deviation = min_distance_to_polyline(pts, check).max()
        if deviation <= max_deviation:
            smooth = candidate
            break
    total = polyline_length(smooth)
    cut = min(total, (max_points - 1) * spacing)
    arcs = np.arange(0.0, cut + 1e-9, spacing)
    if cut - arcs[-1] > 1e-6:
        arcs = np.append(arcs, cut)
    return sample_at_arclengths(smooth, arcs)


def align_pair(left: np.ndarray, right: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pair two sampled polylines point-for-point.

    Both sides end up with the smaller of the two point counts; the longer
    side is resampled at equal arc-length fractions, so point i of each side
    sits at fraction i/(n-1) of its own length.
    """
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    if len(left) < 2 or len(right) < 2:
        raise AlignmentError("both sides need at least two points")
    n = min(len(left), len(right))

    def to_count(pts):
        if len(pts) == n:
            return pts
        return sample_at_arclengths(pts, polyline_length(pts) * np.linspace(0.0, 1.0, n))

    return to_count(left), to_count(right)


def boundary_iou(a: Boundary, b: Boundary) -> float:
    """Area IoU of two boundary polygons."""
    pa = shapely.Polygon(a.polygon_ring)
    pb = shapely.Polygon(b.polygon_ring)
    if not pa.is_valid:
        pa = pa.buffer(0)
    if not pb.is_valid:
        pb = pb.buffer(0)
    inter = pa.intersection(pb).area
    union = pa.union(pb).area
    if union <= 0.0:
        return 0.0
    return inter / union


def select_boundaries(
    candidates: list[Boundary],
    max_count: int = MAX_BOUNDARIES,
    iou_threshold: float = IOU_THRESHOLD,
) -> list[Boundary]:
    """Greedy non-maximum suppression of overlapping boundaries.

    Candidates are ranked by polygon area; a candidate is dropped when its
    IoU with an already kept boundary exceeds the threshold. At most
    ``max_count`` survive.
    """
    order = sorted(
        range(len(candidates)),
        key=lambda i: (-candidates[i].area, candidates[i].left_lane_path, i),
    )
    kept: list[Boundary] = []
    for i in order:
        if len(kept) >= max_count:
            break
        cand = candidates[i]
        if any(boundary_iou(cand, k) > iou_threshold for k in kept):
            continue
        kept.append(cand)
    return kept


def generate_boundary_set(
    graph: LaneGraph,
    agent: AgentState,
    max_arc_length: float = MAX_ARC_LENGTH,
    max_count: int = MAX_BOUNDARIES,
    iou_threshold: float = IOU_THRESHOLD,
    lateral_max: float = START_LATERAL_MAX,
    heading_max: float = START_HEADING_MAX,
) -> list[Boundary]:
    """Full boundary pipeline for one agent on one map.

    Every goal cluster is tried from every start lane, nearest start first;
    the first start that reaches both cluster extremes supplies the
    geometry. Clusters that fail extraction or validation are skipped.
    Raises EmptyBoundarySetError when no cluster survives.
    """
    starts = find_start_lanes(graph, agent, lateral_max=lateral_max, heading_max=heading_max)
    goals = reachable_goal_lanes(graph, starts, max_arc_length)
    clusters = cluster_goals(graph, goals)
    candidates: list[Boundary] = []
    for cluster in clusters:
        for start in starts:
            try:
                raw = extract_boundary(graph, start, cluster)
                left = sample_and_smooth(raw.left_points)
                right = sample_and_smooth(raw.right_points)
                left, right = align_pair(left, right)
                boundary = Boundary(left, right, raw.left_path, raw.right_path)
                boundary.validate()
            except (AlignmentError, DegenerateBoundaryError, TooShortError, UnreachableGoalError):
                continue
            candidates.append(boundary)
            break
    if not candidates:
        raise EmptyBoundarySetError(
            f"all {len(clusters)} goal clusters failed boundary extraction")
    return select_boundaries(candidates, max_count=max_count, iou_threshold=iou_threshold)


def boundary_set_for(scenario: ScenarioRecord, **kwargs) -> list[Boundary]:
    return generate_boundary_set(scenario.graph, scenario.focal_agent, **kwargs)
