"""Reference implementations used to cross-check the library.

Everything here deliberately uses a different algorithm from the package:
path selection by exhaustive enumeration instead of prioritized search,
shortest distances by iterated edge relaxation instead of a heap,
containment by winding numbers instead of ray crossing, and IoU by
rasterization instead of polygon clipping. Slow is fine; independent is
the point.
"""
from __future__ import annotations

import math

import numpy as np


# ---------------------------------------------------------------------------
# lane-graph traversal


def lateral_moves(graph, lane_id):
    """Same-direction left/right neighbors of a lane."""
    lane = graph.lane(lane_id)
    out = []
    for nb in (lane.left_neighbor, lane.right_neighbor):
        if nb is not None and graph.same_direction(lane_id, nb):
            out.append(nb)
    return out


def relaxed_distances(graph, start_lanes, budget):
    """Cheapest arc length to each reachable lane, by brute-force relaxation.

    Edge rules: moving to a same-direction neighbor is free, moving to a
    successor costs the current lane's centerline length and is only allowed
    while the budget still covers that lane. Relaxation repeats until no
    distance changes, so no priority-queue ordering is involved.
    """
    dist = {lane_id: 0.0 for lane_id in start_lanes}
    for _ in range(len(graph) * len(graph) + 1):
        changed = False
        for lane_id, d in list(dist.items()):
            lane = graph.lane(lane_id)
            moves = [(nb, d) for nb in lateral_moves(graph, lane_id)]
            if d + lane.length <= budget + 1e-9:
                moves += [(suc, d + lane.length) for suc in lane.successors]
            for nxt, nd in moves:
                if nd < dist.get(nxt, math.inf) - 1e-12:
                    dist[nxt] = nd
                    changed = True
        if not changed:
            return dist
    raise AssertionError("relaxation did not converge")


def frontier_goals(graph, start_lanes, budget):
    """Reachable lanes that end the traversal: dead ends or budget exhaustion."""
    dist = relaxed_distances(graph, start_lanes, budget)
    return {
        lane_id
        for lane_id, d in dist.items()
        if not graph.lane(lane_id).successors or d + graph.lane(lane_id).length > budget + 1e-9
    }


def side_children(graph, lane_id, side):
    """Moves out of a lane in the documented priority order for one side.

    Preferred-side neighbor first, successors in id order, opposite-side
    neighbor last.
    """
    lane = graph.lane(lane_id)
    preferred = lane.left_neighbor if side == "left" else lane.right_neighbor
    opposite = lane.right_neighbor if side == "left" else lane.left_neighbor
    out = []
    if preferred is not None and graph.same_direction(lane_id, preferred):
        out.append(preferred)
    out.extend(sorted(lane.successors))
    if opposite is not None and graph.same_direction(lane_id, opposite):
        out.append(opposite)
    return out


def _goal_reachable(graph, frm, goal, blocked):
    """True when goal is reachable from frm avoiding ``blocked`` lanes."""
    seen = {frm}
    stack = [frm]
    while stack:
        cur = stack.pop()
        if cur == goal:
            return True
        for nxt in lateral_moves(graph, cur) + sorted(graph.lane(cur).successors):
            if nxt not in seen and nxt not in blocked:
                seen.add(nxt)
                stack.append(nxt)
    return False


def all_goal_paths(graph, start, goal, cap=200_000):
    """Every simple path from start to goal, goal visited only at the end.

    Enumeration order is plain id order (not the side priority), and the
    full candidate set is returned; the caller ranks it. Prefixes that can
    no longer reach the goal are pruned, which cannot drop any candidate.
    """
    if start == goal:
        return [(start,)]
    paths = []
    expanded = 0
    stack = [(start,)]
    while stack:
        path = stack.pop()
        visited = set(path)
        expanded += 1
        if expanded > cap:
            raise AssertionError("path enumeration exceeded its work cap")
        lane_id = path[-1]
        moves = lateral_moves(graph, lane_id) + sorted(graph.lane(lane_id).successors)
        for nxt in sorted(set(moves)):
            if nxt in visited:
                continue
            if nxt == goal:
                paths.append(path + (nxt,))
                continue
            if _goal_reachable(graph, nxt, goal, visited):
                stack.append(path + (nxt,))
    return paths


def choice_string(graph, path, side):
    """Per-step child-priority indices of a path; ranks candidate paths."""
    indices = []
    for frm, to in zip(path, path[1:]):
        children = side_children(graph, frm, side)
        if to not in children:
            return None
        indices.append(children.index(to))
    return tuple(indices)


def preferred_side_path(graph, start, goal, side, cap=200_000):
    """The path a priority-first search must return: the candidate whose
    choice string is lexicographically smallest. None when no simple path
    uses only legal moves."""
    ranked = []
    for path in all_goal_paths(graph, start, goal, cap):
        key = choice_string(graph, path, side)
        if key is not None:
            ranked.append((key, path))
    if not ranked:
        return None
    return min(ranked)[1]


# ---------------------------------------------------------------------------
# planar containment and overlap


def winding_inside(points, ring, tol=1e-12):
    """Winding-number containment test for a closed ring.

    Sums the signed angles subtended by each ring edge; |winding| > 1/2
    marks the point as inside. Points on the ring are numerically fragile
    here, so tests avoid boundary-coincident queries.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    r = np.asarray(ring, dtype=float)
    if np.linalg.norm(r[0] - r[-1]) > tol:
        r = np.vstack([r, r[0]])
    v = r[None, :, :] - pts[:, None, :]            # (N, M+1, 2)
    a, b = v[:, :-1, :], v[:, 1:, :]
    cross = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    dot = np.einsum("nmj,nmj->nm", a, b)
    winding = np.arctan2(cross, dot).sum(axis=1) / (2.0 * math.pi)
    return np.abs(winding) > 0.5


def raster_iou(ring_a, ring_b, resolution=0.25):
    """Area IoU of two simple polygons by dense grid rasterization."""
    ra = np.asarray(ring_a, dtype=float)
    rb = np.asarray(ring_b, dtype=float)
    lo = np.minimum(ra.min(axis=0), rb.min(axis=0)) - resolution
    hi = np.maximum(ra.max(axis=0), rb.max(axis=0)) + resolution
    xs = np.arange(lo[0] + resolution / 2.0, hi[0], resolution)
    ys = np.arange(lo[1] + resolution / 2.0, hi[1], resolution)
    gx, gy = np.meshgrid(xs, ys)
    grid = np.column_stack([gx.ravel(), gy.ravel()])
    in_a = winding_inside(grid, ra)
    in_b = winding_inside(grid, rb)
    union = np.count_nonzero(in_a | in_b)
    if union == 0:
        return 0.0
    return np.count_nonzero(in_a & in_b) / union


def shoelace_area(ring):
    """Signed polygon area, positive for counterclockwise rings."""
    r = np.asarray(ring, dtype=float)
    x, y = r[:, 0], r[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


# ---------------------------------------------------------------------------
# curves


def circle_polyline(radius, turns=1.75, n=2000, center=None, start_angle=-math.pi / 2.0):
    """Counterclockwise circular arc through ``turns`` revolutions.

    Starts at angle ``start_angle`` (bottom of the circle by default), so a
    vehicle at the start point heading +x is tangent to the arc.
    """
    if center is None:
        center = (0.0, radius)
    angles = start_angle + np.linspace(0.0, 2.0 * math.pi * turns, n)
    return np.column_stack([
        center[0] + radius * np.cos(angles),
        center[1] + radius * np.sin(angles),
    ])
