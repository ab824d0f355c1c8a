"""Seeded synthetic scenes: archetype roads, corpora, and random test graphs.

Every generator takes integer seeds and produces identical output for
identical seeds regardless of process or platform (PCG64 streams). Scenes are
built in a canonical frame and then placed with a random rigid transform, so
nothing downstream can rely on axis alignment.
"""
from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .boundaries import boundary_set_for
from .geometry import dedupe_points, rigid_transform, sample_at_arclengths, tangent_at_arclength
from .map_graph import LaneGraph, LaneSegment, ScenarioRecord
from .motion import AgentState, Trajectory
from .pursuit import PursuitParams, rollout
from .superposition import superimpose

LANE_WIDTH = 3.5
HISTORY_STEPS = 50
SPEED_RANGE = (5.0, 9.0)
START_ARC_RANGE = (46.0, 58.0)   # places >= 4.9 s of history on the road
SECTION_SPACING = 5.0

ARCHETYPES = ("straight", "curved", "split", "merge", "intersection")
# Warp probes run on archetypes without junction cross-streets.
ATTACK_ARCHETYPES = ("straight", "curved", "split", "merge")


def _line(p0, heading: float, length: float, spacing: float = SECTION_SPACING):
    """Straight reference piece: (points, left normals, end heading)."""
    n = max(2, int(round(length / spacing)) + 1)
    t = np.linspace(0.0, length, n)
    e = np.array([math.cos(heading), math.sin(heading)])
    pts = np.asarray(p0, dtype=float) + t[:, None] * e
    nrm = np.tile([-e[1], e[0]], (n, 1))
    return pts, nrm, heading


def _arc(p0, heading: float, length: float, radius: float, spacing: float = SECTION_SPACING):
    """Constant-curvature reference piece; positive radius bends left."""
    n = max(3, int(round(length / spacing)) + 1)
    t = np.linspace(0.0, length, n)
    h = heading + t / radius
    x = p0[0] + radius * (np.sin(h) - math.sin(heading))
    y = p0[1] - radius * (np.cos(h) - math.cos(heading))
    pts = np.stack([x, y], axis=1)
    nrm = np.stack([-np.sin(h), np.cos(h)], axis=1)
    return pts, nrm, heading + length / radius


def _road(prefix: str, pieces, n_lanes: int, width: float = LANE_WIDTH):
    """Multi-lane road along a reference line split into chained sections.

    ``pieces`` is a list of (points, normals) reference sections in travel
    order; section k feeds section k+1 lane by lane. Lane index 0 is the
    rightmost. Returns the lane segments plus one full-length centerline
    chain per lane index (used to place agents and histories).
    """
    lanes = []
    chains: list[list[np.ndarray]] = [[] for _ in range(n_lanes)]
    for s, (pts, nrm) in enumerate(pieces):
        for r in range(n_lanes):
            off = (r - (n_lanes - 1) / 2.0) * width
            lanes.append(LaneSegment(
                lane_id=f"{prefix}{s}_{r}",
                centerline=pts + off * nrm,
                left_edge=pts + (off + width / 2.0) * nrm,
                right_edge=pts + (off - width / 2.0) * nrm,
                successors=(f"{prefix}{s + 1}_{r}",) if s + 1 < len(pieces) else (),
                predecessors=(f"{prefix}{s - 1}_{r}",) if s > 0 else (),
                left_neighbor=f"{prefix}{s}_{r + 1}" if r + 1 < n_lanes else None,
                right_neighbor=f"{prefix}{s}_{r - 1}" if r > 0 else None,
            ))
            chains[r].append(lanes[-1].centerline)
    return lanes, [dedupe_points(np.concatenate(c)) for c in chains]


def _chop(builder, p0, heading, total: float, n_sections: int, **kwargs):
    """Split one reference curve into n chained sections."""
    pieces = []
    pos, h = np.asarray(p0, dtype=float), heading
    for _ in range(n_sections):
        pts, nrm, h = builder(pos, h, total / n_sections, **kwargs)
        pieces.append((pts, nrm))
        pos = pts[-1]
    return pieces


def _link(lanes, src: str, dst: str):
    """Add a successor/predecessor pair between lanes in a list."""
    by_id = {l.lane_id: l for l in lanes}
    by_id[src].successors = by_id[src].successors + (dst,)
    by_id[dst].predecessors = by_id[dst].predecessors + (src,)


def _straight(rng):
    n = int(rng.integers(2, 4))
    lanes, chains = _road("st", _chop(_line, (0.0, 0.0), 0.0, 210.0, 3), n)
    return lanes, chains


def _curved(rng):
    n = int(rng.integers(2, 4))
    radius = float(rng.choice([-1.0, 1.0]) * rng.uniform(150.0, 400.0))
    lanes, chains = _road("cv", _chop(_arc, (0.0, 0.0), 0.0, 210.0, 3, radius=radius), n)
    return lanes, chains


def _split(rng):
    stem_lanes, stem_chains = _road("sp", _chop(_line, (0.0, 0.0), 0.0, 110.0, 2), 2)
    end = np.array([110.0, 0.0])
    r_left = float(rng.uniform(180.0, 320.0))
    r_right = float(rng.uniform(180.0, 320.0))
    left_lanes, _ = _road(
        "spL", _chop(_arc, end + [0.0, LANE_WIDTH / 2.0], 0.0, 100.0, 2, radius=r_left), 1)
    right_lanes, _ = _road(
        "spR", _chop(_arc, end - [0.0, LANE_WIDTH / 2.0], 0.0, 100.0, 2, radius=-r_right), 1)
    lanes = stem_lanes + left_lanes + right_lanes
    _link(lanes, "sp1_1", "spL0_0")
    _link(lanes, "sp1_0", "spR0_0")
    return lanes, stem_chains


def _merge(rng):
    main_lanes, main_chains = _road("mg", _chop(_line, (0.0, 0.0), 0.0, 110.0, 2), 1)
    # the merged road's left lane continues the main road; the right lane
    # is fed by a ramp blending in from the right
    out_lanes, _ = _road(
        "mo", _chop(_line, (110.0, -LANE_WIDTH / 2.0), 0.0, 100.0, 2), 2)
    theta = float(rng.uniform(0.18, 0.30))
    ramp_len = float(rng.uniform(50.0, 70.0))
    radius = ramp_len / theta
    # run the blending arc backward from the junction point to find the
    # ramp's entry pose
    x0 = 110.0 - radius * (math.sin(theta) - 0.0)
    y0 = -LANE_WIDTH + radius * (1.0 - math.cos(theta))
    ramp_lanes, _ = _road("mr", _chop(_arc, (x0, y0), theta, ramp_len, 1, radius=-radius), 1)
    lanes = main_lanes + out_lanes + ramp_lanes
    _link(lanes, "mg1_0", "mo0_1")
    _link(lanes, "mr0_0", "mo0_0")
    return lanes, main_chains


def _intersection(rng):
    h = 12.0
    approach, chains = _road("ap", _chop(_line, (-h - 90.0, 0.0), 0.0, 90.0, 2), 1)
    exits = []
    exits += _road("xs", _chop(_line, (h, 0.0), 0.0, 90.0, 2), 1)[0]
    exits += _road("xl", _chop(_line, (0.0, h), math.pi / 2.0, 90.0, 2), 1)[0]
    exits += _road("xr", _chop(_line, (0.0, -h), -math.pi / 2.0, 90.0, 2), 1)[0]
    quarter = math.pi / 2.0 * h
    conn = []
    conn += _road("cs", [_line((-h, 0.0), 0.0, 2.0 * h)[:2]], 1)[0]
    conn += _road("cl", [_arc((-h, 0.0), 0.0, quarter, h)[:2]], 1)[0]
    conn += _road("cr", [_arc((-h, 0.0), 0.0, quarter, -h)[:2]], 1)[0]
    lanes = approach + exits + conn
    for c, x in (("cs0_0", "xs"), ("cl0_0", "xl"), ("cr0_0", "xr")):
        _link(lanes, "ap1_0", c)
        _link(lanes, c, f"{x}0_0")
    return lanes, chains


_BUILDERS = {
    "straight": _straight,
    "curved": _curved,
    "split": _split,
    "merge": _merge,
    "intersection": _intersection,
}


def make_scenario(seed: int, archetype: str | None = None, scenario_id: str = "") -> ScenarioRecord:
    """One synthetic scenario; identical seeds give identical scenes."""
    rng = np.random.default_rng(seed)
    if archetype is None:
        archetype = str(rng.choice(ARCHETYPES))
    lanes, chains = _BUILDERS[archetype](rng)

    angle = float(rng.uniform(-math.pi, math.pi))
    shift = rng.uniform(-400.0, 400.0, 2)
    for lane in lanes:
        lane.centerline = rigid_transform(lane.centerline, angle, shift)
        lane.left_edge = rigid_transform(lane.left_edge, angle, shift)
        lane.right_edge = rigid_transform(lane.right_edge, angle, shift)
        lane.validate(f"lane {lane.lane_id}")
    chains = [rigid_transform(c, angle, shift) for c in chains]

    chain = chains[int(rng.integers(len(chains)))]
    s0 = float(rng.uniform(*START_ARC_RANGE))
    speed = float(rng.uniform(*SPEED_RANGE))
    dt = 0.1
    arcs = s0 - speed * dt * np.arange(HISTORY_STEPS - 1, -1, -1)
    pts = sample_at_arclengths(chain, arcs)
    rows = np.empty((HISTORY_STEPS, 4))
    rows[:, :2] = pts
    rows[:, 2] = [math.atan2(*tangent_at_arclength(chain, s)[::-1]) for s in arcs]
    rows[:, 3] = speed
    history = Trajectory(rows, dt=dt, t0=-dt * (HISTORY_STEPS - 1))

    return ScenarioRecord(
        graph=LaneGraph(lanes),
        focal_agent=history.end_state,
        focal_history=history,
        ground_truth_future=None,
        scenario_id=scenario_id or f"{archetype}-{seed}",
    )


def attach_ground_truth(scenario: ScenarioRecord, seed: int,
                        params: PursuitParams = PursuitParams()) -> ScenarioRecord:
    """Scenario copy whose future is a feasible rollout on one of its boundaries."""
    rng = np.random.default_rng(seed)
    boundaries = boundary_set_for(scenario)
    boundary = boundaries[int(rng.integers(len(boundaries)))]
    n = len(boundary.midline)
    base = rng.uniform(0.3, 0.7)
    drift = rng.uniform(-0.25, 0.25) * np.linspace(0.0, 1.0, n)
    wiggle = rng.uniform(0.0, 0.15) * np.sin(
        2.0 * math.pi * np.arange(n) / rng.uniform(60.0, 160.0) + rng.uniform(0.0, 2.0 * math.pi))
    weights = np.clip(base + drift + wiggle, 0.1, 0.9)
    accels = np.convolve(rng.uniform(-1.5, 1.5, params.steps), np.ones(10) / 10.0, mode="same")
    traj = rollout(scenario.focal_agent, superimpose(boundary, weights), accels, params)
    future = Trajectory(traj.data[1:], dt=params.dt,
                        t0=scenario.focal_history.times[-1] + params.dt)
    return replace(scenario, ground_truth_future=future)


def make_corpus(count: int, seed: int = 0, archetypes=ARCHETYPES,
                with_ground_truth: bool = False) -> list[ScenarioRecord]:
    """Round-robin archetype corpus; element i depends only on (seed, i)."""
    out = []
    for i in range(count):
        arch = archetypes[i % len(archetypes)]
        scn = make_scenario(np.random.default_rng([seed, i]).integers(2**63),
                            arch, scenario_id=f"{arch}-{i:04d}")
        if with_ground_truth:
            scn = attach_ground_truth(scn, seed=i + 1)
        out.append(scn)
    return out


def make_grid_graph(seed: int) -> tuple[LaneGraph, str]:
    """Random small lane grid for stressing routing against oracles.

    Columns of parallel lanes with random presence, random straight or
    diagonal successor links, and mutual neighbor links within a column.
    Returns the graph and a start lane in column 0. At most 30 lanes.
    """
    rng = np.random.default_rng(seed)
    cols = int(rng.integers(3, 7))
    lane_rows = int(rng.integers(2, 6))
    xs = np.concatenate([[0.0], np.cumsum(rng.uniform(25.0, 70.0, cols))])
    present = rng.random((cols, lane_rows)) < 0.85
    present[0, int(rng.integers(lane_rows))] = True

    def lane_id(c, r):
        return f"g{c}_{r}"

    lanes = []
    for c in range(cols):
        for r in range(lane_rows):
            if not present[c, r]:
                continue
            y = r * LANE_WIDTH
            pts = np.array([[xs[c], y], [xs[c + 1], y]])
            succ = tuple(
                lane_id(c + 1, r2)
                for r2 in range(max(0, r - 1), min(lane_rows, r + 2))
                if c + 1 < cols and present[c + 1, r2]
                and rng.random() < (0.9 if r2 == r else 0.25))
            lanes.append(LaneSegment(
                lane_id=lane_id(c, r),
                centerline=pts,
                left_edge=pts + [0.0, LANE_WIDTH / 2.0],
                right_edge=pts - [0.0, LANE_WIDTH / 2.0],
                successors=succ,
                left_neighbor=lane_id(c, r + 1) if r + 1 < lane_rows and present[c, r + 1] else None,
                right_neighbor=lane_id(c, r - 1) if r > 0 and present[c, r - 1] else None,
            ))
    by_id = {l.lane_id: l for l in lanes}
    for lane in lanes:
        for s in lane.successors:
            by_id[s].predecessors = by_id[s].predecessors + (lane.lane_id,)
    start = lane_id(0, int(np.flatnonzero(present[0])[0]))
    return LaneGraph(lanes), start
