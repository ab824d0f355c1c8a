"""Geometry-warping robustness probes.

A warp bends all map polylines in the focal agent's frame while leaving the
observed histories untouched, so the agent's past stays consistent with the
road it actually drove. Warps start beyond a protected zone ahead of the
agent and grow with a power index; the recorded future is dropped because it
no longer matches the warped map.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateWarpError, ScenarioParseError
from .map_graph import LaneGraph, LaneSegment, ScenarioRecord
from .motion import AgentState

KINDS = ("smooth_turn", "double_turn", "ripple_road")
PROTECTED_AHEAD = 5.0        # m of unwarped road ahead of the agent
POWER_LEVELS = 18            # power_index runs 0 .. 17; 0 is the identity
ALPHA_MAX = 0.012            # curvature gain at full power, 1/m
AMPLITUDE_MAX = 3.0          # ripple amplitude at full power, m
RIPPLE_WAVELENGTH = 40.0     # m
DOUBLE_TURN_MID = 30.0       # m of curving before the mirrored segment


@dataclass(frozen=True)
class AttackSpec:
    """One warp: kind, strength index (0..17), and bend direction."""

    kind: str
    power_index: int
    sign: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ScenarioParseError("attack.kind", f"must be one of {KINDS}, got {self.kind!r}")
        if not (0 <= self.power_index < POWER_LEVELS):
            raise ScenarioParseError(
                "attack.power_index", f"must be in [0, {POWER_LEVELS - 1}], got {self.power_index}")
        if self.sign not in (-1, 1):
            raise ScenarioParseError("attack.sign", f"must be +1 or -1, got {self.sign}")

    @property
    def power(self) -> float:
        return self.power_index / (POWER_LEVELS - 1)

    @property
    def label(self) -> str:
        s = "+" if self.sign > 0 else "-"
        return f"{self.kind}_p{self.power_index:02d}{s}"


def _lateral_offset(spec: AttackSpec, u: np.ndarray) -> np.ndarray:
    """Warp offset as a function of distance past the protected zone."""
    alpha = spec.power * ALPHA_MAX
    amp = spec.power * AMPLITUDE_MAX
    if spec.kind == "smooth_turn":
        off = alpha * u * u
    elif spec.kind == "double_turn":
        # quadratic bend, then the mirrored bend until the road runs
        # parallel to its original direction, then a constant shift
        u1 = np.minimum(u, DOUBLE_TURN_MID)
        u2 = np.clip(u - DOUBLE_TURN_MID, 0.0, DOUBLE_TURN_MID)
        off = alpha * u1 * u1 + 2.0 * alpha * DOUBLE_TURN_MID * u2 - alpha * u2 * u2
    else:
        off = amp * np.sin(2.0 * np.pi / RIPPLE_WAVELENGTH * u)
    return spec.sign * off


def warp_points(points: np.ndarray, agent: AgentState, spec: AttackSpec) -> np.ndarray:
    """Warp an array of points in the agent frame.

    Points whose longitudinal coordinate (along the agent heading) is within
    the protected zone, or anywhere behind the agent, are unchanged; beyond
    it they shift laterally by the warp offset.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    e = np.array([math.cos(agent.heading), math.sin(agent.heading)])
    nvec = np.array([-e[1], e[0]])
    rel = pts - agent.xy
    s = rel @ e
    d = rel @ nvec
    u = np.maximum(s - PROTECTED_AHEAD, 0.0)
    d_new = d + _lateral_offset(spec, u)
    return agent.xy + s[:, None] * e + d_new[:, None] * nvec


def warp_point(point, agent: AgentState, spec: AttackSpec) -> np.ndarray:
    return warp_points(np.asarray(point, dtype=float)[None, :], agent, spec)[0]


def apply_attack(scenario: ScenarioRecord, spec: AttackSpec, warp_agents: bool = False) -> ScenarioRecord:
    """Warped copy of a scenario.

    All lane polylines are warped; connectivity and ids are untouched. The
    focal agent and every history stay where they were unless
    ``warp_agents`` also moves the other agents' positions. The recorded
    future is dropped. Raises DegenerateWarpError when a warped lane folds
    onto itself.
    """
    agent = scenario.focal_agent
    lanes = []
    for lane in scenario.graph.lanes():
        warped = LaneSegment(
            lane_id=lane.lane_id,
            centerline=warp_points(lane.centerline, agent, spec),
            left_edge=warp_points(lane.left_edge, agent, spec),
            right_edge=warp_points(lane.right_edge, agent, spec),
            successors=lane.successors,
            predecessors=lane.predecessors,
            left_neighbor=lane.left_neighbor,
            right_neighbor=lane.right_neighbor,
        )
        try:
            warped.validate(f"lane {lane.lane_id}")
        except ScenarioParseError as exc:
            raise DegenerateWarpError(
                f"{spec.label} folds lane {lane.lane_id!r}: {exc}") from exc
        lanes.append(warped)
    others = scenario.other_agents
    if warp_agents:
        others = []
        for traj in scenario.other_agents:
            data = traj.data.copy()
            data[:, :2] = warp_points(data[:, :2], agent, spec)
            others.append(replace(traj, data=data))
    return ScenarioRecord(
        graph=LaneGraph(lanes),
        focal_agent=scenario.focal_agent,
        focal_history=scenario.focal_history,
        other_agents=others,
        ground_truth_future=None,
        scenario_id=f"{scenario.scenario_id}@{spec.label}" if scenario.scenario_id else spec.label,
    )


def attack_grid(sign: int = 1) -> list[AttackSpec]:
    """The full probe grid: every kind at every power level."""
    return [AttackSpec(kind, p, sign) for kind in KINDS for p in range(POWER_LEVELS)]
