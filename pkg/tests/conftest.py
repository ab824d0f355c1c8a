"""Shared hand-built fixtures.

The maps here are small enough to reason about on paper: straight lanes on
integer coordinates, 3 m wide, axis aligned. Anything needing realistic
geometry uses the synthetic scenario generator instead.
"""
from __future__ import annotations

import numpy as np
import pytest

from lanebound import LaneGraph, LaneSegment, scenario_from_dict

LANE_W = 3.0


def lane_dict(lane_id, x0, x1, y_center, width=LANE_W, n=7, **links):
    """Axis-aligned straight lane running +x as a scenario payload entry."""
    xs = np.linspace(x0, x1, n)
    half = width / 2.0

    def line(y):
        return [[float(x), float(y)] for x in xs]

    entry = {
        "id": lane_id,
        "centerline": line(y_center),
        "left_edge": line(y_center + half),
        "right_edge": line(y_center - half),
    }
    entry.update(links)
    return entry


def straight_lane(lane_id, x0, x1, y_center, width=LANE_W, n=7, **links) -> LaneSegment:
    d = lane_dict(lane_id, x0, x1, y_center, width, n)
    lane = LaneSegment(
        lane_id=d["id"],
        centerline=d["centerline"],
        left_edge=d["left_edge"],
        right_edge=d["right_edge"],
        successors=tuple(links.get("successors", ())),
        predecessors=tuple(links.get("predecessors", ())),
        left_neighbor=links.get("left_neighbor"),
        right_neighbor=links.get("right_neighbor"),
    )
    lane.validate(lane_id)
    return lane


def two_lane_payload(with_future=True):
    """Two parallel lanes, two sections each, agent mid-right-lane.

    Right lane centerline is y=0, left lane y=3. Sections split at x=60.
    The agent sits at (10, 0) heading +x at 8 m/s; the recorded future is a
    constant-velocity continuation along the right centerline.
    """
    lanes = [
        lane_dict("r0", 0, 60, 0.0, successors=["r1"], left_neighbor="l0"),
        lane_dict("r1", 60, 120, 0.0, predecessors=["r0"], left_neighbor="l1"),
        lane_dict("l0", 0, 60, 3.0, successors=["l1"], right_neighbor="r0"),
        lane_dict("l1", 60, 120, 3.0, predecessors=["l0"], right_neighbor="r1"),
    ]
    dt = 0.1
    speed = 8.0
    history = [
        [round((i - 19) * dt, 1), 10.0 - speed * dt * (19 - i), 0.0, 0.0, speed]
        for i in range(20)
    ]
    payload = {
        "scenario_id": "two-lane",
        "lanes": lanes,
        "focal_agent": {"x": 10.0, "y": 0.0, "heading": 0.0, "speed": speed},
        "focal_history": history,
    }
    if with_future:
        payload["ground_truth_future"] = [
            [round((i + 1) * dt, 1), 10.0 + speed * dt * (i + 1), 0.0, 0.0, speed]
            for i in range(60)
        ]
    return payload


@pytest.fixture
def two_lane_scenario():
    return scenario_from_dict(two_lane_payload())


@pytest.fixture
def two_lane_graph(two_lane_scenario):
    return two_lane_scenario.graph


def grid_lane_graph(rows) -> LaneGraph:
    """LaneGraph from straight_lane rows given as keyword tuples."""
    return LaneGraph([straight_lane(*args, **kwargs) for args, kwargs in rows])
