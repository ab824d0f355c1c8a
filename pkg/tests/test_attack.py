"""Geometry warps: hand offsets, protected zone, scenario surgery."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lanebound import AgentState, apply_attack, attack_grid
from lanebound.attack import KINDS, POWER_LEVELS, AttackSpec, warp_point, warp_points
from lanebound.errors import ScenarioParseError
from lanebound.map_graph import scenario_from_dict

from conftest import two_lane_payload

AGENT = AgentState.make(0.0, 0.0, 0.0, 8.0)


def offset_at(spec, s):
    # agent at the origin heading +x: a point at (s, 0) reads the raw offset
    return warp_point([s, 0.0], AGENT, spec)[1]


def test_spec_validation():
    with pytest.raises(ScenarioParseError):
        AttackSpec("sharp_turn", 3)
    with pytest.raises(ScenarioParseError):
        AttackSpec("ripple_road", 18)
    with pytest.raises(ScenarioParseError):
        AttackSpec("ripple_road", -1)
    with pytest.raises(ScenarioParseError):
        AttackSpec("ripple_road", 3, sign=0)


def test_spec_power_and_label():
    assert AttackSpec("smooth_turn", 0).power == 0.0
    assert AttackSpec("smooth_turn", 17).power == 1.0
    assert AttackSpec("smooth_turn", 7).label == "smooth_turn_p07+"
    assert AttackSpec("double_turn", 17, sign=-1).label == "double_turn_p17-"


def test_smooth_turn_hand_offset():
    spec = AttackSpec("smooth_turn", 17)
    # 10 m past the protected zone: 0.012 * 10^2
    assert offset_at(spec, 15.0) == pytest.approx(1.2, abs=1e-12)
    assert offset_at(AttackSpec("smooth_turn", 17, sign=-1), 15.0) == pytest.approx(-1.2, abs=1e-12)


def test_double_turn_hand_offsets_and_plateau():
    spec = AttackSpec("double_turn", 17)
    assert offset_at(spec, 35.0) == pytest.approx(10.8, abs=1e-12)   # u=30, end of first bend
    assert offset_at(spec, 65.0) == pytest.approx(21.6, abs=1e-12)   # u=60, fully mirrored
    assert offset_at(spec, 200.0) == pytest.approx(21.6, abs=1e-12)  # plateau holds


def test_ripple_hand_offset():
    spec = AttackSpec("ripple_road", 17)
    assert offset_at(spec, 15.0) == pytest.approx(3.0, abs=1e-12)    # quarter wavelength
    assert offset_at(spec, 45.0) == pytest.approx(0.0, abs=1e-9)     # full wavelength


def test_power_zero_is_identity():
    pts = np.array([[12.0, 3.0], [40.0, -2.0], [100.0, 7.0]])
    for kind in KINDS:
        out = warp_points(pts, AGENT, AttackSpec(kind, 0))
        np.testing.assert_allclose(out, pts, atol=1e-9)


def test_protected_zone_and_rear_untouched():
    spec = AttackSpec("smooth_turn", 17)
    pts = np.array([[4.9, 1.0], [0.0, -2.0], [-30.0, 5.0], [5.0, 0.5]])
    np.testing.assert_allclose(warp_points(pts, AGENT, spec), pts, atol=1e-9)


def test_warp_respects_agent_frame():
    # agent facing +y: the warp shifts points to the agent's left, -x
    agent = AgentState.make(5.0, 5.0, np.pi / 2, 8.0)
    out = warp_point([5.0, 25.0], agent, AttackSpec("smooth_turn", 17))
    np.testing.assert_allclose(out, [5.0 - 0.012 * 15.0**2, 25.0], atol=1e-9)


def test_apply_attack_scenario_surgery():
    scenario = scenario_from_dict(two_lane_payload(), scenario_id="two-lane")
    spec = AttackSpec("smooth_turn", 9)
    warped = apply_attack(scenario, spec)
    assert warped.ground_truth_future is None
    assert warped.scenario_id == f"{scenario.scenario_id}@{spec.label}"
    # histories stay on the road the agent actually drove
    np.testing.assert_array_equal(
        warped.focal_history.data, scenario.focal_history.data)
    assert warped.focal_agent == scenario.focal_agent
    # far-downfield geometry moved, connectivity did not
    orig = scenario.graph.lane("r1")
    bent = warped.graph.lane("r1")
    assert bent.successors == orig.successors
    assert bent.centerline[-1, 1] > orig.centerline[-1, 1] + 1.0
    # the warp preserved longitudinal stationing in the agent frame
    np.testing.assert_allclose(bent.centerline[:, 0], orig.centerline[:, 0], atol=1e-9)


def test_apply_attack_power_zero_keeps_geometry():
    scenario = scenario_from_dict(two_lane_payload(), scenario_id="two-lane")
    warped = apply_attack(scenario, AttackSpec("ripple_road", 0))
    for lane in scenario.graph.lanes():
        np.testing.assert_allclose(
            warped.graph.lane(lane.lane_id).centerline, lane.centerline, atol=1e-9)


def test_apply_attack_warp_agents_flag():
    payload = two_lane_payload()
    payload["other_agents"] = [
        [[0.1 * (i + 1), 20.0 + 2.0 * i, 3.0, 0.0, 20.0] for i in range(30)],
    ]
    scenario = scenario_from_dict(payload, scenario_id="two-lane")
    spec = AttackSpec("smooth_turn", 17)
    frozen = apply_attack(scenario, spec, warp_agents=False)
    moved = apply_attack(scenario, spec, warp_agents=True)
    assert len(moved.other_agents) == len(scenario.other_agents) == 1
    np.testing.assert_array_equal(
        frozen.other_agents[0].data, scenario.other_agents[0].data)
    orig_xy = scenario.other_agents[0].xy
    moved_xy = moved.other_agents[0].xy
    downfield = orig_xy[:, 0] > 5.0 + 10.0  # agent at x=10, zone ends at 15
    assert np.all(np.abs(moved_xy[downfield, 1] - orig_xy[downfield, 1]) > 0.01)
    # speeds and headings are recorded observations, not geometry
    np.testing.assert_array_equal(moved.other_agents[0].data[:, 2:], scenario.other_agents[0].data[:, 2:])


def test_attack_grid_covers_every_cell():
    grid = attack_grid()
    assert len(grid) == len(KINDS) * POWER_LEVELS == 54
    assert len({(s.kind, s.power_index) for s in grid}) == 54
    assert all(s.sign == 1 for s in grid)
    assert all(s.sign == -1 for s in attack_grid(sign=-1))


@given(
    st.sampled_from(KINDS),
    st.integers(0, POWER_LEVELS - 1),
    st.sampled_from([-1, 1]),
)
@settings(max_examples=30, deadline=None)
def test_warped_scenarios_stay_parseable(kind, power, sign):
    """Warps bend the map but never fold the fixture lanes."""
    scenario = scenario_from_dict(two_lane_payload(), scenario_id="two-lane")
    warped = apply_attack(scenario, AttackSpec(kind, power, sign))
    assert set(l.lane_id for l in warped.graph.lanes()) == {"r0", "r1", "l0", "l1"}
    for lane in warped.graph.lanes():
        assert np.all(np.isfinite(lane.centerline))
