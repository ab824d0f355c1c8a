"""Boundary extraction walkthrough on one synthetic intersection.

Shows the stages between a lane graph and the final boundary set: start
lanes, reachable goals, goal clusters, and the smoothed left/right pairs,
then renders the scene to an SVG you can open in a browser.
"""
from pathlib import Path

from lanebound import (
    boundary_set_for,
    cluster_goals,
    find_start_lanes,
    make_scenario,
    reachable_goal_lanes,
    reachable_lanes,
    render_svg,
)

OUT = Path(__file__).parent / "out"


def main():
    scenario = make_scenario(21, "intersection")
    graph = scenario.graph
    agent = scenario.focal_agent
    print(f"scenario {scenario.scenario_id}: {len(list(graph.lanes()))} lanes, "
          f"agent at ({agent.x:.1f}, {agent.y:.1f}) doing {agent.speed:.1f} m/s")

    starts = find_start_lanes(graph, agent)
    print(f"start lanes: {starts}")

    distances = reachable_lanes(graph, starts)
    print(f"reachable lanes within budget: {len(distances)}")

    goals = reachable_goal_lanes(graph, starts)
    clusters = cluster_goals(graph, goals)
    print(f"goal lanes: {sorted(goals)}")
    print(f"goal clusters (leftmost, rightmost): {clusters}")

    boundaries = boundary_set_for(scenario)
    for i, b in enumerate(boundaries):
        print(f"boundary {i}: {len(b.left)} aligned points, "
              f"left path {'>'.join(b.left_lane_path)}, "
              f"right path {'>'.join(b.right_lane_path)}")

    OUT.mkdir(parents=True, exist_ok=True)
    svg_path = OUT / "intersection.svg"
    svg_path.write_text(render_svg(scenario, boundaries))
    print(f"\nrendered scene -> {svg_path}")


if __name__ == "__main__":
    main()
