"""Multimodal prediction and its scorecard on one scenario.

Runs the rule-based predictor over every extracted boundary, softens
near-duplicate endpoints, and evaluates displacement, probabilistic,
feasibility, and map-compliance metrics against the recorded future.
"""
from lanebound import (
    attach_ground_truth,
    boundary_set_for,
    evaluate_predictions,
    make_scenario,
    nms_predictions,
    predict,
)


def main():
    scenario = attach_ground_truth(make_scenario(12, "split"), seed=4)
    boundaries = boundary_set_for(scenario)
    print(f"scenario {scenario.scenario_id}: {len(boundaries)} boundaries")

    preds = nms_predictions(predict(scenario.focal_agent, boundaries))
    print(f"\n{'rank':<5} {'boundary':<9} {'mode':<12} {'p':>7} {'endpoint':>18}")
    for rank, entry in enumerate(preds.entries):
        x, y = entry.trajectory.xy[-1]
        print(f"{rank:<5} {entry.boundary_index:<9} {entry.mode:<12} "
              f"{entry.likelihood:7.4f} ({x:8.1f}, {y:7.1f})")

    report = evaluate_predictions(preds, scenario.graph, scenario.ground_truth_future)
    print(f"\nmaneuver:        {report.maneuver}")
    print(f"minADE / minFDE: {report.min_ade:.3f} / {report.min_fde:.3f} m")
    print(f"brier variants:  {report.brier_min_ade:.3f} / {report.brier_min_fde:.3f}")
    print(f"miss (2.0 m):    {report.miss}")
    print(f"off-road rates:  soft {report.soft_offroad_rate:.4f}, "
          f"hard {report.hard_offroad_rate:.4f}")
    print(f"infeasible:      {report.feasibility['any_trajectory_fraction']:.0%} "
          "of predicted trajectories")


if __name__ == "__main__":
    main()
