"""Boundary-constrained multimodal trajectory prediction.

The pipeline extracts left/right driving-corridor boundaries from a lane
graph, represents trajectories as weighted superpositions of the two edges,
and tracks them with a curvature- and acceleration-limited pure-pursuit
rollout, so every emitted trajectory is kinematically feasible and stays
on the road by construction.
"""

from .attack import AttackSpec, apply_attack, attack_grid, warp_point, warp_points
from .boundaries import (
    Boundary,
    RawBoundary,
    align_pair,
    boundary_iou,
    boundary_set_for,
    cluster_goals,
    extract_boundary,
    generate_boundary_set,
    reachable_goal_lanes,
    reachable_lanes,
    sample_and_smooth,
    select_boundaries,
)
from .errors import (
    AlignmentError,
    DegenerateBoundaryError,
    DegenerateClusterError,
    DegenerateWarpError,
    EmptyBoundarySetError,
    GraphIntegrityError,
    LaneboundError,
    NoFitError,
    NoOverlapError,
    NoPredictionError,
    NoStartLaneError,
    ProfileError,
    ScenarioParseError,
    TooShortError,
    UnreachableGoalError,
)
from .fitting import FitResult, best_fit, fit, project_gt
from .map_graph import (
    LaneGraph,
    LaneSegment,
    ScenarioRecord,
    find_start_lanes,
    load_scenario,
    load_scenario_file,
    on_road,
    on_road_batch,
    scenario_from_dict,
)
from .metrics import (
    FeasibilityFlags,
    MetricsReport,
    aggregate_feasibility,
    classify_maneuver,
    displacement_metrics,
    evaluate_predictions,
    feasibility_check,
    offroad_rates,
)
from .motion import AgentState, Pose2, Trajectory
from .predictor import (
    MODES,
    PredictionEntry,
    PredictionSet,
    nms_predictions,
    predict,
    predict_constant_velocity,
    weight_template,
)
from .pursuit import PursuitParams, clamp_accel, curvature_command, rollout, rollout_batch
from .render import render_svg
from .superposition import SuperPath, point_at_arclength, superimpose
from .synth import attach_ground_truth, make_corpus, make_grid_graph, make_scenario

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
