"""Displacement, probabilistic, feasibility, and map-compliance metrics."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ProfileError
from .geometry import wrap_angle
from .map_graph import LaneGraph, on_road_batch
from .motion import Trajectory

MISS_THRESHOLD = 2.0        # m, endpoint error above this counts as a miss
ACCEL_LIMIT = 8.0           # m/s^2
CURVATURE_LIMIT = 0.3       # 1/m
SPEED_FLOOR = 0.1           # m/s, curvature is undefined below this
LIMIT_SLACK = 1e-9          # absorbs float rounding at exactly saturated limits
MANEUVER_DISPLACEMENT_MIN = 2.0   # m
STRAIGHT_MAX_DEG = 15.0
STRAIGHT_TURN_MAX_DEG = 45.0
TURN_MAX_DEG = 135.0


def _aligned_xy(traj: Trajectory, gt: Trajectory) -> np.ndarray:
    """Prediction points matching the ground-truth rows.

    Rollouts carry the shared current state as row 0; recorded futures do
    not, so a prediction one row longer than the truth drops its first row.
    """
    if len(traj) == len(gt) + 1:
        return traj.xy[1:]
    if len(traj) == len(gt):
        return traj.xy
    raise ProfileError(
        f"prediction has {len(traj)} states, ground truth {len(gt)}; cannot align")


def displacement_metrics(pred_set, gt: Trajectory, k: int = 6, miss_threshold: float = MISS_THRESHOLD):
    """min-of-k displacement metrics against the recorded future.

    Returns (min_ade, min_fde, brier_min_ade, brier_min_fde, miss). The
    brier variants add (1 - p)^2 of the minimizing entry. ``miss`` is True
    only when the best endpoint error strictly exceeds the threshold.
    """
    top = pred_set.top_k(k)
    if not top:
        raise ProfileError("prediction set is empty")
    ades, fdes, probs = [], [], []
    for entry in top:
        xy = _aligned_xy(entry.trajectory, gt)
        err = np.linalg.norm(xy - gt.xy, axis=1)
        ades.append(float(err.mean()))
        fdes.append(float(err[-1]))
        probs.append(float(entry.likelihood))
    i_ade = int(np.argmin(ades))
    i_fde = int(np.argmin(fdes))
    min_ade = ades[i_ade]
    min_fde = fdes[i_fde]
    brier_ade = min_ade + (1.0 - probs[i_ade]) ** 2
    brier_fde = min_fde + (1.0 - probs[i_fde]) ** 2
    miss = bool(min_fde > miss_threshold)
    return min_ade, min_fde, brier_ade, brier_fde, miss


@dataclass
class FeasibilityFlags:
    """Per-step limit violations for one trajectory."""

    accel: np.ndarray
    curvature: np.ndarray

    @property
    def any(self) -> np.ndarray:
        return self.accel | self.curvature

    @property
    def accel_fraction(self) -> float:
        return float(self.accel.mean())

    @property
    def curvature_fraction(self) -> float:
        return float(self.curvature.mean())

    @property
    def any_fraction(self) -> float:
        return float(self.any.mean())

    @property
    def infeasible(self) -> bool:
        return bool(self.any.any())


def feasibility_check(
    traj: Trajectory,
    a_max: float = ACCEL_LIMIT,
    kappa_max: float = CURVATURE_LIMIT,
    v_min: float = SPEED_FLOOR,
) -> FeasibilityFlags:
    """Flag steps whose implied acceleration or curvature exceeds the limits.

    Acceleration is the per-step speed difference over dt. Curvature is the
    wrapped heading change divided by the distance traveled; it is left
    unflagged below the ``v_min`` speed floor where heading is unreliable.
    A relative slack of 1e-9 keeps trajectories that saturate a limit
    exactly (by construction) from being flagged for float rounding.
    """
    if len(traj) < 3:
        raise ProfileError(f"feasibility check needs >= 3 states, got {len(traj)}")
    v = traj.speeds
    accel = np.diff(v) / traj.dt
    accel_flags = np.abs(accel) > a_max * (1.0 + LIMIT_SLACK) + LIMIT_SLACK

    dist = np.linalg.norm(np.diff(traj.xy, axis=0), axis=1)
    dtheta = wrap_angle(np.diff(traj.headings))
    kappa = dtheta / np.maximum(dist, 1e-9)
    curvature_flags = (np.abs(kappa) > kappa_max * (1.0 + LIMIT_SLACK) + LIMIT_SLACK) & (v[:-1] >= v_min)
    return FeasibilityFlags(accel=accel_flags, curvature=curvature_flags)


def aggregate_feasibility(trajectories) -> dict:
    """Fraction of infeasible steps and trajectories, per limit and combined."""
    trajectories = list(trajectories)
    step_counts = np.zeros(3)
    traj_counts = np.zeros(3)
    total_steps = 0
    for traj in trajectories:
        flags = feasibility_check(traj)
        total_steps += len(flags.accel)
        step_counts += [flags.accel.sum(), flags.curvature.sum(), flags.any.sum()]
        traj_counts += [flags.accel.any(), flags.curvature.any(), flags.any.any()]
    n = max(len(trajectories), 1)
    total_steps = max(total_steps, 1)
    return {
        "accel_step_fraction": float(step_counts[0] / total_steps),
        "curvature_step_fraction": float(step_counts[1] / total_steps),
        "any_step_fraction": float(step_counts[2] / total_steps),
        "accel_trajectory_fraction": float(traj_counts[0] / n),
        "curvature_trajectory_fraction": float(traj_counts[1] / n),
        "any_trajectory_fraction": float(traj_counts[2] / n),
    }


def offroad_rates(pred_set, graph: LaneGraph) -> tuple[float, float]:
    """(soft, hard) off-road rates of a prediction set.

    Soft rate: fraction of all predicted points off the drivable area.
    Hard rate: fraction of entries with at least one off-road point.
    """
    flags, _ = offroad_flags(pred_set, graph)
    soft = float(np.concatenate(flags).mean())
    hard = float(np.mean([f.any() for f in flags]))
    return soft, hard


def offroad_flags(pred_set, graph: LaneGraph) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Per-entry off-road masks and signed clearances for every point."""
    entries = getattr(pred_set, "entries", pred_set)
    counts = [len(e.trajectory) for e in entries]
    points = np.concatenate([e.trajectory.xy for e in entries])
    inside, clearance = on_road_batch(graph, points)
    off = ~inside
    flags, clears = [], []
    at = 0
    for c in counts:
        flags.append(off[at:at + c])
        clears.append(clearance[at:at + c])
        at += c
    return flags, clears


def classify_maneuver(traj: Trajectory) -> str:
    """Maneuver label from net displacement and accumulated heading change.

    Displacement under 2 m is stationary. Otherwise the unwrapped total
    heading change falls into: straight (< 15 deg), straight-left/right
    (15 to 45), left/right-turn (45 to 135), and u-turns beyond that.
    """
    displacement = float(np.linalg.norm(traj.xy[-1] - traj.xy[0]))
    if displacement < MANEUVER_DISPLACEMENT_MIN:
        return "stationary"
    total = float(np.sum(wrap_angle(np.diff(traj.headings))))
    deg = abs(np.degrees(total))
    side = "left" if total > 0 else "right"
    if deg < STRAIGHT_MAX_DEG:
        return "straight"
    if deg < STRAIGHT_TURN_MAX_DEG:
        return f"straight-{side}"
    if deg <= TURN_MAX_DEG:
        return f"{side}-turn"
    return f"{side}-u-turn"


@dataclass
class MetricsReport:
    """Everything measured for one scenario's prediction set."""

    min_ade: float | None = None
    min_fde: float | None = None
    brier_min_ade: float | None = None
    brier_min_fde: float | None = None
    miss: bool | None = None
    soft_offroad_rate: float = 0.0
    hard_offroad_rate: float = 0.0
    feasibility: dict = field(default_factory=dict)
    maneuver: str | None = None

    def to_dict(self) -> dict:
        return {
            "min_ade": self.min_ade,
            "min_fde": self.min_fde,
            "brier_min_ade": self.brier_min_ade,
            "brier_min_fde": self.brier_min_fde,
            "miss": self.miss,
            "soft_offroad_rate": self.soft_offroad_rate,
            "hard_offroad_rate": self.hard_offroad_rate,
            "feasibility": self.feasibility,
            "maneuver": self.maneuver,
        }


def evaluate_predictions(
    pred_set,
    graph: LaneGraph,
    gt: Trajectory | None = None,
    k: int = 6,
    miss_threshold: float = MISS_THRESHOLD,
) -> MetricsReport:
    """Assemble the full report; displacement fields need a recorded future."""
    report = MetricsReport()
    if gt is not None:
        (report.min_ade, report.min_fde, report.brier_min_ade,
         report.brier_min_fde, report.miss) = displacement_metrics(
            pred_set, gt, k=k, miss_threshold=miss_threshold)
        report.maneuver = classify_maneuver(gt)
    report.soft_offroad_rate, report.hard_offroad_rate = offroad_rates(pred_set, graph)
    report.feasibility = aggregate_feasibility([e.trajectory for e in pred_set.entries])
    return report
