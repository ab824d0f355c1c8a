"""Rule-based multi-modal predictor over a boundary set.

Each boundary contributes six modes: a fixed pairing of weight-profile
templates with bracketing acceleration constants. Every mode is rolled out
with the pure-pursuit tracker, so every predicted trajectory respects the
curvature and acceleration limits no matter what the templates do.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boundaries import Boundary
from .errors import NoPredictionError
from .geometry import wrap_angle
from .motion import AgentState, Trajectory
from .pursuit import PursuitParams, rollout
from .superposition import superimpose

# (template name, acceleration constant m/s^2); all six templates appear once
# and the constants bracket the current speed.
MODES: tuple[tuple[str, float], ...] = (
    ("track", 0.0),
    ("center", 0.0),
    ("hug-left", -2.0),
    ("hug-right", -2.0),
    ("drift-left", 2.0),
    ("drift-right", 2.0),
)

CURVATURE_EFFORT_WEIGHT = 20.0
SPEED_CHANGE_WEIGHT = 0.25
NMS_EPSILON = 2.0
NMS_PENALTY = 0.1
SPEED_FLOOR = 0.1


@dataclass
class PredictionEntry:
    trajectory: Trajectory
    likelihood: float
    boundary_index: int
    mode_index: int
    mode: str = ""


@dataclass
class PredictionSet:
    entries: list[PredictionEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def likelihoods(self) -> np.ndarray:
        return np.array([e.likelihood for e in self.entries])

    def top_k(self, k: int) -> list[PredictionEntry]:
        order = sorted(
            range(len(self.entries)),
            key=lambda i: (-self.entries[i].likelihood, i),
        )
        return [self.entries[i] for i in order[:k]]


def weight_template(name: str, boundary: Boundary, agent: AgentState) -> np.ndarray:
    """Weight profile for one mode template.

    ``track`` holds the agent's current lateral position inside the corridor:
    the agent is projected onto the nearest left/right chord and that blend
    fraction is held constant, which follows the agent's own lane when it is
    lane-centered.
    """
    n = len(boundary)
    if name == "center":
        return np.full(n, 0.5)
    if name == "hug-left":
        return np.full(n, 0.85)
    if name == "hug-right":
        return np.full(n, 0.15)
    if name == "drift-left":
        return np.linspace(0.15, 0.85, n)
    if name == "drift-right":
        return np.linspace(0.85, 0.15, n)
    if name == "track":
        mid = boundary.midline
        i0 = int(np.argmin(np.linalg.norm(mid - agent.xy, axis=1)))
        chord = boundary.left[i0] - boundary.right[i0]
        denom = max(float(chord @ chord), 1e-12)
        w = float((agent.xy - boundary.right[i0]) @ chord) / denom
        return np.full(n, float(np.clip(w, 0.0, 1.0)))
    raise ValueError(f"unknown weight template {name!r}")


def _mode_score(trajectory: Trajectory, accel: float) -> float:
    """Heuristic preference: low steering effort, small speed change."""
    dtheta = wrap_angle(np.diff(trajectory.headings))
    v = trajectory.speeds[:-1]
    moving = v >= SPEED_FLOOR
    kappa = np.zeros_like(dtheta)
    kappa[moving] = dtheta[moving] / (v[moving] * trajectory.dt)
    effort = float(np.abs(kappa).mean()) if len(kappa) else 0.0
    return -CURVATURE_EFFORT_WEIGHT * effort - SPEED_CHANGE_WEIGHT * abs(accel)


def predict(
    agent: AgentState,
    boundaries: list[Boundary],
    params: PursuitParams = PursuitParams(),
    n_modes: int = len(MODES),
) -> PredictionSet:
    """Roll out every (boundary, mode) pair and score it.

    Likelihoods are a softmax over the heuristic mode scores across all
    entries. Raises NoPredictionError for an empty boundary set.
    """
    if not boundaries:
        raise NoPredictionError("cannot predict without boundaries")
    if not (1 <= n_modes <= len(MODES)):
        raise NoPredictionError(f"n_modes must be in [1, {len(MODES)}], got {n_modes}")
    entries: list[PredictionEntry] = []
    scores: list[float] = []
    for b_idx, boundary in enumerate(boundaries):
        for m_idx, (name, accel) in enumerate(MODES[:n_modes]):
            path = superimpose(boundary, weight_template(name, boundary, agent))
            traj = rollout(agent, path, np.full(params.steps, accel), params)
            entries.append(PredictionEntry(
                trajectory=traj, likelihood=0.0,
                boundary_index=b_idx, mode_index=m_idx, mode=name))
            scores.append(_mode_score(traj, accel))
    raw = np.asarray(scores)
    weights = np.exp(raw - raw.max())
    probs = weights / weights.sum()
    for entry, p in zip(entries, probs):
        entry.likelihood = float(p)
    return PredictionSet(entries=entries)


def predict_constant_velocity(agent: AgentState, params: PursuitParams = PursuitParams()) -> PredictionSet:
    """Map-oblivious reference: keep current speed and heading."""
    t = params.dt * np.arange(params.steps + 1)
    rows = np.empty((params.steps + 1, 4))
    rows[:, 0] = agent.x + agent.speed * t * np.cos(agent.heading)
    rows[:, 1] = agent.y + agent.speed * t * np.sin(agent.heading)
    rows[:, 2] = agent.heading
    rows[:, 3] = agent.speed
    traj = Trajectory(rows, dt=params.dt, t0=0.0)
    return PredictionSet(entries=[PredictionEntry(
        trajectory=traj, likelihood=1.0, boundary_index=-1, mode_index=0, mode="constant-velocity")])


def nms_predictions(
    pred_set: PredictionSet,
    epsilon: float = NMS_EPSILON,
    penalty: float = NMS_PENALTY,
) -> PredictionSet:
    """Soften near-duplicate modes instead of deleting them.

    Entries are visited in descending likelihood; each visit multiplies the
    likelihood of every lower-ranked entry whose endpoint lies within
    ``epsilon`` by ``penalty``. Likelihoods are renormalized at the end, so
    the count of entries never changes.
    """
    order = sorted(
        range(len(pred_set.entries)),
        key=lambda i: (-pred_set.entries[i].likelihood,
                       pred_set.entries[i].boundary_index,
                       pred_set.entries[i].mode_index),
    )
    entries = [pred_set.entries[i] for i in order]
    likes = np.array([e.likelihood for e in entries], dtype=float)
    ends = np.array([e.trajectory.xy[-1] for e in entries])
    for r in range(len(entries)):
        if r + 1 == len(entries):
            break
        close = np.linalg.norm(ends[r + 1:] - ends[r], axis=1) <= epsilon
        likes[r + 1:][close] *= penalty
    likes = likes / likes.sum()
    out = [
        PredictionEntry(e.trajectory, float(p), e.boundary_index, e.mode_index, e.mode)
        for e, p in zip(entries, likes)
    ]
    out.sort(key=lambda e: (-e.likelihood, e.boundary_index, e.mode_index))
    return PredictionSet(entries=out)
