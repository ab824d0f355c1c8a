"""Pure-pursuit path tracking with hard curvature and acceleration limits.

The tracker produces trajectories that are feasible by construction: the
curvature command is clamped to kappa_max before it is applied, the speed
update floors at zero, and acceleration inputs are validated against a_max.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ProfileError
from .geometry import wrap_angle
from .motion import AgentState, Trajectory
from .superposition import SuperPath


@dataclass(frozen=True)
class PursuitParams:
    """Tracker limits and discretization."""

    lookahead: float = 10.0     # m
    kappa_max: float = 0.3      # 1/m
    a_max: float = 8.0          # m/s^2
    dt: float = 0.1             # s
    steps: int = 60

    def __post_init__(self):
        if self.lookahead <= 0 or self.kappa_max <= 0 or self.a_max <= 0 or self.dt <= 0 or self.steps < 1:
            raise ProfileError("pursuit parameters must be positive")


def clamp_accel(raw, a_max: float = 8.0):
    """Squash an unconstrained acceleration into (-a_max, a_max)."""
    return a_max * np.tanh(np.asarray(raw, dtype=float) / a_max) if np.ndim(raw) else float(
        a_max * np.tanh(float(raw) / a_max))


def check_accels(accels, steps: int, a_max: float) -> np.ndarray:
    a = np.asarray(accels, dtype=float)
    if a.ndim != 1 or len(a) != steps:
        raise ProfileError(f"acceleration profile must have length {steps}, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ProfileError("acceleration profile contains a non-finite value")
    if np.any(np.abs(a) > a_max + 1e-9):
        raise ProfileError(f"acceleration profile exceeds +/-{a_max} m/s^2")
    return a


def curvature_command(state: AgentState, path: SuperPath, params: PursuitParams = PursuitParams()) -> float:
    """Curvature steering the agent toward the look-ahead point on the path.

    The agent position is projected onto the path, the goal is the point one
    look-ahead further along (clamped to the path end), and the command is
    sign(x_g) * min(2|x_g| / L_d^2, kappa_max) where x_g is the goal's
    lateral offset in the vehicle frame (left positive). Past the final path
    point the command is zero.
    """
    kappa, _, _ = _command(
        np.array([state.x, state.y]), state.heading, path.points, path.cum, 0, params)
    return float(kappa)


def _command(pos, heading, pts, cum, first_seg, params):
    """Scalar pure-pursuit command. Returns (kappa, s, segment_index).

    The arithmetic mirrors rollout_batch term for term so that scalar and
    batched rollouts agree bitwise even where a projection tie could break
    either way.
    """
    starts = pts[:-1]
    seg_vec = pts[1:] - starts
    seg_len2 = np.einsum("ij,ij->i", seg_vec, seg_vec)
    seg_len = np.sqrt(seg_len2)
    start_dot_seg = np.einsum("ij,ij->i", starts, seg_vec)
    start_dot_start = np.einsum("ij,ij->i", starts, starts)
    inv_len2 = 1.0 / np.maximum(seg_len2, 1e-18)
    rel_dot_seg = np.einsum("j,ij->i", pos, seg_vec) - start_dot_seg
    rel2 = np.einsum("j,j->", pos, pos) - 2.0 * np.einsum("j,ij->i", pos, starts) + start_dot_start
    t = np.clip(rel_dot_seg * inv_len2, 0.0, 1.0)
    dist2 = rel2 - 2.0 * t * rel_dot_seg + t * t * seg_len2
    dist2 = np.where(np.arange(len(seg_vec)) >= first_seg, dist2, np.inf)
    k = int(np.argmin(dist2))
    s = cum[k] + t[k] * seg_len[k]
    total = cum[-1]
    if s >= total - 1e-9:
        return 0.0, float(s), k
    sg = min(s + params.lookahead, total)
    gi = int(np.clip(np.sum(cum <= sg) - 1, 0, len(pts) - 2))
    span = max(cum[gi + 1] - cum[gi], 1e-18)
    frac = (sg - cum[gi]) / span
    goal = pts[gi] + frac * (pts[gi + 1] - pts[gi])
    x_g = -np.sin(heading) * (goal[0] - pos[0]) + np.cos(heading) * (goal[1] - pos[1])
    kappa = np.sign(x_g) * min(2.0 * abs(x_g) / params.lookahead**2, params.kappa_max)
    return float(kappa), float(s), k


def rollout(
    initial: AgentState,
    path: SuperPath,
    accels,
    params: PursuitParams = PursuitParams(),
) -> Trajectory:
    """Forward-integrate the tracker for params.steps steps of params.dt.

    Per step: the curvature command is computed at the current pose, the
    position advances along the current heading, then heading and speed
    update (theta += v * kappa * dt, v = max(0, v + a * dt)). The path
    projection never moves backward along the path. Row 0 of the result is
    the initial state.
    """
    a = check_accels(accels, params.steps, params.a_max)
    rows = np.empty((params.steps + 1, 4))
    rows[0] = [initial.x, initial.y, initial.heading, initial.speed]
    pos = np.array([initial.x, initial.y], dtype=float)
    heading = float(initial.heading)
    speed = float(initial.speed)
    seg = 0
    for t in range(params.steps):
        kappa, _, seg = _command(pos, heading, path.points, path.cum, seg, params)
        pos = pos + speed * params.dt * np.array([np.cos(heading), np.sin(heading)])
        heading = wrap_angle(heading + speed * kappa * params.dt)
        speed = max(0.0, speed + a[t] * params.dt)
        rows[t + 1] = [pos[0], pos[1], heading, speed]
    return Trajectory(rows, dt=params.dt, t0=0.0)


def rollout_batch(paths: np.ndarray, accels: np.ndarray, initial: AgentState, params: PursuitParams) -> np.ndarray:
    """Vectorized rollout of B (path, accel profile) candidates.

    ``paths`` is (B, n, 2) and ``accels`` is (B, steps); all candidates share
    the initial state. Returns (B, steps + 1, 4) state rows with the same
    update rule as ``rollout``. Used by the fitting search, where thousands
    of candidate rollouts per scenario make the scalar loop too slow.
    """
    paths = np.asarray(paths, dtype=float)
    accels = np.asarray(accels, dtype=float)
    B, n, _ = paths.shape
    seg_vec = np.diff(paths, axis=1)                       # (B, n-1, 2)
    seg_len2 = np.einsum("bij,bij->bi", seg_vec, seg_vec)
    seg_len = np.sqrt(seg_len2)
    cum = np.concatenate([np.zeros((B, 1)), np.cumsum(seg_len, axis=1)], axis=1)
    total = cum[:, -1]

    # |pos - proj|^2 expands into dot products, so the projection points are
    # never materialized; per-path terms are hoisted out of the step loop
    starts = paths[:, :-1, :]
    start_dot_seg = np.einsum("bij,bij->bi", starts, seg_vec)
    start_dot_start = np.einsum("bij,bij->bi", starts, starts)
    inv_len2 = 1.0 / np.maximum(seg_len2, 1e-18)

    pos = np.tile([initial.x, initial.y], (B, 1))
    heading = np.full(B, initial.heading)
    speed = np.full(B, initial.speed)
    first = np.zeros(B, dtype=int)
    rows = np.empty((B, params.steps + 1, 4))
    rows[:, 0, 0] = pos[:, 0]
    rows[:, 0, 1] = pos[:, 1]
    rows[:, 0, 2] = heading
    rows[:, 0, 3] = speed
    seg_index = np.arange(n - 1)[None, :]
    batch = np.arange(B)
    for t in range(params.steps):
        rel_dot_seg = np.einsum("bj,bij->bi", pos, seg_vec) - start_dot_seg
        rel2 = (np.einsum("bj,bj->b", pos, pos)[:, None]
                - 2.0 * np.einsum("bj,bij->bi", pos, starts) + start_dot_start)
        tt = np.clip(rel_dot_seg * inv_len2, 0.0, 1.0)
        dist2 = rel2 - 2.0 * tt * rel_dot_seg + tt * tt * seg_len2
        dist2 = np.where(seg_index >= first[:, None], dist2, np.inf)
        k = np.argmin(dist2, axis=1)
        first = k
        s = cum[batch, k] + tt[batch, k] * seg_len[batch, k]
        sg = np.minimum(s + params.lookahead, total)
        gi = np.clip(np.sum(cum <= sg[:, None], axis=1) - 1, 0, n - 2)
        span = np.maximum(cum[batch, gi + 1] - cum[batch, gi], 1e-18)
        frac = (sg - cum[batch, gi]) / span
        goal = paths[batch, gi] + frac[:, None] * (paths[batch, gi + 1] - paths[batch, gi])
        x_g = -np.sin(heading) * (goal[:, 0] - pos[:, 0]) + np.cos(heading) * (goal[:, 1] - pos[:, 1])
        kappa = np.sign(x_g) * np.minimum(2.0 * np.abs(x_g) / params.lookahead**2, params.kappa_max)
        kappa = np.where(s >= total - 1e-9, 0.0, kappa)
        pos = pos + (speed * params.dt)[:, None] * np.stack([np.cos(heading), np.sin(heading)], axis=1)
        heading = wrap_angle(heading + speed * kappa * params.dt)
        speed = np.maximum(0.0, speed + accels[:, t] * params.dt)
        rows[:, t + 1, 0] = pos[:, 0]
        rows[:, t + 1, 1] = pos[:, 1]
        rows[:, t + 1, 2] = heading
        rows[:, t + 1, 3] = speed
    return rows
