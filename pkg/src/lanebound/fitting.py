"""Recover weight and acceleration profiles that reproduce a recorded future.

The fit measures how well the constrained tracker can imitate a ground-truth
trajectory: project the truth onto a boundary for an initial guess, then run
a deterministic coordinate descent over the profile entries. The resulting
average displacement error is the floor any predictor built on the same
tracker can reach for that boundary.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundaries import Boundary
from .errors import NoFitError, NoOverlapError, ProfileError
from .geometry import cross2, cum_arclength, points_in_ring, project_to_polyline
from .motion import Trajectory
from .pursuit import PursuitParams, rollout_batch

WEIGHT_STEP0 = 0.25    # initial coordinate-descent step, weight units
ACCEL_STEP0 = 2.0      # initial step, m/s^2
ITERATIONS = 8
MAX_PASSES = 4         # improvement passes per step size
MAX_APPLY = 64         # cumulative applications revalidated per pass
STOP_ADE = 1e-3        # m, error below which further iterations are noise


@dataclass
class FitResult:
    weights: np.ndarray
    accels: np.ndarray
    trajectory: Trajectory
    ade: float
    ade_history: list[float]


def _check_gt(gt: Trajectory, params: PursuitParams) -> Trajectory:
    if len(gt) != params.steps + 1:
        raise ProfileError(
            f"ground truth must include the current state plus {params.steps} steps, got {len(gt)} rows")
    return gt


def project_gt(boundary: Boundary, gt: Trajectory, params: PursuitParams = PursuitParams()):
    """Initial profiles from the ground truth.

    Weight i comes from where the truth crosses the chord between boundary
    point pair i (first crossing along the truth); chords the truth never
    crosses use the nearest truth point projected onto the chord instead.
    Accelerations are the clamped per-step speed differences.

    ``gt`` must include the state at the prediction instant as row 0.
    Raises NoOverlapError when the truth never touches the corridor.
    """
    _check_gt(gt, params)
    left = boundary.left
    right = boundary.right
    g = gt.xy
    n = len(left)

    # chord i runs left_i -> right_i; crossing parameter t gives w = 1 - t
    chord_vec = right - left                                   # (n, 2)
    seg_start = g[:-1][None, :, :]                             # (1, m, 2)
    seg_vec = np.diff(g, axis=0)[None, :, :]
    qp = seg_start - left[:, None, :]                          # (n, m, 2)
    denom = cross2(chord_vec[:, None, :], seg_vec)           # (n, m)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = cross2(qp, seg_vec) / denom
        u = cross2(qp, chord_vec[:, None, :]) / denom
    valid = (np.abs(denom) > 1e-14) & (t >= 0.0) & (t <= 1.0) & (u >= 0.0) & (u <= 1.0)
    order = np.where(valid, np.arange(len(g) - 1)[None, :] + u, np.inf)
    pick = np.argmin(order, axis=1)
    has_crossing = valid[np.arange(n), pick]
    weights = np.where(has_crossing, 1.0 - t[np.arange(n), pick], np.nan)

    if not has_crossing.any():
        inside = points_in_ring(g, boundary.polygon_ring)
        if not inside.any():
            raise NoOverlapError("ground truth never touches the boundary corridor")

    missing = np.isnan(weights)
    if missing.any():
        # nearest truth point, projected onto the chord line
        rel = g[None, :, :] - left[:, None, :]                 # (n, m+1, 2)
        chord_len2 = np.maximum(np.einsum("ij,ij->i", chord_vec, chord_vec), 1e-18)
        t_pt = np.einsum("nmj,nj->nm", rel, chord_vec) / chord_len2[:, None]
        t_clamped = np.clip(t_pt, 0.0, 1.0)
        foot = left[:, None, :] + t_clamped[..., None] * chord_vec[:, None, :]
        d2 = np.einsum("nmj,nmj->nm", g[None] - foot, g[None] - foot)
        nearest = np.argmin(d2, axis=1)
        fallback = 1.0 - t_clamped[np.arange(n), nearest]
        weights = np.where(missing, fallback, weights)

    weights = np.clip(weights, 0.0, 1.0)
    accels = np.clip(np.diff(gt.speeds) / gt.dt, -params.a_max, params.a_max)
    return weights, accels


def fit(
    boundary: Boundary,
    gt: Trajectory,
    params: PursuitParams = PursuitParams(),
    iterations: int = ITERATIONS,
) -> FitResult:
    """Deterministic coordinate descent minimizing ADE against the truth.

    Starts from project_gt. Each iteration evaluates a +/- step on every
    reachable weight index and every acceleration step, applies the
    improving changes best-first (cumulative prefixes revalidated in one
    batch, best prefix kept), and repeats at the same step size until no
    candidate improves; the step sizes halve between iterations. The
    per-iteration ADE sequence never increases. Seedless: the same inputs
    always produce the same fit.
    """
    gt = _check_gt(gt, params)
    weights, accels = project_gt(boundary, gt, params)
    initial = gt.state(0)
    target = gt.xy[1:]
    left, right = boundary.left, boundary.right
    n = len(left)

    def paths_for(w_batch: np.ndarray) -> np.ndarray:
        return w_batch[..., None] * left + (1.0 - w_batch[..., None]) * right

    def evaluate(w_batch: np.ndarray, a_batch: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        rows = rollout_batch(paths_for(w_batch), a_batch, initial, params)
        err = np.linalg.norm(rows[:, 1:, :2] - target[None], axis=2).mean(axis=1)
        return err, rows

    ade, rows = evaluate(weights[None], accels[None])
    ade = float(ade[0])
    best_rows = rows[0]
    history = [ade]
    step_w, step_a = WEIGHT_STEP0, ACCEL_STEP0

    for _ in range(iterations):
        for _pass in range(MAX_PASSES):
            # only chords between the rollout's entry point on the path and
            # its look-ahead horizon influence the error
            path_pts = paths_for(weights[None])[0]
            path_cum = cum_arclength(path_pts)
            s_start, _, _ = project_to_polyline(path_pts, gt.xy[0])
            traveled = np.linalg.norm(np.diff(best_rows[:, :2], axis=0), axis=1).sum()
            lo = s_start - 3.0
            hi = s_start + traveled + params.lookahead + 3.0
            active = np.nonzero((path_cum >= lo) & (path_cum <= hi))[0]

            labels = []
            for i in active:
                for sign in (1.0, -1.0):
                    w_new = float(np.clip(weights[i] + sign * step_w, 0.0, 1.0))
                    if w_new != weights[i]:
                        labels.append(("w", int(i), w_new))
            for t in range(params.steps):
                for sign in (1.0, -1.0):
                    a_new = float(np.clip(accels[t] + sign * step_a, -params.a_max, params.a_max))
                    if a_new != accels[t]:
                        labels.append(("a", int(t), a_new))
            if not labels:
                break
            W = np.tile(weights, (len(labels), 1))
            A = np.tile(accels, (len(labels), 1))
            for row, (kind, idx, val) in enumerate(labels):
                (W if kind == "w" else A)[row, idx] = val
            errs, _ = evaluate(W, A)
            ranked = sorted(
                (float(errs[j]), labels[j][0], labels[j][1], j) for j in range(len(labels)))
            chosen = [j for err_j, _, _, j in ranked if err_j < ade - 1e-12][:MAX_APPLY]
            if not chosen:
                break
            # apply best-first cumulatively, revalidate the prefixes in one
            # batch, and keep the best revalidated prefix
            W_cum = np.empty((len(chosen), n))
            A_cum = np.empty((len(chosen), params.steps))
            w_run, a_run = weights.copy(), accels.copy()
            for r, j in enumerate(chosen):
                kind, idx, val = labels[j]
                if kind == "w":
                    w_run[idx] = val
                else:
                    a_run[idx] = val
                W_cum[r] = w_run
                A_cum[r] = a_run
            cum_errs, cum_rows = evaluate(W_cum, A_cum)
            k_best = int(np.argmin(cum_errs))
            if float(cum_errs[k_best]) >= ade - 1e-12:
                break
            ade = float(cum_errs[k_best])
            best_rows = cum_rows[k_best]
            weights = W_cum[k_best].copy()
            accels = A_cum[k_best].copy()
        history.append(ade)
        if ade <= STOP_ADE:
            break
        step_w /= 2.0
        step_a /= 2.0

    trajectory = Trajectory(best_rows, dt=params.dt, t0=gt.t0)
    return FitResult(weights=weights, accels=accels, trajectory=trajectory, ade=ade, ade_history=history)


def best_fit(
    boundaries: list[Boundary],
    gt: Trajectory,
    params: PursuitParams = PursuitParams(),
    iterations: int = ITERATIONS,
) -> tuple[int, FitResult]:
    """Fit every boundary and keep the lowest ADE; ties go to the lower index."""
    best: tuple[int, FitResult] | None = None
    for idx, boundary in enumerate(boundaries):
        try:
            result = fit(boundary, gt, params, iterations)
        except NoOverlapError:
            continue
        if best is None or result.ade < best[1].ade:
            best = (idx, result)
    if best is None:
        raise NoFitError("no boundary overlaps the ground truth")
    return best
