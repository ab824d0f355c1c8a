"""Polyline and polygon primitives shared across the package.

All polylines are (N, 2) float64 arrays in meters. Angles are radians.
"""
from __future__ import annotations

import numpy as np

from .errors import ScenarioParseError


def wrap_angle(theta):
    """Wrap angle(s) into (-pi, pi]."""
    wrapped = np.mod(np.asarray(theta, dtype=float) + np.pi, 2.0 * np.pi) - np.pi
    wrapped = np.where(wrapped == -np.pi, np.pi, wrapped)
    if np.ndim(theta) == 0:
        return float(wrapped)
    return wrapped


def cross2(a, b):
    """z component of the cross product of planar vectors (broadcasts)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def as_polyline(values, field: str = "polyline") -> np.ndarray:
    """Validate and convert to an (N, 2) float array with N >= 2.

    Rejects non-finite coordinates and zero-length segments so that arc
    length is strictly increasing along the result.
    """
    pts = np.asarray(values, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise ScenarioParseError(field, f"expected an (N, 2) polyline with N >= 2, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ScenarioParseError(field, "non-finite coordinate")
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    if np.any(seg <= 1e-12):
        raise ScenarioParseError(field, "repeated consecutive point, arc length must strictly increase")
    return pts


def dedupe_points(pts: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Drop consecutive points closer than tol."""
    pts = np.asarray(pts, dtype=float)
    if len(pts) < 2:
        return pts
    keep = [0]
    for i in range(1, len(pts)):
        if np.linalg.norm(pts[i] - pts[keep[-1]]) > tol:
            keep.append(i)
    return pts[keep]


def cum_arclength(pts: np.ndarray) -> np.ndarray:
    """Cumulative arc length, starting at 0, one entry per point."""
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    return np.concatenate([[0.0], np.cumsum(seg)])


def polyline_length(pts: np.ndarray) -> float:
    return float(cum_arclength(pts)[-1])


def sample_at_arclengths(pts: np.ndarray, arcs) -> np.ndarray:
    """Linear interpolation of a polyline at the given arc-length positions.

    Positions are clamped to [0, total length].
    """
    cum = cum_arclength(pts)
    s = np.clip(np.asarray(arcs, dtype=float), 0.0, cum[-1])
    x = np.interp(s, cum, pts[:, 0])
    y = np.interp(s, cum, pts[:, 1])
    return np.stack([x, y], axis=1)


def resample_at_spacing(pts: np.ndarray, spacing: float) -> np.ndarray:
    """Resample at a fixed arc-length step, always keeping the end point."""
    total = polyline_length(pts)
    n = max(int(np.ceil(total / spacing)), 1)
    arcs = np.linspace(0.0, total, n + 1)
    return sample_at_arclengths(pts, arcs)


def point_at_arclength(pts: np.ndarray, s: float) -> np.ndarray:
    """Point at arc length s, clamped to the ends of the polyline."""
    return sample_at_arclengths(pts, [s])[0]


def tangent_at_arclength(pts: np.ndarray, s: float) -> np.ndarray:
    """Unit tangent of the segment containing arc length s."""
    cum = cum_arclength(pts)
    s = float(np.clip(s, 0.0, cum[-1]))
    idx = int(np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(pts) - 2))
    d = pts[idx + 1] - pts[idx]
    return d / np.linalg.norm(d)


def project_to_polyline(pts: np.ndarray, point, first_segment: int = 0):
    """Project a point onto a polyline.

    Only segments at or after ``first_segment`` are considered, which lets
    path-following callers forbid backward jumps.

    Returns
    -------
    (s, distance, segment_index)
        Arc length of the projection, distance to it, and the segment index.
    """
    pts = np.asarray(pts, dtype=float)
    p = np.asarray(point, dtype=float)
    a = pts[first_segment:-1]
    b = pts[first_segment + 1:]
    d = b - a
    seg_len2 = np.einsum("ij,ij->i", d, d)
    t = np.clip(np.einsum("ij,ij->i", p - a, d) / np.maximum(seg_len2, 1e-18), 0.0, 1.0)
    proj = a + t[:, None] * d
    dist = np.linalg.norm(proj - p, axis=1)
    k = int(np.argmin(dist))
    cum = cum_arclength(pts)
    seg_idx = first_segment + k
    s = cum[seg_idx] + t[k] * np.sqrt(seg_len2[k])
    return float(s), float(dist[k]), seg_idx


def min_distance_to_polyline(pts: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Distance from each query point to the nearest point of the polyline."""
    pts = np.asarray(pts, dtype=float)
    q = np.atleast_2d(np.asarray(points, dtype=float))
    a = pts[:-1][None, :, :]          # (1, M, 2)
    d = np.diff(pts, axis=0)[None, :, :]
    seg_len2 = np.einsum("ijk,ijk->ij", d, d)
    rel = q[:, None, :] - a           # (N, M, 2)
    t = np.clip(np.einsum("ijk,ijk->ij", rel, d) / np.maximum(seg_len2, 1e-18), 0.0, 1.0)
    proj = a + t[..., None] * d
    dist = np.linalg.norm(proj - q[:, None, :], axis=2)
    return dist.min(axis=1)


def points_in_ring(points: np.ndarray, ring: np.ndarray, boundary_tol: float = 1e-9) -> np.ndarray:
    """Even-odd containment test with inclusive boundary.

    ``ring`` is an open polygon ring (first point not repeated). Points within
    boundary_tol of an edge count as inside regardless of crossing parity.
    """
    q = np.atleast_2d(np.asarray(points, dtype=float))
    ring = np.asarray(ring, dtype=float)
    x, y = q[:, 0][:, None], q[:, 1][:, None]
    xi, yi = ring[:, 0][None, :], ring[:, 1][None, :]
    xj = np.roll(ring[:, 0], -1)[None, :]
    yj = np.roll(ring[:, 1], -1)[None, :]
    straddles = (yi > y) != (yj > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = (xj - xi) * (y - yi) / (yj - yi) + xi
    crossings = straddles & (x < x_cross)
    inside = (crossings.sum(axis=1) % 2).astype(bool)
    closed = np.vstack([ring, ring[:1]])
    on_edge = min_distance_to_polyline(closed, q) <= boundary_tol
    return inside | on_edge


def polygon_area(ring: np.ndarray) -> float:
    """Unsigned shoelace area of an open ring."""
    ring = np.asarray(ring, dtype=float)
    x, y = ring[:, 0], ring[:, 1]
    return float(abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))) / 2.0)


def segments_intersect(p1, p2, q1, q2, eps: float = 1e-12) -> bool:
    """Proper or touching intersection test for two closed segments."""
    p1, p2, q1, q2 = (np.asarray(v, dtype=float) for v in (p1, p2, q1, q2))
    r = p2 - p1
    s = q2 - q1
    denom = cross2(r, s)
    qp = q1 - p1
    if abs(denom) < eps:
        if abs(cross2(qp, r)) > eps:
            return False
        # collinear: check 1D overlap along r
        rr = float(np.dot(r, r))
        if rr < eps:
            return bool(np.linalg.norm(qp) < eps)
        t0 = float(np.dot(qp, r)) / rr
        t1 = t0 + float(np.dot(s, r)) / rr
        return bool(max(min(t0, t1), 0.0) <= min(max(t0, t1), 1.0))
    t = float(cross2(qp, s)) / denom
    u = float(cross2(qp, r)) / denom
    return bool(-eps <= t <= 1 + eps and -eps <= u <= 1 + eps)


def polylines_cross(a: np.ndarray, b: np.ndarray) -> bool:
    """True if any segment of a intersects any segment of b.

    All segment pairs are tested at once; parallel overlapping pairs are
    resolved by endpoint-on-segment distance checks.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p = a[:-1][:, None, :]                    # (n, 1, 2)
    r = np.diff(a, axis=0)[:, None, :]
    q = b[:-1][None, :, :]                    # (1, m, 2)
    s = np.diff(b, axis=0)[None, :, :]
    denom = cross2(r, s)                    # (n, m)
    qp = q - p
    with np.errstate(divide="ignore", invalid="ignore"):
        t = cross2(qp, s) / denom
        u = cross2(qp, r) / denom
    eps = 1e-12
    proper = (np.abs(denom) > eps) & (t >= -eps) & (t <= 1 + eps) & (u >= -eps) & (u <= 1 + eps)
    if proper.any():
        return True
    # parallel pairs: touch iff an endpoint of one lies on the other
    parallel = (np.abs(denom) <= eps) & (np.abs(cross2(qp, r)) <= eps)
    if parallel.any():
        nearest_b = min_distance_to_polyline(b, a.reshape(-1, 2))
        nearest_a = min_distance_to_polyline(a, b.reshape(-1, 2))
        return bool(nearest_b.min() <= 1e-9 or nearest_a.min() <= 1e-9)
    return False


def segment_crossing_parameter(p1, p2, q1, q2):
    """Where segment q crosses segment p, or None.

    Returns (t, u) with the crossing point at p1 + t*(p2-p1) = q1 + u*(q2-q1),
    both in [0, 1]. Parallel segments return None.
    """
    p1, p2, q1, q2 = (np.asarray(v, dtype=float) for v in (p1, p2, q1, q2))
    r = p2 - p1
    s = q2 - q1
    denom = cross2(r, s)
    if abs(denom) < 1e-14:
        return None
    qp = q1 - p1
    t = float(cross2(qp, s)) / denom
    u = float(cross2(qp, r)) / denom
    if -1e-12 <= t <= 1 + 1e-12 and -1e-12 <= u <= 1 + 1e-12:
        return min(max(t, 0.0), 1.0), min(max(u, 0.0), 1.0)
    return None


def rigid_transform(pts: np.ndarray, angle: float, translation) -> np.ndarray:
    """Rotate by angle about the origin, then translate."""
    c, s = np.cos(angle), np.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return np.asarray(pts, dtype=float) @ rot.T + np.asarray(translation, dtype=float)
