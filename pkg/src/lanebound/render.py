"""Static SVG scene renders: map, boundaries, history, truth, predictions.

Output is deterministic: fixed element order, fixed 0.01 px coordinate
rounding, no timestamps. Each boundary edge and each prediction becomes its
own polyline element so the file structure can be asserted in tests.
"""
from __future__ import annotations

import numpy as np

from .map_graph import ScenarioRecord

BOUNDARY_COLORS = ("#d95f02", "#7570b3", "#1b9e77", "#e7298a", "#66a61e", "#e6ab02")
LANE_FILL = "#e8e8e8"
LANE_STROKE = "#bbbbbb"
HISTORY_COLOR = "#555555"
TRUTH_COLOR = "#000000"
PREDICTION_COLOR = "#2b8cbe"


class _Frame:
    """World to screen mapping with a flipped y axis."""

    def __init__(self, lo, hi, width: float, margin: float):
        span = np.maximum(hi - lo, 1e-9)
        self.scale = (width - 2.0 * margin) / span.max()
        self.lo = lo
        self.margin = margin
        self.size = span * self.scale + 2.0 * margin

    def to_screen(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        out = (pts - self.lo) * self.scale + self.margin
        out[:, 1] = self.size[1] - out[:, 1]
        return out


def _coords(frame: _Frame, pts) -> str:
    return " ".join(f"{x:.2f},{y:.2f}" for x, y in frame.to_screen(pts))


def _polyline(frame, pts, cls: str, stroke: str, width: float, extra: str = "") -> str:
    return (f'<polyline class="{cls}" points="{_coords(frame, pts)}" fill="none" '
            f'stroke="{stroke}" stroke-width="{width:.2f}"{extra} />')


def render_svg(
    scenario: ScenarioRecord,
    boundaries=None,
    predictions=None,
    width: float = 900.0,
    margin: float = 24.0,
) -> str:
    """Compose the scene as an SVG document string."""
    rings = [lane.polygon_ring for lane in scenario.graph.lanes()]
    stack = [np.vstack(rings), scenario.focal_history.xy]
    if scenario.ground_truth_future is not None:
        stack.append(scenario.ground_truth_future.xy)
    for entry in (predictions.entries if predictions is not None else ()):
        stack.append(entry.trajectory.xy)
    all_pts = np.vstack(stack)
    frame = _Frame(all_pts.min(axis=0), all_pts.max(axis=0), width, margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {frame.size[0]:.2f} '
        f'{frame.size[1]:.2f}" width="{frame.size[0]:.0f}" height="{frame.size[1]:.0f}">',
        f'<rect width="{frame.size[0]:.2f}" height="{frame.size[1]:.2f}" fill="#ffffff" />',
    ]
    for lane, ring in zip(scenario.graph.lanes(), rings):
        parts.append(
            f'<polygon class="lane" data-lane="{lane.lane_id}" points="{_coords(frame, ring)}" '
            f'fill="{LANE_FILL}" stroke="{LANE_STROKE}" stroke-width="0.8" />')
    for i, b in enumerate(boundaries or ()):
        color = BOUNDARY_COLORS[i % len(BOUNDARY_COLORS)]
        parts.append(_polyline(frame, b.left, f"boundary-left boundary-{i}", color, 2.0))
        parts.append(_polyline(frame, b.right, f"boundary-right boundary-{i}", color, 2.0,
                               extra=' stroke-dasharray="6 3"'))
    parts.append(_polyline(
        frame, scenario.focal_history.xy, "history", HISTORY_COLOR, 2.5,
        extra=' stroke-dasharray="2 3"'))
    if scenario.ground_truth_future is not None:
        parts.append(_polyline(
            frame, scenario.ground_truth_future.xy, "ground-truth", TRUTH_COLOR, 2.5))
    for entry in (predictions.entries if predictions is not None else ()):
        opacity = 0.25 + 0.75 * float(entry.likelihood)
        parts.append(_polyline(
            frame, entry.trajectory.xy, f"prediction mode-{entry.mode}", PREDICTION_COLOR, 2.0,
            extra=f' stroke-opacity="{opacity:.3f}" data-likelihood="{entry.likelihood:.4f}"'))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
