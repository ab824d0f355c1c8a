"""Exception types raised by the library.

Every failure mode that callers are expected to handle gets its own class so
pipelines can distinguish bad input from a degenerate-but-valid scene.
"""


class LaneboundError(Exception):
    """Base class for all library errors."""


class ScenarioParseError(LaneboundError):
    """Scenario payload violates the schema. Carries the offending field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class GraphIntegrityError(LaneboundError):
    """Lane graph references or neighbor relations are inconsistent."""


class NoStartLaneError(LaneboundError):
    """No lane matches the agent pose. Callers may widen the thresholds."""


class DegenerateClusterError(LaneboundError):
    """Goal cluster has a cyclic neighbor relation, no leftmost/rightmost lane."""


class UnreachableGoalError(LaneboundError):
    """No lane path from the start to a cluster extreme; cluster is inconsistent."""


class TooShortError(LaneboundError):
    """Raw boundary polyline is shorter than the minimum usable length."""


class AlignmentError(LaneboundError):
    """Left/right polylines cannot be paired point-for-point."""


class DegenerateBoundaryError(LaneboundError):
    """Boundary geometry violates its side or crossing invariants."""


class EmptyBoundarySetError(LaneboundError):
    """Every goal cluster failed boundary extraction."""


class NoOverlapError(LaneboundError):
    """Ground truth shares no spatial overlap with the boundary corridor."""


class NoFitError(LaneboundError):
    """No boundary admits a fit for the given ground truth."""


class NoPredictionError(LaneboundError):
    """Predictor produced no entries for the scenario."""


class DegenerateWarpError(LaneboundError):
    """Scene warp folded a lane polygon onto itself."""


class ProfileError(LaneboundError):
    """Weight or acceleration profile violates its range or length contract."""
