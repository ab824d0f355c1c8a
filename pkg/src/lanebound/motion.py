"""Agent state and trajectory containers."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ScenarioParseError
from .geometry import wrap_angle


@dataclass(frozen=True)
class Pose2:
    """Planar pose. Heading is radians in (-pi, pi], x axis is heading 0."""

    x: float
    y: float
    heading: float

    def __post_init__(self):
        if not (np.isfinite(self.x) and np.isfinite(self.y) and np.isfinite(self.heading)):
            raise ScenarioParseError("pose", "non-finite pose component")
        object.__setattr__(self, "heading", wrap_angle(self.heading))

    @property
    def xy(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class AgentState:
    """Pose plus scalar speed (m/s, never negative)."""

    pose: Pose2
    speed: float

    def __post_init__(self):
        if not np.isfinite(self.speed) or self.speed < 0.0:
            raise ScenarioParseError("speed", f"speed must be finite and >= 0, got {self.speed}")

    @property
    def x(self) -> float:
        return self.pose.x

    @property
    def y(self) -> float:
        return self.pose.y

    @property
    def heading(self) -> float:
        return self.pose.heading

    @property
    def xy(self) -> np.ndarray:
        return self.pose.xy

    @classmethod
    def make(cls, x: float, y: float, heading: float, speed: float) -> "AgentState":
        return cls(Pose2(float(x), float(y), float(heading)), float(speed))


@dataclass
class Trajectory:
    """Uniformly timed state sequence.

    ``data`` has one row per state: columns x, y, heading, speed. Rollouts
    include the initial state as row 0; recorded futures start one step after
    the observation instant.
    """

    data: np.ndarray
    dt: float = 0.1
    t0: float = 0.0

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.ndim != 2 or self.data.shape[1] != 4 or self.data.shape[0] < 1:
            raise ScenarioParseError("trajectory", f"expected (N, 4) state rows, got shape {self.data.shape}")
        if not np.all(np.isfinite(self.data)):
            raise ScenarioParseError("trajectory", "non-finite state component")
        if np.any(self.data[:, 3] < 0.0):
            raise ScenarioParseError("trajectory", "negative speed")
        if self.dt <= 0.0:
            raise ScenarioParseError("trajectory", f"dt must be positive, got {self.dt}")
        self.data[:, 2] = wrap_angle(self.data[:, 2])

    def __len__(self) -> int:
        return self.data.shape[0]

    @property
    def xy(self) -> np.ndarray:
        return self.data[:, :2]

    @property
    def headings(self) -> np.ndarray:
        return self.data[:, 2]

    @property
    def speeds(self) -> np.ndarray:
        return self.data[:, 3]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self))

    def state(self, i: int) -> AgentState:
        x, y, heading, speed = self.data[i]
        return AgentState(Pose2(x, y, heading), speed)

    @property
    def end_state(self) -> AgentState:
        return self.state(len(self) - 1)

    @classmethod
    def from_states(cls, states, dt: float = 0.1, t0: float = 0.0) -> "Trajectory":
        rows = np.array([[s.x, s.y, s.heading, s.speed] for s in states], dtype=float)
        return cls(rows, dt=dt, t0=t0)


def timed_rows_to_trajectory(rows, field: str) -> Trajectory:
    """Parse [[t, x, y, heading, speed], ...] rows with a uniform 0.1 s step."""
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 5 or arr.shape[0] < 1:
        raise ScenarioParseError(field, f"expected rows of [t, x, y, heading, speed], got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ScenarioParseError(field, "non-finite entry")
    t = arr[:, 0]
    if len(t) > 1:
        steps = np.diff(t)
        if np.any(np.abs(steps - 0.1) > 1e-6):
            raise ScenarioParseError(field, "timestamps must advance by 0.1 s")
    return Trajectory(arr[:, 1:], dt=0.1, t0=float(t[0]))
