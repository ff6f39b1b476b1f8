"""Kalman-filter multi-object tracking loop with the potentially-match lifecycle.

Each tracker carries a 7-dim constant-velocity state over its bounding box,
``(cx, cy, area, aspect, v_cx, v_cy, v_area)``, the SORT parameterization. Per
frame the loop predicts and ages every tracker, scores tracker-detection pairs
by IOU, runs the assignment, and corrects:

  * MATCH: Kalman update from the detection, age reset to 0
  * POTENTIAL_MATCH: no update (prediction kept), age decreased by anti_aging
  * UNMATCH: untouched

Unmatched detections spawn fresh trackers; trackers with age > max_age are
deleted. A tracker that is potentially-matched through an occlusion therefore
accumulates negative age and outlives gaps that would kill an unmatched one.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import assign as _assign
from . import sb as _sb

# constant-velocity transition and observation over (cx, cy, area, aspect)
KF_F = np.eye(7)
KF_F[0, 4] = KF_F[1, 5] = KF_F[2, 6] = 1.0
KF_H = np.eye(4, 7)
KF_Q = np.diag([1.0, 1.0, 1.0, 1.0, 0.01, 0.01, 0.0001])
KF_R = np.diag([1.0, 1.0, 10.0, 10.0])
KF_P0 = np.diag([10.0, 10.0, 10.0, 10.0, 1e4, 1e4, 1e4])

MIN_AREA = 1e-6


@dataclass(frozen=True)
class BoundingBox:
    left: float
    top: float
    width: float
    height: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError(f"box width/height must be positive, got {self}")

    @classmethod
    def from_center(cls, cx: float, cy: float, width: float, height: float) -> "BoundingBox":
        return cls(cx - width / 2.0, cy - height / 2.0, width, height)

    @property
    def right(self) -> float:
        return self.left + self.width

    @property
    def bottom(self) -> float:
        return self.top + self.height

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class Detection:
    box: BoundingBox
    confidence: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.confidence):
            raise ValueError("detection confidence must be finite")


@dataclass
class Tracker:
    """One tracked object: identity, Kalman state, and age in frames."""

    id: int
    x: np.ndarray  # (cx, cy, area, aspect, v_cx, v_cy, v_area)
    cov: np.ndarray
    age: int = 0

    @property
    def r(self) -> np.ndarray:
        return self.x[:4]

    @property
    def r_dot(self) -> np.ndarray:
        return self.x[4:]

    @property
    def box(self) -> BoundingBox:
        cx, cy, area, aspect = self.x[:4]
        width = math.sqrt(max(area * aspect, MIN_AREA))
        height = max(area, MIN_AREA) / width
        return BoundingBox.from_center(cx, cy, width, height)


@dataclass(frozen=True)
class TrackConfig:
    max_age: int = 5
    anti_aging: int = 5
    c_small: float = _assign.DEFAULT_C_SMALL
    c_large: float = _assign.DEFAULT_C_LARGE
    s_min: float = _assign.DEFAULT_S_MIN
    sb_params: _sb.SbParams = field(default_factory=_sb.SbParams)

    def __post_init__(self):
        if self.max_age < 0 or self.anti_aging < 0:
            raise ValueError("max_age and anti_aging must be non-negative")
        if not self.c_small < self.c_large:
            raise ValueError(f"need c_small < c_large, got {self.c_small} >= {self.c_large}")


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union of two boxes; 0 when disjoint."""
    iw = min(a.right, b.right) - max(a.left, b.left)
    ih = min(a.bottom, b.bottom) - max(a.top, b.top)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return inter / (a.area + b.area - inter)


def similarity_matrix(trackers, detections) -> np.ndarray:
    s = np.zeros((len(trackers), len(detections)))
    boxes = [t.box for t in trackers]
    for ti, tb in enumerate(boxes):
        for di, det in enumerate(detections):
            s[ti, di] = iou(tb, det.box)
    return s


def _box_to_z(box: BoundingBox) -> np.ndarray:
    cx = box.left + box.width / 2.0
    cy = box.top + box.height / 2.0
    return np.array([cx, cy, box.width * box.height, box.width / box.height])


def new_tracker(detection: Detection, tracker_id: int) -> Tracker:
    """Spawn a tracker from a detection: zero velocities, age 0."""
    x = np.zeros(7)
    x[:4] = _box_to_z(detection.box)
    return Tracker(id=tracker_id, x=x, cov=KF_P0.copy(), age=0)


def predict(tracker: Tracker) -> Tracker:
    """Constant-velocity Kalman prediction; increments age. Mutates in place."""
    tracker.x = KF_F @ tracker.x
    tracker.cov = KF_F @ tracker.cov @ KF_F.T + KF_Q
    tracker.x[2] = max(tracker.x[2], MIN_AREA)
    tracker.x[3] = max(tracker.x[3], MIN_AREA)
    tracker.age += 1
    return tracker


def update(tracker: Tracker, detection: Detection, measurement_noise=None) -> Tracker:
    """Kalman measurement update from a detection; resets age to 0.

    Raises ``numpy.linalg.LinAlgError`` on a degenerate innovation covariance,
    leaving the tracker unmodified.
    """
    r = KF_R if measurement_noise is None else np.asarray(measurement_noise)
    z = _box_to_z(detection.box)
    innovation = z - KF_H @ tracker.x
    s_mat = KF_H @ tracker.cov @ KF_H.T + r
    gain = np.linalg.solve(s_mat, KF_H @ tracker.cov).T
    tracker.x = tracker.x + gain @ innovation
    tracker.cov = (np.eye(7) - gain @ KF_H) @ tracker.cov
    tracker.x[2] = max(tracker.x[2], MIN_AREA)
    tracker.x[3] = max(tracker.x[3], MIN_AREA)
    tracker.age = 0
    return tracker


def make_sb_solver(params: _sb.SbParams):
    """Adapter handing :func:`sb.solve_qubo` to the assignment layer."""

    def solver(problem):
        bits, _ = _sb.solve_qubo(problem, params)
        return bits

    return solver


def make_flexible_assigner(cfg: TrackConfig):
    solver = make_sb_solver(cfg.sb_params)

    def assigner(s):
        return _assign.flexible_assign(
            s, solver, c_small=cfg.c_small, c_large=cfg.c_large, s_min=cfg.s_min
        )

    return assigner


def make_baseline_assigner(cfg: TrackConfig):
    """Hungarian assignment with potentially-match disabled."""

    def assigner(s):
        return _assign.hungarian_assign(s, s_min=cfg.s_min)

    return assigner


def _empty_result(n_t: int, n_d: int) -> _assign.AssignmentResult:
    return _assign.AssignmentResult(
        decisions=[_assign.TrackerDecision(_assign.TrackerState.UNMATCH)] * n_t,
        unmatched_detections=list(range(n_d)),
        table_large=np.zeros((n_t, n_d), dtype=np.int64),
        table_small=np.zeros((n_t, n_d), dtype=np.int64),
    )


def step(
    trackers,
    detections,
    cfg: TrackConfig,
    assigner=None,
    id_counter=None,
) -> tuple[list[Tracker], _assign.AssignmentResult]:
    """Advance the tracking state by one frame.

    Callers that process a whole sequence should pass a persistent
    ``id_counter`` (any ``next()``-able producing ints) so ids are never reused
    after deletions; :class:`MultiObjectTracker` does this. A frame with zero
    detections still predicts, ages, and deletes.
    """
    trackers = list(trackers)
    if assigner is None:
        assigner = make_flexible_assigner(cfg)
    if id_counter is None:
        id_counter = itertools.count(max((t.id for t in trackers), default=0) + 1)
    for tracker in trackers:
        predict(tracker)
    n_t, n_d = len(trackers), len(detections)
    if n_t == 0 or n_d == 0:
        result = _empty_result(n_t, n_d)
    else:
        result = assigner(similarity_matrix(trackers, detections))
    for tracker, decision in zip(trackers, result.decisions):
        if decision.state is _assign.TrackerState.MATCH:
            update(tracker, detections[decision.detection])
        elif decision.state is _assign.TrackerState.POTENTIAL_MATCH:
            tracker.age -= cfg.anti_aging
    for d in result.unmatched_detections:
        trackers.append(new_tracker(detections[d], next(id_counter)))
    survivors = [t for t in trackers if t.age <= cfg.max_age]
    return survivors, result


class MultiObjectTracker:
    """Stateful per-sequence loop owning the tracker list and the id counter."""

    def __init__(self, cfg: TrackConfig | None = None, assigner=None):
        self.cfg = cfg if cfg is not None else TrackConfig()
        self.assigner = assigner if assigner is not None else make_flexible_assigner(self.cfg)
        self.trackers: list[Tracker] = []
        self._ids = itertools.count(1)

    def step(self, detections) -> _assign.AssignmentResult:
        self.trackers, result = step(
            self.trackers, detections, self.cfg, assigner=self.assigner, id_counter=self._ids
        )
        return result
