"""Coordinate frames, quaternion helpers, and the homogeneous transforms
linking the world (W), body (B), attachment (A), and tool (T) frames.

Conventions:
  W: z up, gravity along -z.
  B: FLU body frame at the airframe reference point (flight COM).
  A: centered between the suction cups on the wall plane; x_A points in the
     suction direction (into the wall), y_A from right to left cup, z_A up
     when the wall is vertical.
  T: tooltip frame, axes aligned with B.

The hinge gives two relative freedoms between A and B: tilt theta about the
common y axis (0 = flight attitude, pi/2 = tool table parallel to the wall)
and slide p along x_A (0 = fully retracted, increasing toward the wall).
R_AB = R_y(theta), so at theta = 90 deg the body z axis maps onto +x_A and
an even spin-up of all four rotors pushes the tool into the wall.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FRAMES = ("W", "B", "A", "T")


def quat_normalize(q):
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q)
    if n == 0.0:
        raise ValueError("zero quaternion")
    return q / n


def quat_multiply(a, b):
    w1, x1, y1, z1 = a
    w2, x2, y2, z2 = b
    return np.array(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ]
    )


def quat_conjugate(q):
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_to_matrix(q):
    w, x, y, z = quat_normalize(q)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def matrix_to_quat(R):
    R = np.asarray(R, dtype=float)
    t = np.trace(R)
    if t > 0:
        s = np.sqrt(t + 1.0) * 2
        q = np.array(
            [0.25 * s, (R[2, 1] - R[1, 2]) / s, (R[0, 2] - R[2, 0]) / s, (R[1, 0] - R[0, 1]) / s]
        )
    else:
        i = int(np.argmax(np.diag(R)))
        j, k = (i + 1) % 3, (i + 2) % 3
        s = np.sqrt(max(1.0 + R[i, i] - R[j, j] - R[k, k], 0.0)) * 2
        q = np.empty(4)
        q[0] = (R[k, j] - R[j, k]) / s
        q[1 + i] = 0.25 * s
        q[1 + j] = (R[j, i] + R[i, j]) / s
        q[1 + k] = (R[k, i] + R[i, k]) / s
    return quat_normalize(q)


def quat_from_axis_angle(axis, angle):
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    half = 0.5 * angle
    return np.concatenate(([np.cos(half)], np.sin(half) * axis))


def rot_y(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


@dataclass
class Pose:
    """Rigid transform parent <- child: position of the child origin in the
    parent frame and the child-to-parent rotation as a unit quaternion."""

    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    orientation: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0, 0.0]))

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float).copy()
        self.orientation = quat_normalize(self.orientation)

    @property
    def rotation(self):
        return quat_to_matrix(self.orientation)

    def transform(self, point):
        return self.rotation @ np.asarray(point, dtype=float) + self.position

    def inverse(self) -> "Pose":
        R = self.rotation
        return Pose(-R.T @ self.position, quat_conjugate(self.orientation))

    def compose(self, other: "Pose") -> "Pose":
        """self (a<-b) composed with other (b<-c) giving a<-c."""
        return Pose(
            self.transform(other.position),
            quat_multiply(self.orientation, other.orientation),
        )

    def copy(self) -> "Pose":
        return Pose(self.position.copy(), self.orientation.copy())


def hinge_pose_AB(theta, p, geometry) -> Pose:
    """Pose of B in A as a function of the hinge coordinates.

    The hinge axis rides on the slide carriage at x_A = p - standoff; the
    rotational bearing attaches to the body at ``hinge_offset`` ahead of the
    body origin.
    """
    R = rot_y(theta)
    carriage = np.array([p - geometry.attachment_standoff, 0.0, 0.0])
    origin = carriage - R @ np.array([geometry.hinge_offset, 0.0, 0.0])
    return Pose(origin, quat_from_axis_angle([0.0, 1.0, 0.0], theta))


def tool_pose_BT(gantry_pos, geometry) -> Pose:
    """Pose of the tooltip frame in B: gantry xy plus the fixed tip offset."""
    gx, gy = gantry_pos
    t = np.array(
        [gx + geometry.tool_tip_offset[0], gy + geometry.tool_tip_offset[1], geometry.tool_tip_offset[2]]
    )
    return Pose(t, np.array([1.0, 0.0, 0.0, 0.0]))


def frame_transform(state, frm: str, to: str, point, params) -> np.ndarray:
    """Express ``point`` (given in frame ``frm``) in frame ``to``.

    Uses the three published relations: W<-B from the body pose, A<-B from
    the hinge coordinates, B<-T from the gantry position.
    """
    if frm not in FRAMES or to not in FRAMES:
        raise ValueError(f"unknown frame id: {frm!r} -> {to!r}")
    point = np.asarray(point, dtype=float)
    if frm == to:
        return point.copy()

    geometry = params.geometry
    T_WB = state.body_pose
    T_AB = hinge_pose_AB(state.hinge_theta, state.hinge_slide, geometry)
    T_BT = tool_pose_BT(state.gantry_pos, geometry)

    def to_B(f, pt):
        if f == "B":
            return pt
        if f == "W":
            return T_WB.inverse().transform(pt)
        if f == "A":
            return T_AB.transform(pt)
        return T_BT.transform(pt)  # T

    def from_B(f, pt):
        if f == "B":
            return pt
        if f == "W":
            return T_WB.transform(pt)
        if f == "A":
            return T_AB.inverse().transform(pt)
        return T_BT.inverse().transform(pt)  # T

    return from_B(to, to_B(frm, point))
