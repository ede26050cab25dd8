import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perchdrill.frames import (
    Pose,
    hinge_pose_AB,
    matrix_to_quat,
    quat_conjugate,
    quat_from_axis_angle,
    quat_multiply,
    quat_normalize,
    quat_to_matrix,
    rot_y,
)
from perchdrill.params import Geometry


def hom(R, t):
    T = np.eye(4)
    T[:3, :3] = R
    T[:3, 3] = t
    return T


def pose_to_hom(p: Pose):
    return hom(p.rotation, p.position)


unit_quat = st.tuples(
    st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)
).filter(lambda q: np.linalg.norm(q) > 1e-2).map(
    lambda q: quat_normalize(np.array(q))
)
vec3 = st.tuples(
    st.floats(-10, 10), st.floats(-10, 10), st.floats(-10, 10)
).map(np.array)


class TestQuaternions:
    def test_identity(self):
        q = np.array([1.0, 0, 0, 0])
        assert np.allclose(quat_to_matrix(q), np.eye(3))

    def test_axis_angle_matches_rotation_matrix(self):
        # quarter turn about y: hand-written matrix
        q = quat_from_axis_angle(np.array([0.0, 1.0, 0.0]), math.pi / 2)
        expect = np.array([[0.0, 0, 1], [0, 1, 0], [-1, 0, 0]])
        assert np.allclose(quat_to_matrix(q), expect, atol=1e-12)

    @given(unit_quat, unit_quat)
    @settings(max_examples=50, deadline=None)
    def test_multiply_composes_like_matrices(self, q1, q2):
        R = quat_to_matrix(quat_multiply(q1, q2))
        assert np.allclose(R, quat_to_matrix(q1) @ quat_to_matrix(q2), atol=1e-9)

    @given(unit_quat)
    @settings(max_examples=50, deadline=None)
    def test_conjugate_inverts(self, q):
        qq = quat_multiply(q, quat_conjugate(q))
        assert np.allclose(np.abs(qq[0]), 1.0, atol=1e-9)
        assert np.allclose(qq[1:], 0.0, atol=1e-9)

    @given(unit_quat)
    @settings(max_examples=50, deadline=None)
    def test_matrix_quat_round_trip(self, q):
        q2 = matrix_to_quat(quat_to_matrix(q))
        # q and -q encode the same rotation
        assert np.allclose(q2, q, atol=1e-7) or np.allclose(q2, -q, atol=1e-7)


class TestPose:
    @given(unit_quat, vec3, unit_quat, vec3, vec3)
    @settings(max_examples=50, deadline=None)
    def test_compose_matches_homogeneous_product(self, q1, t1, q2, t2, pt):
        a, b = Pose(t1, q1), Pose(t2, q2)
        via_pose = a.compose(b).transform(pt)
        via_hom = (pose_to_hom(a) @ pose_to_hom(b) @ np.append(pt, 1.0))[:3]
        assert np.allclose(via_pose, via_hom, atol=1e-8)

    @given(unit_quat, vec3, vec3)
    @settings(max_examples=50, deadline=None)
    def test_inverse_round_trip(self, q, t, pt):
        p = Pose(t, q)
        assert np.allclose(p.inverse().transform(p.transform(pt)), pt, atol=1e-8)


class TestHingePose:
    def test_flat_at_zero(self):
        g = Geometry()
        T = hinge_pose_AB(0.0, 0.0, g)
        assert np.allclose(T.rotation, np.eye(3), atol=1e-12)
        # body origin sits one standoff plus the hinge arm behind the wall plane
        assert np.allclose(
            T.position, [-g.attachment_standoff - g.hinge_offset, 0.0, 0.0], atol=1e-12
        )

    def test_vertical_at_ninety(self):
        g = Geometry()
        T = hinge_pose_AB(math.pi / 2, 0.0, g)
        # body z now points into the wall (+x_A)
        assert np.allclose(T.rotation @ np.array([0, 0, 1.0]), [1, 0, 0], atol=1e-12)
        # hand-derived: pivot at -standoff; the nose tilts down, so the body
        # origin ends up one hinge arm above the pivot
        assert np.allclose(
            T.position, [-g.attachment_standoff, 0.0, g.hinge_offset], atol=1e-12
        )

    def test_slide_advances_along_wall_normal(self):
        g = Geometry()
        a = hinge_pose_AB(math.pi / 2, 0.0, g)
        b = hinge_pose_AB(math.pi / 2, 0.04, g)
        assert np.allclose(b.position - a.position, [0.04, 0, 0], atol=1e-12)

    @given(st.floats(0, math.pi / 2), st.floats(0, 0.15))
    @settings(max_examples=50, deadline=None)
    def test_rotation_is_pure_pitch(self, theta, p):
        T = hinge_pose_AB(theta, p, Geometry())
        assert np.allclose(T.rotation, rot_y(theta), atol=1e-12)


class TestFrameTransform:
    def test_round_trip_all_frames(self, params):
        from perchdrill.frames import frame_transform
        from perchdrill.state import SimState

        state = SimState(
            body_pose=Pose(
                np.array([1.0, -2.0, 3.0]),
                quat_from_axis_angle(np.array([0.3, -0.5, 0.8]), 1.1),
            ),
            hinge_theta=0.7,
            hinge_slide=0.05,
        )
        pt = np.array([0.21, -0.07, 0.13])
        frames = ["W", "B", "A", "T"]
        for frm in frames:
            for to in frames:
                out = frame_transform(state, frm, to, pt, params)
                back = frame_transform(state, to, frm, out, params)
                assert np.linalg.norm(back - pt) < 1e-9, (frm, to)
