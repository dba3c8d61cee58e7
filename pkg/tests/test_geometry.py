import math

import numpy as np
import numpy.testing as npt
import pytest

from conceptid.dataset import BoundingBox
from conceptid.geometry import (
    MIN_AXIS_FRACTION,
    Ellipsoid,
    EllipsoidSet,
    contains,
    decode,
    encode,
    membership_mask,
    num_params,
    rotation_matrix,
)


def test_num_params_table():
    assert num_params([1, 1], 3) == 12
    assert num_params([2, 2], 3) == 30
    assert num_params([1, 2], 3) == 21


def test_num_params_single_ellipsoid_formula():
    for n in range(1, 8):
        assert num_params([n], 1) == n * (n + 3) // 2


def test_rotation_identity_and_quarter_turn():
    npt.assert_allclose(rotation_matrix([0.0], 2), np.eye(2))
    r = rotation_matrix([math.pi / 2], 2)
    npt.assert_allclose(r @ np.array([1.0, 0.0]), [0.0, 1.0], atol=1e-12)


def test_rotation_orthonormal_random_angles():
    rng = np.random.default_rng(42)
    for n in (2, 3, 4, 6):
        angles = rng.uniform(0, math.pi, n * (n - 1) // 2)
        r = rotation_matrix(angles, n)
        npt.assert_allclose(r.T @ r, np.eye(n), atol=1e-10)
        assert abs(np.linalg.det(r) - 1.0) < 1e-10


def test_rotation_wrong_angle_count():
    with pytest.raises(ValueError):
        rotation_matrix([0.1, 0.2], 2)


def test_contains_unit_ball():
    ball = Ellipsoid([0.0, 0.0], [1.0, 1.0], [0.0])
    assert contains(ball, [0.0, 0.0])
    assert contains(ball, [1.0, 0.0])  # boundary inclusive
    assert not contains(ball, [2.0, 0.0])


def test_membership_mask_matches_contains():
    rng = np.random.default_rng(3)
    for n in (1, 2, 3):
        e = Ellipsoid(
            rng.standard_normal(n),
            rng.uniform(0.2, 2.0, n),
            rng.uniform(0, math.pi, n * (n - 1) // 2),
        )
        pts = rng.standard_normal((200, n)) * 2
        mask = membership_mask(e, pts)
        oracle = np.array([contains(e, p) for p in pts])
        npt.assert_array_equal(mask, oracle)
        assert 0 < mask.sum() < len(pts)  # exercise both outcomes


def test_membership_mask_edge_cases():
    e = Ellipsoid([1.0, 2.0], [0.5, 0.5], [0.0])
    assert membership_mask(e, np.empty((0, 2))).shape == (0,)
    center_stack = np.tile([1.0, 2.0], (5, 1))
    assert membership_mask(e, center_stack).all()
    with pytest.raises(ValueError):
        membership_mask(e, np.ones((3, 3)))


def test_membership_invariant_under_ball_rotation():
    # an axis-aligned ball re-expressed with any rotation has identical membership
    rng = np.random.default_rng(7)
    pts = rng.standard_normal((500, 3)) * 1.5
    base = Ellipsoid([0.1, -0.2, 0.3], [1.2, 1.2, 1.2], [0.0, 0.0, 0.0])
    for _ in range(5):
        rotated = Ellipsoid(base.center, base.semi_axes, rng.uniform(0, math.pi, 3))
        npt.assert_array_equal(membership_mask(base, pts), membership_mask(rotated, pts))


def test_membership_monotone_in_scale():
    rng = np.random.default_rng(11)
    pts = rng.standard_normal((400, 2)) * 2
    e = Ellipsoid([0.0, 0.0], [0.8, 1.3], [0.7])
    bigger = Ellipsoid(e.center, 1.7 * e.semi_axes, e.angles)
    small = membership_mask(e, pts)
    assert not np.any(small & ~membership_mask(bigger, pts))


def test_ellipsoid_validation():
    with pytest.raises(ValueError):
        Ellipsoid([0.0], [0.0], [])  # zero semi-axis
    with pytest.raises(ValueError):
        Ellipsoid([0.0, 0.0], [1.0, 1.0], [math.pi])  # angle out of range
    with pytest.raises(ValueError):
        Ellipsoid([0.0, 0.0], [1.0], [0.0])


BOXES_2D = [BoundingBox(np.array([0.0]), np.array([10.0])), BoundingBox(np.array([-5.0, 0.0]), np.array([5.0, 2.0]))]


def _random_interior_set(rng, n_concepts=2):
    rows = []
    for _ in range(n_concepts):
        row = []
        for box in BOXES_2D:
            n = box.lower.size
            center = rng.uniform(box.lower, box.upper)
            semi = np.exp(rng.uniform(np.log(1e-6 * box.range), np.log(0.8 * box.range)))
            angles = rng.uniform(0.2, math.pi - 0.2, n * (n - 1) // 2)
            row.append(Ellipsoid(center, semi, angles))
        rows.append(tuple(row))
    return EllipsoidSet(tuple(rows))


def test_encode_decode_roundtrip():
    rng = np.random.default_rng(5)
    for _ in range(10):
        regions = _random_interior_set(rng)
        g = encode(regions, BOXES_2D)
        assert g.size == num_params([1, 2], 2)
        back = decode(g, [1, 2], 2, BOXES_2D)
        for row_a, row_b in zip(regions.regions, back.regions):
            for a, b in zip(row_a, row_b):
                npt.assert_allclose(b.center, a.center, rtol=0, atol=1e-12)
                npt.assert_allclose(b.semi_axes, a.semi_axes, rtol=1e-12)
                npt.assert_allclose(b.angles, a.angles, rtol=0, atol=1e-12)


def test_decode_at_zero_gene():
    # oracle: evaluate the stated squashing maps at gene 0 (logistic(0) = 1/2)
    box = BoundingBox(np.array([2.0]), np.array([6.0]))
    g = np.zeros(num_params([1], 1))
    e = decode(g, [1], 1, [box])[0][0]
    lo, hi = 2.0 - 0.1 * 4.0, 6.0 + 0.1 * 4.0
    npt.assert_allclose(e.center, [(lo + hi) / 2])  # box midpoint
    expected_axis = math.sqrt(MIN_AXIS_FRACTION * 4.0 * 4.0)  # geometric mean of [eps, range]
    npt.assert_allclose(e.semi_axes, [expected_axis], rtol=1e-12)

    box2 = BoundingBox(np.array([0.0, 0.0]), np.array([1.0, 1.0]))
    e2 = decode(np.zeros(num_params([2], 1)), [2], 1, [box2])[0][0]
    npt.assert_allclose(e2.angles, [math.pi / 2])


def test_decode_saturation_stays_in_bounds():
    box = BoundingBox(np.array([0.0, 0.0]), np.array([1.0, 2.0]))
    for scale in (5.0, 50.0, 5000.0):
        e = decode(np.full(num_params([2], 1), scale), [2], 1, [box])[0][0]
        assert np.all(e.center <= box.upper + 0.1 * box.range + 1e-12)
        assert np.all(e.semi_axes <= box.range + 1e-12)
        assert np.all((e.angles >= 0) & (e.angles < math.pi))
        e_neg = decode(np.full(num_params([2], 1), -scale), [2], 1, [box])[0][0]
        assert np.all(e_neg.center >= box.lower - 0.1 * box.range - 1e-12)
        assert np.all(e_neg.semi_axes >= MIN_AXIS_FRACTION * box.range * (1 - 1e-9))
        assert np.all(e_neg.angles >= 0)


def test_decode_random_genes_always_valid():
    rng = np.random.default_rng(13)
    box = BoundingBox(np.array([0.0, -1.0]), np.array([3.0, 1.0]))
    for _ in range(50):
        g = rng.standard_normal(num_params([2], 2)) * rng.uniform(0.1, 40)
        regions = decode(g, [2], 2, [box])
        for row in regions.regions:
            for e in row:
                assert np.all(e.semi_axes >= MIN_AXIS_FRACTION * box.range * (1 - 1e-9))
                assert np.all((e.angles >= 0) & (e.angles < math.pi))


def test_decode_length_mismatch():
    with pytest.raises(ValueError):
        decode(np.zeros(5), [1, 2], 1, BOXES_2D)


def test_ellipsoid_set_json_roundtrip():
    rng = np.random.default_rng(21)
    regions = _random_interior_set(rng)
    back = EllipsoidSet.from_json(regions.to_json_dict())
    for row_a, row_b in zip(regions.regions, back.regions):
        for a, b in zip(row_a, row_b):
            npt.assert_array_equal(a.center, b.center)
            npt.assert_array_equal(a.semi_axes, b.semi_axes)
            npt.assert_array_equal(a.angles, b.angles)
