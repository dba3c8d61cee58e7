"""Rotated hyper-ellipsoid regions and their optimizer-space encoding.

One region per (concept, subspace) pair. An ``n``-dimensional ellipsoid
carries a center (n), semi-axes (n), and n(n-1)/2 plane-rotation angles,
giving n(n+3)/2 parameters. A point p is inside iff

    || diag(1/a) . R . (p - c) ||_2^2  <=  1

with R the composed rotation, a the semi-axes, and c the center. Boundary
points count as inside, so a degenerate region still contains its center.

The optimizer never sees these parameters directly: a flat genotype in
unconstrained space maps through logistic / log-logistic squashing onto
box-derived intervals (see :func:`decode`), which keeps every real vector
decodable and every decoded region valid.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logit

from .dataset import BoundingBox

# Minimum semi-axis, as a fraction of the per-dimension data range.
MIN_AXIS_FRACTION = 1e-9
# Decoded centers may sit this fraction of the range outside the data box.
CENTER_MARGIN = 0.1


def num_params(subspace_dims, n_concepts: int) -> int:
    """Total genotype length: n_concepts * sum_k n_k (n_k + 3) / 2."""
    dims = [int(n) for n in subspace_dims]
    if any(n < 1 for n in dims) or n_concepts < 1:
        raise ValueError("subspace dims and concept count must be >= 1")
    return n_concepts * sum(n * (n + 3) // 2 for n in dims)


def _rotation_planes(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def rotation_matrix(angles, n: int) -> np.ndarray:
    """Compose plane (Givens) rotations in lexicographic plane order.

    Planes are visited (0,1), (0,2), ..., (n-2,n-1); each contributes one
    counter-clockwise rotation, multiplied onto the left. The result is
    orthonormal with determinant +1.
    """
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    if n == 1 and angles.size == 0:
        return np.eye(1)
    planes = _rotation_planes(n)
    if angles.shape != (len(planes),):
        raise ValueError(f"need {len(planes)} angles for n={n}, got {angles.size}")
    r = np.eye(n)
    for (i, j), theta in zip(planes, angles):
        c, s = math.cos(theta), math.sin(theta)
        g = np.eye(n)
        g[i, i] = c
        g[i, j] = -s
        g[j, i] = s
        g[j, j] = c
        r = g @ r
    return r


@dataclass(frozen=True)
class Ellipsoid:
    center: np.ndarray
    semi_axes: np.ndarray
    angles: np.ndarray

    def __post_init__(self):
        center = np.atleast_1d(np.asarray(self.center, dtype=float))
        semi_axes = np.atleast_1d(np.asarray(self.semi_axes, dtype=float))
        angles = np.asarray(self.angles, dtype=float).reshape(-1)
        n = center.size
        if semi_axes.shape != (n,):
            raise ValueError(f"semi_axes shape {semi_axes.shape} does not match dim {n}")
        if np.any(semi_axes <= 0):
            raise ValueError("semi-axes must be strictly positive")
        if angles.size != n * (n - 1) // 2:
            raise ValueError(f"need {n * (n - 1) // 2} angles for dim {n}, got {angles.size}")
        if angles.size and (np.any(angles < 0) or np.any(angles >= math.pi)):
            raise ValueError("angles must lie in [0, pi)")
        for arr in (center, semi_axes, angles):
            arr.setflags(write=False)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "semi_axes", semi_axes)
        object.__setattr__(self, "angles", angles)

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def n_params(self) -> int:
        return self.dim * (self.dim + 3) // 2

    def rotation(self) -> np.ndarray:
        return rotation_matrix(self.angles, self.dim)


def membership_mask(e: Ellipsoid, points: np.ndarray) -> np.ndarray:
    """Boolean inclusion test for each row of ``points`` (boundary inclusive)."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != e.dim:
        raise ValueError(f"points must be (m, {e.dim}), got {points.shape}")
    if points.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    y = (points - e.center) @ e.rotation().T
    z = y / e.semi_axes
    return np.einsum("ij,ij->i", z, z) <= 1.0


def contains(e: Ellipsoid, point) -> bool:
    """Scalar form of :func:`membership_mask`."""
    point = np.atleast_1d(np.asarray(point, dtype=float))
    return bool(membership_mask(e, point[None, :])[0])


@dataclass(frozen=True)
class EllipsoidSet:
    """n_concepts x n_subspaces grid of regions; row alpha is one concept."""

    regions: tuple[tuple[Ellipsoid, ...], ...]

    def __post_init__(self):
        regions = tuple(tuple(row) for row in self.regions)
        if not regions or not regions[0]:
            raise ValueError("EllipsoidSet needs at least one concept and one subspace")
        dims = tuple(e.dim for e in regions[0])
        for row in regions:
            if len(row) != len(dims):
                raise ValueError("ragged region grid")
            if tuple(e.dim for e in row) != dims:
                raise ValueError("inconsistent subspace dimensions across concepts")
        object.__setattr__(self, "regions", regions)

    @property
    def n_concepts(self) -> int:
        return len(self.regions)

    @property
    def n_subspaces(self) -> int:
        return len(self.regions[0])

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(e.dim for e in self.regions[0])

    @property
    def n_params(self) -> int:
        return num_params(self.dims, self.n_concepts)

    def __getitem__(self, idx):
        return self.regions[idx]

    def to_json_dict(self) -> dict:
        return {
            "concepts": [
                [
                    {
                        "center": [float(v) for v in e.center],
                        "semi_axes": [float(v) for v in e.semi_axes],
                        "angles": [float(v) for v in e.angles],
                    }
                    for e in row
                ]
                for row in self.regions
            ]
        }

    @classmethod
    def from_json(cls, doc) -> "EllipsoidSet":
        if isinstance(doc, (str, bytes)):
            doc = json.loads(doc)
        rows = []
        for row in doc["concepts"]:
            rows.append(tuple(Ellipsoid(e["center"], e["semi_axes"], e["angles"]) for e in row))
        return cls(tuple(rows))


def _intervals(box: BoundingBox):
    """Squashing target intervals for one subspace.

    Centers map onto the box widened by CENTER_MARGIN on each side, semi-axes
    onto [MIN_AXIS_FRACTION * range, range] in log space, angles onto [0, pi).
    Degenerate (zero-range) dimensions fall back to a unit scale so the log
    interval stays well defined.
    """
    rng = box.range
    scale = np.where(rng > 0, rng, 1.0)
    center_lo = box.lower - CENTER_MARGIN * rng
    center_hi = box.upper + CENTER_MARGIN * rng
    axis_log_lo = np.log(MIN_AXIS_FRACTION * scale)
    axis_log_hi = np.log(scale)
    return center_lo, center_hi, axis_log_lo, axis_log_hi


def decode(genotype, subspace_dims, n_concepts: int, boxes) -> EllipsoidSet:
    """Map a flat unconstrained vector to a valid EllipsoidSet.

    Layout: concepts outermost, subspaces within a concept, and per region
    [center genes, semi-axis genes, angle genes]. Each gene passes through a
    logistic onto its interval; semi-axes interpolate in log space, so gene 0
    decodes to the geometric mean of the axis interval.
    """
    genotype = np.asarray(genotype, dtype=float).reshape(-1)
    dims = [int(n) for n in subspace_dims]
    expected = num_params(dims, n_concepts)
    if genotype.size != expected:
        raise ValueError(f"genotype length {genotype.size}, expected {expected}")
    if len(boxes) != len(dims):
        raise ValueError(f"{len(boxes)} bounding boxes for {len(dims)} subspaces")

    pos = 0
    concepts = []
    for _ in range(n_concepts):
        row = []
        for n, box in zip(dims, boxes):
            c_lo, c_hi, a_lo, a_hi = _intervals(box)
            n_ang = n * (n - 1) // 2
            g_center = genotype[pos:pos + n]
            g_axis = genotype[pos + n:pos + 2 * n]
            g_angle = genotype[pos + 2 * n:pos + 2 * n + n_ang]
            pos += 2 * n + n_ang
            center = c_lo + expit(g_center) * (c_hi - c_lo)
            semi = np.exp(a_lo + expit(g_axis) * (a_hi - a_lo))
            angles = math.pi * expit(g_angle)
            # expit saturates to 1.0 for large genes; keep angles inside [0, pi)
            angles = np.minimum(angles, np.nextafter(math.pi, 0.0))
            row.append(Ellipsoid(center, semi, angles))
        concepts.append(tuple(row))
    return EllipsoidSet(tuple(concepts))


def encode(regions: EllipsoidSet, boxes) -> np.ndarray:
    """Inverse of :func:`decode` for regions strictly inside the squashing intervals."""
    if len(boxes) != regions.n_subspaces:
        raise ValueError(f"{len(boxes)} bounding boxes for {regions.n_subspaces} subspaces")

    def _unsquash(value, lo, hi, what):
        u = (np.asarray(value, dtype=float) - lo) / (hi - lo)
        if np.any(u <= 0) or np.any(u >= 1):
            raise ValueError(f"{what} not strictly inside its decode interval; cannot encode")
        return logit(u)

    genes = []
    for row in regions.regions:
        for e, box in zip(row, boxes):
            c_lo, c_hi, a_lo, a_hi = _intervals(box)
            genes.append(_unsquash(e.center, c_lo, c_hi, "center"))
            genes.append(_unsquash(np.log(e.semi_axes), a_lo, a_hi, "semi-axis"))
            if e.angles.size:
                genes.append(_unsquash(e.angles, 0.0, math.pi, "angle"))
    return np.concatenate(genes) if genes else np.zeros(0)
