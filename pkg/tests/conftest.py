"""Shared generators and independent oracles."""

import itertools
import math
import random

import numpy as np
import pytest

from rotbox.boxes import FiveParamBox, canonicalize_five_param, cross, shoelace_sum


def random_canonical_box(rng: random.Random,
                         center_range=(-50.0, 50.0),
                         size_range=(0.5, 40.0)) -> FiveParamBox:
    return canonicalize_five_param(
        rng.uniform(*center_range),
        rng.uniform(*center_range),
        rng.uniform(*size_range),
        rng.uniform(*size_range),
        rng.uniform(-720.0, 720.0),
    )


def random_convex_quad(rng: random.Random, scale=10.0):
    """Four points on a random ellipse at well-separated angles: always in
    convex position, never collinear."""
    while True:
        angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(4))
        gaps = [angles[(i + 1) % 4] - angles[i] for i in range(3)]
        gaps.append(2 * math.pi - (angles[3] - angles[0]))
        if min(gaps) < 0.3:
            continue
        cx, cy = rng.uniform(-scale, scale), rng.uniform(-scale, scale)
        rx, ry = rng.uniform(1, scale), rng.uniform(1, scale)
        tilt = rng.uniform(0, math.pi)
        ct, st = math.cos(tilt), math.sin(tilt)
        pts = []
        for a in angles:
            ex, ey = rx * math.cos(a), ry * math.sin(a)
            pts.append((cx + ex * ct - ey * st, cy + ex * st + ey * ct))
        rng.shuffle(pts)
        return pts


def brute_force_order(points):
    """Enumerate all 24 permutations; return the unique convex clockwise
    cycle (shoelace positive under y-down) starting at the leftmost vertex
    (ties by smallest y)."""
    leftmost = min(points, key=lambda p: (p[0], p[1]))
    matches = []
    for perm in itertools.permutations(points):
        if perm[0] != leftmost:
            continue
        crosses = []
        for i in range(4):
            a, b, c = perm[i], perm[(i + 1) % 4], perm[(i + 2) % 4]
            crosses.append(cross((b[0] - a[0], b[1] - a[1]),
                                 (c[0] - b[0], c[1] - b[1])))
        if all(cr > 0 for cr in crosses) and shoelace_sum(perm) > 0:
            matches.append(perm)
    assert len(matches) == 1, f"expected a unique clockwise cycle, got {matches}"
    return matches[0]


def _inside_mask(pts_x, pts_y, quad):
    """Vectorized point-in-convex-quad for clockwise (y-down) corners."""
    mask = np.ones_like(pts_x, dtype=bool)
    for i in range(4):
        ax, ay = quad[i]
        bx, by = quad[(i + 1) % 4]
        crossv = (bx - ax) * (pts_y - ay) - (by - ay) * (pts_x - ax)
        mask &= crossv >= 0
    return mask


def monte_carlo_iou(quad_a, quad_b, n_samples: int, rng: np.random.Generator) -> float:
    """Rasterization-style IoU estimate over the joint bounding box."""
    xs = [p[0] for p in quad_a] + [p[0] for p in quad_b]
    ys = [p[1] for p in quad_a] + [p[1] for p in quad_b]
    px = rng.uniform(min(xs), max(xs), n_samples)
    py = rng.uniform(min(ys), max(ys), n_samples)
    in_a = _inside_mask(px, py, quad_a)
    in_b = _inside_mask(px, py, quad_b)
    either = np.count_nonzero(in_a | in_b)
    if either == 0:
        return 0.0
    return np.count_nonzero(in_a & in_b) / either


def min_area_rect_oracle(points):
    """Brute force over edge-aligned candidate rectangles: for each pair of
    points defining a direction, the extents of all points in that rotated
    frame give a candidate; return the minimal (area, w, h)."""
    best = None
    pts = np.asarray(points, dtype=float)
    for i in range(len(points)):
        for j in range(len(points)):
            if i == j:
                continue
            d = pts[j] - pts[i]
            norm = math.hypot(*d)
            if norm == 0:
                continue
            c, s = d[0] / norm, d[1] / norm
            us = pts[:, 0] * c + pts[:, 1] * s
            vs = -pts[:, 0] * s + pts[:, 1] * c
            w = us.max() - us.min()
            h = vs.max() - vs.min()
            area = w * h
            if best is None or area < best[0]:
                best = (area, w, h)
    return best


@pytest.fixture
def rng():
    return random.Random(20260823)


@pytest.fixture
def nprng():
    return np.random.default_rng(20260823)
