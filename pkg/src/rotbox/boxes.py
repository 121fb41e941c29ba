"""Rotated-box representations and conversions.

Two parameterizations are supported:

* five-parameter ``(cx, cy, w, h, theta_deg)`` in the OpenCV convention,
  angle restricted to ``[-90, 0)`` after canonicalization, with the width
  side pointing along ``(cos theta, sin theta)`` in image coordinates
  (x right, y down);
* eight-parameter quadrilateral: four corner points stored clockwise on
  screen, starting at the leftmost vertex.

All types are immutable values and every function is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

from .errors import DegenerateQuad, NonFinite, NonPositiveSize

Point = Tuple[float, float]

# |cross| below this fraction of the squared point-cloud extent counts as
# collinear.
_DEGENERACY_REL = 1e-9

# Default relative corner-angle deviation under which a quad is treated as
# an exact rectangle.
RECTANGLE_TOLERANCE = 1e-6


@dataclass(frozen=True)
class FiveParamBox:
    """Rotated rectangle (cx, cy, w, h, theta in degrees)."""

    cx: float
    cy: float
    w: float
    h: float
    theta_deg: float

    def __post_init__(self):
        for v in (self.cx, self.cy, self.w, self.h, self.theta_deg):
            if not math.isfinite(v):
                raise NonFinite(f"non-finite box field: {v!r}")
        if self.w <= 0 or self.h <= 0:
            raise NonPositiveSize(f"w={self.w}, h={self.h} must be > 0")

    @property
    def is_canonical(self) -> bool:
        return -90.0 <= self.theta_deg < 0.0

    def area(self) -> float:
        return self.w * self.h


@dataclass(frozen=True)
class QuadBox:
    """Four corners, clockwise on screen, first corner leftmost."""

    corners: Tuple[Point, Point, Point, Point]

    def __post_init__(self):
        if len(self.corners) != 4:
            raise DegenerateQuad("exactly 4 corners required")
        for x, y in self.corners:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise NonFinite("non-finite corner coordinate")


@dataclass(frozen=True)
class EncodedFiveParam:
    """Anchor-relative five-parameter regression targets (angle in radians)."""

    t_x: float
    t_y: float
    t_w: float
    t_h: float
    t_theta: float
    anchor_ratio_r: float  # h_a / w_a

    def as_tuple(self) -> Tuple[float, float, float, float, float]:
        return (self.t_x, self.t_y, self.t_w, self.t_h, self.t_theta)


@dataclass(frozen=True)
class EncodedQuad:
    """Anchor-normalized corner offsets (dx_i, dy_i), i = 0..3.

    ``anchor_size`` keeps (w_a, h_a) so loss code can reject encodings
    produced from different anchors.
    """

    offsets: Tuple[Point, Point, Point, Point]
    anchor_size: Tuple[float, float] | None = None

    def __post_init__(self):
        if len(self.offsets) != 4:
            raise DegenerateQuad("exactly 4 offset pairs required")
        for dx, dy in self.offsets:
            if not (math.isfinite(dx) and math.isfinite(dy)):
                raise NonFinite("non-finite offset")


def cross(u: Point, v: Point) -> float:
    """2D cross product u.x*v.y - u.y*v.x."""
    return u[0] * v[1] - u[1] * v[0]


def canonicalize_five_param(cx: float, cy: float, w: float, h: float,
                            theta_deg: float) -> FiveParamBox:
    """Wrap an unrestricted angle into [-90, 0), swapping w/h per 90-degree
    step so the rectangle's corner set is preserved exactly."""
    for v in (cx, cy, w, h, theta_deg):
        if not math.isfinite(v):
            raise NonFinite(f"non-finite input: {v!r}")
    if w <= 0 or h <= 0:
        raise NonPositiveSize(f"w={w}, h={h} must be > 0")
    canon = (theta_deg % 90.0) - 90.0  # in [-90, 0)
    k = round((theta_deg - canon) / 90.0)
    if k % 2:
        w, h = h, w
    return FiveParamBox(cx, cy, w, h, canon)


def canonicalize(box: FiveParamBox) -> FiveParamBox:
    if box.is_canonical:
        return box
    return canonicalize_five_param(box.cx, box.cy, box.w, box.h, box.theta_deg)


def _axes(theta_deg: float) -> Tuple[Point, Point]:
    rad = math.radians(theta_deg)
    c, s = math.cos(rad), math.sin(rad)
    # snap residue at exact right angles so axis-aligned boxes get exact
    # corners (cos(-90 deg) evaluates to ~6e-17, not 0)
    if abs(c) < 1e-15:
        c = 0.0
        s = math.copysign(1.0, s)
    if abs(s) < 1e-15:
        s = 0.0
        c = math.copysign(1.0, c)
    return (c, s), (-s, c)  # w axis, h axis


def five_to_quad(box: FiveParamBox) -> QuadBox:
    """Corner points of a five-parameter box, ordered clockwise from the
    leftmost vertex."""
    box = canonicalize(box)
    (ux, uy), (vx, vy) = _axes(box.theta_deg)
    hw, hh = box.w / 2.0, box.h / 2.0
    pts = [
        (box.cx + sx * hw * ux + sy * hh * vx,
         box.cy + sx * hw * uy + sy * hh * vy)
        for sx, sy in ((-1, -1), (1, -1), (1, 1), (-1, 1))
    ]
    return order_vertices(pts)


def order_vertices(points: Sequence[Point]) -> QuadBox:
    """Order 4 convex-position points clockwise on screen starting at the
    leftmost vertex (ties broken by smallest y).

    Cross-product driven: the diagonal partner of the start vertex is the
    point whose direction separates the other two; those two are then
    placed by the sign of their cross product against the diagonal.
    """
    if len(points) != 4:
        raise DegenerateQuad("exactly 4 points required")
    pts = [(float(x), float(y)) for x, y in points]
    for x, y in pts:
        if not (math.isfinite(x) and math.isfinite(y)):
            raise NonFinite("non-finite point")

    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    extent = max(max(xs) - min(xs), max(ys) - min(ys))
    if extent == 0.0:
        raise DegenerateQuad("all points coincide")
    eps = _DEGENERACY_REL * extent * extent

    for i in range(4):
        for j in range(i + 1, 4):
            if pts[i] == pts[j]:
                raise DegenerateQuad("two corners coincide")

    p1 = min(pts, key=lambda p: (p[0], p[1]))
    rest = [p for p in pts if p != p1]

    diag = None
    flank = None
    for k in range(3):
        s1 = rest[k]
        s2, s3 = [rest[m] for m in range(3) if m != k]
        u = (s1[0] - p1[0], s1[1] - p1[1])
        c2 = cross(u, (s2[0] - p1[0], s2[1] - p1[1]))
        c3 = cross(u, (s3[0] - p1[0], s3[1] - p1[1]))
        if abs(c2) <= eps or abs(c3) <= eps:
            raise DegenerateQuad("three points are collinear")
        if c2 * c3 < 0:
            diag, flank = s1, (s2, s3)
            break
    if diag is None:
        raise DegenerateQuad("points are not in convex position")

    s2, s3 = flank
    d = (diag[0] - p1[0], diag[1] - p1[1])
    # y-down screen coords: negative cross against the diagonal means the
    # point comes first in clockwise order.
    if cross(d, (s2[0] - p1[0], s2[1] - p1[1])) < 0:
        p2, p4 = s2, s3
    else:
        p2, p4 = s3, s2

    quad = QuadBox((p1, p2, diag, p4))
    _check_convex_clockwise(quad, eps)
    return quad


def _check_convex_clockwise(quad: QuadBox, eps: float) -> None:
    c = quad.corners
    for i in range(4):
        a, b, d = c[i], c[(i + 1) % 4], c[(i + 2) % 4]
        cr = cross((b[0] - a[0], b[1] - a[1]), (d[0] - b[0], d[1] - b[1]))
        if cr <= eps:
            raise DegenerateQuad("points are not strictly convex clockwise")


def shoelace_sum(corners: Sequence[Point]) -> float:
    n = len(corners)
    total = 0.0
    for i in range(n):
        x1, y1 = corners[i]
        x2, y2 = corners[(i + 1) % n]
        total += x1 * y2 - x2 * y1
    return total


def quad_to_five(quad: QuadBox, tolerance: float = RECTANGLE_TOLERANCE) -> FiveParamBox:
    """Five-parameter box equivalent to ``quad``.

    Exact (within ``tolerance`` of relative corner-angle deviation)
    rectangles convert losslessly; anything else gets its minimum-area
    enclosing rectangle.
    """
    c = quad.corners
    edges = [(c[(i + 1) % 4][0] - c[i][0], c[(i + 1) % 4][1] - c[i][1])
             for i in range(4)]
    lens = [math.hypot(*e) for e in edges]
    if min(lens) == 0.0:
        raise DegenerateQuad("zero-length edge")

    is_rect = all(
        abs(edges[i][0] * edges[(i + 1) % 4][0] + edges[i][1] * edges[(i + 1) % 4][1])
        <= tolerance * lens[i] * lens[(i + 1) % 4]
        for i in range(4)
    )
    if is_rect:
        cx = sum(p[0] for p in c) / 4.0
        cy = sum(p[1] for p in c) / 4.0
        theta = math.degrees(math.atan2(edges[0][1], edges[0][0]))
        return canonicalize_five_param(cx, cy, lens[0], lens[1], theta)
    return min_area_enclosing_rect(c)


def min_area_enclosing_rect(points: Sequence[Point]) -> FiveParamBox:
    """Minimum-area enclosing rectangle of convex-position points.

    Caliper sweep over hull-edge directions: the optimal rectangle has one
    side collinear with a hull edge, so each edge angle is a candidate.
    """
    pts = [(float(x), float(y)) for x, y in points]
    hull = _convex_hull(pts)
    if len(hull) < 3:
        raise DegenerateQuad("points are collinear")
    best = None
    n = len(hull)
    for i in range(n):
        ax, ay = hull[i]
        bx, by = hull[(i + 1) % n]
        ang = math.atan2(by - ay, bx - ax)
        cth, sth = math.cos(ang), math.sin(ang)
        us = [px * cth + py * sth for px, py in hull]
        vs = [-px * sth + py * cth for px, py in hull]
        w = max(us) - min(us)
        h = max(vs) - min(vs)
        if w <= 0 or h <= 0:
            continue
        area = w * h
        if best is None or area < best[0]:
            cu = (max(us) + min(us)) / 2.0
            cv = (max(vs) + min(vs)) / 2.0
            cx = cu * cth - cv * sth
            cy = cu * sth + cv * cth
            best = (area, cx, cy, w, h, math.degrees(ang))
    if best is None:
        raise DegenerateQuad("degenerate point set")
    _, cx, cy, w, h, theta = best
    return canonicalize_five_param(cx, cy, w, h, theta)


def _convex_hull(pts: Sequence[Point]) -> list[Point]:
    """Monotone-chain hull; clockwise on screen (y down)."""
    pts = sorted(set(pts))
    if len(pts) <= 2:
        return list(pts)

    def half(seq):
        out: list[Point] = []
        for p in seq:
            while len(out) >= 2 and cross(
                (out[-1][0] - out[-2][0], out[-1][1] - out[-2][1]),
                (p[0] - out[-1][0], p[1] - out[-1][1]),
            ) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    return lower[:-1] + upper[:-1]


def encode_five(box: FiveParamBox, anchor: FiveParamBox) -> EncodedFiveParam:
    """Anchor-relative targets: centers scaled by anchor size, sizes as log
    ratios, angle converted to radians."""
    box = canonicalize(box)
    anchor = canonicalize(anchor)
    return EncodedFiveParam(
        t_x=(box.cx - anchor.cx) / anchor.w,
        t_y=(box.cy - anchor.cy) / anchor.h,
        t_w=math.log(box.w / anchor.w),
        t_h=math.log(box.h / anchor.h),
        t_theta=math.radians(box.theta_deg),
        anchor_ratio_r=anchor.h / anchor.w,
    )


def decode_five(enc: EncodedFiveParam, anchor: FiveParamBox) -> FiveParamBox:
    anchor = canonicalize(anchor)
    w = anchor.w * math.exp(enc.t_w)
    h = anchor.h * math.exp(enc.t_h)
    if not (math.isfinite(w) and math.isfinite(h)):
        raise NonFinite("size overflow while decoding")
    return canonicalize_five_param(
        anchor.cx + enc.t_x * anchor.w,
        anchor.cy + enc.t_y * anchor.h,
        w,
        h,
        math.degrees(enc.t_theta),
    )


def encode_quad(quad: QuadBox, anchor: FiveParamBox) -> EncodedQuad:
    anchor = canonicalize(anchor)
    ref = five_to_quad(anchor).corners
    offs = tuple(
        ((qx - rx) / anchor.w, (qy - ry) / anchor.h)
        for (qx, qy), (rx, ry) in zip(quad.corners, ref)
    )
    return EncodedQuad(offsets=offs, anchor_size=(anchor.w, anchor.h))


def decode_quad(enc: EncodedQuad, anchor: FiveParamBox) -> QuadBox:
    anchor = canonicalize(anchor)
    ref = five_to_quad(anchor).corners
    pts = [
        (rx + dx * anchor.w, ry + dy * anchor.h)
        for (dx, dy), (rx, ry) in zip(enc.offsets, ref)
    ]
    return order_vertices(pts)


def to_long_side_convention(box: FiveParamBox) -> Tuple[float, float, float, float, float]:
    """(cx, cy, long, short, theta) with theta in [-180, 0) measured from
    the rectangle's long side to the x-axis; squares keep the input angle."""
    box = canonicalize(box)
    if box.w >= box.h:
        long_side, short_side = box.w, box.h
        theta = box.theta_deg
    else:
        long_side, short_side = box.h, box.w
        theta = box.theta_deg + 90.0
    theta = (theta % 180.0) - 180.0  # into [-180, 0)
    return (box.cx, box.cy, long_side, short_side, theta)


def parse_five_param(text: str) -> FiveParamBox:
    """Parse "cx cy w h theta_deg" (canonicalizing the angle)."""
    parts = text.split()
    if len(parts) != 5:
        raise ValueError(f"expected 5 numbers, got {len(parts)}: {text!r}")
    cx, cy, w, h, theta = (float(p) for p in parts)
    return canonicalize_five_param(cx, cy, w, h, theta)


def parse_quad(text: str) -> QuadBox:
    """Parse "x1 y1 x2 y2 x3 y3 x4 y4" (re-ordering the corners)."""
    parts = text.split()
    if len(parts) != 8:
        raise ValueError(f"expected 8 numbers, got {len(parts)}: {text!r}")
    vals = [float(p) for p in parts]
    return order_vertices(list(zip(vals[0::2], vals[1::2])))


def format_five_param(box: FiveParamBox) -> str:
    return " ".join(f"{v:.6g}" for v in (box.cx, box.cy, box.w, box.h, box.theta_deg))


def format_quad(quad: QuadBox) -> str:
    return " ".join(f"{v:.6g}" for p in quad.corners for v in p)
