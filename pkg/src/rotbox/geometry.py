"""Exact rotated IoU via convex polygon clipping, plus rotated NMS."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Union

from .boxes import FiveParamBox, Point, QuadBox, five_to_quad, shoelace_sum
from .errors import NonFinite

BoxLike = Union[FiveParamBox, QuadBox]

# Points within this distance of a clip edge count as inside; avoids
# sliver polygons from touching boundaries.
_EDGE_EPS = 1e-9


@dataclass(frozen=True)
class Detection:
    """Scored, categorized box for NMS and evaluation."""

    box: BoxLike
    score: float
    category: str

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise NonFinite(f"non-finite score {self.score!r}")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [0, 1]")


def _as_polygon(box: BoxLike) -> List[Point]:
    if isinstance(box, FiveParamBox):
        return list(five_to_quad(box).corners)
    return list(box.corners)


def polygon_clip(subject: Sequence[Point], clip: Sequence[Point]) -> List[Point]:
    """Sutherland-Hodgman clip of one convex polygon by another.

    Both polygons must be convex with clockwise-on-screen winding.
    Returns the (possibly empty) intersection polygon.
    """
    output = list(subject)
    n = len(clip)
    for i in range(n):
        if not output:
            break
        ax, ay = clip[i]
        bx, by = clip[(i + 1) % n]
        ex, ey = bx - ax, by - ay
        elen = math.hypot(ex, ey)
        if elen == 0.0:
            continue
        input_pts = output
        output = []
        # signed distance to the clip edge; >= -eps counts as inside
        dists = [(ex * (py - ay) - ey * (px - ax)) / elen for px, py in input_pts]
        m = len(input_pts)
        for j in range(m):
            cur, nxt = input_pts[j], input_pts[(j + 1) % m]
            dc, dn = dists[j], dists[(j + 1) % m]
            cur_in = dc >= -_EDGE_EPS
            nxt_in = dn >= -_EDGE_EPS
            if cur_in:
                output.append(cur)
            if cur_in != nxt_in:
                t = dc / (dc - dn)
                output.append((cur[0] + t * (nxt[0] - cur[0]),
                               cur[1] + t * (nxt[1] - cur[1])))
    return output


def polygon_area(vertices: Sequence[Point]) -> float:
    if len(vertices) < 3:
        return 0.0
    return abs(shoelace_sum(vertices)) / 2.0


def rotated_iou(a: BoxLike, b: BoxLike) -> float:
    """Exact intersection-over-union of two rotated boxes."""
    pa = _as_polygon(a)
    pb = _as_polygon(b)
    # clip in a deterministic argument order so iou(a,b) == iou(b,a) exactly
    if pb < pa:
        pa, pb = pb, pa
    inter = polygon_area(polygon_clip(pa, pb))
    if inter <= 0.0:
        return 0.0
    union = polygon_area(pa) + polygon_area(pb) - inter
    if union <= 0.0:
        return 0.0
    return min(inter / union, 1.0)


def rotated_nms(dets: Sequence[Detection], iou_threshold: float) -> List[Detection]:
    """Greedy per-category NMS with rotated IoU.

    Sorted by descending score (stable on ties); a detection is kept iff
    its IoU with every already-kept detection of the same category is at
    most ``iou_threshold``. Output is in descending-score order.
    """
    order = sorted(range(len(dets)), key=lambda i: (-dets[i].score, i))
    kept: List[Detection] = []
    kept_polys: List[tuple[str, List[Point]]] = []
    for i in order:
        det = dets[i]
        poly = _as_polygon(det.box)
        area = polygon_area(poly)
        suppressed = False
        for cat, kp in kept_polys:
            if cat != det.category:
                continue
            inter = polygon_area(polygon_clip(poly, kp))
            union = area + polygon_area(kp) - inter
            iou = inter / union if union > 0 else 0.0
            if iou > iou_threshold:
                suppressed = True
                break
        if not suppressed:
            kept.append(det)
            kept_polys.append((det.category, poly))
    return kept


def parse_detection_line(line: str) -> Detection:
    """Parse "category score x1 y1 x2 y2 x3 y3 x4 y4"."""
    parts = line.split()
    if len(parts) != 10:
        raise ValueError(f"expected 10 fields, got {len(parts)}: {line!r}")
    from .boxes import order_vertices

    vals = [float(p) for p in parts[2:]]
    quad = order_vertices(list(zip(vals[0::2], vals[1::2])))
    return Detection(box=quad, score=float(parts[1]), category=parts[0])


def format_detection(det: Detection) -> str:
    poly = _as_polygon(det.box)
    coords = " ".join(f"{v:.6g}" for p in poly for v in p)
    return f"{det.category} {det.score:.6g} {coords}"
