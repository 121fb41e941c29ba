"""Rotated-detection evaluation: DOTA annotation parsing, greedy IoU
matching, all-point-interpolated AP, and mAP."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .boxes import QuadBox, order_vertices
from .errors import DegenerateQuad, EmptyInput, MalformedLine, NoGroundTruth
from .geometry import Detection, rotated_iou


@dataclass(frozen=True)
class GroundTruthRecord:
    quad: QuadBox
    category: str
    difficult: bool = False


@dataclass(frozen=True)
class PRCurve:
    recalls: Tuple[float, ...]
    precisions: Tuple[float, ...]
    ap: float


class MatchFlag(enum.Enum):
    TP = "tp"
    FP = "fp"
    IGNORED = "ignored"  # matched a difficult ground truth


def parse_dota_annotations(text: str) -> List[GroundTruthRecord]:
    """Parse DOTA v1.0 per-image annotation text.

    Lines are "x1 y1 x2 y2 x3 y3 x4 y4 category difficult"; lines whose
    first token is not numeric (metadata headers) are skipped.
    """
    records: List[GroundTruthRecord] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts:
            continue
        try:
            float(parts[0])
        except ValueError:
            continue  # metadata header, e.g. "imagesource:GoogleEarth"
        if len(parts) != 10:
            raise MalformedLine(line_no, f"expected 10 fields, got {len(parts)}")
        try:
            coords = [float(p) for p in parts[:8]]
        except ValueError as exc:
            raise MalformedLine(line_no, str(exc)) from None
        try:
            quad = order_vertices(list(zip(coords[0::2], coords[1::2])))
        except DegenerateQuad as exc:
            raise MalformedLine(line_no, f"degenerate quad: {exc}") from None
        difficult = parts[9] not in ("0", "false", "False")
        records.append(GroundTruthRecord(quad=quad, category=parts[8],
                                         difficult=difficult))
    return records


def match_detections(dets: Sequence[Detection],
                     gts: Sequence[GroundTruthRecord],
                     iou_threshold: float = 0.5) -> List[MatchFlag]:
    """Greedy VOC-style matching for a single category.

    Detections are processed by descending score; each is a TP iff its
    best-IoU unmatched non-difficult ground truth clears the threshold
    (that GT is then consumed). Detections whose only qualifying match is
    a difficult GT are ignored.
    """
    order = sorted(range(len(dets)), key=lambda i: (-dets[i].score, i))
    flags: List[MatchFlag] = [MatchFlag.FP] * len(dets)
    used = [False] * len(gts)
    for i in order:
        det = dets[i]
        best_iou, best_j = 0.0, -1
        for j, gt in enumerate(gts):
            if gt.difficult or used[j]:
                continue
            iou = rotated_iou(det.box, gt.quad)
            if iou > best_iou:
                best_iou, best_j = iou, j
        if best_j >= 0 and best_iou >= iou_threshold:
            used[best_j] = True
            flags[i] = MatchFlag.TP
            continue
        difficult_iou = max(
            (rotated_iou(det.box, gt.quad) for gt in gts if gt.difficult),
            default=0.0,
        )
        flags[i] = MatchFlag.IGNORED if difficult_iou >= iou_threshold else MatchFlag.FP
    return flags


def average_precision(flags: Sequence[MatchFlag | bool], num_gt: int) -> PRCurve:
    """All-point interpolated AP (area under the precision envelope).

    ``flags`` must be ordered by descending score; IGNORED entries are
    dropped. ``num_gt`` counts non-difficult ground truths.
    """
    if num_gt < 1:
        raise NoGroundTruth("num_gt must be >= 1")
    is_tp = [f is True or f is MatchFlag.TP
             for f in flags if f is not MatchFlag.IGNORED]
    recalls: List[float] = []
    precisions: List[float] = []
    tp = 0
    for k, hit in enumerate(is_tp, start=1):
        tp += int(hit)
        recalls.append(tp / num_gt)
        precisions.append(tp / k)
    # precision envelope: max precision at recall >= r
    env = precisions[:]
    for k in range(len(env) - 2, -1, -1):
        env[k] = max(env[k], env[k + 1])
    ap = 0.0
    prev_r = 0.0
    for r, p in zip(recalls, env):
        ap += (r - prev_r) * p
        prev_r = r
    return PRCurve(tuple(recalls), tuple(precisions), ap)


def mean_ap(per_category: Dict[str, PRCurve]) -> float:
    if not per_category:
        raise EmptyInput("no categories")
    return sum(c.ap for c in per_category.values()) / len(per_category)


def evaluate(gt_by_image: Dict[str, Sequence[GroundTruthRecord]],
             dets_by_category: Dict[str, Sequence[Tuple[str, Detection]]],
             iou_threshold: float = 0.5) -> Dict[str, PRCurve]:
    """Full evaluation over a dataset.

    ``dets_by_category`` maps category -> list of (image_id, detection).
    Categories present in the ground truth but with no detections get an
    all-FP (empty) curve; detection-only categories are skipped (no AP is
    defined without ground truth).
    """
    gt_categories = {
        r.category
        for records in gt_by_image.values()
        for r in records
        if not r.difficult
    }
    curves: Dict[str, PRCurve] = {}
    for category in sorted(gt_categories):
        num_gt = sum(
            1 for records in gt_by_image.values()
            for r in records if r.category == category and not r.difficult
        )
        dets = list(dets_by_category.get(category, []))
        dets.sort(key=lambda pair: -pair[1].score)
        flags: List[MatchFlag] = []
        # per-image greedy matching, merged in global score order
        used: Dict[str, List[bool]] = {}
        gts_for_img: Dict[str, List[GroundTruthRecord]] = {
            img: [r for r in records if r.category == category]
            for img, records in gt_by_image.items()
        }
        for image_id, det in dets:
            gts = gts_for_img.get(image_id, [])
            taken = used.setdefault(image_id, [False] * len(gts))
            best_iou, best_j = 0.0, -1
            for j, gt in enumerate(gts):
                if gt.difficult or taken[j]:
                    continue
                iou = rotated_iou(det.box, gt.quad)
                if iou > best_iou:
                    best_iou, best_j = iou, j
            if best_j >= 0 and best_iou >= iou_threshold:
                taken[best_j] = True
                flags.append(MatchFlag.TP)
                continue
            difficult_iou = max(
                (rotated_iou(det.box, gt.quad) for gt in gts if gt.difficult),
                default=0.0,
            )
            flags.append(MatchFlag.IGNORED if difficult_iou >= iou_threshold
                         else MatchFlag.FP)
        if num_gt == 0:
            continue
        curves[category] = average_precision(flags, num_gt)
    return curves


def report_csv(curves: Dict[str, PRCurve]) -> str:
    """CSV report: one "category,ap" row per category plus a final mAP row."""
    lines = ["category,ap"]
    for category in sorted(curves):
        lines.append(f"{category},{curves[category].ap:.6g}")
    lines.append(f"mAP,{mean_ap(curves):.6g}")
    return "\n".join(lines) + "\n"
