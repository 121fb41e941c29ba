"""Parameter sweeps reproducing the loss-discontinuity and
IoU-vs-parameter analyses as CSV-friendly curves."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

from .boxes import (
    FiveParamBox,
    canonicalize,
    canonicalize_five_param,
    encode_five,
    encode_quad,
    five_to_quad,
)
from .geometry import rotated_iou
from .losses import ABSOLUTE, PenaltyConfig, l1_5p, l1_8p, lmr_5p, lmr_8p


class VariedParameter(enum.Enum):
    ANGLE = "angle"
    WIDTH = "width"
    HEIGHT = "height"
    CX = "cx"
    CY = "cy"


class LossKind(enum.Enum):
    L1_5P = "l1_5p"
    LMR_5P = "lmr_5p"
    L1_8P = "l1_8p"
    LMR_8P = "lmr_8p"
    IOU = "iou"


@dataclass(frozen=True)
class SweepSpec:
    varied_parameter: VariedParameter
    lo: float
    hi: float
    step: float
    base_box: FiveParamBox
    loss_kind: LossKind = LossKind.IOU
    aspect_ratios: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be > 0")
        if self.lo >= self.hi:
            raise ValueError("range lo must be < hi")

    def samples(self) -> List[float]:
        n = int(round((self.hi - self.lo) / self.step))
        return [self.lo + i * self.step for i in range(n + 1)]


@dataclass(frozen=True)
class CurveSample:
    x: float
    y: float


def _varied_copy(base: FiveParamBox, param: VariedParameter, x: float) -> FiveParamBox:
    if param is VariedParameter.ANGLE:
        return canonicalize_five_param(base.cx, base.cy, base.w, base.h, x)
    if param is VariedParameter.WIDTH:
        return replace(base, w=x)
    if param is VariedParameter.HEIGHT:
        return replace(base, h=x)
    if param is VariedParameter.CX:
        return replace(base, cx=x)
    return replace(base, cy=x)


def sweep_iou(spec: SweepSpec) -> List[CurveSample]:
    """IoU between the base box and a copy with one parameter varied."""
    base = canonicalize(spec.base_box)
    out = []
    for x in spec.samples():
        varied = _varied_copy(base, spec.varied_parameter, x)
        out.append(CurveSample(x, rotated_iou(base, varied)))
    return out


def sweep_boundary_loss(spec: SweepSpec,
                        cfg: PenaltyConfig = ABSOLUTE,
                        ) -> Tuple[List[CurveSample], List[CurveSample]]:
    """Angle sweep of the regression loss against the fixed base box.

    Returns (baseline, modulated) curves: the unmodulated elementwise loss
    jumps where the canonical angle wraps, the modulated one does not. The
    base box doubles as the ground truth and the anchor.
    """
    if spec.varied_parameter is not VariedParameter.ANGLE:
        raise ValueError("boundary sweep varies the angle")
    eight = spec.loss_kind in (LossKind.L1_8P, LossKind.LMR_8P)
    anchor = canonicalize(spec.base_box)
    gt5 = encode_five(anchor, anchor)
    gt8 = encode_quad(five_to_quad(anchor), anchor) if eight else None
    baseline: List[CurveSample] = []
    modulated: List[CurveSample] = []
    for x in spec.samples():
        pred = _varied_copy(anchor, VariedParameter.ANGLE, x)
        if eight:
            enc = encode_quad(five_to_quad(pred), anchor)
            baseline.append(CurveSample(x, l1_8p(enc, gt8, cfg)))
            modulated.append(CurveSample(x, lmr_8p(enc, gt8, cfg).value))
        else:
            enc = encode_five(pred, anchor)
            baseline.append(CurveSample(x, l1_5p(enc, gt5, cfg)))
            modulated.append(CurveSample(x, lmr_5p(enc, gt5, cfg).value))
    return baseline, modulated


def max_adjacent_gap(curve: Sequence[CurveSample]) -> float:
    return max(
        (abs(curve[i + 1].y - curve[i].y) for i in range(len(curve) - 1)),
        default=0.0,
    )


def spec_from_json(text: str) -> SweepSpec:
    """Parse the documented JSON sweep manifest.

    Schema::

        {
          "varied_parameter": "angle" | "width" | "height" | "cx" | "cy",
          "range": [lo, hi],
          "step": number,
          "base_box": "cx cy w h theta_deg" | [cx, cy, w, h, theta_deg],
          "loss_kind": "iou" | "l1_5p" | "lmr_5p" | "l1_8p" | "lmr_8p",
          "aspect_ratios": [number, ...]   // optional, angle sweeps
        }
    """
    data = json.loads(text)
    missing = [k for k in ("varied_parameter", "range", "step", "base_box")
               if k not in data]
    if missing:
        raise ValueError(f"sweep manifest missing fields: {', '.join(missing)}")
    raw_box = data["base_box"]
    if isinstance(raw_box, str):
        vals = [float(v) for v in raw_box.split()]
    else:
        vals = [float(v) for v in raw_box]
    if len(vals) != 5:
        raise ValueError("base_box needs 5 numbers")
    base = canonicalize_five_param(*vals)
    ratios = data.get("aspect_ratios")
    return SweepSpec(
        varied_parameter=VariedParameter(data["varied_parameter"]),
        lo=float(data["range"][0]),
        hi=float(data["range"][1]),
        step=float(data["step"]),
        base_box=base,
        loss_kind=LossKind(data.get("loss_kind", "iou")),
        aspect_ratios=tuple(float(r) for r in ratios) if ratios else None,
    )


def with_aspect_ratio(base: FiveParamBox, ratio: float) -> FiveParamBox:
    """Copy of ``base`` with w/h = ratio, keeping the width."""
    if ratio <= 0:
        raise ValueError("aspect ratio must be > 0")
    return canonicalize_five_param(base.cx, base.cy, base.w, base.w / ratio,
                                   base.theta_deg)


def sweep_to_csv(spec: SweepSpec, cfg: PenaltyConfig = ABSOLUTE) -> str:
    """Run a sweep and render CSV with a one-line header.

    IoU sweeps emit "x,y" (one extra y column per aspect ratio when
    given); loss sweeps emit "x,y_baseline,y_modulated".
    """
    if spec.loss_kind is LossKind.IOU:
        if spec.aspect_ratios and spec.varied_parameter is VariedParameter.ANGLE:
            curves = [
                sweep_iou(replace(spec, base_box=with_aspect_ratio(spec.base_box, r)))
                for r in spec.aspect_ratios
            ]
            header = "x," + ",".join(f"y_ar{r:g}" for r in spec.aspect_ratios)
            rows = [
                f"{curves[0][i].x:.6g}," + ",".join(f"{c[i].y:.6g}" for c in curves)
                for i in range(len(curves[0]))
            ]
        else:
            curve = sweep_iou(spec)
            header = "x,y"
            rows = [f"{s.x:.6g},{s.y:.6g}" for s in curve]
    else:
        baseline, modulated = sweep_boundary_loss(spec, cfg)
        header = "x,y_baseline,y_modulated"
        rows = [
            f"{b.x:.6g},{b.y:.6g},{m.y:.6g}"
            for b, m in zip(baseline, modulated)
        ]
    return header + "\n" + "\n".join(rows) + "\n"


def parse_curve_csv(text: str) -> Tuple[List[str], List[List[float]]]:
    """Re-parse CSV emitted by :func:`sweep_to_csv` (round-trip contract)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty CSV")
    header = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        vals = [float(v) for v in ln.split(",")]
        if len(vals) != len(header):
            raise ValueError("row width does not match header")
        rows.append(vals)
    return header, rows
