"""Modulated rotation losses for five- and eight-parameter regression.

Both losses take a minimum over branch sums: the plain elementwise branch
and boundary-corrected branches (width/height swap plus quarter-turn angle
correction for five parameters, cyclic vertex shifts for eight), which
removes the loss discontinuity at the angular boundary.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .boxes import EncodedFiveParam, EncodedQuad, FiveParamBox, canonicalize
from .errors import AnchorMismatch, EmptyBatch

_ANCHOR_TOL = 1e-9


class PenaltyKind(enum.Enum):
    ABSOLUTE = "absolute"
    SMOOTH_L1 = "smooth_l1"


class Branch(enum.Enum):
    STRAIGHT = "straight"
    SWAPPED = "swapped"
    SHIFT_BACK = "shift_back"
    NO_SHIFT = "no_shift"
    SHIFT_FORWARD = "shift_forward"


class Reduction(enum.Enum):
    SUM = "sum"
    MEAN = "mean"


@dataclass(frozen=True)
class PenaltyConfig:
    kind: PenaltyKind = PenaltyKind.ABSOLUTE
    beta: float = 1.0 / 9.0  # smooth-l1 transition point

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be > 0")


ABSOLUTE = PenaltyConfig(PenaltyKind.ABSOLUTE)


@dataclass(frozen=True)
class LossValue:
    value: float
    branch: Branch


def penalty(d: float, cfg: PenaltyConfig = ABSOLUTE) -> float:
    if cfg.kind is PenaltyKind.ABSOLUTE:
        return abs(d)
    if abs(d) < cfg.beta:
        return 0.5 * d * d / cfg.beta
    return abs(d) - 0.5 * cfg.beta


def penalty_grad(d: float, cfg: PenaltyConfig = ABSOLUTE) -> float:
    """Subgradient of the penalty; 0 at the |.| kink."""
    if cfg.kind is PenaltyKind.ABSOLUTE:
        return math.copysign(1.0, d) if d != 0.0 else 0.0
    if abs(d) < cfg.beta:
        return d / cfg.beta
    return math.copysign(1.0, d)


def _check_anchor_5p(pred: EncodedFiveParam, gt: EncodedFiveParam) -> None:
    if abs(pred.anchor_ratio_r - gt.anchor_ratio_r) > _ANCHOR_TOL:
        raise AnchorMismatch(
            f"anchor ratios differ: {pred.anchor_ratio_r} vs {gt.anchor_ratio_r}")


def _branches_5p(pred: EncodedFiveParam, gt: EncodedFiveParam,
                 cfg: PenaltyConfig) -> Tuple[float, float]:
    log_r = math.log(pred.anchor_ratio_r)
    cp = penalty(pred.t_x - gt.t_x, cfg) + penalty(pred.t_y - gt.t_y, cfg)
    straight = (cp
                + penalty(pred.t_w - gt.t_w, cfg)
                + penalty(pred.t_h - gt.t_h, cfg)
                + penalty(pred.t_theta - gt.t_theta, cfg))
    swapped = (cp
               + penalty(pred.t_w - gt.t_h - log_r, cfg)
               + penalty(pred.t_h - gt.t_w + log_r, cfg)
               + penalty(abs(pred.t_theta - gt.t_theta) - math.pi / 2, cfg))
    return straight, swapped


def lmr_5p(pred: EncodedFiveParam, gt: EncodedFiveParam,
           cfg: PenaltyConfig = ABSOLUTE) -> LossValue:
    """Five-parameter modulated rotation loss on encoded targets."""
    _check_anchor_5p(pred, gt)
    straight, swapped = _branches_5p(pred, gt, cfg)
    if straight <= swapped:  # tie goes to the straight branch
        return LossValue(straight, Branch.STRAIGHT)
    return LossValue(swapped, Branch.SWAPPED)


def l1_5p(pred: EncodedFiveParam, gt: EncodedFiveParam,
          cfg: PenaltyConfig = ABSOLUTE) -> float:
    """Straight branch only: the unmodulated baseline."""
    _check_anchor_5p(pred, gt)
    return _branches_5p(pred, gt, cfg)[0]


def lmr_5p_unnormalized(pred: FiveParamBox, gt: FiveParamBox) -> LossValue:
    """Raw-coordinate modulated loss (degrees; the 90-constant form)."""
    pred = canonicalize(pred)
    gt = canonicalize(gt)
    cp = abs(pred.cx - gt.cx) + abs(pred.cy - gt.cy)
    straight = (cp + abs(pred.w - gt.w) + abs(pred.h - gt.h)
                + abs(pred.theta_deg - gt.theta_deg))
    swapped = (cp + abs(pred.w - gt.h) + abs(pred.h - gt.w)
               + abs(90.0 - abs(pred.theta_deg - gt.theta_deg)))
    if straight <= swapped:
        return LossValue(straight, Branch.STRAIGHT)
    return LossValue(swapped, Branch.SWAPPED)


def grad_lmr_5p(pred: EncodedFiveParam, gt: EncodedFiveParam,
                cfg: PenaltyConfig = ABSOLUTE) -> Tuple[float, float, float, float, float]:
    """Subgradient of the selected branch w.r.t. the predicted encoding."""
    _check_anchor_5p(pred, gt)
    straight, swapped = _branches_5p(pred, gt, cfg)
    gx = penalty_grad(pred.t_x - gt.t_x, cfg)
    gy = penalty_grad(pred.t_y - gt.t_y, cfg)
    if straight <= swapped:
        return (gx, gy,
                penalty_grad(pred.t_w - gt.t_w, cfg),
                penalty_grad(pred.t_h - gt.t_h, cfg),
                penalty_grad(pred.t_theta - gt.t_theta, cfg))
    log_r = math.log(pred.anchor_ratio_r)
    dtheta = pred.t_theta - gt.t_theta
    sign_dtheta = math.copysign(1.0, dtheta) if dtheta != 0.0 else 0.0
    return (gx, gy,
            penalty_grad(pred.t_w - gt.t_h - log_r, cfg),
            penalty_grad(pred.t_h - gt.t_w + log_r, cfg),
            penalty_grad(abs(dtheta) - math.pi / 2, cfg) * sign_dtheta)


# (branch, predicted-index shift) pairs for the eight-parameter loss:
# gt vertex i is compared against predicted vertex (i + shift) % 4.
_SHIFTS = ((Branch.NO_SHIFT, 0), (Branch.SHIFT_BACK, 3), (Branch.SHIFT_FORWARD, 1))


def _check_anchor_8p(pred: EncodedQuad, gt: EncodedQuad) -> None:
    if pred.anchor_size is None or gt.anchor_size is None:
        return
    if (abs(pred.anchor_size[0] - gt.anchor_size[0]) > _ANCHOR_TOL
            or abs(pred.anchor_size[1] - gt.anchor_size[1]) > _ANCHOR_TOL):
        raise AnchorMismatch(
            f"anchor sizes differ: {pred.anchor_size} vs {gt.anchor_size}")


def _branch_sum_8p(pred: EncodedQuad, gt: EncodedQuad, shift: int,
                   cfg: PenaltyConfig) -> float:
    total = 0.0
    for i in range(4):
        px, py = pred.offsets[(i + shift) % 4]
        gx, gy = gt.offsets[i]
        total += penalty(px - gx, cfg) + penalty(py - gy, cfg)
    return total


def lmr_8p(pred: EncodedQuad, gt: EncodedQuad,
           cfg: PenaltyConfig = ABSOLUTE) -> LossValue:
    """Eight-parameter modulated rotation loss: minimum over the identity
    pairing and the two one-step cyclic shifts of the predicted vertices."""
    _check_anchor_8p(pred, gt)
    best: LossValue | None = None
    for branch, shift in _SHIFTS:
        s = _branch_sum_8p(pred, gt, shift, cfg)
        if best is None or s < best.value:
            best = LossValue(s, branch)
    return best


def l1_8p(pred: EncodedQuad, gt: EncodedQuad,
          cfg: PenaltyConfig = ABSOLUTE) -> float:
    """Identity-pairing branch only: the unmodulated baseline."""
    _check_anchor_8p(pred, gt)
    return _branch_sum_8p(pred, gt, 0, cfg)


def grad_lmr_8p(pred: EncodedQuad, gt: EncodedQuad,
                cfg: PenaltyConfig = ABSOLUTE) -> Tuple[float, ...]:
    """Subgradient w.r.t. the flattened predicted offsets (dx0, dy0, ...)."""
    _check_anchor_8p(pred, gt)
    best_branch, best_shift, best_val = None, 0, None
    for branch, shift in _SHIFTS:
        s = _branch_sum_8p(pred, gt, shift, cfg)
        if best_val is None or s < best_val:
            best_branch, best_shift, best_val = branch, shift, s
    grad = [0.0] * 8
    for i in range(4):
        j = (i + best_shift) % 4
        px, py = pred.offsets[j]
        gx, gy = gt.offsets[i]
        grad[2 * j] = penalty_grad(px - gx, cfg)
        grad[2 * j + 1] = penalty_grad(py - gy, cfg)
    return tuple(grad)


def batch_loss(pairs: Sequence[Tuple], cfg: PenaltyConfig = ABSOLUTE,
               reduction: Reduction = Reduction.MEAN) -> float:
    """Reduce per-pair modulated losses; pairs may be five- or
    eight-parameter encodings (dispatched per pair)."""
    values: List[float] = []
    for pred, gt in pairs:
        if isinstance(pred, EncodedFiveParam):
            values.append(lmr_5p(pred, gt, cfg).value)
        else:
            values.append(lmr_8p(pred, gt, cfg).value)
    if reduction is Reduction.SUM:
        return sum(values)
    if not values:
        raise EmptyBatch("mean of an empty batch")
    return sum(values) / len(values)
