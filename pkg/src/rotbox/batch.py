"""Array-batch entry points for external training loops.

Rows are raw boxes: n x 5 ``(cx, cy, w, h, theta_deg)`` or n x 8 corner
coordinates. Encoding against the per-row anchor happens internally;
results are bit-identical to the scalar core functions.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np

from .boxes import (
    canonicalize_five_param,
    encode_five,
    encode_quad,
    order_vertices,
)
from .errors import ShapeMismatch
from .geometry import rotated_iou
from .losses import ABSOLUTE, PenaltyConfig, grad_lmr_5p, grad_lmr_8p, lmr_5p, lmr_8p


def _rows(arr, name: str, width: Tuple[int, ...]) -> np.ndarray:
    a = np.asarray(arr, dtype=np.float64)
    if a.size == 0:
        return a.reshape(0, width[0])
    if a.ndim != 2 or a.shape[1] not in width:
        raise ShapeMismatch(f"{name}: expected (n, {width}) array, got {a.shape}")
    if a.size and not np.all(np.isfinite(a)):
        raise ShapeMismatch(f"{name}: non-finite entries")
    return a


def _row_box(row: np.ndarray):
    if row.shape[0] == 5:
        return canonicalize_five_param(*row.tolist())
    pts = row.reshape(4, 2)
    return order_vertices([tuple(p) for p in pts.tolist()])


def batch_iou(a, b) -> np.ndarray:
    """Rowwise rotated IoU of two equally sized batches."""
    a = _rows(a, "a", (5, 8))
    b = _rows(b, "b", (5, 8))
    if a.shape[0] != b.shape[0]:
        raise ShapeMismatch(f"row counts differ: {a.shape[0]} vs {b.shape[0]}")
    return np.array(
        [rotated_iou(_row_box(ra), _row_box(rb)) for ra, rb in zip(a, b)],
        dtype=np.float64,
    )


def batch_loss_and_grad(pred, gt, anchors, kind: str = "5p",
                        cfg: PenaltyConfig = ABSOLUTE,
                        ) -> Tuple[np.ndarray, np.ndarray]:
    """Rowwise modulated rotation loss and its subgradient.

    ``kind`` selects the parameterization: "5p" (n x 5 boxes, gradient
    w.r.t. the encoded five-vector) or "8p" (n x 8 corner rows, gradient
    w.r.t. the encoded offsets).
    """
    if kind not in ("5p", "8p"):
        raise ValueError(f"kind must be '5p' or '8p', got {kind!r}")
    k = 5 if kind == "5p" else 8
    pred = _rows(pred, "pred", (k,))
    gt = _rows(gt, "gt", (k,))
    anchors = _rows(anchors, "anchors", (5,))
    n = pred.shape[0]
    if gt.shape[0] != n or anchors.shape[0] != n:
        raise ShapeMismatch("pred, gt and anchors must have equal row counts")
    losses = np.empty(n, dtype=np.float64)
    grads = np.empty((n, k), dtype=np.float64)
    for i in range(n):
        anchor = canonicalize_five_param(*anchors[i].tolist())
        if kind == "5p":
            pe = encode_five(_row_box(pred[i]), anchor)
            ge = encode_five(_row_box(gt[i]), anchor)
            losses[i] = lmr_5p(pe, ge, cfg).value
            grads[i] = grad_lmr_5p(pe, ge, cfg)
        else:
            pe = encode_quad(_row_box(pred[i]), anchor)
            ge = encode_quad(_row_box(gt[i]), anchor)
            losses[i] = lmr_8p(pe, ge, cfg).value
            grads[i] = grad_lmr_8p(pe, ge, cfg)
    return losses, grads
