"""Rotated bounding-box geometry, modulated rotation losses, exact rotated
IoU/NMS, and detection mAP evaluation."""

__version__ = "0.1.0"

from .boxes import (
    EncodedFiveParam,
    EncodedQuad,
    FiveParamBox,
    QuadBox,
    canonicalize_five_param,
    decode_five,
    decode_quad,
    encode_five,
    encode_quad,
    five_to_quad,
    order_vertices,
    quad_to_five,
    to_long_side_convention,
)
from .errors import (
    AnchorMismatch,
    DegenerateQuad,
    EmptyBatch,
    EmptyInput,
    MalformedLine,
    NoGroundTruth,
    NonFinite,
    NonPositiveSize,
    RotBoxError,
    ShapeMismatch,
)
from .geometry import Detection, polygon_area, polygon_clip, rotated_iou, rotated_nms
from .losses import (
    Branch,
    LossValue,
    PenaltyConfig,
    PenaltyKind,
    Reduction,
    batch_loss,
    grad_lmr_5p,
    grad_lmr_8p,
    l1_5p,
    l1_8p,
    lmr_5p,
    lmr_5p_unnormalized,
    lmr_8p,
    penalty,
)
from .evaluation import (
    GroundTruthRecord,
    MatchFlag,
    PRCurve,
    average_precision,
    match_detections,
    mean_ap,
    parse_dota_annotations,
)
