"""Request/response models for the HTTP service."""

from __future__ import annotations

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field


class PenaltyModel(BaseModel):
    kind: Literal["absolute", "smooth_l1"] = "absolute"
    beta: float = Field(default=1.0 / 9.0, gt=0)


class IouRequest(BaseModel):
    a: str  # "cx cy w h theta" or "x1 y1 ... x4 y4"
    b: str


class IouResponse(BaseModel):
    iou: float


class LossRequest(BaseModel):
    kind: Literal["lmr5p", "l1_5p", "lmr8p", "l1_8p", "lmr5p_unnormalized"]
    pred: str
    gt: str
    anchor: Optional[str] = None  # required for encoded kinds
    penalty: PenaltyModel = PenaltyModel()


class LossResponse(BaseModel):
    value: float
    branch: Optional[str] = None


class OrderRequest(BaseModel):
    points: str  # "x1 y1 x2 y2 x3 y3 x4 y4", any order


class OrderResponse(BaseModel):
    quad: str


class ConvertRequest(BaseModel):
    box: str
    to: Literal["quad", "five", "longside"]
    tolerance: float = Field(default=1e-6, gt=0)


class ConvertResponse(BaseModel):
    result: str


class NmsRequest(BaseModel):
    detections: List[str]  # "category score x1 y1 ... x4 y4" lines
    iou_threshold: float = Field(default=0.3, ge=0, le=1)


class NmsResponse(BaseModel):
    kept: List[str]


class GroundTruthFile(BaseModel):
    image_id: str
    content: str  # DOTA annotation text


class DetectionFile(BaseModel):
    category: str
    content: str  # lines "image_id score x1 y1 ... x4 y4"


class EvalRequest(BaseModel):
    ground_truth: List[GroundTruthFile]
    detections: List[DetectionFile]
    iou_threshold: float = Field(default=0.5, ge=0, le=1)


class EvalResponse(BaseModel):
    per_category: Dict[str, float]
    map: float
    csv: str


class SweepRequest(BaseModel):
    spec: dict  # sweep manifest, see rotbox.sweeps.spec_from_json
    penalty: PenaltyModel = PenaltyModel()


class SweepResponse(BaseModel):
    csv: str


class BatchIouRequest(BaseModel):
    a: List[List[float]]
    b: List[List[float]]


class BatchIouResponse(BaseModel):
    iou: List[float]


class BatchLossRequest(BaseModel):
    pred: List[List[float]]
    gt: List[List[float]]
    anchors: List[List[float]]
    kind: Literal["5p", "8p"] = "5p"
    penalty: PenaltyModel = PenaltyModel()


class BatchLossResponse(BaseModel):
    losses: List[float]
    grads: List[List[float]]


class VersionResponse(BaseModel):
    name: str
    version: str
