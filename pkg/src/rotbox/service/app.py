"""FastAPI service wrapping the core package.

Data errors (degenerate geometry, malformed files, shape mismatches)
surface as HTTP 400 with a message; validation errors from pydantic are
the usual 422.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..batch import batch_iou, batch_loss_and_grad
from ..boxes import (
    canonicalize_five_param,
    five_to_quad,
    format_five_param,
    format_quad,
    parse_five_param,
    parse_quad,
    quad_to_five,
    encode_five,
    encode_quad,
    order_vertices,
    to_long_side_convention,
)
from ..errors import RotBoxError
from ..evaluation import evaluate, parse_dota_annotations, report_csv
from ..geometry import (
    Detection,
    format_detection,
    parse_detection_line,
    rotated_iou,
    rotated_nms,
)
from ..losses import (
    PenaltyConfig,
    PenaltyKind,
    l1_5p,
    l1_8p,
    lmr_5p,
    lmr_5p_unnormalized,
    lmr_8p,
)
from ..sweeps import spec_from_json, sweep_to_csv
from . import schemas

app = FastAPI(title="rotbox", version=__version__)


@app.exception_handler(RotBoxError)
async def _rotbox_error(request: Request, exc: RotBoxError):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(ValueError)
async def _value_error(request: Request, exc: ValueError):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


def _penalty_cfg(m: schemas.PenaltyModel) -> PenaltyConfig:
    return PenaltyConfig(kind=PenaltyKind(m.kind), beta=m.beta)


def _parse_box(text: str):
    n = len(text.split())
    if n == 5:
        return parse_five_param(text)
    if n == 8:
        return parse_quad(text)
    raise ValueError(f"expected 5 or 8 numbers, got {n}: {text!r}")


@app.get("/health")
async def health():
    return {"status": "ok"}


@app.get("/version", response_model=schemas.VersionResponse)
async def version():
    return schemas.VersionResponse(name="rotbox", version=__version__)


@app.post("/iou", response_model=schemas.IouResponse)
async def iou(req: schemas.IouRequest):
    return schemas.IouResponse(iou=rotated_iou(_parse_box(req.a), _parse_box(req.b)))


@app.post("/loss", response_model=schemas.LossResponse)
async def loss(req: schemas.LossRequest):
    cfg = _penalty_cfg(req.penalty)
    if req.kind == "lmr5p_unnormalized":
        lv = lmr_5p_unnormalized(parse_five_param(req.pred), parse_five_param(req.gt))
        return schemas.LossResponse(value=lv.value, branch=lv.branch.value)
    if req.anchor is None:
        raise ValueError(f"loss kind {req.kind!r} requires an anchor box")
    anchor = parse_five_param(req.anchor)
    if req.kind in ("lmr5p", "l1_5p"):
        pe = encode_five(parse_five_param(req.pred), anchor)
        ge = encode_five(parse_five_param(req.gt), anchor)
        if req.kind == "lmr5p":
            lv = lmr_5p(pe, ge, cfg)
            return schemas.LossResponse(value=lv.value, branch=lv.branch.value)
        return schemas.LossResponse(value=l1_5p(pe, ge, cfg), branch="straight")
    pe = encode_quad(parse_quad(req.pred), anchor)
    ge = encode_quad(parse_quad(req.gt), anchor)
    if req.kind == "lmr8p":
        lv = lmr_8p(pe, ge, cfg)
        return schemas.LossResponse(value=lv.value, branch=lv.branch.value)
    return schemas.LossResponse(value=l1_8p(pe, ge, cfg), branch="no_shift")


@app.post("/order", response_model=schemas.OrderResponse)
async def order(req: schemas.OrderRequest):
    return schemas.OrderResponse(quad=format_quad(parse_quad(req.points)))


@app.post("/convert", response_model=schemas.ConvertResponse)
async def convert(req: schemas.ConvertRequest):
    n = len(req.box.split())
    if req.to == "quad":
        box = parse_five_param(req.box) if n == 5 else quad_to_five(parse_quad(req.box))
        return schemas.ConvertResponse(result=format_quad(five_to_quad(box)))
    if req.to == "five":
        if n == 5:
            return schemas.ConvertResponse(result=format_five_param(parse_five_param(req.box)))
        return schemas.ConvertResponse(
            result=format_five_param(quad_to_five(parse_quad(req.box), req.tolerance)))
    box = parse_five_param(req.box) if n == 5 else quad_to_five(parse_quad(req.box))
    vals = to_long_side_convention(box)
    return schemas.ConvertResponse(result=" ".join(f"{v:.6g}" for v in vals))


@app.post("/nms", response_model=schemas.NmsResponse)
async def nms(req: schemas.NmsRequest):
    dets = [parse_detection_line(line) for line in req.detections if line.strip()]
    kept = rotated_nms(dets, req.iou_threshold)
    return schemas.NmsResponse(kept=[format_detection(d) for d in kept])


@app.post("/eval", response_model=schemas.EvalResponse)
async def run_eval(req: schemas.EvalRequest):
    gt_by_image = {
        f.image_id: parse_dota_annotations(f.content) for f in req.ground_truth
    }
    dets_by_category = {}
    for f in req.detections:
        rows = []
        for line in f.content.splitlines():
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 10:
                raise ValueError(
                    f"detection line needs 10 fields, got {len(parts)}: {line!r}")
            vals = [float(p) for p in parts[2:]]
            quad = order_vertices(list(zip(vals[0::2], vals[1::2])))
            rows.append((parts[0], Detection(box=quad, score=float(parts[1]),
                                             category=f.category)))
        dets_by_category[f.category] = rows
    curves = evaluate(gt_by_image, dets_by_category, req.iou_threshold)
    from ..evaluation import mean_ap

    return schemas.EvalResponse(
        per_category={c: curve.ap for c, curve in curves.items()},
        map=mean_ap(curves),
        csv=report_csv(curves),
    )


@app.post("/sweep", response_model=schemas.SweepResponse)
async def sweep(req: schemas.SweepRequest):
    spec = spec_from_json(json.dumps(req.spec))
    return schemas.SweepResponse(csv=sweep_to_csv(spec, _penalty_cfg(req.penalty)))


@app.post("/batch/iou", response_model=schemas.BatchIouResponse)
async def batch_iou_endpoint(req: schemas.BatchIouRequest):
    if not req.a and not req.b:
        return schemas.BatchIouResponse(iou=[])
    return schemas.BatchIouResponse(iou=batch_iou(req.a, req.b).tolist())


@app.post("/batch/loss-and-grad", response_model=schemas.BatchLossResponse)
async def batch_loss_endpoint(req: schemas.BatchLossRequest):
    if not req.pred and not req.gt and not req.anchors:
        return schemas.BatchLossResponse(losses=[], grads=[])
    losses, grads = batch_loss_and_grad(
        req.pred, req.gt, req.anchors, kind=req.kind, cfg=_penalty_cfg(req.penalty))
    return schemas.BatchLossResponse(losses=losses.tolist(), grads=grads.tolist())
