"""Regenerate tests/fixtures/parity.json from the core package.

The fixture freezes batch IoU and loss/gradient outputs for 1,000 random
box rows so the TypeScript client tests can check parity against the
HTTP service without recomputing anything client-side.

Usage: python3 scripts/generate_fixture.py
"""

import json
import random
from pathlib import Path

from rotbox.batch import batch_iou, batch_loss_and_grad

SEED = 424242
N = 1000


def random_row(rng):
    return [
        round(rng.uniform(-20, 20), 6),
        round(rng.uniform(-20, 20), 6),
        round(rng.uniform(1, 30), 6),
        round(rng.uniform(1, 30), 6),
        round(rng.uniform(-90, -1e-6), 6),
    ]


def main():
    rng = random.Random(SEED)
    pred = [random_row(rng) for _ in range(N)]
    gt = [random_row(rng) for _ in range(N)]
    anchors = [random_row(rng) for _ in range(N)]

    iou = batch_iou(pred, gt)
    losses, grads = batch_loss_and_grad(pred, gt, anchors, kind="5p")

    fixture = {
        "seed": SEED,
        "pred": pred,
        "gt": gt,
        "anchors": anchors,
        "iou": iou.tolist(),
        "losses": losses.tolist(),
        "grads": grads.tolist(),
    }
    out = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "parity.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(fixture))
    print(f"wrote {out} ({N} rows)")


if __name__ == "__main__":
    main()
