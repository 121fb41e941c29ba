"""Thin command-line client for the rotbox service.

Every subcommand talks to the HTTP API: by default to an in-process
instance of the app, or to a running server given ``--server URL``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

import click
import httpx


class DataError(Exception):
    """Bad input data (exit code 2)."""


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=300.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _post(ctx: click.Context, path: str, payload: dict) -> dict:
    client = _client(ctx.obj.get("server"))
    try:
        resp = client.post(path, json=payload)
    except httpx.HTTPError as exc:
        raise DataError(f"cannot reach server: {exc}") from None
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        raise DataError(str(detail))
    return resp.json()


def _fmt(x: float) -> str:
    s = f"{x:.6g}"
    if "." not in s and "e" not in s and "inf" not in s and "nan" not in s:
        s += ".0"
    return s


@click.group()
@click.option("--server", default=None, metavar="URL",
              help="Base URL of a running rotbox service (default: in-process).")
@click.option("--seed", default=None, type=int,
              help="Seed for any randomized client-side checks.")
@click.pass_context
def cli(ctx, server, seed):
    ctx.ensure_object(dict)
    ctx.obj["server"] = server
    if seed is not None:
        random.seed(seed)


@cli.command()
@click.pass_context
def version(ctx):
    """Print service name and version."""
    client = _client(ctx.obj.get("server"))
    data = client.get("/version").json()
    click.echo(f"{data['name']} {data['version']}")


@cli.command()
@click.option("--a", "box_a", required=True, help='Box "cx cy w h theta" or 8 corner coords.')
@click.option("--b", "box_b", required=True)
@click.pass_context
def iou(ctx, box_a, box_b):
    """Exact rotated IoU of two boxes."""
    data = _post(ctx, "/iou", {"a": box_a, "b": box_b})
    click.echo(_fmt(data["iou"]))


@cli.command()
@click.option("--kind", required=True,
              type=click.Choice(["lmr5p", "l1_5p", "lmr8p", "l1_8p", "lmr5p_unnormalized"]))
@click.option("--pred", required=True)
@click.option("--gt", required=True)
@click.option("--anchor", default=None, help="Anchor box (encoded kinds only).")
@click.option("--penalty", default="absolute",
              type=click.Choice(["absolute", "smooth_l1"]))
@click.option("--beta", default=1.0 / 9.0, show_default=True)
@click.pass_context
def loss(ctx, kind, pred, gt, anchor, penalty, beta):
    """Regression loss between a predicted and a ground-truth box."""
    data = _post(ctx, "/loss", {
        "kind": kind, "pred": pred, "gt": gt, "anchor": anchor,
        "penalty": {"kind": penalty, "beta": beta},
    })
    branch = data.get("branch")
    click.echo(f"{_fmt(data['value'])} {branch}" if branch else _fmt(data["value"]))


@cli.command()
@click.option("--points", required=True, help="8 numbers: x1 y1 ... x4 y4 in any order.")
@click.pass_context
def order(ctx, points):
    """Order four corners clockwise from the leftmost vertex."""
    data = _post(ctx, "/order", {"points": points})
    click.echo(data["quad"])


@cli.command()
@click.option("--box", required=True)
@click.option("--to", "target", required=True,
              type=click.Choice(["quad", "five", "longside"]))
@click.option("--tolerance", default=1e-6, show_default=True)
@click.pass_context
def convert(ctx, box, target, tolerance):
    """Convert between box parameterizations."""
    data = _post(ctx, "/convert", {"box": box, "to": target, "tolerance": tolerance})
    click.echo(data["result"])


@cli.command()
@click.option("--dets", required=True, type=click.Path(exists=True, path_type=Path),
              help='File of lines "category score x1 y1 ... x4 y4".')
@click.option("--iou-threshold", default=0.3, show_default=True)
@click.option("--out", default=None, type=click.Path(path_type=Path))
@click.pass_context
def nms(ctx, dets, iou_threshold, out):
    """Rotated non-maximum suppression over a detection file."""
    lines = dets.read_text().splitlines()
    data = _post(ctx, "/nms", {"detections": lines, "iou_threshold": iou_threshold})
    text = "\n".join(data["kept"]) + ("\n" if data["kept"] else "")
    if out:
        out.write_text(text)
    else:
        click.echo(text, nl=False)


@cli.command("eval")
@click.option("--gt-dir", required=True, type=click.Path(exists=True, path_type=Path),
              help="Directory of per-image DOTA annotation files.")
@click.option("--det-dir", required=True, type=click.Path(exists=True, path_type=Path),
              help='Directory of per-category files "image_id score x1 ... y4".')
@click.option("--iou-threshold", default=0.5, show_default=True)
@click.option("--out", default=None, type=click.Path(path_type=Path))
@click.pass_context
def eval_cmd(ctx, gt_dir, det_dir, iou_threshold, out):
    """Evaluate detections against ground truth; emits a category,ap CSV."""
    gt_files = sorted(gt_dir.glob("*.txt"))
    det_files = sorted(det_dir.glob("*.txt"))
    if not gt_files:
        raise DataError(f"no .txt annotation files in {gt_dir}")
    payload = {
        "ground_truth": [
            {"image_id": f.stem, "content": f.read_text()} for f in gt_files
        ],
        "detections": [
            {"category": f.stem.removeprefix("Task1_"), "content": f.read_text()}
            for f in det_files
        ],
        "iou_threshold": iou_threshold,
    }
    data = _post(ctx, "/eval", payload)
    if out:
        out.write_text(data["csv"])
    else:
        click.echo(data["csv"], nl=False)


@cli.command()
@click.option("--spec", "spec_path", required=True,
              type=click.Path(exists=True, path_type=Path),
              help="JSON sweep manifest (see README for the schema).")
@click.option("--out", default=None, type=click.Path(path_type=Path))
@click.option("--penalty", default="absolute",
              type=click.Choice(["absolute", "smooth_l1"]))
@click.option("--beta", default=1.0 / 9.0, show_default=True)
@click.pass_context
def sweep(ctx, spec_path, out, penalty, beta):
    """Run a parameter sweep and write the resulting CSV curve."""
    try:
        spec = json.loads(spec_path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid sweep spec: {exc}") from None
    data = _post(ctx, "/sweep", {
        "spec": spec, "penalty": {"kind": penalty, "beta": beta},
    })
    if out:
        out.write_text(data["csv"])
    else:
        click.echo(data["csv"], nl=False)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False, obj={})
        return 0
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
