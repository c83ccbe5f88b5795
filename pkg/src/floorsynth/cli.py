"""Command line interface: corpus tooling, generation, evaluation, serving."""

from __future__ import annotations

import json
import os
import sys

import click
import numpy as np

from . import pipeline, vectorize
from .corpus import import_raster_floorplan, load_corpus, save_corpus
from .evaluate import evaluate_corpus
from .geometry import Boundary
from .retrieval import Constraints, rank_with_distances, filter as filter_records
from .solver import SolverConfig
from .synth import generate_synthetic_corpus

CORPUS_ENV = "FLOORSYNTH_CORPUS"


def _corpus_path(value: str | None) -> str:
    path = value or os.environ.get(CORPUS_ENV)
    if not path:
        raise click.UsageError(
            f"no corpus given; pass --corpus or set {CORPUS_ENV}"
        )
    return path


def _load_boundary(path: str) -> Boundary:
    with open(path) as fh:
        return Boundary.from_dict(json.load(fh))


@click.group()
def main():
    """Floorplan synthesis toolkit."""


@main.command()
@click.option("--count", "-n", default=100, show_default=True, help="records to generate")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "-o", required=True, type=click.Path(dir_okay=False))
def synth(count, seed, out):
    """Generate a synthetic corpus of rectilinear floorplans."""
    records = generate_synthetic_corpus(count, seed=seed)
    save_corpus(records, out)
    click.echo(f"wrote {len(records)} records to {out}")


@main.command()
@click.argument("images", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "-o", required=True, type=click.Path(dir_okay=False))
@click.option("--no-regularize", is_flag=True, help="keep raw ground-truth boxes")
def ingest(images, out, no_regularize):
    """Import 4-channel raster floorplans (.npy, shape HxWx4) into a corpus."""
    records = []
    for path in images:
        image = np.load(path)
        record_id = os.path.splitext(os.path.basename(path))[0]
        try:
            records.append(
                import_raster_floorplan(image, record_id, regularize=not no_regularize)
            )
        except Exception as exc:
            click.echo(f"skipping {path}: {exc}", err=True)
    if not records:
        raise click.ClickException("no records imported")
    save_corpus(records, out)
    click.echo(f"wrote {len(records)} records to {out}")


@main.command()
@click.option("--corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("--boundary", "boundary_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--constraints", "constraints_path", type=click.Path(exists=True, dir_okay=False))
@click.option("-k", default=10, show_default=True)
def retrieve(corpus, boundary_path, constraints_path, k):
    """Rank corpus records against a target boundary."""
    records = load_corpus(_corpus_path(corpus))
    target = _load_boundary(boundary_path)
    constraints = Constraints()
    if constraints_path:
        with open(constraints_path) as fh:
            constraints = Constraints.from_dict(json.load(fh))
    ranked = rank_with_distances(filter_records(records, constraints), target)[:k]
    for rec, dist in ranked:
        click.echo(f"{rec.id}\t{dist:.6f}\t{len(rec.graph.nodes)} rooms")


@main.command()
@click.option("--corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("--boundary", "boundary_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--constraints", "constraints_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "-o", required=True, type=click.Path(dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["json", "svg"]), default="json", show_default=True)
@click.option("--max-iters", default=300, show_default=True)
@click.option("--seed", default=0, show_default=True)
def generate(corpus, boundary_path, constraints_path, out, fmt, max_iters, seed):
    """Synthesize a floorplan for a boundary from the best template."""
    records = load_corpus(_corpus_path(corpus))
    target = _load_boundary(boundary_path)
    constraints = Constraints()
    if constraints_path:
        with open(constraints_path) as fh:
            constraints = Constraints.from_dict(json.load(fh))
    cfg = SolverConfig(max_iters=max_iters, seed=seed)
    try:
        result = pipeline.generate_from_corpus(records, target, constraints, cfg)
    except LookupError as exc:
        raise click.ClickException(str(exc))
    with open(out, "w") as fh:
        fh.write(vectorize.export(result.floorplan, fmt))
    loss = result.final_loss
    click.echo(
        f"wrote {out}: {len(result.floorplan.rooms)} rooms, "
        f"final loss {loss.total:.4f} "
        f"(solve {result.timings['solve']:.2f}s)"
    )


@main.command("eval")
@click.option("--corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("--holdout", default=0.15, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--max-iters", default=300, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="print the full report as JSON")
def eval_cmd(corpus, holdout, seed, max_iters, as_json):
    """Evaluate reconstruction quality over a corpus holdout split."""
    records = load_corpus(_corpus_path(corpus))
    report = evaluate_corpus(
        records, holdout_fraction=holdout, seed=seed, cfg=SolverConfig(max_iters=max_iters)
    )
    if as_json:
        click.echo(json.dumps(report, indent=2))
        return
    for key in ("self_reconstruction", "cross_reconstruction"):
        r = report[key]
        click.echo(
            f"{key}: n={r['n_records']} iou_boxes={r['mean_iou_boxes']:.3f} "
            f"iou_regions={r['mean_iou_regions']:.3f} coverage={r['mean_coverage']:.4f} "
            f"overlap_px={r['total_overlap_pixels']} time={r['mean_time_s']:.3f}s"
        )


@main.command()
@click.option("--corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8421, show_default=True)
def serve(corpus, host, port):
    """Run the HTTP synthesis service."""
    import uvicorn

    from .service import create_app

    app = create_app(corpus_path=_corpus_path(corpus))
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
