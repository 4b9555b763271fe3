"""Command line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal invariant
violation or unexpected failure. Machine output is JSON written to --out;
human summaries go to stdout.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .classifier import Knowledgebase, classify as classify_fm, train as train_kb
from .corpus import ingest
from .errors import DataError, InvariantViolation
from .evaluation import (
    TrialPlan,
    confusion_csv,
    extract_corpus_features,
    report_to_json,
    run_evaluation,
    summary_csv,
    trials_csv,
)
from .pipeline import PipelineConfig, run_pipeline, run_pipeline_mask
from .raster import read_mask, write_pgm
from .synth import synth_corpus


def _load_config(config_path, seed=None, threshold=None) -> PipelineConfig:
    cfg = PipelineConfig.from_file(config_path) if config_path else PipelineConfig()
    overrides = {}
    if seed is not None:
        overrides["seed"] = seed
    if threshold is not None:
        overrides["threshold"] = threshold
    if overrides:
        cfg = PipelineConfig(**{**cfg.fingerprint(), **overrides})
    return cfg


def _write_json(path, data) -> None:
    Path(path).write_text(
        json.dumps(data, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


config_option = click.option(
    "--config", "config_path", type=click.Path(exists=True, dir_okay=False),
    default=None, help="Key-value config file overriding pipeline defaults.",
)
seed_option = click.option("--seed", type=int, default=None, help="Random seed override.")
threshold_option = click.option(
    "--threshold", type=int, default=None,
    help="Foreground threshold override (pixels above it are foreground).",
)
dump_option = click.option(
    "--dump-intermediates", "dump_dir", type=click.Path(file_okay=False),
    default=None, help="Directory for per-sample intermediate artifacts.",
)


@click.group()
def cli():
    """Shape classification from skeleton triangulations."""


@cli.command()
@click.option("--classes", default="cross,rosette6,star5", show_default=True,
              help="Comma-separated shape families (star<k>, rosette<k>, cross, spokes<k>).")
@click.option("--count", default=30, show_default=True, help="Samples per class.")
@click.option("--noise", default=0.05, show_default=True, help="Boundary noise level.")
@click.option("--size", default=160, show_default=True, help="Mask side length in pixels.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@config_option
@seed_option
def synth(classes, count, noise, size, out_dir, config_path, seed):
    """Generate a synthetic mask corpus on disk."""
    cfg = _load_config(config_path, seed)
    corpus = synth_corpus(
        [c.strip() for c in classes.split(",") if c.strip()],
        out_dir,
        per_class=count,
        noise=noise,
        seed=cfg.seed if seed is None else seed,
        size=size,
    )
    click.echo(
        f"wrote {corpus.total_files} masks in {len(corpus.classes)} classes "
        f"under {out_dir} (checksum {corpus.manifest_checksum[:12]})"
    )


@cli.command()
@click.argument("mask_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@config_option
@seed_option
@threshold_option
@dump_option
def skeletonize(mask_path, out_path, config_path, seed, threshold, dump_dir):
    """Thin a mask, prune its branches, and write the skeleton PGM."""
    cfg = _load_config(config_path, seed, threshold)
    mask = read_mask(mask_path, cfg.threshold)
    art = run_pipeline_mask(mask, cfg, source=str(mask_path))
    write_pgm(art.pruned, out_path)
    if dump_dir:
        Path(dump_dir).mkdir(parents=True, exist_ok=True)
        write_pgm(art.skeleton, Path(dump_dir) / (Path(mask_path).stem + ".unpruned.pgm"))
    click.echo(
        f"{mask_path}: skeleton {art.pruned.foreground_count} px, "
        f"{len(art.points.endpoints)} endpoints, {len(art.points.junctions)} junctions"
    )


@cli.command()
@click.argument("mask_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@config_option
@seed_option
@threshold_option
@dump_option
def triangulate(mask_path, out_path, config_path, seed, threshold, dump_dir):
    """Triangulate a mask's skeleton points; write triangulation JSON."""
    cfg = _load_config(config_path, seed, threshold)
    mask = read_mask(mask_path, cfg.threshold)
    art = run_pipeline_mask(mask, cfg, source=str(mask_path))
    _write_json(out_path, art.triangulation.to_json_dict())
    z = len(art.triangulation.points)
    k = len(art.triangulation.hull)
    click.echo(f"{mask_path}: {z} points, {len(art.triangulation.triangles)} triangles, hull {k}")
    if dump_dir:
        run_pipeline(mask_path, cfg, dump_dir=dump_dir)


@cli.command("features")
@click.argument("mask_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
              help="Also write one-row-per-triangle CSV here.")
@config_option
@seed_option
@threshold_option
@dump_option
def features_cmd(mask_path, out_path, csv_path, config_path, seed, threshold, dump_dir):
    """Extract the per-triangle feature matrix of one mask."""
    cfg = _load_config(config_path, seed, threshold)
    fm = run_pipeline(mask_path, cfg, dump_dir=dump_dir)
    _write_json(out_path, fm.to_json_dict())
    if csv_path:
        Path(csv_path).write_text(fm.to_csv(), encoding="utf-8")
    click.echo(f"{mask_path}: {fm.m} triangles ({fm.dropped} degenerate dropped)")


@cli.command()
@click.argument("corpus_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@config_option
@seed_option
@threshold_option
@dump_option
def train(corpus_dir, out_path, config_path, seed, threshold, dump_dir):
    """Train a knowledgebase from a corpus directory and save it as JSON."""
    cfg = _load_config(config_path, seed, threshold)
    corpus = ingest(corpus_dir, cfg.threshold)
    feats = extract_corpus_features(corpus, cfg)
    samples = []
    for cid, _name, entries in feats.classes:
        samples.extend((cid, fm) for _fname, fm in entries)
    kb = train_kb(samples, class_names=feats.class_names, config=cfg.fingerprint())
    kb.save(out_path)
    click.echo(
        f"trained {kb.total_references} reference vectors over "
        f"{len(kb.classes)} classes -> {out_path}"
        + (f" ({len(feats.unusable)} unusable skipped)" if feats.unusable else "")
    )


@cli.command()
@click.argument("kb_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("mask_paths", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
@config_option
@seed_option
@threshold_option
@dump_option
def classify(kb_path, mask_paths, out_path, config_path, seed, threshold, dump_dir):
    """Classify one or more masks against a saved knowledgebase."""
    cfg = _load_config(config_path, seed, threshold)
    kb = Knowledgebase.load(kb_path)
    names = kb.class_names
    results = {}
    for mask_path in mask_paths:
        fm = run_pipeline(mask_path, cfg, dump_dir=dump_dir)
        result = classify_fm(fm, kb, normalize_by_refs=cfg.normalize_by_refs)
        results[str(mask_path)] = {
            "class_name": names[result.predicted_class],
            **result.to_json_dict(),
        }
        tie_note = " (tie)" if result.tie else ""
        click.echo(
            f"{mask_path}: class {result.predicted_class} "
            f"[{names[result.predicted_class]}]{tie_note}"
        )
    if out_path:
        _write_json(out_path, results)


@cli.command()
@click.argument("corpus_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--fractions", default="0.4,0.6,0.8", show_default=True,
              help="Comma-separated training fractions.")
@click.option("--trials", default=5, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
              help="Base path for CSV output; writes <base>, <base>.trials.csv "
                   "and <base>.confusion.csv.")
@config_option
@seed_option
@threshold_option
@dump_option
def evaluate(corpus_dir, fractions, trials, out_path, csv_path, config_path, seed, threshold, dump_dir):
    """Run the split-and-trial protocol over a corpus; write the report JSON."""
    cfg = _load_config(config_path, seed, threshold)
    corpus = ingest(corpus_dir, cfg.threshold)
    feats = extract_corpus_features(corpus, cfg)
    reports = []
    for token in fractions.split(","):
        frac = float(token.strip())
        plan = TrialPlan(training_fraction=frac, trials=trials, seed=cfg.seed)
        reports.append(run_evaluation(feats, plan, cfg))
    combined = {"reports": reports}
    Path(out_path).write_text(report_to_json(combined), encoding="utf-8")
    if csv_path:
        base = Path(csv_path)
        base.write_text(summary_csv(reports), encoding="utf-8")
        base.with_suffix(base.suffix + ".trials.csv").write_text(
            trials_csv(reports), encoding="utf-8"
        )
        base.with_suffix(base.suffix + ".confusion.csv").write_text(
            confusion_csv(reports), encoding="utf-8"
        )
    for rep in reports:
        s = rep["summary"]
        click.echo(
            f"training {rep['protocol']['training_fraction']:.0%}: "
            f"mean {s['mean_accuracy']:.4f}, "
            f"min {s['min_accuracy']:.4f}, max {s['max_accuracy']:.4f} "
            f"over {rep['protocol']['trials']} trials"
        )
    if feats.unusable:
        click.echo(f"unusable samples excluded: {len(feats.unusable)}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except InvariantViolation as exc:
        click.echo(f"internal invariant violation: {exc}", err=True)
        return 3
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports all
        click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())
