"""Command-line interface: generation, training, evaluation, pairing, serving.

Every subcommand is a thin adapter over the library: it parses arguments,
calls one library entry point, and reports results. The `score` subcommand is
a plain HTTP client for a running service instance.
"""

from __future__ import annotations

import json
from pathlib import Path

import click

from topicguard.baselines import CosineScorer, ExemplarSet, KnnScorer, ZeroShotScorer
from topicguard.classifiers import (
    BiEncoderConfig,
    CrossEncoderConfig,
    KINDS,
    TrainConfig,
    load_model,
    resolve_backbone,
    save_model,
    train,
)
from topicguard.core import read_dataset, write_dataset
from topicguard.datagen import build_provider, default_campaign, load_campaign, run_campaign
from topicguard.evalharness import (
    evaluate_scorer,
    pair_external,
    plot_reliability,
    read_prompt_lines,
    write_report,
)
from topicguard.service import CascadeConfig, ServiceState, create_app

BASELINE_PREFIXES = ("cosine", "knn6", "zeroshot")


def _fail(message: str) -> "click.ClickException":
    return click.ClickException(message)


@click.group()
def main() -> None:
    """Off-topic prompt guardrail toolkit."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Campaign config JSON; omit for the stock campaign.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@click.option("--provider", "provider_id", default="mock", show_default=True,
              help="'mock' (offline, deterministic) or 'http' (env-configured).")
@click.option("--seed", default=0, show_default=True, help="Mock provider seed.")
def generate(config_path: str | None, out_path: str, provider_id: str, seed: int) -> None:
    """Run a synthetic generation campaign and write a JSONL dataset."""
    try:
        campaign = load_campaign(config_path) if config_path else default_campaign()
        provider = build_provider(provider_id, seed=seed)
        dataset = run_campaign(campaign, provider)
        write_dataset(dataset, out_path)
    except Exception as exc:
        raise _fail(str(exc)) from exc
    meta = dataset.metadata
    click.echo(f"wrote {len(dataset.pairs)} pairs to {out_path}")
    if "shortfall" in meta:
        click.echo(f"shortfall: {json.dumps(meta['shortfall'])}")


@main.command(name="train")
@click.option("--data", "data_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--kind", type=click.Choice(list(KINDS)), required=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--checkpoint-id", default="hash-64", show_default=True)
@click.option("--adapter-dim", default=64, show_default=True)
@click.option("--epochs", default=10, show_default=True)
@click.option("--batch-size", default=32, show_default=True)
@click.option("--learning-rate", default=1e-4, show_default=True)
@click.option("--weight-decay", default=0.01, show_default=True)
@click.option("--patience", default=3, show_default=True)
@click.option("--seed", default=0, show_default=True)
def train_command(
    data_path: str,
    kind: str,
    out_dir: str,
    checkpoint_id: str,
    adapter_dim: int,
    epochs: int,
    batch_size: int,
    learning_rate: float,
    weight_decay: float,
    patience: int,
    seed: int,
) -> None:
    """Fine-tune a classifier on a labeled dataset and save the artifact."""
    try:
        dataset = read_dataset(data_path)
        if kind == "bi_encoder":
            model_config = BiEncoderConfig(checkpoint_id=checkpoint_id, adapter_dim=adapter_dim)
        else:
            model_config = CrossEncoderConfig(checkpoint_id=checkpoint_id, adapter_dim=adapter_dim)
        train_config = TrainConfig(
            epochs=epochs,
            batch_size=batch_size,
            learning_rate=learning_rate,
            weight_decay=weight_decay,
            seed=seed,
            early_stopping_patience=patience,
        )
        model, history = train(kind, dataset, train_config, model_config)
        save_model(model, out_dir)
    except Exception as exc:
        raise _fail(str(exc)) from exc
    click.echo(f"saved {model.model_id} to {out_dir}")
    for row in history[-3:]:
        val = "none" if row["val_auc"] is None else f"{row['val_auc']:.4f}"
        click.echo(f"epoch {row['epoch']}: train_loss {row['train_loss']:.4f} val_auc {val}")


def _build_scorer(model_spec: str, exemplars_path: str | None, provider_seed: int):
    """An artifact directory, or 'cosine:<ckpt>' / 'knn6:<ckpt>' / 'zeroshot:<provider>'."""
    prefix, _, argument = model_spec.partition(":")
    if prefix in BASELINE_PREFIXES and argument:
        if prefix == "cosine":
            return CosineScorer(resolve_backbone(argument))
        if prefix == "knn6":
            if exemplars_path is None:
                raise _fail("knn6 needs --exemplars pointing at a 3+3 labeled dataset")
            exemplar_pairs = read_dataset(exemplars_path).pairs
            return KnnScorer(resolve_backbone(argument), ExemplarSet.from_pairs(list(exemplar_pairs)))
        return ZeroShotScorer(build_provider(argument, seed=provider_seed))
    if not Path(model_spec).is_dir():
        raise _fail(
            f"{model_spec!r} is neither a model artifact directory nor a baseline spec "
            f"({', '.join(p + ':<arg>' for p in BASELINE_PREFIXES)})"
        )
    return load_model(model_spec)


@main.command()
@click.option("--model", "model_spec", required=True,
              help="Artifact directory, or cosine:<ckpt> / knn6:<ckpt> / zeroshot:<provider>.")
@click.option("--data", "data_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--threshold", default=0.5, show_default=True)
@click.option("--bins", default=10, show_default=True)
@click.option("--report", "report_path", type=click.Path(dir_okay=False), required=True)
@click.option("--plot", "plot_path", type=click.Path(dir_okay=False), default=None,
              help="Calibration plot path; defaults to the report path with .png.")
@click.option("--no-plot", is_flag=True, default=False)
@click.option("--exemplars", "exemplars_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="6-pair exemplar dataset for the knn6 baseline.")
@click.option("--provider-seed", default=0, show_default=True)
def evaluate(
    model_spec: str,
    data_path: str,
    threshold: float,
    bins: int,
    report_path: str,
    plot_path: str | None,
    no_plot: bool,
    exemplars_path: str | None,
    provider_seed: int,
) -> None:
    """Score a dataset with any method and write a versioned metric report."""
    scorer = _build_scorer(model_spec, exemplars_path, provider_seed)
    try:
        dataset = read_dataset(data_path)
        report = evaluate_scorer(scorer, dataset, threshold=threshold, n_bins=bins)
        write_report(report, report_path)
    except Exception as exc:
        raise _fail(str(exc)) from exc
    auc = "n/a (recall-only)" if report.roc_auc is None else f"{report.roc_auc:.4f}"
    click.echo(f"model {report.model_id} on {len(dataset.pairs)} pairs (mode {report.mode})")
    click.echo(
        f"roc_auc {auc}  precision {report.precision:.4f}  "
        f"recall {report.recall:.4f}  f1 {report.f1:.4f}  ece {report.reliability.ece:.4f}"
    )
    click.echo(f"report written to {report_path}")
    if not no_plot:
        target = plot_path or str(Path(report_path).with_suffix(".png"))
        if plot_reliability(report, target):
            click.echo(f"calibration plot written to {target}")
        else:
            click.echo("calibration plot skipped")


@main.command()
@click.option("--prompts", "prompts_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="External user prompts, one per line.")
@click.option("--systems", "systems_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="System prompt pool: one per line, or a .jsonl dataset.")
@click.option("--label", type=click.IntRange(0, 1), required=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
def pair(prompts_path: str, systems_path: str, label: int, seed: int, out_path: str) -> None:
    """Pair external prompts with random system prompts into a dataset."""
    try:
        prompts = read_prompt_lines(prompts_path)
        if systems_path.endswith(".jsonl"):
            pool_dataset = read_dataset(systems_path)
            systems = sorted({p.system_prompt for p in pool_dataset.pairs})
        else:
            systems = read_prompt_lines(systems_path)
        dataset = pair_external(prompts, systems, label=label, seed=seed)
        write_dataset(dataset, out_path)
    except Exception as exc:
        raise _fail(str(exc)) from exc
    click.echo(
        f"paired {len(dataset.pairs)} prompts over {len(systems)} system prompts -> {out_path}"
    )


def _parse_band(band: str) -> tuple[float, float]:
    parts = band.split(",")
    if len(parts) != 2:
        raise _fail(f"--band must be 'low,high', got {band!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise _fail(f"--band must be numeric, got {band!r}") from exc


@main.command()
@click.option("--model", "model_dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--secondary", "secondary_dir", type=click.Path(exists=True, file_okay=False), default=None)
@click.option("--threshold", default=0.5, show_default=True)
@click.option("--band", default=None, help="Uncertainty band 'low,high'; enables the cascade.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True)
@click.option("--admin-token", default=None, help="Shared secret required on admin endpoints.")
def serve(
    model_dir: str,
    secondary_dir: str | None,
    threshold: float,
    band: str | None,
    host: str,
    port: int,
    admin_token: str | None,
) -> None:
    """Serve the scoring API over HTTP."""
    import uvicorn

    try:
        primary = load_model(model_dir)
        secondary = load_model(secondary_dir) if secondary_dir else None
        enabled = secondary is not None and band is not None
        cascade = CascadeConfig(
            primary_model=primary,
            secondary_model=secondary,
            enabled=enabled,
            uncertainty_band=_parse_band(band) if band else (0.35, 0.65),
        )
        state = ServiceState(cascade, threshold=threshold)
    except click.ClickException:
        raise
    except Exception as exc:
        raise _fail(str(exc)) from exc
    app = create_app(state, admin_token=admin_token)
    click.echo(f"serving {primary.model_id} on {host}:{port} (threshold {threshold})")
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@click.option("--url", default="http://127.0.0.1:8080", show_default=True)
@click.option("--system-prompt", required=True)
@click.option("--user-prompt", required=True)
@click.option("--timeout", default=10.0, show_default=True)
def score(url: str, system_prompt: str, user_prompt: str, timeout: float) -> None:
    """Ask a running service to score one (system prompt, user prompt) pair."""
    import httpx

    try:
        response = httpx.post(
            url.rstrip("/") + "/v1/score",
            json={"system_prompt": system_prompt, "user_prompt": user_prompt},
            timeout=timeout,
        )
    except httpx.HTTPError as exc:
        raise _fail(f"request failed: {exc}") from exc
    if response.status_code != 200:
        raise _fail(f"service returned {response.status_code}: {response.text}")
    click.echo(json.dumps(response.json(), indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
