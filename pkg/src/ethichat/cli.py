"""Command-line entry points: serve, eval, learn, translate."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from ethichat.errors import EthichatError
from ethichat.asp.parser import parse_program
from ethichat.asp.syntax import print_program
from ethichat.config import ServiceConfig
from ethichat.engine import EvaluationEngine, evaluate_facts, load_kb
from ethichat.learn import Label, load_examples, load_modes, learn_rules, DEFAULT_MODES
from ethichat.translate import (
    PatternTable,
    SpeakerRole,
    translate_sentence,
)


@click.group()
def main():
    """Ethical monitoring toolkit for customer-service chat."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def serve(config_path):
    """Run the HTTP service."""
    import uvicorn

    from ethichat.service import create_app

    config = ServiceConfig.load(config_path)
    app = create_app(config)
    uvicorn.run(app, host=config.listen_host, port=config.listen_port, log_level="info")


@main.command("eval")
@click.option("--kb", "kb_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--case", "case_file", required=True, type=click.Path(exists=True, dir_okay=False))
def eval_case(kb_dir, case_file):
    """Evaluate the case facts in a .lp file against a knowledge base."""
    try:
        kb, _ = load_kb(kb_dir)
        case_program = parse_program(Path(case_file).read_text())
        verdict = evaluate_facts(case_program.facts(), kb)
    except EthichatError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(1)
    click.echo(verdict.render())


@main.command()
@click.option("--kb", "kb_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--examples", "examples_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--modes", "modes_file", type=click.Path(exists=True, dir_okay=False))
def learn(kb_dir, examples_file, modes_file):
    """Learn evaluation rules from a JSONL archive of labeled cases."""
    try:
        kb, _ = load_kb(kb_dir)
        examples = load_examples(examples_file)
        modes = load_modes(modes_file) if modes_file else list(DEFAULT_MODES)
        positives = [e for e in examples if e.label is Label.POSITIVE]
        negatives = [e for e in examples if e.label is Label.NEGATIVE]
        background = kb.ontology_facts + kb.code_rules
        hypothesis = learn_rules(positives, negatives, background, modes)
    except EthichatError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(1)
    except ValueError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(1)
    click.echo(print_program(hypothesis.as_program()))


@main.command()
@click.option(
    "--role",
    type=click.Choice(["client", "agent"]),
    required=True,
)
@click.option("--patterns", "patterns_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("text")
def translate(role, patterns_file, text):
    """Print the facts emitted for one sentence."""
    table = PatternTable.load(patterns_file) if patterns_file else PatternTable.default()
    speaker = SpeakerRole.CLIENT if role == "client" else SpeakerRole.SERVICE_AGENT
    try:
        result = translate_sentence(text, speaker, table)
    except EthichatError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(1)
    if not result.matched:
        click.echo("no match")
        return
    for fact in result.facts:
        click.echo(f"{fact}.")


if __name__ == "__main__":
    main()
