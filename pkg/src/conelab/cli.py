"""Command-line surface: fixture checks, registry dumps, classification
procedures, and a steering demonstration."""

from __future__ import annotations

import json
import os
import sys

import click
import numpy as np

from . import classify, fixtures
from .composite import (canonical_self_steering_state, conditioning_map,
                        marginal_of, random_ensemble, steer)
from .cones import ConeError


def _default_seed() -> int:
    env = os.environ.get("CONELAB_SEED")
    return int(env) if env else 7


def _load_registry(path: str | None) -> list[fixtures.FixtureSpec]:
    if path is None:
        return fixtures.builtin_fixtures()
    with open(path, "r", encoding="utf-8") as fh:
        return fixtures.registry_from_json(fh.read())


def _emit(payload: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        click.echo(payload)


@click.group()
def main():
    """Verification toolkit for cone-based state spaces."""


@main.command()
@click.option("--registry", type=click.Path(exists=True), default=None,
              help="Registry JSON file (defaults to the builtin fixtures).")
@click.option("--checks", default=None,
              help="Comma-separated check names (default: all).")
@click.option("--seed", type=int, default=None,
              help="Deterministic seed (CONELAB_SEED overrides the default).")
@click.option("--tol", type=float, default=1e-9, show_default=True)
@click.option("--out", type=click.Path(), default=None,
              help="Write the report here instead of stdout.")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]),
              default="json", show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Fixtures checked in parallel.")
@click.option("--timings", is_flag=True,
              help="Include wall-clock fields (breaks byte-stability).")
def check(registry, checks, seed, tol, out, fmt, jobs, timings):
    """Run checks across a fixture registry; exit 0 iff every declared
    expectation matches."""
    seed = _default_seed() if seed is None else seed
    try:
        specs = _load_registry(registry)
        selected = [c.strip() for c in checks.split(",")] if checks else None
        report = fixtures.run_checks(specs, selected, seed=seed, tol=tol,
                                     jobs=jobs, timings=timings)
    except ConeError as exc:
        raise click.ClickException(str(exc))
    if fmt == "json":
        _emit(json.dumps(report, indent=2, sort_keys=True), out)
    else:
        _emit(fixtures.report_text(report), out)
    sys.exit(0 if report["summary"]["ok"] else 1)


@main.command("fixtures")
@click.option("--out", type=click.Path(), default=None)
def fixtures_cmd(out):
    """Dump the builtin fixture registry as JSON."""
    _emit(fixtures.registry_to_json(fixtures.builtin_fixtures()), out)


@main.command("classify")
@click.option("--procedure",
              type=click.Choice([classify.LOCAL_TOMOGRAPHY,
                                 classify.INJECTIVE_COMPOSITE,
                                 classify.CLASSICALITY]),
              default=classify.LOCAL_TOMOGRAPHY, show_default=True)
@click.option("--max-rank", type=int, default=8, show_default=True)
@click.option("--num-summands", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "text"]),
              default="text", show_default=True)
def classify_cmd(procedure, max_rank, num_summands, out, fmt):
    """Run a reconstruction decision procedure with full derivation traces."""
    try:
        if procedure == classify.LOCAL_TOMOGRAPHY:
            trace = classify.survivors_local_tomography(max_rank)
        elif procedure == classify.INJECTIVE_COMPOSITE:
            trace = classify.survivors_injective_composite(max_rank)
        else:
            trace = classify.survivors_classicality(max_rank, num_summands)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    payload = (classify.trace_json(trace) if fmt == "json"
               else classify.trace_text(trace))
    _emit(payload, out)


@main.command("steer")
@click.option("--fixture", default="two-qubit-hilbert", show_default=True,
              help="A composite fixture from the registry.")
@click.option("--registry", type=click.Path(exists=True), default=None)
@click.option("--parts", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "text"]),
              default="text", show_default=True)
def steer_cmd(fixture, registry, parts, seed, out, fmt):
    """Steer a random ensemble of the canonical self-steering state's
    marginal and report the recovered measurement."""
    seed = _default_seed() if seed is None else seed
    try:
        specs = _load_registry(registry)
        lookup = {s.name: s for s in specs}
        if fixture not in lookup:
            raise ConeError(f"unknown fixture '{fixture}'")
        spec = lookup[fixture]
        if spec.kind != "composite":
            raise ConeError(f"fixture '{fixture}' is not a composite")
        comp = fixtures.build_system(spec, lookup)
        wab = canonical_self_steering_state(comp)
        rng = np.random.default_rng(seed)
        wb = marginal_of(comp, wab, "B")
        ensemble = random_ensemble(comp.factorB, wb, parts, rng)
        result = steer(comp, wab, ensemble)
    except ConeError as exc:
        raise click.ClickException(str(exc))
    cmap = conditioning_map(comp, wab)
    if isinstance(result, str):
        payload = {"fixture": fixture, "result": result}
        residual = None
    else:
        residual = max(float(np.max(np.abs(cmap(e) - t)))
                       for e, t in zip(result, ensemble))
        payload = {
            "fixture": fixture, "result": "measurement", "parts": parts,
            "seed": seed, "residual": residual,
            "ensemble": [t.tolist() for t in ensemble],
            "measurement": [e.tolist() for e in result],
        }
    if fmt == "json":
        _emit(json.dumps(payload, indent=2, sort_keys=True), out)
    else:
        lines = [f"fixture: {fixture}", f"result: {payload['result']}"]
        if residual is not None:
            lines.append(f"reconstruction residual: {residual:.3e}")
            for i, e in enumerate(payload["measurement"]):
                lines.append(f"effect {i}: "
                             + " ".join(f"{v:+.6f}" for v in e))
        _emit("\n".join(lines), out)


if __name__ == "__main__":
    main()
