"""Command-line driver: forge, eval, check, bench.

Exit codes: 0 success, 1 error, 2 refuted (or a violated assertion for
`eval`), 3 timeout, 4 a benchmark task missed its expected outcome.
"""
from __future__ import annotations

import dataclasses
import json
import sys

import click

from .bench import definitions, format_tsv, load_manifest, run_suite, suite_json
from .collect import Inconsistent, eval_program, result_consistency
from .core import size
from .evaluation import DEFAULT_FUEL, EvalError, FuelExhausted
from .solve import DEFAULT_STAGES, parse_stages
from .surface import ElabError, ParseError, load_file, pretty, pretty_result, pretty_value
from .synth import SynthConfig, synthesize

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REFUTED = 2
EXIT_TIMEOUT = 3
EXIT_UNSATISFIED = 4


def _fail(msg: str):
    click.echo(f"error: {msg}", err=True)
    sys.exit(EXIT_ERROR)


def _load(path: str):
    try:
        return load_file(path)
    except OSError as exc:
        _fail(f"{path}: {exc.strerror or exc}")
    except (ParseError, ElabError) as exc:
        _fail(f"{path}:{exc}")


def _stages(text):
    if text is None:
        return DEFAULT_STAGES
    try:
        return parse_stages(text)
    except ValueError as exc:
        raise click.BadParameter(f"{exc}; expected t,s,d;t,s,d;...") from None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def synth_options(f):
    for opt in reversed(
        [
            click.option("--top", default=1, show_default=True, type=click.IntRange(min=1), help="Solutions to report."),
            click.option("--timeout", default=120.0, show_default=True, type=click.FloatRange(min=0), help="Seconds (0 = none)."),
            click.option("--fuel", default=DEFAULT_FUEL, show_default=True, type=click.IntRange(min=1), help="Beta reductions per query."),
            click.option("--max-lazy-case", default=1, show_default=True, type=click.IntRange(min=0), help="Nested lazy case unevaluations."),
            click.option("--stages", default=None, help="Semicolon-separated term,scrutinee,depth budgets."),
        ]
    ):
        f = opt(f)
    return f


def _config(top, timeout, fuel, max_lazy_case, stages) -> SynthConfig:
    return SynthConfig(top=top, timeout=timeout, fuel=fuel, max_lazy_case=max_lazy_case, stages=_stages(stages))


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Example-directed synthesis of recursive functional programs."""


@main.command()
@click.argument("file", type=click.Path(dir_okay=False))
@synth_options
@click.option("--json", "as_json", is_flag=True, help="Print a machine-readable report.")
def forge(file, top, timeout, fuel, max_lazy_case, stages, as_json):
    """Fill the holes of FILE so that its assertions hold."""
    cfg = _config(top, timeout, fuel, max_lazy_case, stages)
    problem = _load(file)
    res = synthesize(problem, cfg)
    if as_json:
        click.echo(_dump(forge_report(file, cfg, res)))
    else:
        if res.status == "solved":
            for i, s in enumerate(res.solutions, 1):
                rec = ", recursive" if s.recursive else ""
                click.echo(f"solution {i} (size {s.size}{rec}, stage {res.stage}):")
                for line in s.lines():
                    click.echo(f"  {line}")
        else:
            click.echo(f"{res.status}: {res.message}", err=True)
    sys.exit({"solved": EXIT_OK, "refuted": EXIT_REFUTED, "timeout": EXIT_TIMEOUT}[res.status])


def forge_report(file, cfg: SynthConfig, res) -> dict:
    return {
        "schema": 1,
        "file": file,
        "status": res.status,
        "message": res.message,
        "stage": str(res.stage) if res.stage is not None else None,
        "stage_index": res.stage_index,
        "solutions": [
            {
                "holes": {f"??{h}": pretty(e) for h, e in sorted(s.holes.items())},
                "sizes": {f"??{h}": size(e) for h, e in sorted(s.holes.items())},
                "size": s.size,
                "recursive": s.recursive,
            }
            for s in res.solutions
        ],
        "config": {
            "top": cfg.top,
            "timeout": cfg.timeout,
            "fuel": cfg.fuel,
            "max_lazy_case": cfg.max_lazy_case,
            "stages": [str(s) for s in cfg.stages],
        },
        "wall_time": round(res.elapsed, 3),
    }


@main.command("eval")
@click.argument("file", type=click.Path(dir_okay=False))
@click.option("--fuel", default=DEFAULT_FUEL, show_default=True, type=click.IntRange(min=1))
def eval_cmd(file, fuel):
    """Evaluate FILE's definitions and assertions around its holes."""
    problem = _load(file)
    try:
        defs = definitions(problem, {}, fuel)
        _, sides = eval_program(problem.program, fuel)
    except (FuelExhausted, EvalError) as exc:
        _fail(f"evaluation failed: {exc or 'out of fuel'}")
    for name, r in defs.items():
        click.echo(f"{name} = {pretty_result(r)}")
    violated = 0
    for i, (r1, r2) in enumerate(sides, 1):
        try:
            residual = result_consistency(r1, r2)
        except Inconsistent:
            status = "violated"
            violated += 1
        else:
            status = "satisfied" if not residual else "residual"
        click.echo(f"assert {i}: {pretty_result(r1)} == {pretty_result(r2)}  [{status}]")
        if status == "residual":
            for a in residual:
                if a.result is r1 or a.result is r2:
                    continue
                click.echo(f"    needs {pretty_result(a.result)} == {pretty_value(a.value)}")
    sys.exit(EXIT_REFUTED if violated else EXIT_OK)


@main.command()
@click.argument("file", type=click.Path(dir_okay=False))
def check(file):
    """Type-check FILE and list its holes with their types."""
    problem = _load(file)
    for d in problem.defs:
        click.echo(f"{d.name} : {d.typ}")
    for h in problem.holes:
        click.echo(f"??{h} : {problem.delta[h].typ}")
    click.echo("ok")


@main.command()
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@click.option("--jobs", default=1, show_default=True, type=click.IntRange(min=1), help="Parallel worker processes.")
@click.option("--tag", "tags", multiple=True, help="Only run tasks with this experiment tag.")
@click.option("--timeout", default=None, type=click.FloatRange(min=0), help="Override every task's timeout.")
@click.option("--json", "as_json", is_flag=True, help="Print the report as JSON instead of TSV.")
def bench(manifest, jobs, tags, timeout, as_json):
    """Run the benchmark tasks listed in MANIFEST."""
    try:
        tasks = load_manifest(manifest)
    except ValueError as exc:
        _fail(str(exc))
    if tags:
        tasks = [t for t in tasks if t.tag in tags]
    if timeout is not None:
        tasks = [dataclasses.replace(t, timeout=timeout) for t in tasks]
    reports = run_suite(tasks, jobs=jobs)
    click.echo(_dump(suite_json(reports)) if as_json else format_tsv(reports), nl=as_json)
    sys.exit(EXIT_OK if all(r.satisfied for r in reports) else EXIT_UNSATISFIED)


if __name__ == "__main__":
    main()
