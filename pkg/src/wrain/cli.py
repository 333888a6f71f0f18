"""Command line front end.

Commands: run a schedule, check randomized runs against the trace
checkers, explore every schedule exhaustively, generate instances, serve
the interactive session protocol, replay traces, and inspect per-node
predicates. Exit status 0 means success / all checks passed.
"""

from __future__ import annotations

import json
import pathlib
import sys

import click

from . import checkers, engine, explorer, instances, render, tracefile
from .rng import mix_seed
from .scheduler import parse_adversary, parse_scheduler
from .service import _node_entry

EXIT_FAIL = 1


def _fail(message: str) -> "click.ClickException":
    return click.ClickException(message)


def _load_instance(path: str):
    try:
        return instances.load_instance(path)
    except OSError as exc:
        raise _fail(f"cannot read {path}: {exc.strerror}")
    except instances.InstanceError as exc:
        raise _fail(f"{path}: {exc}")


def _parsed(parser, spec: str, seed: int):
    try:
        return parser(spec, seed)
    except ValueError as exc:
        raise _fail(str(exc))


@click.group()
@click.version_option(package_name="wrain")
def main() -> None:
    """Line formation by westward rain on the triangular grid."""


@main.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--scheduler", "scheduler_spec", default="sync", show_default=True,
              help="sync | serial[:seed] | subset[:seed[:p]]")
@click.option("--adversary", "adversary_spec", default="first", show_default=True,
              help="first | random[:seed]  (tie-break policy)")
@click.option("--seed", default=0, show_default=True,
              help="Default seed for specs that leave it out.")
@click.option("--max-steps", type=int, default=None, help="Round limit.")
@click.option("--max-moves", type=int, default=None, help="Move limit.")
@click.option("--fairness-window", type=int, default=None,
              help="Allowed activation gap (default 2n).")
@click.option("--stale", is_flag=True,
              help="Look/act split: decisions latch and apply one activation later.")
@click.option("--trace", "trace_out", type=click.Path(dir_okay=False),
              help="Write the run's trace file here.")
@click.option("--svg-dir", type=click.Path(file_okay=False),
              help="Write one SVG frame per round into this directory.")
def run(instance, scheduler_spec, adversary_spec, seed, max_steps, max_moves,
        fairness_window, stale, trace_out, svg_dir) -> None:
    """Run one schedule on INSTANCE and print its summary."""
    config = _load_instance(instance)
    scheduler = _parsed(parse_scheduler, scheduler_spec, seed)
    adversary = _parsed(parse_adversary, adversary_spec, seed)
    try:
        trace = engine.run(
            config, scheduler, adversary,
            max_steps=max_steps, max_moves=max_moves,
            fairness_window=fairness_window, stale=stale,
        )
    except engine.EngineError as exc:
        raise _fail(str(exc))
    s = trace.summary
    click.echo(
        f"rounds={s.steps} moves={s.moves} expansions={s.expansions} "
        f"final={str(s.terminated).lower()} stop={s.stop}"
    )
    if trace_out:
        tracefile.write_trace(trace, trace_out)
        click.echo(f"trace written to {trace_out}")
    if svg_dir:
        files = render.render_frames(trace, svg_dir)
        click.echo(f"{len(files)} SVG frames in {svg_dir}")
    if not s.terminated:
        sys.exit(EXIT_FAIL)


@main.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--runs", default=100, show_default=True)
@click.option("--scheduler", "scheduler_spec", default="serial", show_default=True)
@click.option("--adversary", "adversary_spec", default="random", show_default=True)
@click.option("--seed", default=0, show_default=True,
              help="Base seed; each run derives its own from it.")
@click.option("--failure-dir", type=click.Path(file_okay=False), default=".",
              show_default=True, help="Where witness traces of failures go.")
def check(instance, runs, scheduler_spec, adversary_spec, seed, failure_dir) -> None:
    """Execute randomized runs on INSTANCE and verify every guarantee."""
    config = _load_instance(instance)
    failures = 0
    for i in range(runs):
        run_seed = mix_seed(seed, i)
        scheduler = _parsed(parse_scheduler, scheduler_spec, run_seed)
        adversary = _parsed(parse_adversary, adversary_spec, run_seed)
        try:
            trace = engine.run(config, scheduler, adversary)
        except engine.EngineError as exc:
            raise _fail(f"run {i}: {exc}")
        reports = checkers.check_all(trace)
        if checkers.all_passed(reports):
            continue
        failures += 1
        out = pathlib.Path(failure_dir) / f"wrain-failure-{i}.trace"
        out.parent.mkdir(parents=True, exist_ok=True)
        tracefile.write_trace(trace, out)
        click.echo(f"run {i}: FAIL  witness trace: {out}")
        for report in reports:
            if not report.passed:
                click.echo(f"  {report.line()}")
    click.echo(f"{runs} runs, {failures} failures")
    if failures:
        sys.exit(EXIT_FAIL)


@main.command()
@click.argument("instance", required=False,
                type=click.Path(exists=True, dir_okay=False))
@click.option("--sweep", "sweep_n", type=int, default=None,
              help="Explore every connected instance of this size instead.")
@click.option("--mode", type=click.Choice(["serial", "all_subsets"]),
              default="serial", show_default=True)
@click.option("--max-states", default=10_000_000, show_default=True)
@click.option("--counterexample-out", type=click.Path(dir_okay=False),
              default="counterexample.trace", show_default=True)
def explore(instance, sweep_n, mode, max_states, counterexample_out) -> None:
    """Exhaustively verify every schedule of an instance (or a full sweep)."""
    if (instance is None) == (sweep_n is None):
        raise click.UsageError("give an INSTANCE or --sweep N, not both")
    if instance is not None:
        configs = [_load_instance(instance)]
    else:
        try:
            configs = list(explorer.enumerate_initial(sweep_n))
        except explorer.ExplorerError as exc:
            raise _fail(str(exc))
    bad = 0
    for config in configs:
        try:
            result = explorer.explore(config, mode=mode, max_states=max_states)
        except explorer.ExplorerError as exc:
            raise _fail(str(exc))
        prefix = f"{config.canonical_key()}: " if len(configs) > 1 else ""
        click.echo(prefix + result.summary_line())
        if not result.ok:
            bad += 1
            for violation in result.violations:
                click.echo(f"  violation: {violation}")
            if result.counterexample is not None:
                tracefile.write_trace(result.counterexample, counterexample_out)
                click.echo(f"  counterexample trace: {counterexample_out}")
    if len(configs) > 1:
        click.echo(f"{len(configs)} instances, {bad} with violations")
    if bad:
        sys.exit(EXIT_FAIL)


@main.command()
@click.argument("shape", type=click.Choice(instances.SHAPES))
@click.argument("n", type=click.IntRange(min=1))
@click.option("--seed", default=0, show_default=True,
              help="Only the random shape uses it.")
@click.option("-o", "--out", type=click.Path(dir_okay=False),
              help="Write the instance here instead of stdout.")
def gen(shape, n, seed, out) -> None:
    """Generate an instance file: hex blob, NE line, E line, or random."""
    config = instances.generate(shape, n, seed)
    comment = f"shape={shape} n={n}" + (f" seed={seed}" if shape == "random" else "")
    text = instances.format_instance(config, comment)
    if out:
        pathlib.Path(out).write_text(text)
        click.echo(f"instance written to {out}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8787, show_default=True)
def serve(host, port) -> None:
    """Serve the step-session protocol for interactive scheduling."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port, log_level="warning")


@main.command()
@click.argument("trace_path", metavar="TRACE",
                type=click.Path(exists=True, dir_okay=False))
@click.option("--svg-dir", type=click.Path(file_okay=False),
              help="Re-render one SVG frame per round into this directory.")
@click.option("--strict", is_flag=True,
              help="Require the recorded start to be contracted and connected.")
def replay(trace_path, svg_dir, strict) -> None:
    """Re-execute a trace's choices, verify it, and re-run all checks."""
    try:
        trace = tracefile.read_trace(trace_path)
    except tracefile.TraceFormatError as exc:
        raise _fail(f"{trace_path}: {exc}")
    report = engine.replay(trace, strict=strict)
    if not report.ok:
        where = "" if report.divergence is None else f" at round {report.divergence}"
        click.echo(f"replay: DIVERGED{where}: {report.detail}")
        sys.exit(EXIT_FAIL)
    click.echo(f"replay: ok ({report.steps} rounds)")
    reports = checkers.check_all(trace)
    for r in reports:
        click.echo(r.line())
    if svg_dir:
        files = render.render_frames(trace, svg_dir)
        click.echo(f"{len(files)} SVG frames in {svg_dir}")
    # inconclusive is fine for prefixes of unfinished runs; only a hard
    # check failure is an error
    if any(r.status == "fail" for r in reports):
        sys.exit(EXIT_FAIL)


@main.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.argument("nodes", metavar="[Q,R]...", nargs=-1)
def inspect(instance, nodes) -> None:
    """Print the sensing predicates and decision at the given nodes.

    With no nodes given, every body node is inspected. Output is one JSON
    object per line, matching the session protocol's node entries.
    """
    config = _load_instance(instance)
    targets = []
    for spec in nodes:
        try:
            q, r = (int(part) for part in spec.split(","))
        except ValueError:
            raise click.UsageError(f"node must look like Q,R (got {spec!r})")
        targets.append((q, r))
    if not targets:
        targets = sorted(config.bodies())
    for v in targets:
        entry = _node_entry(config, v)
        click.echo(json.dumps(entry, sort_keys=True, separators=(",", ":")))


if __name__ == "__main__":
    main()
