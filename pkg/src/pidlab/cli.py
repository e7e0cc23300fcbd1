"""Command-line front end: distribution files in, machine-readable reports out.

Exit codes: 0 success, 2 parse failure, 3 validation failure, 4 solver
failure, 5 verification failure.  The environment variable PIDLAB_TOL
overrides the per-suite pass tolerance where one applies.
"""

from __future__ import annotations

import os
import sys

import click

from . import distfile, harness
from . import measures as ms
from .errors import (
    DeltaOutOfRange,
    ParameterOutOfRange,
    ParseError,
    PidLabError,
    ValidationError,
)
from .families import FAMILY_NAMES, FamilySpec, generate

EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_SOLVER = 4
EXIT_VERIFY = 5


def _env_tol(default: float | None) -> float | None:
    raw = os.environ.get("PIDLAB_TOL")
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        raise click.UsageError(f"PIDLAB_TOL={raw!r} is not a number")


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
def main():
    """Bivariate partial information decomposition toolbox."""


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--target", default="S", show_default=True, help="Target variable name.")
@click.option("--sources", default="Y,Z", show_default=True, help="Comma-separated source names.")
@click.option(
    "--measures",
    default=",".join(ms.MEASURE_IDS),
    show_default=True,
    help="Comma-separated measure ids.",
)
@click.option("--out", "out_path", required=True, type=click.Path())
def compute(input_path, target, sources, measures, out_path):
    """Compute decompositions of a distribution file."""
    try:
        P = distfile.load_dist(input_path)
    except ParseError as exc:
        _fail(EXIT_PARSE, str(exc))
    except ValidationError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    source_names = [x.strip() for x in sources.split(",") if x.strip()]
    if len(source_names) != 2:
        _fail(EXIT_PARSE, f"--sources must name exactly two variables, got {sources!r}")
    roles = [target] + source_names
    missing = [n for n in roles if n not in P.names]
    if missing:
        _fail(EXIT_PARSE, f"variables {missing} not present in {list(P.names)}")
    ids = [x.strip() for x in measures.split(",") if x.strip()]
    unknown = [m for m in ids if m not in ms.MEASURE_IDS]
    if unknown:
        _fail(EXIT_PARSE, f"unknown measures {unknown}; known: {list(ms.MEASURE_IDS)}")
    results = {}
    for m in ids:
        try:
            r = ms.compute_measure(m, P, *roles)
        except PidLabError as exc:
            _fail(EXIT_SOLVER, f"measure {m} failed: {exc}")
        results[m] = {
            "si": r.si,
            "ui_y": r.ui_y,
            "ui_z": r.ui_z,
            "ci": r.ci,
            "diagnostics": [
                {
                    "iterations": d.iterations,
                    "objective": d.objective,
                    "certificate": d.certificate,
                    "converged": d.converged,
                    "tolerance_used": d.tolerance_used,
                }
                for d in r.diagnostics
            ],
        }
    report = distfile.make_report(
        "compute",
        tolerances={"consistency_bits": ms.CONSISTENCY_TOL},
        body={
            "roles": {"target": target, "sources": source_names},
            "measures_bits": results,
        },
        input_digest_hex=distfile.input_digest(input_path),
    )
    distfile.write_report(out_path, report)


@main.command()
@click.option("--name", required=True, type=click.Choice(FAMILY_NAMES))
@click.option(
    "--param",
    "params",
    multiple=True,
    help="Family parameter as key=value (repeatable), e.g. --param a=0.5",
)
@click.option("--out", "out_path", required=True, type=click.Path())
def family(name, params, out_path):
    """Generate a named benchmark distribution and write it as a DistFile."""
    kv = {}
    for item in params:
        if "=" not in item:
            _fail(EXIT_PARSE, f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        kv[k.strip()] = v.strip()
    try:
        P = generate(FamilySpec(name, kv))
    except ParameterOutOfRange as exc:
        _fail(EXIT_VALIDATION, str(exc))
    except (KeyError, ValueError) as exc:
        _fail(EXIT_PARSE, f"bad family parameters: {exc}")
    distfile.dump_dist(P, out_path)


@main.command()
@click.option("--suite", required=True, type=click.Choice(sorted(harness.SUITES)))
@click.option("--trials", default=None, type=int, help="Trial count (suite default if omitted).")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
def verify(suite, trials, seed, out_path):
    """Run a verification sweep and write a pass/fail report."""
    runner = harness.SUITES[suite]
    kwargs = {"seed": seed}
    if trials is not None:
        kwargs["trials"] = trials
    tol = _env_tol(None)
    if tol is not None and "tol" in runner.__code__.co_varnames:
        kwargs["tol"] = tol
    try:
        body, passed = runner(**kwargs)
    except PidLabError as exc:
        _fail(EXIT_SOLVER, f"suite {suite} failed to run: {exc}")
    report = distfile.make_report(
        "verify",
        tolerances={"override": tol} if tol is not None else {},
        body={"suite": suite, **body},
    )
    distfile.write_report(out_path, report)
    click.echo(f"{suite}: {'PASS' if passed else 'FAIL'}")
    if not passed:
        sys.exit(EXIT_VERIFY)


@main.command(name="ui-construction")
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--delta-y", required=True, type=float)
@click.option("--delta-z", required=True, type=float)
@click.option("--target", default="S", show_default=True)
@click.option("--sources", default="Y,Z", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def ui_construction(input_path, delta_y, delta_z, target, sources, out_path):
    """Decomposition induced by externally supplied unique-information bounds."""
    try:
        P = distfile.load_dist(input_path)
    except ParseError as exc:
        _fail(EXIT_PARSE, str(exc))
    except ValidationError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    source_names = [x.strip() for x in sources.split(",") if x.strip()]
    if len(source_names) != 2:
        _fail(EXIT_PARSE, f"--sources must name exactly two variables, got {sources!r}")
    try:
        r = ms.ui_construction(delta_y, delta_z, P, target, *source_names)
    except DeltaOutOfRange as exc:
        _fail(EXIT_VALIDATION, str(exc))
    except PidLabError as exc:
        _fail(EXIT_SOLVER, str(exc))
    import pidlab.dist as dc

    iy = dc.mutual_information(P, [target], [source_names[0]])
    iz = dc.mutual_information(P, [target], [source_names[1]])
    report = distfile.make_report(
        "ui-construction",
        tolerances={"consistency_bits": ms.CONSISTENCY_TOL},
        body={
            "delta_y_bits": delta_y,
            "delta_z_bits": delta_z,
            "components_bits": r.components(),
            "consistency_residual_bits": (iy + r.ui_z) - (iz + r.ui_y),
        },
        input_digest_hex=distfile.input_digest(input_path),
    )
    distfile.write_report(out_path, report)


if __name__ == "__main__":
    main()
