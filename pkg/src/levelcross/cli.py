"""Command-line interface.

Subcommands: `sweep` for parameter scans, `preset` for the canned
figure-reproduction datasets, `solve` for a single-point report, and
`aeh` for the exactly solvable tangent-model cross-check.

Exit codes: 0 success, 2 bad arguments, 3 partial failure (one or more
rows carried warnings).
"""

from __future__ import annotations

import math
import sys

import click

from . import ddp
from .integrator import IntegratorConfig, solve as solve_model
from .models import ModelKind, ModelSpec
from .sweep import (SweepConfig, compare_report, preset_configs, run_sweep,
                    write_rows)

_KINDS = {
    "lz": ModelKind.LZ,
    "superlinear": ModelKind.SUPERLINEAR,
    "sublinear": ModelKind.SUBLINEAR,
    "essential": ModelKind.ESSENTIAL,
}


def _integrator_cfg(sa_order, rel_tol, abs_tol, conv_ratio, max_time):
    try:
        return IntegratorConfig(
            sa_order=sa_order, rel_tol=rel_tol, abs_tol=abs_tol,
            convergence_ratio=conv_ratio, max_time=max_time,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))


def _integrator_options(f):
    f = click.option("--sa-order", type=int, default=3, show_default=True,
                     help="superadiabatic order of the propagation basis")(f)
    f = click.option("--rel-tol", type=float, default=1e-12, show_default=True)(f)
    f = click.option("--abs-tol", type=float, default=1e-14, show_default=True)(f)
    f = click.option("--conv-ratio", type=float, default=1e-4, show_default=True,
                     help="oscillation-span convergence threshold")(f)
    f = click.option("--max-time", type=float, default=None,
                     help="hard stop for the propagation time")(f)
    return f


@click.group()
def main():
    """Nonadiabatic transition probabilities for level-crossing models."""


@main.command()
@click.option("--model", "model_name", required=True,
              type=click.Choice(sorted(_KINDS)), help="model family")
@click.option("--a", "a_fixed", type=float, default=None,
              help="fixed coupling (required for eps sweeps)")
@click.option("--eps", type=float, default=0.0, show_default=True,
              help="fixed nonlinearity coefficient (a sweeps)")
@click.option("--n", "n_power", type=int, default=3, show_default=True,
              help="odd power of the essential model")
@click.option("--var", required=True, type=click.Choice(["a", "eps"]),
              help="sweep variable")
@click.option("--min", "lo", type=float, required=True)
@click.option("--max", "hi", type=float, required=True)
@click.option("--count", type=int, required=True)
@click.option("--methods", default="numeric,ddp,lz", show_default=True,
              help="comma-separated subset of numeric,ddp,lz,asymptotic")
@click.option("--format", "fmt", type=click.Choice(["csv", "jsonl"]),
              default="csv", show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--plot", "plot_path", type=click.Path(dir_okay=False), default=None,
              help="also render the comparison figure to this file")
@click.option("--workers", type=int, default=4, show_default=True)
@_integrator_options
def sweep(model_name, a_fixed, eps, n_power, var, lo, hi, count, methods,
          fmt, out, plot_path, workers, sa_order, rel_tol, abs_tol,
          conv_ratio, max_time):
    """Sweep one parameter and write a comparison table."""
    cfg_int = _integrator_cfg(sa_order, rel_tol, abs_tol, conv_ratio, max_time)
    try:
        cfg = SweepConfig.from_range(
            _KINDS[model_name], var, lo, hi, count,
            a=a_fixed, eps=eps, n_power=n_power,
            methods=tuple(m.strip() for m in methods.split(",") if m.strip()),
            integrator=cfg_int, workers=workers,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))
    rows = run_sweep(cfg)
    write_rows(rows, out, fmt)
    if plot_path:
        from .plotting import plot_sweep

        plot_sweep(rows, plot_path, var=var)
    report = compare_report(rows)
    click.echo(f"wrote {len(rows)} rows to {out}")
    if not report["no_comparable_rows"]:
        for branch, stats in report["branches"].items():
            click.echo(
                f"  {branch}: n={stats['count']} "
                f"max rel diff {stats['max_rel_diff']:.3g} "
                f"median {stats['median_rel_diff']:.3g}"
            )
    if report["n_warned"]:
        click.echo(f"  {report['n_warned']} rows carry warnings", err=True)
        sys.exit(3)


@main.command()
@click.argument("name", type=click.Choice(["fig2", "fig3", "fig4", "fig5"]))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["csv", "jsonl"]),
              default="csv", show_default=True)
@click.option("--plot/--no-plot", default=True, show_default=True,
              help="render the figure next to the data file")
@click.option("--workers", type=int, default=4, show_default=True)
def preset(name, out, fmt, plot, workers):
    """Write one of the canned figure-reproduction datasets."""
    rows = []
    configs = preset_configs(name, workers)
    for cfg in configs:
        rows.extend(run_sweep(cfg))
    write_rows(rows, out, fmt)
    click.echo(f"wrote {len(rows)} rows to {out}")
    if plot:
        from .plotting import plot_sweep

        img = out.rsplit(".", 1)[0] + ".png"
        plot_sweep(rows, img, var=configs[0].var, title=name)
        click.echo(f"rendered {img}")
    if any(r.warnings for r in rows):
        n = sum(1 for r in rows if r.warnings)
        click.echo(f"  {n} rows carry warnings", err=True)
        sys.exit(3)


@main.command("solve")
@click.option("--model", "model_name", required=True,
              type=click.Choice(sorted(_KINDS)))
@click.option("--a", type=float, required=True, help="dimensionless coupling")
@click.option("--eps", type=float, default=0.0, show_default=True)
@click.option("--n", "n_power", type=int, default=3, show_default=True)
@_integrator_options
def solve_cmd(model_name, a, eps, n_power, sa_order, rel_tol, abs_tol,
              conv_ratio, max_time):
    """Solve a single model point and print a human-readable report."""
    kind = _KINDS[model_name]
    try:
        if kind is ModelKind.LZ:
            model = ModelSpec.lz(a)
        elif kind is ModelKind.ESSENTIAL:
            model = ModelSpec.essential(a, n_power)
        elif kind is ModelKind.SUPERLINEAR:
            model = ModelSpec.superlinear(a, eps)
        else:
            model = ModelSpec.sublinear(a, eps)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    cfg = _integrator_cfg(sa_order, rel_tol, abs_tol, conv_ratio, max_time)
    res = solve_model(model, cfg)
    analytic = ddp.analytic_probability(model)
    click.echo(f"model            : {model.label} (a={a:g}"
               + (f", eps={eps:g}" if kind in (ModelKind.SUPERLINEAR, ModelKind.SUBLINEAR) else "")
               + (f", N={n_power}" if kind is ModelKind.ESSENTIAL else "") + ")")
    click.echo(f"P numeric        : {res.probability:.12e}")
    click.echo(f"P analytic       : {analytic.probability:.12e} [{analytic.branch.value}]")
    click.echo(f"P linear model   : {ddp.p_lz(a):.12e}")
    if res.probability > 0:
        rel = abs(res.probability - analytic.probability) / res.probability
        click.echo(f"rel numeric-ddp  : {rel:.3e}")
    click.echo(f"stop time        : {res.stop_time:.6g}")
    click.echo(f"cross-order gap  : {res.cross_order_gap:.3e}"
               if res.cross_order_gap is not None else "cross-order gap  : n/a")
    click.echo(f"converged        : {res.converged}")
    for w in analytic.warnings:
        click.echo(f"warning          : {w}", err=True)


@main.command()
@click.option("--A", "amp", type=float, required=True, help="coupling amplitude")
@click.option("--B", "det", type=float, required=True, help="detuning amplitude")
@click.option("--T", "width", type=float, required=True, help="pulse width")
@click.option("--conv-ratio", type=float, default=1e-7, show_default=True)
def aeh(amp, det, width, conv_ratio):
    """Cross-check the exactly solvable tangent model three ways."""
    exact = ddp.aeh_exact(amp, det, width)
    model = ModelSpec.aeh(amp, det, width)
    beta = math.sqrt(det / width)
    gamma = det / (3.0 * width**3)
    import warnings as _w

    with _w.catch_warnings():
        _w.simplefilter("ignore", ddp.ValidityWarning)
        pert = ddp.perturbative_deviation(amp, beta, gamma)
    res = solve_model(model, IntegratorConfig(convergence_ratio=conv_ratio))
    click.echo(f"exact            : {exact:.12e}")
    click.echo(f"numeric          : {res.probability:.12e} "
               f"(rel {abs(res.probability - exact) / exact:.3e})")
    click.echo(f"perturbative     : {pert:.12e} "
               f"(|log ratio| {abs(math.log(pert / exact)):.3e})")


if __name__ == "__main__":
    main()
