"""Command-line front end; a thin in-process client over the service handlers."""
from __future__ import annotations

import csv
import io
import json
import sys
from typing import Dict, List, Optional

import click

from .errors import CapExceededError, DomainError
from .service import handlers

EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_CAP = 3


def _emit(result: Dict, rows: Optional[List[Dict]], fmt: str, out: Optional[str]):
    if fmt == "json":
        text = json.dumps(result, indent=2, default=str) + "\n"
    else:
        rows = rows if rows else [result]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        text = buf.getvalue()
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def common_options(fn):
    fn = click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                      default="json", show_default=True)(fn)
    fn = click.option("--out", default=None, help="Write output to this path.")(fn)
    return fn


def sim_options(fn):
    fn = click.option("--c", default="0", show_default=True)(fn)
    fn = click.option("--p", default="1/2", show_default=True)(fn)
    fn = click.option("--steps", default=1000, show_default=True)(fn)
    fn = click.option("--trajectories", default=100, show_default=True)(fn)
    fn = click.option("--seed", default=0, show_default=True)(fn)
    fn = click.option("--x0", default=None,
                      help="Fixed start point P/Q; default uniform on [c,1].")(fn)
    return common_options(fn)


@click.group()
def cli():
    """Random c-Luroth transformations: expansions, classification, densities, statistics."""


@cli.command()
@click.option("--c", default="0", show_default=True, help="Cut point as P/Q.")
@click.option("--x", required=True, help="Start point as P/Q.")
@click.option("--omega", required=True,
              help="Bit word '0110', 'PRE(PERIOD)', or 'bernoulli:p:seed'.")
@click.option("--steps", default=10, show_default=True)
@common_options
def expand(c, x, omega, steps, fmt, out):
    """Exact digit expansion with orbit, convergents and approximation coefficients."""
    res = handlers.handle_expand(c, x, omega, steps)
    rows = [
        {"step": i + 1, "bit": res["omega_used"][i], "s": sd[0], "d": sd[1],
         "x": res["orbit"][i], "p": res["convergents"][i][0],
         "q": res["convergents"][i][1], "theta": res["thetas"][i]}
        for i, sd in enumerate(res["digits"])
    ]
    _emit(res, rows, fmt, out)


@cli.command()
@click.option("--c", required=True)
@click.option("--x", required=True)
@click.option("--emit-graph", is_flag=True, help="Include a DOT export of the orbit graph.")
@click.option("--max-count", default=10, show_default=True)
@click.option("--max-period", default=10, show_default=True)
@common_options
def classify(c, x, emit_graph, max_count, max_period, fmt, out):
    """Classify the expansions of a rational point: unique, countable, or uncountable."""
    res = handlers.handle_classify(c, x, emit_graph, max_count, max_period)
    rows = [{"class": res["class"], "witness_node": res.get("witness_node", "")}]
    _emit(res, rows, fmt, out)


@cli.command()
@click.option("--c", required=True)
@click.option("--cap", default=10_000, show_default=True)
@common_options
def markov(c, cap, fmt, out):
    """Markov partition points for rational c, with provenance tags."""
    res = handlers.handle_markov(c, cap)
    rows = [{"point": pt, "tag": tag}
            for pt, tag in zip(res["breakpoints"], res["provenance"])]
    _emit(res, rows, fmt, out)


@cli.command()
@click.option("--c", required=True)
@click.option("--p", default="1/2", show_default=True)
@click.option("--eval", "eval_x", default=None, help="Evaluate the density at this point.")
@common_options
def density(c, p, eval_x, fmt, out):
    """Exact stationary density as a merged piecewise-constant function."""
    res = handlers.handle_density(c, p, eval_x)
    rows = [{"left": res["breakpoints"][i], "right": res["breakpoints"][i + 1],
             "value": v} for i, v in enumerate(res["values"])]
    _emit(res, rows, fmt, out)


@cli.command()
@sim_options
def lyapunov(c, p, steps, trajectories, seed, x0, fmt, out):
    """Monte Carlo Lyapunov exponent with its closed-form reference."""
    res = handlers.handle_lyapunov(c, p, steps, trajectories, seed, x0)
    _emit(res, [res], fmt, out)


@cli.command("theta-stats")
@click.option("--grid", default=None,
              help="Comma-separated CDF grid points in (0,1].")
@sim_options
def theta_stats(grid, c, p, steps, trajectories, seed, x0, fmt, out):
    """Mean approximation coefficient and empirical CDF against the mixture reference."""
    parsed = [float(z) for z in grid.split(",")] if grid else None
    res = handlers.handle_theta_stats(c, p, steps, trajectories, seed, x0, parsed)
    _emit(res, res["cdf"], fmt, out)


@cli.command()
@click.option("--max-digit", default=20, show_default=True)
@sim_options
def freq(max_digit, c, p, steps, trajectories, seed, x0, fmt, out):
    """Empirical digit and sign-digit frequencies with exact references."""
    res = handlers.handle_freq(c, p, steps, trajectories, seed, x0, max_digit)
    _emit(res, res["sign_digit"], fmt, out)


@cli.command()
@sim_options
def simulate(c, p, steps, trajectories, seed, x0, fmt, out):
    """Raw simulated orbit sample, one row per (trajectory, step)."""
    res = handlers.handle_simulate(c, p, steps, trajectories, seed, x0)
    _emit(res, res["rows"], fmt, out)


@cli.command()
@sim_options
def convergence(c, p, steps, trajectories, seed, x0, fmt, out):
    """Slope of log-approximation-error against step count, versus the Lyapunov rate."""
    res = handlers.handle_convergence(c, p, steps, trajectories, seed, x0)
    _emit(res, [res], fmt, out)


@cli.command()
@click.option("--block-len", default=3, show_default=True)
@click.option("--digit-cutoff", default=None, type=int,
              help="Digit alphabet cutoff, required for c = 0.")
@sim_options
def coverage(block_len, digit_cutoff, c, p, steps, trajectories, seed, x0, fmt, out):
    """Sign-digit block coverage counts over a long simulated sequence."""
    res = handlers.handle_coverage(c, p, steps, trajectories, seed,
                                   block_len, digit_cutoff, x0)
    rows = [{k: res[k] for k in ("alphabet_size", "block_len", "n_blocks",
                                 "n_observed_blocks", "n_windows", "seed")}]
    _emit(res, rows, fmt, out)


@cli.command()
@click.option("--c", required=True)
@click.option("--p", default="1/2", show_default=True)
@click.option("--trajectories", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--max-steps", default=1000, show_default=True)
@click.option("--x0", default=None)
@common_options
def hitting(c, p, trajectories, seed, max_steps, x0, fmt, out):
    """First hitting time of the switch region over random starts and paths."""
    res = handlers.handle_hitting(c, p, trajectories, seed, max_steps, x0)
    rows = [{"n": i, "count": v} for i, v in enumerate(res["histogram"])]
    _emit(res, rows, fmt, out)


def main():
    try:
        cli.main(standalone_mode=False)
    except click.exceptions.Exit as e:
        sys.exit(e.exit_code)
    except click.UsageError as e:
        e.show()
        sys.exit(EXIT_USAGE)
    except click.ClickException as e:
        e.show()
        sys.exit(e.exit_code)
    except CapExceededError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_CAP)
    except (DomainError, ValueError, ZeroDivisionError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_DOMAIN)


if __name__ == "__main__":
    main()
