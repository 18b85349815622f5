"""Request handlers shared by the HTTP service and the CLI front end."""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .. import markov, orbits, stats
from ..core import (
    OmegaSource,
    Params,
    expand,
    fmt_rational,
    parse_rational,
    psi_prefix,
)
from ..errors import DomainError

P_DENOMINATOR_LIMIT = 10 ** 6


def parse_p_exact(text: str) -> Fraction:
    """Rational p as given, or a decimal snapped to denominator <= 10^6."""
    p = Fraction(text)
    if "/" not in text and p.denominator > P_DENOMINATOR_LIMIT:
        p = p.limit_denominator(P_DENOMINATOR_LIMIT)
    return p


def _word(word) -> List[List[int]]:
    return [[sd.s, sd.d] for sd in word]


def handle_expand(c: str, x: str, omega: str, steps: int) -> Dict:
    c_frac = parse_rational(c)
    x_frac = parse_rational(x)
    params = Params(c_frac)
    rec = expand(OmegaSource.parse(omega), x_frac, params, steps)
    prod = 1
    for _, d in rec.digits:
        prod *= d * (d - 1)
    p_n, q_n = rec.convergents[-1]
    identity_ok = abs(x_frac - Fraction(p_n, q_n)) == rec.orbit[-1] / prod
    return {
        "c": fmt_rational(c_frac),
        "x": fmt_rational(x_frac),
        "omega_used": rec.omega_used,
        "digits": _word(rec.digits),
        "orbit": [fmt_rational(v) for v in rec.orbit],
        "convergents": [[p, q] for p, q in rec.convergents],
        "thetas": [fmt_rational(t) for t in rec.thetas],
        "psi_prefix": fmt_rational(psi_prefix(rec.digits)),
        "identity_ok": identity_ok,
    }


def handle_classify(c: str, x: str, emit_graph: bool = False,
                    max_count: int = 10, max_period: int = 10) -> Dict:
    c_frac = parse_rational(c)
    x_frac = parse_rational(x)
    cls = orbits.classify(x_frac, c_frac)
    out: Dict = {"c": fmt_rational(c_frac), "x": fmt_rational(x_frac),
                 "class": cls.kind}
    if cls.kind == orbits.UNIQUE_PERIODIC:
        out["witness_cycle"] = [fmt_rational(v) for v in cls.deterministic_cycle]
    elif cls.kind == orbits.UNCOUNTABLY_MANY:
        out["witness_node"] = fmt_rational(cls.witness_node)
        out["witness_loops"] = [
            {"label_word": _word(lc.label_word), "bits": list(lc.representative_bits)}
            for lc in cls.witness_loops
        ]
    else:
        out["loops_per_node"] = {
            fmt_rational(y): _word(lc.label_word)
            for y, lc in cls.loops_per_node.items()
        }
        out["expansions"] = [
            {"preperiod": _word(pre), "period": _word(per)}
            for pre, per in orbits.enumerate_expansions(
                x_frac, c_frac, max_count, max_period)
        ]
    if emit_graph:
        out["dot"] = orbits.to_dot(orbits.build_orbit_graph(x_frac, c_frac))
    return out


def handle_markov(c: str, cap: int = markov.DEFAULT_POINT_CAP) -> Dict:
    part = markov.markov_points(parse_rational(c), cap)
    return {
        "c": fmt_rational(part.c),
        "breakpoints": [fmt_rational(pt) for pt in part.breakpoints],
        "provenance": [part.provenance[pt] for pt in part.breakpoints],
    }


def handle_density(c: str, p: str, eval_x: Optional[str] = None) -> Dict:
    c_frac = parse_rational(c)
    p_frac = parse_p_exact(p)
    dens = markov.stationary_density(c_frac, Params(c_frac, p_frac))
    points, values = dens.merged()
    out = {
        "c": fmt_rational(c_frac),
        "p": fmt_rational(p_frac),
        "breakpoints": [fmt_rational(pt) for pt in points],
        "values": [fmt_rational(v) for v in values],
        "merged": True,
    }
    if eval_x is not None:
        out["eval"] = {"x": eval_x,
                       "value": fmt_rational(dens.evaluate(parse_rational(eval_x)))}
    return out


def _config(c: str, p: str, steps: int, trajectories: int, seed: int,
            x0: Optional[str]) -> stats.SimConfig:
    c_frac = parse_rational(c)
    params = Params(c_frac, parse_p_exact(p))
    start = None if x0 is None else float(Fraction(x0))
    return stats.SimConfig(params, steps, trajectories, seed, start)


def _report(rep: stats.StatReport) -> Dict:
    return {"estimate": rep.estimate, "std_error": rep.std_error,
            "n_samples": rep.n_samples, "seed": rep.seed,
            "reference": rep.reference}


def handle_lyapunov(c: str, p: str, steps: int, trajectories: int, seed: int,
                    x0: Optional[str] = None) -> Dict:
    return _report(stats.lyapunov_mc(_config(c, p, steps, trajectories, seed, x0)))


def handle_theta_stats(c: str, p: str, steps: int, trajectories: int, seed: int,
                       x0: Optional[str] = None,
                       grid: Optional[Sequence[float]] = None) -> Dict:
    if grid is None:
        grid = [k / 20 for k in range(1, 21)]
    report, rows, sup = stats.theta_stats_mc(
        _config(c, p, steps, trajectories, seed, x0), grid)
    return {"mean": _report(report), "cdf": rows, "sup_distance": sup}


def handle_freq(c: str, p: str, steps: int, trajectories: int, seed: int,
                x0: Optional[str] = None, max_digit: int = 20) -> Dict:
    return stats.digit_freq_mc(_config(c, p, steps, trajectories, seed, x0),
                               max_digit=max_digit)


def handle_simulate(c: str, p: str, steps: int, trajectories: int, seed: int,
                    x0: Optional[str] = None, max_records: int = 100_000) -> Dict:
    config = _config(c, p, steps, trajectories, seed, x0)
    if steps * trajectories > max_records:
        raise DomainError(
            f"{steps * trajectories} records exceed the simulate limit {max_records}")
    eng = stats.Engine(config)
    rows: List[Dict] = []

    def consume(t, s, d, x_prev, x_new, theta):
        for i in range(len(s)):
            rows.append({"trajectory": i, "step": t + 1, "s": int(s[i]),
                         "d": int(d[i]), "x": float(x_new[i]),
                         "theta": float(theta[i])})

    eng.run(consume)
    rows.sort(key=lambda r: (r["trajectory"], r["step"]))
    return {"seed": seed, "n_steps": steps, "n_trajectories": trajectories,
            "rows": rows}


def handle_convergence(c: str, p: str, steps: int, trajectories: int, seed: int,
                       x0: Optional[str] = None) -> Dict:
    return _report(stats.convergence_rate_mc(
        _config(c, p, steps, trajectories, seed, x0)))


def handle_coverage(c: str, p: str, steps: int, trajectories: int, seed: int,
                    block_len: int, digit_cutoff: Optional[int] = None,
                    x0: Optional[str] = None) -> Dict:
    rep = stats.block_coverage(_config(c, p, steps, trajectories, seed, x0),
                               block_len, digit_cutoff)
    out = {k: rep[k] for k in ("alphabet_size", "block_len", "n_blocks",
                               "n_observed_blocks", "n_windows", "seed")}
    out["missing"] = [[list(sym) for sym in block] for block in rep["missing"]]
    if rep["n_blocks"] <= 4096:
        out["counts"] = [int(v) for v in rep["counts"]]
    return out


def handle_hitting(c: str, p: str, trajectories: int, seed: int,
                   max_steps: int, x0: Optional[str] = None) -> Dict:
    config = _config(c, p, 1, trajectories, seed, x0)
    rep = stats.switch_hitting_mc(config, max_steps)
    times = rep["times"]
    hit = times[times >= 0]
    return {
        "n_trajectories": rep["n_trajectories"],
        "max_steps": rep["max_steps"],
        "seed": rep["seed"],
        "n_failures": rep["n_failures"],
        "mean_time": float(hit.mean()) if len(hit) else None,
        "histogram": [int(v) for v in rep["histogram"]],
    }
