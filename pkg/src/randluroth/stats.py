"""Seeded Monte Carlo estimators and the matching closed-form reference statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import markov
from .core import Params, digit_of, sign_digit, switch_contains
from .errors import DomainError

ZETA2 = math.pi ** 2 / 6
EULER_GAMMA = 0.5772156649015329
DEFAULT_BURN_IN = 1000


@dataclass(frozen=True)
class SimConfig:
    """Pure description of a simulation; results are a function of this object alone."""

    params: Params
    n_steps: int
    n_trajectories: int
    seed: int
    x0: Optional[float] = None  # None: uniform on [c, 1], else a fixed start

    def __post_init__(self):
        if self.n_steps < 1 or self.n_trajectories < 1:
            raise DomainError("n_steps and n_trajectories must be >= 1")


@dataclass
class StatReport:
    estimate: float
    std_error: float
    n_samples: int
    seed: int
    reference: Optional[float] = None


@dataclass
class IntervalEstimate:
    value: float
    low: float
    high: float

    @property
    def width(self) -> float:
        return self.high - self.low


# ---------------------------------------------------------------------------
# simulation engine

DITHER = 2.0 ** -45


class Engine:
    """Vectorized orbit simulator; one PCG64 stream per trajectory, split from the master seed.

    Orbit values carry a relative low-bit jitter of 2^-45 per step.  Without it
    every binary64 orbit is a dyadic rational whose 2-adic valuation only grows
    under the (even-slope) branch maps, so float orbits are exactly absorbed at
    the fixed point 1 within ~10^3 steps — an artifact the real dynamics does
    not have.  The jitter is far below every statistical tolerance used here.
    The point 1 itself is left exact so deliberate fixed-point starts behave.
    """

    def __init__(self, config: SimConfig, burn_in: Optional[int] = None):
        self.config = config
        self.c_frac = Fraction(config.params.c)
        self.c = float(config.params.c)
        self.p = float(config.params.p)
        n = config.n_trajectories
        self.rngs = [
            np.random.Generator(np.random.PCG64(
                np.random.SeedSequence(entropy=config.seed, spawn_key=(i,))))
            for i in range(n)
        ]
        if config.x0 is None:
            self.x = np.array([self.c + (1 - self.c) * r.random() for r in self.rngs])
        else:
            x0 = float(config.x0)
            if not (self.c <= x0 <= 1) or x0 == 0:
                raise DomainError(f"x0 = {x0} outside ({max(self.c, 0)}, 1]")
            self.x = np.full(n, x0)
        if burn_in is None:
            burn_in = 0 if self.c_frac == 0 else DEFAULT_BURN_IN
        self.burn_in = burn_in
        self._chunk = max(64, 1_000_000 // n)

    def _draws(self, length: int):
        """Per-step branch bits (1 with probability 1-p) and jitter uniforms, per stream."""
        bits = np.empty((len(self.rngs), length), dtype=bool)
        dither = np.empty((len(self.rngs), length))
        for i, r in enumerate(self.rngs):
            bits[i] = r.random(length) >= self.p
            dither[i] = r.random(length)
        return bits, dither

    def _step(self, bits: np.ndarray, dither: np.ndarray):
        """Advance every trajectory one step; returns (s, d, x_prev, x_new, theta)."""
        x = self.x
        at_one = x == 1.0
        recip = 1.0 / x
        d = np.ceil(recip).astype(np.int64)
        d[at_one] = 2
        near_break = np.abs(recip - np.rint(recip)) <= 4 * np.spacing(recip)
        if self.c_frac == 0:
            s = bits.astype(np.int64)
            guard = near_break & ~at_one
        else:
            df = d.astype(float)
            zp = 1.0 / df + self.c / (df * (df - 1.0))
            zm = 1.0 / (df - 1.0) - self.c / ((df - 1.0) * df)
            s = np.where(x < zp, 1, np.where(x > zm, 0, bits.astype(np.int64)))
            guard = (near_break
                     | (np.abs(x - zp) <= 4 * np.spacing(x))
                     | (np.abs(x - zm) <= 4 * np.spacing(x))) & ~at_one
        # points inside the guard band are re-resolved in exact arithmetic
        for i in np.nonzero(guard)[0]:
            sd = sign_digit(int(bits[i]), self.c_frac, Fraction(x[i]))
            s[i], d[i] = sd.s, sd.d
        s[at_one] = 0
        df = d.astype(float)
        slope = df * (df - 1.0)
        theta = np.where(s == 0, df * x - 1.0, 1.0 - (df - 1.0) * x)
        x_new = np.where(s == 0, slope * x - (df - 1.0), df - slope * x)
        jitter = 1.0 + (2.0 * dither - 1.0) * DITHER
        x_new = np.where(x_new < 1.0, x_new * jitter, x_new)
        lo = self.c if self.c > 0 else 1e-300
        x_new = np.clip(x_new, lo, 1.0)
        self.x = x_new
        return s, d, x, x_new, theta

    def run(self, consume: Callable, n_steps: Optional[int] = None):
        """Burn in, then call consume(step_index, s, d, x_prev, x_new, theta) per step."""
        remaining = self.burn_in
        while remaining:
            k = min(remaining, self._chunk)
            bits, dither = self._draws(k)
            for t in range(k):
                self._step(bits[:, t], dither[:, t])
            remaining -= k
        total = self.config.n_steps if n_steps is None else n_steps
        done = 0
        while done < total:
            k = min(total - done, self._chunk)
            bits, dither = self._draws(k)
            for t in range(k):
                consume(done + t, *self._step(bits[:, t], dither[:, t]))
            done += k

    def in_switch_vec(self, x: np.ndarray) -> np.ndarray:
        """Float membership test for the switch region with exact guard-band fallback."""
        at_one = x == 1.0
        recip = 1.0 / x
        d = np.ceil(recip).astype(np.int64)
        d[at_one] = 2
        df = d.astype(float)
        zp = 1.0 / df + self.c / (df * (df - 1.0))
        zm = 1.0 / (df - 1.0) - self.c / ((df - 1.0) * df)
        inside = (x >= zp) & (x <= zm) & ~at_one
        guard = ((np.abs(x - zp) <= 4 * np.spacing(x))
                 | (np.abs(x - zm) <= 4 * np.spacing(x))) & ~at_one
        for i in np.nonzero(guard)[0]:
            inside[i] = switch_contains(self.c_frac, Fraction(x[i]))
        return inside


def _traj_report(traj_sums: np.ndarray, per_traj: int, config: SimConfig,
                 reference: Optional[float]) -> StatReport:
    means = traj_sums / per_traj
    n = len(means)
    est = float(means.mean())
    se = float(means.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return StatReport(est, se, n * per_traj, config.seed, reference)


# ---------------------------------------------------------------------------
# closed forms

def luroth_series_lyapunov(truncation_d: int) -> IntervalEstimate:
    """Partial sum of log(d(d-1))/(d(d-1)) with a rigorous integral tail enclosure."""
    if truncation_d < 2:
        raise DomainError("truncation must be >= 2")
    total = 0.0
    lo = 2
    while lo <= truncation_d:
        hi = min(truncation_d, lo + 10_000_000 - 1)
        d = np.arange(lo, hi + 1, dtype=float)
        total += float(np.sum(np.log(d * (d - 1.0)) / (d * (d - 1.0))))
        lo = hi + 1
    tail = 2.0 * (math.log(truncation_d) + 1.0) / truncation_d + 1.0 / truncation_d ** 2
    return IntervalEstimate(total, total, total + tail)


def _harmonic(n: int) -> float:
    if n <= 0:
        return 0.0
    if n <= 100_000:
        return float(np.sum(1.0 / np.arange(1, n + 1)))
    return math.log(n) + EULER_GAMMA + 1 / (2 * n) - 1 / (12 * n * n)


def f_L(z: float) -> float:
    """Limit CDF of the approximation coefficients of the standard map."""
    if not (0 < z <= 1):
        raise DomainError(f"z = {z} outside (0, 1]")
    m = math.floor(1 / z)
    return z * (_harmonic(m + 1) - 1.0) + 1.0 / (m + 1)


def f_A(z: float) -> float:
    """Limit CDF of the approximation coefficients of the alternating map."""
    if not (0 < z <= 1):
        raise DomainError(f"z = {z} outside (0, 1]")
    m = math.floor(1 / z)
    return z * _harmonic(m - 1) + 1.0 / m


def f_theta(z: float, p: float) -> float:
    """Mixture CDF p*f_L + (1-p)*f_A of the random-map approximation coefficients."""
    return p * f_L(z) + (1 - p) * f_A(z)


def m_p(p: float) -> float:
    """Mean approximation coefficient of the random Luroth map (c = 0)."""
    if not (0 <= p <= 1):
        raise DomainError(f"p = {p} outside [0, 1]")
    return p * (2 * ZETA2 - 3) / 2 + (2 - ZETA2) / 2


# ---------------------------------------------------------------------------
# Monte Carlo estimators

def _lyapunov_reference(params: Params) -> float:
    if params.c == 0:
        return luroth_series_lyapunov(1_000_000).value
    return markov.lyapunov_exact(params.c, params)


def lyapunov_mc(config: SimConfig) -> StatReport:
    """Birkhoff average of log(d_n(d_n - 1)) with the closed-form reference."""
    eng = Engine(config)
    sums = np.zeros(config.n_trajectories)

    def consume(t, s, d, x_prev, x_new, theta):
        nonlocal sums
        sums += np.log(d * (d - 1.0))

    eng.run(consume)
    return _traj_report(sums, config.n_steps, config, _lyapunov_reference(config.params))


def theta_stats_mc(config: SimConfig, grid: Sequence[float]):
    """(mean report, empirical CDF rows, sup distance to the c = 0 mixture CDF)."""
    eng = Engine(config)
    garr = np.array(sorted(float(z) for z in grid))
    if len(garr) and not (garr[0] > 0 and garr[-1] <= 1):
        raise DomainError("grid values must lie in (0, 1]")
    counts = np.zeros(len(garr))
    sums = np.zeros(config.n_trajectories)

    def consume(t, s, d, x_prev, x_new, theta):
        nonlocal sums, counts
        sums += theta
        if len(garr):
            counts += (theta[:, None] <= garr[None, :]).sum(axis=0)

    eng.run(consume)
    c0 = config.params.c == 0
    p = float(config.params.p)
    report = _traj_report(sums, config.n_steps, config, m_p(p) if c0 else None)
    total = config.n_steps * config.n_trajectories
    rows = []
    sup = None
    for z, cnt in zip(garr, counts):
        emp = cnt / total
        ref = f_theta(float(z), p) if c0 else None
        rows.append({"z": float(z), "empirical": float(emp), "reference": ref})
        if ref is not None:
            gap = abs(emp - ref)
            sup = gap if sup is None or gap > sup else sup
    return report, rows, sup


def digit_freq_mc(config: SimConfig, max_digit: int = 20):
    """Empirical digit and sign-digit frequencies with exact references where available."""
    eng = Engine(config)
    acc = np.zeros(2 * (max_digit + 2), dtype=np.int64)
    overflow = 0

    def consume(t, s, d, x_prev, x_new, theta):
        nonlocal overflow
        code = 2 * d + s
        small = code < len(acc)
        overflow += int((~small).sum())
        acc[:] += np.bincount(code[small], minlength=len(acc))

    eng.run(consume)
    total = config.n_steps * config.n_trajectories
    p = float(config.params.p)
    c = Fraction(config.params.c)
    exact = markov.digit_frequencies(c, config.params) if c > 0 else None
    digit_rows, pair_rows = [], []
    dmax = digit_of(c) if c > 0 else max_digit
    for d in range(2, dmax + 1):
        n_d = int(acc[2 * d] + acc[2 * d + 1])
        if c > 0:
            ref_d = float(exact["digit"].get(d, 0))
            refs = {s: float(exact["sign_digit"].get((s, d), 0)) for s in (0, 1)}
        else:
            ref_d = 1.0 / (d * (d - 1))
            refs = {0: p / (d * (d - 1)), 1: (1 - p) / (d * (d - 1))}
        digit_rows.append({"d": d, "count": n_d, "frequency": n_d / total,
                           "reference": ref_d})
        for s in (0, 1):
            cnt = int(acc[2 * d + s])
            pair_rows.append({"s": s, "d": d, "count": cnt, "frequency": cnt / total,
                              "reference": refs[s]})
    return {"n_samples": total, "seed": config.seed, "overflow": overflow,
            "digit": digit_rows, "sign_digit": pair_rows}


def convergence_rate_mc(config: SimConfig) -> StatReport:
    """Per-trajectory OLS slope of log|x - p_n/q_n| against n, versus -Lyapunov."""
    eng = Engine(config, burn_in=0)
    n = config.n_trajectories
    cum = np.zeros(n)
    sy = np.zeros(n)
    sxy = np.zeros(n)
    sx = sxx = 0.0

    def consume(t, s, d, x_prev, x_new, theta):
        nonlocal sx, sxx, cum, sy, sxy
        cum += np.log(d * (d - 1.0))
        log_err = np.log(x_new) - cum  # exact identity |x - p_n/q_n| = x_n / prod
        k = float(t + 1)
        sx += k
        sxx += k * k
        sy += log_err
        sxy += k * log_err

    eng.run(consume)
    steps = config.n_steps
    slopes = (steps * sxy - sx * sy) / (steps * sxx - sx * sx)
    return _traj_report(slopes * steps, steps, config,
                        -_lyapunov_reference(config.params))


def block_coverage(config: SimConfig, block_len: int,
                   digit_cutoff: Optional[int] = None):
    """Counts of all sign-digit blocks of the given length; reports missing blocks."""
    if block_len < 1:
        raise DomainError("block_len must be >= 1")
    c = Fraction(config.params.c)
    if c == 0:
        if digit_cutoff is None or digit_cutoff < 2:
            raise DomainError("c = 0 needs a digit cutoff >= 2")
        dmax = digit_cutoff
    else:
        dmax = digit_of(c)
    alphabet = 2 * (dmax - 1)
    n_blocks = alphabet ** block_len
    if n_blocks > 10_000_000:
        raise DomainError(f"{n_blocks} blocks exceed the tabulation limit")

    eng = Engine(config)
    syms = np.empty((config.n_trajectories, config.n_steps), dtype=np.int32)

    def consume(t, s, d, x_prev, x_new, theta):
        col = 2 * (d - 2) + s
        col[d > dmax] = -1
        syms[:, t] = col

    eng.run(consume)
    codes = np.zeros((config.n_trajectories, config.n_steps - block_len + 1),
                     dtype=np.int64)
    valid = np.ones_like(codes, dtype=bool)
    for i in range(block_len):
        window = syms[:, i:i + codes.shape[1]]
        valid &= window >= 0
        codes += window * (alphabet ** i)
    counts = np.bincount(codes[valid], minlength=n_blocks)

    def decode(code):
        word = []
        for _ in range(block_len):
            sym = code % alphabet
            word.append((sym % 2, sym // 2 + 2))
            code //= alphabet
        return tuple(word)

    missing = [decode(i) for i in np.nonzero(counts == 0)[0]]
    return {"alphabet_size": alphabet, "block_len": block_len,
            "n_blocks": n_blocks, "n_observed_blocks": int((counts > 0).sum()),
            "n_windows": int(valid.sum()), "seed": config.seed,
            "missing": missing, "counts": counts}


def switch_hitting_mc(config: SimConfig, max_steps: int):
    """First hitting time of the switch region for random starts and paths."""
    c = Fraction(config.params.c)
    if not (0 < c <= Fraction(2, 5)):
        raise DomainError(f"c = {c} outside (0, 2/5]")
    if max_steps < 1:
        raise DomainError("max_steps must be >= 1")
    eng = Engine(config, burn_in=0)
    n = config.n_trajectories
    hit = np.full(n, -1, dtype=np.int64)
    hit[eng.in_switch_vec(eng.x)] = 0
    step = 0
    while step < max_steps and (hit < 0).any():
        k = min(eng._chunk, max_steps - step)
        bits, dither = eng._draws(k)
        for t in range(k):
            eng._step(bits[:, t], dither[:, t])
            step += 1
            fresh = (hit < 0) & eng.in_switch_vec(eng.x)
            hit[fresh] = step
    times = hit[hit >= 0]
    hist = np.bincount(times) if len(times) else np.zeros(1, dtype=np.int64)
    return {"n_trajectories": n, "max_steps": max_steps, "seed": config.seed,
            "n_failures": int((hit < 0).sum()), "times": hit, "histogram": hist}
