"""Markov partitions for rational c, exact stationary densities, and derived statistics."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

from .core import (
    Params,
    apply_sign_digit,
    branch_map,
    digit_of,
    sign_digit,
    z_minus,
    z_plus,
    z_point,
)
from .errors import (
    CapExceededError,
    DomainError,
    NonMarkovPartitionError,
    NonUniqueDensityError,
)

DEFAULT_POINT_CAP = 10_000

TAG_CRITICAL = "critical"
TAG_ORBIT = "orbit"


@dataclass
class MarkovPartition:
    """Strictly increasing breakpoints from c to 1 with per-point provenance tags."""

    c: Fraction
    breakpoints: List[Fraction]
    provenance: Dict[Fraction, str]

    def cells(self) -> List[Tuple[Fraction, Fraction]]:
        b = self.breakpoints
        return list(zip(b[:-1], b[1:]))


@dataclass
class TransferMatrix:
    """Exact transfer operator matrix on piecewise-constant densities; entry (J, I) moves mass I -> J."""

    partition: MarkovPartition
    p: Fraction
    entries: List[List[Fraction]]


@dataclass
class PiecewiseConstantDensity:
    """Stationary density, one exact value per partition cell."""

    partition: MarkovPartition
    values: List[Fraction]

    def evaluate(self, x) -> Fraction:
        b = self.partition.breakpoints
        if not (b[0] <= x <= 1):
            raise DomainError(f"x = {x} outside [{b[0]}, 1]")
        for (a, bb), v in zip(self.partition.cells(), self.values):
            if a <= x < bb:
                return v
        return self.values[-1]

    def measure(self, a, b) -> Fraction:
        """Integral of the density over [a, b] clipped to the support."""
        lo = max(a, self.partition.breakpoints[0])
        hi = min(b, Fraction(1))
        if hi <= lo:
            return Fraction(0)
        total = Fraction(0)
        for (ca, cb), v in zip(self.partition.cells(), self.values):
            left, right = max(ca, lo), min(cb, hi)
            if right > left:
                total += v * (right - left)
        return total

    def merged(self) -> Tuple[List[Fraction], List[Fraction]]:
        """(breakpoints, values) with equal-valued adjacent cells fused."""
        cells = self.partition.cells()
        points = [cells[0][0]]
        vals: List[Fraction] = []
        for (a, b), v in zip(cells, self.values):
            if vals and v == vals[-1]:
                points[-1] = b
            else:
                vals.append(v)
                points.append(b)
        return points, vals


def _critical_set(c: Fraction) -> List[Fraction]:
    pts = {c, Fraction(1)}
    n_max = math.ceil(1 / c) + 2
    for n in range(1, n_max + 1):
        for pt in ([z_point(n)] if n >= 2 else []) + \
                  ([z_plus(c, n)] if n >= 2 else []) + [z_minus(c, n)]:
            if c <= pt <= 1:
                pts.add(pt)
    return sorted(pts)


def _orbit_closure(c: Fraction, seeds, cap: int) -> List[Fraction]:
    seen = set()
    queue = deque(Fraction(s) for s in seeds)
    while queue:
        v = queue.popleft()
        if v in seen:
            continue
        if len(seen) >= cap:
            raise CapExceededError(f"orbit closure for c = {c} exceeded cap {cap}")
        seen.add(v)
        for j in (0, 1):
            queue.append(branch_map(j, c, v))
    return sorted(seen)


def _cell_image(c: Fraction, a: Fraction, b: Fraction, j: int):
    """(image interval, slope, digit) of the open cell (a, b) under branch j."""
    mid = (a + b) / 2
    sd = sign_digit(j, c, mid)
    lo, hi = apply_sign_digit(sd, a), apply_sign_digit(sd, b)
    if lo > hi:
        lo, hi = hi, lo
    return (lo, hi), sd.d * (sd.d - 1), sd.d


def verify_markov(part: MarkovPartition):
    """Assert that every cell image under each branch is an exact union of cells."""
    pts = set(part.breakpoints)
    for a, b in part.cells():
        for j in (0, 1):
            (lo, hi), _, _ = _cell_image(part.c, a, b, j)
            if lo not in pts or hi not in pts:
                raise NonMarkovPartitionError(
                    f"image ({lo}, {hi}) of cell ({a}, {b}) under branch {j} "
                    f"misaligns with the partition")


def markov_points(c: Fraction, cap: int = DEFAULT_POINT_CAP) -> MarkovPartition:
    """Critical points plus the exact random orbits of c and 1-c; verified Markov."""
    c = Fraction(c)
    if not (0 < c <= Fraction(1, 2)):
        raise DomainError(f"c = {c} outside (0, 1/2]")
    critical = _critical_set(c)
    orbit = _orbit_closure(c, [c, 1 - c], cap)
    provenance = {pt: TAG_ORBIT for pt in orbit}
    provenance.update({pt: TAG_CRITICAL for pt in critical})
    part = MarkovPartition(c, sorted(set(critical) | set(orbit)), provenance)
    verify_markov(part)
    return part


def transfer_matrix(part: MarkovPartition, params: Params) -> TransferMatrix:
    """Matrix of the transfer operator on densities that are constant on the cells."""
    p = Fraction(params.p)
    if not (0 < p < 1):
        raise DomainError(f"p = {p} outside (0, 1)")
    verify_markov(part)
    cells = part.cells()
    n = len(cells)
    index = {cell: i for i, cell in enumerate(cells)}
    entries = [[Fraction(0)] * n for _ in range(n)]
    for i, (a, b) in enumerate(cells):
        for j, weight in ((0, p), (1, 1 - p)):
            (lo, hi), slope, _ = _cell_image(part.c, a, b, j)
            for (ca, cb), k in index.items():
                if lo <= ca and cb <= hi:
                    entries[k][i] += weight / slope
    return TransferMatrix(part, p, entries)


def _nullspace_1d(a: List[List[Fraction]]) -> List[Fraction]:
    """The 1-dimensional kernel of a square rational matrix; errors if dim != 1."""
    n = len(a)
    m = [row[:] for row in a]
    pivots = []
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, n) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = 1 / m[row][col]
        m[row] = [v * inv for v in m[row]]
        for r in range(n):
            if r != row and m[r][col] != 0:
                f = m[r][col]
                m[r] = [v - f * w for v, w in zip(m[r], m[row])]
        pivots.append(col)
        row += 1
    free = [col for col in range(n) if col not in pivots]
    if len(free) != 1:
        raise NonUniqueDensityError(
            f"transfer operator kernel has dimension {len(free)}, expected 1")
    fc = free[0]
    v = [Fraction(0)] * n
    v[fc] = Fraction(1)
    for r, col in enumerate(pivots):
        v[col] = -m[r][fc]
    return v


def stationary_density(c: Fraction, params: Params,
                       cap: int = DEFAULT_POINT_CAP) -> PiecewiseConstantDensity:
    """Exact piecewise-constant fixed point of the transfer operator, normalized to mass 1."""
    part = markov_points(Fraction(c), cap)
    tm = transfer_matrix(part, params)
    n = len(tm.entries)
    a = [[tm.entries[r][col] - (1 if r == col else 0) for col in range(n)] for r in range(n)]
    v = _nullspace_1d(a)
    mass = sum(val * (cb - ca) for val, (ca, cb) in zip(v, part.cells()))
    if mass == 0:
        raise NonUniqueDensityError("kernel vector has zero mass")
    v = [val / mass for val in v]
    if any(val <= 0 for val in v):
        raise NonUniqueDensityError("stationary density not strictly positive")
    return PiecewiseConstantDensity(part, v)


def _d_max(c: Fraction) -> int:
    """Largest digit: index of the cell containing c."""
    return digit_of(c)


def digit_frequencies(c: Fraction, params: Params) -> Dict[str, Dict]:
    """Exact stationary frequencies of digits d and sign-digit pairs (s, d)."""
    dens = stationary_density(c, params)
    p = Fraction(params.p)
    c = Fraction(c)
    mu = dens.measure
    pi_d: Dict[int, Fraction] = {}
    pi_sd: Dict[Tuple[int, int], Fraction] = {}
    for d in range(2, _d_max(c) + 1):
        hi = z_point(d - 1) if d > 2 else Fraction(1)
        pi_d[d] = mu(z_point(d), hi)
        switch_mass = mu(z_plus(c, d), z_minus(c, d - 1))
        pi_sd[(0, d)] = p * switch_mass + mu(z_minus(c, d - 1), hi)
        pi_sd[(1, d)] = (1 - p) * switch_mass + mu(z_point(d), z_plus(c, d))
    assert sum(pi_d.values()) == 1
    assert sum(pi_sd.values()) == 1
    return {"digit": pi_d, "sign_digit": pi_sd}


def lyapunov_exact(c: Fraction, params: Params) -> float:
    """Exact-measure Lyapunov exponent, evaluated with binary64 logarithms."""
    dens = stationary_density(c, params)
    c = Fraction(c)
    d_c = math.ceil(1 / c) - 1
    total = 0.0
    for d in range(2, d_c + 1):
        hi = z_point(d - 1) if d > 2 else Fraction(1)
        total += float(dens.measure(z_point(d), hi)) * math.log(d * (d - 1))
    total += float(dens.measure(c, z_point(d_c))) * math.log(d_c * (d_c + 1))
    return total


def c0_truncated_transfer(d_max: int, params: Params) -> List[List[Fraction]]:
    """Diagnostic c = 0 transfer matrix truncated at digit d_max; Lebesgue is fixed up to tail mass."""
    if d_max < 2:
        raise DomainError("d_max must be >= 2")
    p = Fraction(params.p)
    digits = range(2, d_max + 1)
    # every digit cell maps onto the whole interval under both branches
    return [[(p + (1 - p)) / (d * (d - 1)) for d in digits] for _ in digits]
