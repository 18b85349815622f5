"""Deterministic Luroth maps, critical points, digit extraction and expansion machinery.

Everything here is generic over exact `fractions.Fraction` inputs and binary64
floats: exact inputs stay exact, float inputs stay float.  Orbit structure,
classification and density solving build on the exact path; Monte Carlo code
uses the float path.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from .errors import DomainError, OmegaExhaustedError

Point = Union[Fraction, float]

# region tags: which map a branch choice forces at a point
REGION_TA = "TA"        # alternating map forced (sign 1)
REGION_TL = "TL"        # standard map forced (sign 0)
REGION_SWITCH = "S"     # omega decides
REGION_BRANCHPOINT = "Z"  # c = 0 at a point 1/n: both choices land on 1


def parse_rational(text: str) -> Fraction:
    """Parse 'P/Q' or a plain integer/decimal string into an exact Fraction."""
    return Fraction(text.strip())


def fmt_rational(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Params:
    """Cut point c in [0, 1/2] and probability p in [0, 1] of choosing the standard map."""

    c: Fraction
    p: Union[Fraction, float] = Fraction(1, 2)

    def __post_init__(self):
        if not (0 <= self.c <= Fraction(1, 2)):
            raise DomainError(f"c = {self.c} outside [0, 1/2]")
        if not (0 <= self.p <= 1):
            raise DomainError(f"p = {self.p} outside [0, 1]")


class SignDigit(NamedTuple):
    s: int  # 0: standard branch, 1: alternating branch
    d: int  # digit, >= 2

    def __str__(self):
        return f"({self.s},{self.d})"


def z_point(n: int) -> Fraction:
    return Fraction(1, n)


def z_plus(c: Fraction, n: int):
    """Right critical offset 1/n + c/(n(n-1)); defined for n >= 2."""
    return Fraction(1, n) + c * Fraction(1, n * (n - 1))


def z_minus(c: Fraction, n: int):
    """Left critical offset 1/n - c/(n(n+1))."""
    return Fraction(1, n) - c * Fraction(1, n * (n + 1))


def critical_points(c: Fraction, n: int) -> Tuple[Fraction, Optional[Fraction], Fraction]:
    """(z_n, z_n^+, z_n^-); z_n^+ is None for n = 1 where it is undefined."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if not (0 <= c <= Fraction(1, 2)):
        raise DomainError(f"c = {c} outside [0, 1/2]")
    zp = z_plus(c, n) if n >= 2 else None
    return z_point(n), zp, z_minus(c, n)


def luroth_map(x: Point) -> Point:
    """Standard Luroth map; fixed points at 0 and 1."""
    if not (0 <= x <= 1):
        raise DomainError(f"x = {x} outside [0, 1]")
    if x == 0 or x == 1:
        return x
    k = math.ceil(1 / x)
    return k * (k - 1) * x - (k - 1)


def alt_map(x: Point) -> Point:
    """Alternating Luroth map, 1 - luroth_map(x)."""
    if not (0 <= x <= 1):
        raise DomainError(f"x = {x} outside [0, 1]")
    return 1 - luroth_map(x)


def digit_of(x: Point) -> int:
    """Digit cell index: 2 for x = 1, else the n with x in [1/n, 1/(n-1))."""
    if x == 1:
        return 2
    return math.ceil(1 / x)


def region_of(c: Fraction, x: Point) -> str:
    """Which map applies at x: forced TA, forced TL, omega-controlled, or a c=0 branch point."""
    if x == 1:
        return REGION_TL
    d = digit_of(x)
    if c == 0:
        if x * d == 1:
            return REGION_BRANCHPOINT
        return REGION_SWITCH
    if x < z_plus(c, d):
        return REGION_TA
    if x > z_minus(c, d - 1):
        return REGION_TL
    return REGION_SWITCH


def _check_domain(c: Fraction, x: Point):
    if not (c <= x <= 1):
        raise DomainError(f"x = {x} outside [{c}, 1]")


def switch_contains(c: Fraction, x: Point) -> bool:
    """True iff x lies in the switch region S where the two branch maps differ."""
    _check_domain(c, x)
    if c == 0:
        return x != 0 and region_of(c, x) == REGION_SWITCH
    if x == 0:
        raise DomainError("x = 0 not in [c, 1] for c > 0")
    return region_of(c, x) == REGION_SWITCH


def sign_digit(j: int, c: Fraction, x: Point) -> SignDigit:
    """Sign/digit pair emitted at x when the omega bit is j."""
    if j not in (0, 1):
        raise DomainError(f"omega bit must be 0 or 1, got {j}")
    if x == 0:
        raise DomainError("sign_digit undefined at x = 0")
    _check_domain(c, x)
    if x == 1:
        return SignDigit(0, 2)
    d = digit_of(x)
    region = region_of(c, x)
    if region == REGION_BRANCHPOINT:
        # c = 0 at x = 1/d: both choices map to 1; the digit that keeps the
        # expansion identity is d+1 on the standard side (1/d = psi((0,d+1),(0,2)^oo))
        return SignDigit(0, d + 1) if j == 0 else SignDigit(1, d)
    if region == REGION_TA:
        return SignDigit(1, d)
    if region == REGION_TL:
        return SignDigit(0, d)
    return SignDigit(j, d)


def apply_sign_digit(sd: SignDigit, x: Point) -> Point:
    """One affine step of the expansion: the branch value encoded by (s, d) at x."""
    s, d = sd
    if s == 0:
        return d * (d - 1) * x - (d - 1)
    return d - d * (d - 1) * x


def branch_map(j: int, c: Fraction, x: Point) -> Point:
    """T_{j,c}(x); always lands in [c, 1] and never at 0 for x != 0."""
    if x == 0:
        if c != 0:
            raise DomainError("x = 0 not in domain for c > 0")
        return 1 - x  # both maps send 0 to 1
    sd = sign_digit(j, c, x)
    return apply_sign_digit(sd, x)


def k_step(j: int, c: Fraction, x: Point) -> Tuple[Point, bool]:
    """One step of the lazy random map that only consumes an omega bit inside S."""
    if c <= 0:
        raise DomainError("k_step requires c > 0")
    _check_domain(c, x)
    in_s = region_of(c, x) == REGION_SWITCH
    return branch_map(j if in_s else 0, c, x), in_s


def theta_value(sd: SignDigit, x_prev: Point) -> Point:
    """Approximation coefficient of the step that emitted sd from x_prev."""
    s, d = sd
    if s == 0:
        return d * x_prev - 1
    return 1 - (d - 1) * x_prev


# ---------------------------------------------------------------------------
# omega sources

class OmegaSource:
    """A path in {0,1}^N: finite word, eventually periodic word, or seeded Bernoulli stream."""

    def __init__(self, kind, **kw):
        self.kind = kind
        self.kw = kw

    @classmethod
    def word(cls, bits: Sequence[int]) -> "OmegaSource":
        return cls("word", bits=tuple(int(b) for b in bits))

    @classmethod
    def eventually_periodic(cls, preperiod: Sequence[int], period: Sequence[int]) -> "OmegaSource":
        period = tuple(int(b) for b in period)
        if not period:
            raise DomainError("period word must be nonempty")
        return cls("periodic", preperiod=tuple(int(b) for b in preperiod), period=period)

    @classmethod
    def bernoulli(cls, p: float, seed: int) -> "OmegaSource":
        if not (0 <= p <= 1):
            raise DomainError(f"p = {p} outside [0, 1]")
        return cls("bernoulli", p=float(p), seed=int(seed))

    def bits(self) -> Iterator[int]:
        """Fresh bit iterator; Bernoulli streams restart from the seed."""
        if self.kind == "word":
            return iter(self.kw["bits"])
        if self.kind == "periodic":
            def gen():
                yield from self.kw["preperiod"]
                while True:
                    yield from self.kw["period"]
            return gen()
        rng = random.Random(self.kw["seed"])
        p = self.kw["p"]
        def bgen():
            while True:
                # bit 0 (standard map) with probability p
                yield 0 if rng.random() < p else 1
        return bgen()

    @classmethod
    def parse(cls, text: str) -> "OmegaSource":
        """'0110', '01(011)' for preperiod+periodic part, or 'bernoulli:p:seed'."""
        text = text.strip()
        if text.startswith("bernoulli:"):
            _, p, seed = text.split(":")
            return cls.bernoulli(float(p), int(seed))
        if "(" in text:
            pre, rest = text.split("(", 1)
            per = rest.rstrip(")")
            return cls.eventually_periodic([int(b) for b in pre], [int(b) for b in per])
        return cls.word([int(b) for b in text])


# ---------------------------------------------------------------------------
# expansions

@dataclass
class ExpansionRecord:
    """Per-step record of a random Luroth expansion."""

    start: Point
    c: Fraction
    digits: List[SignDigit] = field(default_factory=list)
    orbit: List[Point] = field(default_factory=list)          # x_1 .. x_n
    omega_used: List[int] = field(default_factory=list)
    convergents: List[Tuple[int, int]] = field(default_factory=list)
    thetas: List[Point] = field(default_factory=list)

    def __len__(self):
        return len(self.digits)


def expand(source: OmegaSource, x: Point, params: Params, n_steps: int) -> ExpansionRecord:
    """Iterate the random c-Luroth map n_steps times, recording digits, orbit, convergents, thetas."""
    c = params.c
    if n_steps < 1:
        raise DomainError("n_steps must be >= 1")
    if c == 0 and x == 0:
        raise DomainError("x = 0 has no digit expansion")
    _check_domain(c, x)

    rec = ExpansionRecord(start=x, c=c)
    bits = source.bits()
    cur = x
    prod = 1           # product of d_i (d_i - 1) over recorded steps
    partial = Fraction(0)
    sign_acc = 1       # (-1)^(sum of s_i over recorded steps)
    for _ in range(n_steps):
        try:
            j = next(bits)
        except StopIteration:
            raise OmegaExhaustedError(
                f"omega word exhausted after {len(rec)} of {n_steps} steps") from None
        sd = sign_digit(j, c, cur)
        s, d = sd
        theta = theta_value(sd, cur)
        q_prefix = prod            # product over i < n
        prod *= d * (d - 1)
        partial += sign_acc * Fraction(d - 1 + s, prod)
        sign_acc *= -1 if s else 1
        q_n = (d - s) * q_prefix
        p_n = partial * q_n
        assert p_n.denominator == 1, "convergent numerator must be integral"
        cur = apply_sign_digit(sd, cur)

        rec.omega_used.append(j)
        rec.digits.append(sd)
        rec.thetas.append(theta)
        rec.convergents.append((p_n.numerator, q_n))
        rec.orbit.append(cur)
    return rec


# ---------------------------------------------------------------------------
# psi: digit sequences back to points

def _word_data(word: Sequence[SignDigit]) -> Tuple[Fraction, int, int]:
    """(partial sum, product of d(d-1), terminal sign) for a finite digit word."""
    partial = Fraction(0)
    prod = 1
    sign = 1
    for s, d in word:
        if d < 2:
            raise DomainError(f"digit {d} < 2")
        prod *= d * (d - 1)
        partial += sign * Fraction(d - 1 + s, prod)
        sign *= -1 if s else 1
    return partial, prod, sign


def psi_prefix(word: Sequence[SignDigit]) -> Fraction:
    """Exact partial sum of the expansion series for a finite digit word."""
    if not word:
        raise DomainError("empty digit word")
    return _word_data(word)[0]


DEFAULT_PSI_TOL = Fraction(1, 2 ** 60)


def psi_limit(digits: Iterable[SignDigit], tol: Fraction = DEFAULT_PSI_TOL) -> Fraction:
    """Sum digits until the rigorous tail bound prod 1/(d_i(d_i-1)) drops below tol."""
    partial = Fraction(0)
    prod = 1
    sign = 1
    seen = False
    for s, d in digits:
        seen = True
        prod *= d * (d - 1)
        partial += sign * Fraction(d - 1 + s, prod)
        sign *= -1 if s else 1
        if Fraction(1, prod) < tol:
            break
    if not seen:
        raise DomainError("empty digit sequence")
    return partial


def psi_periodic(preperiod: Sequence[SignDigit], period: Sequence[SignDigit]) -> Fraction:
    """Exact value of an eventually periodic expansion via geometric closure."""
    if not period:
        raise DomainError("period must be nonempty")
    s_per, w_per, sig_per = _word_data(period)
    # y = S + sig/W * y  =>  y = S*W/(W - sig)
    y = s_per * w_per / (w_per - sig_per)
    if not preperiod:
        return y
    s_pre, w_pre, sig_pre = _word_data(preperiod)
    return s_pre + Fraction(sig_pre, w_pre) * y


def convergent(word: Sequence[SignDigit]) -> Tuple[int, int]:
    """(p_n, q_n) with q_n = (d_n - s_n) prod_{i<n} d_i(d_i-1); p_n/q_n = psi_prefix(word)."""
    if not word:
        raise DomainError("empty digit word")
    partial, prod, _ = _word_data(word)
    s, d = word[-1]
    q_n = (d - s) * (prod // (d * (d - 1)))
    p_n = partial * q_n
    assert p_n.denominator == 1
    return p_n.numerator, q_n
