"""Exact piecewise-linear functions and atomic signed measures on the line.

A :class:`PwlFunction` is a globally defined real function: linear
interpolation between finitely many breakpoints and linear rays beyond the
first and last breakpoint with prescribed asymptotic slopes.  Every quantity
computed downstream (envelopes, conjugates, second-derivative measures,
integrals, heights) reduces to closed-form arithmetic on this data, which is
what makes the identity suites testable at near machine precision.

Values are IEEE doubles throughout; there is no symbolic or rational path.
All objects are immutable after construction and all operations are pure.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import NonFiniteSample, SlopeMismatch

# Kinks whose left and right slopes differ by less than this are merged on
# construction.  Keeps second-derivative measures free of spurious atoms.
KINK_MERGE_TOL = 1e-14

# Atoms below this absolute mass are dropped when measures are built/combined.
MASS_TOL = 1e-14


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi]; lo == hi is allowed (a point)."""

    lo: float
    hi: float

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo) + 0.0)  # +0.0 kills -0.0
        object.__setattr__(self, "hi", float(self.hi) + 0.0)
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("interval endpoints must be finite")
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= x <= self.hi + slack


@dataclass(frozen=True)
class AtomicMeasure:
    """Signed measure given by finitely many point masses.

    Positions are strictly increasing and every stored mass has absolute
    value at least ``MASS_TOL``; smaller atoms are dropped on construction.
    """

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        cleaned = []
        last = None
        for pos, mass in self.atoms:
            pos, mass = float(pos), float(mass)
            if not (math.isfinite(pos) and math.isfinite(mass)):
                raise ValueError("atom positions and masses must be finite")
            if last is not None and pos <= last:
                raise ValueError("atom positions must be strictly increasing")
            last = pos
            if abs(mass) >= MASS_TOL:
                cleaned.append((pos, mass + 0.0))
        object.__setattr__(self, "atoms", tuple(cleaned))

    @property
    def total_mass(self) -> float:
        return math.fsum(m for _, m in self.atoms)

    @property
    def total_variation(self) -> float:
        return math.fsum(abs(m) for _, m in self.atoms)

    def __add__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        merged: dict[float, float] = {}
        for pos, mass in self.atoms + other.atoms:
            merged[pos] = merged.get(pos, 0.0) + mass
        return AtomicMeasure(tuple(sorted(merged.items())))

    def __neg__(self) -> "AtomicMeasure":
        return AtomicMeasure(tuple((p, -m) for p, m in self.atoms))

    def __sub__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        return self + (-other)

    def positive_part(self) -> "AtomicMeasure":
        return AtomicMeasure(tuple(a for a in self.atoms if a[1] > 0))

    def negative_part(self) -> "AtomicMeasure":
        """Jordan negative part, returned as a nonnegative measure."""
        return AtomicMeasure(tuple((p, -m) for p, m in self.atoms if m < 0))

    def integrate(self, f: "PwlFunction") -> float:
        """Pairing sum(f(pos) * mass); exact because f is evaluated at nodes."""
        return math.fsum(f(p) * m for p, m in self.atoms)


def _merge_pass(pts: list[tuple[float, float]], s_neg: float, s_pos: float):
    """Drop every breakpoint whose left and right slopes agree within tolerance."""
    slopes = [s_neg]
    for (u0, v0), (u1, v1) in zip(pts, pts[1:]):
        slopes.append((v1 - v0) / (u1 - u0))
    slopes.append(s_pos)
    kept = [pts[i] for i in range(len(pts)) if abs(slopes[i] - slopes[i + 1]) >= KINK_MERGE_TOL]
    return kept


@dataclass(frozen=True)
class PwlFunction:
    """Piecewise-linear function with explicit asymptotic ray slopes.

    ``slope_neg_inf`` is the slope of the ray toward u -> -inf and
    ``slope_pos_inf`` the slope toward u -> +inf.  Instances are canonical:
    no breakpoint has equal left and right slopes (redundant kinks are merged
    on construction, and a globally affine function is normalized to a single
    breakpoint at u = 0).  Canonical form makes equality field-by-field.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]
    slope_neg_inf: float
    slope_pos_inf: float

    def __post_init__(self):
        bps = tuple(float(u) + 0.0 for u in self.breakpoints)  # +0.0 kills -0.0
        vals = tuple(float(v) + 0.0 for v in self.values)
        s_neg = float(self.slope_neg_inf) + 0.0
        s_pos = float(self.slope_pos_inf) + 0.0
        if len(bps) == 0:
            raise ValueError("need at least one breakpoint")
        if len(bps) != len(vals):
            raise ValueError("breakpoints and values must have equal length")
        if not all(math.isfinite(x) for x in bps + vals + (s_neg, s_pos)):
            raise ValueError("breakpoints, values and slopes must be finite")
        if any(nxt <= prev for prev, nxt in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")

        pts = list(zip(bps, vals))
        while len(pts) > 1:
            kept = _merge_pass(pts, s_neg, s_pos)
            if not kept:
                # Every kink is below tolerance: the function is affine.
                pts = pts[:1]
                break
            if len(kept) == len(pts):
                break
            pts = kept
        if len(pts) == 1 and abs(s_neg - s_pos) < KINK_MERGE_TOL:
            # Affine function: normalize the breakpoint to u = 0.
            u0, v0 = pts[0]
            pts = [(0.0, v0 - s_neg * u0 + 0.0)]

        object.__setattr__(self, "breakpoints", tuple(p for p, _ in pts))
        object.__setattr__(self, "values", tuple(v for _, v in pts))
        object.__setattr__(self, "slope_neg_inf", s_neg)
        object.__setattr__(self, "slope_pos_inf", s_pos)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_samples(
        cls,
        h: Callable[[float], float],
        grid: Sequence[float],
        slope_neg_inf: float,
        slope_pos_inf: float,
    ) -> "PwlFunction":
        """Piecewise-linear interpolant of ``h`` on ``grid`` with ray slopes.

        Raises :class:`NonFiniteSample` if any sampled value is NaN/inf.
        """
        grid = [float(u) for u in grid]
        if len(grid) < 2:
            raise ValueError("grid needs at least 2 points")
        vals = []
        for u in grid:
            y = float(h(u))
            if not math.isfinite(y):
                raise NonFiniteSample(f"h({u}) = {y}")
            vals.append(y)
        return cls(tuple(grid), tuple(vals), slope_neg_inf, slope_pos_inf)

    @classmethod
    def constant(cls, c: float) -> "PwlFunction":
        return cls((0.0,), (float(c),), 0.0, 0.0)

    # -- evaluation -------------------------------------------------------

    def __call__(self, u: float) -> float:
        return self.evaluate(u)

    def evaluate(self, u: float) -> float:
        """Interpolated or ray value; returns stored values exactly at nodes."""
        u = float(u)
        bps, vals = self.breakpoints, self.values
        i = bisect.bisect_left(bps, u)
        if i < len(bps) and bps[i] == u:
            return vals[i]
        if i == 0:
            return vals[0] + self.slope_neg_inf * (u - bps[0])
        if i == len(bps):
            return vals[-1] + self.slope_pos_inf * (u - bps[-1])
        u0, u1 = bps[i - 1], bps[i]
        v0, v1 = vals[i - 1], vals[i]
        # ratio first: exact whenever (u - u0)/(u1 - u0) is representable
        return v0 + (v1 - v0) * ((u - u0) / (u1 - u0))

    def segment_slopes(self) -> tuple[float, ...]:
        """Slopes of the bounded segments between consecutive breakpoints."""
        return tuple(
            (v1 - v0) / (u1 - u0)
            for (u0, v0), (u1, v1) in zip(
                zip(self.breakpoints, self.values),
                zip(self.breakpoints[1:], self.values[1:]),
            )
        )

    def all_slopes(self) -> tuple[float, ...]:
        """Ray and segment slopes, left to right."""
        return (self.slope_neg_inf,) + self.segment_slopes() + (self.slope_pos_inf,)

    @property
    def span(self) -> Interval:
        return Interval(self.breakpoints[0], self.breakpoints[-1])

    def is_concave(self, slack: float = 1e-12) -> bool:
        slopes = self.all_slopes()
        return all(a >= b - slack for a, b in zip(slopes, slopes[1:]))

    # -- calculus ---------------------------------------------------------

    def integrate(self, window: Interval) -> float:
        """Exact integral over ``window`` (trapezoid rule is exact on PWL)."""
        lo, hi = window.lo, window.hi
        if lo == hi:
            return 0.0
        nodes = [lo] + [u for u in self.breakpoints if lo < u < hi] + [hi]
        vals = [self.evaluate(u) for u in nodes]
        return math.fsum(
            0.5 * (va + vb) * (b - a)
            for a, b, va, vb in zip(nodes, nodes[1:], vals, vals[1:])
        )

    # -- algebra ----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, PwlFunction):
            return linear_combination(self, other, 1.0, 1.0)
        return self.shift(float(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, PwlFunction):
            return linear_combination(self, other, 1.0, -1.0)
        return self.shift(-float(other))

    def __mul__(self, scalar):
        scalar = float(scalar)
        return PwlFunction(
            self.breakpoints,
            tuple(scalar * v for v in self.values),
            scalar * self.slope_neg_inf,
            scalar * self.slope_pos_inf,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def shift(self, c: float) -> "PwlFunction":
        """Add the constant c to every value; slopes are untouched."""
        return PwlFunction(
            self.breakpoints,
            tuple(v + c for v in self.values),
            self.slope_neg_inf,
            self.slope_pos_inf,
        )


def linear_combination(f: PwlFunction, g: PwlFunction, alpha: float, beta: float) -> PwlFunction:
    """Exact alpha*f + beta*g on the merged breakpoint set."""
    alpha, beta = float(alpha), float(beta)
    merged = sorted(set(f.breakpoints) | set(g.breakpoints))
    vals = tuple(alpha * f(u) + beta * g(u) for u in merged)
    return PwlFunction(
        tuple(merged),
        vals,
        alpha * f.slope_neg_inf + beta * g.slope_neg_inf,
        alpha * f.slope_pos_inf + beta * g.slope_pos_inf,
    )


def sup_distance(f: PwlFunction, g: PwlFunction) -> float:
    """Exact sup |f - g|, attained at a breakpoint of f - g.

    Requires identical asymptotic slopes, otherwise the supremum is infinite
    and :class:`SlopeMismatch` is raised.
    """
    if f.slope_neg_inf != g.slope_neg_inf or f.slope_pos_inf != g.slope_pos_inf:
        raise SlopeMismatch(
            f"asymptotic slopes differ: ({f.slope_neg_inf}, {f.slope_pos_inf}) "
            f"vs ({g.slope_neg_inf}, {g.slope_pos_inf})"
        )
    diff = linear_combination(f, g, 1.0, -1.0)
    return max(abs(v) for v in diff.values)
