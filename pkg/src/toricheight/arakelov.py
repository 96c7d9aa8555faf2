"""Toric metrized divisors on the projective line over Q.

A divisor supported at the two toric points is a coefficient pair
(a0, a_inf) with nonnegative degree a0 + a_inf (nef) and polytope
[-a0, a_inf].  A torus-invariant metric is encoded by its metric function
psi(u) = log ||s_D|| read along the torus in the coordinate u = -log|z|;
matching ray slopes (a_inf toward -inf, -a0 toward +inf) are exactly the
boundedness condition against the canonical metric, and the metric is
semipositive iff psi is concave.  Finite places carry the canonical metric
and contribute nothing, so they are not represented.

Two independent routes to the same number are kept deliberately:

* ``height`` uses the difference formula against the canonical reference
  (pairing psi - psi_can with the sum of the two curvature measures), and
* ``height_semipositive`` / ``chi_volume`` integrate the roof function,
  the concave conjugate of psi over the polytope.

Their agreement on concave inputs is the central consistency check of the
whole package, and the gap chi_volume - height equals the Dirichlet energy
of psi minus its concave envelope, which is the mechanism behind the
height-vs-volume inequality this package verifies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .convex import (
    _segment_energy,
    concave_conjugate,
    second_derivative_measure,
    upper_concave_envelope,
)
from .errors import NotSemipositive, OutsidePolytope
from .pwl import AtomicMeasure, Interval, PwlFunction, linear_combination

#: half-width and point count of the default sampling window for smooth
#: metrics; metric functions approach their rays exponentially fast, so
#: [-20, 20] already holds the Fubini-Study residual below 1e-17.
DEFAULT_HALF_WIDTH = 20.0
DEFAULT_GRID_POINTS = 4001


@dataclass(frozen=True)
class ToricDivisor:
    """Coefficient pair at the toric points 0 and infinity; must be nef."""

    a0: float
    a_inf: float

    def __post_init__(self):
        object.__setattr__(self, "a0", float(self.a0) + 0.0)  # +0.0 kills -0.0
        object.__setattr__(self, "a_inf", float(self.a_inf) + 0.0)
        if not (math.isfinite(self.a0) and math.isfinite(self.a_inf)):
            raise ValueError("divisor coefficients must be finite")
        if self.a0 + self.a_inf < 0.0:
            raise ValueError(
                f"divisor ({self.a0}, {self.a_inf}) has negative degree"
            )

    @property
    def degree(self) -> float:
        return self.a0 + self.a_inf

    @property
    def polytope(self) -> Interval:
        return Interval(-self.a0, self.a_inf)

    def __sub__(self, other: "ToricDivisor") -> "ToricDivisor":
        return ToricDivisor(self.a0 - other.a0, self.a_inf - other.a_inf)

    def __add__(self, other: "ToricDivisor") -> "ToricDivisor":
        return ToricDivisor(self.a0 + other.a0, self.a_inf + other.a_inf)


@dataclass(frozen=True)
class MetricFunction:
    """A toric divisor with a metric function psi along the torus.

    The ray slopes of psi must equal (a_inf, -a0) exactly; this pins the
    metric to the divisor and makes psi - psi_can bounded.
    """

    divisor: ToricDivisor
    psi: PwlFunction

    def __post_init__(self):
        want = (self.divisor.a_inf, -self.divisor.a0)
        got = (self.psi.slope_neg_inf, self.psi.slope_pos_inf)
        if got != want:
            raise ValueError(
                f"psi ray slopes {got} do not match divisor slopes {want}"
            )

    @property
    def degree(self) -> float:
        return self.divisor.degree


def is_semipositive(m: MetricFunction) -> bool:
    """True iff psi is concave (slopes nonincreasing, tiny rounding slack)."""
    return m.psi.is_concave()


@dataclass(frozen=True)
class RoofFunction:
    """Concave conjugate of a metric function, carried on the polytope.

    ``theta`` is stored as the global piecewise-linear extension whose end
    segments continue as rays; only its restriction to ``domain`` is the
    roof.
    """

    domain: Interval
    theta: PwlFunction


@dataclass(frozen=True)
class HeightReport:
    """Height, chi-volume and the diagnostic identities for one metric."""

    height: float
    chi_volume: float
    gap: float
    orthogonality_residual: float
    energy: float

    def to_dict(self) -> dict:
        return {
            "height": self.height,
            "chi_volume": self.chi_volume,
            "gap": self.gap,
            "orthogonality_residual": self.orthogonality_residual,
            "energy": self.energy,
        }


# -- basic metrics ---------------------------------------------------------


def canonical_metric(D: ToricDivisor) -> MetricFunction:
    """Metric whose function is inf_{x in polytope} x*u = min(-a0*u, a_inf*u).

    Its roof is identically zero and its height is zero; it is the reference
    of the height difference formula.
    """
    return MetricFunction(D, PwlFunction((0.0,), (0.0,), D.a_inf, -D.a0))


def scale_metric(m: MetricFunction, c: float) -> MetricFunction:
    """Shift psi down by c (the metric is scaled by exp(-c) when c > 0)."""
    return MetricFunction(m.divisor, m.psi.shift(-float(c)))


def default_grid(
    half_width: float = DEFAULT_HALF_WIDTH, points: int = DEFAULT_GRID_POINTS
) -> tuple[float, ...]:
    """Symmetric sampling grid, uniform in the angle atan(sinh u).

    Metric-function curvature on the line decays like sech^2, so spacing
    uniformly in gd(u) = atan(sinh u) equalizes the interpolation error
    across the window; a uniform grid of the same size is about two orders
    of magnitude worse at the center.
    """
    half_width = float(half_width)
    points = int(points)
    if half_width <= 0 or points < 2:
        raise ValueError("need half_width > 0 and points >= 2")
    s_max = math.atan(math.sinh(half_width))
    n = points - 1
    grid = []
    for i in range(points):
        s = s_max * (2 * i - n) / n
        grid.append(math.asinh(math.tan(s)))
    return tuple(grid)


def _fubini_study_psi(u: float) -> float:
    # -(1/2) log(1 + exp(-2u)), split for numeric stability on both tails
    if u >= 0:
        return -0.5 * math.log1p(math.exp(-2.0 * u))
    return u - 0.5 * math.log1p(math.exp(2.0 * u))


def fubini_study_metric(grid: tuple[float, ...] | None = None) -> MetricFunction:
    """Fubini-Study metric on the divisor (0, 1), sampled to PWL.

    The smooth model is psi(u) = -(1/2) log(1 + exp(-2u)); its roof is the
    half binary entropy x -> -(x log x + (1-x) log(1-x)) / 2 and both its
    height and chi-volume equal 1/2.
    """
    if grid is None:
        grid = default_grid()
    psi = PwlFunction.from_samples(_fubini_study_psi, grid, 1.0, 0.0)
    return MetricFunction(ToricDivisor(0.0, 1.0), psi)


# -- the theorem pipeline ----------------------------------------------------


def equilibrium(m: MetricFunction) -> MetricFunction:
    """Replace psi by its upper concave envelope; output is semipositive.

    Idempotent, fixes semipositive inputs, and never lowers psi.
    """
    return MetricFunction(m.divisor, upper_concave_envelope(m.psi))


def roof(m: MetricFunction) -> RoofFunction:
    """Concave conjugate of psi on the polytope.

    Unchanged when m is replaced by equilibrium(m): conjugation only sees
    the envelope.
    """
    domain = m.divisor.polytope
    return RoofFunction(domain, concave_conjugate(m.psi, domain))


def chi_volume(m: MetricFunction) -> float:
    """chi-arithmetic volume: twice the integral of the roof over the polytope."""
    r = roof(m)
    return 2.0 * r.theta.integrate(r.domain)


def ma_measure(m: MetricFunction) -> AtomicMeasure:
    """Monge-Ampere measure of the metric pushed to the u-line.

    The second-derivative measure of psi: atoms at the kinks with mass equal
    to the slope drop.  Total mass is the degree; nonnegative iff the metric
    is semipositive.
    """
    return second_derivative_measure(m.psi)


def height(m: MetricFunction) -> float:
    """Height via the difference formula against the canonical reference.

    height(m) = - sum (psi - psi_can)(p) * mass(p) over the atoms of
    ma_measure(m) + ma_measure(canonical); the canonical height is zero.
    Exact for piecewise-linear metrics; agrees with height_semipositive on
    concave inputs.
    """
    can = canonical_metric(m.divisor)
    mu = ma_measure(m) + ma_measure(can)
    diff = linear_combination(m.psi, can.psi, 1.0, -1.0)
    return 0.0 - mu.integrate(diff)


def height_semipositive(m: MetricFunction) -> float:
    """Height of a semipositive metric through the roof-integral route."""
    if not is_semipositive(m):
        raise NotSemipositive("psi is not concave")
    return chi_volume(m)


def section_sup_log_norm(m: MetricFunction, k: int, lattice_point: float) -> float:
    """log of the sup norm of the monomial section of the k-th power.

    Returns sup_u (k*psi(u) - lattice_point*u), which is finite exactly when
    lattice_point/k lies in the polytope (:class:`OutsidePolytope`
    otherwise), equals -k*theta(lattice_point/k), and is unchanged when m is
    replaced by equilibrium(m).
    """
    k = int(k)
    if k < 1:
        raise ValueError("k must be a positive integer")
    p = float(lattice_point)
    if not m.divisor.polytope.contains(p / k, slack=1e-12):
        raise OutsidePolytope(
            f"{p}/{k} outside [{-m.divisor.a0}, {m.divisor.a_inf}]"
        )
    psi = m.psi
    return max(k * v - p * u for u, v in zip(psi.breakpoints, psi.values))


def mollify(m: MetricFunction, width: float) -> MetricFunction:
    """Symmetric two-point smoothing: psi(u) -> (psi(u-w) + psi(u+w)) / 2.

    Convolution of psi with the symmetric probability kernel supported at
    -width and +width; the result is piecewise linear on the union of the
    shifted breakpoints, keeps the asymptotic slopes, preserves concavity,
    and fixes affine functions.  The sup distance to the original is at most
    width times the largest absolute slope, and shrinks to 0 with the width.
    """
    w = float(width)
    if not (w > 0.0 and math.isfinite(w)):
        raise ValueError("width must be a positive real")
    psi = m.psi
    if len(psi.breakpoints) == 1 and psi.slope_neg_inf == psi.slope_pos_inf:
        return m  # affine: smoothing is the identity
    candidates = sorted(
        {p - w for p in psi.breakpoints} | {p + w for p in psi.breakpoints}
    )
    # Collapse breakpoints that only differ by accumulated rounding; a sliver
    # segment would otherwise produce garbage slopes.
    nodes: list[float] = []
    for x in candidates:
        if nodes and x - nodes[-1] < 1e-9:
            continue
        nodes.append(x)
    vals = tuple(0.5 * (psi(x - w) + psi(x + w)) for x in nodes)
    smoothed = PwlFunction(
        tuple(nodes), vals, psi.slope_neg_inf, psi.slope_pos_inf
    )
    return MetricFunction(m.divisor, smoothed)


def dsp_split(m: MetricFunction) -> tuple[MetricFunction, MetricFunction]:
    """Write m as a difference of two semipositive metrics.

    psi2 is the concave function whose second-derivative measure is the
    negative part of ma_measure(m), flat to the left and anchored to vanish
    at the leftmost negative atom; psi1 = psi + psi2 is then concave and
    psi = psi1 - psi2 with D = D1 - D2, both divisors nef.  A semipositive
    input returns (m, zero metric on the degree-zero divisor).
    """
    neg = ma_measure(m).negative_part()
    if not neg.atoms:
        zero = MetricFunction(
            ToricDivisor(0.0, 0.0), PwlFunction((0.0,), (0.0,), 0.0, 0.0)
        )
        return m, zero
    positions = [p for p, _ in neg.atoms]
    masses = [mass for _, mass in neg.atoms]
    total = math.fsum(masses)
    vals = [0.0]
    slope = 0.0
    for i in range(len(positions) - 1):
        slope -= masses[i]
        vals.append(vals[-1] + slope * (positions[i + 1] - positions[i]))
    psi2 = PwlFunction(tuple(positions), tuple(vals), 0.0, -total)
    d2 = ToricDivisor(total, 0.0)
    psi1 = linear_combination(m.psi, psi2, 1.0, 1.0)
    m1 = MetricFunction(m.divisor + d2, psi1)
    m2 = MetricFunction(d2, psi2)
    return m1, m2


def verify(m: MetricFunction) -> HeightReport:
    """Height, chi-volume, their gap, and the two supporting diagnostics.

    The gap chi_volume - height is nonnegative, the curvature of the
    equilibrium metric charges only the contact set (orthogonality residual
    zero), and the gap equals the Dirichlet energy of psi minus its
    envelope.  The gap-energy equality is a consequence of the formulas
    implemented here, strictly stronger than the inequality it certifies.
    """
    h = height(m)
    vol = chi_volume(m)
    eq = equilibrium(m)
    g = linear_combination(m.psi, eq.psi, 1.0, -1.0)  # <= 0, derivative compact
    orth = abs(ma_measure(eq).integrate(g))
    energy = _segment_energy(g)
    return HeightReport(
        height=h,
        chi_volume=vol,
        gap=vol - h,
        orthogonality_residual=orth,
        energy=energy,
    )


def metric_spec_dict(m: MetricFunction) -> dict:
    """Serializable description of a metric, in the CLI's spec schema."""
    return {
        "divisor": {"a0": m.divisor.a0, "a_inf": m.divisor.a_inf},
        "metric": {
            "type": "pwl",
            "breakpoints": list(m.psi.breakpoints),
            "values": list(m.psi.values),
        },
    }
