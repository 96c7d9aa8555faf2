"""Concave envelopes, concave conjugates, second-derivative measures.

Conventions used throughout the package: a metric function is concave iff
the metric is semipositive, the equilibrium operation replaces a function by
its smallest concave majorant with the same asymptotic slopes, and
second-derivative measures carry positive mass at concave kinks (mass = left
slope minus right slope), so the measure of a concave function is
nonnegative with total mass slope_neg_inf - slope_pos_inf.

Both the envelope and the conjugate are driven by one exact primitive: the
upper hull of the breakpoint cloud, clipped to the asymptotic slope window.
Sharing the primitive is what makes "conjugate factors through the envelope"
an identity of floats, not just of reals.
"""

from __future__ import annotations

import math

from .errors import (
    DomainMismatch,
    EnvelopeMismatch,
    NonCompactSupport,
    SlopeOrderViolation,
)
from .pwl import AtomicMeasure, Interval, PwlFunction, linear_combination


def _upper_hull(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Monotone-chain upper hull of points with strictly increasing x.

    Collinear middle points are dropped, so consecutive hull slopes are
    strictly decreasing.
    """
    hull: list[tuple[float, float]] = []
    for p in points:
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0])
            if cross >= 0.0:  # a lies on or below chord o -> p
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def _clipped_hull(f: PwlFunction) -> list[tuple[float, float]]:
    """Hull vertices whose supporting-slope window meets [slope_pos, slope_neg].

    These are exactly the breakpoints of the smallest concave majorant of f
    with asymptotic slopes (slope_neg_inf, slope_pos_inf); vertices whose
    chord slopes fall outside the window are shadowed by the tangent rays.
    """
    s_neg, s_pos = f.slope_neg_inf, f.slope_pos_inf
    hull = _upper_hull(list(zip(f.breakpoints, f.values)))
    # Slope to the left/right of each hull vertex, with sentinels at +-inf.
    slopes = [math.inf]
    for (u0, v0), (u1, v1) in zip(hull, hull[1:]):
        slopes.append((v1 - v0) / (u1 - u0))
    slopes.append(-math.inf)
    return [
        hull[i]
        for i in range(len(hull))
        if slopes[i + 1] <= s_neg and slopes[i] >= s_pos
    ]


def upper_concave_envelope(f: PwlFunction) -> PwlFunction:
    """Smallest concave function >= f with the same asymptotic slopes.

    Computed exactly as the upper hull of the breakpoints of f together with
    its two rays.  The result is concave, majorizes f everywhere, and agrees
    with f at every surviving hull vertex.  Fixes concave inputs exactly.

    Raises :class:`SlopeOrderViolation` when slope_neg_inf < slope_pos_inf,
    since no concave function has increasing asymptotic slopes.
    """
    if f.slope_neg_inf < f.slope_pos_inf:
        raise SlopeOrderViolation(
            f"slope_neg_inf={f.slope_neg_inf} < slope_pos_inf={f.slope_pos_inf}"
        )
    verts = _clipped_hull(f)
    return PwlFunction(
        tuple(u for u, _ in verts),
        tuple(v for _, v in verts),
        f.slope_neg_inf,
        f.slope_pos_inf,
    )


def concave_conjugate(f: PwlFunction, domain: Interval) -> PwlFunction:
    """Concave Legendre conjugate theta(x) = inf_u (x*u - f(u)) on ``domain``.

    ``domain`` must equal the slope range [slope_pos_inf, slope_neg_inf] of
    f, which is exactly where the infimum is finite; anything else raises
    :class:`DomainMismatch`.  The conjugate only sees the concave envelope,
    so conjugate(f) == conjugate(envelope(f)) holds field-by-field.

    The returned function is the global piecewise-linear extension whose end
    segments continue as rays; restricted to ``domain`` it is the conjugate.
    Its breakpoints sit at the interior slopes of the envelope of f.  For a
    degenerate domain (lo == hi) the conjugate is reported as the constant
    inf_u (lo*u - f(u)).
    """
    if (domain.lo, domain.hi) != (f.slope_pos_inf, f.slope_neg_inf):
        raise DomainMismatch(
            f"domain [{domain.lo}, {domain.hi}] != slope range "
            f"[{f.slope_pos_inf}, {f.slope_neg_inf}]"
        )
    if domain.lo == domain.hi:
        x = domain.lo
        c = min(x * u - v for u, v in zip(f.breakpoints, f.values))
        return PwlFunction.constant(c)

    verts = _clipped_hull(f)
    if len(verts) == 1:
        u0, v0 = verts[0]
        # Affine conjugate x*u0 - v0; the constructor normalizes it to u = 0.
        return PwlFunction((0.0,), (-v0,), u0, u0)

    # Vertex i supports exactly the slopes in [sigma_{i+1}, sigma_i]; the
    # conjugate has a kink at each interior sigma, where the active vertex
    # hands over to the next one.
    xs = [
        (v1 - v0) / (u1 - u0)
        for (u0, v0), (u1, v1) in zip(verts, verts[1:])
    ]  # strictly decreasing
    bps = []
    vals = []
    for i in range(len(xs) - 1, -1, -1):
        x = xs[i]
        if bps and x <= bps[-1]:  # consecutive chord slopes rounded together
            continue
        u, v = verts[i + 1]
        bps.append(x)
        vals.append(x * u - v)
    return PwlFunction(tuple(bps), tuple(vals), verts[-1][0], verts[0][0])


def second_derivative_measure(f: PwlFunction) -> AtomicMeasure:
    """Atoms at the kinks of f with mass = left slope - right slope.

    Total mass is slope_neg_inf - slope_pos_inf; all masses are nonnegative
    iff f is concave.
    """
    slopes = f.all_slopes()
    return AtomicMeasure(
        tuple(
            (u, slopes[i] - slopes[i + 1])
            for i, u in enumerate(f.breakpoints)
        )
    )


def contact_set(f: PwlFunction, env: PwlFunction, tol: float) -> list[Interval]:
    """Maximal intervals of the breakpoint span where env - f <= tol.

    ``env`` is expected to be the upper concave envelope of f; if it fails
    to majorize f by more than ``tol`` anywhere, :class:`EnvelopeMismatch`
    is raised.  The two contact rays are reported clamped to the span of f.
    """
    gap = linear_combination(env, f, 1.0, -1.0)  # >= 0 when env majorizes f
    if min(gap.values) < -tol:
        raise EnvelopeMismatch(
            f"claimed envelope dips {-min(gap.values)} below the function"
        )
    span = f.span
    nodes = [span.lo] + [u for u in gap.breakpoints if span.lo < u < span.hi] + [span.hi]
    nodes = sorted(set(nodes))
    out: list[Interval] = []

    def push(lo: float, hi: float):
        if out and lo <= out[-1].hi:
            out[-1] = Interval(out[-1].lo, max(out[-1].hi, hi))
        else:
            out.append(Interval(lo, hi))

    for a, b in zip(nodes, nodes[1:]):
        ga, gb = gap(a), gap(b)
        if ga <= tol and gb <= tol:
            push(a, b)
        elif ga <= tol < gb:
            push(a, a + (tol - ga) * (b - a) / (gb - ga))
        elif gb <= tol < ga:
            push(a + (tol - ga) * (b - a) / (gb - ga), b)
        # else: no contact inside this segment
    if not out and len(nodes) == 1:
        # Degenerate span (single breakpoint).
        if gap(nodes[0]) <= tol:
            out.append(Interval(nodes[0], nodes[0]))
    return out


def _segment_energy(f: PwlFunction) -> float:
    """sum slope^2 * length over bounded segments (rays excluded)."""
    return math.fsum(
        s * s * (u1 - u0)
        for s, u0, u1 in zip(f.segment_slopes(), f.breakpoints, f.breakpoints[1:])
    )


def dirichlet_energy(f: PwlFunction) -> float:
    """Exact integral of (f')^2 for a compactly supported difference.

    Requires both ray slopes and both ray values to vanish, so the integral
    is a finite sum over the bounded segments; it is zero iff f is the zero
    function.  Raises :class:`NonCompactSupport` otherwise.
    """
    if f.slope_neg_inf != 0.0 or f.slope_pos_inf != 0.0:
        raise NonCompactSupport("ray slopes must vanish")
    if f.values[0] != 0.0 or f.values[-1] != 0.0:
        raise NonCompactSupport("ray values must vanish")
    return _segment_energy(f)
