"""Randomized metric generation and batch verification suites.

Every identity the package claims is exercised here over seeded random
families: the height-vs-volume gap, equality on semipositive metrics, roof
invariance under the equilibrium operation, height domination,
orthogonality of the equilibrium curvature to the non-contact region, the
gap-energy identity, scaling covariance, sup-norm consistency and mass
conservation.  Per-trial randomness is derived from seed XOR trial index,
so results do not depend on execution order and equal configs produce
byte-identical reports.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass

from .arakelov import (
    MetricFunction,
    ToricDivisor,
    chi_volume,
    equilibrium,
    height,
    is_semipositive,
    ma_measure,
    metric_spec_dict,
    mollify,
    roof,
    scale_metric,
    section_sup_log_norm,
    verify,
)
from .pwl import Interval, PwlFunction, sup_distance

CHECK_NAMES = (
    "gap",
    "semipositive_equality",
    "roof_invariance",
    "height_domination",
    "orthogonality",
    "energy_identity",
    "scaling_covariance",
    "sup_norm",
    "mass",
)

#: at most this many failing cases are serialized per check
MAX_FAILURES_KEPT = 10

#: kink positions are drawn in this window; keeps conditioning mild
POSITION_BOUND = 10.0


@dataclass(frozen=True)
class SuiteConfig:
    """Trial count, seed, generator ranges and the tolerance set."""

    trials: int = 1000
    seed: int = 42
    degree_range: Interval = Interval(0.0, 5.0)
    kink_range: tuple[int, int] = (1, 12)
    exact_tol: float = 1e-10      # exact-PWL identities
    gap_floor: float = 1e-9       # allowed rounding below gap >= 0
    energy_rel_tol: float = 1e-9  # relative gap-energy agreement
    mass_tol: float = 1e-12
    smooth_tol: float = 1e-6      # sampled smooth fixtures

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        lo, hi = self.kink_range
        if not (1 <= lo <= hi):
            raise ValueError("kink_range must be 1 <= lo <= hi")
        if self.degree_range.lo < 0:
            raise ValueError("degrees must be nonnegative")
        for tol in (self.exact_tol, self.gap_floor, self.energy_rel_tol,
                    self.mass_tol, self.smooth_tol):
            if not tol > 0:
                raise ValueError("tolerances must be positive")

    def tolerance(self, check: str) -> float:
        return {
            "gap": self.gap_floor,
            "semipositive_equality": self.exact_tol,
            "roof_invariance": 0.0,  # bit-exact by construction
            "height_domination": self.exact_tol,
            "orthogonality": self.exact_tol,
            "energy_identity": self.energy_rel_tol,
            "scaling_covariance": self.exact_tol,
            "sup_norm": self.exact_tol,
            "mass": self.mass_tol,
        }[check]

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "degree_range": [self.degree_range.lo, self.degree_range.hi],
            "kink_range": list(self.kink_range),
            "exact_tol": self.exact_tol,
            "gap_floor": self.gap_floor,
            "energy_rel_tol": self.energy_rel_tol,
            "mass_tol": self.mass_tol,
            "smooth_tol": self.smooth_tol,
        }


@dataclass(frozen=True)
class CheckStat:
    passes: int
    worst_residual: float
    failing_cases: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "passes": self.passes,
            "worst_residual": self.worst_residual,
            "failing_cases": list(self.failing_cases),
        }


@dataclass(frozen=True)
class SuiteReport:
    """Aggregated pass counts and worst residuals for one suite run."""

    config: SuiteConfig
    checks: dict

    @property
    def total_failures(self) -> int:
        return sum(self.config.trials - s.passes for s in self.checks.values())

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "total_failures": self.total_failures,
            "checks": {name: stat.to_dict() for name, stat in self.checks.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


# -- generators --------------------------------------------------------------


def _distinct_positions(rng: random.Random, count: int) -> list[float]:
    while True:
        pos = sorted(rng.uniform(-POSITION_BOUND, POSITION_BOUND) for _ in range(count))
        if all(b - a > 1e-6 for a, b in zip(pos, pos[1:])):
            return pos


def _integrate_slopes(positions, anchor_value, interior_slopes):
    vals = [anchor_value]
    for i in range(len(positions) - 1):
        vals.append(vals[-1] + interior_slopes[i] * (positions[i + 1] - positions[i]))
    return vals


def random_semipositive(D: ToricDivisor, kinks: int, seed: int) -> MetricFunction:
    """Concave metric with the exact ray-slope invariants; deterministic in seed.

    Draws sorted kink positions, a decreasing interior slope sequence between
    a_inf and -a0, and an anchor value, then integrates.
    """
    if kinks < 1:
        raise ValueError("kinks must be >= 1")
    rng = random.Random(seed)
    positions = _distinct_positions(rng, kinks)
    anchor = rng.uniform(-2.0, 2.0)
    lo, hi = -D.a0, D.a_inf
    interior = sorted((rng.uniform(lo, hi) for _ in range(kinks - 1)), reverse=True)
    vals = _integrate_slopes(positions, anchor, interior)
    psi = PwlFunction(tuple(positions), tuple(vals), D.a_inf, -D.a0)
    return MetricFunction(D, psi)


def random_dsp(D: ToricDivisor, kinks: int, seed: int) -> MetricFunction:
    """Metric with correct ray slopes but unconstrained interior slope order.

    Interior slopes are drawn in [-a0, a_inf] without sorting, so the result
    is generally neither concave nor convex; dsp_split succeeds on every
    output.  Deterministic in seed.
    """
    if kinks < 1:
        raise ValueError("kinks must be >= 1")
    rng = random.Random(seed)
    positions = _distinct_positions(rng, kinks)
    anchor = rng.uniform(-2.0, 2.0)
    lo, hi = -D.a0, D.a_inf
    interior = [rng.uniform(lo, hi) for _ in range(kinks - 1)]
    vals = _integrate_slopes(positions, anchor, interior)
    psi = PwlFunction(tuple(positions), tuple(vals), D.a_inf, -D.a0)
    return MetricFunction(D, psi)


# -- per-metric check battery -------------------------------------------------


def _roof_mismatch(r1, r2) -> float:
    if r1.domain != r2.domain:
        return math.inf
    try:
        return sup_distance(r1.theta, r2.theta)
    except Exception:
        return math.inf


def check_metric(
    m: MetricFunction,
    *,
    scale_c: float = 0.3,
    section_k: int = 2,
    section_x: float = 0.5,
) -> dict:
    """Residuals of every suite check for one metric (0.0 means exact).

    ``section_x`` picks the sup-norm sample point at relative position
    section_x inside the polytope of the k-th power.
    """
    rep = verify(m)
    eq = equilibrium(m)
    residuals = {}
    residuals["gap"] = max(0.0, -rep.gap)

    semis = [eq] + ([m] if is_semipositive(m) else [])
    residuals["semipositive_equality"] = max(
        abs(height(s) - chi_volume(s)) for s in semis
    )

    r_m, r_eq = roof(m), roof(eq)
    residuals["roof_invariance"] = (
        0.0 if (r_m.domain == r_eq.domain and r_m.theta == r_eq.theta)
        else _roof_mismatch(r_m, r_eq)
    )

    residuals["height_domination"] = max(0.0, rep.height - height(eq))
    residuals["orthogonality"] = rep.orthogonality_residual
    residuals["energy_identity"] = abs(rep.gap - rep.energy) / max(1.0, abs(rep.energy))

    scaled = scale_metric(m, scale_c)
    target = 2.0 * scale_c * m.degree
    residuals["scaling_covariance"] = max(
        abs((height(scaled) - rep.height) - target),
        abs((chi_volume(scaled) - rep.chi_volume) - target),
    )

    poly = m.divisor.polytope
    x = poly.lo + section_x * poly.length
    p = x * section_k
    s = section_sup_log_norm(m, section_k, p)
    residuals["sup_norm"] = max(
        abs(s + section_k * r_m.theta(p / section_k)),
        abs(s - section_sup_log_norm(eq, section_k, p)),
    )

    residuals["mass"] = abs(ma_measure(m).total_mass - m.degree)
    return residuals


def run_suite(config: SuiteConfig) -> SuiteReport:
    """Run the full check battery over ``config.trials`` random metric pairs.

    Each trial draws one divisor and one (semipositive, dsp) metric pair
    from random.Random(seed XOR trial); a trial passes a check when the
    worst residual over the pair is within the check's tolerance.
    """
    passes = {name: 0 for name in CHECK_NAMES}
    worst = {name: 0.0 for name in CHECK_NAMES}
    failures = {name: [] for name in CHECK_NAMES}

    for trial in range(config.trials):
        rng = random.Random(config.seed ^ trial)
        deg = rng.uniform(config.degree_range.lo, config.degree_range.hi)
        if trial % 25 == 0:
            deg = config.degree_range.lo  # cover the degenerate edge exactly
        a0 = rng.uniform(-2.0, 2.0)
        divisor = ToricDivisor(a0, deg - a0)
        kinks = rng.randint(*config.kink_range)
        seed_semi = rng.getrandbits(32)
        seed_dsp = rng.getrandbits(32)
        scale_c = rng.uniform(-1.0, 1.0)
        section_k = rng.randint(1, 6)
        section_x = rng.random()

        metrics = (
            random_semipositive(divisor, kinks, seed_semi),
            random_dsp(divisor, kinks, seed_dsp),
        )
        trial_res = {name: 0.0 for name in CHECK_NAMES}
        for m in metrics:
            res = check_metric(
                m, scale_c=scale_c, section_k=section_k, section_x=section_x
            )
            for name in CHECK_NAMES:
                trial_res[name] = max(trial_res[name], res[name])

        for name in CHECK_NAMES:
            worst[name] = max(worst[name], trial_res[name])
            if trial_res[name] <= config.tolerance(name):
                passes[name] += 1
            elif len(failures[name]) < MAX_FAILURES_KEPT:
                failures[name].append(
                    json.dumps(
                        {
                            "trial": trial,
                            "residual": trial_res[name],
                            "cases": [metric_spec_dict(m) for m in metrics],
                        },
                        sort_keys=True,
                    )
                )

    checks = {
        name: CheckStat(passes[name], worst[name], tuple(failures[name]))
        for name in CHECK_NAMES
    }
    return SuiteReport(config, checks)


# -- mollification convergence -------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    width: float
    sup_distance: float
    height: float
    chi_volume: float

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "sup_distance": self.sup_distance,
            "height": self.height,
            "chi_volume": self.chi_volume,
        }


def convergence_study(m: MetricFunction, widths) -> tuple[ConvergenceRow, ...]:
    """Mollify m at each width and tabulate distance, height and volume.

    ``widths`` must be positive and strictly decreasing; the exact values of
    the unsmoothed metric are appended as the width-0 limit row.  On
    semipositive metrics every row obeys
    |height(row) - height(m)| <= 4 * degree * sup_distance(row).
    """
    widths = [float(w) for w in widths]
    if not widths:
        raise ValueError("need at least one width")
    if any(w <= 0 for w in widths):
        raise ValueError("widths must be positive")
    if any(b >= a for a, b in zip(widths, widths[1:])):
        raise ValueError("widths must be strictly decreasing")
    rows = []
    for w in widths:
        mw = mollify(m, w)
        rows.append(
            ConvergenceRow(
                width=w,
                sup_distance=sup_distance(mw.psi, m.psi),
                height=height(mw),
                chi_volume=chi_volume(mw),
            )
        )
    rows.append(ConvergenceRow(0.0, 0.0, height(m), chi_volume(m)))
    return tuple(rows)
