"""Command-line entry point: spec files in, machine-readable reports out.

Metric spec files are JSON with the shape::

    {
      "divisor": {"a0": 0.0, "a_inf": 1.0},
      "metric":  <variant>,
      "grid":    {"half_width": 20.0, "points": 4001}     (optional)
    }

where <variant> is one of::

    {"type": "canonical"}
    {"type": "scaled", "base": <variant>, "c": 0.3}
    {"type": "fubini_study"}                                (divisor (0, 1))
    {"type": "pwl", "breakpoints": [...], "values": [...],
     "slope_neg_inf": a_inf, "slope_pos_inf": -a0}          (slopes optional)
    {"type": "difference", "plus": <full spec>, "minus": <full spec>}
    {"type": "mollified", "base": <variant>, "width": 0.2}

Exit codes: 0 success, 1 a verification check failed beyond tolerance,
2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

from .arakelov import (
    DEFAULT_GRID_POINTS,
    DEFAULT_HALF_WIDTH,
    MetricFunction,
    ToricDivisor,
    canonical_metric,
    chi_volume,
    default_grid,
    equilibrium,
    fubini_study_metric,
    height,
    ma_measure,
    mollify,
    roof,
    scale_metric,
    verify,
)
from .errors import ParseError, ToricHeightError, ValidationError
from .harness import SuiteConfig, convergence_study, run_suite
from .pwl import PwlFunction, linear_combination

_VARIANTS = ("canonical", "scaled", "fubini_study", "pwl", "difference", "mollified")


@dataclass(frozen=True)
class MetricSpec:
    """Validated description of one metric; build() produces the MetricFunction."""

    divisor: ToricDivisor
    metric: dict
    grid: tuple[float, int] | None = None

    def to_dict(self) -> dict:
        out = {
            "divisor": {"a0": self.divisor.a0, "a_inf": self.divisor.a_inf},
            "metric": self.metric,
        }
        if self.grid is not None:
            out["grid"] = {"half_width": self.grid[0], "points": self.grid[1]}
        return out

    def build(self, grid_override: tuple[float, int] | None = None) -> MetricFunction:
        grid = grid_override or self.grid
        return _build_variant(self.metric, self.divisor, grid)


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _check_divisor(data, path, violations) -> ToricDivisor | None:
    if not isinstance(data, dict):
        violations.append(f"{path}: divisor must be an object with a0, a_inf")
        return None
    a0, a_inf = data.get("a0"), data.get("a_inf")
    if not (_is_number(a0) and _is_number(a_inf)):
        violations.append(f"{path}: a0 and a_inf must be finite numbers")
        return None
    if a0 + a_inf < 0:
        violations.append(f"{path}: degree a0 + a_inf = {a0 + a_inf} is negative")
        return None
    return ToricDivisor(float(a0), float(a_inf))


def _check_metric(data, divisor, path, violations) -> dict | None:
    if not isinstance(data, dict) or data.get("type") not in _VARIANTS:
        violations.append(f"{path}: metric type must be one of {_VARIANTS}")
        return None
    t = data["type"]
    if t == "canonical":
        return {"type": "canonical"}
    if t == "fubini_study":
        if (divisor.a0, divisor.a_inf) != (0.0, 1.0):
            violations.append(f"{path}: fubini_study requires divisor (0, 1)")
            return None
        return {"type": "fubini_study"}
    if t == "scaled":
        base = _check_metric(data.get("base"), divisor, path + ".base", violations)
        if not _is_number(data.get("c")):
            violations.append(f"{path}: scaled.c must be a finite number")
            return None
        return None if base is None else {"type": "scaled", "base": base, "c": float(data["c"])}
    if t == "mollified":
        base = _check_metric(data.get("base"), divisor, path + ".base", violations)
        w = data.get("width")
        if not (_is_number(w) and w > 0):
            violations.append(f"{path}: mollified.width must be a positive number")
            return None
        return None if base is None else {"type": "mollified", "base": base, "width": float(w)}
    if t == "pwl":
        bps, vals = data.get("breakpoints"), data.get("values")
        ok = (
            isinstance(bps, list) and isinstance(vals, list)
            and len(bps) == len(vals) and len(bps) >= 1
            and all(_is_number(x) for x in bps) and all(_is_number(x) for x in vals)
        )
        if not ok:
            violations.append(f"{path}: pwl needs equal-length numeric breakpoints/values")
            return None
        if any(b <= a for a, b in zip(bps, bps[1:])):
            violations.append(f"{path}: pwl breakpoints must be strictly increasing")
            return None
        want = (divisor.a_inf, -divisor.a0)
        for key, expect in (("slope_neg_inf", want[0]), ("slope_pos_inf", want[1])):
            if key in data and float(data[key]) != expect:
                violations.append(
                    f"{path}: {key}={data[key]} does not match divisor slope {expect}"
                )
                return None
        return {
            "type": "pwl",
            "breakpoints": [float(x) for x in bps],
            "values": [float(x) for x in vals],
        }
    if t == "difference":
        plus = _check_spec(data.get("plus"), path + ".plus", violations)
        minus = _check_spec(data.get("minus"), path + ".minus", violations)
        if plus is None or minus is None:
            return None
        dp, dm = plus.divisor, minus.divisor
        if (dp.a0 - dm.a0, dp.a_inf - dm.a_inf) != (divisor.a0, divisor.a_inf):
            violations.append(
                f"{path}: outer divisor must equal plus.divisor - minus.divisor"
            )
            return None
        return {"type": "difference", "plus": plus.to_dict(), "minus": minus.to_dict()}
    return None


def _check_spec(data, path, violations) -> MetricSpec | None:
    if not isinstance(data, dict):
        violations.append(f"{path}: spec must be an object")
        return None
    divisor = _check_divisor(data.get("divisor"), path + ".divisor", violations)
    if divisor is None:
        return None
    metric = _check_metric(data.get("metric"), divisor, path + ".metric", violations)
    grid = None
    if "grid" in data:
        g = data["grid"]
        ok = (
            isinstance(g, dict)
            and _is_number(g.get("half_width")) and g["half_width"] > 0
            and isinstance(g.get("points"), int) and g["points"] >= 2
        )
        if not ok:
            violations.append(f"{path}.grid: needs half_width > 0 and integer points >= 2")
        else:
            grid = (float(g["half_width"]), int(g["points"]))
    if metric is None:
        return None
    return MetricSpec(divisor, metric, grid)


def parse_spec(text: str) -> MetricSpec:
    """Parse and validate a metric spec; collects all schema violations."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    violations: list[str] = []
    spec = _check_spec(data, "$", violations)
    if violations or spec is None:
        raise ValidationError(violations or ["$: invalid spec"])
    return spec


def _build_variant(variant, divisor, grid) -> MetricFunction:
    t = variant["type"]
    if t == "canonical":
        return canonical_metric(divisor)
    if t == "fubini_study":
        return fubini_study_metric(default_grid(*grid) if grid else None)
    if t == "scaled":
        return scale_metric(_build_variant(variant["base"], divisor, grid), variant["c"])
    if t == "mollified":
        return mollify(_build_variant(variant["base"], divisor, grid), variant["width"])
    if t == "pwl":
        psi = PwlFunction(
            tuple(variant["breakpoints"]),
            tuple(variant["values"]),
            divisor.a_inf,
            -divisor.a0,
        )
        return MetricFunction(divisor, psi)
    if t == "difference":
        plus = parse_dict(variant["plus"]).build(grid)
        minus = parse_dict(variant["minus"]).build(grid)
        psi = linear_combination(plus.psi, minus.psi, 1.0, -1.0)
        return MetricFunction(divisor, psi)
    raise ValidationError([f"unknown metric type {t!r}"])


def parse_dict(data: dict) -> MetricSpec:
    """parse_spec for already-decoded JSON objects."""
    violations: list[str] = []
    spec = _check_spec(data, "$", violations)
    if violations or spec is None:
        raise ValidationError(violations or ["$: invalid spec"])
    return spec


# -- commands -----------------------------------------------------------------

COMMANDS = ("height", "chivol", "roof", "envelope", "measure", "verify", "suite", "converge")


def _roof_points(m: MetricFunction) -> list[list[float]]:
    r = roof(m)
    lo, hi = r.domain.lo, r.domain.hi
    xs = [lo] + [x for x in r.theta.breakpoints if lo < x < hi] + ([hi] if hi > lo else [])
    return [[x, r.theta(x)] for x in xs]


def run_command(name: str, spec: MetricSpec | None = None, flags: dict | None = None):
    """Execute one command; returns (report dict, exit code)."""
    flags = dict(flags or {})
    tol = flags.get("tol")
    grid = flags.get("grid")
    report: dict = {"command": name, "flags": _echo_flags(flags)}

    if name == "suite":
        config = SuiteConfig(
            trials=flags.get("trials", 1000),
            seed=flags.get("seed", 42),
            **(
                {
                    "exact_tol": tol,
                    "gap_floor": tol,
                    "energy_rel_tol": tol,
                    "mass_tol": tol,
                }
                if tol is not None
                else {}
            ),
        )
        suite = run_suite(config)
        report["suite"] = suite.to_dict()
        return report, (1 if suite.total_failures else 0)

    if spec is None:
        raise ValidationError([f"command {name!r} requires a metric spec"])
    m = spec.build(grid)
    report["spec"] = spec.to_dict()

    if name == "height":
        report["value"] = height(m)
        return report, 0
    if name == "chivol":
        report["value"] = chi_volume(m)
        return report, 0
    if name == "roof":
        r = roof(m)
        report["domain"] = [r.domain.lo, r.domain.hi]
        report["points"] = _roof_points(m)
        return report, 0
    if name == "envelope":
        env = equilibrium(m).psi
        report["slope_neg_inf"] = env.slope_neg_inf
        report["slope_pos_inf"] = env.slope_pos_inf
        report["points"] = [[u, v] for u, v in zip(env.breakpoints, env.values)]
        return report, 0
    if name == "measure":
        mu = ma_measure(m)
        report["atoms"] = [[p, mass] for p, mass in mu.atoms]
        report["total_mass"] = mu.total_mass
        return report, 0
    if name == "verify":
        rep = verify(m)
        gap_floor = tol if tol is not None else 1e-9
        exact_tol = tol if tol is not None else 1e-10
        energy_tol = tol if tol is not None else 1e-9
        checks = {
            "gap_nonnegative": rep.gap >= -gap_floor,
            "orthogonality": rep.orthogonality_residual <= exact_tol,
            "energy_identity": abs(rep.gap - rep.energy) <= energy_tol * max(1.0, abs(rep.energy)),
        }
        report.update(rep.to_dict())
        report["checks"] = checks
        return report, (0 if all(checks.values()) else 1)
    if name == "converge":
        widths = flags.get("widths") or (0.2, 0.1, 0.05)
        rows = convergence_study(m, widths)
        report["rows"] = [r.to_dict() for r in rows]
        return report, 0
    raise ValidationError([f"unknown command {name!r}; choose from {COMMANDS}"])


def _echo_flags(flags: dict) -> dict:
    grid = flags.get("grid")
    return {
        "tol": flags.get("tol"),
        "trials": flags.get("trials"),
        "seed": flags.get("seed"),
        "widths": list(flags["widths"]) if flags.get("widths") else None,
        "grid_half_width": grid[0] if grid else DEFAULT_HALF_WIDTH,
        "grid_points": grid[1] if grid else DEFAULT_GRID_POINTS,
        "format": flags.get("format", "json"),
    }


# -- output -------------------------------------------------------------------


def _f17(x) -> str:
    if isinstance(x, bool):
        return str(x)
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def emit(report: dict, fmt: str = "json") -> str:
    """Deterministic serialization; 'table' favors two-column plot dumps."""
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    if fmt != "table":
        raise ValidationError([f"unknown format {fmt!r}; choose json or table"])
    lines: list[str] = []
    if "points" in report:
        for x, y in report["points"]:
            lines.append(f"{_f17(x)}\t{_f17(y)}")
    elif "atoms" in report:
        for p, mass in report["atoms"]:
            lines.append(f"{_f17(p)}\t{_f17(mass)}")
    elif "rows" in report:
        lines.append("# width\tsup_distance\theight\tchi_volume")
        for row in report["rows"]:
            lines.append(
                "\t".join(
                    _f17(row[k]) for k in ("width", "sup_distance", "height", "chi_volume")
                )
            )
    else:
        skip = {"command", "flags", "spec", "suite"}
        flat = {k: v for k, v in report.items() if k not in skip}
        for key in sorted(flat):
            val = flat[key]
            if isinstance(val, dict):
                for sub in sorted(val):
                    lines.append(f"{key}.{sub}\t{_f17(val[sub])}")
            else:
                lines.append(f"{key}\t{_f17(val)}")
    return "\n".join(lines) + "\n"


# -- argument parsing -----------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toricheight",
        description="Exact heights, chi-volumes and roof functions of toric "
        "metrized divisors on the projective line.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name not in ("suite",):
            p.add_argument("spec", help="path to a JSON metric spec, or - for stdin")
        p.add_argument("--format", choices=("json", "table"), default="json")
        p.add_argument("--tol", type=float, default=None,
                       help="override verification tolerances")
        p.add_argument("--grid-halfwidth", type=float, default=None,
                       help=f"sampling half-width (default {DEFAULT_HALF_WIDTH})")
        p.add_argument("--grid-points", type=int, default=None,
                       help=f"sampling point count (default {DEFAULT_GRID_POINTS})")
        if name == "suite":
            p.add_argument("--trials", type=int, default=1000)
            p.add_argument("--seed", type=int, default=42)
        if name == "converge":
            p.add_argument("--widths", default="0.2,0.1,0.05",
                           help="comma-separated decreasing mollification widths")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        flags = {"tol": args.tol, "format": args.format}
        if args.grid_halfwidth is not None or args.grid_points is not None:
            flags["grid"] = (
                args.grid_halfwidth if args.grid_halfwidth is not None else DEFAULT_HALF_WIDTH,
                args.grid_points if args.grid_points is not None else DEFAULT_GRID_POINTS,
            )
        spec = None
        if args.command != "suite":
            text = sys.stdin.read() if args.spec == "-" else open(args.spec).read()
            spec = parse_spec(text)
        if args.command == "suite":
            flags["trials"] = args.trials
            flags["seed"] = args.seed
        if args.command == "converge":
            flags["widths"] = tuple(float(w) for w in args.widths.split(","))
        report, code = run_command(args.command, spec, flags)
        sys.stdout.write(emit(report, args.format))
        return code
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        for v in exc.violations:
            print(f"invalid input: {v}", file=sys.stderr)
        return 2
    except (ToricHeightError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
