"""Command-line front end: evaluation subcommands, the verification suite,
report persistence (CSV/JSON) and SVG contour plots.

Exit codes: 0 success (all checks pass), 1 at least one check failed,
2 usage or configuration error.  Numbers are printed with 12 significant
digits; re-running a command with the same inputs and seeds reproduces the
output byte for byte (the JSON report drops the wall-time field for that
reason; it stays in the in-memory report and the stdout summary).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import bergman as bg
from . import geometry as geo
from . import green as gr
from . import oracles as oc
from . import sublevel as sl
from . import verify as vf
from . import weights as wt
from .errors import ConfigError, SuitaLabError
from .geometry import Domain, Point
from .verify import Check, SuiteConfig, VerificationReport


def _fmt(x: float) -> str:
    return f"{x + 0.0:.12g}"  # +0.0 canonicalizes negative zero


def _parse_point(text: str) -> complex:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"point needs x,y: {text!r}")
    return complex(float(parts[0]), float(parts[1]))


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


# ---------------------------------------------------------------------------
# Config files: plain key=value with # comments, unknown keys rejected
# ---------------------------------------------------------------------------

_KNOWN_KEYS = {"domains", "poles", "seeds", "grid", "steps", "out"}


def parse_config(text: str) -> dict:
    out: dict = {"tolerances": {}}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = key.strip(), value.strip()
        if key.startswith("tolerance."):
            out["tolerances"][key[len("tolerance.") :]] = float(value)
        elif key in _KNOWN_KEYS:
            out[key] = value
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    return out


def suite_config_from_file(path: str) -> SuiteConfig:
    with open(path, "r", encoding="utf-8") as fh:
        raw = parse_config(fh.read())
    config = SuiteConfig()
    if "domains" in raw:
        literals = [s.strip() for s in raw["domains"].split("|") if s.strip()]
        poles = [_parse_point(s.strip()) for s in raw.get("poles", "").split("|") if s.strip()]
        entries = []
        for lit in literals:
            domain = geo.parse_domain(lit)
            for w in poles:
                if geo.contains(domain, w):
                    entries.append((lit, w))
        if not entries:
            raise ConfigError("no (domain, pole) pair from the config has the pole inside the domain")
        config.entries = entries
        # profile/scan/probe plans follow the configured domain list
        config.blb_entries = [e for e in config.blb_entries if e[0] in literals]
        config.thm4_entries = [e for e in config.thm4_entries if e[0] in literals]
        config.char_entries = [e for e in config.char_entries if e[0] in literals]
    if "seeds" in raw:
        config.seeds = [int(s) for s in raw["seeds"].split(",")]
    if "grid" in raw:
        config.grid = int(raw["grid"])
    if "steps" in raw:
        config.profile_steps = int(raw["steps"])
    config.tolerances = raw["tolerances"]
    return config


# ---------------------------------------------------------------------------
# Report persistence
# ---------------------------------------------------------------------------

_CSV_HEADER = ["check_name", "domain", "pole", "params", "lhs", "rhs", "margin", "pass"]


def report_csv_text(report: VerificationReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_HEADER)
    for c in report.checks:
        writer.writerow(
            [c.name, c.domain, c.pole, c.params, _fmt(c.lhs), _fmt(c.rhs), _fmt(c.margin), "true" if c.passed else "false"]
        )
    return buf.getvalue()


def report_json_text(report: VerificationReport) -> str:
    meta = {k: v for k, v in report.metadata.items() if k != "wall_time_s"}
    payload = {
        "metadata": meta,
        "checks": [
            {
                "check_name": c.name,
                "domain": c.domain,
                "pole": c.pole,
                "params": c.params,
                "lhs": float(_fmt(c.lhs)),
                "rhs": float(_fmt(c.rhs)),
                "margin": float(_fmt(c.margin)),
                "pass": c.passed,
            }
            for c in report.checks
        ],
    }
    return json.dumps(payload, indent=1) + "\n"


def emit_report(report: VerificationReport, path: str, fmt: str = "csv") -> None:
    text = report_csv_text(report) if fmt == "csv" else report_json_text(report)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def parse_report_csv(path: str) -> list[Check]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != _CSV_HEADER:
        raise ConfigError(f"{path} is not a verify report")
    out = []
    for row in rows[1:]:
        name, domain, pole, params, lhs, rhs, margin, passed = row
        out.append(
            Check(
                name=name,
                domain=domain,
                pole=pole,
                params=params,
                lhs=float(lhs),
                rhs=float(rhs),
                margin=float(margin),
                passed=passed == "true",
            )
        )
    return out


# ---------------------------------------------------------------------------
# SVG contour plots
# ---------------------------------------------------------------------------

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"]


def _svg_path(points: np.ndarray, scale, color: str) -> str:
    coords = " ".join(f"{scale(p)[0]:.6f},{scale(p)[1]:.6f}" for p in points)
    return f'<polyline fill="none" stroke="{color}" stroke-width="1" points="{coords}"/>'


def emit_contours(domain: Domain, w: Point, t_list, path: str, resolution: int = 512) -> None:
    """SVG with the domain outline and one level curve set per t."""
    x0, x1, y0, y1 = geo.bounding_box(domain)
    pad = 0.05 * max(x1 - x0, y1 - y0)
    x0, x1, y0, y1 = x0 - pad, x1 + pad, y0 - pad, y1 + pad
    size = 600.0
    span = max(x1 - x0, y1 - y0)

    def scale(z: complex):
        return ((z.real - x0) / span * size, (y1 - z.imag) / span * size)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0f}" height="{size:.0f}" '
        f'viewBox="0 0 {size:.0f} {size:.0f}">'
    ]
    parts.extend(_outline_elements(domain, scale, span, size))
    for i, t in enumerate(t_list):
        color = _PALETTE[i % len(_PALETTE)]
        for line in sl.extract_contours(domain, w, float(t), resolution):
            parts.append(_svg_path(line, scale, color))
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(parts) + "\n")


def _outline_elements(domain: Domain, scale, span: float, size: float) -> list[str]:
    def circle(center: complex, radius: float) -> str:
        cx, cy = scale(center)
        r = radius / span * size
        return f'<circle cx="{cx:.6f}" cy="{cy:.6f}" r="{r:.6f}" fill="none" stroke="#000000" stroke-width="1.5"/>'

    if isinstance(domain, geo.Disc):
        return [circle(domain.center, domain.radius)]
    if isinstance(domain, geo.Annulus):
        return [circle(0j, 1.0), circle(0j, domain.q)]
    if isinstance(domain, geo.Polygon):
        pts = np.array(domain.vertices + (domain.vertices[0],))
        return [_svg_path(pts, scale, "#000000")]
    if isinstance(domain, geo.MoebiusImage):
        samples = geo.boundary_sample(domain, 512)
        core, _ = geo.flatten_moebius(domain)
        n_comp = 2 if isinstance(core, geo.Annulus) else 1
        out = []
        per = len(samples) // n_comp if n_comp == 2 else len(samples)
        comps = [samples[:per], samples[per:]] if n_comp == 2 else [samples]
        for comp in comps:
            if comp:
                pts = np.array([p for p, _ in comp] + [comp[0][0]])
                out.append(_svg_path(pts, scale, "#000000"))
        return out
    return []


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_green(args) -> int:
    domain = geo.parse_domain(args.domain)
    value = gr.green_eval(domain, _parse_point(args.pole), _parse_point(args.at))
    print(",".join(_fmt(v) for v in (value.value, value.grad_x, value.grad_y, value.truncation_bound)))
    return 0


def _cmd_capacity(args) -> int:
    domain = geo.parse_domain(args.domain)
    cap = gr.robin_capacity(domain, _parse_point(args.pole))
    print(",".join(_fmt(v) for v in (cap.capacity, cap.robin_constant, cap.truncation_bound)))
    return 0


def _cmd_kernel(args) -> int:
    domain = geo.parse_domain(args.domain)
    k = bg.kernel_j(domain, _parse_point(args.pole), args.order)
    print(f"{k.order},{_fmt(k.value)},{k.truncation_order},{_fmt(k.tail_bound)}")
    return 0


def _cmd_critical(args) -> int:
    domain = geo.parse_domain(args.domain)
    points = gr.critical_points(domain, _parse_point(args.pole))
    for cp in points:
        print(
            ",".join(
                _fmt(v)
                for v in (cp.location.real, cp.location.imag, cp.level, cp.gradient_residual)
            )
            + f",{cp.order}"
        )
    return 0


def _cmd_sublevel(args) -> int:
    domain = geo.parse_domain(args.domain)
    w = _parse_point(args.pole)
    profile = sl.profile_scan(domain, w, args.tmin, args.tmax, args.steps, args.grid)
    print("t,lambda,log_lambda,gamma_prime,second_diff,e2t_lambda,err_est")
    for i in range(len(profile.t_samples)):
        print(
            ",".join(
                _fmt(v)
                for v in (
                    profile.t_samples[i],
                    profile.lam[i],
                    profile.log_lambda[i],
                    profile.gamma_prime[i],
                    profile.second_diff[i],
                    profile.e2t_lambda[i],
                    profile.err_est[i],
                )
            )
        )
    if args.svg:
        emit_contours(domain, w, profile.t_samples, args.svg, args.grid)
    return 0


def _cmd_weights(args) -> int:
    if args.probe:
        values = [float(s) for s in args.probe.split(",")]
        probes = wt.war_probe(values)
        print("s,war")
        for s, p in zip(values, probes):
            print(f"{_fmt(s)},{_fmt(p)}")
        return 0
    if args.s is None:
        raise ConfigError("weights needs --s or --probe")
    v = wt.eval_weights(args.s)
    print("s,eta0,eta0p,eta0pp,gamma0,gamma0p,identity_residual")
    print(
        ",".join(
            _fmt(x)
            for x in (v.s, v.eta0, v.eta0p, v.eta0pp, v.gamma0, v.gamma0p, wt.identity_residual(args.s))
        )
    )
    return 0


def _cmd_oracle(args) -> int:
    domain = geo.parse_domain(args.domain)
    w = _parse_point(args.pole)
    if args.kind == "wos":
        est = oc.wos_green(domain, w, _parse_point(args.at), args.samples, args.seed)
    elif args.kind == "area":
        est = oc.mc_area(domain, w, args.level, args.samples, args.seed)
    elif args.kind == "robin":
        delta = geo.boundary_distance(domain, w)
        radii = [0.25 * delta / 2**k for k in range(5)]
        value, residual = oc.robin_extrapolate(domain, w, radii, return_residual=True)
        print(f"{_fmt(value)},{_fmt(residual)},{64 * len(radii)},{args.seed}")
        return 0
    else:  # gridscan
        for p in oc.grid_min_gradient(domain, w, args.grid):
            print(f"{_fmt(p.real)},{_fmt(p.imag)}")
        return 0
    print(f"{_fmt(est.mean)},{_fmt(est.std_error)},{est.samples},{est.seed}")
    return 0


def _cmd_verify(args) -> int:
    config = suite_config_from_file(args.config) if args.config else SuiteConfig()
    if args.grid:
        config.grid = args.grid
    report = vf.run_suite(config, suite=args.suite)
    for c in report.failures:
        print(f"FAIL {c.name} domain={c.domain} pole={c.pole} {c.params} lhs={_fmt(c.lhs)} rhs={_fmt(c.rhs)}")
    print(
        f"{report.metadata['checks_total']} checks, {report.metadata['checks_failed']} failures, "
        f"{report.metadata['wall_time_s']}s"
    )
    if args.out:
        emit_report(report, args.out, args.format)
    return 0 if report.all_passed else 1


def parse_args(argv=None) -> argparse.Namespace:
    if argv is None:
        argv = sys.argv[1:]
    # Merge "--opt value" into "--opt=value" when the value opens with "-",
    # so negative numbers and comma lists survive argparse.
    merged: list[str] = []
    skip = False
    for i, token in enumerate(argv):
        if skip:
            skip = False
            continue
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if token.startswith("--") and "=" not in token and nxt is not None and nxt.startswith("-") and any(ch.isdigit() for ch in nxt):
            merged.append(f"{token}={nxt}")
            skip = True
        else:
            merged.append(token)
    argv = merged
    parser = argparse.ArgumentParser(prog="suita-lab", description="Planar potential-theory toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    default_seed = int(os.environ.get("SUITA_LAB_SEED", "42"))

    p = sub.add_parser("green", help="evaluate the Green function")
    p.add_argument("--domain", required=True)
    p.add_argument("--pole", required=True)
    p.add_argument("--at", required=True)
    p.set_defaults(func=_cmd_green)

    p = sub.add_parser("capacity", help="logarithmic capacity / Robin constant")
    p.add_argument("--domain", required=True)
    p.add_argument("--pole", required=True)
    p.set_defaults(func=_cmd_capacity)

    p = sub.add_parser("kernel", help="order-j extremal kernel")
    p.add_argument("--domain", required=True)
    p.add_argument("--pole", required=True)
    p.add_argument("--order", type=_nonneg_int, default=0)
    p.set_defaults(func=_cmd_kernel)

    p = sub.add_parser("critical", help="critical points of the Green function")
    p.add_argument("--domain", required=True)
    p.add_argument("--pole", required=True)
    p.set_defaults(func=_cmd_critical)

    p = sub.add_parser("sublevel", help="sublevel-area profile")
    p.add_argument("--domain", required=True)
    p.add_argument("--pole", required=True)
    p.add_argument("--tmin", type=float, required=True)
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--steps", type=int, default=16)
    p.add_argument("--grid", type=int, default=1024)
    p.add_argument("--svg")
    p.set_defaults(func=_cmd_sublevel)

    p = sub.add_parser("weights", help="lower-bound weight functions")
    p.add_argument("--s", type=float)
    p.add_argument("--probe")
    p.set_defaults(func=_cmd_weights)

    p = sub.add_parser("oracle", help="Monte Carlo / brute-force oracles")
    p.add_argument("kind", choices=["wos", "area", "robin", "gridscan"])
    p.add_argument("--domain", required=True)
    p.add_argument("--pole", required=True)
    p.add_argument("--at")
    p.add_argument("--level", type=float)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=default_seed)
    p.add_argument("--grid", type=int, default=512)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument(
        "--suite",
        default="all",
        choices=["all", "suita", "thm1", "thm2", "blb", "thm4", "poisson", "characterization"],
    )
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.add_argument("--grid", type=int)
    p.set_defaults(func=_cmd_verify)

    return parser.parse_args(argv)


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit status 2 for usage errors and 0 for --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (SuitaLabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
