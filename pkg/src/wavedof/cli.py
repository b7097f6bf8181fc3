"""Command-line surface: bound reports, sweeps, mode tables, verification.

Subcommands
-----------
bounds   print every bound for one configuration (table or JSON)
sweep    evaluate bound quantities over a 2-axis parameter grid -> CSV
modes    dump the enumerated mode table -> CSV
verify   quadrature Gram + ensemble covariance rank experiment -> JSON
figure   canned sweeps (fig3 | fig4 | fig5) reproducing the survey plots

Exit codes: 0 success, 2 configuration invariant violated, 3 mode cap
exceeded, 4 grid resolution below minimum.

File formats: CSV is UTF-8 with LF line endings, ``# key = value``
metadata lines, then a header row; numbers carry 12 significant digits
and integers are written bare. JSON reports use a stable key order.
The optional SVG heatmap maps cell values linearly onto a blue-to-red
ramp between the grid minimum and maximum.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .bounds import (ConfigError, Dimension, PhysicalConfig, bound_report,
                     exact_mode_sum, frequency_bins)
from .modes import ModeCapError, enumerate_modes, synthesize_field
from .rankcheck import (RankPolicy, ResolutionError, SpectrumReport,
                        build_grid, diagonal_normalize, eigen_spectrum,
                        ensemble_spectrum, gram_of_modes)

PRNG_NAME = "numpy-pcg64"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAP = 3
EXIT_RESOLUTION = 4

SWEEP_PARAMS = ("R", "W", "T", "F0")

#: quantities a sweep may emit (BoundReport field names)
SWEEP_QUANTITIES = ("d_2wt", "d_space2d", "d_space3d", "thm1", "thm2",
                    "exact2d", "exact3d", "asym3d", "avg_density", "n0")

FIGURE_PRESETS = {
    # fixed parameters from the survey captions; axis spans chosen to
    # cover the qualitative regimes (ranges are not printed there).
    "fig3": {"fixed": {"T": 5e-4, "F0": 2.4e9},
             "axis1": ("R", 0.01, 10.0, 13, "log"),
             "axis2": ("W", 1e3, 1e8, 11, "log")},
    "fig4": {"fixed": {"T": 1e-6, "F0": 2.4e6},
             "axis1": ("W", 1e3, 5e4, 9, "log"),
             "axis2": ("R", 1e-3, 1.0, 9, "log")},
    "fig5": {"fixed": {"W": 1e3, "F0": 2.4e9},
             "axis1": ("T", 0.0, 1e-3, 11, "linear"),
             "axis2": ("R", 0.0, 1.0, 11, "linear")},
}
FIGURE_QUANTITIES = ("thm2", "d_2wt", "d_space3d")


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    count: int
    scale: str

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.logspace(math.log10(self.lo), math.log10(self.hi), self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class SweepSpec:
    axis1: Axis
    axis2: Axis
    fixed: dict
    quantities: tuple


def fmt_num(x) -> str:
    """12-significant-digit text form; integral values print bare."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    xf = float(x)
    if math.isfinite(xf) and xf == int(xf) and abs(xf) < 1e15:
        return str(int(xf))
    return format(xf, ".12g")


def _round12(x: float) -> float:
    return float(format(float(x), ".12g"))


def _timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def run_metadata(seed=None, extra: dict | None = None) -> dict:
    meta = {"tool": "wavedof", "version": __version__,
            "generated": _timestamp(), "prng": PRNG_NAME}
    if seed is not None:
        meta["seed"] = int(seed)
    if extra:
        meta.update(extra)
    return meta


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("WAVEDOF_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# configuration flags

def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--R", type=float, default=None, help="region radius in meters")
    p.add_argument("--W", type=float, default=None, help="half bandwidth in Hz")
    p.add_argument("--T", type=float, default=None, help="observation time in seconds")
    p.add_argument("--F0", type=float, default=None, help="center frequency in Hz")
    p.add_argument("--c", type=float, default=None, help="wave speed in m/s (default 3e8)")
    p.add_argument("--config", type=str, default=None,
                   help="plain key = value file; flags override it")


def _read_config_file(path: str) -> dict:
    out: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in ("R", "W", "T", "F0", "c", "seed"):
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = float(val) if key != "seed" else int(float(val))
    return out


def _config_from_args(args) -> PhysicalConfig:
    base = {"R": None, "W": None, "T": None, "F0": None, "c": 3e8}
    if args.config:
        base.update({k: v for k, v in _read_config_file(args.config).items()
                     if k != "seed"})
    for key in ("R", "W", "T", "F0", "c"):
        flag = getattr(args, key if key != "F0" else "F0")
        if flag is not None:
            base[key] = flag
    missing = [k for k in ("R", "W", "T", "F0") if base[k] is None]
    if missing:
        raise ConfigError(f"missing required parameters: {', '.join(missing)}")
    return PhysicalConfig(R=base["R"], W=base["W"], T=base["T"],
                          f0=base["F0"], c=base["c"])


def _dim_from_args(args) -> Dimension:
    return Dimension.TWO_D if args.dim == "2d" else Dimension.THREE_D


# ---------------------------------------------------------------------------
# bounds

def cmd_bounds(args) -> int:
    cfg = _config_from_args(args)
    report = bound_report(cfg)
    if args.json:
        doc = {"metadata": run_metadata(),
               "bounds": {k: _round12(v) if isinstance(v, float) else v
                          for k, v in report.as_dict().items()}}
        print(json.dumps(doc, indent=2))
    else:
        for key, val in report.as_dict().items():
            print(f"{key:12s} {fmt_num(val)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweeps

def _parse_axis(text: str) -> Axis:
    parts = text.split(":")
    if len(parts) != 5:
        raise ConfigError(f"axis must be name:min:max:count:scale, got {text!r}")
    name, lo, hi, count, scale = parts
    if name not in SWEEP_PARAMS:
        raise ConfigError(f"axis parameter must be one of {SWEEP_PARAMS}, got {name!r}")
    if scale not in ("linear", "log"):
        raise ConfigError(f"axis scale must be linear or log, got {scale!r}")
    lo, hi, count = float(lo), float(hi), int(count)
    if not lo < hi:
        raise ConfigError(f"axis needs min < max, got {lo} >= {hi}")
    if count < 2:
        raise ConfigError(f"axis needs count >= 2, got {count}")
    if scale == "log" and lo <= 0:
        raise ConfigError("log axis needs min > 0")
    return Axis(name, lo, hi, count, scale)


def _sweep_spec_from_args(args) -> SweepSpec:
    a1 = _parse_axis(args.axis1)
    a2 = _parse_axis(args.axis2)
    if a1.name == a2.name:
        raise ConfigError("axis parameters must be distinct")
    fixed = {}
    for item in args.fixed or []:
        if "=" not in item:
            raise ConfigError(f"--fixed expects name=value, got {item!r}")
        key, val = item.split("=", 1)
        if key not in SWEEP_PARAMS + ("c",):
            raise ConfigError(f"unknown fixed parameter {key!r}")
        fixed[key] = float(val)
    quantities = tuple(args.quantities.split(","))
    for q in quantities:
        if q not in SWEEP_QUANTITIES:
            raise ConfigError(f"unknown quantity {q!r}; choose from {SWEEP_QUANTITIES}")
    needed = {"R", "W", "T", "F0"} - {a1.name, a2.name}
    missing = needed - set(fixed)
    if missing:
        raise ConfigError(f"missing --fixed values for: {', '.join(sorted(missing))}")
    return SweepSpec(a1, a2, fixed, quantities)


def _sweep_cell(spec: SweepSpec, v1: float, v2: float) -> list:
    params = dict(spec.fixed)
    params[spec.axis1.name] = v1
    params[spec.axis2.name] = v2
    cfg = PhysicalConfig(R=params["R"], W=params["W"], T=params["T"],
                         f0=params["F0"], c=params.get("c", 3e8))
    rep = bound_report(cfg).as_dict()
    return [v1, v2] + [rep[q] for q in spec.quantities]


def evaluate_sweep(spec: SweepSpec) -> list[list]:
    """Row-major evaluation over axis1 x axis2; deterministic order."""
    cells = [(v1, v2) for v1 in spec.axis1.values() for v2 in spec.axis2.values()]
    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda c: _sweep_cell(spec, *c), cells))
    else:
        rows = [_sweep_cell(spec, *c) for c in cells]
    return rows


def render_sweep_csv(meta: dict, spec: SweepSpec, rows: list[list]) -> str:
    lines = [f"# {k} = {v}" for k, v in meta.items()]
    for tag, ax in (("axis1", spec.axis1), ("axis2", spec.axis2)):
        lines.append(f"# {tag} = {ax.name}:{fmt_num(ax.lo)}:{fmt_num(ax.hi)}:"
                     f"{ax.count}:{ax.scale}")
    for key in sorted(spec.fixed):
        lines.append(f"# fixed {key} = {fmt_num(spec.fixed[key])}")
    lines.append("axis1,axis2," + ",".join(spec.quantities))
    for row in rows:
        lines.append(",".join(fmt_num(v) for v in row))
    return "\n".join(lines) + "\n"


def parse_sweep_csv(text: str) -> tuple[dict, SweepSpec, list[list]]:
    """Inverse of :func:`render_sweep_csv`; re-rendering is byte-identical."""
    meta: dict = {}
    axes: dict = {}
    fixed: dict = {}
    header = None
    rows: list[list] = []
    for line in text.splitlines():
        if line.startswith("# "):
            key, val = (s.strip() for s in line[2:].split("=", 1))
            if key in ("axis1", "axis2"):
                axes[key] = _parse_axis(val)
            elif key.startswith("fixed "):
                fixed[key.split()[1]] = float(val)
            else:
                meta[key] = val
        elif header is None:
            header = line.split(",")
        else:
            rows.append([float(v) for v in line.split(",")])
    if header is None or "axis1" not in axes or "axis2" not in axes:
        raise ValueError("not a sweep CSV")
    spec = SweepSpec(axes["axis1"], axes["axis2"], fixed, tuple(header[2:]))
    return meta, spec, rows


def _color(frac: float) -> str:
    # linear blue -> red ramp
    r = int(round(255 * frac))
    b = int(round(255 * (1.0 - frac)))
    return f"#{r:02x}40{b:02x}"


def render_sweep_svg(spec: SweepSpec, rows: list[list], quantity: str) -> str:
    """Heatmap of one quantity; color is linear between grid min and max."""
    qi = 2 + list(spec.quantities).index(quantity)
    n1, n2 = spec.axis1.count, spec.axis2.count
    vals = np.array([r[qi] for r in rows], dtype=float).reshape(n1, n2)
    lo, hi = float(vals.min()), float(vals.max())
    span = hi - lo if hi > lo else 1.0
    cell, margin = 14, 40
    width, height = margin + n2 * cell + 10, margin + n1 * cell + 10
    meta = run_metadata()
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{height}">',
             "<!-- " + " ".join(f"{k}={v}" for k, v in meta.items()) + " -->",
             f'<text x="4" y="14" font-size="11">{quantity}: '
             f'{fmt_num(lo)} (blue) to {fmt_num(hi)} (red), linear</text>',
             f'<text x="4" y="28" font-size="11">rows: {spec.axis1.name}, '
             f'cols: {spec.axis2.name}</text>']
    for i1 in range(n1):
        for i2 in range(n2):
            frac = (vals[i1, i2] - lo) / span
            parts.append(f'<rect x="{margin + i2 * cell}" y="{margin + i1 * cell}" '
                         f'width="{cell}" height="{cell}" fill="{_color(frac)}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_sweep(args, preset: str | None = None) -> int:
    if preset is None:
        spec = _sweep_spec_from_args(args)
    else:
        conf = FIGURE_PRESETS[preset]
        spec = SweepSpec(Axis(*conf["axis1"]), Axis(*conf["axis2"]),
                         dict(conf["fixed"]), FIGURE_QUANTITIES)
    rows = evaluate_sweep(spec)
    meta = run_metadata(extra={"kind": f"sweep:{preset or 'custom'}"})
    text = render_sweep_csv(meta, spec, rows)
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    if args.svg:
        svg = render_sweep_svg(spec, rows, spec.quantities[0])
        with open(args.svg, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
    print(f"wrote {len(rows)} rows to {args.output}")
    return EXIT_OK


def cmd_figure(args) -> int:
    return cmd_sweep(args, preset=args.name)


# ---------------------------------------------------------------------------
# mode table

def cmd_modes(args) -> int:
    cfg = _config_from_args(args)
    dim = _dim_from_args(args)
    modes = enumerate_modes(dim, cfg, two_sided=args.two_sided, cap=args.cap)
    bin_freq = {b.i: b.f for b in frequency_bins(cfg)}
    meta = run_metadata(extra={"kind": "modes", "dim": dim.value})
    lines = [f"# {k} = {v}" for k, v in meta.items()]
    lines.append("i,n,m,f_hz,k_rad_per_m")
    for md in modes:
        f = bin_freq[md.i]
        k = cfg.wavenumber(f)
        lines.append(f"{md.i},{md.n},{md.m},{fmt_num(f)},{fmt_num(k)}")
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"{len(modes)} modes")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verification

def _spectrum_doc(spec: SpectrumReport) -> dict:
    return {"eigenvalues": [_round12(v) for v in spec.eigenvalues],
            "trace": _round12(spec.trace),
            "rank_threshold": spec.rank_threshold,
            "rank_energy": spec.rank_energy,
            "epsilon": spec.epsilon, "eta": spec.eta}


def write_spectrum_csv(path: str, spec: SpectrumReport, meta: dict) -> None:
    lines = [f"# {k} = {v}" for k, v in meta.items()]
    lines.append("index,eigenvalue,cumulative_fraction")
    for idx, (ev, cf) in enumerate(zip(spec.eigenvalues,
                                       spec.cumulative_fractions())):
        lines.append(f"{idx},{fmt_num(_round12(ev))},{fmt_num(_round12(cf))}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def verify_report(cfg: PhysicalConfig, dim: Dimension, *, waves: int,
                  fields: int, seed: int, resolution: tuple,
                  policy: RankPolicy, two_sided: bool = False) -> dict:
    """Run the full rank experiment and assemble the JSON document."""
    grid = build_grid(dim, cfg, resolution)
    modes = enumerate_modes(dim, cfg, two_sided=two_sided)
    gram = diagonal_normalize(gram_of_modes(modes, grid, cfg))
    gram_spec = eigen_spectrum(gram, policy)
    ensemble = [synthesize_field(dim, cfg, waves, seed + 1000 * j)
                for j in range(fields)]
    ens_spec = ensemble_spectrum(ensemble, grid, policy)
    exact = exact_mode_sum(dim, cfg)
    doc = {
        "metadata": run_metadata(seed=seed, extra={
            "kind": "verify", "dim": dim.value,
            "config": {"R": cfg.R, "W": cfg.W, "T": cfg.T, "F0": cfg.f0,
                       "c": cfg.c},
            "waves": waves, "fields": fields,
            "resolution": list(resolution),
            "two_sided": two_sided,
            "policy": {"epsilon": policy.epsilon, "eta": policy.eta}}),
        "bounds": {k: (_round12(v) if isinstance(v, float) else v)
                   for k, v in bound_report(cfg).as_dict().items()},
        "gram": {"modes": len(modes), **_spectrum_doc(gram_spec)},
        "ensemble": {"fields": fields, **_spectrum_doc(ens_spec)},
        "ratios": {
            "gram_rank_threshold_over_exact": _round12(gram_spec.rank_threshold / exact),
            "gram_rank_energy_over_exact": _round12(gram_spec.rank_energy / exact),
            "ensemble_rank_threshold_over_exact": _round12(ens_spec.rank_threshold / exact),
            "ensemble_rank_energy_over_exact": _round12(ens_spec.rank_energy / exact),
        },
    }
    return doc


def cmd_verify(args) -> int:
    cfg = _config_from_args(args)
    dim = _dim_from_args(args)
    resolution = tuple(int(s) for s in args.resolution.split(","))
    if len(resolution) != 3:
        raise ConfigError("--resolution expects n_radial,n_angular,n_time")
    if args.policy is not None:
        try:
            eps, eta = (float(s) for s in args.policy.split(":"))
        except ValueError as exc:
            raise ConfigError(f"--policy expects EPSILON:ETA, got {args.policy!r}") from exc
        policy = RankPolicy(epsilon=eps, eta=eta)
    else:
        policy = RankPolicy(epsilon=args.epsilon, eta=args.eta)
    seed = args.seed
    if seed is None and args.config:
        seed = _read_config_file(args.config).get("seed")
    if seed is None:
        seed = 0
    doc = verify_report(cfg, dim, waves=args.waves, fields=args.fields,
                        seed=seed, resolution=resolution, policy=policy,
                        two_sided=args.two_sided)
    text = json.dumps(doc, indent=2)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
        print(f"wrote report to {args.output}")
    else:
        print(text)
    if args.gram_spectrum_csv or args.ensemble_spectrum_csv:
        meta = doc["metadata"]
        if args.gram_spectrum_csv:
            spec = SpectrumReport(np.array(doc["gram"]["eigenvalues"]),
                                  doc["gram"]["trace"],
                                  doc["gram"]["rank_threshold"],
                                  doc["gram"]["rank_energy"],
                                  policy.epsilon, policy.eta)
            write_spectrum_csv(args.gram_spectrum_csv, spec,
                               {**meta, "spectrum": "gram"})
        if args.ensemble_spectrum_csv:
            spec = SpectrumReport(np.array(doc["ensemble"]["eigenvalues"]),
                                  doc["ensemble"]["trace"],
                                  doc["ensemble"]["rank_threshold"],
                                  doc["ensemble"]["rank_energy"],
                                  policy.epsilon, policy.eta)
            write_spectrum_csv(args.ensemble_spectrum_csv, spec,
                               {**meta, "spectrum": "ensemble"})
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wavedof",
                                description="space-time-frequency DoF bounds "
                                            "and numerical verification")
    sub = p.add_subparsers(dest="command", required=True)

    pb = sub.add_parser("bounds", help="print all bounds for one configuration")
    _add_config_flags(pb)
    pb.add_argument("--json", action="store_true")
    pb.set_defaults(func=cmd_bounds)

    ps = sub.add_parser("sweep", help="two-axis parameter sweep -> CSV")
    ps.add_argument("--axis1", required=True, help="name:min:max:count:scale")
    ps.add_argument("--axis2", required=True, help="name:min:max:count:scale")
    ps.add_argument("--fixed", action="append", metavar="NAME=VALUE")
    ps.add_argument("--quantities", default="thm2,d_2wt")
    ps.add_argument("-o", "--output", required=True)
    ps.add_argument("--svg", default=None, help="also write an SVG heatmap")
    ps.set_defaults(func=cmd_sweep)

    pf = sub.add_parser("figure", help="preset sweeps fig3 | fig4 | fig5")
    pf.add_argument("name", choices=sorted(FIGURE_PRESETS))
    pf.add_argument("-o", "--output", required=True)
    pf.add_argument("--svg", default=None)
    pf.set_defaults(func=cmd_figure)

    pm = sub.add_parser("modes", help="dump the enumerated mode table -> CSV")
    _add_config_flags(pm)
    pm.add_argument("--dim", choices=("2d", "3d"), default="3d")
    pm.add_argument("--two-sided", action="store_true",
                    help="2D only: use orders -N..N instead of 0..N")
    pm.add_argument("--cap", type=int, default=10_000_000)
    pm.add_argument("-o", "--output", required=True)
    pm.set_defaults(func=cmd_modes)

    pv = sub.add_parser("verify", help="rank experiment -> JSON report")
    _add_config_flags(pv)
    pv.add_argument("--dim", choices=("2d", "3d"), default="2d")
    pv.add_argument("--waves", type=int, default=64)
    pv.add_argument("--fields", type=int, default=128)
    pv.add_argument("--seed", type=int, default=None)
    pv.add_argument("--resolution", default="8,24,32",
                    help="n_radial,n_angular,n_time")
    pv.add_argument("--policy", default=None, metavar="EPSILON:ETA",
                    help="rank policy, e.g. 1e-3:0.99")
    pv.add_argument("--epsilon", type=float, default=1e-3)
    pv.add_argument("--eta", type=float, default=0.99)
    pv.add_argument("--two-sided", action="store_true")
    pv.add_argument("-o", "--output", default=None)
    pv.add_argument("--gram-spectrum-csv", default=None)
    pv.add_argument("--ensemble-spectrum-csv", default=None)
    pv.set_defaults(func=cmd_verify)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ModeCapError as exc:
        print(f"mode cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ResolutionError as exc:
        print(f"resolution too low: {exc}", file=sys.stderr)
        return EXIT_RESOLUTION


def entry() -> None:
    raise SystemExit(main())
