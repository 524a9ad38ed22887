"""Command-line front end.

Subcommands: effective, raster, simulate, realize, catalog.  Angles on the
command line are radians with "pi" literal support ("5pi/6"); graphs use the
literal format "N;j>k,..." (a bare integer 0..63 is accepted as a graph
number for N=3).  A JSON config file can supply any flag via --config;
explicit flags win.  Exit codes: 0 success, 2 usage error, 3 violated
precondition / structural error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass

import numpy as np

from .angles import parse_angle, parse_angle_list
from .coupling import load_coupling
from .dynamics import integrate
from .effective import (
    Catalog,
    GridSampler,
    PhasePoint,
    RandomSampler,
    RasterGrid,
    StructuralNetwork,
    catalog_realised,
    effective_graph,
    raster_cir,
)
from .errors import PreconditionError, UsageError
from .graphs import (
    DirectedGraph,
    automorphism_group,
    connectivity_class,
    graph_isotropy,
    graph_number,
    parse_graph_literal,
    point_isotropy,
)
from .realize import (
    realize_delta,
    realize_generic,
    realize_stable,
    save_certificate,
)
from .svgplot import catalog_strip_svg, raster_svg

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_IO = 4


# ---------------------------------------------------------------------------
# Run configs (flag <-> JSON round-trip)


@dataclass(frozen=True)
class RunConfig:
    def to_dict(self) -> dict:
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class EffectiveConfig(RunConfig):
    coupling: str
    theta: str
    structural: str | None = None


@dataclass(frozen=True)
class RasterConfig(RunConfig):
    coupling: str
    out: str
    resolution: int = 300
    structural: str | None = None


@dataclass(frozen=True)
class SimulateConfig(RunConfig):
    coupling: str
    theta0: str
    out: str
    t_end: float = 50.0
    dt: float = 1e-3
    stride: int = 10
    structural: str | None = None
    overlay: bool = False
    overlay_resolution: int = 200


@dataclass(frozen=True)
class RealizeConfig(RunConfig):
    target: str
    out: str
    mode: str = "generic"  # generic | delta | stable
    theta: str | None = None
    a: str | None = None
    delta: str | None = None
    structural: str | None = None
    omega: float = 1.0
    seed: int = 0


@dataclass(frozen=True)
class CatalogConfig(RunConfig):
    coupling: str
    out: str
    sampler: str = "grid:400"
    structural: str | None = None


def _merge_config(args: argparse.Namespace, cls):
    """Resolve flags over --config file values over dataclass defaults."""
    file_values = {}
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            try:
                file_values = json.load(fh)
            except json.JSONDecodeError as exc:
                raise UsageError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(file_values, dict):
            raise UsageError("config file must hold a JSON object")
    merged = {}
    for f in dataclasses.fields(cls):
        flag = getattr(args, f.name, None)
        if flag is not None:
            merged[f.name] = flag
        elif f.name in file_values:
            merged[f.name] = file_values[f.name]
    missing = [
        f.name
        for f in dataclasses.fields(cls)
        if f.name not in merged
        and f.default is dataclasses.MISSING
        and f.default_factory is dataclasses.MISSING
    ]
    if missing:
        raise UsageError(f"missing required options: {', '.join('--' + m for m in missing)}")
    return cls.from_dict(merged)


def _structural(literal: str | None, n: int) -> DirectedGraph:
    if literal is None:
        return DirectedGraph.complete(n)
    g = parse_graph_literal(literal, n_for_nu=n)
    if g.n != n:
        raise UsageError(f"structural graph has {g.n} vertices, expected {n}")
    return g


def _theta(text: str) -> PhasePoint:
    return PhasePoint.of(parse_angle_list(text))


def _parse_sampler(text: str):
    parts = str(text).split(":")
    try:
        if parts[0] == "grid" and len(parts) == 2:
            return GridSampler(resolution=int(parts[1]))
        if parts[0] == "random" and len(parts) == 3:
            return RandomSampler(count=int(parts[1]), seed=int(parts[2]))
    except ValueError as exc:
        raise UsageError(f"bad sampler spec {text!r}") from exc
    raise UsageError(f"bad sampler spec {text!r}; use grid:R or random:M:SEED")


# ---------------------------------------------------------------------------
# Commands


def cmd_effective(cfg: EffectiveConfig) -> int:
    g = load_coupling(cfg.coupling)
    theta = _theta(cfg.theta)
    a = _structural(cfg.structural, theta.n)
    net = StructuralNetwork(graph=a, omega=1.0, g=g)
    h = effective_graph(net, theta)
    group = automorphism_group(a)
    sigma_theta = point_isotropy(theta.angles, group)
    sigma_h = graph_isotropy(h, group)
    print(f"effective graph: {h.to_literal()}")
    if h.n == 3:
        print(f"graph number: {graph_number(h)}")
    print(f"connectivity: {connectivity_class(h)}")
    print(f"isotropy sizes: |Sigma_theta| = {len(sigma_theta)}, |Sigma_G| = {len(sigma_h)}")
    return EXIT_OK


def cmd_raster(cfg: RasterConfig) -> int:
    g = load_coupling(cfg.coupling)
    a = _structural(cfg.structural, 3)
    net = StructuralNetwork(graph=a, omega=1.0, g=g)
    grid = raster_cir(net, cfg.resolution)
    _write_raster(grid, cfg.out)
    print(f"raster {cfg.resolution}x{cfg.resolution}: {len(grid.nu_values())} distinct graphs")
    print(f"wrote {cfg.out}.csv and {cfg.out}.svg")
    return EXIT_OK


def _write_raster(grid: RasterGrid, prefix: str, trajectories=()) -> None:
    with open(f"{prefix}.csv", "w", encoding="utf-8") as fh:
        grid.to_csv(fh)
    with open(f"{prefix}.svg", "w", encoding="utf-8") as fh:
        fh.write(raster_svg(grid, trajectories))


def cmd_simulate(cfg: SimulateConfig) -> int:
    g = load_coupling(cfg.coupling)
    theta0 = _theta(cfg.theta0)
    a = _structural(cfg.structural, theta0.n)
    net = StructuralNetwork(graph=a, omega=1.0, g=g)
    traj = integrate(net, theta0, t_end=cfg.t_end, dt=cfg.dt, stride=cfg.stride)
    with open(f"{cfg.out}.csv", "w", encoding="utf-8") as fh:
        traj.to_csv(fh)
    with open(f"{cfg.out}.events.csv", "w", encoding="utf-8") as fh:
        traj.events_to_csv(fh)
    itinerary = traj.itinerary()
    labels = " -> ".join(
        (str(gr.bits) if net.n == 3 else gr.to_literal()) for gr, _ in itinerary
    )
    print(f"{len(traj.events)} events; itinerary ({len(itinerary)} graphs): {labels}")
    if cfg.overlay:
        if net.n != 3:
            raise PreconditionError("raster overlay requires three oscillators")
        grid = raster_cir(net, cfg.overlay_resolution)
        phi = np.stack(
            [
                np.mod(traj.states[:, 1] - traj.states[:, 0], 2 * np.pi),
                np.mod(traj.states[:, 2] - traj.states[:, 1], 2 * np.pi),
            ],
            axis=1,
        )
        with open(f"{cfg.out}.svg", "w", encoding="utf-8") as fh:
            fh.write(raster_svg(grid, [phi]))
        print(f"wrote {cfg.out}.svg overlay")
    print(f"wrote {cfg.out}.csv and {cfg.out}.events.csv")
    return EXIT_OK


def cmd_realize(cfg: RealizeConfig) -> int:
    h = parse_graph_literal(cfg.target)
    omega = None
    if cfg.mode == "generic":
        if cfg.theta is None:
            raise UsageError("--generic requires --theta")
        cert = realize_generic(h, _theta(cfg.theta))
        extra = ""
    elif cfg.mode == "delta":
        if cfg.a is None or cfg.delta is None:
            raise UsageError("--delta requires the zone parameters A and DELTA")
        cert = realize_delta(h, parse_angle(cfg.a), parse_angle(cfg.delta))
        extra = f"; live zones: {len(cert.g.live_zones)} (<= {max(1, h.edge_count)})"
    elif cfg.mode == "stable":
        a = _structural(cfg.structural, h.n)
        result = realize_stable(h, structural=a, omega=cfg.omega, seed=cfg.seed)
        cert = result.certificate
        omega = result.equilibrium.omega
        extra = f"; {result.report.summary()}"
    else:
        raise UsageError(f"unknown realize mode {cfg.mode!r}")
    save_certificate(cert, cfg.out, omega=omega)
    print(
        f"realized {h.to_literal()}; dead zones: {cert.dead_zone_count}; "
        f"oracle re-check: ok{extra}"
    )
    print(f"wrote {cfg.out}")
    return EXIT_OK


def cmd_catalog(cfg: CatalogConfig) -> int:
    g = load_coupling(cfg.coupling)
    a = _structural(cfg.structural, 3)
    net = StructuralNetwork(graph=a, omega=1.0, g=g)
    catalog = catalog_realised(net, _parse_sampler(cfg.sampler))
    nus = catalog.nu_values()
    payload = {"mask": catalog.mask(), "nu_values": nus, "count": len(nus)}
    with open(f"{cfg.out}.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    with open(f"{cfg.out}.svg", "w", encoding="utf-8") as fh:
        fh.write(catalog_strip_svg(catalog))
    print(f"catalog: {len(nus)} graphs, mask {catalog.mask():#018x}")
    print(f"wrote {cfg.out}.json and {cfg.out}.svg")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="deadzones",
        description="Phase oscillator networks with dead-zone coupling",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON file with flag values (flags override)")

    sp = sub.add_parser("effective", help="effective coupling graph at a phase point")
    common(sp)
    sp.add_argument("--coupling", help="coupling spec JSON file")
    sp.add_argument("--theta", help="comma-separated angles, e.g. 0,2pi/3,4pi/3")
    sp.add_argument("--structural", help="structural graph literal (default: complete)")
    sp.set_defaults(cls=EffectiveConfig, fn=cmd_effective)

    sp = sub.add_parser("raster", help="rasterize the n=3 torus partition")
    common(sp)
    sp.add_argument("--coupling")
    sp.add_argument("--resolution", type=int)
    sp.add_argument("--out", help="output prefix for .csv and .svg")
    sp.add_argument("--structural")
    sp.set_defaults(cls=RasterConfig, fn=cmd_raster)

    sp = sub.add_parser("simulate", help="integrate a trajectory and its graph events")
    common(sp)
    sp.add_argument("--coupling")
    sp.add_argument("--theta0")
    sp.add_argument("--t-end", dest="t_end", type=float)
    sp.add_argument("--dt", type=float)
    sp.add_argument("--stride", type=int)
    sp.add_argument("--out")
    sp.add_argument("--structural")
    sp.add_argument("--overlay", action="store_const", const=True)
    sp.add_argument("--overlay-resolution", dest="overlay_resolution", type=int)
    sp.set_defaults(cls=SimulateConfig, fn=cmd_simulate)

    sp = sub.add_parser("realize", help="construct a coupling realizing a target graph")
    common(sp)
    sp.add_argument("--target", help="graph literal or graph number")
    sp.add_argument("--generic", dest="mode", action="store_const", const="generic")
    sp.add_argument("--stable", dest="mode", action="store_const", const="stable")
    sp.add_argument(
        "--delta", nargs=2, metavar=("A", "DELTA"), dest="delta_pair",
        help="delta construction: gap parameter and zone width",
    )
    sp.add_argument("--theta", help="phase point for --generic")
    sp.add_argument("--structural", help="structural graph for --stable")
    sp.add_argument("--omega", type=float)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out")
    sp.set_defaults(cls=RealizeConfig, fn=cmd_realize)

    sp = sub.add_parser("catalog", help="catalog realized graphs over a sample")
    common(sp)
    sp.add_argument("--coupling")
    sp.add_argument("--sampler", help="grid:R or random:M:SEED")
    sp.add_argument("--out", help="output prefix for .json and .svg")
    sp.add_argument("--structural")
    sp.set_defaults(cls=CatalogConfig, fn=cmd_catalog)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "delta_pair", None) is not None:
        args.mode = "delta"
        args.a, args.delta = args.delta_pair
    cfg = _merge_config(args, args.cls)
    return args.fn(cfg)


def main(argv=None) -> int:
    try:
        code = run(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_PRECONDITION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        code = EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
