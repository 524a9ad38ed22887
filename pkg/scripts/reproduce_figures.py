#!/usr/bin/env python3
"""Regenerate the reference artifacts for the four modulated-KS couplings.

For each coupling (symmetric narrow, wide asymmetric, shifted asymmetric,
and the (a, b) = (1.0, 0.5) example) this writes, under the output
directory:

  <name>.raster.csv / .svg   torus partition coloured by effective graph
  <name>.catalog.json / .svg realized-graph catalog (grid sampler, R=400)
  <name>.portrait.svg        partition overlaid with trajectories from a
                             12 x 12 grid of starts

plus stable.cert.json, a stable-realization certificate for the directed
3-cycle, re-verified before writing.

Usage: python scripts/reproduce_figures.py [OUTDIR] [--resolution R]
"""

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from deadzones.angles import TWO_PI
from deadzones.coupling import CouplingFunction, coupling_to_dict
from deadzones.dynamics import integrate
from deadzones.effective import (
    GridSampler,
    PhasePoint,
    StructuralNetwork,
    catalog_realised,
    raster_cir,
)
from deadzones.graphs import cycle_graph
from deadzones.realize import realize_stable, save_certificate
from deadzones.svgplot import catalog_strip_svg, raster_svg

COUPLINGS = {
    "sym_narrow": (math.pi, math.pi / 6),
    "asym_wide": (11 * math.pi / 12, 7 * math.pi / 12),
    "asym_shifted": (7 * math.pi / 24, 5 * math.pi / 8),
    "unit": (1.0, 0.5),
}


def trajectories(net: StructuralNetwork, t_end: float = 20.0) -> list[np.ndarray]:
    out = []
    for i in range(12):
        for j in range(12):
            p1 = (i + 0.5) * TWO_PI / 12
            p2 = (j + 0.5) * TWO_PI / 12
            traj = integrate(net, PhasePoint.of([0.0, p1, p1 + p2]), t_end=t_end, stride=50)
            phi = np.stack(
                [
                    np.mod(traj.states[:, 1] - traj.states[:, 0], TWO_PI),
                    np.mod(traj.states[:, 2] - traj.states[:, 1], TWO_PI),
                ],
                axis=1,
            )
            out.append(phi)
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", nargs="?", default="out")
    ap.add_argument("--resolution", type=int, default=300)
    args = ap.parse_args(argv)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    for name, (a, b) in COUPLINGS.items():
        g = CouplingFunction.kuramoto_sakaguchi(a, b)
        net = StructuralNetwork.all_to_all(3, g)
        (outdir / f"{name}.coupling.json").write_text(
            json.dumps(coupling_to_dict(g), indent=2) + "\n"
        )

        grid = raster_cir(net, args.resolution)
        with open(outdir / f"{name}.raster.csv", "w", encoding="utf-8") as fh:
            grid.to_csv(fh)
        (outdir / f"{name}.raster.svg").write_text(raster_svg(grid))

        catalog = catalog_realised(net, GridSampler(resolution=400))
        (outdir / f"{name}.catalog.json").write_text(
            json.dumps(
                {"mask": catalog.mask(), "nu_values": catalog.nu_values()}, indent=2
            )
            + "\n"
        )
        (outdir / f"{name}.catalog.svg").write_text(catalog_strip_svg(catalog))

        (outdir / f"{name}.portrait.svg").write_text(
            raster_svg(grid, trajectories(net))
        )
        print(f"{name}: {len(catalog.nu_values())} graphs realized")

    res = realize_stable(cycle_graph(3, [1, 2, 3]), seed=2026)
    save_certificate(
        res.certificate, outdir / "stable.cert.json", omega=res.equilibrium.omega
    )
    print(f"stable 3-cycle: {res.report.summary()}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
