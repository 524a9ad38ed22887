"""Effective coupling graphs: which structural edges are active at a state.

For a network with structural graph A, coupling function g, and a phase point
theta, the effective coupling graph keeps the ordered edge (j, k) of A exactly
when the phase difference theta_j - theta_k lies outside the dead zones of g.
(For the analytic modulated-KS family the approximate dead zone is used.)
Phase space is partitioned into regions where this graph is constant; this
module computes graphs at points, predicts guaranteed cycles at the splay
configuration, classifies local (skew-)product structure, and rasterizes the
partition of the phase-difference torus for three oscillators.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .angles import TWO_PI, circle_dist, wrap
from .coupling import CouplingFunction
from .errors import BoundaryError, ConsistencyError, PreconditionError
from .graphs import DirectedGraph, Permutation, edge_bit, graph_number
from ._parallel import worker_count, run_chunked


@dataclass(frozen=True)
class PhasePoint:
    """A point on the N-torus; angles stored reduced to [0, 2*pi)."""

    angles: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(wrap(a)) for a in self.angles)
        if len(vals) < 2:
            raise PreconditionError("phase points need at least two oscillators")
        object.__setattr__(self, "angles", vals)

    @classmethod
    def of(cls, values) -> "PhasePoint":
        return cls(tuple(float(v) for v in values))

    @property
    def n(self) -> int:
        return len(self.angles)

    def array(self) -> np.ndarray:
        return np.array(self.angles, dtype=float)

    def __getitem__(self, k: int) -> float:
        """1-based component access: theta[k] = theta_k."""
        if not 1 <= k <= self.n:
            raise IndexError(k)
        return self.angles[k - 1]

    def shifted(self, c: float) -> "PhasePoint":
        return PhasePoint(tuple(a + c for a in self.angles))

    def permuted(self, gamma: Permutation) -> "PhasePoint":
        """Left action: (gamma . theta)_{gamma(k)} = theta_k."""
        if gamma.n != self.n:
            raise PreconditionError("permutation and point size mismatch")
        inv = gamma.inverse()
        return PhasePoint(tuple(self.angles[inv(i) - 1] for i in range(1, self.n + 1)))

    def close_to(self, other: "PhasePoint", tol: float = 1e-9) -> bool:
        return self.n == other.n and all(
            circle_dist(a, b) <= tol for a, b in zip(self.angles, other.angles)
        )


def sync_point(n: int, phi: float = 0.0) -> PhasePoint:
    """Full synchrony: all phases equal to phi."""
    return PhasePoint((phi,) * n)


def splay_point(n: int, phi: float = 0.0) -> PhasePoint:
    """Splay configuration: phases equally spaced by 2*pi/n."""
    return PhasePoint(tuple(phi + k * TWO_PI / n for k in range(n)))


@dataclass(frozen=True)
class StructuralNetwork:
    """Fixed interaction structure: graph A, common frequency, coupling g."""

    graph: DirectedGraph
    omega: float
    g: CouplingFunction

    @property
    def n(self) -> int:
        return self.graph.n

    @classmethod
    def all_to_all(cls, n: int, g: CouplingFunction, omega: float = 1.0) -> "StructuralNetwork":
        return cls(graph=DirectedGraph.complete(n), omega=omega, g=g)


def ordered_phase_differences(theta: PhasePoint) -> dict[tuple[int, int], float]:
    """All N(N-1) ordered differences theta_j - theta_k reduced to [0, 2*pi)."""
    return {
        (j, k): wrap(theta[j] - theta[k])
        for j in range(1, theta.n + 1)
        for k in range(1, theta.n + 1)
        if j != k
    }


def effective_graph(net: StructuralNetwork, theta: PhasePoint) -> DirectedGraph:
    """Edge (j, k) survives iff A_jk = 1 and theta_j - theta_k is not dead."""
    if theta.n != net.n:
        raise PreconditionError("phase point and network size mismatch")
    g = net.g
    edges = [
        (j, k)
        for j, k in net.graph.edges()
        if not g.in_dead_zone(theta[j] - theta[k])
    ]
    return DirectedGraph.from_edges(net.n, edges)


def region_membership(net: StructuralNetwork, theta: PhasePoint, h: DirectedGraph) -> bool:
    """True iff theta lies in the region realizing h exactly."""
    return effective_graph(net, theta) == h


# ---------------------------------------------------------------------------
# Splay-point cycles


def predict_splay_cycles(g: CouplingFunction, n: int) -> list[DirectedGraph]:
    """Cycles guaranteed to be subgraphs of the effective graph at splay.

    For each stride s in 1..n-1 with 2*pi*s/n in a live zone, every edge
    (r+s, r) is active at the splay point, because the corresponding phase
    difference equals 2*pi*s/n.  Those edges decompose into gcd(s, n)
    disjoint cycles when s divides n; otherwise the orbit of vertex 1 is
    emitted.
    """
    if n < 2:
        raise PreconditionError("need at least two oscillators")

    def stride_cycle(start: int, s: int) -> DirectedGraph:
        orbit = [start]
        while (orbit[-1] - 1 + s) % n + 1 != start:
            orbit.append((orbit[-1] - 1 + s) % n + 1)
        edges = [(orbit[(q + 1) % len(orbit)], orbit[q]) for q in range(len(orbit))]
        return DirectedGraph.from_edges(n, edges)

    out: list[DirectedGraph] = []
    for s in range(1, n):
        if g.in_dead_zone(s * TWO_PI / n):
            continue
        if n % s == 0:
            out.extend(stride_cycle(r, s) for r in range(1, s + 1))
        else:
            out.append(stride_cycle(1, s))
    return out


# ---------------------------------------------------------------------------
# Local (skew-)product structure


class SkewProduct(Enum):
    SKEW_V1_TO_V2 = "skew_v1_to_v2"
    SKEW_V2_TO_V1 = "skew_v2_to_v1"
    PRODUCT = "product"
    COUPLED = "coupled"


INTERIOR_TOL = 1e-6
JACOBIAN_NULL_TOL = 1e-8


def interior_margin(net: StructuralNetwork, theta: PhasePoint) -> float:
    """Distance of the nearest phase difference to a dead-zone boundary."""
    dz = net.g.dead_zones
    diffs = ordered_phase_differences(theta)
    return min((dz.boundary_distance(d) for d in diffs.values()), default=math.inf)


def skew_product_check(
    net: StructuralNetwork,
    theta: PhasePoint,
    partition: tuple[tuple[int, ...], tuple[int, ...]],
) -> SkewProduct:
    """Classify the local factorization induced by the effective graph's cut.

    The returned structure is cross-validated against a finite-difference
    Jacobian of the vector field: entries for absent effective edges must
    vanish below 1e-8.
    """
    v1, v2 = (tuple(sorted(p)) for p in partition)
    if sorted(v1 + v2) != list(range(1, net.n + 1)) or not v1 or not v2:
        raise PreconditionError(f"not a partition of 1..{net.n}: {partition}")
    if interior_margin(net, theta) <= INTERIOR_TOL:
        raise BoundaryError(
            "phase point too close to a region boundary for an interior classification"
        )
    h = effective_graph(net, theta)
    fwd = any(j in v1 and k in v2 for j, k in h.edges())
    bwd = any(j in v2 and k in v1 for j, k in h.edges())

    from .dynamics import field_jacobian_fd  # local import to avoid a cycle

    jac = field_jacobian_fd(net, theta)
    for j in range(1, net.n + 1):
        for k in range(1, net.n + 1):
            if j == k:
                continue
            if not h.has_edge(j, k) and abs(jac[k - 1, j - 1]) >= JACOBIAN_NULL_TOL:
                raise ConsistencyError(
                    f"Jacobian entry ({k},{j}) = {jac[k-1, j-1]:.3e} nonzero for absent edge ({j},{k})"
                )
    if fwd and not bwd:
        return SkewProduct.SKEW_V1_TO_V2
    if bwd and not fwd:
        return SkewProduct.SKEW_V2_TO_V1
    if not fwd and not bwd:
        return SkewProduct.PRODUCT
    return SkewProduct.COUPLED


# ---------------------------------------------------------------------------
# Rasterization of the phase-difference torus (three oscillators)


@dataclass(frozen=True)
class RasterGrid:
    """Graph numbers sampled at cell centers of the (phi1, phi2) torus.

    phi1 = theta_2 - theta_1 and phi2 = theta_3 - theta_2; cell (i, j) is
    centered at ((i+1/2) * 2*pi/R, (j+1/2) * 2*pi/R).
    """

    resolution: int
    nu: np.ndarray  # (R, R) uint8, indexed [i, j]

    def __post_init__(self):
        self.nu.setflags(write=False)

    def phi_axis(self) -> np.ndarray:
        return (np.arange(self.resolution) + 0.5) * TWO_PI / self.resolution

    def to_csv(self, fh) -> None:
        phi = self.phi_axis()
        fh.write("i,j,phi1,phi2,nu\n")
        for i in range(self.resolution):
            for j in range(self.resolution):
                fh.write(f"{i},{j},{phi[i]!r},{phi[j]!r},{self.nu[i, j]}\n")

    def nu_values(self) -> list[int]:
        return sorted(int(v) for v in np.unique(self.nu))


def _nu_grid(net: StructuralNetwork, phi1: np.ndarray, phi2: np.ndarray) -> np.ndarray:
    """Vectorized graph numbers for arrays of (phi1, phi2) pairs."""
    diffs = {
        (1, 2): -phi1,
        (2, 1): phi1,
        (1, 3): -(phi1 + phi2),
        (3, 1): phi1 + phi2,
        (2, 3): -phi2,
        (3, 2): phi2,
    }
    nu = np.zeros(phi1.shape, dtype=np.uint8)
    for (j, k), d in diffs.items():
        if not net.graph.has_edge(j, k):
            continue
        live = ~net.g.dead_mask(d)
        nu |= live.astype(np.uint8) << edge_bit(3, j, k)
    return nu


def raster_cir(net: StructuralNetwork, resolution: int) -> RasterGrid:
    """Rasterize the whole torus partition for a three-oscillator network."""
    if net.n != 3:
        raise PreconditionError("rasterization is implemented for n=3 only")
    if resolution < 2:
        raise PreconditionError("resolution must be at least 2")
    phi = (np.arange(resolution) + 0.5) * TWO_PI / resolution
    workers = worker_count()

    def compute_rows(rows: np.ndarray) -> np.ndarray:
        p1, p2 = np.meshgrid(phi[rows], phi, indexing="ij")
        return _nu_grid(net, p1, p2)

    if workers <= 1 or resolution < 64:
        nu = compute_rows(np.arange(resolution))
    else:
        chunks = np.array_split(np.arange(resolution), workers)
        nu = np.vstack(run_chunked(compute_rows, chunks, workers))
    return RasterGrid(resolution=resolution, nu=nu)


# ---------------------------------------------------------------------------
# Catalogs of realized graphs


@dataclass(frozen=True)
class GridSampler:
    resolution: int


@dataclass(frozen=True)
class RandomSampler:
    count: int
    seed: int


@dataclass(frozen=True)
class Catalog:
    """The set of effective coupling graphs found over a sample."""

    n: int
    graphs: frozenset[DirectedGraph]

    def nu_values(self) -> list[int]:
        if self.n != 3:
            raise PreconditionError("graph numbers are defined for n=3 only")
        return sorted(graph_number(h) for h in self.graphs)

    def mask(self) -> int:
        """64-bit presence mask over graph numbers (n=3)."""
        out = 0
        for nu in self.nu_values():
            out |= 1 << nu
        return out

    def union(self, other: "Catalog") -> "Catalog":
        if self.n != other.n:
            raise PreconditionError("catalog size mismatch")
        return Catalog(self.n, self.graphs | other.graphs)


def _catalog_from_masks(n: int, masks) -> Catalog:
    return Catalog(n, frozenset(DirectedGraph(n, int(b)) for b in masks))


def _edge_masks_random(net: StructuralNetwork, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(np.uint64(seed))
    theta = rng.uniform(0.0, TWO_PI, size=(count, net.n))
    masks = np.zeros(count, dtype=np.uint64)
    for j, k in net.graph.edges():
        live = ~net.g.dead_mask(theta[:, j - 1] - theta[:, k - 1])
        masks |= live.astype(np.uint64) << np.uint64(edge_bit(net.n, j, k))
    return masks


def catalog_realised(net: StructuralNetwork, sampler) -> Catalog:
    """Collect the distinct effective graphs over a deterministic sample."""
    if isinstance(sampler, GridSampler):
        if net.n == 3:
            grid = raster_cir(net, sampler.resolution)
            return _catalog_from_masks(3, np.unique(grid.nu))
        phi = (np.arange(sampler.resolution) + 0.5) * TWO_PI / sampler.resolution
        if sampler.resolution ** (net.n - 1) > 4_000_000:
            raise PreconditionError("grid sampler too large; use a random sampler")
        seen = set()
        for combo in itertools.product(phi, repeat=net.n - 1):
            theta = PhasePoint((0.0,) + tuple(np.cumsum(combo)))
            seen.add(effective_graph(net, theta))
        return Catalog(net.n, frozenset(seen))
    if isinstance(sampler, RandomSampler):
        masks = np.unique(_edge_masks_random(net, sampler.count, sampler.seed))
        return _catalog_from_masks(net.n, masks)
    raise PreconditionError(f"unknown sampler {sampler!r}")
