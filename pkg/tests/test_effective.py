import io
import itertools
import math

import numpy as np
import pytest

from deadzones.angles import TWO_PI, wrap
from deadzones.coupling import CircleArc, CouplingFunction, make_bump_profile
from deadzones.effective import (
    Catalog,
    GridSampler,
    PhasePoint,
    RandomSampler,
    SkewProduct,
    StructuralNetwork,
    catalog_realised,
    effective_graph,
    interior_margin,
    ordered_phase_differences,
    predict_splay_cycles,
    raster_cir,
    region_membership,
    skew_product_check,
    splay_point,
    sync_point,
)
from deadzones.errors import BoundaryError, PreconditionError
from deadzones.graphs import (
    DirectedGraph,
    apply_permutation,
    automorphism_group,
    connectivity_class,
    graph_isotropy,
    path_graph,
    point_isotropy,
    random_graph,
    symmetric_group,
    undirected_path_graph,
)

from conftest import random_coupling

UNDIRECTED_NUS = {0, 3, 12, 15, 48, 51, 60, 63}


def lz_interval(start: float, width: float) -> CouplingFunction:
    support = CircleArc(start, width)
    return CouplingFunction.piecewise(
        [make_bump_profile(wrap(start + width / 2.0), support, 0.0, 1.0)]
    )


def n2_table_coupling(a: float = math.pi / 4) -> CouplingFunction:
    """Single live zone [-a, 2a]: realizes all four two-oscillator graphs."""
    return lz_interval(-a, 3 * a)


def ks_net(n: int, a: float, b: float) -> StructuralNetwork:
    return StructuralNetwork.all_to_all(n, CouplingFunction.kuramoto_sakaguchi(a, b))


class TestPhasePoints:
    def test_special_points(self):
        assert splay_point(3).angles == pytest.approx((0.0, TWO_PI / 3, 2 * TWO_PI / 3))
        assert splay_point(2).angles == pytest.approx((0.0, math.pi))
        assert sync_point(4, 1.0).angles == (1.0, 1.0, 1.0, 1.0)

    def test_reduction_idempotent(self):
        p = PhasePoint.of([7.0, -1.0])
        assert PhasePoint.of(p.angles).angles == p.angles

    def test_min_size(self):
        with pytest.raises(PreconditionError):
            PhasePoint.of([1.0])

    def test_permutation_action_left(self):
        # (gamma theta)_{gamma(k)} = theta_k
        from deadzones.graphs import Permutation

        theta = PhasePoint.of([0.1, 0.2, 0.3])
        gamma = Permutation((2, 3, 1))
        moved = theta.permuted(gamma)
        for k in range(1, 4):
            assert moved[gamma(k)] == theta[k]


class TestEffectiveGraph:
    def test_two_oscillator_case_table(self):
        # single dead zone, live zone [-a, 2a]: the four regions of c
        a = math.pi / 4
        net = StructuralNetwork.all_to_all(2, n2_table_coupling(a))
        cases = {
            math.pi / 8: DirectedGraph.complete(2),
            -math.pi / 8: DirectedGraph.complete(2),
            3 * math.pi / 8: DirectedGraph.from_edges(2, [(2, 1)]),
            -3 * math.pi / 8: DirectedGraph.from_edges(2, [(1, 2)]),
            0.9 * math.pi: DirectedGraph.empty(2),
            -0.9 * math.pi: DirectedGraph.empty(2),
        }
        for c, expect in cases.items():
            assert effective_graph(net, PhasePoint.of([0.0, c])) == expect

    def test_no_dead_zone_returns_structural(self, rng):
        g = CouplingFunction.kuramoto_sakaguchi(1.0, 0.0)
        for _ in range(10):
            a = random_graph(4, rng)
            net = StructuralNetwork(graph=a, omega=1.0, g=g)
            theta = PhasePoint.of(rng.uniform(0, TWO_PI, 4))
            assert effective_graph(net, theta) == a

    def test_sync_with_dead_origin_is_empty(self, rng):
        g = random_coupling(rng, include_zero=False)
        net = StructuralNetwork.all_to_all(3, g)
        assert effective_graph(net, sync_point(3)) == DirectedGraph.empty(3)

    def test_boundary_point_counts_dead(self):
        g = lz_interval(1.0, 1.0)  # dead zone [2.0, 2*pi + 1.0]
        net = StructuralNetwork.all_to_all(2, g)
        h = effective_graph(net, PhasePoint.of([2.0, 0.0]))  # theta_1 - theta_2 = 2.0
        assert not h.has_edge(1, 2)

    def test_region_membership(self, rng):
        g = random_coupling(rng)
        net = StructuralNetwork.all_to_all(3, g)
        theta = PhasePoint.of(rng.uniform(0, TWO_PI, 3))
        h = effective_graph(net, theta)
        assert region_membership(net, theta, h)
        assert not region_membership(net, theta, DirectedGraph(3, h.bits ^ 1))


class TestSymmetries:
    def test_equivariance_exhaustive_s3(self, rng):
        # effective_graph(gamma theta) == gamma . effective_graph(theta)
        group = symmetric_group(3)
        for _ in range(50):
            g = random_coupling(rng)
            net = StructuralNetwork.all_to_all(3, g)
            theta = PhasePoint.of(rng.uniform(0, TWO_PI, 3))
            h = effective_graph(net, theta)
            for gamma in group:
                assert effective_graph(net, theta.permuted(gamma)) == apply_permutation(gamma, h)

    def test_equivariance_sampled_n4(self, rng):
        group = symmetric_group(4)
        g = random_coupling(rng)
        net = StructuralNetwork.all_to_all(4, g)
        for _ in range(20):
            theta = PhasePoint.of(rng.uniform(0, TWO_PI, 4))
            h = effective_graph(net, theta)
            for idx in rng.integers(0, len(group), 8):
                gamma = group[idx]
                assert effective_graph(net, theta.permuted(gamma)) == apply_permutation(gamma, h)

    def test_isotropy_containment(self, rng):
        # point isotropy is contained in the effective graph's isotropy
        for trial in range(100):
            n = int(rng.integers(3, 5))
            a = DirectedGraph.complete(n) if trial % 2 else random_graph(n, rng)
            group = automorphism_group(a)
            g = random_coupling(rng)
            net = StructuralNetwork(graph=a, omega=1.0, g=g)
            if trial % 3 == 0:
                vals = rng.uniform(0, TWO_PI, 2)
                theta = PhasePoint.of(vals[rng.integers(0, 2, n)])  # repeated coords
            elif trial % 3 == 1:
                theta = sync_point(n, float(rng.uniform(0, TWO_PI)))
            else:
                theta = PhasePoint.of(rng.uniform(0, TWO_PI, n))
            sig_theta = {p.images for p in point_isotropy(theta.angles, group)}
            sig_graph = {p.images for p in graph_isotropy(effective_graph(net, theta), group)}
            assert sig_theta <= sig_graph

    def test_sync_dichotomy(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 7))
            g = random_coupling(rng)
            net = StructuralNetwork.all_to_all(n, g)
            h = effective_graph(net, sync_point(n, float(rng.uniform(0, TWO_PI))))
            assert h in (DirectedGraph.empty(n), DirectedGraph.complete(n))


def _independent_partition_exists(h: DirectedGraph, blocks: int) -> bool:
    """Brute force: can vertices be coloured with `blocks` colours so that no
    edge (either direction) joins two vertices of the same colour?"""
    n = h.n
    for colours in itertools.product(range(blocks), repeat=n - 1):
        assign = (0,) + colours
        ok = True
        for j, k in h.edges():
            if assign[j - 1] == assign[k - 1]:
                ok = False
                break
        if ok:
            return True
    return False


class TestEqualSpacing:
    def test_trichotomy(self, rng):
        n = 6
        seen = set()
        for _ in range(100):
            g = random_coupling(rng)
            a = float(rng.uniform(0.05, TWO_PI / n - 0.05))
            base = float(rng.uniform(0, TWO_PI))
            theta = PhasePoint.of([base + k * a for k in range(n)])
            net = StructuralNetwork.all_to_all(n, g)
            h = effective_graph(net, theta)
            fwd = path_graph(n, list(range(n, 0, -1)))  # edges (k+1, k)
            bwd = path_graph(n, list(range(1, n + 1)))  # edges (k, k+1)
            dead_a = g.in_dead_zone(a)
            dead_ma = g.in_dead_zone(TWO_PI - a)
            case = (dead_a, dead_ma)
            seen.add(case)
            if case == (False, True):
                assert fwd.is_subgraph_of(h) and not bwd.is_subgraph_of(h)
            elif case == (True, False):
                assert bwd.is_subgraph_of(h) and not fwd.is_subgraph_of(h)
            elif case == (False, False):
                assert undirected_path_graph(n, list(range(1, n + 1))).is_subgraph_of(h)
            else:
                assert _independent_partition_exists(h, math.ceil(n / 2))
        assert len(seen) >= 3  # the random family hits most membership cases

    def test_bipartite_case_constructed(self):
        # both a and 2*pi - a dead: consecutive pairs are independent sets
        n = 6
        a = 0.9
        g = lz_interval(2 * a + 0.02, 0.5)  # live zone away from a and 2*pi - a
        theta = PhasePoint.of([k * a for k in range(n)])
        h = effective_graph(StructuralNetwork.all_to_all(n, g), theta)
        assert g.in_dead_zone(a) and g.in_dead_zone(TWO_PI - a)
        assert _independent_partition_exists(h, 3)


class TestSplayCycles:
    def test_three_oscillators(self):
        g = lz_interval(TWO_PI / 3 - 0.1, 0.2)  # 2*pi/3 live
        cycles = predict_splay_cycles(g, 3)
        assert len(cycles) == 1
        assert set(cycles[0].edges()) == {(2, 1), (3, 2), (1, 3)}

    def test_divisor_stride_two_cycles(self):
        g = lz_interval(math.pi - 0.1, 0.2)  # stride 2 of 4: difference pi
        cycles = predict_splay_cycles(g, 4)
        expected = {
            DirectedGraph.from_edges(4, [(1, 3), (3, 1)]),
            DirectedGraph.from_edges(4, [(2, 4), (4, 2)]),
        }
        assert set(cycles) == expected

    def test_containment_random(self, rng):
        for _ in range(100):
            n = int(rng.integers(3, 7))
            g = random_coupling(rng)
            net = StructuralNetwork.all_to_all(n, g)
            h = effective_graph(net, splay_point(n))
            for cyc in predict_splay_cycles(g, n):
                assert cyc.is_subgraph_of(h)

    def test_prime_dichotomy(self, rng):
        # five oscillators: empty at splay, or strongly connected
        for _ in range(50):
            g = random_coupling(rng)
            net = StructuralNetwork.all_to_all(5, g)
            h = effective_graph(net, splay_point(5))
            if h == DirectedGraph.empty(5):
                continue
            assert connectivity_class(h) == "strongly"


class TestSkewProduct:
    def test_product_for_empty(self, rng):
        g = random_coupling(rng, include_zero=False)
        net = StructuralNetwork.all_to_all(3, g)
        theta = sync_point(3, 0.3)
        if interior_margin(net, theta) > 1e-6:
            assert skew_product_check(net, theta, ((1,), (2, 3))) is SkewProduct.PRODUCT

    def test_single_edge_skew(self):
        # only edge (1,2) effective: vertex 1 drives {2,3}
        g = lz_interval(TWO_PI - 1.0 - 0.05, 0.1)  # live zone around -1.0
        a = DirectedGraph.from_edges(3, [(1, 2)])
        net = StructuralNetwork(graph=a, omega=1.0, g=g)
        theta = PhasePoint.of([0.0, 1.0, 3.0])  # theta_1 - theta_2 = -1.0 live
        assert effective_graph(net, theta).edges() == ((1, 2),)
        assert skew_product_check(net, theta, ((1,), (2, 3))) is SkewProduct.SKEW_V1_TO_V2
        assert skew_product_check(net, theta, ((2, 3), (1,))) is SkewProduct.SKEW_V2_TO_V1

    def test_complete_coupled(self):
        g = CouplingFunction.kuramoto_sakaguchi(1.0, 0.0)
        net = StructuralNetwork.all_to_all(3, g)
        theta = PhasePoint.of([0.2, 1.3, 2.9])
        assert skew_product_check(net, theta, ((1, 2), (3,))) is SkewProduct.COUPLED

    def test_boundary_error(self):
        g = lz_interval(1.0, 1.0)
        net = StructuralNetwork.all_to_all(2, g)
        theta = PhasePoint.of([2.0, 0.0])  # difference exactly on the boundary
        with pytest.raises(BoundaryError):
            skew_product_check(net, theta, ((1,), (2,)))

    def test_bad_partition(self):
        g = lz_interval(1.0, 1.0)
        net = StructuralNetwork.all_to_all(3, g)
        with pytest.raises(PreconditionError):
            skew_product_check(net, PhasePoint.of([0.1, 0.5, 1.7]), ((1,), (2,)))


class TestRaster:
    def test_no_dead_zone_all_complete(self):
        net = ks_net(3, 1.0, 0.0)
        grid = raster_cir(net, 32)
        assert grid.nu_values() == [63]

    def test_symmetric_zone_all_undirected(self, rng):
        g = lz_interval(7 * math.pi / 6, TWO_PI - math.pi / 3)  # DZ [5pi/6, 7pi/6]
        grid = raster_cir(StructuralNetwork.all_to_all(3, g), 64)
        assert set(grid.nu_values()) <= UNDIRECTED_NUS

    def test_narrow_symmetric_zone_splay_cell(self):
        g = lz_interval(7 * math.pi / 6, TWO_PI - math.pi / 3)
        grid = raster_cir(StructuralNetwork.all_to_all(3, g), 300)
        assert grid.nu[100, 100] == 63  # cell containing the splay point
        assert grid.nu[0, 0] == 63  # near sync

    def test_wide_symmetric_zone_splay_empty(self):
        g = lz_interval(5 * math.pi / 3, 2 * math.pi / 3)  # DZ [pi/3, 5pi/3]
        grid = raster_cir(StructuralNetwork.all_to_all(3, g), 300)
        assert grid.nu[100, 100] == 0
        assert grid.nu[0, 0] == 63

    def test_matches_pointwise_oracle(self, rng):
        g = random_coupling(rng)
        net = StructuralNetwork.all_to_all(3, g)
        grid = raster_cir(net, 17)
        phi = grid.phi_axis()
        for _ in range(30):
            i, j = rng.integers(0, 17, 2)
            theta = PhasePoint.of([0.0, phi[i], phi[i] + phi[j]])
            assert grid.nu[i, j] == effective_graph(net, theta).bits

    def test_determinism_and_thread_invariance(self, rng, monkeypatch):
        g = random_coupling(rng)
        net = StructuralNetwork.all_to_all(3, g)
        monkeypatch.setenv("DEADZONE_THREADS", "1")
        g1 = raster_cir(net, 96)
        monkeypatch.setenv("DEADZONE_THREADS", "4")
        g2 = raster_cir(net, 96)
        assert np.array_equal(g1.nu, g2.nu)
        buf1, buf2 = io.StringIO(), io.StringIO()
        g1.to_csv(buf1)
        g2.to_csv(buf2)
        assert buf1.getvalue() == buf2.getvalue()

    def test_validation(self):
        net = ks_net(3, 1.0, 0.5)
        with pytest.raises(PreconditionError):
            raster_cir(net, 1)
        with pytest.raises(PreconditionError):
            raster_cir(ks_net(4, 1.0, 0.5), 8)

    def test_structural_mask_respected(self):
        a = DirectedGraph.from_edges(3, [(1, 2), (2, 3)])
        net = StructuralNetwork(graph=a, omega=1.0, g=CouplingFunction.kuramoto_sakaguchi(1.0, 0.0))
        grid = raster_cir(net, 16)
        assert grid.nu_values() == [a.bits]


class TestCatalog:
    def test_no_dead_zone_single_graph(self):
        net = ks_net(4, 1.0, 0.0)
        cat = catalog_realised(net, RandomSampler(count=500, seed=11))
        assert cat.graphs == frozenset({DirectedGraph.complete(4)})

    def test_symmetric_zone_only_undirected(self):
        net = ks_net(3, math.pi, math.pi / 6)
        cat = catalog_realised(net, GridSampler(resolution=150))
        assert set(cat.nu_values()) <= UNDIRECTED_NUS

    def test_mask_round_trip(self):
        net = ks_net(3, 1.0, 0.5)
        cat = catalog_realised(net, GridSampler(resolution=100))
        mask = cat.mask()
        assert all(mask >> v & 1 for v in cat.nu_values())
        assert bin(mask).count("1") == len(cat.nu_values())

    def test_random_sampler_deterministic(self):
        net = ks_net(3, 1.0, 0.5)
        c1 = catalog_realised(net, RandomSampler(count=400, seed=7))
        c2 = catalog_realised(net, RandomSampler(count=400, seed=7))
        assert c1.graphs == c2.graphs

    def test_grid_matches_scalar_path_for_n2(self):
        net = StructuralNetwork.all_to_all(2, n2_table_coupling())
        cat = catalog_realised(net, GridSampler(resolution=64))
        assert len(cat.graphs) == 4  # all four two-oscillator graphs


def test_ordered_phase_differences():
    theta = PhasePoint.of([0.0, 1.0, 3.0])
    d = ordered_phase_differences(theta)
    assert d[(2, 1)] == pytest.approx(1.0)
    assert d[(1, 2)] == pytest.approx(TWO_PI - 1.0)
    assert len(d) == 6
