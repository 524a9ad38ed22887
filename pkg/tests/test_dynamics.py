import math

import numpy as np
import pytest

from deadzones.angles import TWO_PI, wrap
from deadzones.coupling import CircleArc, CouplingFunction, make_bump_profile
from deadzones.dynamics import (
    StabilityProbe,
    Trajectory,
    eval_field,
    field_jacobian_fd,
    flow_state,
    graph_itinerary,
    integrate,
    phase_differences,
)
from deadzones.dynamics import test_stable_realization as probe_stable_realization
from deadzones.effective import (
    PhasePoint,
    StructuralNetwork,
    effective_graph,
    ordered_phase_differences,
    splay_point,
    sync_point,
)
from deadzones.errors import PreconditionError
from deadzones.graphs import DirectedGraph, symmetric_group
from deadzones.realize import realize_stable

from conftest import random_coupling


def lz_interval(start: float, width: float) -> CouplingFunction:
    support = CircleArc(start, width)
    return CouplingFunction.piecewise(
        [make_bump_profile(wrap(start + width / 2.0), support, 0.0, 1.0)]
    )


def fig_a_net() -> StructuralNetwork:
    return StructuralNetwork.all_to_all(
        3, CouplingFunction.kuramoto_sakaguchi(math.pi, math.pi / 6)
    )


def cdist(a, b) -> float:
    d = np.abs(np.mod(np.asarray(a) - np.asarray(b), TWO_PI))
    return float(np.minimum(d, TWO_PI - d).max())


class TestEvalField:
    def test_sync_all_to_all(self):
        g = CouplingFunction.kuramoto_sakaguchi(1.0, 0.5)
        net = StructuralNetwork.all_to_all(5, g, omega=2.0)
        out = eval_field(net, sync_point(5, 0.4))
        assert out == pytest.approx([2.0 + 4 * g.eval(0.0)] * 5, rel=1e-14)

    def test_fully_dead_is_pure_drift(self):
        g = lz_interval(0.975, 0.05)
        net = StructuralNetwork.all_to_all(3, g, omega=1.25)
        out = eval_field(net, PhasePoint.of([0.0, 2.0, 4.0]))
        assert np.array_equal(out, [1.25, 1.25, 1.25])

    def test_two_oscillator_formula(self):
        g = CouplingFunction.kuramoto_sakaguchi(1.0, 0.5)
        net = StructuralNetwork.all_to_all(2, g, omega=0.5)
        c = 0.8
        out = eval_field(net, PhasePoint.of([0.0, c]))
        assert out[0] == 0.5 + g.eval(c)  # oscillator 1 hears theta_2 - theta_1
        assert out[1] == 0.5 + g.eval(-c)

    def test_jacobian_structure(self, rng):
        g = random_coupling(rng)
        net = StructuralNetwork.all_to_all(3, g)
        theta = PhasePoint.of(rng.uniform(0, TWO_PI, 3))
        jac = field_jacobian_fd(net, theta)
        h = effective_graph(net, theta)
        for j in range(1, 4):
            for k in range(1, 4):
                if j != k and not h.has_edge(j, k):
                    if net.g.dead_zones.boundary_distance(theta[j] - theta[k]) > 1e-4:
                        assert abs(jac[k - 1, j - 1]) < 1e-8


class TestIntegrate:
    def test_pure_drift_constant_differences(self):
        g = lz_interval(0.975, 0.05)
        net = StructuralNetwork.all_to_all(3, g)
        traj = integrate(net, PhasePoint.of([0.0, 2.0, 4.0]), t_end=100.0, stride=1000)
        assert len(traj.events) == 0
        diffs = traj.phase_differences()
        assert np.abs(diffs - diffs[0]).max() < 1e-10

    def test_sync_invariant(self, rng):
        g = random_coupling(rng, include_zero=True)
        net = StructuralNetwork.all_to_all(3, g)
        traj = integrate(net, sync_point(3, 0.7), t_end=50.0, stride=500)
        spread = traj.phase_differences()
        assert cdist(spread, np.zeros_like(spread)) < 1e-10

    def test_sample_times_and_event_chain(self):
        net = fig_a_net()
        theta0 = PhasePoint.of([0.0, 0.5 * TWO_PI / 12, 2.0 * TWO_PI / 12])
        traj = integrate(net, theta0, t_end=20.0, stride=100)
        assert np.all(np.diff(traj.times) > 0)
        assert traj.times[0] == 0.0 and traj.times[-1] == pytest.approx(20.0)
        assert len(traj.events) >= 2
        for ev, nxt in zip(traj.events, traj.events[1:]):
            assert 0.0 <= ev.t <= nxt.t <= 20.0
            assert ev.after == nxt.before

    def test_graph_constant_between_events(self):
        net = fig_a_net()
        theta0 = PhasePoint.of([0.0, 0.5 * TWO_PI / 12, 2.0 * TWO_PI / 12])
        traj = integrate(net, theta0, t_end=10.0, stride=50)
        boundaries = [0.0] + [ev.t for ev in traj.events] + [traj.t_end]
        segment_graphs = [traj.initial_graph] + [ev.after for ev in traj.events]
        for t, row in zip(traj.times, traj.states):
            # skip samples indistinguishably close to an event time
            if min(abs(t - b) for b in boundaries) < 1e-9:
                continue
            seg = max(i for i, b in enumerate(boundaries[:-1]) if b <= t)
            assert effective_graph(net, PhasePoint.of(row)) == segment_graphs[seg]

    def test_multi_region_itinerary_exists(self):
        net = fig_a_net()
        found = False
        for i in range(12):
            for j in range(12):
                p1 = (i + 0.5) * TWO_PI / 12
                p2 = (j + 0.5) * TWO_PI / 12
                traj = integrate(net, PhasePoint.of([0.0, p1, p1 + p2]), t_end=20.0, stride=2000)
                if len(traj.itinerary()) >= 2:
                    found = True
                    break
            if found:
                break
        assert found

    def test_validation(self):
        net = fig_a_net()
        with pytest.raises(PreconditionError):
            integrate(net, splay_point(3), t_end=0.0)
        with pytest.raises(PreconditionError):
            integrate(net, splay_point(3), t_end=1.0, dt=-1e-3)


class TestTrajectoryViews:
    def test_phase_differences_reference_first(self):
        net = fig_a_net()
        traj = integrate(net, splay_point(3), t_end=0.01, stride=10)
        assert traj.phase_differences()[0] == pytest.approx([TWO_PI / 3, 2 * TWO_PI / 3])

    def test_itinerary_event_free(self):
        g = lz_interval(0.975, 0.05)
        net = StructuralNetwork.all_to_all(3, g)
        traj = integrate(net, PhasePoint.of([0.0, 2.0, 4.0]), t_end=5.0)
        it = graph_itinerary(traj)
        assert len(it) == 1
        assert it[0][1] == pytest.approx(5.0)

    def test_itinerary_counts_and_dwell(self):
        net = fig_a_net()
        theta0 = PhasePoint.of([0.0, 0.5 * TWO_PI / 12, 2.0 * TWO_PI / 12])
        traj = integrate(net, theta0, t_end=20.0, stride=2000)
        it = traj.itinerary()
        assert len(it) == len(traj.events) + 1
        assert sum(d for _, d in it) == pytest.approx(traj.t_end)

    def test_equilibrium_differences_constant(self):
        res = realize_stable(DirectedGraph.from_nu(25), seed=5)
        net = StructuralNetwork(graph=res.structural, omega=1.0, g=res.certificate.g)
        traj = integrate(net, res.equilibrium.theta, t_end=10.0, stride=100)
        diffs = phase_differences(traj)
        assert np.abs(diffs - diffs[0]).max() < 1e-8


class TestNumerics:
    def test_rk4_order(self):
        # smooth analytic coupling, gentle steepness; still-transient horizon
        g = CouplingFunction.kuramoto_sakaguchi(2.0, 1.0, eps=0.5, alpha=1.3)
        net = StructuralNetwork.all_to_all(3, g)
        theta0 = PhasePoint.of([0.0, 1.0, 3.5])

        def terminal(dt):
            return integrate(net, theta0, t_end=5.0, dt=dt, stride=10**9).states[-1]

        ref = terminal(0.02 / 64)
        ratio = cdist(terminal(0.02), ref) / cdist(terminal(0.01), ref)
        assert 12.0 <= ratio <= 20.0

    def test_phase_shift_invariance(self):
        net = fig_a_net()
        theta0 = PhasePoint.of([0.25, 1.5, 4.75])
        t1 = integrate(net, theta0, t_end=10.0, stride=10**9).states[-1]
        t2 = integrate(net, theta0.shifted(0.5), t_end=10.0, stride=10**9).states[-1]
        assert cdist(wrap(t1 + 0.5), t2) < 1e-9

    def test_permutation_equivariance(self):
        net = fig_a_net()
        theta0 = PhasePoint.of([0.25, 1.5, 4.75])
        base = integrate(net, theta0, t_end=10.0, stride=10**9).states[-1]
        for gamma in symmetric_group(3):
            moved = integrate(net, theta0.permuted(gamma), t_end=10.0, stride=10**9).states[-1]
            expect = PhasePoint.of(base).permuted(gamma).array()
            assert cdist(expect, moved) < 1e-9

    def test_event_times_sit_on_boundaries(self):
        net = fig_a_net()
        theta0 = PhasePoint.of([0.0, 0.5 * TWO_PI / 12, 2.0 * TWO_PI / 12])
        traj = integrate(net, theta0, t_end=10.0, stride=2000)
        assert traj.events
        for ev in traj.events[:8]:
            th = flow_state(net, theta0, ev.t)
            margin = min(
                net.g.dead_zones.boundary_distance(d)
                for d in ordered_phase_differences(th).values()
            )
            assert margin < 1e-5


class TestStableRealizationProbe:
    def test_positive_for_stable_certificate(self):
        res = realize_stable(DirectedGraph.complete(3), seed=1)
        net = StructuralNetwork(graph=res.structural, omega=1.0, g=res.certificate.g)
        probe = StabilityProbe(center=res.equilibrium.theta, radius=1e-2, count=20,
                               seed=2, t_end=50.0)
        report = probe_stable_realization(net, DirectedGraph.complete(3), probe)
        assert report.stably_realised
        assert all(r.event_count == 0 for r in report.runs)

    def test_positive_for_empty_region(self, rng):
        # inside the empty-graph region the dynamics are pure drift
        g = lz_interval(0.975, 0.05)
        net = StructuralNetwork.all_to_all(3, g)
        probe = StabilityProbe(center=PhasePoint.of([0.0, 2.0, 4.0]), radius=1e-2,
                               count=10, seed=3, t_end=20.0)
        report = probe_stable_realization(net, DirectedGraph.empty(3), probe)
        assert report.stably_realised

    def test_negative_across_boundary(self):
        # probe straddling the boundary between a live pair and total decoupling
        g = lz_interval(0.95, 0.1)
        net = StructuralNetwork.all_to_all(2, g)
        target = DirectedGraph.from_edges(2, [(2, 1)])
        probe = StabilityProbe(center=PhasePoint.of([0.0, 0.95]), radius=2e-2,
                               count=20, seed=4, t_end=20.0)
        report = probe_stable_realization(net, target, probe)
        assert not report.stably_realised
        terminals = {r.terminal_graph for r in report.runs}
        assert len(terminals) >= 2
