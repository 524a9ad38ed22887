"""Time evolution: the oscillator vector field, trajectories, and events.

Oscillator k obeys  d theta_k / dt = omega + sum_j A_jk g(theta_j - theta_k).
Integration is classical fixed-step RK4 (the field is globally smooth: dead
zones are flat plateaus, not discontinuities).  After each step the effective
coupling graph is re-derived; if it changed, the transition time is localized
by bisection on the step interval to within dt * 1e-6 and recorded as an
event.  Graph changes that revert within a single step can be missed at step
resolution; dwell times below 2*dt are retained, not filtered.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._parallel import run_chunked, worker_count
from .angles import wrap, wrap_signed
from .effective import PhasePoint, StructuralNetwork, effective_graph
from .errors import PreconditionError
from .graphs import DirectedGraph, edge_bit


def eval_field(net: StructuralNetwork, theta) -> np.ndarray:
    """Right-hand side of the oscillator equations at a phase point."""
    th = theta.array() if isinstance(theta, PhasePoint) else np.asarray(theta, dtype=float)
    if th.shape != (net.n,):
        raise PreconditionError("phase point and network size mismatch")
    out = np.full(net.n, float(net.omega))
    for j, k in net.graph.edges():
        out[k - 1] += net.g.eval(th[j - 1] - th[k - 1])
    return out


@dataclass(frozen=True)
class VectorField:
    """Callable wrapper around the network vector field."""

    net: StructuralNetwork

    def __call__(self, theta) -> np.ndarray:
        return eval_field(self.net, theta)


def field_jacobian_fd(net: StructuralNetwork, theta, step: float = 1e-6) -> np.ndarray:
    """Central finite-difference Jacobian J[k-1, j-1] = dF_k / dtheta_j."""
    th = theta.array() if isinstance(theta, PhasePoint) else np.asarray(theta, dtype=float)
    jac = np.zeros((net.n, net.n))
    for j in range(net.n):
        plus = th.copy()
        minus = th.copy()
        plus[j] += step
        minus[j] -= step
        jac[:, j] = (eval_field(net, plus) - eval_field(net, minus)) / (2.0 * step)
    return jac


# ---------------------------------------------------------------------------
# Kernel plumbing


@functools.lru_cache(maxsize=128)
def _compiled_coupling(g):
    return _kernels.compile_coupling(g)


@functools.lru_cache(maxsize=256)
def _edge_arrays(graph: DirectedGraph):
    edges = graph.edges()
    src = np.array([j - 1 for j, _ in edges], dtype=np.int64)
    dst = np.array([k - 1 for _, k in edges], dtype=np.int64)
    bitpos = np.array([edge_bit(graph.n, j, k) for j, k in edges], dtype=np.int64)
    return src, dst, bitpos


def _run_kernel(net, th0: np.ndarray, nsteps: int, dt: float, stride: int,
                max_events: int, drift_steps: int):
    cc = _compiled_coupling(net.g)
    src, dst, bitpos = _edge_arrays(net.graph)
    n_sample_cap = (nsteps // stride + 2) if stride > 0 else 1
    sample_th = np.empty((n_sample_cap, net.n))
    ev_t = np.empty(max_events)
    ev_before = np.empty(max_events, dtype=np.int64)
    ev_after = np.empty(max_events, dtype=np.int64)
    ks_a, ks_b, ks_eps, ks_alpha = cc.ks_params
    out = _kernels._integrate_core(
        th0, nsteps, dt, float(net.omega), src, dst, bitpos,
        cc.mode, cc.breaks, cc.seg_live, cc.seg_center, cc.seg_value, cc.seg_slope,
        cc.seg_width, cc.seg_sup_start, ks_a, ks_b, ks_eps, ks_alpha,
        stride, sample_th, ev_t, ev_before, ev_after, drift_steps,
    )
    th_final, th_pre, n_samples, n_events, truncated, init_mask, final_mask = out
    return {
        "final": th_final,
        "pre": th_pre,
        "samples": sample_th[:n_samples],
        "n_events": n_events,
        "ev_t": ev_t[:min(n_events, max_events)].copy(),
        "ev_before": ev_before[:min(n_events, max_events)].copy(),
        "ev_after": ev_after[:min(n_events, max_events)].copy(),
        "truncated": bool(truncated),
        "init_mask": int(init_mask),
        "final_mask": int(final_mask),
    }


# ---------------------------------------------------------------------------
# Trajectories


@dataclass(frozen=True)
class GraphEvent:
    t: float
    before: DirectedGraph
    after: DirectedGraph


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution plus the ordered list of effective-graph transitions."""

    net: StructuralNetwork
    theta0: PhasePoint
    t_end: float
    dt: float
    stride: int
    times: np.ndarray  # (S,)
    states: np.ndarray  # (S, N), reduced to [0, 2*pi)
    events: tuple[GraphEvent, ...]
    initial_graph: DirectedGraph
    final_graph: DirectedGraph
    events_truncated: bool = False

    @property
    def n(self) -> int:
        return self.net.n

    def sample_points(self) -> list[PhasePoint]:
        return [PhasePoint.of(row) for row in self.states]

    def phase_differences(self) -> np.ndarray:
        """phi_i = theta_{i+1} - theta_1 mod 2*pi at each sample."""
        return wrap(self.states[:, 1:] - self.states[:, :1])

    def itinerary(self) -> list[tuple[DirectedGraph, float]]:
        """Run-length encoding: k events yield k+1 entries; dwells sum to t_end."""
        out = []
        cur = self.initial_graph
        t_prev = 0.0
        for ev in self.events:
            out.append((cur, ev.t - t_prev))
            cur = ev.after
            t_prev = ev.t
        out.append((cur, self.t_end - t_prev))
        return out

    def to_csv(self, fh) -> None:
        n = self.n
        head = ",".join(f"theta_{i}" for i in range(1, n + 1))
        tail = "nu" if n == 3 else "graph"
        fh.write(f"t,{head},{tail}\n")
        for t, row in zip(self.times, self.states):
            g = effective_graph(self.net, PhasePoint.of(row))
            # graph literals contain commas, so they are quoted
            label = str(g.bits) if n == 3 else f'"{g.to_literal()}"'
            vals = ",".join(repr(float(v)) for v in row)
            fh.write(f"{t!r},{vals},{label}\n")

    def events_to_csv(self, fh) -> None:
        fh.write("t_event,before,after\n")
        for ev in self.events:
            fh.write(f'{ev.t!r},"{ev.before.to_literal()}","{ev.after.to_literal()}"\n')


def integrate(
    net: StructuralNetwork,
    theta0: PhasePoint,
    t_end: float,
    dt: float = 1e-3,
    stride: int = 10,
    max_events: int = 4096,
) -> Trajectory:
    """Integrate the network ODE and record effective-graph transition events."""
    if dt <= 0 or t_end <= 0:
        raise PreconditionError("need dt > 0 and t_end > 0")
    if stride <= 0:
        raise PreconditionError("stride must be positive")
    nsteps = max(1, int(round(t_end / dt)))
    res = _run_kernel(net, theta0.array(), nsteps, dt, stride, max_events, 0)
    rec_steps = [0] + list(range(stride, nsteps + 1, stride))
    if rec_steps[-1] != nsteps:
        rec_steps.append(nsteps)
    times = np.array([s * dt for s in rec_steps])
    if len(times) != len(res["samples"]):
        raise AssertionError("sample bookkeeping out of sync with kernel")
    events = tuple(
        GraphEvent(
            t=float(t),
            before=DirectedGraph(net.n, int(b)),
            after=DirectedGraph(net.n, int(a)),
        )
        for t, b, a in zip(res["ev_t"], res["ev_before"], res["ev_after"])
    )
    return Trajectory(
        net=net,
        theta0=theta0,
        t_end=nsteps * dt,
        dt=dt,
        stride=stride,
        times=times,
        states=wrap(res["samples"]),
        events=events,
        initial_graph=DirectedGraph(net.n, res["init_mask"]),
        final_graph=DirectedGraph(net.n, res["final_mask"]),
        events_truncated=res["truncated"],
    )


def flow_state(net: StructuralNetwork, theta0: PhasePoint, t: float, dt: float = 1e-3) -> PhasePoint:
    """State at an arbitrary time: whole RK4 steps plus one partial step.

    Matches the convention used by event localization, where times inside a
    step are reached by a single partial RK4 step from the step start.
    """
    if t < 0 or dt <= 0:
        raise PreconditionError("need t >= 0 and dt > 0")
    nsteps = int(t / dt)
    th = theta0.array()
    if nsteps > 0:
        th = _run_kernel(net, th, nsteps, dt, 0, 16, 0)["final"]
    rem = t - nsteps * dt
    if rem > 0:
        k1 = eval_field(net, th)
        k2 = eval_field(net, th + 0.5 * rem * k1)
        k3 = eval_field(net, th + 0.5 * rem * k2)
        k4 = eval_field(net, th + rem * k3)
        th = th + (rem / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return PhasePoint.of(th)


def phase_differences(trajectory: Trajectory) -> np.ndarray:
    return trajectory.phase_differences()


def graph_itinerary(trajectory: Trajectory) -> list[tuple[DirectedGraph, float]]:
    return trajectory.itinerary()


# ---------------------------------------------------------------------------
# Basin probing for stable realization


@dataclass(frozen=True)
class StabilityProbe:
    """Batch of perturbed initial conditions around a candidate equilibrium."""

    center: PhasePoint
    radius: float = 1e-2
    count: int = 20
    seed: int = 0
    t_end: float = 200.0
    dt: float = 1e-3


@dataclass(frozen=True)
class ProbeRun:
    terminal_graph: DirectedGraph
    last_event_time: float
    event_count: int
    drift_rate: float


@dataclass(frozen=True)
class StabilityProbeReport:
    target: DirectedGraph
    probe: StabilityProbe
    runs: tuple[ProbeRun, ...]

    DRIFT_TOL = 1e-8

    @property
    def stably_realised(self) -> bool:
        half = self.probe.t_end / 2.0
        return all(
            r.terminal_graph == self.target
            and r.last_event_time < half
            and r.drift_rate < self.DRIFT_TOL
            for r in self.runs
        )

    def summary(self) -> str:
        verdict = "stably realised (numerically)" if self.stably_realised else "NOT stable"
        worst = max((r.drift_rate for r in self.runs), default=0.0)
        events = max((r.event_count for r in self.runs), default=0)
        return (
            f"{verdict}: {len(self.runs)} runs, max drift {worst:.2e}, "
            f"max events {events}"
        )


def _drift_rate(th_pre: np.ndarray, th_final: np.ndarray, window: float) -> float:
    """Max rate of change of the phase differences over the trailing window."""
    d_pre = th_pre[1:] - th_pre[0]
    d_fin = th_final[1:] - th_final[0]
    delta = np.abs(wrap_signed(d_fin - d_pre))
    return float(delta.max() / window) if window > 0 else math.inf


def test_stable_realization(
    net: StructuralNetwork, h: DirectedGraph, probe: StabilityProbe
) -> StabilityProbeReport:
    """Integrate seeded starts in the inf-ball around the probe center.

    A positive report requires every run to end with effective graph h, have
    its last event before t_end / 2, and show terminal phase-difference drift
    below 1e-8.
    """
    rng = np.random.default_rng(np.uint64(probe.seed))
    center = probe.center.array()
    starts = center[None, :] + rng.uniform(-probe.radius, probe.radius, (probe.count, net.n))
    nsteps = max(1, int(round(probe.t_end / probe.dt)))
    drift_steps = min(nsteps, max(1, int(round(1.0 / probe.dt))))
    window = drift_steps * probe.dt

    def one(idx: int) -> ProbeRun:
        res = _run_kernel(net, starts[idx], nsteps, probe.dt, 0, 1024, drift_steps)
        last_t = float(res["ev_t"][-1]) if res["n_events"] else 0.0
        return ProbeRun(
            terminal_graph=DirectedGraph(net.n, res["final_mask"]),
            last_event_time=last_t,
            event_count=int(res["n_events"]),
            drift_rate=_drift_rate(res["pre"], res["final"], window),
        )

    workers = worker_count()
    chunks = [list(range(probe.count))] if workers <= 1 else [
        list(c) for c in np.array_split(np.arange(probe.count), workers) if len(c)
    ]
    results = run_chunked(lambda idxs: [one(i) for i in idxs], chunks, workers)
    runs = tuple(r for chunk in results for r in chunk)
    return StabilityProbeReport(target=h, probe=probe, runs=runs)
