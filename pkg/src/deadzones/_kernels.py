"""Compiled fixed-step RK4 integrator with effective-graph event capture.

The coupling function is lowered to flat arrays: sorted segment breakpoints
over [0, 2*pi) alternating live/dead, plus per-segment profile parameters.
Evaluation modes:

* FAST  - piecewise couplings whose live supports are narrow (<= pi/2) and
  center-symmetric: each structural edge caches its current segment as an
  *unwrapped* interval [lo, hi) plus an unwrapped profile center, so the hot
  loop needs no modulo reduction and no searches.  Bindings only change when
  a phase difference crosses a segment boundary, which is exactly an
  effective-graph event.
* KS    - the analytic modulated Kuramoto-Sakaguchi formula, evaluated
  directly; segment bindings are still used to detect approximate-dead-zone
  crossings.
* SLOW  - generic piecewise couplings; membership and evaluation reduce
  modulo 2*pi every time.

Event times are localized by bisection on the step interval using the exact
(mod-based) field and membership, to a tolerance of dt * 1e-6.  The marching
state is never altered by event handling; a missed graph change that reverts
within one step is a documented limitation of post-step detection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .angles import TWO_PI, wrap
from .coupling import CouplingFunction

MODE_FAST = 0
MODE_KS = 1
MODE_SLOW = 2

BISECT_ITERS = 24  # 2**-24 < 1e-6 of the step interval


# ---------------------------------------------------------------------------
# Coupling compilation


@dataclass(frozen=True)
class CompiledCoupling:
    mode: int
    breaks: np.ndarray  # (M+1,) ascending, breaks[0]=0, breaks[-1]=2*pi
    seg_live: np.ndarray  # (M,) bool
    seg_center: np.ndarray  # (M,) profile center angle (live segments)
    seg_value: np.ndarray
    seg_slope: np.ndarray
    seg_width: np.ndarray  # full support width of the owning profile
    seg_sup_start: np.ndarray  # support start angle of the owning profile
    ks_params: tuple[float, float, float, float]
    speed_bound: float  # max |g| over the circle (conservative)


def compile_coupling(g: CouplingFunction) -> CompiledCoupling:
    if g.kind == "ks":
        p = g.ks
        pts = sorted({0.0, wrap(p.a - p.b), wrap(p.a + p.b)}) if p.b > 0 else [0.0]
        breaks = np.array(pts + [TWO_PI])
        m = len(breaks) - 1
        live = np.array(
            [not g.in_dead_zone((breaks[i] + breaks[i + 1]) / 2.0) for i in range(m)],
            dtype=np.bool_,
        )
        zeros = np.zeros(m)
        return CompiledCoupling(
            mode=MODE_KS,
            breaks=breaks,
            seg_live=live,
            seg_center=zeros,
            seg_value=zeros,
            seg_slope=zeros,
            seg_width=zeros,
            seg_sup_start=zeros,
            ks_params=(p.a, p.b, p.eps, p.alpha),
            speed_bound=1.0,
        )
    pts = {0.0}
    for prof in g.profiles:
        pts.add(wrap(prof.support.start))
        pts.add(prof.support.end)
    breaks = np.array(sorted(pts) + [TWO_PI])
    m = len(breaks) - 1
    seg_live = np.zeros(m, dtype=np.bool_)
    seg_center = np.zeros(m)
    seg_value = np.zeros(m)
    seg_slope = np.zeros(m)
    seg_width = np.zeros(m)
    seg_sup_start = np.zeros(m)
    fast = True
    gmax = 0.0
    for prof in g.profiles:
        gmax = max(gmax, abs(prof.value) + abs(prof.slope) * prof.support.width / 2.0)
        if prof.support.width > math.pi / 2:
            fast = False
        mid_offset = wrap(prof.center - prof.support.start)
        if abs(mid_offset - prof.support.width / 2.0) > 1e-12:
            fast = False  # profile center off the support midpoint
    for s in range(m):
        mid = (breaks[s] + breaks[s + 1]) / 2.0
        for prof in g.profiles:
            if prof.support.contains_open(mid):
                seg_live[s] = True
                seg_center[s] = prof.center
                seg_value[s] = prof.value
                seg_slope[s] = prof.slope
                seg_width[s] = prof.support.width
                seg_sup_start[s] = prof.support.start
                break
    return CompiledCoupling(
        mode=MODE_FAST if fast else MODE_SLOW,
        breaks=breaks,
        seg_live=seg_live,
        seg_center=seg_center,
        seg_value=seg_value,
        seg_slope=seg_slope,
        seg_width=seg_width,
        seg_sup_start=seg_sup_start,
        ks_params=(0.0, 0.0, 1.0, 0.0),
        speed_bound=gmax,
    )


# ---------------------------------------------------------------------------
# njit helpers


@njit(cache=True, nogil=True)
def _reduce(psi):
    # psi % 2*pi can round up to exactly 2*pi for tiny negative inputs
    x = psi % TWO_PI
    return 0.0 if x >= TWO_PI else x


@njit(cache=True, nogil=True)
def _seg_find(breaks, x):
    lo, hi = 0, breaks.shape[0] - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if breaks[mid + 1] <= x:
            lo = mid + 1
        else:
            hi = mid
    return min(lo, breaks.shape[0] - 2)


@njit(cache=True, nogil=True)
def _window_exact(r):
    if r <= 0.0 or r >= 1.0:
        return 0.0
    if 1.0 / 3.0 <= r <= 2.0 / 3.0:
        return 1.0
    x = 1.0 - 3.0 * r if r < 1.0 / 3.0 else 3.0 * r - 2.0
    one = 1.0 - x * x
    if one <= 1e-12:
        return 0.0
    return math.exp(1.0 - 1.0 / one)


@njit(cache=True, nogil=True)
def _g_exact(psi, mode, breaks, seg_live, seg_center, seg_value, seg_slope,
             seg_width, seg_sup_start, ks_a, ks_b, ks_eps, ks_alpha):
    """Reference evaluation: reduce mod 2*pi, search, evaluate."""
    if mode == MODE_KS:
        h = 0.5 * (math.tanh((math.cos(ks_b) - math.cos(ks_a - psi)) / ks_eps) + 1.0)
        return -math.sin(psi + ks_alpha) * h
    x = _reduce(psi)
    s = _seg_find(breaks, x)
    if not seg_live[s]:
        return 0.0
    u = (x - seg_sup_start[s]) % TWO_PI
    w = seg_width[s]
    if u <= 0.0 or u >= w:
        return 0.0
    u_c = (seg_center[s] - seg_sup_start[s]) % TWO_PI
    return (seg_value[s] + seg_slope[s] * (u - u_c)) * _window_exact(u / w)


@njit(cache=True, nogil=True)
def _dead_exact(psi, breaks, seg_live):
    """Closed-arc membership: segment-start boundary points count as dead."""
    x = _reduce(psi)
    s = _seg_find(breaks, x)
    if not seg_live[s]:
        return True
    return x == breaks[s]


@njit(cache=True, nogil=True)
def _mask_exact(th, src, dst, bitpos, breaks, seg_live):
    mask = np.int64(0)
    for e in range(src.shape[0]):
        if not _dead_exact(th[src[e]] - th[dst[e]], breaks, seg_live):
            mask |= np.int64(1) << bitpos[e]
    return mask


@njit(cache=True, nogil=True)
def _field_exact(th, out, omega, src, dst, mode, breaks, seg_live, seg_center,
                 seg_value, seg_slope, seg_width, seg_sup_start,
                 ks_a, ks_b, ks_eps, ks_alpha):
    n = th.shape[0]
    for i in range(n):
        out[i] = omega
    for e in range(src.shape[0]):
        out[dst[e]] += _g_exact(
            th[src[e]] - th[dst[e]], mode, breaks, seg_live, seg_center,
            seg_value, seg_slope, seg_width, seg_sup_start,
            ks_a, ks_b, ks_eps, ks_alpha,
        )


@njit(cache=True, nogil=True)
def _rk4_exact(th, out, hstep, omega, src, dst, mode, breaks, seg_live, seg_center,
               seg_value, seg_slope, seg_width, seg_sup_start,
               ks_a, ks_b, ks_eps, ks_alpha, k1, k2, k3, k4, tmp):
    n = th.shape[0]
    _field_exact(th, k1, omega, src, dst, mode, breaks, seg_live, seg_center,
                 seg_value, seg_slope, seg_width, seg_sup_start, ks_a, ks_b, ks_eps, ks_alpha)
    for i in range(n):
        tmp[i] = th[i] + 0.5 * hstep * k1[i]
    _field_exact(tmp, k2, omega, src, dst, mode, breaks, seg_live, seg_center,
                 seg_value, seg_slope, seg_width, seg_sup_start, ks_a, ks_b, ks_eps, ks_alpha)
    for i in range(n):
        tmp[i] = th[i] + 0.5 * hstep * k2[i]
    _field_exact(tmp, k3, omega, src, dst, mode, breaks, seg_live, seg_center,
                 seg_value, seg_slope, seg_width, seg_sup_start, ks_a, ks_b, ks_eps, ks_alpha)
    for i in range(n):
        tmp[i] = th[i] + hstep * k3[i]
    _field_exact(tmp, k4, omega, src, dst, mode, breaks, seg_live, seg_center,
                 seg_value, seg_slope, seg_width, seg_sup_start, ks_a, ks_b, ks_eps, ks_alpha)
    for i in range(n):
        out[i] = th[i] + (hstep / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])


@njit(cache=True, nogil=True)
def _bind(psi, breaks, seg_live, seg_center, e, b_lo, b_hi, b_live, b_c):
    """Cache the segment containing psi as an unwrapped interval."""
    x = _reduce(psi)
    s = _seg_find(breaks, x)
    base = psi - x
    b_lo[e] = base + breaks[s]
    b_hi[e] = base + breaks[s + 1]
    b_live[e] = seg_live[s]
    if seg_live[s]:
        off = seg_center[s] - x
        off -= TWO_PI * round(off / TWO_PI)
        b_c[e] = psi + off
    return s


@njit(cache=True, nogil=True)
def _integrate_core(
    th0, nsteps, dt, omega, src, dst, bitpos,
    mode, breaks, seg_live, seg_center, seg_value, seg_slope, seg_width, seg_sup_start,
    ks_a, ks_b, ks_eps, ks_alpha,
    stride, sample_th,
    ev_t, ev_before, ev_after,
    drift_steps,
):
    """March nsteps of RK4, recording samples, events, and a drift snapshot.

    Returns (theta_final, theta_pre_drift, n_samples, n_events, truncated,
    initial_mask, final_mask).
    """
    n = th0.shape[0]
    ne = src.shape[0]
    max_events = ev_t.shape[0]
    th = th0.copy()
    th_before = th0.copy()
    th_pre = th0.copy()
    k1 = np.empty(n); k2 = np.empty(n); k3 = np.empty(n); k4 = np.empty(n)
    tmp = np.empty(n); trial = np.empty(n)

    # segment bindings per structural edge
    b_lo = np.empty(ne); b_hi = np.empty(ne); b_c = np.empty(ne)
    b_live = np.zeros(ne, np.bool_)
    b_val = np.empty(ne); b_slp = np.empty(ne); b_half = np.empty(ne); b_plat = np.empty(ne)
    for e in range(ne):
        s = _bind(th[src[e]] - th[dst[e]], breaks, seg_live, seg_center, e, b_lo, b_hi, b_live, b_c)
        b_val[e] = seg_value[s]
        b_slp[e] = seg_slope[s]
        b_half[e] = seg_width[s] / 2.0
        b_plat[e] = seg_width[s] / 6.0
    live_idx = np.empty(ne, np.int64)
    nlive = 0
    for e in range(ne):
        if b_live[e]:
            live_idx[nlive] = e
            nlive += 1

    cur_mask = _mask_exact(th, src, dst, bitpos, breaks, seg_live)
    init_mask = cur_mask
    n_events = 0
    truncated = False

    n_samples = 0
    if stride > 0:
        sample_th[0] = th
        n_samples = 1

    for step in range(nsteps):
        if step == nsteps - drift_steps:
            th_pre[:] = th
        for i in range(n):
            th_before[i] = th[i]

        # --- four RK stages
        for stage in range(4):
            if stage == 0:
                kv = k1
                for i in range(n):
                    tmp[i] = th[i]
            elif stage == 1:
                kv = k2
                for i in range(n):
                    tmp[i] = th[i] + 0.5 * dt * k1[i]
            elif stage == 2:
                kv = k3
                for i in range(n):
                    tmp[i] = th[i] + 0.5 * dt * k2[i]
            else:
                kv = k4
                for i in range(n):
                    tmp[i] = th[i] + dt * k3[i]
            for i in range(n):
                kv[i] = omega
            if mode == MODE_FAST:
                for li in range(nlive):
                    e = live_idx[li]
                    d = tmp[src[e]] - tmp[dst[e]] - b_c[e]
                    ad = abs(d)
                    if ad < b_half[e]:
                        gval = b_val[e] + b_slp[e] * d
                        if ad > b_plat[e]:
                            x = 1.5 * ad / b_half[e] - 0.5
                            one = 1.0 - x * x
                            gval = gval * math.exp(1.0 - 1.0 / one) if one > 1e-12 else 0.0
                        kv[dst[e]] += gval
            elif mode == MODE_KS:
                for e in range(ne):
                    psi = tmp[src[e]] - tmp[dst[e]]
                    h = 0.5 * (math.tanh((math.cos(ks_b) - math.cos(ks_a - psi)) / ks_eps) + 1.0)
                    kv[dst[e]] += -math.sin(psi + ks_alpha) * h
            else:
                for e in range(ne):
                    kv[dst[e]] += _g_exact(
                        tmp[src[e]] - tmp[dst[e]], mode, breaks, seg_live, seg_center,
                        seg_value, seg_slope, seg_width, seg_sup_start,
                        ks_a, ks_b, ks_eps, ks_alpha,
                    )
        for i in range(n):
            th[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])

        # --- post-step boundary detection
        changed = False
        for e in range(ne):
            psi = th[src[e]] - th[dst[e]]
            if psi < b_lo[e] or psi >= b_hi[e]:
                s = _bind(psi, breaks, seg_live, seg_center, e, b_lo, b_hi, b_live, b_c)
                b_val[e] = seg_value[s]
                b_slp[e] = seg_slope[s]
                b_half[e] = seg_width[s] / 2.0
                b_plat[e] = seg_width[s] / 6.0
                changed = True
        if changed:
            nlive = 0
            for e in range(ne):
                if b_live[e]:
                    live_idx[nlive] = e
                    nlive += 1
            new_mask = _mask_exact(th, src, dst, bitpos, breaks, seg_live)
            if new_mask != cur_mask:
                # localize each change in (t, t+dt] by bisection on replays
                t0 = step * dt
                s_lo = 0.0
                mask_lo = cur_mask
                while mask_lo != new_mask:
                    s_hi = dt
                    lo = s_lo
                    hi = s_hi
                    for _ in range(BISECT_ITERS):
                        mid = 0.5 * (lo + hi)
                        _rk4_exact(th_before, trial, mid, omega, src, dst, mode, breaks,
                                   seg_live, seg_center, seg_value, seg_slope, seg_width,
                                   seg_sup_start, ks_a, ks_b, ks_eps, ks_alpha,
                                   k1, k2, k3, k4, tmp)
                        if _mask_exact(trial, src, dst, bitpos, breaks, seg_live) == mask_lo:
                            lo = mid
                        else:
                            hi = mid
                    _rk4_exact(th_before, trial, hi, omega, src, dst, mode, breaks,
                               seg_live, seg_center, seg_value, seg_slope, seg_width,
                               seg_sup_start, ks_a, ks_b, ks_eps, ks_alpha,
                               k1, k2, k3, k4, tmp)
                    mask_hi = _mask_exact(trial, src, dst, bitpos, breaks, seg_live)
                    if n_events < max_events:
                        ev_t[n_events] = t0 + hi
                        ev_before[n_events] = mask_lo
                        ev_after[n_events] = mask_hi
                        n_events += 1
                    else:
                        truncated = True
                    if mask_hi == mask_lo:
                        # boundary grazing: avoid an infinite scan
                        mask_lo = new_mask
                    else:
                        mask_lo = mask_hi
                    s_lo = hi
                # RK stages recompute k1..k4; rebuild noise is irrelevant here
                cur_mask = new_mask

        if stride > 0 and ((step + 1) % stride == 0 or step + 1 == nsteps):
            sample_th[n_samples] = th
            n_samples += 1

    return th, th_pre, n_samples, n_events, truncated, init_mask, cur_mask
