"""2*pi-periodic coupling functions with dead zones.

A coupling function here is either

* ``ExactPiecewise``: identically zero outside a finite set of disjoint open
  "live" arcs, each carrying a smooth windowed-affine bump profile.  The
  window is 1 on the middle third of the arc and decays to zero with all
  derivatives at the arc boundary, so the function takes an exactly
  prescribed value and slope at the profile center while vanishing exactly
  on the complementary closed arcs (the dead zones).

* ``AnalyticKS``: a modulated Kuramoto-Sakaguchi coupling
  ``-sin(psi + alpha) * h(psi)`` with
  ``h(psi) = (tanh((cos b - cos(a - psi)) / eps) + 1) / 2``.
  It is analytic and never exactly zero on an interval; the arc
  ``|psi - a| < b`` where it is exponentially small plays the role of an
  approximate dead zone, and all dead-zone queries use that arc.

Dead zones are closed arcs: boundary points count as dead.  This makes the
partition of phase space by effective coupling graph deterministic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .angles import TWO_PI, circle_dist, wrap
from .errors import PreconditionError, UsageError

#: default steepness / phase-shift constants for the Kuramoto-Sakaguchi family
KS_EPSILON = 5e-3
KS_ALPHA = 1.3

_ARC_TOL = 1e-12


@dataclass(frozen=True)
class CircleArc:
    """Closed arc on the circle: {start + t : 0 <= t <= width} mod 2*pi."""

    start: float
    width: float

    def __post_init__(self):
        object.__setattr__(self, "start", float(wrap(self.start)))
        object.__setattr__(self, "width", float(self.width))
        if not 0.0 < self.width < TWO_PI:
            raise PreconditionError(f"arc width must be in (0, 2*pi), got {self.width}")

    @property
    def end(self) -> float:
        """End angle, reduced to [0, 2*pi)."""
        return wrap(self.start + self.width)

    def contains(self, psi: float) -> bool:
        """Closed membership, invariant under psi -> psi + 2*pi."""
        return wrap(wrap(psi) - self.start) <= self.width

    def contains_open(self, psi: float) -> bool:
        u = wrap(wrap(psi) - self.start)
        return 0.0 < u < self.width

    def reflected(self) -> "CircleArc":
        """Image under psi -> -psi."""
        return CircleArc(wrap(-(self.start + self.width)), self.width)

    def close_to(self, other: "CircleArc", tol: float = 1e-9) -> bool:
        return circle_dist(self.start, other.start) <= tol and abs(self.width - other.width) <= tol


def _sorted_arcs(arcs) -> tuple[CircleArc, ...]:
    return tuple(sorted(arcs, key=lambda a: (a.start, a.width)))


def _check_disjoint(arcs: tuple[CircleArc, ...], what: str) -> None:
    """Closed arcs must be pairwise disjoint (positive gaps along the circle)."""
    if len(arcs) <= 1:
        if arcs and arcs[0].width >= TWO_PI - _ARC_TOL:
            raise PreconditionError(f"{what} cover the whole circle")
        return
    total = 0.0
    for i, a in enumerate(arcs):
        b = arcs[(i + 1) % len(arcs)]
        gap = wrap(b.start - a.start) - a.width
        if gap <= _ARC_TOL:
            raise PreconditionError(f"{what} must be pairwise disjoint: {a} and {b}")
        total += a.width
    if total >= TWO_PI - _ARC_TOL:
        raise PreconditionError(f"{what} cover the whole circle")


@dataclass(frozen=True)
class DeadZoneSet:
    """Finite union of pairwise disjoint closed arcs with nonempty complement."""

    arcs: tuple[CircleArc, ...]

    def __post_init__(self):
        arcs = _sorted_arcs(self.arcs)
        _check_disjoint(arcs, "dead zones")
        object.__setattr__(self, "arcs", arcs)

    def __len__(self) -> int:
        return len(self.arcs)

    def contains(self, psi: float) -> bool:
        return any(a.contains(psi) for a in self.arcs)

    def mask(self, psi) -> np.ndarray:
        """Vectorized closed membership; same arithmetic as `contains`."""
        x = np.mod(np.asarray(psi, dtype=float), TWO_PI)
        out = np.zeros(x.shape, dtype=bool)
        for a in self.arcs:
            out |= np.mod(x - a.start, TWO_PI) <= a.width
        return out

    def boundary_distance(self, psi: float) -> float:
        """Distance from psi to the nearest dead-zone endpoint (inf if no zones)."""
        if not self.arcs:
            return math.inf
        return min(
            min(circle_dist(psi, a.start), circle_dist(psi, a.end)) for a in self.arcs
        )

    def reflected(self) -> "DeadZoneSet":
        return DeadZoneSet(tuple(a.reflected() for a in self.arcs))

    def set_equal(self, other: "DeadZoneSet", tol: float = 1e-9) -> bool:
        if len(self.arcs) != len(other.arcs):
            return False
        unused = list(other.arcs)
        for a in self.arcs:
            for i, b in enumerate(unused):
                if a.close_to(b, tol):
                    del unused[i]
                    break
            else:
                return False
        return True

    def complement(self) -> tuple[CircleArc, ...]:
        """Live arcs: the connected components of the complement."""
        if not self.arcs:
            # whole circle, nudged to satisfy the strict width < 2*pi invariant
            return (CircleArc(0.0, TWO_PI - 1e-12),)
        return tuple(_gap_arcs(self.arcs))


def _gap_arcs(arcs: tuple[CircleArc, ...]) -> list[CircleArc]:
    """Arcs of the complement of a sorted tuple of disjoint arcs."""
    out = []
    for i, a in enumerate(arcs):
        nxt = arcs[(i + 1) % len(arcs)]
        width = wrap(nxt.start - a.end) if len(arcs) > 1 else TWO_PI - a.width
        if width > _ARC_TOL:
            out.append(CircleArc(a.end, width))
    return out


# ---------------------------------------------------------------------------
# Live-zone bump profiles


def _window(r: float) -> tuple[float, float]:
    """Plateau window on (0, 1) and its derivative dw/dr.

    w == 1 on [1/3, 2/3]; on the outer thirds it follows the rescaled bump
    shape exp(1 - 1/(1 - x^2)), vanishing with all derivatives at r in {0, 1}.
    """
    if r <= 0.0 or r >= 1.0:
        return 0.0, 0.0
    if 1.0 / 3.0 <= r <= 2.0 / 3.0:
        return 1.0, 0.0
    x = 1.0 - 3.0 * r if r < 1.0 / 3.0 else 3.0 * r - 2.0
    one = 1.0 - x * x
    if one <= 1e-12:
        return 0.0, 0.0
    w = math.exp(1.0 - 1.0 / one)
    dw_dx = -2.0 * x * w / (one * one)
    dw_dr = -3.0 * dw_dx if r < 1.0 / 3.0 else 3.0 * dw_dx
    return w, dw_dr


@dataclass(frozen=True)
class BumpProfile:
    """Windowed affine segment supported on one live arc.

    p(psi) = (value + slope * d) * w(psi) where d is the signed offset from
    the center measured along the arc and w is the plateau window over the
    support.  p(center) = value and p'(center) = slope whenever the center
    sits in the plateau (always true for the centered profiles built by the
    realization constructions).
    """

    center: float
    support: CircleArc
    value: float
    slope: float

    def __post_init__(self):
        object.__setattr__(self, "center", float(wrap(self.center)))
        if not self.support.contains_open(self.center):
            raise PreconditionError(
                f"profile center {self.center} outside the open support {self.support}"
            )

    def _offsets(self, psi: float) -> tuple[float, float] | None:
        u = wrap(psi - self.support.start)
        if not 0.0 < u < self.support.width:
            return None
        u_c = wrap(self.center - self.support.start)
        return u / self.support.width, u - u_c

    def eval(self, psi: float) -> float:
        off = self._offsets(psi)
        if off is None:
            return 0.0
        r, d = off
        w, _ = _window(r)
        return (self.value + self.slope * d) * w

    def deriv(self, psi: float) -> float:
        off = self._offsets(psi)
        if off is None:
            return 0.0
        r, d = off
        w, dw_dr = _window(r)
        return self.slope * w + (self.value + self.slope * d) * dw_dr / self.support.width


def make_bump_profile(center: float, support: CircleArc, value: float, slope: float) -> BumpProfile:
    """Build a live-zone profile; the center must lie in the open support."""
    return BumpProfile(center=center, support=support, value=value, slope=slope)


# ---------------------------------------------------------------------------
# Coupling functions


@dataclass(frozen=True)
class KSParams:
    a: float
    b: float
    eps: float = KS_EPSILON
    alpha: float = KS_ALPHA

    def __post_init__(self):
        object.__setattr__(self, "a", float(wrap(self.a)))
        if not 0.0 <= self.b < math.pi:
            raise PreconditionError(f"KS half-width b must be in [0, pi), got {self.b}")
        if self.eps <= 0.0:
            raise PreconditionError("KS steepness eps must be positive")


@dataclass(frozen=True)
class CouplingFunction:
    """A coupling function with simple dead zones; immutable and pure."""

    kind: str  # "piecewise" | "ks"
    profiles: tuple[BumpProfile, ...] = ()
    ks: KSParams | None = None
    dead_zones: DeadZoneSet = field(init=False)

    def __post_init__(self):
        if self.kind == "piecewise":
            if not self.profiles:
                raise PreconditionError("piecewise coupling needs at least one live profile")
            if all(p.value == 0.0 and p.slope == 0.0 for p in self.profiles):
                raise PreconditionError("coupling function must be non-constant")
            supports = _sorted_arcs(p.support for p in self.profiles)
            _check_disjoint(supports, "live-zone supports")
            object.__setattr__(
                self, "profiles", tuple(sorted(self.profiles, key=lambda p: p.support.start))
            )
            object.__setattr__(self, "dead_zones", DeadZoneSet(tuple(_gap_arcs(supports))))
        elif self.kind == "ks":
            if self.ks is None:
                raise PreconditionError("ks coupling needs parameters")
            arcs = ()
            if self.ks.b > 0.0:
                arcs = (CircleArc(wrap(self.ks.a - self.ks.b), 2.0 * self.ks.b),)
            object.__setattr__(self, "dead_zones", DeadZoneSet(arcs))
        else:
            raise PreconditionError(f"unknown coupling kind {self.kind!r}")

    # -- constructors

    @classmethod
    def piecewise(cls, profiles) -> "CouplingFunction":
        return cls(kind="piecewise", profiles=tuple(profiles))

    @classmethod
    def kuramoto_sakaguchi(
        cls, a: float, b: float, eps: float = KS_EPSILON, alpha: float = KS_ALPHA
    ) -> "CouplingFunction":
        return cls(kind="ks", ks=KSParams(a=a, b=b, eps=eps, alpha=alpha))

    # -- evaluation

    def __call__(self, psi: float) -> float:
        return self.eval(psi)

    def eval(self, psi: float) -> float:
        x = wrap(psi)  # reduce first: evaluation is exactly 2*pi-periodic
        if self.kind == "ks":
            p = self.ks
            h = 0.5 * (math.tanh((math.cos(p.b) - math.cos(p.a - x)) / p.eps) + 1.0)
            return -math.sin(x + p.alpha) * h
        for prof in self.profiles:
            if prof.support.contains_open(x):
                return prof.eval(x)
        return 0.0

    def deriv(self, psi: float) -> float:
        x = wrap(psi)
        if self.kind == "ks":
            p = self.ks
            z = (math.cos(p.b) - math.cos(p.a - x)) / p.eps
            th = math.tanh(z)
            h = 0.5 * (th + 1.0)
            dh = 0.5 * (1.0 - th * th) * (-math.sin(p.a - x) / p.eps)
            return -math.cos(x + p.alpha) * h - math.sin(x + p.alpha) * dh
        for prof in self.profiles:
            if prof.support.contains_open(x):
                return prof.deriv(x)
        return 0.0

    def eval_array(self, psi) -> np.ndarray:
        x = np.mod(np.asarray(psi, dtype=float), TWO_PI)
        if self.kind == "ks":
            p = self.ks
            h = 0.5 * (np.tanh((math.cos(p.b) - np.cos(p.a - x)) / p.eps) + 1.0)
            return -np.sin(x + p.alpha) * h
        out = np.zeros(x.shape)
        flat = out.reshape(-1)
        src = x.reshape(-1)
        for i in range(flat.size):
            flat[i] = self.eval(float(src[i]))
        return out

    # -- dead-zone queries

    def in_dead_zone(self, psi: float) -> bool:
        return self.dead_zones.contains(psi)

    def in_live_zone(self, psi: float) -> bool:
        return not self.in_dead_zone(psi)

    def dead_mask(self, psi) -> np.ndarray:
        return self.dead_zones.mask(psi)

    @property
    def dead_zone_count(self) -> int:
        return len(self.dead_zones)

    @property
    def live_zones(self) -> tuple[CircleArc, ...]:
        if self.kind == "piecewise":
            return tuple(p.support for p in self.profiles)
        return self.dead_zones.complement()

    def is_dead_zone_symmetric(self, tol: float = 1e-9) -> bool:
        return self.dead_zones.set_equal(self.dead_zones.reflected(), tol)


# module-level operation aliases matching the library surface


def eval_coupling(g: CouplingFunction, psi: float) -> float:
    return g.eval(psi)


def deriv_coupling(g: CouplingFunction, psi: float) -> float:
    return g.deriv(psi)


def in_dead_zone(g: CouplingFunction, psi: float) -> bool:
    return g.in_dead_zone(psi)


def is_dead_zone_symmetric(g: CouplingFunction, tol: float = 1e-9) -> bool:
    return g.is_dead_zone_symmetric(tol)


# ---------------------------------------------------------------------------
# Spec-file (JSON) round-trip


def coupling_to_dict(g: CouplingFunction) -> dict:
    if g.kind == "ks":
        return {"kind": "ks", "a": g.ks.a, "b": g.ks.b, "eps": g.ks.eps, "alpha": g.ks.alpha}
    return {
        "kind": "piecewise",
        "profiles": [
            {
                "center": p.center,
                "support_start": p.support.start,
                "support_width": p.support.width,
                "value": p.value,
                "slope": p.slope,
            }
            for p in g.profiles
        ],
    }


def coupling_from_dict(d: dict) -> CouplingFunction:
    try:
        kind = d["kind"]
        if kind == "ks":
            return CouplingFunction.kuramoto_sakaguchi(
                a=float(d["a"]),
                b=float(d["b"]),
                eps=float(d.get("eps", KS_EPSILON)),
                alpha=float(d.get("alpha", KS_ALPHA)),
            )
        if kind == "piecewise":
            profiles = [
                make_bump_profile(
                    center=float(p["center"]),
                    support=CircleArc(float(p["support_start"]), float(p["support_width"])),
                    value=float(p["value"]),
                    slope=float(p["slope"]),
                )
                for p in d["profiles"]
            ]
            return CouplingFunction.piecewise(profiles)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed coupling spec: {exc}") from exc
    raise UsageError(f"unknown coupling kind {d.get('kind')!r}")


def load_coupling(path) -> CouplingFunction:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"coupling file {path} is not valid JSON: {exc}") from exc
    return coupling_from_dict(d)


def save_coupling(g: CouplingFunction, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(coupling_to_dict(g), fh, indent=2)
        fh.write("\n")
